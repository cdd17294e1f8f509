#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pgnet/economy.hpp"

namespace pgnet {

using Adjacency = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Undirected version: gbar_ij = max(g_ij, g_ji).
Adjacency closure(const LinkProfile& g);

/// Connected components of an undirected graph, each sorted, ordered by
/// smallest member.
std::vector<std::vector<Index>> components(const Adjacency& gbar);

/// Players grouped by closure degree.
std::map<Index, std::vector<Index>> cells(const Adjacency& gbar);

/// A pair of players witnessing a failed structural property.
struct Certificate {
  Index i = -1;
  Index j = -1;
  std::string reason;
};

struct NestedSplitVerdict {
  bool nested = false;
  std::vector<Index> order;  // periphery by increasing out-degree
  std::optional<Certificate> certificate;
};

/// Periphery taken as the non-isolated players nobody links to.
NestedSplitVerdict is_nested_split(const LinkProfile& g);
/// Nestedness of the given periphery's out-neighbourhoods only.
NestedSplitVerdict is_nested_split(const LinkProfile& g, std::span<const Index> periphery);

struct StructureReport {
  std::vector<Index> core;
  std::vector<Index> periphery;
  std::vector<Index> isolated;
  std::vector<Index> borderline;  // |x_i - k| within tolerance
  bool is_core_periphery = false;
  bool is_complete_core_periphery = false;
  bool is_star = false;
  bool is_nested_split = false;
  std::map<Index, std::vector<Index>> cells;
  std::optional<Certificate> certificate;
};

/// Core = players providing more than k (+ tol); isolated = closure degree 0.
StructureReport classify_core_periphery(const LinkProfile& g, const Vector& x, double k, double tol = 1e-7);

struct DotAnnotations {
  Vector w, x, y;  // optional, labels use whichever are sized
  std::string name = "g";
};

std::string export_dot(const LinkProfile& g, const StructureReport& report, const DotAnnotations& ann = {});

/// "from,to" rows, 1-based.
std::string edge_list_csv(const LinkProfile& g);

}  // namespace pgnet
