#include "pgnet/structure.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace pgnet {

Adjacency closure(const LinkProfile& g) {
  const auto& a = g.adjacency();
  Adjacency gbar = a.array() || a.transpose().array();
  return gbar;
}

std::vector<std::vector<Index>> components(const Adjacency& gbar) {
  const Index n = gbar.rows();
  std::vector<int> label(static_cast<std::size_t>(n), -1);
  std::vector<std::vector<Index>> out;
  for (Index s = 0; s < n; ++s) {
    if (label[static_cast<std::size_t>(s)] >= 0) continue;
    const int id = static_cast<int>(out.size());
    out.emplace_back();
    std::vector<Index> stack{s};
    label[static_cast<std::size_t>(s)] = id;
    while (!stack.empty()) {
      const Index v = stack.back();
      stack.pop_back();
      out.back().push_back(v);
      for (Index u = 0; u < n; ++u)
        if (gbar(v, u) && label[static_cast<std::size_t>(u)] < 0) {
          label[static_cast<std::size_t>(u)] = id;
          stack.push_back(u);
        }
    }
    std::sort(out.back().begin(), out.back().end());
  }
  return out;
}

std::map<Index, std::vector<Index>> cells(const Adjacency& gbar) {
  std::map<Index, std::vector<Index>> out;
  for (Index i = 0; i < gbar.rows(); ++i) out[gbar.row(i).count()].push_back(i);
  return out;
}

NestedSplitVerdict is_nested_split(const LinkProfile& g, std::span<const Index> periphery) {
  NestedSplitVerdict v;
  v.order.assign(periphery.begin(), periphery.end());
  std::stable_sort(v.order.begin(), v.order.end(),
                   [&](Index a, Index b) { return g.out_degree(a) < g.out_degree(b); });
  for (std::size_t r = 1; r < v.order.size(); ++r) {
    const Index small = v.order[r - 1], big = v.order[r];
    for (Index l = 0; l < g.size(); ++l) {
      if (g(small, l) && !g(big, l)) {
        std::ostringstream os;
        os << "neighbourhood of " << small + 1 << " is not contained in that of " << big + 1;
        v.certificate = Certificate{small, big, os.str()};
        return v;
      }
    }
  }
  v.nested = true;
  return v;
}

namespace {

struct Partition {
  std::vector<Index> core, periphery, isolated;
};

// Checks definition (i)-(iii); returns the first violation.
std::optional<Certificate> core_periphery_violation(const LinkProfile& g, const Partition& part) {
  for (Index i : part.periphery)
    for (Index j : part.periphery)
      if (i != j && g(i, j)) return Certificate{i, j, "link between periphery players"};
  for (Index i : part.core)
    for (Index j : part.core)
      if (i != j && !g(i, j)) return Certificate{i, j, "core link missing or not reciprocated"};
  for (Index i : part.periphery) {
    const bool reaches = std::any_of(part.core.begin(), part.core.end(), [&](Index l) { return g(i, l); });
    if (!reaches) return Certificate{i, -1, "periphery player without a link into the core"};
  }
  for (Index i : part.isolated)
    for (Index j = 0; j < g.size(); ++j)
      if (g(i, j) || g(j, i)) return Certificate{i, j, "isolated player has a link"};
  return std::nullopt;
}

}  // namespace

NestedSplitVerdict is_nested_split(const LinkProfile& g) {
  const Adjacency gbar = closure(g);
  Partition part;
  for (Index i = 0; i < g.size(); ++i) {
    if (gbar.row(i).count() == 0)
      part.isolated.push_back(i);
    else if (g.in_degree(i) > 0)
      part.core.push_back(i);
    else
      part.periphery.push_back(i);
  }
  if (auto bad = core_periphery_violation(g, part)) {
    NestedSplitVerdict v;
    v.order = part.periphery;
    v.certificate = bad;
    return v;
  }
  return is_nested_split(g, part.periphery);
}

StructureReport classify_core_periphery(const LinkProfile& g, const Vector& x, double k, double tol) {
  if (x.size() != g.size()) throw std::invalid_argument("provision vector does not match the network");
  StructureReport r;
  const Adjacency gbar = closure(g);
  Partition part;
  for (Index i = 0; i < g.size(); ++i) {
    if (std::abs(x[i] - k) <= tol) r.borderline.push_back(i);
    if (gbar.row(i).count() == 0)
      part.isolated.push_back(i);
    else if (x[i] > k + tol)
      part.core.push_back(i);
    else
      part.periphery.push_back(i);
  }
  r.core = part.core;
  r.periphery = part.periphery;
  r.isolated = part.isolated;
  r.cells = cells(gbar);

  if (auto bad = core_periphery_violation(g, part)) {
    r.certificate = bad;
    return r;
  }
  r.is_core_periphery = true;
  r.is_star = r.core.size() == 1 && !r.periphery.empty();
  r.is_complete_core_periphery = r.isolated.empty() && !r.core.empty();
  for (Index i : r.periphery) {
    if (g.neighbors(i) != r.core) {
      r.is_complete_core_periphery = false;
      break;
    }
  }
  const NestedSplitVerdict ns = is_nested_split(g, r.periphery);
  r.is_nested_split = ns.nested;
  if (!ns.nested) r.certificate = ns.certificate;
  return r;
}

std::string export_dot(const LinkProfile& g, const StructureReport& report, const DotAnnotations& ann) {
  std::ostringstream os;
  os << std::setprecision(4);
  os << "digraph \"" << ann.name << "\" {\n  node [shape=circle];\n";
  const Index n = g.size();
  for (Index i = 0; i < n; ++i) {
    os << "  \"" << i + 1 << "\" [label=\"" << i + 1;
    if (ann.w.size() == n) os << "\\nw=" << ann.w[i];
    if (ann.x.size() == n) os << "\\nx=" << ann.x[i];
    if (ann.y.size() == n) os << "\\ny=" << ann.y[i];
    os << "\"";
    if (std::find(report.core.begin(), report.core.end(), i) != report.core.end())
      os << ", style=filled, fillcolor=gray80";
    os << "];\n";
  }
  for (const auto& [i, j] : g.edges()) os << "  \"" << i + 1 << "\" -> \"" << j + 1 << "\";\n";
  os << "}\n";
  return os.str();
}

std::string edge_list_csv(const LinkProfile& g) {
  std::ostringstream os;
  os << "from,to\n";
  for (const auto& [i, j] : g.edges()) os << i + 1 << ',' << j + 1 << '\n';
  return os.str();
}

}  // namespace pgnet
