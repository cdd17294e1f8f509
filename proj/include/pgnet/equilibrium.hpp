#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pgnet/economy.hpp"
#include "pgnet/errors.hpp"

namespace pgnet {

enum class Refinement { Nash, Sociable, Strict };

std::string to_string(Refinement r);
Refinement parse_refinement(const std::string& s);

/// One player's own choice: sponsored links plus consumption.
struct Strategy {
  std::vector<Index> links;  // ascending
  double x = 0.0;
  double y = 0.0;
  double utility = 0.0;
};

/// Optimal consumption given a number of links and the spillover they bring.
/// Returns nullopt when the links are unaffordable.
std::optional<Strategy> consume_with_links(const Player& player, double k, Index link_count,
                                           double spillover);

struct BestResponseSet {
  double utility = 0.0;
  std::vector<Strategy> strategies;  // capped at max_listed
  bool unique = true;                // one optimal link count; equal contributors interchangeable
  bool truncated = false;

  static constexpr std::size_t max_listed = 64;
};

BestResponseSet best_response(const Economy& econ, const StrategyProfile& profile, Index i);

/// The optimal strategy a construction picks: most links among the optima,
/// lowest indices among equal contributors.
Strategy canonical_best_response(const Economy& econ, const StrategyProfile& profile, Index i);

struct Deviation {
  Index player = -1;
  Strategy alternative;
  double gain = 0.0;  // alternative utility minus current utility
};

struct EquilibriumVerdict {
  bool is_nash = false;
  bool is_sociable = false;
  bool is_strict = false;
  std::optional<Deviation> witness;  // first failed check, if any

  bool satisfies(Refinement r) const;
};

/// Throws std::invalid_argument for profiles that violate feasibility.
EquilibriumVerdict check_equilibrium(const Economy& econ, const StrategyProfile& profile);

/// Provisions solving x_i = max(gamma_i(wbar_i) - xbar_{-i}, 0) on a fixed
/// network. Throws SolverError on non-convergence and std::invalid_argument
/// when some player cannot pay for her links.
StrategyProfile consumption_fixed_point(const Economy& econ, const LinkProfile& g);

/// Every solution of the provision system on g, for closed-form families
/// (enumeration over Engel-curve pieces). Players flagged in `must_be_active`
/// are restricted to positive provision. Numeric families fall back to the
/// single damped Gauss-Seidel solution.
std::vector<StrategyProfile> consumption_fixed_points(const Economy& econ, const LinkProfile& g,
                                                      const std::vector<bool>& must_be_active = {});

/// Max-norm residual of the provision system.
double fixed_point_residual(const Economy& econ, const StrategyProfile& profile);

struct EnumeratedEquilibrium {
  StrategyProfile profile;
  EquilibriumVerdict verdict;
  int symmetry_class = 0;
};

inline constexpr Index kMaxEnumerationSize = 5;

/// Exhaustive search over all 2^(n(n-1)) link profiles (n <= 5).
std::vector<EnumeratedEquilibrium> enumerate_equilibria(const Economy& econ, Refinement refinement,
                                                        unsigned threads = 0);

struct CoreCandidate {
  std::vector<Index> core;  // D
  double core_public = 0.0;  // common public good consumption of D
  StrategyProfile profile;   // core plus best-responding periphery
  bool accepted = false;
  std::string rejection;
  std::optional<EquilibriumVerdict> verdict;
};

/// Builds the allocation with a complete reciprocated core on D and the rest
/// best-responding. Throws std::invalid_argument for an empty or invalid D.
CoreCandidate core_construction(const Economy& econ, std::span<const Index> core);

/// Homogeneous economies only: grows the core from the richest player.
StrategyProfile recursive_construction(const Economy& econ);

/// Core found by recursive_construction, in insertion order.
std::vector<Index> recursive_core(const Economy& econ);

/// Constructive equilibrium for any economy: recursive construction when
/// homogeneous, otherwise a search over candidate cores.
StrategyProfile solve_equilibrium(const Economy& econ);

}  // namespace pgnet
