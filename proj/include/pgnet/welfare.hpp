#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pgnet/equilibrium.hpp"

namespace pgnet {

// welfare(econ, profile) lives in economy.hpp.

struct EfficientSolution {
  enum class Shape { Empty, Star };
  Shape shape = Shape::Empty;
  Index hub = -1;
  std::vector<Index> members;   // hub and spokes, ascending
  std::vector<Index> isolated;  // everyone else
  double x_hub = 0.0;
  Vector x;  // hub provision, spokes 0, isolated players their own demand
  Vector y;
  Vector income;  // resources each player consumes, link costs included
  double lambda = 0.0;
  double welfare = 0.0;
  LinkProfile g;
};

/// First best: the planner pools all wealth. Either nobody links, or one hub
/// provides for a star and the rest stay isolated.
EfficientSolution efficient_solution(const Economy& econ);

struct TransferScheme {
  Index hub = -1;
  Vector t;       // w' - w, sums to zero
  Vector wealth;  // w'
  StrategyProfile before;
  StrategyProfile after;
  double welfare_before = 0.0;
  double welfare_after = 0.0;
  std::optional<EquilibriumVerdict> verdict;  // of `after` under w'
  bool feasible = true;
  std::string note;
  std::optional<double> beta;  // hub's wealth share (linear-Engel solver)
};

/// Budget-balanced transfers that turn a non-empty equilibrium into a star
/// around its best-connected player.
TransferScheme improving_transfers(const Economy& econ, const StrategyProfile& eq);

/// Welfare-maximizing budget-balanced transfers over star networks, for the
/// given hub or the best one.
TransferScheme second_best(const Economy& econ, std::optional<Index> hub = std::nullopt,
                           std::uint64_t seed = 1);

/// Homogeneous Cobb-Douglas economies: one-dimensional problem in the hub's
/// share beta of total wealth, spokes sharing the rest equally.
TransferScheme second_best_linear(const Economy& econ);

/// Welfare of the symmetric star with hub share beta (0 when infeasible).
double linear_star_welfare(const Economy& econ, double beta);

struct PriceScheme {
  Index hub = -1;
  double p_x = 1.0;
  Vector tau;
  Economy priced;  // w - tau, hub buys the public good at p_x
  StrategyProfile profile;
  EfficientSolution first_best;
  EquilibriumVerdict verdict;
};

/// Implements the first best with a subsidized public good price for its hub
/// and lump-sum taxes. Throws SolverError when the first best is empty or
/// the hub's marginal rate of substitution is outside (0, 1).
PriceScheme personalized_prices(const Economy& econ);

struct PairGap {
  Index i = -1, j = -1;
  double utility_gap = 0.0;
  double autarky_utility_gap = 0.0;
  double income_gap = 0.0;  // |wbar_i - wbar_j|
  double wealth_gap = 0.0;
};

struct InequalityReport {
  std::vector<PairGap> pairs;         // periphery pairs
  double share_utility_reduced = 0.0;  // utility gap <= autarky gap
  double share_income_increased = 0.0;  // social income gap >= wealth gap
  double wealth_spread = 0.0;
  std::optional<double> spread_threshold;  // homogeneous economies only
};

InequalityReport inequality_report(const Economy& econ, const StrategyProfile& eq);

/// Smallest wealth spread (shrinking deviations around the mean) at which
/// periphery players of the constructed equilibrium stop having identical
/// link sets. nullopt if they never differ up to the actual spread.
std::optional<double> periphery_divergence_spread(const Economy& econ);

struct LawOfFewConfig {
  Player prototype;  // preference and price shared by everyone
  double k = 1.0;
  double wealth_low = 10.0;
  double wealth_cap = 10.0;  // omega
  std::vector<Index> sizes;
  std::uint64_t seed = 1;
  unsigned threads = 0;
};

struct LawOfFewRow {
  Index n = 0;
  std::uint64_t seed = 0;
  Index core_size = 0;
  double core_share = 0.0;
  double welfare = 0.0;
  std::string error;  // empty on success
};

std::vector<LawOfFewRow> law_of_few_experiment(const LawOfFewConfig& cfg);
std::string law_of_few_csv(const std::vector<LawOfFewRow>& rows);

}  // namespace pgnet
