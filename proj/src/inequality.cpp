#include <algorithm>
#include <cmath>

#include "pgnet/structure.hpp"
#include "pgnet/welfare.hpp"

namespace pgnet {

namespace {

double autarky_utility(const Player& pl) {
  const auto [x, y] = isolation_bundle(pl);
  return pl.pref.utility(x, y);
}

// nullopt: no periphery, or all periphery players sponsor the same set
std::optional<bool> periphery_differs(const Economy& econ) {
  const StrategyProfile eq = recursive_construction(econ);
  const StructureReport rep = classify_core_periphery(eq.g, eq.x, econ.k(), econ.tol().indiff);
  if (rep.periphery.size() < 2) return false;
  const auto first = eq.g.neighbors(rep.periphery.front());
  for (Index i : rep.periphery)
    if (eq.g.neighbors(i) != first) return true;
  return false;
}

}  // namespace

InequalityReport inequality_report(const Economy& econ, const StrategyProfile& eq) {
  const ConsumptionReport cr = consumption_report(econ, eq);
  const StructureReport rep = classify_core_periphery(eq.g, eq.x, econ.k(), econ.tol().indiff);
  InequalityReport out;
  const Vector w = econ.wealth();
  out.wealth_spread = w.maxCoeff() - w.minCoeff();
  std::size_t reduced = 0, increased = 0;
  for (std::size_t a = 0; a < rep.periphery.size(); ++a) {
    for (std::size_t b = a + 1; b < rep.periphery.size(); ++b) {
      const Index i = rep.periphery[a], j = rep.periphery[b];
      PairGap gap{i, j, std::abs(cr.utility[i] - cr.utility[j]),
                  std::abs(autarky_utility(econ[i]) - autarky_utility(econ[j])),
                  std::abs(cr.social_income[i] - cr.social_income[j]), std::abs(w[i] - w[j])};
      const double slack = econ.tol().indiff;
      if (gap.utility_gap <= gap.autarky_utility_gap + slack) ++reduced;
      if (gap.income_gap >= gap.wealth_gap - slack) ++increased;
      out.pairs.push_back(gap);
    }
  }
  if (!out.pairs.empty()) {
    out.share_utility_reduced = static_cast<double>(reduced) / static_cast<double>(out.pairs.size());
    out.share_income_increased = static_cast<double>(increased) / static_cast<double>(out.pairs.size());
  }
  if (econ.homogeneous()) {
    try {
      out.spread_threshold = periphery_divergence_spread(econ);
    } catch (const std::exception&) {
      // construction failed somewhere along the path; leave unset
    }
  }
  return out;
}

std::optional<double> periphery_divergence_spread(const Economy& econ) {
  const Vector w = econ.wealth();
  const double mean = w.mean();
  const double spread = w.maxCoeff() - w.minCoeff();
  if (spread <= 0.0) return std::nullopt;
  auto differs = [&](double s) {
    const Vector ws = (Vector::Constant(w.size(), mean) + s * (w.array() - mean).matrix());
    return periphery_differs(econ.with_wealth(ws)).value_or(false);
  };
  // coarse scan for the first scale that separates, then bisect
  constexpr int steps = 64;
  double prev = 0.0;
  for (int s = 1; s <= steps; ++s) {
    const double cur = static_cast<double>(s) / steps;
    if (!differs(cur)) {
      prev = cur;
      continue;
    }
    double lo = prev, hi = cur;
    for (int it = 0; it < 50; ++it) {
      const double mid = 0.5 * (lo + hi);
      (differs(mid) ? hi : lo) = mid;
    }
    return hi * spread;
  }
  return std::nullopt;
}

}  // namespace pgnet
