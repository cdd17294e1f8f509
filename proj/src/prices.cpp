#include <sstream>

#include "pgnet/errors.hpp"
#include "pgnet/welfare.hpp"

namespace pgnet {

PriceScheme personalized_prices(const Economy& econ) {
  const Index n = econ.size();
  EfficientSolution fb = efficient_solution(econ);
  if (n == 1) {
    // autarky: the price that supports the isolation bundle, no taxes
    const Player& pl = econ[0];
    const Eigen::Vector2d g = pl.pref.gradient(fb.x[0], fb.y[0]);
    const double px = pl.p * g[0] / g[1];
    StrategyProfile s{fb.x, fb.y, LinkProfile(1)};
    Economy priced = econ.with_public_price(0, px);
    const double tau = pl.w - (px * fb.x[0] + pl.p * fb.y[0]);
    priced = priced.with_wealth(Vector::Constant(1, pl.w - tau));
    EquilibriumVerdict verdict = check_equilibrium(priced, s);
    fb.hub = 0;
    return PriceScheme{0, px, Vector::Constant(1, tau), std::move(priced), std::move(s), std::move(fb), std::move(verdict)};
  }
  if (fb.shape == EfficientSolution::Shape::Empty || fb.members.size() < 2)
    throw SolverError("the first best has no star; nothing to implement with prices", 0.0);
  const Index h = fb.hub;
  const Player& hub = econ[h];
  const Eigen::Vector2d grad = hub.pref.gradient(fb.x_hub, fb.y[h]);
  const double px = hub.p * grad[0] / grad[1];
  if (!(px > 0.0 && px < 1.0)) {
    std::ostringstream os;
    os << "hub's marginal rate of substitution " << px << " is outside (0, 1)";
    throw SolverError(os.str(), px);
  }

  Vector tau(n);
  for (Index i = 0; i < n; ++i) {
    const Player& pl = econ[i];
    if (i == h)
      tau[i] = pl.w - (px * fb.x_hub + pl.p * fb.y[i]);
    else if (fb.g.out_degree(i) > 0)
      tau[i] = pl.w - (pl.p * fb.y[i] + econ.k());
    else
      tau[i] = pl.w - fb.income[i];
  }

  for (Index i = 0; i < n; ++i)
    if (!(econ[i].w - tau[i] > 0.0)) {
      std::ostringstream os;
      os << "the first best leaves player " << i + 1 << " with no resources; no positive wealth supports it";
      throw SolverError(os.str(), econ[i].w - tau[i]);
    }

  StrategyProfile s{Vector::Zero(n), fb.y, fb.g};
  s.x[h] = fb.x_hub;
  for (Index j : fb.isolated) s.x[j] = fb.x[j];
  Economy priced = econ.with_wealth(econ.wealth() - tau).with_public_price(h, px);
  EquilibriumVerdict verdict = check_equilibrium(priced, s);
  return PriceScheme{h, px, tau, std::move(priced), std::move(s), std::move(fb), std::move(verdict)};
}

}  // namespace pgnet
