#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pgnet/equilibrium.hpp"

namespace pgnet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Income each player has left after paying for her links.
Vector link_budgets(const Economy& econ, const LinkProfile& g) {
  Vector b(econ.size());
  for (Index i = 0; i < econ.size(); ++i) {
    b[i] = econ[i].w - static_cast<double>(g.out_degree(i)) * econ.k();
    if (b[i] < -1e-12 * std::max(1.0, econ[i].w)) {
      std::ostringstream os;
      os << "player " << i + 1 << " cannot pay for " << g.out_degree(i) << " links";
      throw std::invalid_argument(os.str());
    }
    b[i] = std::max(b[i], 0.0);
  }
  return b;
}

double scale_of(const Economy& econ) { return std::max(1.0, econ.wealth().maxCoeff()); }

double provision_update(const Player& pl, double budget, double spill) {
  return std::max(pl.pref.demand(pl.p, budget + pl.px * spill, pl.px) - spill, 0.0);
}

StrategyProfile gauss_seidel(const Economy& econ, const LinkProfile& g, const Vector& budget) {
  const Index n = econ.size();
  const double tol = econ.tol().fixpoint * scale_of(econ);
  Vector x(n);
  for (Index i = 0; i < n; ++i) x[i] = provision_update(econ[i], budget[i], 0.0);
  const auto& adj = g.adjacency();
  double change = kInf;
  for (int sweep = 0; sweep < 100000; ++sweep) {
    change = 0.0;
    for (Index i = 0; i < n; ++i) {
      double spill = 0.0;
      for (Index j = 0; j < n; ++j)
        if (adj(i, j)) spill += x[j];
      const double next = 0.5 * x[i] + 0.5 * provision_update(econ[i], budget[i], spill);
      change = std::max(change, std::abs(next - x[i]));
      x[i] = next;
    }
    if (change <= tol) return profile_from_provisions(econ, g, x);
  }
  throw SolverError("provision iteration did not converge", change);
}

bool any_numeric(const Economy& econ) {
  return std::any_of(econ.players().begin(), econ.players().end(),
                     [](const Player& pl) { return pl.pref.is_numeric(); });
}

// Every solution, one regime (inactive or an Engel piece per player) at a time.
std::vector<StrategyProfile> piecewise_solutions(const Economy& econ, const LinkProfile& g,
                                                 const Vector& budget, const std::vector<bool>& must_be_active) {
  const Index n = econ.size();
  const double vt = 1e-9 * scale_of(econ);
  std::vector<std::vector<Preference::EngelPiece>> pieces(static_cast<std::size_t>(n));
  std::vector<int> first(static_cast<std::size_t>(n)), radix(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const auto u = static_cast<std::size_t>(i);
    pieces[u] = econ[i].pref.engel_pieces(econ[i].p, econ[i].px);
    // option 0 is "inactive"
    first[u] = (!must_be_active.empty() && must_be_active[u]) ? 1 : 0;
    radix[u] = static_cast<int>(pieces[u].size()) + 1;
  }
  const Eigen::MatrixXd G = g.weights();
  std::vector<int> option(first);
  std::vector<StrategyProfile> out;
  Eigen::MatrixXd A(n, n);
  Vector rhs(n);
  while (true) {
    A.setIdentity();
    rhs.setZero();
    for (Index i = 0; i < n; ++i) {
      const int o = option[static_cast<std::size_t>(i)];
      if (o == 0) continue;
      const auto& pc = pieces[static_cast<std::size_t>(i)][static_cast<std::size_t>(o - 1)];
      A.row(i) += (1.0 - pc.slope * econ[i].px) * G.row(i);
      rhs[i] = pc.slope * budget[i] + pc.intercept;
    }
    Vector x;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    if (lu.isInvertible())
      x = lu.solve(rhs);
    else
      x = A.completeOrthogonalDecomposition().solve(rhs);  // minimum-norm member of a continuum

    bool ok = (A * x - rhs).cwiseAbs().maxCoeff() <= vt && x.minCoeff() >= -vt;
    const Vector spill = G * x.cwiseMax(0.0);
    for (Index i = 0; ok && i < n; ++i) {
      const int o = option[static_cast<std::size_t>(i)];
      const Player& pl = econ[i];
      const double m = budget[i] + pl.px * spill[i];
      if (o == 0) {
        if (pl.pref.demand(pl.p, m, pl.px) > spill[i] + vt) ok = false;
      } else {
        const auto& pc = pieces[static_cast<std::size_t>(i)][static_cast<std::size_t>(o - 1)];
        if (m < pc.lo - vt || m > pc.hi + vt) ok = false;
        if (pl.px * std::max(x[i], 0.0) > budget[i] + vt) ok = false;
      }
    }
    if (ok) {
      x = x.cwiseMax(0.0);
      for (Index i = 0; i < n; ++i) x[i] = std::min(x[i], budget[i] / econ[i].px);
      const bool seen = std::any_of(out.begin(), out.end(), [&](const StrategyProfile& s) {
        return (s.x - x).cwiseAbs().maxCoeff() <= 1e-9 * scale_of(econ);
      });
      if (!seen) {
        StrategyProfile prof = profile_from_provisions(econ, g, x);
        if (fixed_point_residual(econ, prof) <= 1e-8 * scale_of(econ)) out.push_back(std::move(prof));
      }
    }
    // next regime
    Index pos = 0;
    while (pos < n) {
      auto& o = option[static_cast<std::size_t>(pos)];
      if (++o < radix[static_cast<std::size_t>(pos)]) break;
      o = first[static_cast<std::size_t>(pos)];
      ++pos;
    }
    if (pos == n) break;
  }
  return out;
}

// Solves the linear system of the regime GS landed in; keeps GS if that fails.
StrategyProfile polish(const Economy& econ, const StrategyProfile& approx, const Vector& budget) {
  const Index n = econ.size();
  const Eigen::MatrixXd G = approx.g.weights();
  const Vector spill = G * approx.x;
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n);
  Vector rhs = Vector::Zero(n);
  const double vt = 1e-7 * scale_of(econ);
  for (Index i = 0; i < n; ++i) {
    if (approx.x[i] <= vt) continue;
    const Player& pl = econ[i];
    const double m = budget[i] + pl.px * spill[i];
    for (const auto& pc : pl.pref.engel_pieces(pl.p, pl.px)) {
      if (m >= pc.lo && m < pc.hi) {
        A.row(i) += (1.0 - pc.slope * pl.px) * G.row(i);
        rhs[i] = pc.slope * budget[i] + pc.intercept;
        break;
      }
    }
  }
  Vector x = A.completeOrthogonalDecomposition().solve(rhs);
  if ((x - approx.x).cwiseAbs().maxCoeff() > 1e-5 * scale_of(econ) || x.minCoeff() < -vt) return approx;
  StrategyProfile prof = profile_from_provisions(econ, approx.g, x.cwiseMax(0.0));
  return fixed_point_residual(econ, prof) <= fixed_point_residual(econ, approx) ? prof : approx;
}

}  // namespace

double fixed_point_residual(const Economy& econ, const StrategyProfile& profile) {
  const Vector spill = spillovers(profile.g, profile.x);
  double r = 0.0;
  for (Index i = 0; i < econ.size(); ++i) {
    const Player& pl = econ[i];
    const double budget = std::max(0.0, pl.w - static_cast<double>(profile.g.out_degree(i)) * econ.k());
    r = std::max(r, std::abs(profile.x[i] - provision_update(pl, budget, spill[i])));
  }
  return r;
}

std::vector<StrategyProfile> consumption_fixed_points(const Economy& econ, const LinkProfile& g,
                                                      const std::vector<bool>& must_be_active) {
  if (g.size() != econ.size()) throw std::invalid_argument("network size does not match the economy");
  const Vector budget = link_budgets(econ, g);
  if (any_numeric(econ)) return {gauss_seidel(econ, g, budget)};
  return piecewise_solutions(econ, g, budget, must_be_active);
}

StrategyProfile consumption_fixed_point(const Economy& econ, const LinkProfile& g) {
  if (g.size() != econ.size()) throw std::invalid_argument("network size does not match the economy");
  const Vector budget = link_budgets(econ, g);
  if (any_numeric(econ)) return gauss_seidel(econ, g, budget);
  if (econ.size() > 8) return polish(econ, gauss_seidel(econ, g, budget), budget);

  auto all = piecewise_solutions(econ, g, budget, {});
  if (all.empty()) throw SolverError("no solution of the provision system found");
  if (all.size() == 1) return std::move(all.front());
  // several solutions: the one the damped iteration is attracted to
  try {
    const StrategyProfile gs = gauss_seidel(econ, g, budget);
    auto best = std::min_element(all.begin(), all.end(), [&](const auto& a, const auto& b) {
      return (a.x - gs.x).squaredNorm() < (b.x - gs.x).squaredNorm();
    });
    return std::move(*best);
  } catch (const SolverError&) {
    return std::move(all.front());
  }
}

}  // namespace pgnet
