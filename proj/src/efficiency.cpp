#include <algorithm>
#include <cmath>
#include <limits>

#include "pgnet/welfare.hpp"

namespace pgnet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Indirect utility of a player alone with income e.
double isolated_value(const Player& pl, double e) {
  const double x = pl.pref.demand(pl.p, e, pl.px);
  return pl.pref.utility(x, std::max(0.0, (e - pl.px * x) / pl.p));
}

double isolated_marginal(const Player& pl, double e) {
  const double h = std::max(1e-7, 1e-6 * e);
  if (e < h) return (isolated_value(pl, e + h) - isolated_value(pl, e)) / h;
  return (isolated_value(pl, e + h) - isolated_value(pl, e - h)) / (2.0 * h);
}

// Resources an agent absorbs at shadow value lambda, capped at `cap`.
double member_spend(const Player& pl, double xh, double lambda, double cap) {
  return std::min(cap, pl.p * pl.pref.private_for_marginal(xh, lambda * pl.p));
}

double isolated_spend(const Player& pl, double lambda, double cap) {
  if (isolated_marginal(pl, cap) >= lambda) return cap;
  if (isolated_marginal(pl, 0.0) < lambda) return 0.0;
  double lo = 0.0, hi = cap;
  for (int it = 0; it < 100 && hi - lo > 1e-13 * std::max(1.0, cap); ++it) {
    const double mid = 0.5 * (lo + hi);
    (isolated_marginal(pl, mid) >= lambda ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

struct Config {
  Index hub = -1;  // -1: nobody linked
  std::vector<Index> members, isolated;
};

struct Allocation {
  double xh = 0.0;
  double lambda = 0.0;
  Vector spend;  // p_i y_i for members, income for isolated
  double welfare = -kInf;
};

// Splits R between members' private consumption and isolated incomes so that
// marginal values agree.
Allocation split(const Economy& econ, const Config& c, double xh, double R) {
  Allocation a;
  a.xh = xh;
  a.spend = Vector::Zero(econ.size());
  if (R < 0.0) return a;
  auto each = [&](double lambda) {
    Vector s = Vector::Zero(econ.size());
    for (Index i : c.members) s[i] = member_spend(econ[i], xh, lambda, R);
    for (Index j : c.isolated) s[j] = isolated_spend(econ[j], lambda, R);
    return s;
  };
  double llo = -30.0, lhi = 30.0;  // log lambda
  if (each(std::exp(llo)).sum() < R) {
    a.spend = each(std::exp(llo));
    a.lambda = std::exp(llo);
  } else if (each(std::exp(lhi)).sum() > R) {
    a.spend = each(std::exp(lhi)) * (R / each(std::exp(lhi)).sum());
    a.lambda = std::exp(lhi);
  } else {
    for (int it = 0; it < 200 && lhi - llo > 1e-15; ++it) {
      const double mid = 0.5 * (llo + lhi);
      (each(std::exp(mid)).sum() >= R ? llo : lhi) = mid;
    }
    const Vector low = each(std::exp(lhi)), high = each(std::exp(llo));
    const Vector room = (high - low).cwiseMax(0.0);
    const double rem = R - low.sum();
    a.spend = low;
    if (room.sum() > 0.0) a.spend += room * (rem / room.sum());
    a.lambda = std::exp(0.5 * (llo + lhi));
  }
  double w = 0.0;
  for (Index i : c.members) w += econ[i].pref.utility(xh, a.spend[i] / econ[i].p);
  for (Index j : c.isolated) w += isolated_value(econ[j], a.spend[j]);
  a.welfare = w;
  return a;
}

Allocation solve_config(const Economy& econ, const Config& c) {
  const double W = econ.total_wealth();
  if (c.members.empty()) return split(econ, c, 0.0, W);
  const double top = W - static_cast<double>(c.members.size() - 1) * econ.k();
  if (top <= 0.0) return {};
  // d welfare / d x_h = sum of members' U_x - lambda, decreasing in x_h
  auto slope = [&](double xh, Allocation& out) {
    out = split(econ, c, xh, top - xh);
    double ux = 0.0;
    for (Index i : c.members) ux += econ[i].pref.gradient(xh, out.spend[i] / econ[i].p)[0];
    return ux - out.lambda;
  };
  Allocation a;
  double lo = 0.0, hi = top;
  if (slope(hi, a) >= 0.0) return a;
  for (int it = 0; it < 200 && hi - lo > 1e-14 * top; ++it) {
    const double mid = 0.5 * (lo + hi);
    (slope(mid, a) > 0.0 ? lo : hi) = mid;
  }
  return split(econ, c, 0.5 * (lo + hi), top - 0.5 * (lo + hi));
}

EfficientSolution assemble(const Economy& econ, const Config& c, const Allocation& a) {
  const Index n = econ.size();
  EfficientSolution s;
  s.shape = c.members.empty() ? EfficientSolution::Shape::Empty : EfficientSolution::Shape::Star;
  s.hub = c.members.empty() ? -1 : c.hub;
  s.members = c.members;
  s.isolated = c.isolated;
  s.x_hub = a.xh;
  s.lambda = a.lambda;
  s.welfare = a.welfare;
  s.x = Vector::Zero(n);
  s.y = Vector::Zero(n);
  s.income = Vector::Zero(n);
  s.g = LinkProfile(n);
  for (Index i : c.members) {
    s.y[i] = a.spend[i] / econ[i].p;
    s.income[i] = a.spend[i] + econ.k();
    if (i != c.hub) s.g.set(i, c.hub);
  }
  if (!c.members.empty()) {
    s.x[c.hub] = a.xh;
    s.income[c.hub] = a.spend[c.hub] + econ[c.hub].px * a.xh;
  }
  for (Index j : c.isolated) {
    const Player& pl = econ[j];
    s.x[j] = pl.pref.demand(pl.p, a.spend[j], pl.px);
    s.y[j] = std::max(0.0, (a.spend[j] - pl.px * s.x[j]) / pl.p);
    s.income[j] = a.spend[j];
  }
  return s;
}

}  // namespace

EfficientSolution efficient_solution(const Economy& econ) {
  const Index n = econ.size();
  Config empty;
  for (Index i = 0; i < n; ++i) empty.isolated.push_back(i);
  Config best_c = empty;
  Allocation best = solve_config(econ, empty);

  auto consider = [&](const Config& c) {
    Allocation a = solve_config(econ, c);
    if (a.welfare > best.welfare + 1e-12 * std::max(1.0, std::abs(best.welfare))) {
      best = a;
      best_c = c;
    }
    return a.welfare;
  };
  auto make = [&](Index h, const std::vector<bool>& in) {
    Config c;
    c.hub = h;
    for (Index i = 0; i < n; ++i) (in[static_cast<std::size_t>(i)] ? c.members : c.isolated).push_back(i);
    return c;
  };

  for (Index h = 0; h < n; ++h) {
    if (n <= 5) {
      // larger member sets first so they win ties
      std::vector<unsigned> masks;
      for (unsigned m = 0; m < (1u << n); ++m)
        if (m >> h & 1u) masks.push_back(m);
      std::stable_sort(masks.begin(), masks.end(),
                       [](unsigned a, unsigned b) { return __builtin_popcount(a) > __builtin_popcount(b); });
      for (unsigned m : masks) {
        std::vector<bool> in(static_cast<std::size_t>(n));
        for (Index i = 0; i < n; ++i) in[static_cast<std::size_t>(i)] = m >> i & 1u;
        consider(make(h, in));
      }
    } else {
      std::vector<bool> in(static_cast<std::size_t>(n), true);
      double current = consider(make(h, in));
      while (true) {
        Index drop = -1;
        double gain = current;
        for (Index j = 0; j < n; ++j) {
          if (j == h || !in[static_cast<std::size_t>(j)]) continue;
          in[static_cast<std::size_t>(j)] = false;
          const double w = consider(make(h, in));
          in[static_cast<std::size_t>(j)] = true;
          if (w > gain) {
            gain = w;
            drop = j;
          }
        }
        if (drop < 0) break;
        in[static_cast<std::size_t>(drop)] = false;
        current = gain;
      }
    }
  }
  return assemble(econ, best_c, best);
}

}  // namespace pgnet
