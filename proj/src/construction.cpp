#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "pgnet/equilibrium.hpp"

namespace pgnet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Lets players outside the core best respond until their links settle.
void attach_periphery(const Economy& econ, StrategyProfile& prof, const std::vector<bool>& in_core) {
  const Index n = econ.size();
  for (int pass = 0; pass < 100; ++pass) {
    bool changed = false;
    for (Index j = 0; j < n; ++j) {
      if (in_core[static_cast<std::size_t>(j)]) continue;
      const Strategy s = canonical_best_response(econ, prof, j);
      if (s.links != prof.g.neighbors(j) || std::abs(s.x - prof.x[j]) > econ.tol().fixpoint) changed = true;
      for (Index l = 0; l < n; ++l)
        if (l != j) prof.g.set(j, l, false);
      for (Index l : s.links) prof.g.set(j, l);
      prof.x[j] = s.x;
      prof.y[j] = s.y;
    }
    if (!changed) return;
  }
}

std::vector<Index> order_by(const Vector& key) {
  std::vector<Index> order(static_cast<std::size_t>(key.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return key[a] > key[b]; });
  return order;
}

StrategyProfile empty_network(const Economy& econ) { return consumption_fixed_point(econ, LinkProfile(econ.size())); }

Vector isolation_provisions(const Economy& econ) {
  Vector x(econ.size());
  for (Index i = 0; i < econ.size(); ++i) x[i] = isolation_bundle(econ[i]).first;
  return x;
}

}  // namespace

CoreCandidate core_construction(const Economy& econ, std::span<const Index> core) {
  const Index n = econ.size();
  if (core.empty()) throw std::invalid_argument("core must not be empty");
  std::vector<bool> in_core(static_cast<std::size_t>(n), false);
  for (Index i : core) {
    if (i < 0 || i >= n) throw std::invalid_argument("core member out of range");
    if (in_core[static_cast<std::size_t>(i)]) throw std::invalid_argument("duplicate core member");
    in_core[static_cast<std::size_t>(i)] = true;
  }
  CoreCandidate cand;
  cand.core.assign(core.begin(), core.end());
  std::sort(cand.core.begin(), cand.core.end());
  const double d = static_cast<double>(cand.core.size());
  const double k = econ.k();

  // H(xbar) = sum_i (phi_i(xbar) - w_i + (d-1)k)/px_i + (1-d) xbar, increasing in xbar
  auto excess = [&](double xbar, bool upper) {
    double h = (1.0 - d) * xbar;
    for (Index i : cand.core) {
      const Player& pl = econ[i];
      const auto [lo, hi] = pl.pref.engel_inverse_bounds(pl.p, xbar, pl.px);
      const double m = upper ? hi : lo;
      if (m == kInf) return kInf;
      h += (m - pl.w + (d - 1.0) * k) / pl.px;
    }
    return h;
  };
  double top = 0.0;
  for (Index i : cand.core) top += econ[i].w / econ[i].px;
  if (excess(0.0, false) > 0.0) {
    cand.rejection = "no common public good level: core members cannot afford their links";
    cand.profile = empty_network(econ);
    return cand;
  }
  double lo = 0.0, hi = top;
  if (excess(hi, false) <= 0.0) {
    lo = hi;
  } else {
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
      const double mid = 0.5 * (lo + hi);
      (excess(mid, false) <= 0.0 ? lo : hi) = mid;
    }
  }
  const double xbar = lo;
  if (excess(xbar, true) < -1e-9 * std::max(1.0, top)) {
    cand.rejection = "no root of the core balance equation";
    cand.profile = empty_network(econ);
    return cand;
  }
  cand.core_public = xbar;

  // incomes: start at the lower inverse, spread any gap over flat players
  std::vector<double> income, room;
  std::vector<Index> flat;
  double gap = 0.0;
  for (Index i : cand.core) {
    const Player& pl = econ[i];
    const auto [mlo, mhi] = pl.pref.engel_inverse_bounds(pl.p, xbar, pl.px);
    income.push_back(mlo);
    room.push_back(mhi - mlo);
    gap -= (mlo - pl.w + (d - 1.0) * k) / pl.px;
  }
  gap -= (1.0 - d) * xbar;
  for (std::size_t r = 0; r < income.size(); ++r)
    if (room[r] > 1e-12) flat.push_back(static_cast<Index>(r));
  if (gap > 1e-12 * std::max(1.0, top) && !flat.empty()) {
    // water-fill in units of public good
    double left = gap;
    std::vector<Index> open = flat;
    for (int round = 0; round < 64 && left > 1e-15 && !open.empty(); ++round) {
      const double share = left / static_cast<double>(open.size());
      std::vector<Index> still;
      for (Index r : open) {
        const auto u = static_cast<std::size_t>(r);
        const double px = econ[cand.core[u]].px;
        const double add = std::min(share, room[u] / px);
        income[u] += add * px;
        room[u] -= add * px;
        left -= add;
        if (room[u] > 1e-12) still.push_back(r);
      }
      open = std::move(still);
    }
  }

  StrategyProfile prof{Vector::Zero(n), Vector::Zero(n), LinkProfile(n)};
  for (std::size_t r = 0; r < cand.core.size(); ++r) {
    const Index i = cand.core[r];
    const Player& pl = econ[i];
    for (Index j : cand.core)
      if (j != i) prof.g.set(i, j);
    prof.x[i] = std::max(0.0, xbar - (income[r] - pl.w + (d - 1.0) * k) / pl.px);
  }
  for (Index i = 0; i < n; ++i) {
    if (in_core[static_cast<std::size_t>(i)]) continue;
    const auto [xi, yi] = isolation_bundle(econ[i]);
    (void)xi;
    prof.y[i] = yi;
  }
  for (Index i : cand.core) {
    const Player& pl = econ[i];
    prof.y[i] = (pl.w - (d - 1.0) * k - pl.px * prof.x[i]) / pl.p;
  }
  if (std::any_of(cand.core.begin(), cand.core.end(), [&](Index i) { return prof.y[i] < -1e-9; })) {
    cand.rejection = "core members cannot afford the reciprocated links";
    cand.profile = prof;
    return cand;
  }
  for (Index i : cand.core) prof.y[i] = std::max(0.0, prof.y[i]);
  attach_periphery(econ, prof, in_core);
  cand.profile = prof;

  for (Index i : cand.core) {
    if (prof.x[i] < k - 1e-9 * std::max(1.0, k)) {
      std::ostringstream os;
      os << "core member " << i + 1 << " provides " << prof.x[i] << " < k";
      cand.rejection = os.str();
      return cand;
    }
  }
  try {
    cand.verdict = check_equilibrium(econ, prof);
  } catch (const std::invalid_argument& e) {
    cand.rejection = e.what();
    return cand;
  }
  if (!cand.verdict->is_nash) {
    std::ostringstream os;
    const auto& w = cand.verdict->witness;
    os << "not an equilibrium";
    if (w) os << ": player " << w->player + 1 << " gains " << w->gain;
    cand.rejection = os.str();
    return cand;
  }
  cand.accepted = true;
  return cand;
}

std::vector<Index> recursive_core(const Economy& econ) {
  if (!econ.homogeneous())
    throw std::invalid_argument("the recursive construction needs identical preferences and prices");
  const std::vector<Index> order = order_by(econ.wealth());
  std::vector<Index> core{order.front()};
  CoreCandidate cand = core_construction(econ, core);
  if (cand.profile.g.in_degree(order.front()) == 0) return {};
  while (true) {
    std::optional<Index> next;
    for (Index z : order) {
      if (std::find(core.begin(), core.end(), z) != core.end()) continue;
      if (cand.profile.x[z] >= econ.k() - 1e-9) {
        next = z;
        break;
      }
    }
    if (!next) break;
    core.push_back(*next);
    cand = core_construction(econ, core);
  }
  return core;
}

StrategyProfile recursive_construction(const Economy& econ) {
  const std::vector<Index> core = recursive_core(econ);
  if (core.empty()) return empty_network(econ);
  CoreCandidate cand = core_construction(econ, core);
  if (!cand.verdict) cand.verdict = check_equilibrium(econ, cand.profile);
  if (!cand.verdict->is_nash) throw SolverError("recursive construction ended outside equilibrium: " + cand.rejection);
  return cand.profile;
}

StrategyProfile solve_equilibrium(const Economy& econ) {
  if (econ.homogeneous()) return recursive_construction(econ);
  const Index n = econ.size();
  const Vector xi = isolation_provisions(econ);
  if (econ.k() > xi.maxCoeff() + econ.tol().indiff) return empty_network(econ);

  // grow from the largest autarky contributor
  const std::vector<Index> order = order_by(xi);
  std::vector<Index> core{order.front()};
  CoreCandidate cand = core_construction(econ, core);
  if (cand.profile.g.in_degree(order.front()) == 0 && cand.accepted) return cand.profile;
  for (Index step = 1; step < n && !cand.accepted; ++step) {
    std::optional<Index> next;
    for (Index z : order)
      if (std::find(core.begin(), core.end(), z) == core.end() && cand.profile.x[z] >= econ.k() - 1e-9) {
        next = z;
        break;
      }
    if (!next) break;
    core.push_back(*next);
    cand = core_construction(econ, core);
  }
  if (cand.accepted) return cand.profile;

  if (n <= 12) {
    std::vector<unsigned> masks;
    for (unsigned m = 1; m < (1u << n); ++m) masks.push_back(m);
    auto weight = [&](unsigned m) {
      double s = 0.0;
      for (Index i = 0; i < n; ++i)
        if (m >> i & 1u) s += xi[i];
      return s;
    };
    std::stable_sort(masks.begin(), masks.end(), [&](unsigned a, unsigned b) { return weight(a) > weight(b); });
    std::optional<StrategyProfile> fallback;
    for (unsigned m : masks) {
      std::vector<Index> d;
      for (Index i = 0; i < n; ++i)
        if (m >> i & 1u) d.push_back(i);
      CoreCandidate c = core_construction(econ, d);
      if (!c.accepted) continue;
      if (c.verdict->is_sociable) return c.profile;
      if (!fallback) fallback = c.profile;
    }
    if (fallback) return *fallback;
  }
  if (n <= kMaxEnumerationSize) {
    const auto all = enumerate_equilibria(econ, Refinement::Nash);
    if (!all.empty()) return all.front().profile;
  }
  throw SolverError("no equilibrium found by the core search");
}

}  // namespace pgnet
