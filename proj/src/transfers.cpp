#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

#include "pgnet/structure.hpp"
#include "pgnet/welfare.hpp"

namespace pgnet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Hub provides alone; spokes link to it; isolated players stay alone.
StrategyProfile star_profile(const Economy& econ, Index hub, const std::vector<bool>& isolated) {
  const Index n = econ.size();
  StrategyProfile s{Vector::Zero(n), Vector::Zero(n), LinkProfile(n)};
  const auto [xh, yh] = isolation_bundle(econ[hub]);
  s.x[hub] = xh;
  s.y[hub] = yh;
  for (Index j = 0; j < n; ++j) {
    if (j == hub) continue;
    if (isolated[static_cast<std::size_t>(j)]) {
      const auto [xj, yj] = isolation_bundle(econ[j]);
      s.x[j] = xj;
      s.y[j] = yj;
      continue;
    }
    s.g.set(j, hub);
    const auto c = consume_with_links(econ[j], econ.k(), 1, xh);
    if (!c) {
      s.y[j] = -1.0;  // unaffordable; flagged by validation
      continue;
    }
    s.x[j] = c->x;
    s.y[j] = c->y;
  }
  return s;
}

struct StarValue {
  double welfare = -kInf;
  double violation = 0.0;
};

// Welfare of the star at incomes w and how far it is from the constraints:
// hub provides at least k, spokes afford the link and provide at most k,
// isolated players prefer staying out.
StarValue star_value(const Economy& econ, Index hub, const std::vector<bool>& isolated, const Vector& w) {
  const Index n = econ.size();
  const double k = econ.k();
  StarValue v;
  const Player& ph = econ[hub];
  const double xh = ph.pref.demand(ph.p, w[hub], ph.px);
  double total = ph.pref.utility(xh, std::max(0.0, (w[hub] - ph.px * xh) / ph.p));
  v.violation += std::max(0.0, k - xh);
  for (Index j = 0; j < n; ++j) {
    if (j == hub) continue;
    const Player& pl = econ[j];
    if (isolated[static_cast<std::size_t>(j)]) {
      const double xj = pl.pref.demand(pl.p, w[j], pl.px);
      const double alone = pl.pref.utility(xj, std::max(0.0, (w[j] - pl.px * xj) / pl.p));
      total += alone;
      if (w[j] >= k) {
        const double b = w[j] - k;
        const double xb = std::max(pl.pref.demand(pl.p, b + pl.px * xh, pl.px), xh);
        const double join = pl.pref.utility(xb, std::max(0.0, (b - pl.px * (xb - xh)) / pl.p));
        v.violation += std::max(0.0, join - alone);
      }
      continue;
    }
    const double b = w[j] - k;
    v.violation += std::max(0.0, -b);
    const double budget = std::max(0.0, b);
    const double xb = std::max(pl.pref.demand(pl.p, budget + pl.px * xh, pl.px), xh);
    v.violation += std::max(0.0, (xb - xh) - k);
    total += pl.pref.utility(xb, std::max(0.0, (budget - pl.px * (xb - xh)) / pl.p));
  }
  v.welfare = total;
  return v;
}

struct Search {
  const Economy& econ;
  Index hub;
  std::vector<bool> isolated;
  double W;

  bool feasible(const Vector& w) const { return star_value(econ, hub, isolated, w).violation <= 0.0; }
  double welfare(const Vector& w) const { return star_value(econ, hub, isolated, w).welfare; }

  // Everything to the hub except what spokes need to link; isolated players
  // keep a sliver, too little to join.
  std::optional<Vector> anchor() const {
    const Index n = econ.size();
    const double k = econ.k();
    Vector w(n);
    double rest = W;
    for (Index j = 0; j < n; ++j) {
      if (j == hub) continue;
      w[j] = isolated[static_cast<std::size_t>(j)] ? std::min(0.5 * k, 1e-3 * W) : k * (1.0 + 1e-9);
      if (w[j] <= 0.0) w[j] = 1e-9 * W;
      rest -= w[j];
    }
    if (rest <= 0.0) return std::nullopt;
    w[hub] = rest;
    if (!feasible(w)) return std::nullopt;
    return w;
  }

  // Largest theta in [0,1] keeping (1-theta) a + theta b feasible.
  Vector blend(const Vector& a, const Vector& b) const {
    if (feasible(b)) return b;
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (feasible((1.0 - mid) * a + mid * b) ? lo : hi) = mid;
    }
    return (1.0 - lo) * a + lo * b;
  }

  // Moves delta from i to j, delta searched over the feasible interval.
  bool pair_step(Vector& w, Index i, Index j) const {
    const double floor = 1e-12 * W;
    const double f0 = welfare(w);
    auto at = [&](double d) {
      Vector v = w;
      v[i] -= d;
      v[j] += d;
      return v;
    };
    auto edge = [&](double limit) {
      if (feasible(at(limit))) return limit;
      double lo = 0.0, hi = limit;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (feasible(at(mid)) ? lo : hi) = mid;
      }
      return lo;
    };
    const double a = edge(-(w[j] - floor)), b = edge(w[i] - floor);
    if (b - a <= 1e-14 * W) return false;
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = a, hi = b;
    double c = hi - invphi * (hi - lo), d = lo + invphi * (hi - lo);
    double fc = welfare(at(c)), fd = welfare(at(d));
    while (hi - lo > 1e-11 * W) {
      if (fc < fd) {
        lo = c;
        c = d;
        fc = fd;
        d = lo + invphi * (hi - lo);
        fd = welfare(at(d));
      } else {
        hi = d;
        d = c;
        fd = fc;
        c = hi - invphi * (hi - lo);
        fc = welfare(at(c));
      }
    }
    double best = 0.5 * (lo + hi);
    double fb = welfare(at(best));
    for (double e : {a, b})
      if (welfare(at(e)) > fb) {
        best = e;
        fb = welfare(at(e));
      }
    if (fb <= f0 + 1e-13 * std::max(1.0, std::abs(f0))) return false;
    w = at(best);
    return true;
  }

  // Pairwise ascent, most promising pairs (by marginal welfare) first.
  Vector climb(Vector w) const {
    const Index n = econ.size();
    for (int iter = 0; iter < 4000; ++iter) {
      Vector grad(n);
      const double h = 1e-7 * W;
      for (Index i = 0; i < n; ++i) {
        Vector up = w, down = w;
        up[i] += h;
        down[i] = std::max(0.0, down[i] - h);
        grad[i] = (welfare(up) - welfare(down)) / (up[i] - down[i]);
      }
      std::vector<std::pair<Index, Index>> pairs;
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j)
          if (i != j) pairs.emplace_back(i, j);
      std::stable_sort(pairs.begin(), pairs.end(), [&](const auto& p, const auto& q) {
        return grad[p.second] - grad[p.first] > grad[q.second] - grad[q.first];
      });
      bool moved = false;
      for (const auto& [i, j] : pairs) {
        if (grad[j] < grad[i]) break;
        if (pair_step(w, i, j)) {
          moved = true;
          break;
        }
      }
      if (!moved) break;
    }
    return w;
  }
};

struct HubResult {
  double welfare = -kInf;
  Vector wealth;
  std::vector<bool> isolated;
  StrategyProfile profile;
  EquilibriumVerdict verdict;
  bool found = false;
};

HubResult best_for_hub(const Economy& econ, Index hub, std::uint64_t seed) {
  const Index n = econ.size();
  const double W = econ.total_wealth();
  HubResult out;
  const unsigned others = static_cast<unsigned>(n - 1);
  const unsigned subsets = n <= 6 ? (1u << others) : 1u;
  std::mt19937_64 rng(seed * 1000003ULL + static_cast<std::uint64_t>(hub));
  for (unsigned mask = 0; mask < subsets; ++mask) {
    std::vector<bool> iso(static_cast<std::size_t>(n), false);
    unsigned bit = 0;
    for (Index j = 0; j < n; ++j) {
      if (j == hub) continue;
      iso[static_cast<std::size_t>(j)] = mask >> bit & 1u;
      ++bit;
    }
    Search s{econ, hub, iso, W};
    const auto anchor = s.anchor();
    if (!anchor) continue;
    std::vector<Vector> starts{s.blend(*anchor, econ.wealth())};
    const int restarts = mask == 0 ? 20 : 4;
    std::exponential_distribution<double> expo(1.0);
    for (int r = 0; r < restarts; ++r) {
      Vector share(n);
      for (Index i = 0; i < n; ++i) share[i] = expo(rng);
      starts.push_back(s.blend(*anchor, share * (W / share.sum())));
    }
    for (const Vector& start : starts) {
      const Vector w = s.climb(start);
      const double f = s.welfare(w);
      if (f <= out.welfare + 1e-9) continue;
      const Economy moved = econ.with_wealth(w.cwiseMax(1e-12));
      StrategyProfile prof = star_profile(moved, hub, iso);
      if (!validate_profile(moved, prof).empty()) continue;
      const EquilibriumVerdict v = check_equilibrium(moved, prof);
      if (!v.is_nash) continue;
      out = {f, w, iso, std::move(prof), v, true};
    }
  }
  return out;
}

Vector balance(const Vector& w_new, const Vector& w_old) {
  Vector t = w_new - w_old;
  // absorb rounding in the largest recipient
  Index top = 0;
  t.maxCoeff(&top);
  t[top] -= t.sum();
  return t;
}

std::optional<StrategyProfile> status_quo(const Economy& econ) {
  try {
    return solve_equilibrium(econ);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace

TransferScheme improving_transfers(const Economy& econ, const StrategyProfile& eq) {
  const Index n = econ.size();
  const double k = econ.k();
  if (eq.size() != n) throw std::invalid_argument("profile does not match the economy");
  if (eq.g.empty()) throw std::invalid_argument("improving transfers need a non-empty equilibrium network");
  const Adjacency gbar = closure(eq.g);
  Index h = 0;
  for (Index i = 1; i < n; ++i) {
    const Index di = gbar.row(i).count(), dh = gbar.row(h).count();
    if (di > dh || (di == dh && eq.x[i] > eq.x[h])) h = i;
  }
  const StructureReport rep = classify_core_periphery(eq.g, eq.x, k, econ.tol().indiff);
  TransferScheme ts;
  ts.hub = h;
  ts.before = eq;
  ts.t = Vector::Zero(n);
  for (Index i = 0; i < n; ++i) {
    if (i == h) continue;
    Index severed = 0;
    for (Index j = 0; j < n; ++j)
      if (j != h && eq.g(i, j)) ++severed;
    // whoever was not linked to h keeps the price of one link to reach it
    if (!eq.g(i, h) && severed > 0) --severed;
    const bool core = std::find(rep.core.begin(), rep.core.end(), i) != rep.core.end();
    ts.t[i] = -(core ? eq.x[i] : 0.0) - k * static_cast<double>(severed);
  }
  ts.t[h] = -ts.t.sum();
  ts.wealth = econ.wealth() + ts.t;
  const Economy moved = econ.with_wealth(ts.wealth);
  const std::vector<Index> hub{h};
  CoreCandidate star = core_construction(moved, hub);
  ts.after = star.profile;
  ts.verdict = star.verdict ? *star.verdict : check_equilibrium(moved, star.profile);
  ts.feasible = ts.verdict->is_nash;
  ts.welfare_before = welfare(econ, eq);
  ts.welfare_after = welfare(moved, ts.after);
  const Vector before = consumption_report(econ, eq).public_total;
  const Vector after = consumption_report(moved, ts.after).public_total;
  std::ostringstream note;
  if (!ts.feasible) note << "induced star is not an equilibrium (" << star.rejection << "); ";
  for (Index i = 0; i < n; ++i)
    if (after[i] < before[i] - 1e-9 * std::max(1.0, before[i]))
      note << "public consumption of player " << i + 1 << " falls; ";
  if (ts.welfare_after < ts.welfare_before - 1e-9) note << "welfare falls; ";
  ts.note = note.str();
  return ts;
}

TransferScheme second_best(const Economy& econ, std::optional<Index> hub, std::uint64_t seed) {
  const Index n = econ.size();
  if (hub && (*hub < 0 || *hub >= n)) throw std::invalid_argument("hub index out of range");
  TransferScheme ts;
  if (auto sq = status_quo(econ)) {
    ts.before = *sq;
    ts.welfare_before = welfare(econ, *sq);
  }
  if (n == 1) {
    ts.hub = 0;
    ts.t = Vector::Zero(1);
    ts.wealth = econ.wealth();
    ts.after = consumption_fixed_point(econ, LinkProfile(1));
    ts.welfare_after = welfare(econ, ts.after);
    ts.verdict = check_equilibrium(econ, ts.after);
    ts.note = "single player: nothing to redistribute";
    return ts;
  }
  std::vector<Index> hubs;
  if (hub)
    hubs.push_back(*hub);
  else
    for (Index h = 0; h < n; ++h) hubs.push_back(h);

  std::vector<HubResult> results(hubs.size());
  {
    std::vector<std::jthread> pool;
    for (std::size_t r = 0; r < hubs.size(); ++r)
      pool.emplace_back([&, r] { results[r] = best_for_hub(econ, hubs[r], seed); });
  }
  const HubResult* best = nullptr;
  for (const auto& r : results)
    if (r.found && (!best || r.welfare > best->welfare + 1e-9)) best = &r;

  if (!best) {
    ts.feasible = false;
    ts.note = "no transfer scheme sustains a star; the empty network is recommended";
    ts.hub = -1;
    ts.t = Vector::Zero(n);
    ts.wealth = econ.wealth();
    ts.after = consumption_fixed_point(econ, LinkProfile(n));
    ts.welfare_after = welfare(econ, ts.after);
    return ts;
  }
  ts.hub = hubs[static_cast<std::size_t>(best - results.data())];
  ts.t = balance(best->wealth, econ.wealth());
  ts.wealth = econ.wealth() + ts.t;
  ts.after = best->profile;
  ts.verdict = best->verdict;
  ts.welfare_after = best->welfare;
  return ts;
}

double linear_star_welfare(const Economy& econ, double beta) {
  const Index n = econ.size();
  const double W = econ.total_wealth(), k = econ.k();
  const Player& pl = econ[0];
  const double wh = beta * W;
  const double xh = pl.pref.demand(pl.p, wh, pl.px);
  if (xh < k) return -kInf;
  double total = pl.pref.utility(xh, std::max(0.0, (wh - pl.px * xh) / pl.p));
  if (n == 1) return total;
  const double ws = (1.0 - beta) * W / static_cast<double>(n - 1);
  const double b = ws - k;
  if (b < 0.0) return -kInf;
  const double xb = std::max(pl.pref.demand(pl.p, b + pl.px * xh, pl.px), xh);
  if (xb - xh > k) return -kInf;
  total += static_cast<double>(n - 1) * pl.pref.utility(xb, std::max(0.0, (b - pl.px * (xb - xh)) / pl.p));
  return total;
}

TransferScheme second_best_linear(const Economy& econ) {
  const Index n = econ.size();
  if (!econ.homogeneous() || !std::holds_alternative<CobbDouglas>(econ[0].pref.family()))
    throw std::invalid_argument("the linear second best needs identical Cobb-Douglas players");
  const double a = std::get<CobbDouglas>(econ[0].pref.family()).a;
  const double W = econ.total_wealth(), k = econ.k();
  const Vector w0 = econ.wealth();
  Index hub = 0;
  w0.maxCoeff(&hub);

  TransferScheme ts;
  ts.hub = hub;
  if (auto sq = status_quo(econ)) {
    ts.before = *sq;
    ts.welfare_before = welfare(econ, *sq);
  }
  auto feasible = [&](double beta) { return linear_star_welfare(econ, beta) > -kInf; };
  auto slope = [&](double beta, double lo, double hi) {
    const double h = 1e-7;
    const double u = std::min(hi, beta + h), d = std::max(lo, beta - h);
    return (linear_star_welfare(econ, u) - linear_star_welfare(econ, d)) / (u - d);
  };

  double beta = 1.0;
  if (n == 1) {
    beta = 1.0;
  } else if (a == 1.0 && n > 2) {
    beta = 1.0;
    ts.note = "no private good: all wealth to the hub";
  } else {
    // feasible interval: lower end from the hub's and spokes' provision
    // constraints, upper end from spokes affording the link
    const double hi = 1.0 - k * static_cast<double>(n - 1) / W;
    double lo = hi;
    if (hi > 0.0 && feasible(hi)) {
      double l = 0.0, u = hi;
      for (int it = 0; it < 200 && u - l > 1e-16; ++it) {
        const double mid = 0.5 * (l + u);
        (feasible(mid) ? u : l) = mid;
      }
      lo = u;
    } else {
      ts.feasible = false;
    }
    if (!ts.feasible) {
      ts.note = "no hub share satisfies the star constraints";
      beta = std::max(0.0, std::min(1.0, k / (a * W)));
    } else {
      const double corner = k / (a * W);
      const bool corner_case = a < 1.0 / static_cast<double>(n - 1) &&
                               W < k * (a * static_cast<double>(n - 1) + static_cast<double>(n)) / a;
      if (corner_case && corner >= lo - 1e-12 && corner <= hi && slope(std::max(corner, lo), lo, hi) <= 0.0) {
        beta = std::max(corner, lo);
      } else if (slope(lo, lo, hi) <= 0.0) {
        beta = lo;
      } else if (slope(hi, lo, hi) >= 0.0) {
        beta = hi;
      } else {
        double l = lo, u = hi;
        for (int it = 0; it < 200 && u - l > 1e-15; ++it) {
          const double mid = 0.5 * (l + u);
          (slope(mid, lo, hi) > 0.0 ? l : u) = mid;
        }
        beta = 0.5 * (l + u);
      }
    }
  }
  ts.beta = beta;
  Vector w(n);
  if (n == 1) {
    w[0] = W;
  } else {
    w.setConstant((1.0 - beta) * W / static_cast<double>(n - 1));
    w[hub] = beta * W;
  }
  ts.t = w - w0;
  ts.t[hub] -= ts.t.sum();
  ts.wealth = w0 + ts.t;
  // zero incomes (beta = 1) leave spokes with nothing; keep the economy valid
  const Economy moved = econ.with_wealth(ts.wealth.cwiseMax(1e-12));
  std::vector<bool> iso(static_cast<std::size_t>(n), false);
  for (Index j = 0; j < n; ++j)
    if (j != hub && ts.wealth[j] < k) iso[static_cast<std::size_t>(j)] = true;
  ts.after = star_profile(moved, hub, iso);
  ts.welfare_after = welfare(moved, ts.after);
  if (validate_profile(moved, ts.after).empty()) ts.verdict = check_equilibrium(moved, ts.after);
  return ts;
}

}  // namespace pgnet
