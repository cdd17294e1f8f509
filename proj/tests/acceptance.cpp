// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "oracle.hpp"
#include "pgnet/equilibrium.hpp"
#include "pgnet/figures.hpp"
#include "pgnet/structure.hpp"
#include "pgnet/welfare.hpp"

using namespace pgnet;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [" << what << "]";
    }
  }
};

double max_diff(const Vector& a, const Vector& b) { return (a - b).cwiseAbs().maxCoeff(); }

int classes(const std::vector<EnumeratedEquilibrium>& eqs) {
  int c = 0;
  for (const auto& q : eqs) c = std::max(c, q.symmetry_class + 1);
  return c;
}

Economy random_cd(std::mt19937_64& rng, Index n, bool homogeneous) {
  const auto w = oracle::uniform(rng, static_cast<std::size_t>(n), 1, 20);
  const double k = oracle::uniform(rng, 1, .1, 5)[0];
  if (homogeneous) return oracle::cobb_douglas(oracle::uniform(rng, 1, .1, .9)[0], w, k);
  return oracle::cobb_douglas(oracle::uniform(rng, static_cast<std::size_t>(n), .1, .9), w, k);
}

void criterion1(Outcome& o) {
  const Economy e = figures::sqrt_three(Vector::Constant(3, 5.0));
  const StrategyProfile s = solve_equilibrium(e);
  const LinkProfile star = LinkProfile::from_edges(3, {{1, 0}, {2, 0}});
  o.require(s.g == star, "network is not the star on 1");
  o.require(max_diff(s.x, Vector{{4, 0, 0}}) <= 1e-6, "x");
  o.require(max_diff(s.y, Vector{{1, 4, 4}}) <= 1e-6, "y");
  o.require(check_equilibrium(e, s).is_strict, "not strict");
}

void criterion2(Outcome& o) {
  const auto eqs = enumerate_equilibria(figures::triple(3.95), Refinement::Sociable);
  o.require(classes(eqs) == 3, "class count " + std::to_string(classes(eqs)));
  for (const Vector& want : {Vector{{9.9, 3.91, 3.91}}, Vector{{5.95, 3.95, 0}}, Vector{{2, 3.97, 3.97}}}) {
    bool found = false;
    for (const auto& q : eqs) found = found || max_diff(q.profile.x, want) <= 1e-2;
    o.require(found, "x table not found");
  }
  const auto k3 = enumerate_equilibria(figures::triple(3.0), Refinement::Sociable);
  bool two_core = classes(k3) == 1;
  for (const auto& q : k3) two_core = two_core && classify_core_periphery(q.profile.g, q.profile.x, 3.0).core.size() == 2;
  o.require(two_core, "k = 3 survivors");
  const auto k2 = enumerate_equilibria(figures::triple(2.0), Refinement::Sociable);
  o.require(classes(k2) == 1 && k2.front().profile.g.link_count() == 6, "k = 2 survivors");
  o.detail << " sociable classes=" << classes(eqs)
           << " nash classes=" << classes(enumerate_equilibria(figures::triple(3.95), Refinement::Nash));
}

void criterion3(Outcome& o) {
  const Economy e = figures::quad_welfare();
  const StrategyProfile a = consumption_fixed_point(e, figures::welfare_first());
  const StrategyProfile b = consumption_fixed_point(e, figures::welfare_second());
  o.require(max_diff(a.x, Vector{{10.0 / 3, 7.0 / 3, 1.0 / 6, 0}}) <= 1e-2, "g* x table");
  o.require(max_diff(b.x, Vector{{11.0 / 3, 5.0 / 6, 5.0 / 3, 0}}) <= 1e-2, "g** x table");
  const std::vector<Index> d{0, 1};
  o.require(std::abs(core_construction(e, d).core_public - 17.0 / 3) <= 1e-8, "core fixed point");
  const double xa = consumption_report(e, a).public_total[3], xb = consumption_report(e, b).public_total[3];
  o.require(xb > xa, "player 4 public consumption");
  for (const auto& [name, s] : {std::pair{"g*", &a}, std::pair{"g**", &b}}) {
    const EquilibriumVerdict v = check_equilibrium(e, *s);
    if (v.is_nash) continue;
    std::ostringstream why;
    why << name << " not Nash";
    if (v.witness)
      why << ": player " << v.witness->player + 1 << " gains " << v.witness->gain << " with "
          << v.witness->alternative.links.size() << " links";
    o.require(false, why.str());
  }
}

void criterion4(Outcome& o) {
  const Economy e = figures::quad_transfers();
  o.require(std::abs(welfare(e, consumption_fixed_point(e, figures::transfers_start())) - 28.384) <= 1e-2,
            "welfare of g*");
  const TransferScheme b = second_best(e, 0);
  o.require(std::abs(b.welfare_after - 38.5063) <= 1e-2, "hub 1 welfare");
  o.require(max_diff(b.wealth, Vector{{29.02, 5.54, 5.54, 3.91}}) <= 1e-2, "hub 1 wealth");
  const TransferScheme c = second_best(e);
  o.require(c.hub == 3, "free hub");
  o.require(std::abs(c.welfare_after - 43.128) <= 1e-2, "free hub welfare");
  o.require(max_diff(c.wealth, Vector{{6.03, 6.03, 6.03, 25.92}}) <= 1e-2, "free hub wealth");
  o.detail << " welfare=" << b.welfare_after << "," << c.welfare_after;
}

// criteria 5 and 6 share one sweep
struct Sweep {
  int economies = 0, sociable = 0, strict = 0, nash = 0;
  int cp_fail = 0, nested_fail = 0, link_fail = 0;
};

Sweep structural_sweep() {
  Sweep s;
  std::mt19937_64 rng(2024);
  for (int t = 0; t < 200; ++t) {
    const Index n = 2 + static_cast<Index>(rng() % 3);
    const Economy e = random_cd(rng, n, false);
    ++s.economies;
    for (const auto& q : enumerate_equilibria(e, Refinement::Nash)) {
      const auto& p = q.profile;
      ++s.nash;
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j)
          if (i != j && p.x[i] > e.k() && p.x[j] > e.k() && !(p.g(i, j) && p.g(j, i))) ++s.link_fail;
      if (q.verdict.is_sociable) {
        ++s.sociable;
        if (!classify_core_periphery(p.g, p.x, e.k()).is_core_periphery) ++s.cp_fail;
      }
      if (q.verdict.is_strict) {
        ++s.strict;
        if (!is_nested_split(p.g).nested) ++s.nested_fail;
      }
    }
  }
  return s;
}

const Sweep& sweep() {
  static const Sweep s = structural_sweep();
  return s;
}

void criterion5(Outcome& o) {
  const Sweep& s = sweep();
  o.require(s.cp_fail == 0, std::to_string(s.cp_fail) + " sociable profiles not core-periphery");
  o.require(s.nested_fail == 0, std::to_string(s.nested_fail) + " strict profiles not nested split");
  o.detail << " economies=" << s.economies << " sociable=" << s.sociable << " strict=" << s.strict;
}

void criterion6(Outcome& o) {
  const Sweep& s = sweep();
  o.require(s.link_fail == 0, std::to_string(s.link_fail) + " unlinked high-provision pairs");
  o.detail << " nash profiles=" << s.nash;
}

void criterion7(Outcome& o) {
  LawOfFewConfig cfg{Player(10.0, 1.0, CobbDouglas{.5}), 1.0, 10.0, 10.0, {4, 8, 16, 32, 64}, 1, 0};
  const auto rows = law_of_few_experiment(cfg);
  double last = INFINITY;
  o.detail << " shares=";
  for (const auto& r : rows) {
    o.require(r.error.empty(), "n=" + std::to_string(r.n) + ": " + r.error);
    o.require(r.core_share < last, "share not decreasing at n=" + std::to_string(r.n));
    last = r.core_share;
    o.detail << r.core_share << (r.n == 64 ? "" : ",");
  }
}

void criterion8(Outcome& o) {
  std::mt19937_64 rng(77);
  int tested = 0, priced = 0, no_price = 0, drawn = 0;
  std::map<std::string, int> reasons;
  double worst_sum = 0, worst_tau = 0;
  while (tested < 50 && drawn < 5000) {
    ++drawn;
    const Index n = 2 + static_cast<Index>(rng() % 4);
    const Economy e = random_cd(rng, n, false);
    const StrategyProfile eq = solve_equilibrium(e);
    if (eq.g.empty()) continue;
    ++tested;
    const TransferScheme t = improving_transfers(e, eq);
    worst_sum = std::max(worst_sum, std::abs(t.t.sum()));
    const Vector before = consumption_report(e, eq).public_total;
    const Vector after = consumption_report(e.with_wealth(t.wealth), t.after).public_total;
    o.require((after - before).minCoeff() >= -1e-9, "transfers lower public consumption, draw " + std::to_string(drawn));
    try {
      const PriceScheme p = personalized_prices(e);
      ++priced;
      const double gap = std::abs(p.tau.sum() - (1 - p.p_x) * p.first_best.x_hub);
      worst_tau = std::max(worst_tau, gap);
      for (Index i = 0; i < n; ++i)
        if (i != p.hub) o.require(p.profile.x[i] == 0.0, "priced spoke provides, draw " + std::to_string(drawn));
    } catch (const SolverError& ex) {
      ++no_price;
      const std::string m = ex.what();
      ++reasons[m.find("no star") != std::string::npos        ? "empty first best"
                : m.find("no resources") != std::string::npos ? "starved player"
                                                              : "hub price outside (0,1)"];
    }
  }
  o.require(tested == 50, "too few economies with a non-empty equilibrium");
  o.require(worst_sum <= 1e-9, "transfer imbalance");
  o.require(worst_tau <= 1e-9, "tax imbalance");
  o.detail << " economies=" << tested << " priced=" << priced << " price precondition violated=" << no_price
           << " (";
  for (const auto& [why, count] : reasons) o.detail << why << ":" << count << ";";
  o.detail << ") max|sum t|=" << worst_sum << " max tax gap=" << worst_tau;
}

void criterion9(Outcome& o) {
  std::mt19937_64 rng(99);
  int missing = 0;
  for (int t = 0; t < 100; ++t) {
    const Index n = 2 + static_cast<Index>(rng() % 3);
    const Economy e = random_cd(rng, n, true);
    const StrategyProfile s = recursive_construction(e);
    bool found = false;
    for (const auto& q : enumerate_equilibria(e, Refinement::Nash))
      found = found || (q.profile.g == s.g && max_diff(q.profile.x, s.x) < 1e-6);
    if (!found) ++missing;
  }
  o.require(missing == 0, std::to_string(missing) + " constructions missing from enumeration");

  int compared = 0;
  double worst = 0;
  while (compared < 20) {
    const Index n = 2 + static_cast<Index>(rng() % 5);
    const Economy e = oracle::cobb_douglas(oracle::uniform(rng, 1, .15, .9)[0],
                                           oracle::uniform(rng, static_cast<std::size_t>(n), 2, 20),
                                           oracle::uniform(rng, 1, .1, 2)[0]);
    const TransferScheme s = second_best_linear(e);
    if (!s.feasible) continue;
    ++compared;
    double bb = 0, bv = -INFINITY;
    for (int step = 0; step <= 100000; ++step) {
      const double v = linear_star_welfare(e, step * 1e-5);
      if (v > bv) {
        bv = v;
        bb = step * 1e-5;
      }
    }
    worst = std::max(worst, std::abs(*s.beta - bb));
  }
  o.require(worst <= 1e-4, "beta off the grid optimum");
  o.detail << " max|beta - grid|=" << worst;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria{
      {"sqrt star", criterion1},       {"three-player classes", criterion2},
      {"four-player networks", criterion3}, {"transfer tables", criterion4},
      {"core-periphery sweep", criterion5}, {"linked high providers", criterion6},
      {"law of the few", criterion7},  {"policy invariants", criterion8},
      {"oracle equivalence", criterion9}};
  const double limits[] = {1, 10, 0, 30, 0, 0, 60, 0, 0};
  int failed = 0;
  for (std::size_t c = 0; c < criteria.size(); ++c) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[c].second(o);
    } catch (const std::exception& ex) {
      o.require(false, std::string("threw: ") + ex.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (limits[c] > 0) o.require(secs < limits[c], "over time budget");
    if (!o.pass) ++failed;
    std::printf("criterion %zu %s: %s (%.2fs)%s\n", c + 1, criteria[c].first, o.pass ? "PASS" : "FAIL", secs,
                o.detail.str().c_str());
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
