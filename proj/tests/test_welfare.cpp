#include <doctest.h>

#include <chrono>

#include "oracle.hpp"
#include "pgnet/figures.hpp"
#include "pgnet/structure.hpp"
#include "pgnet/welfare.hpp"

using namespace pgnet;

namespace {

double grid_beta(const Economy& e, double* best_value = nullptr) {
  double bb = 0.0, bv = -INFINITY;
  for (int s = 0; s <= 100000; ++s) {
    const double b = s * 1e-5;
    const double v = linear_star_welfare(e, b);
    if (v > bv) {
      bv = v;
      bb = b;
    }
  }
  if (best_value) *best_value = bv;
  return bb;
}

}  // namespace

TEST_CASE("welfare of the transfer tables") {
  const Economy e = figures::quad_transfers();
  CHECK(welfare(e, consumption_fixed_point(e, figures::transfers_start())) == doctest::Approx(28.384).epsilon(1e-4));

  const Economy b = e.with_wealth(Vector{{29.02, 5.54, 5.54, 3.91}});
  const StrategyProfile sb{Vector{{14.51, 0, 0, 0}}, Vector{{14.51, 3.54, 3.54, 1.91}},
                           LinkProfile::from_edges(4, {{1, 0}, {2, 0}, {3, 0}})};
  // tables are printed to two decimals
  CHECK(std::abs(welfare(b, sb) - 38.5063) < 2e-2);

  const Economy c = e.with_wealth(Vector{{6.03, 6.03, 6.03, 25.92}});
  const StrategyProfile sc{Vector{{0, 0, 0, 20.74}}, Vector{{4.03, 4.03, 4.03, 5.18}},
                           LinkProfile::from_edges(4, {{0, 3}, {1, 3}, {2, 3}})};
  CHECK(std::abs(welfare(c, sc) - 43.128) < 2e-2);
}

TEST_CASE("first best for the four-player economy") {
  const Economy e = figures::quad_welfare();
  const EfficientSolution s = efficient_solution(e);
  REQUIRE(s.shape == EfficientSolution::Shape::Star);
  CHECK(s.members.size() == 4);
  CHECK(s.x_hub == doctest::Approx(14).epsilon(1e-8));
  for (Index i = 0; i < 4; ++i) CHECK(s.y[i] == doctest::Approx(3.5).epsilon(1e-8));

  // grid oracle: all four in the star share y, budget x + 4y = 28
  double best = -INFINITY, bx = 0;
  for (int t = 1; t < 280000; ++t) {
    const double x = t * 1e-4;
    const double w = 4 * std::sqrt(x * (28 - x) / 4);
    if (w > best) {
      best = w;
      bx = x;
    }
  }
  CHECK(s.x_hub == doctest::Approx(bx).epsilon(1e-4));
  CHECK(s.welfare == doctest::Approx(best).epsilon(1e-9));

  // resource constraint and marginal conditions
  double spend = s.x_hub + static_cast<double>(s.members.size() - 1) * e.k();
  for (Index i = 0; i < 4; ++i) spend += s.y[i];
  CHECK(spend == doctest::Approx(e.total_wealth()).epsilon(1e-9));
  double ux = 0;
  for (Index i : s.members) ux += e[i].pref.gradient(s.x_hub, s.y[i])[0];
  for (Index i : s.members) CHECK(e[i].pref.gradient(s.x_hub, s.y[i])[1] == doctest::Approx(s.lambda).epsilon(1e-6));
  CHECK(ux == doctest::Approx(s.lambda).epsilon(1e-6));
}

TEST_CASE("first best is empty when links are too dear") {
  const Economy e = oracle::cobb_douglas(.1, {2, 2, 2}, 50);
  const EfficientSolution s = efficient_solution(e);
  CHECK(s.shape == EfficientSolution::Shape::Empty);
  CHECK(s.g.empty());
}

TEST_CASE("homogeneous first best gives identical private consumption") {
  const Economy e = oracle::cobb_douglas(.4, {12, 7, 5, 3}, .5);
  const EfficientSolution s = efficient_solution(e);
  REQUIRE(s.shape == EfficientSolution::Shape::Star);
  for (Index i : s.members) CHECK(s.y[i] == doctest::Approx(s.y[s.members.front()]).epsilon(1e-8));
}

TEST_CASE("first best dominates every equilibrium") {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 15; ++t) {
    const Index n = 2 + static_cast<Index>(rng() % 3);
    const Economy e = oracle::cobb_douglas(oracle::uniform(rng, static_cast<std::size_t>(n), .1, .9),
                                           oracle::uniform(rng, static_cast<std::size_t>(n), 1, 20),
                                           oracle::uniform(rng, 1, .1, 5)[0]);
    const double fb = efficient_solution(e).welfare;
    for (const auto& q : enumerate_equilibria(e, Refinement::Nash)) CHECK(fb >= welfare(e, q.profile) - 1e-9);
  }
}

TEST_CASE("improving transfers on the transfer economy") {
  const Economy e = figures::quad_transfers();
  const StrategyProfile eq = consumption_fixed_point(e, figures::transfers_start());
  const TransferScheme t = improving_transfers(e, eq);
  CHECK(t.hub == 0);
  CHECK(std::abs(t.t.sum()) <= 1e-9);
  REQUIRE(t.verdict);
  CHECK(t.verdict->is_nash);
  CHECK(t.welfare_after > 28.384);
  const StructureReport r = classify_core_periphery(t.after.g, t.after.x, e.k());
  CHECK(r.is_star);
  CHECK(r.core == std::vector<Index>{0});
  const Vector before = consumption_report(e, eq).public_total;
  const Vector after = consumption_report(e.with_wealth(t.wealth), t.after).public_total;
  for (Index i = 0; i < 4; ++i) CHECK(after[i] >= before[i] - 1e-9);
}

TEST_CASE("improving transfers leave a star alone") {
  const Economy e = figures::sqrt_three(Vector::Constant(3, 5.0));
  const StrategyProfile star = solve_equilibrium(e);
  const TransferScheme t = improving_transfers(e, star);
  CHECK(t.t.cwiseAbs().maxCoeff() == 0.0);
  CHECK(t.after.g == star.g);
}

TEST_CASE("improving transfers on the four-player economy") {
  const Economy e = figures::quad_welfare();
  const StrategyProfile eq = solve_equilibrium(e);
  const TransferScheme t = improving_transfers(e, eq);
  CHECK(t.hub == 0);
  // hub receives the other core provisions plus the link costs saved
  double saved = 0;
  for (Index i = 1; i < 4; ++i)
    for (Index j = 1; j < 4; ++j)
      if (eq.g(i, j)) saved += e.k();
  CHECK(t.t[0] == doctest::Approx(eq.x[1] + saved));
  CHECK(consumption_report(e.with_wealth(t.wealth), t.after).public_total[0] >
        consumption_report(e, eq).public_total[0]);
  CHECK(t.welfare_after > t.welfare_before);
  CHECK_THROWS_AS(improving_transfers(e, consumption_fixed_point(e, LinkProfile(4))), std::invalid_argument);
}

TEST_CASE("second best on the transfer economy") {
  const auto t0 = std::chrono::steady_clock::now();
  const Economy e = figures::quad_transfers();
  const TransferScheme one = second_best(e, 0);
  CHECK(one.hub == 0);
  CHECK(std::abs(one.welfare_after - 38.5063) < 1e-2);
  CHECK((one.wealth - Vector{{29.02, 5.54, 5.54, 3.91}}).cwiseAbs().maxCoeff() < 1e-2);
  CHECK(std::abs(one.t.sum()) <= 1e-9);

  const TransferScheme free = second_best(e);
  CHECK(free.hub == 3);
  CHECK(std::abs(free.welfare_after - 43.128) < 1e-2);
  CHECK((free.wealth - Vector{{6.03, 6.03, 6.03, 25.92}}).cwiseAbs().maxCoeff() < 1e-2);
  REQUIRE(free.verdict);
  CHECK(free.verdict->is_nash);
  CHECK(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() < 30.0);

  const TransferScheme same = second_best(e, std::nullopt, 1);
  CHECK(same.wealth == free.wealth);
}

TEST_CASE("second best with one player") {
  const Economy e = oracle::cobb_douglas(.5, {10}, 1);
  const TransferScheme t = second_best(e);
  CHECK(t.t.size() == 1);
  CHECK(t.t[0] == 0.0);
  CHECK(t.wealth[0] == 10.0);
}

TEST_CASE("welfare ordering of the instruments") {
  for (const Economy& e : {figures::quad_transfers(), figures::quad_welfare(), oracle::cobb_douglas({.3, .6, .5}, {12, 6, 9}, 1.5)}) {
    const StrategyProfile eq = solve_equilibrium(e);
    const TransferScheme imp = improving_transfers(e, eq);
    const TransferScheme sb = second_best(e);
    CHECK(sb.welfare_after >= imp.welfare_after - 1e-6);
    CHECK(imp.welfare_after >= welfare(e, eq) - 1e-9);
  }
}

TEST_CASE("linear second best") {
  const Economy all_public = oracle::cobb_douglas(1.0, {5, 5, 5}, 1);
  CHECK(*second_best_linear(all_public).beta == 1.0);

  const Economy poor = oracle::cobb_douglas(.2, std::vector<double>(6, 5.0), 1);
  const TransferScheme c = second_best_linear(poor);
  CHECK(*c.beta == doctest::Approx(1.0 / 6).epsilon(1e-12));

  const Economy e = figures::quad_welfare();
  const TransferScheme t = second_best_linear(e);
  REQUIRE(t.beta);
  CHECK(*t.beta > 0.0);
  CHECK(*t.beta < 1.0);
  CHECK(std::abs(*t.beta - grid_beta(e)) <= 1e-4);
  CHECK(std::abs(t.t.sum()) <= 1e-9);
  CHECK_THROWS_AS(second_best_linear(figures::quad_transfers()), std::invalid_argument);
}

TEST_CASE("linear second best matches a grid on random economies") {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 8; ++t) {
    const Index n = 2 + static_cast<Index>(rng() % 5);
    const Economy e = oracle::cobb_douglas(oracle::uniform(rng, 1, .15, .9)[0],
                                           oracle::uniform(rng, static_cast<std::size_t>(n), 2, 20),
                                           oracle::uniform(rng, 1, .1, 2)[0]);
    const TransferScheme s = second_best_linear(e);
    if (!s.feasible) continue;
    double gv = 0;
    const double gb = grid_beta(e, &gv);
    CAPTURE(t);
    CHECK(std::abs(*s.beta - gb) <= 1e-4);
    CHECK(linear_star_welfare(e, *s.beta) >= gv - 1e-6);
  }
}

TEST_CASE("personalized prices") {
  const Economy e = figures::quad_welfare();
  const PriceScheme p = personalized_prices(e);
  CHECK(p.p_x == doctest::Approx(.25).epsilon(1e-8));
  CHECK(p.tau.sum() == doctest::Approx(10.5).epsilon(1e-8));
  CHECK(std::abs(p.tau.sum() - (1 - p.p_x) * p.first_best.x_hub) <= 1e-9);
  for (Index i = 0; i < 4; ++i)
    if (i != p.hub) CHECK(p.profile.x[i] == 0.0);
  CHECK(consumption_report(p.priced, p.profile).public_total[p.hub] == doctest::Approx(p.first_best.x_hub).epsilon(1e-6));
  CHECK(p.verdict.is_nash);
  CHECK(validate_profile(p.priced, p.profile).empty());
  // identical players: the spokes pay the same tax up to their wealth difference
  for (Index i = 0; i < 4; ++i)
    if (i != p.hub) CHECK(p.tau[i] - e[i].w == doctest::Approx(p.tau[(p.hub + 1) % 4] - e[(p.hub + 1) % 4].w));
}

TEST_CASE("personalized prices, equal wealth and a single player") {
  const Economy e = oracle::cobb_douglas(.5, {8, 8, 8}, 1);
  const PriceScheme p = personalized_prices(e);
  Index spoke = p.hub == 0 ? 1 : 0;
  for (Index i = 0; i < 3; ++i)
    if (i != p.hub) CHECK(p.tau[i] == doctest::Approx(p.tau[spoke]));

  const PriceScheme one = personalized_prices(oracle::cobb_douglas(.5, {10}, 1));
  CHECK(one.tau[0] == doctest::Approx(0).scale(1));
  CHECK(one.p_x == doctest::Approx(1.0));

  CHECK_THROWS_AS(personalized_prices(oracle::cobb_douglas(.1, {2, 2, 2}, 50)), SolverError);
}

TEST_CASE("inequality report") {
  const Economy eq_w = oracle::cobb_douglas(.5, {12, 12, 4, 4, 4}, 1);
  const InequalityReport same = inequality_report(eq_w, recursive_construction(eq_w));
  REQUIRE(same.pairs.size() == 3);
  for (const auto& g : same.pairs) {
    CHECK(g.utility_gap == doctest::Approx(0).scale(1));
    CHECK(g.autarky_utility_gap == doctest::Approx(0).scale(1));
  }

  const Economy e = figures::quad_welfare();
  const StrategyProfile printed = consumption_fixed_point(e, figures::welfare_first());
  const InequalityReport r = inequality_report(e, printed);
  REQUIRE(r.pairs.size() == 1);
  CHECK(r.pairs[0].i == 2);
  CHECK(r.pairs[0].j == 3);
  const double w3 = 8 - 2 + 17.0 / 3, w4 = 4 - 1 + 10.0 / 3;
  CHECK(r.pairs[0].income_gap == doctest::Approx(w3 - w4));
  CHECK(r.pairs[0].income_gap > r.pairs[0].wealth_gap);
  CHECK(r.wealth_spread == doctest::Approx(6));

  // concave indirect utility: equal links shrink utility gaps
  std::vector<Player> ps;
  for (double w : {10.0, 9.8, 2.52, 2.5, 2.48}) ps.emplace_back(w, 1.0, SqrtAdditive{8.0});
  const Economy near(std::move(ps), 1.0);
  const InequalityReport n = inequality_report(near, recursive_construction(near));
  CHECK(n.pairs.size() == 3);
  CHECK(n.share_utility_reduced == 1.0);
  for (const auto& g : n.pairs) CHECK(g.utility_gap < g.autarky_utility_gap);

  // Cobb-Douglas indirect utility is linear, and a free rider at the corner has
  // dU/dy above the autarky slope, so the same links widen utility gaps
  const Economy cd = oracle::cobb_douglas(.5, {10, 9.8, 2.52, 2.5, 2.48}, 1);
  const InequalityReport c = inequality_report(cd, recursive_construction(cd));
  CHECK(c.pairs.size() == 3);
  CHECK(c.share_utility_reduced == 0.0);
}

TEST_CASE("periphery divergence spread") {
  const Economy same = oracle::cobb_douglas(.5, std::vector<double>(5, 10.0), 1);
  CHECK_FALSE(periphery_divergence_spread(same));
  const Economy spread = oracle::cobb_douglas(.5, {14, 13, 7, 5, 2}, 1);
  const auto th = periphery_divergence_spread(spread);
  if (th) {
    CHECK(*th > 0);
    CHECK(*th <= 12);
  }
}

TEST_CASE("law of the few") {
  LawOfFewConfig cfg{Player(10, 1, CobbDouglas{.5}), 1.0, 10, 10, {4, 8, 16, 32, 64}, 1, 0};
  const auto rows = law_of_few_experiment(cfg);
  REQUIRE(rows.size() == 5);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].core_share < rows[i - 1].core_share);

  cfg.k = 20;  // above any demand
  for (const auto& r : law_of_few_experiment(cfg)) CHECK(r.core_size == 0);

  cfg.k = 1;
  cfg.sizes = {1};
  CHECK(law_of_few_experiment(cfg)[0].core_share == 0.0);

  cfg.sizes = {5, 9, 13};
  cfg.wealth_low = 2;
  cfg.seed = 99;
  const std::string a = law_of_few_csv(law_of_few_experiment(cfg));
  cfg.threads = 1;
  const std::string b = law_of_few_csv(law_of_few_experiment(cfg));
  CHECK(a == b);
  CHECK(a.rfind("n,seed,core_size,core_share,welfare\n", 0) == 0);
}

TEST_CASE("richest-seeded construction is welfare best among sociable equilibria") {
  for (const auto& w : std::vector<std::vector<double>>{{10, 9.9, 9.8, 9.7}, {8, 8.1, 7.9}, {6, 5.9, 5.95, 6.05}}) {
    const Economy e = oracle::cobb_douglas(.5, w, 2.5);
    const double built = welfare(e, recursive_construction(e));
    for (const auto& q : enumerate_equilibria(e, Refinement::Sociable)) CHECK(built >= welfare(e, q.profile) - 1e-9);
  }
}
