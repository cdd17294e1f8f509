#include <doctest.h>

#include "oracle.hpp"
#include "pgnet/economy.hpp"
#include "pgnet/figures.hpp"

using namespace pgnet;

namespace {

bool has(const std::vector<ProfileIssue>& issues, ProfileIssue::Kind kind, Index player) {
  for (const auto& is : issues)
    if (is.kind == kind && is.player == player) return true;
  return false;
}

}  // namespace

TEST_CASE("construction invariants") {
  CHECK_THROWS_AS(Player(0.0, 1.0, CobbDouglas{.5}), std::invalid_argument);
  CHECK_THROWS_AS(Player(1.0, -1.0, CobbDouglas{.5}), std::invalid_argument);
  CHECK_THROWS_AS(Economy({}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Economy({Player(1, 1, CobbDouglas{.5})}, -1.0), std::invalid_argument);
  LinkProfile g(3);
  CHECK_THROWS_AS(g.set(1, 1), std::invalid_argument);
}

TEST_CASE("link codes cover the off-diagonal") {
  const LinkProfile full = LinkProfile::from_code(3, (1ull << 6) - 1);
  CHECK(full.link_count() == 6);
  for (Index i = 0; i < 3; ++i) CHECK_FALSE(full(i, i));
  const LinkProfile first = LinkProfile::from_code(3, 1);
  CHECK(first(0, 1));
  CHECK(first.link_count() == 1);
}

TEST_CASE("homogeneity ignores wealth") {
  CHECK(oracle::cobb_douglas(.5, {10, 9, 8}, 1).homogeneous());
  CHECK_FALSE(oracle::cobb_douglas({.5, .5, .8}, {10, 9, 8}, 1).homogeneous());
  CHECK_FALSE(oracle::cobb_douglas(.5, {10, 9, 8}, 1).with_public_price(0, .5).homogeneous());
}

TEST_CASE("consumption report on the sqrt star") {
  const Economy e = figures::sqrt_three(Vector::Constant(3, 5.0));
  const StrategyProfile s{Vector{{4, 0, 0}}, Vector{{1, 4, 4}}, LinkProfile::from_edges(3, {{1, 0}, {2, 0}})};
  const ConsumptionReport r = consumption_report(e, s);
  CHECK(r.public_total.isApprox(Vector::Constant(3, 4.0)));
  CHECK(r.social_income.isApprox(Vector{{5, 8, 8}}));
  CHECK(validate_profile(e, s).empty());
}

TEST_CASE("empty network report") {
  const Economy e = oracle::cobb_douglas(.5, {10, 9, 8}, 1);
  const StrategyProfile s = profile_from_provisions(e, LinkProfile(3), Vector{{1, 2, 3}});
  const ConsumptionReport r = consumption_report(e, s);
  CHECK(r.public_total.isApprox(s.x));
  CHECK(r.social_income.isApprox(e.wealth()));
}

TEST_CASE("four-player report, second network") {
  const Economy e = figures::quad_welfare();
  const StrategyProfile s = profile_from_provisions(e, figures::welfare_second(), Vector{{11.0 / 3, 5.0 / 6, 5.0 / 3, 0}});
  const ConsumptionReport r = consumption_report(e, s);
  CHECK(r.public_total[3] == doctest::Approx(11.0 / 3));
  CHECK(s.y[3] == doctest::Approx(3));
}

TEST_CASE("validation") {
  const Economy moved = figures::quad_transfers().with_wealth(Vector{{29.02, 5.54, 5.54, 3.91}});
  const StrategyProfile star{Vector{{14.51, 0, 0, 0}}, Vector{{14.51, 3.54, 3.54, 1.91}},
                             LinkProfile::from_edges(4, {{1, 0}, {2, 0}, {3, 0}})};
  CHECK(validate_profile(moved, star).empty());

  StrategyProfile neg = star;
  neg.y[0] = -1;
  CHECK(has(validate_profile(moved, neg), ProfileIssue::Kind::Negative, 0));

  // printed corner table: y = 3 for the reciprocated pair
  const Economy corner = figures::sqrt_three(Vector{{1.5, 5, 5}});
  const StrategyProfile printed{Vector{{.5, 1.5, 1.5}}, Vector{{0, 3, 3}}, figures::corner_network()};
  const auto issues = validate_profile(corner, printed);
  CHECK(has(issues, ProfileIssue::Kind::Budget, 1));
  CHECK(has(issues, ProfileIssue::Kind::Budget, 2));
  CHECK_FALSE(has(issues, ProfileIssue::Kind::Budget, 0));

  const StrategyProfile wrong_size{Vector::Zero(2), Vector::Zero(2), LinkProfile(2)};
  CHECK(has(validate_profile(corner, wrong_size), ProfileIssue::Kind::DimensionMismatch, -1));
}

TEST_CASE("budget identity for derived profiles") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 50; ++t) {
    const auto w = oracle::uniform(rng, 4, 3, 20);
    const Economy e = oracle::cobb_douglas(oracle::uniform(rng, 4, .1, .9), w, .5);
    const LinkProfile g = LinkProfile::from_code(4, rng() & ((1ull << 12) - 1));
    Vector x(4);
    for (Index i = 0; i < 4; ++i) x[i] = .1 * (w[static_cast<std::size_t>(i)] - 1.5);
    const StrategyProfile s = profile_from_provisions(e, g, x);
    for (Index i = 0; i < 4; ++i)
      CHECK(s.x[i] + s.y[i] + g.out_degree(i) * e.k() - e[i].w == doctest::Approx(0).epsilon(1e-9).scale(1));
  }
}

TEST_CASE("welfare sums utilities") {
  const Economy e = figures::quad_transfers();
  const StrategyProfile s = profile_from_provisions(e, figures::transfers_start(), Vector{{13.0 / 3, 13.0 / 3, 0, 2.2 / 3}});
  double total = 0;
  for (Index i = 0; i < 4; ++i) total += oracle::utility_of(e, s, i);
  CHECK(welfare(e, s) == doctest::Approx(total));
  CHECK(welfare(e, s) == doctest::Approx(28.384).epsilon(1e-4));
}
