#include <doctest.h>

#include <cmath>

#include "oracle.hpp"
#include "pgnet/preference.hpp"

using namespace pgnet;

namespace {

Preference numeric_cd(double a) {
  return NumericUtility{[a](double x, double y) { return std::pow(x, a) * std::pow(y, 1.0 - a); }, "cd"};
}

std::vector<Preference> families() {
  return {CobbDouglas{.5}, CobbDouglas{.99}, SqrtAdditive{4.0}, SqrtAdditive{2.0 * std::sqrt(3.0)}, RootSum{},
          numeric_cd(.3)};
}

// public good share chosen by a brute maximizer of U(x, (m - x)/p)
double demand_oracle(const Preference& pref, double p, double m) {
  const Player pl(1.0, p, pref);
  double x = 0.0;
  oracle::best_utility(pl, m, 0.0, &x);
  return x;
}

}  // namespace

TEST_CASE("utility values") {
  CHECK(Preference(CobbDouglas{.5}).utility(4, 4) == doctest::Approx(4.0));
  CHECK(Preference(SqrtAdditive{4}).utility(4, 1) == doctest::Approx(3.0));
  CHECK(Preference(CobbDouglas{.99}).utility(9.9, .1) == doctest::Approx(std::pow(9.9, .99) * std::pow(.1, .01)));
  CHECK(Preference(RootSum{}).utility(4, 9) == doctest::Approx(25.0));
}

TEST_CASE("utility rejects negative arguments") {
  const Preference cd = CobbDouglas{.5};
  CHECK_THROWS_AS(cd.utility(-1, 1), std::invalid_argument);
  CHECK_THROWS_AS(cd.utility(1, -1), std::invalid_argument);
}

TEST_CASE("invalid parameters") {
  CHECK_THROWS_AS(Preference(CobbDouglas{0.0}), std::invalid_argument);
  CHECK_THROWS_AS(Preference(CobbDouglas{1.5}), std::invalid_argument);
  CHECK_THROWS_AS(Preference(SqrtAdditive{-1}), std::invalid_argument);
  CHECK_THROWS_AS(Preference(NumericUtility{}), std::invalid_argument);
}

TEST_CASE("demand closed forms") {
  CHECK(Preference(CobbDouglas{.5}).demand(1, 10) == doctest::Approx(5.0));
  CHECK(Preference(SqrtAdditive{4}).demand(1, 5) == doctest::Approx(4.0));
  CHECK(Preference(SqrtAdditive{4}).demand(1, 2) == doctest::Approx(2.0));
  CHECK_THROWS_AS(Preference(CobbDouglas{.5}).demand(1, -1), std::invalid_argument);
}

TEST_CASE("demand agrees with brute maximization") {
  for (const Preference& pref : families())
    for (double p : {.5, 1.0, 1.5})
      for (double m : {.3, 2.0, 7.5, 20.0}) {
        CAPTURE(pref.name());
        CAPTURE(p);
        CAPTURE(m);
        CHECK(pref.demand(p, m) == doctest::Approx(demand_oracle(pref, p, m)).epsilon(1e-5));
      }
}

TEST_CASE("engel inverse") {
  CHECK(Preference(CobbDouglas{.5}).engel_inverse(1, 17.0 / 3) == doctest::Approx(34.0 / 3).epsilon(1e-12));
  CHECK(Preference(CobbDouglas{.99}).engel_inverse(1, 9.9) == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(numeric_cd(.5).engel_inverse(1, 5) == doctest::Approx(10.0).epsilon(1e-8));
  CHECK_THROWS_AS(Preference(SqrtAdditive{4}).engel_inverse(1, 5), NoInverseError);
}

TEST_CASE("isolation bundle") {
  const auto [x1, y1] = isolation_bundle(Player(10, 1, CobbDouglas{.5}));
  CHECK(x1 == doctest::Approx(5));
  CHECK(y1 == doctest::Approx(5));
  const auto [x2, y2] = isolation_bundle(Player(5, 1, SqrtAdditive{4}));
  CHECK(x2 == doctest::Approx(4));
  CHECK(y2 == doctest::Approx(1));
  const auto [x3, y3] = isolation_bundle(Player(10, 1, CobbDouglas{.99}));
  CHECK(x3 == doctest::Approx(9.9));
  CHECK(y3 == doctest::Approx(.1));
}

TEST_CASE("engel slope lies in [0, 1]") {
  for (const Preference& pref : families())
    for (int s = 1; s <= 100; ++s) {
      const double m = .2 * s;
      const double slope = pref.engel_slope(1.0, m);
      CAPTURE(pref.name());
      CAPTURE(m);
      CHECK(slope >= -1e-6);
      CHECK(slope <= 1.0 + 1e-6);
    }
}

TEST_CASE("demand within budget and inverse round trip") {
  for (const Preference& pref : families())
    for (int s = 1; s <= 60; ++s) {
      const double m = .25 * s;
      const double x = pref.demand(1.0, m);
      CHECK(x <= m + 1e-12);
      CHECK(x >= 0.0);
      if (pref.engel_slope(1.0, m) > 1e-6) {
        CAPTURE(pref.name());
        CAPTURE(m);
        const auto [lo, hi] = pref.engel_inverse_bounds(1.0, x);
        CHECK(lo <= m + 1e-8);
        CHECK(hi >= m - 1e-8);
        if (hi - lo < 1e-9) CHECK(pref.engel_inverse(1.0, x) == doctest::Approx(m).epsilon(1e-8));
      }
    }
}

TEST_CASE("contributions fall with spillovers") {
  for (const Preference& pref : families())
    for (double w : {3.0, 8.0})
      for (int eta = 0; eta <= 2; ++eta) {
        const double b = w - eta * 1.0;
        double prev = INFINITY;
        for (int s = 0; s <= 40; ++s) {
          const double spill = .25 * s;
          const double x = std::max(pref.demand(1.0, b + spill) - spill, 0.0);
          CHECK(x <= prev + 1e-9);
          prev = x;
        }
      }
}

TEST_CASE("engel pieces reproduce demand") {
  for (const Preference& pref : families()) {
    if (!pref.piecewise_linear()) continue;
    const auto pieces = pref.engel_pieces(1.0);
    for (int s = 0; s <= 80; ++s) {
      const double m = .25 * s;
      for (const auto& pc : pieces)
        if (m >= pc.lo && m < pc.hi) CHECK(pc.slope * m + pc.intercept == doctest::Approx(pref.demand(1.0, m)));
    }
  }
}

TEST_CASE("monotonicity check") {
  CHECK_NOTHROW(check_monotone(CobbDouglas{.5}));
  CHECK_NOTHROW(check_monotone(numeric_cd(.4)));
  const Preference bad = NumericUtility{[](double x, double y) { return y - x; }, "decreasing"};
  CHECK_THROWS_AS(check_monotone(bad), std::invalid_argument);
}

TEST_CASE("private consumption for a target marginal") {
  const Preference cd = CobbDouglas{.5};
  // dU/dy = .5 sqrt(x / y) = target
  const double y = cd.private_for_marginal(14, .25 * std::sqrt(4.0));
  CHECK(cd.gradient(14, y)[1] == doctest::Approx(.5).epsilon(1e-9));
}
