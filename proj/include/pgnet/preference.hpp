#pragma once

#include <concepts>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace pgnet {

// U(xbar, y) = xbar^a * y^(1-a). a == 1 is accepted as the degenerate
// "public good only" case.
struct CobbDouglas {
  double a;
};

// U(xbar, y) = sqrt(b * sqrt(xbar) + y).
struct SqrtAdditive {
  double b;
};

// U(xbar, y) = (sqrt(xbar) + sqrt(y))^2.
struct RootSum {};

// Black-box utility. Must be twice differentiable, strictly concave and
// increasing on the positive orthant; demand is found numerically.
struct NumericUtility {
  std::function<double(double, double)> evaluator;
  std::string label = "numeric";
};

/// A utility family together with its Engel curve.
///
/// Demand is expressed in money terms: with public-good price `px` and
/// private-good price `p`, the consumer spends `m` on `px * xbar + p * y`.
/// The game itself always uses `px == 1`; other values only arise from
/// personalized pricing.
class Preference {
 public:
  using Family = std::variant<CobbDouglas, SqrtAdditive, RootSum, NumericUtility>;

  Preference(Family family);  // NOLINT(google-explicit-constructor)
  template <class F>
    requires(!std::same_as<std::decay_t<F>, Family> && std::constructible_from<Family, F>)
  Preference(F&& f) : Preference(Family(std::forward<F>(f))) {}  // NOLINT

  const Family& family() const { return family_; }
  std::string name() const;
  bool is_numeric() const { return std::holds_alternative<NumericUtility>(family_); }

  double utility(double xbar, double y) const;
  Eigen::Vector2d gradient(double xbar, double y) const;

  /// Public good consumption chosen with income m; always in [0, m/px].
  double demand(double p, double m, double px = 1.0) const;

  /// Income m whose demand equals xbar. Throws NoInverseError when xbar
  /// sits on (or beyond) a flat part of the Engel curve.
  double engel_inverse(double p, double xbar, double px = 1.0) const;

  /// [inf{m : demand(m) >= xbar}, sup{m : demand(m) <= xbar}]. The upper end
  /// is +inf on a flat tail, the lower end +inf when xbar is never reached.
  std::pair<double, double> engel_inverse_bounds(double p, double xbar,
                                                 double px = 1.0) const;

  /// d(px * demand)/dm by central differences.
  double engel_slope(double p, double m, double px = 1.0) const;

  /// True when demand is affine in income on pieces that can be listed
  /// (closed-form families).
  bool piecewise_linear() const { return !is_numeric(); }

  /// Linear pieces of the money Engel curve m -> xbar:
  /// xbar = slope * m + intercept on [lo, hi).
  struct EngelPiece {
    double lo, hi, slope, intercept;
  };
  std::vector<EngelPiece> engel_pieces(double p, double px = 1.0) const;

  /// Private consumption y >= 0 at which dU/dy = target given xbar, i.e. the
  /// planner's allocation rule for a given shadow value. Returns +inf when
  /// the marginal utility never falls to target.
  double private_for_marginal(double xbar, double target) const;

 private:
  Family family_;
};

class NoInverseError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

double utility(const Preference& pref, double xbar, double y);
double demand(const Preference& pref, double p, double m);
double engel_inverse(const Preference& pref, double p, double xbar);

/// Checks strict monotonicity on a grid by finite differences. Throws
/// std::invalid_argument with the first offending point.
void check_monotone(const Preference& pref, double scale = 10.0, int grid = 20);

}  // namespace pgnet
