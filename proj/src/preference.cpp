#include "pgnet/preference.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace pgnet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_nonneg(double v, const char* what) {
  if (!(v >= 0.0)) {
    std::ostringstream os;
    os << what << " must be non-negative, got " << v;
    throw std::invalid_argument(os.str());
  }
}

Eigen::Vector2d numeric_gradient(const std::function<double(double, double)>& u, double x,
                                 double y) {
  const double hx = std::max(1e-7, 1e-6 * x);
  const double hy = std::max(1e-7, 1e-6 * y);
  // one-sided at the boundary
  const double gx = x > hx ? (u(x + hx, y) - u(x - hx, y)) / (2 * hx) : (u(x + hx, y) - u(x, y)) / hx;
  const double gy = y > hy ? (u(x, y + hy) - u(x, y - hy)) / (2 * hy) : (u(x, y + hy) - u(x, y)) / hy;
  return {gx, gy};
}

// Maximizes U(xbar, (m - px*xbar)/p) over xbar in [0, m/px]. Golden-section
// localizes the optimum; the first-order condition is then bisected inside
// the final bracket since comparing utilities cannot resolve the argmax
// beyond sqrt(eps).
double numeric_demand(const NumericUtility& nu, double p, double m, double px) {
  const double hi_x = m / px;
  if (hi_x <= 0.0) return 0.0;
  auto f = [&](double xb) { return nu.evaluator(xb, std::max(0.0, (m - px * xb) / p)); };
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = 0.0, b = hi_x;
  double c = b - invphi * (b - a), d = a + invphi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 200 && (b - a) > 1e-15 * hi_x; ++it) {
    if (fc < fd) {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    } else {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    }
  }
  // derivative of the restricted objective along the budget line
  auto slope = [&](double xb) {
    const Eigen::Vector2d g = numeric_gradient(nu.evaluator, xb, std::max(0.0, (m - px * xb) / p));
    return g[0] - (px / p) * g[1];
  };
  const double pad = 1e-6 * hi_x;
  double lo = std::max(0.0, a - pad), up = std::min(hi_x, b + pad);
  if (lo <= 0.0 && slope(0.0) <= 0.0) return 0.0;
  if (up >= hi_x && slope(hi_x) >= 0.0) return hi_x;
  if (slope(lo) < 0.0 || slope(up) > 0.0) return 0.5 * (a + b);
  for (int it = 0; it < 100 && up - lo > 1e-14 * std::max(1.0, hi_x); ++it) {
    const double mid = 0.5 * (lo + up);
    (slope(mid) > 0.0 ? lo : up) = mid;
  }
  return 0.5 * (lo + up);
}

}  // namespace

Preference::Preference(Family family) : family_(std::move(family)) {
  std::visit(overloaded{
                 [](const CobbDouglas& cd) {
                   if (!(cd.a > 0.0 && cd.a <= 1.0))
                     throw std::invalid_argument("Cobb-Douglas exponent must lie in (0, 1]");
                 },
                 [](const SqrtAdditive& sa) {
                   if (!(sa.b > 0.0)) throw std::invalid_argument("taste weight b must be positive");
                 },
                 [](const RootSum&) {},
                 [](const NumericUtility& nu) {
                   if (!nu.evaluator) throw std::invalid_argument("numeric utility needs an evaluator");
                 },
             },
             family_);
}

std::string Preference::name() const {
  return std::visit(overloaded{
                        [](const CobbDouglas&) { return std::string("cobb_douglas"); },
                        [](const SqrtAdditive&) { return std::string("sqrt_additive"); },
                        [](const RootSum&) { return std::string("root_sum"); },
                        [](const NumericUtility& nu) { return nu.label; },
                    },
                    family_);
}

double Preference::utility(double xbar, double y) const {
  require_nonneg(xbar, "public good consumption");
  require_nonneg(y, "private consumption");
  return std::visit(overloaded{
                        [&](const CobbDouglas& cd) {
                          if (cd.a == 1.0) return xbar;
                          return std::pow(xbar, cd.a) * std::pow(y, 1.0 - cd.a);
                        },
                        [&](const SqrtAdditive& sa) { return std::sqrt(sa.b * std::sqrt(xbar) + y); },
                        [&](const RootSum&) {
                          const double s = std::sqrt(xbar) + std::sqrt(y);
                          return s * s;
                        },
                        [&](const NumericUtility& nu) { return nu.evaluator(xbar, y); },
                    },
                    family_);
}

Eigen::Vector2d Preference::gradient(double xbar, double y) const {
  require_nonneg(xbar, "public good consumption");
  require_nonneg(y, "private consumption");
  return std::visit(
      overloaded{
          [&](const CobbDouglas& cd) -> Eigen::Vector2d {
            if (cd.a == 1.0) return {1.0, 0.0};
            if (xbar == 0.0 || y == 0.0) {
              const double gx = y == 0.0 ? 0.0 : kInf;
              const double gy = xbar == 0.0 ? 0.0 : kInf;
              return {gx, gy};
            }
            const double r = y / xbar;
            return {cd.a * std::pow(r, 1.0 - cd.a), (1.0 - cd.a) * std::pow(r, -cd.a)};
          },
          [&](const SqrtAdditive& sa) -> Eigen::Vector2d {
            const double u = std::sqrt(sa.b * std::sqrt(xbar) + y);
            const double gx = xbar == 0.0 ? kInf : sa.b / (4.0 * std::sqrt(xbar) * u);
            return {gx, 1.0 / (2.0 * u)};
          },
          [&](const RootSum&) -> Eigen::Vector2d {
            const double s = std::sqrt(xbar) + std::sqrt(y);
            return {xbar == 0.0 ? kInf : s / std::sqrt(xbar), y == 0.0 ? kInf : s / std::sqrt(y)};
          },
          [&](const NumericUtility& nu) -> Eigen::Vector2d { return numeric_gradient(nu.evaluator, xbar, y); },
      },
      family_);
}

double Preference::demand(double p, double m, double px) const {
  if (!(m >= 0.0)) throw std::invalid_argument("income must be non-negative");
  if (!(p > 0.0) || !(px > 0.0)) throw std::invalid_argument("prices must be positive");
  return std::visit(overloaded{
                        [&](const CobbDouglas& cd) { return cd.a * m / px; },
                        [&](const SqrtAdditive& sa) {
                          const double sat = std::pow(sa.b * p / (2.0 * px), 2);
                          return std::min(sat, m / px);
                        },
                        [&](const RootSum&) { return m * p / (px * (p + px)); },
                        [&](const NumericUtility& nu) { return numeric_demand(nu, p, m, px); },
                    },
                    family_);
}

std::pair<double, double> Preference::engel_inverse_bounds(double p, double xbar, double px) const {
  require_nonneg(xbar, "public good consumption");
  if (xbar == 0.0) {
    // every income that buys no public good
    double hi = 0.0;
    if (!is_numeric()) {
      for (const auto& piece : engel_pieces(p, px))
        if (piece.slope == 0.0 && piece.intercept == 0.0) hi = piece.hi;
    } else if (demand(p, 1.0, px) == 0.0) {
      hi = kInf;
    }
    return {0.0, hi};
  }
  if (!is_numeric()) {
    double lo = kInf, hi = -kInf;
    for (const auto& piece : engel_pieces(p, px)) {
      const double at_lo = piece.slope * piece.lo + piece.intercept;
      const double at_hi = piece.hi == kInf ? (piece.slope > 0 ? kInf : piece.intercept)
                                            : piece.slope * piece.hi + piece.intercept;
      if (piece.slope == 0.0) {
        if (std::abs(piece.intercept - xbar) <= 1e-12 * std::max(1.0, xbar)) {
          lo = std::min(lo, piece.lo);
          hi = std::max(hi, piece.hi);
        }
        continue;
      }
      if (xbar >= at_lo && xbar <= at_hi) {
        const double m = (xbar - piece.intercept) / piece.slope;
        lo = std::min(lo, m);
        hi = std::max(hi, m);
      }
    }
    if (lo == kInf) return {kInf, kInf};
    return {lo, hi};
  }
  // numeric: demand(m) <= m/px, so m >= px*xbar
  const double base = px * xbar;
  auto bisect = [&](auto&& pred, double lo, double hi) {
    for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, hi); ++it) {
      const double mid = 0.5 * (lo + hi);
      (pred(mid) ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
  };
  double cap = std::max(1.0, 2.0 * base);
  int doublings = 0;
  while (demand(p, cap, px) < xbar && doublings < 60) {
    cap *= 2.0;
    ++doublings;
  }
  if (demand(p, cap, px) < xbar) return {kInf, kInf};
  const double lower = bisect([&](double m) { return demand(p, m, px) >= xbar; }, base, cap);
  // upper end: where demand leaves xbar
  const double tol = 1e-9 * std::max(1.0, xbar);
  double cap2 = std::max(2.0 * lower, lower + 1.0);
  doublings = 0;
  while (demand(p, cap2, px) <= xbar + tol && doublings < 40) {
    cap2 *= 2.0;
    ++doublings;
  }
  if (demand(p, cap2, px) <= xbar + tol) return {lower, kInf};
  const double upper = bisect([&](double m) { return demand(p, m, px) > xbar + tol; }, lower, cap2);
  return {lower, std::max(lower, upper)};
}

double Preference::engel_inverse(double p, double xbar, double px) const {
  const auto [lo, hi] = engel_inverse_bounds(p, xbar, px);
  if (lo == kInf) {
    std::ostringstream os;
    os << "public good level " << xbar << " is outside the range of the Engel curve";
    throw NoInverseError(os.str());
  }
  const double width_tol = is_numeric() ? 1e-6 * std::max(1.0, lo) : 1e-12 * std::max(1.0, lo);
  if (hi - lo > width_tol) {
    std::ostringstream os;
    os << "Engel curve is flat at public good level " << xbar;
    throw NoInverseError(os.str());
  }
  return lo;
}

double Preference::engel_slope(double p, double m, double px) const {
  require_nonneg(m, "income");
  const double h = std::max(1e-6, 1e-6 * m);
  if (m < h) return px * (demand(p, m + h, px) - demand(p, m, px)) / h;
  return px * (demand(p, m + h, px) - demand(p, m - h, px)) / (2.0 * h);
}

std::vector<Preference::EngelPiece> Preference::engel_pieces(double p, double px) const {
  return std::visit(
      overloaded{
          [&](const CobbDouglas& cd) { return std::vector<EngelPiece>{{0.0, kInf, cd.a / px, 0.0}}; },
          [&](const SqrtAdditive& sa) {
            const double sat = std::pow(sa.b * p / (2.0 * px), 2);
            const double m_sat = px * sat;
            return std::vector<EngelPiece>{{0.0, m_sat, 1.0 / px, 0.0}, {m_sat, kInf, 0.0, sat}};
          },
          [&](const RootSum&) {
            return std::vector<EngelPiece>{{0.0, kInf, p / (px * (p + px)), 0.0}};
          },
          [&](const NumericUtility&) -> std::vector<EngelPiece> {
            throw std::logic_error("numeric utilities have no closed-form Engel pieces");
          },
      },
      family_);
}

double Preference::private_for_marginal(double xbar, double target) const {
  require_nonneg(xbar, "public good consumption");
  if (!(target > 0.0)) return kInf;
  return std::visit(
      overloaded{
          [&](const CobbDouglas& cd) {
            if (cd.a == 1.0) return 0.0;
            if (xbar == 0.0) return 0.0;
            return xbar * std::pow((1.0 - cd.a) / target, 1.0 / cd.a);
          },
          [&](const SqrtAdditive& sa) {
            return std::max(0.0, 1.0 / (4.0 * target * target) - sa.b * std::sqrt(xbar));
          },
          [&](const RootSum&) {
            if (xbar == 0.0) return target <= 1.0 ? kInf : 0.0;
            if (target <= 1.0) return kInf;
            return xbar / ((target - 1.0) * (target - 1.0));
          },
          [&](const NumericUtility& nu) {
            auto uy = [&](double y) { return numeric_gradient(nu.evaluator, xbar, y)[1]; };
            if (uy(0.0) <= target) return 0.0;
            double hi = std::max(1.0, xbar);
            int doublings = 0;
            while (uy(hi) > target && doublings < 60) {
              hi *= 2.0;
              ++doublings;
            }
            if (uy(hi) > target) return kInf;
            double lo = 0.0;
            for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, hi); ++it) {
              const double mid = 0.5 * (lo + hi);
              (uy(mid) > target ? lo : hi) = mid;
            }
            return 0.5 * (lo + hi);
          },
      },
      family_);
}

double utility(const Preference& pref, double xbar, double y) { return pref.utility(xbar, y); }
double demand(const Preference& pref, double p, double m) { return pref.demand(p, m); }
double engel_inverse(const Preference& pref, double p, double xbar) {
  return pref.engel_inverse(p, xbar);
}

void check_monotone(const Preference& pref, double scale, int grid) {
  for (int i = 1; i <= grid; ++i) {
    for (int j = 1; j <= grid; ++j) {
      const double x = scale * i / grid, y = scale * j / grid;
      const double h = 1e-4 * scale;
      const double u = pref.utility(x, y);
      if (!(pref.utility(x + h, y) > u) || !(pref.utility(x, y + h) > u)) {
        std::ostringstream os;
        os << pref.name() << " utility is not strictly increasing near (" << x << ", " << y << ")";
        throw std::invalid_argument(os.str());
      }
    }
  }
}

}  // namespace pgnet
