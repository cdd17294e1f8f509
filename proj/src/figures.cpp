#include "pgnet/figures.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "pgnet/welfare.hpp"

namespace pgnet::figures {

namespace {

Economy cobb_douglas(const std::vector<double>& a, const std::vector<double>& w, double k) {
  std::vector<Player> ps;
  for (std::size_t i = 0; i < w.size(); ++i) ps.emplace_back(w[i], 1.0, CobbDouglas{a[i]});
  return Economy(std::move(ps), k);
}

Vector v(std::initializer_list<double> xs) {
  Vector out(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) out[i++] = x;
  return out;
}

void compare(FigureResult& r, const std::string& table, const std::string& q, const Vector& got, const Vector& want) {
  for (Index i = 0; i < want.size(); ++i) r.checks.push_back({table, q, i, got[i], want[i]});
}

void compare(FigureResult& r, const std::string& table, const std::string& q, double got, double want) {
  r.checks.push_back({table, q, -1, got, want});
}

double max_error(const StrategyProfile& s, const Vector& x, const Vector& y) {
  return std::max((s.x - x).cwiseAbs().maxCoeff(), (s.y - y).cwiseAbs().maxCoeff());
}

FigureResult first() {
  FigureResult r{"figure1", {}, {}};
  const Economy a = sqrt_three(v({5, 5, 5}));
  const StrategyProfile s = solve_equilibrium(a);
  compare(r, "a", "x", s.x, v({4, 0, 0}));
  compare(r, "a", "y", s.y, v({1, 4, 4}));
  compare(r, "a", "strict", check_equilibrium(a, s).is_strict ? 1.0 : 0.0, 1.0);

  const Economy b = sqrt_three(v({1.5, 5, 5}));
  const StrategyProfile t = consumption_fixed_point(b, corner_network());
  compare(r, "b", "x", t.x, v({.5, 1.5, 1.5}));
  compare(r, "b", "y", t.y, v({0, 2.5, 2.5}));
  r.notes.push_back("table b: y for players 2 and 3 printed as 3, which breaks x + y + links * k = w; golden holds 2.5");
  return r;
}

FigureResult second() {
  FigureResult r{"figure2", {}, {}};
  const Economy e = triple(3.95);
  const auto found = enumerate_equilibria(e, Refinement::Sociable);
  int classes = 0;
  for (const auto& q : found) classes = std::max(classes, q.symmetry_class + 1);
  compare(r, "all", "classes", classes, 3.0);

  const std::vector<std::tuple<std::string, Vector, Vector>> tables{
      {"g1", v({9.9, 3.91, 3.91}), v({.1, .14, .14})},
      {"g2", v({5.95, 3.95, 0}), v({.1, .1, .1})},
      {"g3", v({2, 3.97, 3.97}), v({.1, .08, .08})}};
  for (const auto& [name, x, y] : tables) {
    const StrategyProfile* best = nullptr;
    double err = std::numeric_limits<double>::infinity();
    for (const auto& q : found)
      if (const double d = max_error(q.profile, x, y); d < err) {
        err = d;
        best = &q.profile;
      }
    if (!best) {
      r.notes.push_back("table " + name + ": no equilibrium found");
      compare(r, name, "found", 0.0, 1.0);
      continue;
    }
    compare(r, name, "x", best->x, x);
    compare(r, name, "y", best->y, y);
  }
  const auto nash = enumerate_equilibria(e, Refinement::Nash);
  int nash_classes = 0;
  for (const auto& q : nash) nash_classes = std::max(nash_classes, q.symmetry_class + 1);
  r.notes.push_back("Nash classes without the sociable refinement: " + std::to_string(nash_classes));

  for (const double k : {3.0, 2.0}) {
    const auto eqs = enumerate_equilibria(triple(k), Refinement::Sociable);
    int c = 0;
    for (const auto& q : eqs) c = std::max(c, q.symmetry_class + 1);
    std::ostringstream name;
    name << "k=" << k;
    compare(r, name.str(), "classes", c, 1.0);
  }
  return r;
}

FigureResult third() {
  FigureResult r{"figure3", {}, {}};
  const Economy e = quad_welfare();
  const StrategyProfile a = consumption_fixed_point(e, welfare_first());
  const StrategyProfile b = consumption_fixed_point(e, welfare_second());
  compare(r, "a", "x", a.x, v({10.0 / 3, 7.0 / 3, 1.0 / 6, 0}));
  compare(r, "a", "y", a.y, v({17.0 / 3, 17.0 / 3, 35.0 / 6, 3}));
  compare(r, "b", "x", b.x, v({11.0 / 3, 5.0 / 6, 5.0 / 3, 0}));
  compare(r, "b", "y", b.y, v({16.0 / 3, 37.0 / 6, 16.0 / 3, 3}));
  const std::vector<Index> d{0, 1};
  compare(r, "a", "core xbar", core_construction(e, d).core_public, 17.0 / 3);
  const auto va = check_equilibrium(e, a), vb = check_equilibrium(e, b);
  if (!va.is_nash) r.notes.push_back("table a network is not a Nash equilibrium of this economy");
  if (!vb.is_nash) r.notes.push_back("table b network is not a Nash equilibrium of this economy");
  return r;
}

FigureResult fourth() {
  FigureResult r{"figure4", {}, {}};
  const Economy e = quad_transfers();
  const StrategyProfile a = consumption_fixed_point(e, transfers_start());
  compare(r, "a", "x", a.x, v({13.0 / 3, 13.0 / 3, 0, .73}));
  compare(r, "a", "y", a.y, v({26.0 / 3, 26.0 / 3, 6, 1.2667}));
  compare(r, "a", "welfare", welfare(e, a), 28.384);

  const TransferScheme b = second_best(e, 0);
  compare(r, "b", "w", b.wealth, v({29.02, 5.54, 5.54, 3.91}));
  compare(r, "b", "x", b.after.x, v({14.51, 0, 0, 0}));
  compare(r, "b", "y", b.after.y, v({14.51, 3.54, 3.54, 1.91}));
  compare(r, "b", "welfare", b.welfare_after, 38.5063);

  const TransferScheme c = second_best(e);
  compare(r, "c", "hub", static_cast<double>(c.hub + 1), 4.0);
  compare(r, "c", "w", c.wealth, v({6.03, 6.03, 6.03, 25.92}));
  compare(r, "c", "x", c.after.x, v({0, 0, 0, 20.74}));
  compare(r, "c", "y", c.after.y, v({4.03, 4.03, 4.03, 5.18}));
  compare(r, "c", "welfare", c.welfare_after, 43.128);
  return r;
}

}  // namespace

Economy sqrt_three(const Vector& w) {
  const double b = 2.0 * std::sqrt(3.0);
  std::vector<Player> ps;
  ps.emplace_back(w[0], 1.0, SqrtAdditive{4.0});
  ps.emplace_back(w[1], 1.0, SqrtAdditive{b});
  ps.emplace_back(w[2], 1.0, SqrtAdditive{b});
  return Economy(std::move(ps), 1.0);
}

Economy triple(double k) { return cobb_douglas({.99, .99, .99}, {10, 8, 8}, k); }
Economy quad_welfare() { return cobb_douglas({.5, .5, .5, .5}, {10, 9, 8, 4}, 1.0); }
Economy quad_transfers() { return cobb_douglas({.5, .5, .5, .8}, {15, 15, 10, 4}, 2.0); }

LinkProfile corner_network() { return LinkProfile::from_edges(3, {{0, 1}, {1, 2}, {2, 1}}); }
LinkProfile welfare_first() { return LinkProfile::from_edges(4, {{0, 1}, {1, 0}, {2, 0}, {2, 1}, {3, 0}}); }
LinkProfile welfare_second() { return LinkProfile::from_edges(4, {{0, 2}, {2, 0}, {1, 0}, {1, 2}, {3, 0}}); }
LinkProfile transfers_start() { return welfare_first(); }

bool Check::ok(double tol) const { return std::abs(computed - golden) <= tol; }

bool FigureResult::ok(double tol) const {
  for (const Check& c : checks)
    if (!c.ok(tol)) return false;
  return true;
}

std::vector<FigureResult> reproduce() { return {first(), second(), third(), fourth()}; }

std::string to_csv(const std::vector<FigureResult>& results, double tol) {
  std::ostringstream os;
  os << std::setprecision(8) << "figure,table,quantity,player,computed,golden,abs_error,ok\n";
  for (const auto& r : results)
    for (const Check& c : r.checks) {
      os << r.name << ',' << c.table << ',' << c.quantity << ',';
      if (c.player >= 0) os << c.player + 1;
      os << ',' << c.computed << ',' << c.golden << ',' << std::abs(c.computed - c.golden) << ','
         << (c.ok(tol) ? "true" : "false") << '\n';
    }
  return os.str();
}

}  // namespace pgnet::figures
