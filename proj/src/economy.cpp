#include "pgnet/economy.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace pgnet {

Player::Player(double wealth, double price, Preference preference, double public_price)
    : w(wealth), p(price), pref(std::move(preference)), px(public_price) {
  if (!(w > 0.0)) throw std::invalid_argument("wealth must be positive");
  if (!(p > 0.0)) throw std::invalid_argument("private good price must be positive");
  if (!(px > 0.0)) throw std::invalid_argument("public good price must be positive");
}

Economy::Economy(std::vector<Player> players, double k, Tolerances tol)
    : players_(std::move(players)), k_(k), tol_(tol) {
  if (players_.empty()) throw std::invalid_argument("an economy needs at least one player");
  if (!(k_ >= 0.0)) throw std::invalid_argument("linking cost must be non-negative");
}

Vector Economy::wealth() const {
  Vector w(size());
  for (Index i = 0; i < size(); ++i) w[i] = (*this)[i].w;
  return w;
}

namespace {

bool same_preference(const Preference& a, const Preference& b) {
  if (a.family().index() != b.family().index()) return false;
  if (const auto* ca = std::get_if<CobbDouglas>(&a.family()))
    return ca->a == std::get<CobbDouglas>(b.family()).a;
  if (const auto* sa = std::get_if<SqrtAdditive>(&a.family()))
    return sa->b == std::get<SqrtAdditive>(b.family()).b;
  if (std::holds_alternative<RootSum>(a.family())) return true;
  // black boxes compare by label only
  return std::get<NumericUtility>(a.family()).label == std::get<NumericUtility>(b.family()).label;
}

}  // namespace

bool identical_players(const Player& a, const Player& b) {
  return a.w == b.w && a.p == b.p && a.px == b.px && same_preference(a.pref, b.pref);
}

bool Economy::homogeneous() const {
  const Player& first = players_.front();
  for (const Player& pl : players_) {
    if (pl.p != first.p || pl.px != first.px || !same_preference(pl.pref, first.pref)) return false;
  }
  return true;
}

Economy Economy::with_wealth(const Vector& w) const {
  if (w.size() != size()) throw std::invalid_argument("wealth vector has wrong size");
  std::vector<Player> ps = players_;
  for (Index i = 0; i < size(); ++i) {
    if (!(w[i] > 0.0)) throw std::invalid_argument("wealth must be positive");
    ps[static_cast<std::size_t>(i)].w = w[i];
  }
  return Economy(std::move(ps), k_, tol_);
}

Economy Economy::with_k(double k) const { return Economy(players_, k, tol_); }

Economy Economy::with_public_price(Index i, double px) const {
  std::vector<Player> ps = players_;
  if (!(px > 0.0)) throw std::invalid_argument("public good price must be positive");
  ps.at(static_cast<std::size_t>(i)).px = px;
  return Economy(std::move(ps), k_, tol_);
}

LinkProfile::LinkProfile(Index n) : adj_(Matrix::Constant(n, n, false)) {}

LinkProfile::LinkProfile(Matrix adjacency) : adj_(std::move(adjacency)) {
  if (adj_.rows() != adj_.cols()) throw std::invalid_argument("adjacency must be square");
  adj_.diagonal().setConstant(false);
}

LinkProfile LinkProfile::from_edges(Index n, const std::vector<std::pair<Index, Index>>& edges) {
  LinkProfile g(n);
  for (const auto& [i, j] : edges) g.set(i, j);
  return g;
}

LinkProfile LinkProfile::from_code(Index n, unsigned long long code) {
  LinkProfile g(n);
  int bit = 0;
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      if (i == j) continue;
      if ((code >> bit) & 1ULL) g.adj_(i, j) = true;
      ++bit;
    }
  return g;
}

void LinkProfile::set(Index i, Index j, bool on) {
  if (i < 0 || j < 0 || i >= size() || j >= size()) throw std::out_of_range("link endpoint out of range");
  if (i == j) throw std::invalid_argument("players cannot link to themselves");
  adj_(i, j) = on;
}

Index LinkProfile::out_degree(Index i) const { return adj_.row(i).count(); }
Index LinkProfile::in_degree(Index i) const { return adj_.col(i).count(); }

std::vector<Index> LinkProfile::neighbors(Index i) const {
  std::vector<Index> out;
  for (Index j = 0; j < size(); ++j)
    if (adj_(i, j)) out.push_back(j);
  return out;
}

std::vector<std::pair<Index, Index>> LinkProfile::edges() const {
  std::vector<std::pair<Index, Index>> out;
  for (Index i = 0; i < size(); ++i)
    for (Index j = 0; j < size(); ++j)
      if (adj_(i, j)) out.emplace_back(i, j);
  return out;
}

std::pair<double, double> isolation_bundle(const Player& player) {
  const double x = player.pref.demand(player.p, player.w, player.px);
  return {x, std::max(0.0, (player.w - player.px * x) / player.p)};
}

Vector spillovers(const LinkProfile& g, const Vector& x) { return g.weights() * x; }

ConsumptionReport consumption_report(const Economy& econ, const StrategyProfile& profile) {
  const Index n = econ.size();
  if (profile.size() != n || profile.y.size() != n || profile.g.size() != n)
    throw std::invalid_argument("profile dimensions do not match the economy");
  ConsumptionReport r;
  r.spillover = spillovers(profile.g, profile.x);
  r.public_total = profile.x + r.spillover;
  r.social_income.resize(n);
  r.utility.resize(n);
  for (Index i = 0; i < n; ++i) {
    const Player& pl = econ[i];
    r.social_income[i] = pl.w - static_cast<double>(profile.g.out_degree(i)) * econ.k() + pl.px * r.spillover[i];
    r.utility[i] = pl.pref.utility(r.public_total[i], std::max(0.0, profile.y[i]));
  }
  return r;
}

std::vector<ProfileIssue> validate_profile(const Economy& econ, const StrategyProfile& profile) {
  std::vector<ProfileIssue> issues;
  const Index n = econ.size();
  if (profile.size() != n || profile.y.size() != n || profile.g.size() != n) {
    issues.push_back({ProfileIssue::Kind::DimensionMismatch, -1, 0.0, "profile dimensions do not match the economy"});
    return issues;
  }
  for (Index i = 0; i < n; ++i) {
    if (profile.g(i, i)) issues.push_back({ProfileIssue::Kind::SelfLink, i, 1.0, "self link"});
    if (profile.x[i] < 0.0)
      issues.push_back({ProfileIssue::Kind::Negative, i, profile.x[i], "negative provision"});
    if (profile.y[i] < 0.0)
      issues.push_back({ProfileIssue::Kind::Negative, i, profile.y[i], "negative private consumption"});
    const Player& pl = econ[i];
    const double residual = pl.px * profile.x[i] + pl.p * profile.y[i] +
                            static_cast<double>(profile.g.out_degree(i)) * econ.k() - pl.w;
    if (std::abs(residual) > econ.tol().fixpoint * std::max(1.0, pl.w)) {
      std::ostringstream os;
      os << "budget residual " << residual;
      issues.push_back({ProfileIssue::Kind::Budget, i, residual, os.str()});
    }
  }
  return issues;
}

StrategyProfile profile_from_provisions(const Economy& econ, LinkProfile g, Vector x) {
  const Index n = econ.size();
  Vector y(n);
  for (Index i = 0; i < n; ++i) {
    const Player& pl = econ[i];
    y[i] = (pl.w - static_cast<double>(g.out_degree(i)) * econ.k() - pl.px * x[i]) / pl.p;
  }
  return {std::move(x), std::move(y), std::move(g)};
}

double welfare(const Economy& econ, const StrategyProfile& profile) {
  return consumption_report(econ, profile).utility.sum();
}

}  // namespace pgnet
