#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "pgnet/preference.hpp"

namespace pgnet {

using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

struct Tolerances {
  double fixpoint = 1e-10;  // inner solves and budget identities
  double indiff = 1e-7;     // utility comparisons
};

struct Player {
  double w;  // wealth
  double p;  // private good price
  Preference pref;
  double px = 1.0;  // public good price; != 1 only under personalized pricing

  Player(double wealth, double price, Preference preference, double public_price = 1.0);
};

/// Same wealth, prices and preference; such players are interchangeable.
bool identical_players(const Player& a, const Player& b);

class Economy {
 public:
  Economy(std::vector<Player> players, double k, Tolerances tol = {});

  Index size() const { return static_cast<Index>(players_.size()); }
  const Player& operator[](Index i) const { return players_[static_cast<std::size_t>(i)]; }
  const std::vector<Player>& players() const { return players_; }
  double k() const { return k_; }
  const Tolerances& tol() const { return tol_; }

  Vector wealth() const;
  double total_wealth() const { return wealth().sum(); }

  /// Same preference family/parameters and prices for everyone.
  bool homogeneous() const;

  Economy with_wealth(const Vector& w) const;
  Economy with_k(double k) const;
  Economy with_public_price(Index i, double px) const;

 private:
  std::vector<Player> players_;
  double k_;
  Tolerances tol_;
};

/// Directed links; entry (i, j) set means i sponsors a link to j.
class LinkProfile {
 public:
  using Matrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

  explicit LinkProfile(Index n = 0);
  explicit LinkProfile(Matrix adjacency);
  static LinkProfile from_edges(Index n, const std::vector<std::pair<Index, Index>>& edges);
  /// Bit b of code encodes the b-th off-diagonal entry in row-major order.
  static LinkProfile from_code(Index n, unsigned long long code);

  Index size() const { return adj_.rows(); }
  bool operator()(Index i, Index j) const { return adj_(i, j); }
  void set(Index i, Index j, bool on = true);

  const Matrix& adjacency() const { return adj_; }
  Eigen::MatrixXd weights() const { return adj_.cast<double>(); }

  Index out_degree(Index i) const;
  Index in_degree(Index i) const;
  std::vector<Index> neighbors(Index i) const;  // N_i(g), ascending
  Index link_count() const { return adj_.count(); }
  bool empty() const { return link_count() == 0; }
  std::vector<std::pair<Index, Index>> edges() const;

  bool operator==(const LinkProfile& other) const { return adj_ == other.adj_; }

 private:
  Matrix adj_;
};

struct StrategyProfile {
  Vector x;  // own provision
  Vector y;  // private consumption
  LinkProfile g;

  Index size() const { return x.size(); }
};

struct ConsumptionReport {
  Vector spillover;      // xbar_{-i}
  Vector public_total;   // xbar_i
  Vector social_income;  // wbar_i, money terms
  Vector utility;
};

/// Optimal bundle of a player with no links.
std::pair<double, double> isolation_bundle(const Player& player);

/// Spillover sum_j g_ij x_j received by each sponsor.
Vector spillovers(const LinkProfile& g, const Vector& x);

ConsumptionReport consumption_report(const Economy& econ, const StrategyProfile& profile);

struct ProfileIssue {
  enum class Kind { DimensionMismatch, Negative, Budget, SelfLink };
  Kind kind;
  Index player;
  double amount;  // budget residual or offending value
  std::string message;
};

std::vector<ProfileIssue> validate_profile(const Economy& econ, const StrategyProfile& profile);

/// Builds a profile from links and provisions, deriving y from the budget.
StrategyProfile profile_from_provisions(const Economy& econ, LinkProfile g, Vector x);

double welfare(const Economy& econ, const StrategyProfile& profile);

}  // namespace pgnet
