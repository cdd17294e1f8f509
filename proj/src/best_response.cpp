#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "pgnet/equilibrium.hpp"

namespace pgnet {

std::string to_string(Refinement r) {
  switch (r) {
    case Refinement::Nash: return "nash";
    case Refinement::Sociable: return "sociable";
    case Refinement::Strict: return "strict";
  }
  return "nash";
}

Refinement parse_refinement(const std::string& s) {
  if (s == "nash") return Refinement::Nash;
  if (s == "sociable") return Refinement::Sociable;
  if (s == "strict") return Refinement::Strict;
  throw std::invalid_argument("unknown refinement '" + s + "' (expected nash|sociable|strict)");
}

bool EquilibriumVerdict::satisfies(Refinement r) const {
  switch (r) {
    case Refinement::Nash: return is_nash;
    case Refinement::Sociable: return is_sociable;
    case Refinement::Strict: return is_strict;
  }
  return false;
}

std::optional<Strategy> consume_with_links(const Player& player, double k, Index link_count,
                                           double spillover) {
  double budget = player.w - static_cast<double>(link_count) * k;
  if (budget < -1e-12 * std::max(1.0, player.w)) return std::nullopt;
  budget = std::max(budget, 0.0);
  const double social_income = budget + player.px * spillover;
  const double wanted = player.pref.demand(player.p, social_income, player.px);
  const double xbar = std::max(wanted, spillover);
  Strategy s;
  s.x = xbar - spillover;
  s.y = std::max(0.0, (budget - player.px * s.x) / player.p);
  s.utility = player.pref.utility(xbar, s.y);
  return s;
}

namespace {

// Other players ranked by provision, largest first, ties by index.
struct Ranking {
  std::vector<Index> order;
  std::vector<double> value;  // provision in rank order
  std::vector<double> top;    // top[e] = sum of the e largest provisions

  Ranking(const Vector& x, Index self) {
    for (Index j = 0; j < x.size(); ++j)
      if (j != self) order.push_back(j);
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return x[a] > x[b]; });
    value.reserve(order.size());
    top.assign(order.size() + 1, 0.0);
    for (std::size_t r = 0; r < order.size(); ++r) {
      value.push_back(x[order[r]]);
      top[r + 1] = top[r] + value.back();
    }
  }
  Index size() const { return static_cast<Index>(order.size()); }
};

double tie_tolerance(double v) { return 1e-9 * std::max(1.0, std::abs(v)); }

// All link sets of size e that collect the largest spillover, lowest indices
// first; stops after `cap` sets.
std::vector<std::vector<Index>> top_sets(const Ranking& rk, const Vector& x, Index e, std::size_t cap,
                                         bool& truncated) {
  if (e == 0) return {{}};
  const double boundary = rk.value[static_cast<std::size_t>(e - 1)];
  const double tol = tie_tolerance(boundary);
  std::vector<Index> forced, ties;
  for (Index j : rk.order) {
    if (x[j] > boundary + tol)
      forced.push_back(j);
    else if (std::abs(x[j] - boundary) <= tol)
      ties.push_back(j);
  }
  std::sort(ties.begin(), ties.end());
  const std::size_t need = static_cast<std::size_t>(e) - forced.size();
  std::vector<std::vector<Index>> out;
  // lexicographic combinations of `need` out of ties
  std::vector<std::size_t> pick(need);
  std::iota(pick.begin(), pick.end(), 0);
  while (true) {
    if (out.size() >= cap) {
      truncated = true;
      break;
    }
    std::vector<Index> links = forced;
    for (std::size_t p : pick) links.push_back(ties[p]);
    std::sort(links.begin(), links.end());
    out.push_back(std::move(links));
    // advance
    std::ptrdiff_t pos = static_cast<std::ptrdiff_t>(need) - 1;
    while (pos >= 0 && pick[static_cast<std::size_t>(pos)] == ties.size() - need + static_cast<std::size_t>(pos)) --pos;
    if (pos < 0) break;
    ++pick[static_cast<std::size_t>(pos)];
    for (std::size_t q = static_cast<std::size_t>(pos) + 1; q < need; ++q) pick[q] = pick[q - 1] + 1;
  }
  return out;
}

double sum_over(const Vector& x, const std::vector<Index>& links) {
  double s = 0.0;
  for (Index j : links) s += x[j];
  return s;
}

// Utility of the best strategy with e links for each e (nullopt if unaffordable).
std::vector<std::optional<Strategy>> values_by_count(const Economy& econ, const Ranking& rk, Index i) {
  std::vector<std::optional<Strategy>> v;
  v.reserve(static_cast<std::size_t>(rk.size()) + 1);
  for (Index e = 0; e <= rk.size(); ++e)
    v.push_back(consume_with_links(econ[i], econ.k(), e, rk.top[static_cast<std::size_t>(e)]));
  return v;
}

}  // namespace

BestResponseSet best_response(const Economy& econ, const StrategyProfile& profile, Index i) {
  const Ranking rk(profile.x, i);
  const auto values = values_by_count(econ, rk, i);
  BestResponseSet out;
  out.utility = -std::numeric_limits<double>::infinity();
  for (const auto& v : values)
    if (v) out.utility = std::max(out.utility, v->utility);
  const double tol = econ.tol().indiff;
  int optimal_counts = 0;
  for (Index e = 0; e <= rk.size(); ++e) {
    const auto& v = values[static_cast<std::size_t>(e)];
    if (!v || v->utility < out.utility - tol) continue;
    ++optimal_counts;
    const std::size_t room = BestResponseSet::max_listed - std::min(BestResponseSet::max_listed, out.strategies.size());
    if (room == 0) {
      out.truncated = true;
      continue;
    }
    bool truncated = false;
    for (auto& links : top_sets(rk, profile.x, e, room, truncated)) {
      Strategy s = *consume_with_links(econ[i], econ.k(), e, sum_over(profile.x, links));
      s.links = std::move(links);
      out.strategies.push_back(std::move(s));
    }
    out.truncated = out.truncated || truncated;
  }
  out.unique = optimal_counts == 1;
  return out;
}

Strategy canonical_best_response(const Economy& econ, const StrategyProfile& profile, Index i) {
  const Ranking rk(profile.x, i);
  const auto values = values_by_count(econ, rk, i);
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& v : values)
    if (v) best = std::max(best, v->utility);
  Index chosen = 0;
  for (Index e = rk.size(); e >= 0; --e) {
    const auto& v = values[static_cast<std::size_t>(e)];
    if (v && v->utility >= best - econ.tol().indiff) {
      chosen = e;
      break;
    }
  }
  bool truncated = false;
  auto links = top_sets(rk, profile.x, chosen, 1, truncated).front();
  Strategy s = *consume_with_links(econ[i], econ.k(), chosen, sum_over(profile.x, links));
  s.links = std::move(links);
  return s;
}

EquilibriumVerdict check_equilibrium(const Economy& econ, const StrategyProfile& profile) {
  const auto issues = validate_profile(econ, profile);
  if (!issues.empty()) {
    std::ostringstream os;
    os << "invalid profile: player " << issues.front().player + 1 << ": " << issues.front().message;
    throw std::invalid_argument(os.str());
  }
  const Index n = econ.size();
  const double tol = econ.tol().indiff;
  const ConsumptionReport rep = consumption_report(econ, profile);

  EquilibriumVerdict v;
  bool nash = true, sociable = true, strict = true;
  std::optional<Deviation> nash_witness, sociable_witness, strict_witness;

  for (Index i = 0; i < n; ++i) {
    const double current = rep.utility[i];
    const Ranking rk(profile.x, i);
    const auto values = values_by_count(econ, rk, i);
    const std::vector<Index> mine = profile.g.neighbors(i);
    const Index eta = static_cast<Index>(mine.size());

    // Nash: no strategy beats the current one
    for (Index e = 0; e <= rk.size(); ++e) {
      const auto& val = values[static_cast<std::size_t>(e)];
      if (val && val->utility > current + tol) {
        nash = false;
        if (!nash_witness || val->utility - current > nash_witness->gain) {
          bool tr = false;
          Strategy s = *val;
          s.links = top_sets(rk, profile.x, e, 1, tr).front();
          nash_witness = Deviation{i, s, val->utility - current};
        }
      }
    }

    // Sociable: adding any missing link must strictly hurt
    for (Index j = 0; j < n; ++j) {
      if (j == i || profile.g(i, j)) continue;
      const auto added = consume_with_links(econ[i], econ.k(), eta + 1, rep.spillover[i] + profile.x[j]);
      if (added && added->utility >= current - tol) {
        sociable = false;
        if (!sociable_witness) {
          Strategy s = *added;
          s.links = mine;
          s.links.push_back(j);
          std::sort(s.links.begin(), s.links.end());
          sociable_witness = Deviation{i, s, added->utility - current};
        }
      }
    }

    // Strict: every other link set must strictly hurt
    const double own_sum = rep.spillover[i];
    for (Index e = 0; e <= rk.size(); ++e) {
      const double top = rk.top[static_cast<std::size_t>(e)];
      std::optional<double> alt;
      const bool is_top_set = e == eta && own_sum >= top - 1e-12 * std::max(1.0, std::abs(top));
      if (!is_top_set) {
        alt = top;
      } else if (e > 0 && e < rk.size()) {
        alt = top - rk.value[static_cast<std::size_t>(e - 1)] + rk.value[static_cast<std::size_t>(e)];
      }
      if (!alt) continue;
      const auto s = consume_with_links(econ[i], econ.k(), e, *alt);
      if (s && s->utility >= current - tol) {
        strict = false;
        if (!strict_witness) {
          Strategy w = *s;
          bool tr = false;
          w.links = top_sets(rk, profile.x, e, 1, tr).front();
          if (is_top_set && w.links == mine) {
            // the runner-up set: swap the weakest included contributor
            w.links = mine;
            const Index weakest = rk.order[static_cast<std::size_t>(e - 1)];
            const Index next = rk.order[static_cast<std::size_t>(e)];
            std::replace(w.links.begin(), w.links.end(), weakest, next);
            std::sort(w.links.begin(), w.links.end());
          }
          strict_witness = Deviation{i, w, s->utility - current};
        }
      }
    }
  }

  v.is_nash = nash;
  v.is_sociable = nash && sociable;
  v.is_strict = v.is_sociable && strict;
  if (!nash)
    v.witness = nash_witness;
  else if (!sociable)
    v.witness = sociable_witness;
  else if (!strict)
    v.witness = strict_witness;
  return v;
}

}  // namespace pgnet
