#include <algorithm>
#include <exception>
#include <numeric>
#include <thread>

#include "pgnet/equilibrium.hpp"

namespace pgnet {

namespace {

struct Found {
  unsigned long long code;
  EnumeratedEquilibrium eq;
};

void scan(const Economy& econ, Refinement refinement, unsigned long long begin, unsigned long long end,
          std::vector<Found>& out) {
  const Index n = econ.size();
  const double k = econ.k();
  std::vector<bool> active(static_cast<std::size_t>(n));
  for (unsigned long long code = begin; code < end; ++code) {
    const LinkProfile g = LinkProfile::from_code(n, code);
    bool affordable = true;
    for (Index i = 0; i < n && affordable; ++i)
      affordable = static_cast<double>(g.out_degree(i)) * k <= econ[i].w * (1.0 + 1e-12);
    if (!affordable) continue;
    // with costly links nobody sponsors a link to a non-contributor
    for (Index i = 0; i < n; ++i) active[static_cast<std::size_t>(i)] = k > 0.0 && g.in_degree(i) > 0;
    std::vector<StrategyProfile> sols;
    try {
      sols = consumption_fixed_points(econ, g, active);
    } catch (const SolverError&) {
      continue;
    }
    for (auto& s : sols) {
      EquilibriumVerdict v;
      try {
        v = check_equilibrium(econ, s);
      } catch (const std::invalid_argument&) {
        continue;
      }
      if (v.satisfies(refinement)) out.push_back({code, {std::move(s), std::move(v), 0}});
    }
  }
}

std::vector<std::vector<Index>> admissible_permutations(const Economy& econ) {
  const Index n = econ.size();
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  std::vector<std::vector<Index>> out;
  do {
    bool ok = true;
    for (Index i = 0; i < n && ok; ++i) ok = identical_players(econ[i], econ[perm[static_cast<std::size_t>(i)]]);
    if (ok) out.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

bool same_profile(const StrategyProfile& a, const StrategyProfile& b) {
  return a.g == b.g && (a.x - b.x).cwiseAbs().maxCoeff() <= 1e-6;
}

// b relabelled by perm (player i of b becomes perm[i]) equals a
bool relabels_to(const StrategyProfile& a, const StrategyProfile& b, const std::vector<Index>& perm) {
  const Index n = a.size();
  for (Index i = 0; i < n; ++i) {
    const Index pi = perm[static_cast<std::size_t>(i)];
    if (std::abs(a.x[pi] - b.x[i]) > 1e-6) return false;
    for (Index j = 0; j < n; ++j)
      if (a.g(pi, perm[static_cast<std::size_t>(j)]) != b.g(i, j)) return false;
  }
  return true;
}

}  // namespace

std::vector<EnumeratedEquilibrium> enumerate_equilibria(const Economy& econ, Refinement refinement,
                                                        unsigned threads) {
  const Index n = econ.size();
  if (n > kMaxEnumerationSize)
    throw std::invalid_argument("exhaustive enumeration is limited to " + std::to_string(kMaxEnumerationSize) +
                                " players");
  const unsigned long long total = 1ULL << (n * (n - 1));
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<unsigned long long>(threads, total));

  std::vector<std::vector<Found>> parts(threads);
  std::vector<std::exception_ptr> errors(threads);
  {
    std::vector<std::jthread> pool;
    const unsigned long long chunk = (total + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const unsigned long long begin = std::min(total, t * chunk), end = std::min(total, begin + chunk);
      pool.emplace_back([&, t, begin, end] {
        try {
          scan(econ, refinement, begin, end, parts[t]);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<EnumeratedEquilibrium> out;
  for (auto& part : parts)
    for (auto& f : part) {
      const bool dup = std::any_of(out.begin(), out.end(),
                                   [&](const EnumeratedEquilibrium& e) { return same_profile(e.profile, f.eq.profile); });
      if (!dup) out.push_back(std::move(f.eq));
    }

  const auto perms = admissible_permutations(econ);
  int classes = 0;
  for (std::size_t a = 0; a < out.size(); ++a) {
    out[a].symmetry_class = -1;
    for (std::size_t b = 0; b < a && out[a].symmetry_class < 0; ++b)
      for (const auto& perm : perms)
        if (relabels_to(out[b].profile, out[a].profile, perm)) {
          out[a].symmetry_class = out[b].symmetry_class;
          break;
        }
    if (out[a].symmetry_class < 0) out[a].symmetry_class = classes++;
  }
  return out;
}

}  // namespace pgnet
