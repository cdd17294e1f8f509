#include <algorithm>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

#include "pgnet/structure.hpp"
#include "pgnet/welfare.hpp"

namespace pgnet {

namespace {

LawOfFewRow run_cell(const LawOfFewConfig& cfg, Index n) {
  LawOfFewRow row;
  row.n = n;
  row.seed = cfg.seed;
  std::seed_seq seq{cfg.seed, static_cast<std::uint64_t>(n)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> draw(cfg.wealth_low, cfg.wealth_cap);
  std::vector<Player> players;
  players.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    Player pl = cfg.prototype;
    pl.w = cfg.wealth_low < cfg.wealth_cap ? draw(rng) : cfg.wealth_cap;
    players.push_back(std::move(pl));
  }
  try {
    const Economy econ(std::move(players), cfg.k);
    const StrategyProfile eq = econ.homogeneous() ? recursive_construction(econ) : solve_equilibrium(econ);
    const StructureReport rep = classify_core_periphery(eq.g, eq.x, econ.k(), econ.tol().indiff);
    row.core_size = static_cast<Index>(rep.core.size());
    row.core_share = static_cast<double>(row.core_size) / static_cast<double>(n);
    row.welfare = welfare(econ, eq);
  } catch (const std::exception& e) {
    row.error = e.what();
    row.core_share = std::numeric_limits<double>::quiet_NaN();
    row.welfare = std::numeric_limits<double>::quiet_NaN();
  }
  return row;
}

}  // namespace

std::vector<LawOfFewRow> law_of_few_experiment(const LawOfFewConfig& cfg) {
  if (cfg.wealth_low <= 0.0 || cfg.wealth_cap < cfg.wealth_low)
    throw std::invalid_argument("wealth range must satisfy 0 < low <= cap");
  for (Index n : cfg.sizes)
    if (n < 1) throw std::invalid_argument("sizes must be positive");
  std::vector<LawOfFewRow> rows(cfg.sizes.size());
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned threads = std::max(1u, std::min<unsigned>(cfg.threads ? cfg.threads : hw,
                                                           static_cast<unsigned>(rows.size())));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        for (std::size_t c = t; c < rows.size(); c += threads) rows[c] = run_cell(cfg, cfg.sizes[c]);
      });
  }
  for (const auto& r : rows)
    if (!r.error.empty()) std::cerr << "n=" << r.n << ": " << r.error << '\n';
  return rows;
}

std::string law_of_few_csv(const std::vector<LawOfFewRow>& rows) {
  std::ostringstream os;
  os << std::setprecision(10) << "n,seed,core_size,core_share,welfare\n";
  for (const auto& r : rows) {
    os << r.n << ',' << r.seed << ',';
    if (r.error.empty())
      os << r.core_size << ',' << r.core_share << ',' << r.welfare;
    else
      os << "nan,nan,nan";
    os << '\n';
  }
  return os.str();
}

}  // namespace pgnet
