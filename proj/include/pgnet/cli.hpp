#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace pgnet::cli {

enum Exit : int { kOk = 0, kConfig = 2, kSolver = 3, kGolden = 4 };

struct RunConfig {
  std::string command;
  std::string economy;
  std::string profile;
  std::string refinement = "nash";
  std::optional<long> hub;  // 1-based
  std::vector<long> sizes;
  std::uint64_t seed = 1;
  std::string out;  // empty: print to stdout
  std::string format = "json";
  bool linear = false;
  double wealth_low = 10.0, wealth_cap = 10.0;
  double tolerance = 1e-2;  // golden comparisons
};

/// Parses argv; throws pgnet::ConfigError on bad input. Returns nullopt
/// when help was printed.
std::optional<RunConfig> parse(int argc, const char* const* argv, std::ostream& out);

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// parse + run with exit-code mapping.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pgnet::cli
