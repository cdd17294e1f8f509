#pragma once

#include <string>
#include <vector>

#include "pgnet/economy.hpp"

namespace pgnet::figures {

// Built-in example economies; indices below are 0-based.
Economy sqrt_three(const Vector& w);  // b = (4, 2 sqrt 3, 2 sqrt 3), k = 1
Economy triple(double k);             // Cobb-Douglas a = .99, w = (10, 8, 8)
Economy quad_welfare();               // Cobb-Douglas a = .5, w = (10, 9, 8, 4), k = 1
Economy quad_transfers();             // a = (.5, .5, .5, .8), w = (15, 15, 10, 4), k = 2

LinkProfile corner_network();   // 1 -> 2, 2 <-> 3
LinkProfile welfare_first();    // 1 <-> 2, 3 -> 1, 3 -> 2, 4 -> 1
LinkProfile welfare_second();   // 1 <-> 3, 2 -> 1, 2 -> 3, 4 -> 1
LinkProfile transfers_start();  // 1 <-> 2, 3 -> 1, 3 -> 2, 4 -> 1

struct Check {
  std::string table;
  std::string quantity;  // "x", "y", "w", "welfare", ...
  Index player = -1;     // -1 for scalars
  double computed = 0.0;
  double golden = 0.0;
  bool ok(double tol) const;
};

inline constexpr double kGoldenTolerance = 1e-2;

struct FigureResult {
  std::string name;
  std::vector<Check> checks;
  std::vector<std::string> notes;
  bool ok(double tol = kGoldenTolerance) const;
};

std::vector<FigureResult> reproduce();

/// figure,table,quantity,player,computed,golden,abs_error,ok
std::string to_csv(const std::vector<FigureResult>& results, double tol = kGoldenTolerance);

}  // namespace pgnet::figures
