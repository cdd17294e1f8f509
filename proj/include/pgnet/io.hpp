#pragma once

#include <string>

#include <json.hpp>

#include "pgnet/equilibrium.hpp"
#include "pgnet/structure.hpp"
#include "pgnet/welfare.hpp"

namespace pgnet {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

// Economy schema (version 1):
//   {"version": 1, "k": 1.0,
//    "players": [{"w": 10, "p": 1, "pref": {"family": "cobb_douglas", "a": 0.5}}, ...]}
// families: cobb_douglas{a}, sqrt_additive{b}, root_sum, numeric{base: <family>}
// ("numeric" treats the base utility as a black box).
Economy economy_from_json(const Json& j);
Economy load_economy(const std::string& path);
Json economy_to_json(const Economy& econ);

// Profile schema (version 1), players and links 1-based:
//   {"version": 1, "x": [...], "y": [...] (optional), "links": [[1, 2], ...]}
// Missing y is derived from the budget.
StrategyProfile profile_from_json(const Economy& econ, const Json& j);
StrategyProfile load_profile(const Economy& econ, const std::string& path);
Json profile_to_json(const Economy& econ, const StrategyProfile& s);

Json verdict_to_json(const EquilibriumVerdict& v);
Json structure_to_json(const StructureReport& r);
Json efficient_to_json(const EfficientSolution& s);
Json transfers_to_json(const TransferScheme& t);
Json prices_to_json(const PriceScheme& p);
Json inequality_to_json(const InequalityReport& r);

/// One row per player: player,w,x,y,xbar,wbar,utility,links
std::string profile_csv(const Economy& econ, const StrategyProfile& s);

}  // namespace pgnet
