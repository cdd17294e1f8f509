#include "pgnet/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "pgnet/errors.hpp"

namespace pgnet {

namespace {

double number(const Json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + ": missing \"" + key + "\"");
  if (!j[key].is_number()) throw ConfigError(where + ": \"" + key + "\" must be a number");
  return j[key].get<double>();
}

Preference preference_from_json(const Json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("family") || !j["family"].is_string())
    throw ConfigError(where + ": preference needs a \"family\" string");
  const std::string fam = j["family"].get<std::string>();
  if (fam == "cobb_douglas") {
    const double a = number(j, "a", where);
    if (!(a > 0.0 && a <= 1.0)) throw ConfigError(where + ": cobb_douglas a must lie in (0, 1]");
    return CobbDouglas{a};
  }
  if (fam == "sqrt_additive") {
    const double b = number(j, "b", where);
    if (!(b > 0.0)) throw ConfigError(where + ": sqrt_additive b must be positive");
    return SqrtAdditive{b};
  }
  if (fam == "root_sum") return RootSum{};
  if (fam == "numeric") {
    if (!j.contains("base")) throw ConfigError(where + ": numeric preference needs a \"base\"");
    const Preference base = preference_from_json(j["base"], where + ".base");
    if (base.is_numeric()) return base;
    return NumericUtility{[base](double x, double y) { return base.utility(x, y); }, "numeric(" + base.name() + ")"};
  }
  throw ConfigError(where + ": unknown preference family \"" + fam + "\"");
}

Json preference_to_json(const Preference& pref) {
  return std::visit(
      [](const auto& f) -> Json {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, CobbDouglas>)
          return Json{{"family", "cobb_douglas"}, {"a", f.a}};
        else if constexpr (std::is_same_v<F, SqrtAdditive>)
          return Json{{"family", "sqrt_additive"}, {"b", f.b}};
        else if constexpr (std::is_same_v<F, RootSum>)
          return Json{{"family", "root_sum"}};
        else
          return Json{{"family", "numeric"}, {"label", f.label}};
      },
      pref.family());
}

void check_version(const Json& j, const std::string& what) {
  if (!j.is_object()) throw ConfigError(what + " must be a JSON object");
  if (!j.contains("version")) throw ConfigError(what + ": missing \"version\"");
  if (!j["version"].is_number_integer() || j["version"].get<int>() != kSchemaVersion)
    throw ConfigError(what + ": unsupported version (expected " + std::to_string(kSchemaVersion) + ")");
}

Json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

Json vec(const Vector& v) {
  Json a = Json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Json one_based(const std::vector<Index>& v) {
  Json a = Json::array();
  for (Index i : v) a.push_back(i + 1);
  return a;
}

Json links(const LinkProfile& g) {
  Json a = Json::array();
  for (const auto& [i, j] : g.edges()) a.push_back({i + 1, j + 1});
  return a;
}

}  // namespace

Economy economy_from_json(const Json& j) {
  check_version(j, "economy");
  const double k = number(j, "k", "economy");
  if (!(k >= 0.0)) throw ConfigError("economy: k must be non-negative");
  if (!j.contains("players") || !j["players"].is_array() || j["players"].empty())
    throw ConfigError("economy: \"players\" must be a non-empty array");
  std::vector<Player> players;
  Tolerances tol;
  if (j.contains("tolerances")) {
    const Json& t = j["tolerances"];
    if (t.contains("fixpoint")) tol.fixpoint = number(t, "fixpoint", "tolerances");
    if (t.contains("indiff")) tol.indiff = number(t, "indiff", "tolerances");
  }
  for (std::size_t i = 0; i < j["players"].size(); ++i) {
    const Json& pj = j["players"][i];
    const std::string where = "player " + std::to_string(i + 1);
    const double w = number(pj, "w", where);
    const double p = pj.contains("p") ? number(pj, "p", where) : 1.0;
    if (!(w > 0.0)) throw ConfigError(where + ": w must be positive");
    if (!(p > 0.0)) throw ConfigError(where + ": p must be positive");
    if (!pj.contains("pref")) throw ConfigError(where + ": missing \"pref\"");
    players.emplace_back(w, p, preference_from_json(pj["pref"], where));
  }
  return Economy(std::move(players), k, tol);
}

Economy load_economy(const std::string& path) { return economy_from_json(read_file(path)); }

Json economy_to_json(const Economy& econ) {
  Json j{{"version", kSchemaVersion}, {"k", econ.k()}};
  Json ps = Json::array();
  for (const Player& pl : econ.players()) {
    Json pj{{"w", pl.w}, {"p", pl.p}, {"pref", preference_to_json(pl.pref)}};
    if (pl.px != 1.0) pj["px"] = pl.px;
    ps.push_back(pj);
  }
  j["players"] = ps;
  return j;
}

StrategyProfile profile_from_json(const Economy& econ, const Json& j) {
  check_version(j, "profile");
  const Index n = econ.size();
  if (!j.contains("x") || !j["x"].is_array() || static_cast<Index>(j["x"].size()) != n)
    throw ConfigError("profile: \"x\" must list one provision per player");
  Vector x(n);
  for (Index i = 0; i < n; ++i) {
    if (!j["x"][static_cast<std::size_t>(i)].is_number()) throw ConfigError("profile: x entries must be numbers");
    x[i] = j["x"][static_cast<std::size_t>(i)].get<double>();
  }
  LinkProfile g(n);
  if (j.contains("links")) {
    for (const Json& e : j["links"]) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer())
        throw ConfigError("profile: links must be [from, to] pairs of integers");
      const Index a = e[0].get<Index>() - 1, b = e[1].get<Index>() - 1;
      if (a < 0 || a >= n || b < 0 || b >= n) throw ConfigError("profile: link endpoint out of range");
      if (a == b) throw ConfigError("profile: self-links are not allowed");
      g.set(a, b);
    }
  }
  if (!j.contains("y")) return profile_from_provisions(econ, std::move(g), std::move(x));
  if (!j["y"].is_array() || static_cast<Index>(j["y"].size()) != n)
    throw ConfigError("profile: \"y\" must list one value per player");
  Vector y(n);
  for (Index i = 0; i < n; ++i) y[i] = j["y"][static_cast<std::size_t>(i)].get<double>();
  return StrategyProfile{std::move(x), std::move(y), std::move(g)};
}

StrategyProfile load_profile(const Economy& econ, const std::string& path) {
  return profile_from_json(econ, read_file(path));
}

Json profile_to_json(const Economy& econ, const StrategyProfile& s) {
  Json j{{"version", kSchemaVersion}, {"x", vec(s.x)}, {"y", vec(s.y)}, {"links", links(s.g)}};
  if (validate_profile(econ, s).empty()) {
    const ConsumptionReport cr = consumption_report(econ, s);
    j["xbar"] = vec(cr.public_total);
    j["social_income"] = vec(cr.social_income);
    j["utility"] = vec(cr.utility);
    j["welfare"] = cr.utility.sum();
  }
  return j;
}

Json verdict_to_json(const EquilibriumVerdict& v) {
  Json j{{"nash", v.is_nash}, {"sociable", v.is_sociable}, {"strict", v.is_strict}};
  if (v.witness) {
    const Deviation& d = *v.witness;
    Json alt = Json::array();
    for (Index l : d.alternative.links) alt.push_back(l + 1);
    j["witness"] = Json{{"player", d.player + 1},
                        {"links", alt},
                        {"x", d.alternative.x},
                        {"y", d.alternative.y},
                        {"gain", d.gain}};
  }
  return j;
}

Json structure_to_json(const StructureReport& r) {
  Json cells = Json::object();
  for (const auto& [deg, who] : r.cells) cells[std::to_string(deg)] = one_based(who);
  Json j{{"core", one_based(r.core)},
         {"periphery", one_based(r.periphery)},
         {"isolated", one_based(r.isolated)},
         {"borderline", one_based(r.borderline)},
         {"core_periphery", r.is_core_periphery},
         {"complete_core_periphery", r.is_complete_core_periphery},
         {"star", r.is_star},
         {"nested_split", r.is_nested_split},
         {"cells", cells}};
  if (r.certificate) {
    Json c{{"reason", r.certificate->reason}, {"i", r.certificate->i + 1}};
    if (r.certificate->j >= 0) c["j"] = r.certificate->j + 1;
    j["certificate"] = c;
  }
  return j;
}

Json efficient_to_json(const EfficientSolution& s) {
  Json j{{"shape", s.shape == EfficientSolution::Shape::Star ? "star" : "empty"}};
  if (s.hub >= 0) j["hub"] = s.hub + 1;
  j["members"] = one_based(s.members);
  j["isolated"] = one_based(s.isolated);
  j["x_hub"] = s.x_hub;
  j["x"] = vec(s.x);
  j["y"] = vec(s.y);
  j["income"] = vec(s.income);
  j["lambda"] = s.lambda;
  j["welfare"] = s.welfare;
  j["links"] = links(s.g);
  return j;
}

Json transfers_to_json(const TransferScheme& t) {
  Json j{{"feasible", t.feasible}};
  if (t.hub >= 0) j["hub"] = t.hub + 1;
  if (t.beta) j["beta"] = *t.beta;
  j["t"] = vec(t.t);
  j["wealth"] = vec(t.wealth);
  j["welfare_before"] = t.welfare_before;
  j["welfare_after"] = t.welfare_after;
  if (t.before.size() > 0) j["before"] = Json{{"x", vec(t.before.x)}, {"y", vec(t.before.y)}, {"links", links(t.before.g)}};
  j["after"] = Json{{"x", vec(t.after.x)}, {"y", vec(t.after.y)}, {"links", links(t.after.g)}};
  if (t.verdict) j["verdict"] = verdict_to_json(*t.verdict);
  if (!t.note.empty()) j["note"] = t.note;
  return j;
}

Json prices_to_json(const PriceScheme& p) {
  return Json{{"hub", p.hub + 1},
              {"p_x", p.p_x},
              {"tau", vec(p.tau)},
              {"tau_sum", p.tau.sum()},
              {"subsidy", (1.0 - p.p_x) * p.first_best.x_hub},
              {"profile", profile_to_json(p.priced, p.profile)},
              {"first_best", efficient_to_json(p.first_best)},
              {"verdict", verdict_to_json(p.verdict)}};
}

Json inequality_to_json(const InequalityReport& r) {
  Json pairs = Json::array();
  for (const PairGap& g : r.pairs)
    pairs.push_back(Json{{"i", g.i + 1},
                         {"j", g.j + 1},
                         {"utility_gap", g.utility_gap},
                         {"autarky_utility_gap", g.autarky_utility_gap},
                         {"income_gap", g.income_gap},
                         {"wealth_gap", g.wealth_gap}});
  Json j{{"pairs", pairs},
         {"share_utility_reduced", r.share_utility_reduced},
         {"share_income_increased", r.share_income_increased},
         {"wealth_spread", r.wealth_spread}};
  j["spread_threshold"] = r.spread_threshold ? Json(*r.spread_threshold) : Json(nullptr);
  return j;
}

std::string profile_csv(const Economy& econ, const StrategyProfile& s) {
  const ConsumptionReport cr = consumption_report(econ, s);
  std::ostringstream os;
  os << std::setprecision(10) << "player,w,x,y,xbar,wbar,utility,links\n";
  for (Index i = 0; i < econ.size(); ++i) {
    os << i + 1 << ',' << econ[i].w << ',' << s.x[i] << ',' << s.y[i] << ',' << cr.public_total[i] << ','
       << cr.social_income[i] << ',' << cr.utility[i] << ',';
    const auto nb = s.g.neighbors(i);
    for (std::size_t r = 0; r < nb.size(); ++r) os << (r ? " " : "") << nb[r] + 1;
    os << '\n';
  }
  return os.str();
}

}  // namespace pgnet
