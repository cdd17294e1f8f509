#include "pgnet/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "pgnet/errors.hpp"
#include "pgnet/figures.hpp"
#include "pgnet/io.hpp"

namespace pgnet::cli {

namespace {

namespace fs = std::filesystem;

const std::vector<std::pair<std::string, std::string>> kCommands{
    {"solve", "constructive equilibrium"},
    {"enumerate", "all equilibria by exhaustive search (n <= 5)"},
    {"check", "verdict for a supplied profile"},
    {"structure", "core, periphery, cells and nestedness of the constructed equilibrium"},
    {"efficiency", "first-best allocation"},
    {"transfers", "budget-balanced transfers that improve the constructed equilibrium"},
    {"second-best", "welfare-maximizing transfers over stars"},
    {"prices", "personalized public good price for the hub plus lump-sum taxes"},
    {"inequality", "periphery utility and income gaps against autarky"},
    {"lawfew", "core share as the population grows"},
    {"reproduce-figures", "built-in examples against their golden tables"}};

struct Sink {
  const RunConfig& cfg;
  std::ostream& out;

  // Writes to <out>/<name> or to stdout.
  void emit(const std::string& name, const std::string& body) const {
    if (cfg.out.empty()) {
      out << body;
      if (!body.empty() && body.back() != '\n') out << '\n';
      return;
    }
    fs::create_directories(cfg.out);
    const fs::path path = fs::path(cfg.out) / name;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + path.string());
    f << body;
    if (!body.empty() && body.back() != '\n') f << '\n';
    out << path.string() << '\n';
  }
};

Economy need_economy(const RunConfig& cfg) {
  if (cfg.economy.empty()) throw ConfigError(cfg.command + " needs --economy");
  return load_economy(cfg.economy);
}

StrategyProfile profile_or_solve(const RunConfig& cfg, const Economy& econ) {
  return cfg.profile.empty() ? solve_equilibrium(econ) : load_profile(econ, cfg.profile);
}

std::string dot_for(const Economy& econ, const StrategyProfile& s, const std::string& name) {
  const StructureReport rep = classify_core_periphery(s.g, s.x, econ.k(), econ.tol().indiff);
  return export_dot(s.g, rep, DotAnnotations{econ.wealth(), s.x, s.y, name});
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

void want_format(const RunConfig& cfg, std::initializer_list<const char*> allowed) {
  for (const char* f : allowed)
    if (cfg.format == f) return;
  throw ConfigError("--format " + cfg.format + " is not available for " + cfg.command);
}

int solve(const RunConfig& cfg, const Sink& sink) {
  const Economy econ = need_economy(cfg);
  const StrategyProfile s = solve_equilibrium(econ);
  if (cfg.format == "csv") {
    sink.emit("solve.csv", profile_csv(econ, s));
  } else if (cfg.format == "dot") {
    sink.emit("solve.dot", dot_for(econ, s, "solve"));
  } else {
    Json j = profile_to_json(econ, s);
    j["verdict"] = verdict_to_json(check_equilibrium(econ, s));
    j["structure"] = structure_to_json(classify_core_periphery(s.g, s.x, econ.k(), econ.tol().indiff));
    sink.emit("solve.json", dump(j));
  }
  return kOk;
}

int enumerate(const RunConfig& cfg, const Sink& sink) {
  const Economy econ = need_economy(cfg);
  const Refinement ref = parse_refinement(cfg.refinement);
  const auto found = enumerate_equilibria(econ, ref);
  if (cfg.format == "csv") {
    std::ostringstream os;
    os << std::setprecision(10) << "index,class,player,x,y,links,nash,sociable,strict\n";
    for (std::size_t e = 0; e < found.size(); ++e) {
      const auto& q = found[e];
      for (Index i = 0; i < econ.size(); ++i) {
        os << e + 1 << ',' << q.symmetry_class + 1 << ',' << i + 1 << ',' << q.profile.x[i] << ','
           << q.profile.y[i] << ',';
        const auto nb = q.profile.g.neighbors(i);
        for (std::size_t r = 0; r < nb.size(); ++r) os << (r ? " " : "") << nb[r] + 1;
        os << ',' << q.verdict.is_nash << ',' << q.verdict.is_sociable << ',' << q.verdict.is_strict << '\n';
      }
    }
    sink.emit("enumerate.csv", os.str());
  } else if (cfg.format == "dot") {
    std::string all;
    for (std::size_t e = 0; e < found.size(); ++e)
      all += dot_for(econ, found[e].profile, "eq" + std::to_string(e + 1));
    sink.emit("enumerate.dot", all);
  } else {
    Json list = Json::array();
    for (const auto& q : found) {
      Json j = profile_to_json(econ, q.profile);
      j["class"] = q.symmetry_class + 1;
      j["verdict"] = verdict_to_json(q.verdict);
      list.push_back(j);
    }
    int classes = 0;
    for (const auto& q : found) classes = std::max(classes, q.symmetry_class + 1);
    sink.emit("enumerate.json",
              dump(Json{{"refinement", to_string(ref)}, {"count", found.size()}, {"classes", classes}, {"equilibria", list}}));
  }
  return kOk;
}

int check(const RunConfig& cfg, const Sink& sink) {
  want_format(cfg, {"json"});
  const Economy econ = need_economy(cfg);
  if (cfg.profile.empty()) throw ConfigError("check needs --profile");
  const StrategyProfile s = load_profile(econ, cfg.profile);
  const auto issues = validate_profile(econ, s);
  if (!issues.empty()) {
    Json list = Json::array();
    for (const auto& is : issues) list.push_back(Json{{"player", is.player + 1}, {"message", is.message}, {"amount", is.amount}});
    sink.emit("check.json", dump(Json{{"valid", false}, {"issues", list}}));
    return kOk;
  }
  Json j = verdict_to_json(check_equilibrium(econ, s));
  j["valid"] = true;
  sink.emit("check.json", dump(j));
  return kOk;
}

int structure(const RunConfig& cfg, const Sink& sink) {
  want_format(cfg, {"json", "dot", "csv"});
  const Economy econ = need_economy(cfg);
  const StrategyProfile s = profile_or_solve(cfg, econ);
  if (cfg.format == "dot")
    sink.emit("structure.dot", dot_for(econ, s, "structure"));
  else if (cfg.format == "csv")
    sink.emit("structure.csv", edge_list_csv(s.g));
  else
    sink.emit("structure.json",
              dump(structure_to_json(classify_core_periphery(s.g, s.x, econ.k(), econ.tol().indiff))));
  return kOk;
}

int efficiency(const RunConfig& cfg, const Sink& sink) {
  const Economy econ = need_economy(cfg);
  const EfficientSolution s = efficient_solution(econ);
  if (cfg.format == "dot") {
    const StrategyProfile p{s.x, s.y, s.g};
    sink.emit("efficiency.dot", dot_for(econ, p, "efficient"));
  } else {
    want_format(cfg, {"json"});
    sink.emit("efficiency.json", dump(efficient_to_json(s)));
  }
  return kOk;
}

int emit_transfers(const RunConfig& cfg, const Sink& sink, const Economy& econ, const TransferScheme& t,
                   const std::string& stem) {
  if (cfg.format == "csv") {
    std::ostringstream os;
    os << std::setprecision(10) << "player,w,t,w_new,x,y\n";
    for (Index i = 0; i < econ.size(); ++i)
      os << i + 1 << ',' << econ[i].w << ',' << t.t[i] << ',' << t.wealth[i] << ',' << t.after.x[i] << ','
         << t.after.y[i] << '\n';
    sink.emit(stem + ".csv", os.str());
  } else if (cfg.format == "dot") {
    const Economy moved = econ.with_wealth(t.wealth.cwiseMax(1e-12));
    sink.emit(stem + ".dot", dot_for(moved, t.after, stem));
  } else {
    sink.emit(stem + ".json", dump(transfers_to_json(t)));
  }
  return kOk;
}

int transfers(const RunConfig& cfg, const Sink& sink) {
  const Economy econ = need_economy(cfg);
  const StrategyProfile eq = profile_or_solve(cfg, econ);
  return emit_transfers(cfg, sink, econ, improving_transfers(econ, eq), "transfers");
}

int second(const RunConfig& cfg, const Sink& sink) {
  const Economy econ = need_economy(cfg);
  if (cfg.linear) return emit_transfers(cfg, sink, econ, second_best_linear(econ), "second_best");
  std::optional<Index> hub;
  if (cfg.hub) {
    if (*cfg.hub < 1 || *cfg.hub > econ.size()) throw ConfigError("--hub out of range");
    hub = static_cast<Index>(*cfg.hub - 1);
  }
  return emit_transfers(cfg, sink, econ, second_best(econ, hub, cfg.seed), "second_best");
}

int prices(const RunConfig& cfg, const Sink& sink) {
  const Economy econ = need_economy(cfg);
  const PriceScheme p = personalized_prices(econ);
  if (cfg.format == "csv") {
    std::ostringstream os;
    os << std::setprecision(10) << "player,w,tau,x,y\n";
    for (Index i = 0; i < econ.size(); ++i)
      os << i + 1 << ',' << econ[i].w << ',' << p.tau[i] << ',' << p.profile.x[i] << ',' << p.profile.y[i] << '\n';
    sink.emit("prices.csv", os.str());
  } else {
    want_format(cfg, {"json"});
    sink.emit("prices.json", dump(prices_to_json(p)));
  }
  return kOk;
}

int inequality(const RunConfig& cfg, const Sink& sink) {
  want_format(cfg, {"json"});
  const Economy econ = need_economy(cfg);
  const StrategyProfile eq = profile_or_solve(cfg, econ);
  sink.emit("inequality.json", dump(inequality_to_json(inequality_report(econ, eq))));
  return kOk;
}

int lawfew(const RunConfig& cfg, const Sink& sink) {
  want_format(cfg, {"csv"});
  LawOfFewConfig lc{Player(10.0, 1.0, CobbDouglas{.5}), 1.0, cfg.wealth_low, cfg.wealth_cap, {}, cfg.seed, 0};
  if (!cfg.economy.empty()) {
    const Economy econ = load_economy(cfg.economy);
    lc.prototype = econ[0];
    lc.k = econ.k();
  }
  if (cfg.sizes.empty()) throw ConfigError("lawfew needs --sizes");
  for (long n : cfg.sizes) lc.sizes.push_back(static_cast<Index>(n));
  sink.emit("lawfew.csv", law_of_few_csv(law_of_few_experiment(lc)));
  return kOk;
}

int reproduce(const RunConfig& cfg, const Sink& sink, std::ostream& err) {
  const auto results = figures::reproduce();
  sink.emit("figures.csv", figures::to_csv(results, cfg.tolerance));
  bool ok = true;
  for (const auto& r : results) {
    for (const auto& n : r.notes) err << r.name << ": " << n << '\n';
    if (!r.ok(cfg.tolerance)) {
      ok = false;
      for (const auto& c : r.checks)
        if (!c.ok(cfg.tolerance))
          err << Json{{"error", "golden_mismatch"}, {"figure", r.name}, {"table", c.table}, {"quantity", c.quantity},
                      {"player", c.player + 1}, {"computed", c.computed}, {"golden", c.golden}}
                     .dump()
              << '\n';
    }
  }
  return ok ? kOk : kGolden;
}

void error_line(std::ostream& err, const char* kind, const std::string& msg) {
  err << Json{{"error", kind}, {"message", msg}}.dump() << '\n';
}

}  // namespace

std::optional<RunConfig> parse(int argc, const char* const* argv, std::ostream& out) {
  RunConfig cfg;
  CLI::App app{"Equilibria and policy analysis for local public goods on endogenous networks", "pgnet"};
  app.require_subcommand(1, 1);
  std::string sizes;
  for (const auto& [name, help] : kCommands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--economy", cfg.economy, "economy JSON file")->check(CLI::ExistingFile);
    sub->add_option("--profile", cfg.profile, "profile JSON file")->check(CLI::ExistingFile);
    sub->add_option("--refinement", cfg.refinement, "nash|sociable|strict")
        ->check(CLI::IsMember({"nash", "sociable", "strict"}));
    sub->add_option("--hub", cfg.hub, "hub index (1-based)");
    sub->add_option("--sizes", sizes, "comma separated, strictly increasing");
    sub->add_option("--seed", cfg.seed, "RNG seed for lawfew and second-best restarts");
    sub->add_option("--out", cfg.out, "output directory");
    sub->add_option("--format", cfg.format, "csv|json|dot")->check(CLI::IsMember({"csv", "json", "dot"}));
    sub->add_flag("--linear", cfg.linear, "closed-form second best for identical Cobb-Douglas players");
    sub->add_option("--wealth-low", cfg.wealth_low, "lower end of lawfew wealth draws");
    sub->add_option("--wealth-cap", cfg.wealth_cap, "upper end of lawfew wealth draws");
    sub->add_option("--tolerance", cfg.tolerance, "absolute tolerance for golden comparisons")
        ->check(CLI::PositiveNumber);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return std::nullopt;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    throw ConfigError(e.what());
  }
  cfg.command = app.get_subcommands().front()->get_name();
  if (cfg.command == "lawfew" && cfg.format == "json") cfg.format = "csv";
  if (!sizes.empty()) {
    std::stringstream ss(sizes);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      try {
        std::size_t used = 0;
        const long n = std::stol(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        cfg.sizes.push_back(n);
      } catch (const std::exception&) {
        throw ConfigError("--sizes: \"" + tok + "\" is not an integer");
      }
    }
    for (std::size_t i = 0; i < cfg.sizes.size(); ++i) {
      if (cfg.sizes[i] < 1) throw ConfigError("--sizes must be positive");
      if (i > 0 && cfg.sizes[i] <= cfg.sizes[i - 1]) throw ConfigError("--sizes must be strictly increasing");
    }
  }
  if (cfg.out.empty())
    if (const char* env = std::getenv("PGNET_OUT"); env && *env) cfg.out = env;
  return cfg;
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const Sink sink{cfg, out};
  const std::string& c = cfg.command;
  if (c == "solve") return solve(cfg, sink);
  if (c == "enumerate") return enumerate(cfg, sink);
  if (c == "check") return check(cfg, sink);
  if (c == "structure") return structure(cfg, sink);
  if (c == "efficiency") return efficiency(cfg, sink);
  if (c == "transfers") return transfers(cfg, sink);
  if (c == "second-best") return second(cfg, sink);
  if (c == "prices") return prices(cfg, sink);
  if (c == "inequality") return inequality(cfg, sink);
  if (c == "lawfew") return lawfew(cfg, sink);
  if (c == "reproduce-figures") return reproduce(cfg, sink, err);
  throw ConfigError("unknown command " + c);
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  try {
    const auto cfg = parse(argc, argv, out);
    if (!cfg) return kOk;
    return run(*cfg, out, err);
  } catch (const ConfigError& e) {
    error_line(err, "config", e.what());
    return kConfig;
  } catch (const std::invalid_argument& e) {
    error_line(err, "config", e.what());
    return kConfig;
  } catch (const SolverError& e) {
    error_line(err, "solver", e.what());
    return kSolver;
  } catch (const std::exception& e) {
    error_line(err, "solver", e.what());
    return kSolver;
  }
}

}  // namespace pgnet::cli
