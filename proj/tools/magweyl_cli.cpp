// magweyl command-line front end. Talks to the library only through the C API.

#include <magweyl/magweyl.h>

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <yaml-cpp/yaml.h>

using Json = nlohmann::json;

namespace {

constexpr int kConfigVersion = 1;

enum class Kind { Number, Integer, String, Numbers, Integers, StringOrList };

struct Flag {
  std::string name;  // without dashes
  std::string key;   // option key in the command JSON
  Kind kind;
  std::string fallback;  // shown in --help
  std::string help;
};

struct Failure {
  int code;
  std::string message;
  std::string field;
};

[[noreturn]] void fail(int code, std::string message, std::string field = {}) {
  throw Failure{code, std::move(message), std::move(field)};
}

const std::map<std::string, std::vector<Flag>>& flag_table() {
  static const std::map<std::string, std::vector<Flag>> table{
      {"analyze",
       {{"mu", "mu", Kind::Number, "unset", "coupling mu (enables the strong and gap checks)"},
        {"h", "h", Kind::Number, "unset", "semiclassical parameter h in (0,1]"},
        {"tau", "tau", Kind::Number, "0", "spectral level"},
        {"eps0", "eps0", Kind::Number, "0.05", "grouping tolerance for the partitions"},
        {"eps1", "eps1", Kind::Number, "0", "condition threshold"},
        {"tol", "tol", Kind::Number, "1e-9", "relative resonance detection tolerance"},
        {"max-order", "max_order", Kind::Integer, "3", "largest resonance order |gamma|"},
        {"grid", "grid", Kind::Integer, "8 (d=2), 3 (d>2)", "sample points per axis"},
        {"point", "point", Kind::Numbers, "domain centre", "evaluation point x1,...,xd"},
        {"alpha-bar", "alpha_bar", Kind::Integers, "unset", "level index for the superstrong check"},
        {"window", "window", Kind::Number, "0.05", "energy window of the sampled check"},
        {"directions", "directions", Kind::Integer, "64", "directions per coordinate 2-plane"},
        {"level-samples", "level_samples", Kind::Integer, "16", "level samples per group"},
        {"zeta-samples", "zeta_samples", Kind::Integer, "128", "samples per torus"}}},
      {"weyl",
       {{"mu", "mu", Kind::Number, "required", "coupling mu >= 1"},
        {"h", "h", Kind::Number, "required", "semiclassical parameter h in (0,1]"},
        {"tau", "tau", Kind::Number, "0", "spectral level"},
        {"density", "density", Kind::String, "auto", "auto | full_rank | general | standard"},
        {"point", "point", Kind::Numbers, "unset", "evaluate the density at x1,...,xd instead of integrating"},
        {"psi", "psi", Kind::String, "one", "cutoff: one | bump | indicator"},
        {"resolution", "resolution", Kind::Integer, "128", "quadrature cells per axis"}}},
      {"count",
       {{"mu", "mu", Kind::Number, "required", "coupling mu"},
        {"h", "h", Kind::Number, "required", "semiclassical parameter h"},
        {"tau", "tau", Kind::Number, "0", "count eigenvalues <= tau"},
        {"n", "n", Kind::Integers, "required", "points per axis (one value or one per axis)"},
        {"bc", "bc", Kind::StringOrList, "scenario default", "dirichlet | periodic (or one per axis)"},
        {"method", "method", Kind::String, "auto", "auto | dense | inertia | bloch"},
        {"dense-budget", "dense_budget", Kind::Integer, "8192", "largest N for dense eigensolves"}}},
      {"reduce",
       {{"mu", "mu", Kind::Number, "required", "coupling mu"},
        {"h", "h", Kind::Number, "unset", "semiclassical parameter (needed with --n)"},
        {"n", "n", Kind::Integers, "unset", "lattice points per axis for the spectral check"},
        {"bc", "bc", Kind::StringOrList, "scenario default", "dirichlet | periodic (or one per axis)"},
        {"levels", "levels", Kind::Integer, "3", "clusters compared in the spectral check"}}},
      {"sweep",
       {{"out", "out", Kind::String, "unset", "output directory for records.csv, fits.json, plotdata/"},
        {"workers", "workers", Kind::Integer, "1 or $MAGWEYL_WORKERS", "concurrent sweep points"}}},
  };
  return table;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

double parse_number(const std::string& text, const std::string& field) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  fail(1, "expected a number, got '" + text + "'", field);
}

long long parse_integer(const std::string& text, const std::string& field) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  fail(1, "expected an integer, got '" + text + "'", field);
}

Json flag_value(const Flag& f, const std::string& text) {
  const std::string field = "--" + f.name;
  switch (f.kind) {
    case Kind::Number: return parse_number(text, field);
    case Kind::Integer: return parse_integer(text, field);
    case Kind::String: return text;
    case Kind::Numbers: {
      Json a = Json::array();
      for (const auto& part : split(text, ',')) a.push_back(parse_number(part, field));
      return a;
    }
    case Kind::Integers: {
      Json a = Json::array();
      for (const auto& part : split(text, ',')) a.push_back(parse_integer(part, field));
      return a.size() == 1 ? a[0] : a;
    }
    case Kind::StringOrList: {
      const auto parts = split(text, ',');
      return parts.size() == 1 ? Json(parts[0]) : Json(parts);
    }
  }
  return text;
}

Json yaml_to_json(const YAML::Node& node, const std::string& path) {
  switch (node.Type()) {
    case YAML::NodeType::Null:
    case YAML::NodeType::Undefined: return nullptr;
    case YAML::NodeType::Sequence: {
      Json a = Json::array();
      for (std::size_t i = 0; i < node.size(); ++i) a.push_back(yaml_to_json(node[i], path + "[" + std::to_string(i) + "]"));
      return a;
    }
    case YAML::NodeType::Map: {
      Json o = Json::object();
      for (const auto& kv : node) {
        const std::string key = kv.first.as<std::string>();
        o[key] = yaml_to_json(kv.second, path.empty() ? key : path + "." + key);
      }
      return o;
    }
    case YAML::NodeType::Scalar: {
      const std::string& s = node.Scalar();
      if (node.Tag() == "!") return s;  // quoted
      long long i = 0;
      double d = 0.0;
      bool b = false;
      if (YAML::convert<long long>::decode(node, i)) return i;
      if (YAML::convert<double>::decode(node, d)) return d;
      if (YAML::convert<bool>::decode(node, b)) return b;
      return s;
    }
  }
  return nullptr;
}

// version check and top-level key validation; returns the whole document.
Json load_config(const std::string& path) {
  YAML::Node root;
  try {
    root = YAML::LoadFile(path);
  } catch (const YAML::BadFile&) {
    fail(1, "cannot read config file " + path, "config");
  } catch (const YAML::Exception& e) {
    fail(1, "malformed config file " + path + ": " + e.what(), "config");
  }
  Json j = yaml_to_json(root, "");
  if (!j.is_object()) fail(1, "config must be a mapping", "config");
  if (!j.contains("version")) fail(1, "config needs a version field", "version");
  if (!j["version"].is_number_integer() || j["version"].get<long long>() != kConfigVersion)
    fail(1, "unsupported config version (expected " + std::to_string(kConfigVersion) + ")", "version");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    if (k != "version" && k != "scenario" && !flag_table().contains(k)) fail(1, "unknown key '" + k + "'", k);
  }
  return j;
}

int exit_code_for(int status) {
  switch (status) {
    case MW_ERROR_INVALID_ARGUMENT: return 1;
    case MW_ERROR_BUDGET: return 3;
    default: return 2;
  }
}

void print_human(const Json& j, const std::string& prefix = "") {
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string name = prefix + it.key();
    if (it.value().is_object() && !it.value().empty() && prefix.empty()) {
      print_human(it.value(), name + ".");
    } else {
      std::cout << name << ": " << it.value().dump() << "\n";
    }
  }
}

struct Command {
  CLI::App* app = nullptr;
  std::map<std::string, std::string> values;  // flag name -> raw text
  std::string config;
  std::string scenario;
  std::vector<std::string> sets;
  bool json = false;
};

void add_common(Command& c, bool with_scenario) {
  c.app->add_option("--config", c.config, "YAML run configuration (flags override it)")->default_str("none");
  if (with_scenario) {
    c.app->add_option("--scenario", c.scenario, "registry scenario: const2d | const4d | varV2d | resonant4d")
        ->default_str("from config");
    c.app->add_option("--set", c.sets, "scenario parameter override KEY=VALUE (repeatable)")->default_str("none");
  }
  c.app->add_flag("--json", c.json, "machine-readable JSON output")->default_str("false");
}

Json build_options(const std::string& name, Command& c) {
  Json file = c.config.empty() ? Json::object() : load_config(c.config);
  Json opts = file.contains(name) && file[name].is_object() ? file[name] : Json::object();
  if (file.contains(name) && !file[name].is_object() && !file[name].is_null())
    fail(1, "section must be a mapping", name);

  Json scenario = file.contains("scenario") ? file["scenario"] : Json(nullptr);
  if (scenario.is_string()) scenario = Json{{"name", scenario}};
  if (scenario.is_null()) scenario = Json::object();
  if (!scenario.is_object()) fail(1, "scenario must be a name or a mapping", "scenario");
  if (!c.scenario.empty()) scenario["name"] = c.scenario;
  for (const auto& s : c.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) fail(1, "--set expects KEY=VALUE, got '" + s + "'", "--set");
    scenario["overrides"][s.substr(0, eq)] = parse_number(s.substr(eq + 1), "--set");
  }

  for (const Flag& f : flag_table().at(name)) {
    auto it = c.values.find(f.name);
    if (it != c.values.end()) opts[f.key] = flag_value(f, it->second);
  }

  if (name == "sweep") {
    Json spec = file.contains("sweep") ? file["sweep"] : Json::object();
    spec.erase("out");
    spec.erase("workers");
    if (scenario.contains("name")) spec["scenario"] = scenario["name"];
    if (scenario.contains("overrides")) spec["overrides"] = scenario["overrides"];
    for (auto it = scenario.begin(); it != scenario.end(); ++it)
      if (it.key() != "name" && it.key() != "overrides") fail(1, "unknown key '" + it.key() + "'", "scenario." + it.key());
    Json out{{"sweep", spec}};
    if (opts.contains("out")) out["out"] = opts["out"];
    long long workers = opts.contains("workers") ? opts["workers"].get<long long>() : 1;
    if (!c.values.contains("workers")) {
      if (const char* env = std::getenv("MAGWEYL_WORKERS"); env && *env)
        workers = parse_integer(env, "MAGWEYL_WORKERS");
      else if (file.contains("sweep") && file["sweep"].contains("workers"))
        workers = file["sweep"]["workers"].get<long long>();
    }
    out["workers"] = workers;
    if (file.contains("sweep") && file["sweep"].contains("out") && !opts.contains("out")) out["out"] = file["sweep"]["out"];
    return out;
  }
  if (!scenario.contains("name")) fail(1, "no scenario given (use --scenario or the config file)", "scenario.name");
  opts["scenario"] = scenario;
  return opts;
}

using CommandFn = int (*)(const char*, char**);

int run(const std::string& name, CommandFn fn, Command& c) {
  const Json opts = build_options(name, c);
  char* out = nullptr;
  const int status = fn(opts.dump().c_str(), &out);
  if (status != MW_OK) fail(exit_code_for(status), mw_last_error_message(), mw_last_error_field());
  Json result = Json::parse(out);
  mw_string_free(out);
  if (c.json) std::cout << result.dump() << "\n";
  else print_human(result);
  return 0;
}

void report(const Failure& f) {
  std::cerr << Json{{"code", f.code}, {"message", f.message}, {"field", f.field}}.dump() << "\n";
}

std::string unexpected_field(const CLI::ParseError& e) {
  const std::string what = e.what();
  const auto pos = what.find("--");
  if (pos == std::string::npos) return {};
  auto end = what.find_first_of(" ,\n", pos);
  return what.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"magweyl: magnetic Weyl asymptotics laboratory", "magweyl"};
  app.require_subcommand(1);
  // Subcommands take --h (Planck parameter), so they only get the long help flag.
  app.set_help_flag("--help", "print this help message and exit");
  app.set_version_flag("--version", std::string(mw_version()));
  app.footer("Exit codes: 0 ok, 1 invalid input, 2 computation or I/O error, 3 budget exceeded.\n"
             "Errors are also printed on stderr as JSON {code, message, field}.");

  static const std::vector<std::pair<std::string, std::string>> subcommands{
      {"analyze", "frequencies, resonances, partitions and condition reports"},
      {"weyl", "magnetic Weyl density at a point or integrated against a cutoff"},
      {"count", "lattice eigenvalue count #{lambda <= tau}"},
      {"reduce", "constant-coefficient canonical form and its spectral check"},
      {"sweep", "remainder scaling sweep with CSV/JSON output"},
  };
  std::map<std::string, Command> commands;
  for (const auto& [name, help] : subcommands) {
    Command& c = commands[name];
    c.app = app.add_subcommand(name, help);
    if (name == "sweep") {
      c.app->add_option("--spec,--config", c.config, "YAML sweep specification")->default_str("none");
      c.app->add_flag("--json", c.json, "machine-readable JSON output")->default_str("false");
    } else {
      add_common(c, true);
    }
    for (const Flag& f : flag_table().at(name)) {
      std::string* slot = &c.values[f.name];
      c.app->add_option("--" + f.name, *slot, f.help)->default_str(f.fallback);
    }
  }

  app.set_help_flag("-h,--help", "print this help message and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report(Failure{1, e.what(), unexpected_field(e)});
    return 1;
  }

  try {
    for (auto& [name, c] : commands) {
      if (!c.app->parsed()) continue;
      // Only flags actually given override the config.
      for (const Flag& f : flag_table().at(name))
        if (c.app->get_option("--" + f.name)->count() == 0) c.values.erase(f.name);
      if (name == "analyze") return run(name, mw_analyze, c);
      if (name == "weyl") return run(name, mw_weyl, c);
      if (name == "count") return run(name, mw_count, c);
      if (name == "reduce") return run(name, mw_reduce, c);
      return run(name, mw_sweep, c);
    }
  } catch (const Failure& f) {
    report(f);
    return f.code;
  } catch (const std::exception& e) {
    report(Failure{2, e.what(), ""});
    return 2;
  }
  return 1;
}
