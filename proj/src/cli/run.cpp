#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

#include "csflab/errors.hpp"
#include "internal.hpp"

#ifndef CSFLAB_GIT_DESCRIBE
#define CSFLAB_GIT_DESCRIBE "unknown"
#endif
#ifndef CSFLAB_VERSION
#define CSFLAB_VERSION "0.0.0"
#endif

namespace csflab::cli {

namespace detail {

namespace {

double to_number(const std::string& key, const std::string& text) {
  const char* begin = text.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (text.empty() || end == begin || *end != '\0' || !std::isfinite(v)) {
    throw ConfigError("--" + key + ": '" + text + "' is not a finite number");
  }
  return v;
}

std::int64_t to_integer(const std::string& key, const std::string& text) {
  const double v = to_number(key, text);
  if (v != std::floor(v) || std::fabs(v) > 9.0e15) {
    throw ConfigError("--" + key + ": '" + text + "' is not an integer");
  }
  return static_cast<std::int64_t>(v);
}

}  // namespace

bool Params::has(const std::string& key) const {
  const auto it = values_.find(key);
  return it != values_.end() && !it->second.empty();
}

const std::string& Params::text(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end() || it->second.empty()) throw ConfigError("missing parameter --" + key);
  return it->second;
}

double Params::number(const std::string& key) const { return to_number(key, text(key)); }

double Params::number_or(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

std::int64_t Params::integer(const std::string& key) const { return to_integer(key, text(key)); }

std::int64_t Params::integer_or(const std::string& key, std::int64_t fallback) const {
  return has(key) ? integer(key) : fallback;
}

std::vector<double> Params::grid(const std::string& key) const {
  try {
    return parse_grid(text(key)).values();
  } catch (const ConfigError& e) {
    throw ConfigError("--" + key + ": " + e.what());
  }
}

std::vector<double> Params::grid_or(const std::string& key, const std::string& fallback) const {
  return has(key) ? grid(key) : parse_grid(fallback).values();
}

std::vector<double> Params::list_or(const std::string& key, std::vector<double> fallback) const {
  if (!has(key)) return fallback;
  try {
    return parse_list(text(key));
  } catch (const ConfigError& e) {
    throw ConfigError("--" + key + ": " + e.what());
  }
}

double Params::snr(double default_db) const {
  if (has("snr-db") && has("snr-linear")) {
    throw ConfigError("--snr-db and --snr-linear are mutually exclusive");
  }
  if (has("snr-linear")) return number("snr-linear");
  return std::pow(10.0, number_or("snr-db", default_db) / 10.0);
}

}  // namespace detail

namespace {

using nlohmann::json;

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config file '" + path + "': " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config file '" + path + "' must hold a flat JSON object");
  return j;
}

std::string json_scalar(const std::string& key, const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
  if (v.is_number()) return v.dump();
  throw ConfigError("config key '" + key + "' must be a number or a string");
}

std::uint64_t parse_seed(const std::string& text) {
  std::size_t used = 0;
  std::uint64_t v = 0;
  try {
    v = std::stoull(text, &used, 0);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || text.front() == '-') {
    throw ConfigError("--seed: '" + text + "' is not a non-negative integer");
  }
  return v;
}

int parse_jobs(const std::string& text, const std::string& origin) {
  char* end = nullptr;
  const long v = std::strtol(text.c_str(), &end, 10);
  if (text.empty() || *end != '\0' || v < 1 || v > 1024) {
    throw ConfigError(origin + ": '" + text + "' is not a job count in [1, 1024]");
  }
  return static_cast<int>(v);
}

std::string default_jobs() {
  const char* env = std::getenv("CSF_LAB_JOBS");
  if (env != nullptr && *env != '\0') {
    parse_jobs(env, "CSF_LAB_JOBS");
    return env;
  }
  return "1";
}

struct Leaf {
  const detail::CommandSpec* spec = nullptr;
  CLI::App* app = nullptr;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
};

const std::vector<std::string> kCommon = {"out", "seed", "jobs"};

RunConfig resolve(Leaf& leaf, const std::string& config_path) {
  json file = json::object();
  if (!config_path.empty()) file = load_config(config_path);
  for (const auto& [key, value] : file.items()) {
    if (leaf.options.count(key) == 0) {
      throw ConfigError("config key '" + key + "' is not an option of '" + leaf.spec->path + "'");
    }
  }
  const auto pick = [&](const std::string& key, const std::string& fallback) {
    if (leaf.options.at(key)->count() > 0) return leaf.values.at(key);
    if (file.contains(key)) return json_scalar(key, file.at(key));
    return fallback;
  };
  RunConfig cfg;
  cfg.command = leaf.spec->path;
  for (const auto& p : leaf.spec->params) cfg.params[p.name] = pick(p.name, p.fallback);
  if (leaf.spec->positional_name) cfg.params["name"] = pick("name", "");
  cfg.out_path = pick("out", ".");
  cfg.seed = parse_seed(pick("seed", "1"));
  const bool jobs_given = leaf.options.at("jobs")->count() > 0 || file.contains("jobs");
  cfg.jobs = parse_jobs(pick("jobs", default_jobs()), jobs_given ? "--jobs" : "CSF_LAB_JOBS");
  return cfg;
}

int status_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const DomainError*>(&e) ||
      dynamic_cast<const PreconditionError*>(&e)) {
    return kExitConfig;
  }
  if (dynamic_cast<const InfeasibleError*>(&e) || dynamic_cast<const BracketError*>(&e) ||
      dynamic_cast<const ConvergenceError*>(&e) || dynamic_cast<const BudgetError*>(&e) ||
      dynamic_cast<const QuadratureError*>(&e)) {
    return kExitInfeasible;
  }
  return kExitFailure;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw ConfigError("failed writing '" + path.string() + "'");
}

}  // namespace

std::vector<std::string> execute(const RunConfig& config) {
  const auto& table = detail::command_table();
  const auto it = std::find_if(table.begin(), table.end(),
                               [&](const auto& s) { return s.path == config.command; });
  if (it == table.end()) throw ConfigError("unknown command '" + config.command + "'");

  const auto start = std::chrono::steady_clock::now();
  std::error_code ec;
  std::filesystem::create_directories(config.out_path, ec);
  if (ec || !std::filesystem::is_directory(config.out_path)) {
    throw ConfigError("--out: cannot create directory '" + config.out_path + "'");
  }

  const detail::Context ctx{detail::Params(config.params), config.seed, config.jobs};
  const auto curves = it->fn(ctx);

  std::vector<std::string> written;
  const std::filesystem::path dir(config.out_path);
  for (const auto& c : curves) {
    c.validate();
    const auto path = dir / (c.scheme + ".csv");
    write_file(path, c.to_csv());
    written.push_back(path.string());
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  json manifest;
  manifest["command"] = config.command;
  manifest["inputs"] = config.params;
  manifest["seed"] = config.seed;
  manifest["jobs"] = config.jobs;
  manifest["git_describe"] = CSFLAB_GIT_DESCRIBE;
  manifest["version"] = CSFLAB_VERSION;
  manifest["wall_time_s"] = wall;
  manifest["outputs"] = written;
  const auto path = dir / "manifest.json";
  write_file(path, manifest.dump(2) + "\n");
  written.push_back(path.string());
  return written;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Forward rate versus feedback rate trade-offs for multicarrier channels.", "csflab"};
  app.set_version_flag("--version", CSFLAB_VERSION);
  app.require_subcommand(1);

  std::map<std::string, CLI::App*> groups;
  std::vector<std::unique_ptr<Leaf>> leaves;
  std::string config_path;

  for (const auto& spec : detail::command_table()) {
    CLI::App* parent = &app;
    std::string name = spec.path;
    const auto space = name.find(' ');
    if (space != std::string::npos) {
      const std::string group = name.substr(0, space);
      name = name.substr(space + 1);
      auto& g = groups[group];
      if (g == nullptr) {
        g = app.add_subcommand(group, group + " commands");
        g->require_subcommand(1);
      }
      parent = g;
    }
    auto leaf = std::make_unique<Leaf>();
    leaf->spec = &spec;
    leaf->app = parent->add_subcommand(name, spec.description);
    for (const auto& p : spec.params) {
      std::string help = p.help;
      if (!p.fallback.empty()) help += " (default " + p.fallback + ")";
      leaf->options[p.name] = leaf->app->add_option("--" + p.name, leaf->values[p.name], help);
    }
    if (spec.positional_name) {
      leaf->options["name"] = leaf->app->add_option("name", leaf->values["name"], "figure name");
    }
    leaf->options["out"] = leaf->app->add_option("--out", leaf->values["out"], "output directory (default .)");
    leaf->options["seed"] = leaf->app->add_option("--seed", leaf->values["seed"], "random seed (default 1)");
    leaf->options["jobs"] = leaf->app->add_option("--jobs", leaf->values["jobs"],
                                                  "worker threads (default $CSF_LAB_JOBS or 1)");
    leaf->app->add_option("--config", config_path, "flat JSON file with the same keys as the flags");
    leaves.push_back(std::move(leaf));
  }

  std::vector<std::string> argv_store{"csflab"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  Leaf* chosen = nullptr;
  for (auto& l : leaves) {
    if (l->app->parsed()) chosen = l.get();
  }
  if (chosen == nullptr) {
    err << "csflab: no command given\n";
    return kExitConfig;
  }
  if (chosen->spec->positional_name && chosen->options["name"]->count() == 0 && config_path.empty()) {
    err << "csflab: error: " << chosen->spec->path << " needs a name\n";
    return kExitConfig;
  }

  try {
    const RunConfig cfg = resolve(*chosen, config_path);
    for (const auto& path : execute(cfg)) out << path << '\n';
    return kExitOk;
  } catch (const std::exception& e) {
    err << "csflab: error: " << e.what() << '\n';
    return status_for(e);
  }
}

}  // namespace csflab::cli
