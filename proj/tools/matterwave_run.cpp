// Config-driven runner for the matterwave library.
//
//   matterwave-run run   <config.json> [--out-dir DIR] [--format csv|json|both] [--quiet]
//   matterwave-run check <config.json>
//   matterwave-run sweep <config.json> --param lens.E0 --values "1e4 V/m,2e4 V/m"
//
// Exit codes: 0 ok, 2 config error, 3 numerical guard, 4 I/O error.

#include <CLI11.hpp>

#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <future>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "matterwave/io/experiment.hpp"

namespace {

namespace fs = std::filesystem;
using namespace matterwave;

enum ExitCode { ok = 0, config_error = 2, guard_error = 3, io_error = 4 };

struct Options {
  std::string config;
  std::string out_dir;
  std::string format;
  bool quiet = false;
  std::string param;
  std::string values;
  bool parallel = false;
};

fs::path output_dir(const Options& opt, const io::ScenarioConfig& cfg) {
  if (!opt.out_dir.empty()) return opt.out_dir;
  if (const char* env = std::getenv("MATTERWAVE_OUT_DIR"); env && *env) return env;
  return cfg.output.dir;
}

void apply_format(const Options& opt, io::ScenarioConfig& cfg) {
  if (opt.format == "csv") cfg.output.format = io::OutputFormat::csv;
  if (opt.format == "json") cfg.output.format = io::OutputFormat::json;
  if (opt.format == "both") cfg.output.format = io::OutputFormat::both;
}

void print_summary(const io::RunResult& result, const fs::path& dir) {
  std::cout << "experiment: " << result.summary["experiment"].get<std::string>() << "\n";
  for (const auto& [key, value] : result.summary["si"].items()) std::cout << "  " << key << " = " << value.dump() << "\n";
  for (const auto& w : result.summary["warnings"]) std::cout << "  warning: " << w.get<std::string>() << "\n";
  std::cout << "output: " << dir.string() << "\n";
}

int run(const Options& opt) {
  auto cfg = io::load_config(opt.config);
  apply_format(opt, cfg);
  const auto dir = output_dir(opt, cfg);
  const auto result = io::run_experiment(cfg, dir);
  if (!opt.quiet) print_summary(result, dir);
  return ok;
}

int check(const Options& opt) {
  const auto cfg = io::load_config(opt.config);
  const auto scenario = io::resolve(cfg);
  if (!opt.quiet) std::cout << io::provenance(scenario).dump(2) << "\n";
  return ok;
}

std::vector<std::string> split_values(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto first = item.find_first_not_of(' ');
    const auto last = item.find_last_not_of(' ');
    if (first != std::string::npos) out.push_back(item.substr(first, last - first + 1));
  }
  if (out.empty()) throw ConfigError("--values: expected a comma-separated list");
  return out;
}

std::string directory_name(const std::string& param, const std::string& value) {
  std::string name = param + "=";
  for (const char ch : value) name += (std::isalnum(static_cast<unsigned char>(ch)) || ch == '.' || ch == '-' || ch == '+') ? ch : '_';
  return name;
}

io::Json with_value(io::Json doc, const std::string& param, const std::string& value) {
  io::Json* node = &doc;
  std::stringstream path(param);
  std::string key;
  std::vector<std::string> keys;
  while (std::getline(path, key, '.')) keys.push_back(key);
  if (keys.empty()) throw ConfigError("--param: empty key");
  for (std::size_t i = 0; i + 1 < keys.size(); ++i) {
    if (!node->is_object()) throw ConfigError("--param: " + param + " does not name an object field");
    node = &(*node)[keys[i]];
  }
  // Numbers and literals are taken as JSON; anything else is a quantity string.
  io::Json parsed = io::Json::parse(value, nullptr, false);
  (*node)[keys.back()] = parsed.is_discarded() ? io::Json(value) : parsed;
  return doc;
}

int sweep(const Options& opt) {
  auto base = io::load_config(opt.config);
  const auto doc = base.source;
  const auto values = split_values(opt.values);
  const fs::path root = output_dir(opt, base);

  std::vector<io::ScenarioConfig> configs;
  for (const auto& v : values) {
    auto cfg = io::parse_config(with_value(doc, opt.param, v));
    apply_format(opt, cfg);
    configs.push_back(std::move(cfg));
  }

  auto job = [&](std::size_t i) { return io::run_experiment(configs[i], root / directory_name(opt.param, values[i])); };
  std::vector<io::RunResult> results;
  if (opt.parallel) {
    std::vector<std::future<io::RunResult>> futures;
    for (std::size_t i = 0; i < configs.size(); ++i) futures.push_back(std::async(std::launch::async, job, i));
    for (auto& f : futures) results.push_back(f.get());
  } else {
    for (std::size_t i = 0; i < configs.size(); ++i) results.push_back(job(i));
  }

  if (!opt.quiet) {
    for (std::size_t i = 0; i < results.size(); ++i) {
      std::cout << "== " << opt.param << " = " << values[i] << "\n";
      print_summary(results[i], root / directory_name(opt.param, values[i]));
    }
  }
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Matter-wave space-time imaging simulator"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", opt.config, "Scenario file (JSON)")->required();
    sub->add_flag("--quiet,-q", opt.quiet, "Suppress the summary printout");
  };
  auto add_output = [&](CLI::App* sub) {
    sub->add_option("--out-dir,-o", opt.out_dir, "Output directory (overrides config and MATTERWAVE_OUT_DIR)");
    sub->add_option("--format", opt.format, "Envelope dump format")->check(CLI::IsMember({"csv", "json", "both"}));
  };

  auto* run_cmd = app.add_subcommand("run", "Run the configured experiment");
  add_common(run_cmd);
  add_output(run_cmd);
  auto* check_cmd = app.add_subcommand("check", "Validate a config and print derived quantities");
  add_common(check_cmd);
  auto* sweep_cmd = app.add_subcommand("sweep", "Run the experiment once per parameter value");
  add_common(sweep_cmd);
  add_output(sweep_cmd);
  sweep_cmd->add_option("--param", opt.param, "Dotted config key, e.g. lens.E0")->required();
  sweep_cmd->add_option("--values", opt.values, "Comma-separated values")->required();
  sweep_cmd->add_flag("--parallel", opt.parallel, "Run sweep elements concurrently");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : config_error;
  }

  try {
    if (*run_cmd) return run(opt);
    if (*check_cmd) return check(opt);
    return sweep(opt);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return config_error;
  } catch (const InvalidArgument& e) {
    std::cerr << "invalid scenario: " << e.what() << "\n";
    return config_error;
  } catch (const GuardViolation& e) {
    std::cerr << "numerical guard: " << e.what() << "\n";
    return guard_error;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return io_error;
  }
}
