#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cli/commands.hpp"

namespace {

struct Args {
  std::string config;
  std::string out;
  std::int64_t seed = -1;
  std::int64_t workers = -1;
  bool no_timestamp = false;
  std::vector<std::string> overrides;
  std::map<std::string, std::string> shortcuts;  // config key -> raw value
};

// Shortcut flags are sugar for key=value overrides.
const std::vector<std::pair<std::string, std::string>> kShortcuts{
    {"--d", "options.d"},           {"--m", "m"},
    {"--h-expr", "options.h"},          {"--nodes", "grid.nodes"},
    {"--length", "grid.length"},    {"--dt", "dt"},
    {"--T", "T"},                   {"--stride", "stride"},
    {"--diffusions", "diffusions"}, {"--partition", "partition"},
    {"--tol", "options.tol"},       {"--t0", "options.t0"},
    {"--t1", "options.t1"},         {"--spinup", "options.spinup"},
    {"--trials", "options.trials"}, {"--hat", "options.hat_diffusions"},
    {"--around", "options.around"}, {"--radius", "options.radius"},
    {"--count", "options.count"},   {"--sizes", "options.sizes"},
};

void add_common(CLI::App* app, Args& a) {
  app->add_option("--config", a.config, "scenario JSON file");
  app->add_option("--out", a.out, "output directory");
  app->add_option("--seed", a.seed, "random seed (default 42)");
  app->add_option("--workers", a.workers, "worker threads for sweep");
  app->add_flag("--no-timestamp", a.no_timestamp, "omit the timestamp from reports");
  for (const auto& [flag, key] : kShortcuts) {
    app->add_option_function<std::string>(
        flag, [&a, key = key](const std::string& v) { a.shortcuts[key] = v; },
        "sets " + key);
  }
  app->add_option("overrides", a.overrides, "key=value config overrides");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Diffusive Lotka-Volterra competition laboratory"};
  app.require_subcommand(1);
  Args args;
  std::string experiment;

  CLI::App* run = app.add_subcommand("run", "run the experiment named in the config");
  add_common(run, args);
  const std::vector<std::pair<std::string, std::string>> commands{
      {"steady", "single-species steady state theta_d"},
      {"eigen", "principal eigenpair of -d Delta - h"},
      {"bundle", "normalised principal bundle and separation rate"},
      {"exclusion", "N-species exclusion experiment"},
      {"closeness", "aggregated-semiflow closeness"},
      {"invasion", "invasion eigenvalue matrix"},
      {"morse2", "two-species Morse picture check"},
      {"sweep", "exclusion sweep over Hausdorff-close diffusion sets"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common(sub, args);
    sub->callback([&experiment, name = name] { experiment = name; });
  }

  CLI11_PARSE(app, argc, argv);

  std::vector<std::string> overrides;
  if (!experiment.empty()) overrides.push_back("experiment=\"" + experiment + "\"");
  for (const auto& [key, value] : args.shortcuts) overrides.push_back(key + "=" + value);
  overrides.insert(overrides.end(), args.overrides.begin(), args.overrides.end());

  lvlab::cli::RunOptions opts;
  if (!args.out.empty()) opts.out_dir = args.out;
  if (args.seed >= 0) opts.seed = static_cast<std::uint64_t>(args.seed);
  if (args.workers > 0) opts.workers = static_cast<std::size_t>(args.workers);
  opts.timestamp = !args.no_timestamp;
  return lvlab::cli::run(args.config, overrides, opts, std::cout, std::cerr);
}
