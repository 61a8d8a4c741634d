#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "commands.hpp"

using namespace dampwave::cli;

int main(int argc, char** argv) {
  CLI::App app{"Damped wave equation experiments on flat tori"};
  app.require_subcommand(1);

  std::string config_path;
  RunOptions opts;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* c = sub->add_option("--config", config_path, "YAML config file")->check(CLI::ExistingFile);
    if (needs_config) c->required();
    sub->add_option("--out", opts.out, "output directory")->capture_default_str();
    sub->add_option_function<std::uint64_t>("--seed", [&](std::uint64_t s) { seed = s, seed_given = true; },
                                            "seed for random initial data (default: config seed or 1)");
    sub->add_option("--threads", threads, "sweep worker threads")->check(CLI::PositiveNumber);
  };

  for (const char* name : {"simulate", "sigma", "tgcc", "beam", "observe", "fit", "sweep"}) {
    add_common(app.add_subcommand(name, std::string("run the ") + name + " command"), true);
  }
  std::string experiment;
  auto* reproduce = app.add_subcommand("reproduce", "run a named reproduction experiment");
  reproduce->add_option("name", experiment, "experiment name (see list-experiments)")->required();
  add_common(reproduce, false);
  app.add_subcommand("list-experiments", "list the named experiments");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ExitCode::ok : ExitCode::config_error;
  }

  auto* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();
  if (command == "list-experiments") return list_experiments_command(std::cout);

  std::optional<Config> config;
  if (!config_path.empty()) {
    try {
      config = load_config(config_path);
    } catch (const ConfigError& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return ExitCode::config_error;
    }
  }
  opts.seed = seed_given ? seed : (config && config->seed ? *config->seed : 1);
  opts.threads = threads;
  return run_command(command, config ? &*config : nullptr, opts, std::cout, experiment);
}
