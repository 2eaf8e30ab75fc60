#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "commands.hpp"
#include "config.hpp"

int main(int argc, char** argv) {
  CLI::App app{"qtomo: injectivity, variety and recovery experiments for phaseless unitary measurements"};
  app.require_subcommand(1);

  struct Args {
    std::string config_file;
    std::string out;
    std::string seed;
    std::vector<std::string> settings;
  };
  std::vector<Args> args(qtomo::cli::command_names().size());
  std::vector<CLI::App*> subs;
  for (std::size_t k = 0; k < args.size(); ++k) {
    const auto& name = qtomo::cli::command_names()[k];
    auto* sub = app.add_subcommand(name, "run the " + name + " experiment");
    sub->add_option("-c,--config", args[k].config_file, "key=value config file");
    sub->add_option("-o,--out", args[k].out, "output path (default: stdout)");
    sub->add_option("-s,--seed", args[k].seed, "random seed");
    sub->add_option("settings", args[k].settings, "key=value overrides");
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : qtomo::cli::kExitError;
  }

  for (std::size_t k = 0; k < subs.size(); ++k) {
    if (!subs[k]->parsed()) continue;
    qtomo::cli::ExperimentConfig config;
    try {
      if (const char* env = std::getenv("QTOMO_SEED")) config.set("seed", env);
      if (!args[k].config_file.empty()) config.load_file(args[k].config_file);
      for (const auto& s : args[k].settings) config.set(s);
      if (!args[k].seed.empty()) config.set("seed", args[k].seed);
      if (!args[k].out.empty()) config.set("out", args[k].out);
    } catch (const std::exception& ex) {
      std::cerr << "qtomo: " << ex.what() << "\n";
      return qtomo::cli::kExitError;
    }
    return qtomo::cli::run_and_write(qtomo::cli::command_names()[k], config, std::cout, std::cerr);
  }
  return qtomo::cli::kExitError;
}
