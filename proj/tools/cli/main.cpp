#include <CLI11.hpp>

#include <iostream>

#include "commands.hpp"

int main(int argc, char** argv) {
  using namespace tempsep::cli;

  CLI::App app{"Temperature-separation solver for self-consistent photon transport"};
  app.fallthrough();
  app.require_subcommand(1);
  app.set_config("--config", "", "flat key = value file; flags override it");
  app.allow_config_extras(CLI::config_extras_mode::error);

  RunConfig config;
  register_options(app, config);

  struct Entry {
    const char* name;
    const char* help;
    Command command;
  };
  const Entry entries[] = {
      {"derivs", "initial derivatives theta^(n)(0)", cmd_derivs},
      {"cf", "continued fraction coefficients, curves and defect reports", cmd_cf},
      {"solve", "linear transport solve with the selected temperature function", cmd_solve},
      {"verify", "self-consistency and moment-equation checks", cmd_verify},
      {"reproduce", "full pipeline for one scenario", cmd_reproduce},
  };
  Command chosen = nullptr;
  for (const auto& e : entries) {
    app.add_subcommand(e.name, e.help)->callback([&chosen, &e] { chosen = e.command; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }
  return run_guarded(chosen, config, std::cout, std::cerr);
}
