// qlflow verify|trajectories|field|figure [--config PATH] [--t REAL] [--out DIR] [--figure N]

#include <iostream>

#include "CLI11.hpp"
#include "qlflow/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Separated-variables Euler flows: verification, trajectories and fields"};
  qlflow::Invocation inv;
  app.add_option("command", inv.command, "verify, trajectories, field or figure")
      ->required()
      ->check(CLI::IsMember({"verify", "trajectories", "field", "figure"}));
  app.add_option("--config", inv.config_path, "JSON configuration file");
  app.add_option("--t", inv.t, "time for the field command (default: field.t from the config)");
  app.add_option("--out", inv.out_dir, "output directory (default: output.directory from the config)");
  app.add_option("--figure", inv.figure, "built-in figure configuration")->check(CLI::Range(1, 4));
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return qlflow::kExitConfig;
  }
  return qlflow::run(inv, std::cout, std::cerr);
}
