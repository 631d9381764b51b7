#include <CLI11.hpp>
#include <iostream>

#include "axon/driver.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Type and shape checker for Axon programs"};
  app.require_subcommand(1);

  std::vector<std::string> check_paths;
  axon::CheckOptions check_options;
  CLI::App* check = app.add_subcommand("check", "Infer and print the signature of every top-level binding");
  check->add_option("files", check_paths, "Axon source files")->required();
  check->add_flag("--json", check_options.json, "Emit a JSON report");
  check->add_flag("--trace", check_options.trace, "Print every solver rule firing");

  std::string solve_path;
  bool solve_trace = false;
  CLI::App* solve = app.add_subcommand("solve", "Solve a constraint file");
  solve->add_option("file", solve_path, "Constraint file")->required();
  solve->add_flag("--trace", solve_trace, "Print every solver rule firing");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  if (check->parsed()) return axon::check_files(check_paths, check_options, std::cout, std::cerr);
  return axon::solve_file(solve_path, solve_trace, std::cout, std::cerr);
}
