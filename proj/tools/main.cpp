// Command-line front end: run, validate and cost subcommands over a JSON
// experiment config.

#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "povmtree/errors.hpp"
#include "povmtree/experiment.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitBudget = 3;
constexpr int kExitFailure = 1;

int do_run(const std::string& path, bool quiet) {
  const auto config = povmtree::load_config(path);
  const auto rows = povmtree::run(config);
  if (!quiet) std::cout << povmtree::format_results(rows);
  return 0;
}

int do_validate(const std::string& path) {
  const auto config = povmtree::load_config(path);
  std::cout << "ok: " << povmtree::cells(config).size() << " cells\n";
  return 0;
}

int do_cost(const std::string& path) {
  const auto config = povmtree::load_config(path);
  std::cout << povmtree::format_cost(config, povmtree::cost_report(config));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Design and simulate adaptive measurement decision trees"};
  app.require_subcommand(1);

  std::string run_path;
  bool quiet = false;
  auto* run = app.add_subcommand("run", "Build trees for every (N, eta) cell and write artifacts");
  run->add_option("config", run_path, "Experiment config (JSON)")->required();
  run->add_flag("-q,--quiet", quiet, "Do not echo the results table");

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Check a config without running it");
  validate->add_option("config", validate_path, "Experiment config (JSON)")->required();

  std::string cost_path;
  auto* cost = app.add_subcommand("cost", "Print search cost per depth without running");
  cost->add_option("config", cost_path, "Experiment config (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitValidation;
  }

  try {
    if (*run) return do_run(run_path, quiet);
    if (*validate) return do_validate(validate_path);
    if (*cost) return do_cost(cost_path);
  } catch (const povmtree::BudgetExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBudget;
  } catch (const povmtree::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const povmtree::DimensionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}
