#pragma once

// Experiment configuration, orchestration over (N, eta) cells, and the text
// artifacts written per run: a results table, tree dumps and leaf
// histograms. The config schema is documented in README.md.

#include <complex>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "povmtree/elements.hpp"
#include "povmtree/merit.hpp"
#include "povmtree/optimize.hpp"
#include "povmtree/tree.hpp"

namespace povmtree {

enum class OptimizerKind { kGreedy, kExhaustive };

struct PoolConfig {
  std::optional<int> count;                       // qubit pool of this size
  std::vector<std::vector<Complex>> kets;         // or explicit pure states
  std::vector<double> priors;                     // empty means uniform
};

struct UnitaryConfig {
  UnitaryKind kind = UnitaryKind::kRotation;
  std::optional<ParameterRange> range;            // family default if unset
  std::optional<std::size_t> samples;             // 40 rotation, 10 displacement
  RotationForm rotation_form = RotationForm::kUnitary;
};

struct DetectorConfig {
  DetectorKind kind = DetectorKind::kApd;
  std::vector<double> efficiencies{1.0};
  int saturation = 1;
  double quadrature_scale = 1.0;
};

struct OutputConfig {
  std::filesystem::path directory = "out";
  std::string results = "results.csv";
  bool trees = true;
  bool histograms = true;
};

struct ExperimentConfig {
  PoolConfig pool;
  UnitaryConfig unitary;
  DetectorConfig detector;
  std::vector<int> depths;
  std::optional<std::size_t> fock_dim;            // 2 rotation, 12 displacement
  double prune_threshold = kDefaultPruneThreshold;
  RefinePolicy refine;
  Objective objective;
  OptimizerKind optimizer = OptimizerKind::kGreedy;
  double exhaustive_budget = kDefaultExhaustiveBudget;
  unsigned threads = 0;                           // 0 = all cores
  bool report_wall_time = true;
  OutputConfig output;

  std::size_t resolved_fock_dim() const;
  std::size_t resolved_samples() const;
  ParameterRange resolved_range() const;
};

/// Parses a JSON config and validates it. Errors name the offending field.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Checks every element precondition without running anything.
void validate(const ExperimentConfig& config);

CandidatePool make_pool(const ExperimentConfig& config);
UnitaryFamily make_unitary(const ExperimentConfig& config);
PovmFamily make_detector(const ExperimentConfig& config, double efficiency);
std::vector<MeasurementStep> make_steps(const ExperimentConfig& config,
                                        double efficiency, int depth);
SweepGrid make_grid(const ExperimentConfig& config);

struct Cell {
  int depth = 1;
  double efficiency = 1.0;
};

/// Cells in row order: depths outer, efficiencies inner.
std::vector<Cell> cells(const ExperimentConfig& config);

struct ResultRow {
  int depth = 1;
  double efficiency = 1.0;
  std::string detector;
  std::string unitary;
  double distinguishability = 0.0;
  std::optional<double> min_to_max;
  std::optional<double> error;
  double pruned_mass = 0.0;
  double wall_ms = 0.0;
};

struct CellResult {
  Cell cell;
  DecisionTree tree;
  ResultRow row;
};

/// Builds and scores the tree for one cell with the configured optimizer.
CellResult run_cell(const ExperimentConfig& config, const Cell& cell,
                    unsigned threads = 1);

/// Throws BudgetExceeded for the first depth whose global search would
/// exceed the budget. No-op for the greedy optimizer.
void check_budget(const ExperimentConfig& config);

/// Runs every cell and writes all artifacts under the output directory.
std::vector<ResultRow> run(const ExperimentConfig& config);

std::string results_header();
std::string format_row(const ResultRow& row);
std::string format_results(const std::vector<ResultRow>& rows);

/// One JSON record per node ordered by (k, nu): k, nu, tau, t, probs,
/// parent, outcome, kind. parent is given as [k, nu] of the parent node.
std::string dump_tree(const DecisionTree& tree);

/// Reads the (k, nu) -> tau table back from a tree dump.
ParameterTable load_parameters(std::string_view dump);

/// One JSON record per leaf ordered by l: l, outcomes, p.
std::string emit_histogram(const DecisionTree& tree);

std::string cell_stem(const Cell& cell);

struct CostLine {
  int depth = 1;
  double internal_nodes = 0.0;
  double greedy = 0.0;
  double exhaustive = 0.0;
  bool within_budget = true;
};

std::vector<CostLine> cost_report(const ExperimentConfig& config);
std::string format_cost(const ExperimentConfig& config,
                        const std::vector<CostLine>& lines);

}  // namespace povmtree
