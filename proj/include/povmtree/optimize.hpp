#pragma once

// Parameter search for the decision tree: per-node grid sweeps with mesh
// doubling (greedy, pre-order) and a brute-force global search used as the
// reference optimum.

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "povmtree/channel.hpp"
#include "povmtree/elements.hpp"
#include "povmtree/merit.hpp"
#include "povmtree/tree.hpp"

namespace povmtree {

/// `samples` equidistant points over `range`, both endpoints included.
struct SweepGrid {
  ParameterRange range;
  std::size_t samples = 2;

  static SweepGrid make(ParameterRange range, std::size_t samples);

  std::vector<double> points() const;
  double spacing() const;
  /// Same endpoints, twice the samples.
  SweepGrid doubled() const { return make(range, 2 * samples); }
};

struct RefinePolicy {
  int max_rounds = 5;
  double rel_improvement_floor = 1e-4;
};

enum class ObjectiveKind { kDistinguishability, kNegatedMinToMax, kNegatedError };

/// Figure of merit to maximize. R and E are negated so that larger is
/// always better.
struct Objective {
  ObjectiveKind kind = ObjectiveKind::kDistinguishability;
  PairConvention pairs = PairConvention::kOrdered;
  InconclusivePolicy inconclusive = InconclusivePolicy::kCountAsError;

  double score(const Eigen::MatrixXd& joint,
               std::span<const double> priors) const;
};

/// Scores closer than this are treated as equal when choosing tau.
inline constexpr double kScoreTieTolerance = 1e-12;

/// Joint table of the M hypothetical children of `node`, divided by the
/// node's mass (row c, column mu).
Eigen::MatrixXd child_table(const TreeNode& node, const StepOperators& ops);

struct SweepResult {
  double tau = 0.0;
  double score = 0.0;
  std::size_t samples = 0;  // size of the last grid evaluated
  int rounds = 0;           // doublings performed
};

/// Best grid point for the one-step objective. Ties go to the smallest
/// |tau|, then to the smallest tau.
SweepResult sweep_node(const TreeNode& node, const MeasurementStep& step,
                       const SweepGrid& grid, const Objective& objective,
                       std::span<const double> priors, unsigned threads = 1);

/// Repeats the sweep on doubled grids until the relative gain falls below
/// the policy floor or the round limit is hit. Keeps the best point seen.
SweepResult refine(const TreeNode& node, const MeasurementStep& step,
                   const SweepGrid& grid, const RefinePolicy& policy,
                   const Objective& objective, std::span<const double> priors,
                   unsigned threads = 1);

struct GreedyOptions {
  SweepGrid grid;
  RefinePolicy policy;
  Objective objective;
  double prune_threshold = kDefaultPruneThreshold;
  unsigned threads = 1;
};

DecisionTree greedy_build(const CandidatePool& pool,
                          std::span<const MeasurementStep> steps,
                          const GreedyOptions& options);

/// (M^N - 1) / (M - 1).
double internal_node_count(std::size_t depth, std::size_t outcomes);
/// S^((M^N - 1) / (M - 1)) parameter combinations for the global search.
double exhaustive_cost(std::size_t depth, std::size_t outcomes,
                       std::size_t samples);
/// S (M^N - 1) / (M - 1) objective evaluations for one greedy pass.
double greedy_cost(std::size_t depth, std::size_t outcomes,
                   std::size_t samples);

inline constexpr double kDefaultExhaustiveBudget = 1e6;

struct ExhaustiveResult {
  DecisionTree tree;
  double score = 0.0;
  std::vector<double> taus;  // one per internal node, pre-order
  double combinations = 0.0;
};

/// Tries every grid assignment over all internal nodes and keeps the one
/// with the best leaf-level objective. Throws BudgetExceeded when the
/// combination count exceeds `budget`.
ExhaustiveResult exhaustive_build(const CandidatePool& pool,
                                  std::span<const MeasurementStep> steps,
                                  const SweepGrid& grid,
                                  const Objective& objective,
                                  double budget = kDefaultExhaustiveBudget);

/// Leaf-level objective of a complete tree assignment, one tau per internal
/// node in pre-order. Shares no code with the tree builder.
double assignment_score(const CandidatePool& pool,
                        std::span<const MeasurementStep> steps,
                        std::span<const double> taus,
                        const Objective& objective);

}  // namespace povmtree
