#pragma once

// Class-probability decision tree over partial measurement outcomes.
//
// Node (k, nu) sits at level k (root k = 0) and horizontal position
// nu in 1..M^k; child mu (0-based) of (k, nu) is (k + 1, (nu - 1) M + mu + 1).
// Leaves at level N are labelled l = nu.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "povmtree/channel.hpp"
#include "povmtree/elements.hpp"

namespace povmtree {

inline constexpr double kDefaultPruneThreshold = 1e-6;

enum class NodeKind { kInternal, kLeaf, kPruned };

struct TreeNode {
  int level = 0;
  std::uint64_t position = 1;
  NodeKind kind = NodeKind::kLeaf;
  /// Normalized conditional state per candidate; empty once unreachable.
  std::vector<std::optional<DensityMatrix>> states;
  /// Joint probability of candidate c and of reaching this node.
  std::vector<double> probs;
  std::optional<double> tau;
  std::optional<double> transmission;
  std::optional<std::size_t> parent;
  std::optional<std::size_t> outcome;  // 0-based, from the parent
  std::vector<std::size_t> children;

  double mass() const;
  /// True when no candidate can reach this node.
  bool dead() const;
};

class DecisionTree {
 public:
  DecisionTree(std::vector<TreeNode> nodes, std::size_t depth,
               std::size_t outcomes, std::vector<double> priors);

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  const TreeNode& node(std::size_t index) const { return nodes_.at(index); }
  const TreeNode& root() const { return nodes_.front(); }
  std::size_t depth() const { return depth_; }
  std::size_t outcomes() const { return outcomes_; }
  std::size_t candidates() const { return priors_.size(); }
  const std::vector<double>& priors() const { return priors_; }

  std::size_t leaf_count() const;
  std::size_t internal_count() const;
  std::optional<std::size_t> find(int level, std::uint64_t position) const;

 private:
  std::vector<TreeNode> nodes_;  // pre-order
  std::size_t depth_;
  std::size_t outcomes_;
  std::vector<double> priors_;
};

/// Chooses tau for an internal node given the step applied at that node.
using NodeOptimizer =
    std::function<double(const TreeNode& node, const MeasurementStep& step)>;

NodeOptimizer constant_parameter(double tau);

/// Looks tau up by (level, position); throws if a node is missing.
using ParameterTable = std::map<std::pair<int, std::uint64_t>, double>;
NodeOptimizer parameter_lookup(ParameterTable table);

/// The M children of `node` after applying `step` at `tau`. Candidates whose
/// outcome is unreachable get an empty state and zero probability.
std::vector<TreeNode> expand(const TreeNode& node, const MeasurementStep& step,
                             double tau);
std::vector<TreeNode> expand(const TreeNode& node, const MeasurementStep& step,
                             const StepOperators& ops);

TreeNode root_node(const CandidatePool& pool);

/// Pre-order construction: fix tau at a node, then visit its children left
/// to right. Nodes whose mass is below `prune_threshold` become pruned
/// leaves; dead nodes are expanded without consulting the optimizer.
DecisionTree build(const CandidatePool& pool,
                   std::span<const MeasurementStep> steps,
                   const NodeOptimizer& optimizer,
                   double prune_threshold = kDefaultPruneThreshold);

/// Joint leaf probabilities p_c(mu_l): row c, column l - 1. Mass stranded in
/// pruned nodes is reported per candidate instead.
struct LeafTable {
  Eigen::MatrixXd joint;
  std::vector<double> pruned_mass;

  std::size_t candidates() const {
    return static_cast<std::size_t>(joint.rows());
  }
  std::size_t leaves() const { return static_cast<std::size_t>(joint.cols()); }
  double total_pruned() const;
};

LeafTable leaf_distributions(const DecisionTree& tree);

/// Maximum-likelihood leaf sets. Column l belongs to L_c when p_c is larger
/// than every other row by more than kTieTolerance; otherwise it is
/// inconclusive. Indices are 0-based columns.
struct LeafSets {
  std::vector<std::vector<std::size_t>> by_candidate;
  std::vector<std::size_t> inconclusive;
};

inline constexpr double kTieTolerance = 1e-12;

LeafSets assign_leaf_sets(const Eigen::MatrixXd& joint);

}  // namespace povmtree
