#include "povmtree/tree.hpp"

#include <numeric>
#include <string>

#include "povmtree/errors.hpp"

namespace povmtree {

double TreeNode::mass() const {
  return std::accumulate(probs.begin(), probs.end(), 0.0);
}

bool TreeNode::dead() const {
  for (std::size_t c = 0; c < states.size(); ++c) {
    if (states[c] && probs[c] > 0.0) return false;
  }
  return true;
}

DecisionTree::DecisionTree(std::vector<TreeNode> nodes, std::size_t depth,
                           std::size_t outcomes, std::vector<double> priors)
    : nodes_(std::move(nodes)),
      depth_(depth),
      outcomes_(outcomes),
      priors_(std::move(priors)) {
  if (nodes_.empty()) throw ValidationError("tree: no nodes");
}

std::size_t DecisionTree::leaf_count() const {
  std::size_t n = 0;
  for (const auto& node : nodes_) n += node.kind != NodeKind::kInternal;
  return n;
}

std::size_t DecisionTree::internal_count() const {
  return nodes_.size() - leaf_count();
}

std::optional<std::size_t> DecisionTree::find(int level,
                                              std::uint64_t position) const {
  // Descend from the root along the base-M digits of position - 1.
  if (level < 0 || static_cast<std::size_t>(level) > depth_) return std::nullopt;
  std::vector<std::size_t> digits(static_cast<std::size_t>(level));
  std::uint64_t rest = position - 1;
  for (std::size_t k = digits.size(); k-- > 0;) {
    digits[k] = static_cast<std::size_t>(rest % outcomes_);
    rest /= outcomes_;
  }
  if (rest != 0 || position == 0) return std::nullopt;
  std::size_t index = 0;
  for (std::size_t digit : digits) {
    const auto& node = nodes_[index];
    if (node.children.empty()) return std::nullopt;
    index = node.children[digit];
  }
  return index;
}

NodeOptimizer constant_parameter(double tau) {
  return [tau](const TreeNode&, const MeasurementStep&) { return tau; };
}

NodeOptimizer parameter_lookup(ParameterTable table) {
  return [table = std::move(table)](const TreeNode& node,
                                    const MeasurementStep&) {
    auto it = table.find({node.level, node.position});
    if (it == table.end()) {
      throw ValidationError("tree: no parameter for node (" +
                            std::to_string(node.level) + ", " +
                            std::to_string(node.position) + ")");
    }
    return it->second;
  };
}

std::vector<TreeNode> expand(const TreeNode& node, const MeasurementStep& step,
                             double tau) {
  return expand(node, step, StepOperators(step, tau));
}

std::vector<TreeNode> expand(const TreeNode& node, const MeasurementStep& step,
                             const StepOperators& ops) {
  const std::size_t m = step.outcomes();
  const std::size_t candidates = node.probs.size();
  std::vector<TreeNode> children(m);
  for (std::size_t mu = 0; mu < m; ++mu) {
    TreeNode& child = children[mu];
    child.level = node.level + 1;
    child.position = (node.position - 1) * m + mu + 1;
    child.outcome = mu;
    child.states.resize(candidates);
    child.probs.assign(candidates, 0.0);
  }
  for (std::size_t c = 0; c < candidates; ++c) {
    if (!node.states[c] || node.probs[c] <= 0.0) continue;
    for (std::size_t mu = 0; mu < m; ++mu) {
      auto result = apply_step(ops, mu, *node.states[c]);
      if (!result.reachable()) continue;
      children[mu].probs[c] = node.probs[c] * result.probability;
      children[mu].states[c] = std::move(result.state);
    }
  }
  return children;
}

TreeNode root_node(const CandidatePool& pool) {
  TreeNode root;
  root.level = 0;
  root.position = 1;
  root.probs = pool.priors;
  root.states.reserve(pool.size());
  for (const auto& s : pool.states) root.states.emplace_back(s);
  return root;
}

namespace {

struct Builder {
  std::span<const MeasurementStep> steps;
  const NodeOptimizer& optimizer;
  double prune_threshold;
  std::vector<TreeNode> nodes;

  void visit(TreeNode node) {
    const std::size_t index = nodes.size();
    const auto level = static_cast<std::size_t>(node.level);
    if (level == steps.size()) {
      node.kind = NodeKind::kLeaf;
      nodes.push_back(std::move(node));
      return;
    }
    if (node.mass() < prune_threshold) {
      node.kind = NodeKind::kPruned;
      nodes.push_back(std::move(node));
      return;
    }
    const MeasurementStep& step = steps[level];
    node.kind = NodeKind::kInternal;
    node.transmission = step.transmission();
    std::vector<TreeNode> children;
    if (node.dead()) {
      children = expand(node, step, 0.0);
    } else {
      node.tau = optimizer(node, step);
      children = expand(node, step, *node.tau);
    }
    nodes.push_back(std::move(node));
    for (auto& child : children) {
      child.parent = index;
      nodes[index].children.push_back(nodes.size());
      visit(std::move(child));
    }
  }
};

}  // namespace

DecisionTree build(const CandidatePool& pool,
                   std::span<const MeasurementStep> steps,
                   const NodeOptimizer& optimizer, double prune_threshold) {
  pool.validate();
  if (steps.empty()) throw ValidationError("tree: depth must be at least 1");
  const std::size_t m = steps.front().outcomes();
  for (const auto& step : steps) {
    if (step.outcomes() != m) {
      throw ValidationError("tree: all steps must have the same outcome count");
    }
    if (step.dim() != pool.dim()) {
      throw ValidationError("tree: step and pool Fock dimensions differ");
    }
  }
  Builder builder{steps, optimizer, prune_threshold, {}};
  builder.visit(root_node(pool));
  return DecisionTree(std::move(builder.nodes), steps.size(), m, pool.priors);
}

double LeafTable::total_pruned() const {
  return std::accumulate(pruned_mass.begin(), pruned_mass.end(), 0.0);
}

LeafTable leaf_distributions(const DecisionTree& tree) {
  std::uint64_t leaves = 1;
  for (std::size_t k = 0; k < tree.depth(); ++k) leaves *= tree.outcomes();
  const auto c = static_cast<Eigen::Index>(tree.candidates());
  LeafTable table;
  table.joint = Eigen::MatrixXd::Zero(c, static_cast<Eigen::Index>(leaves));
  table.pruned_mass.assign(tree.candidates(), 0.0);
  for (const auto& node : tree.nodes()) {
    if (node.kind == NodeKind::kLeaf) {
      for (Eigen::Index row = 0; row < c; ++row) {
        table.joint(row, static_cast<Eigen::Index>(node.position - 1)) =
            node.probs[static_cast<std::size_t>(row)];
      }
    } else if (node.kind == NodeKind::kPruned) {
      for (std::size_t row = 0; row < tree.candidates(); ++row) {
        table.pruned_mass[row] += node.probs[row];
      }
    }
  }
  return table;
}

LeafSets assign_leaf_sets(const Eigen::MatrixXd& joint) {
  LeafSets sets;
  sets.by_candidate.resize(static_cast<std::size_t>(joint.rows()));
  for (Eigen::Index l = 0; l < joint.cols(); ++l) {
    Eigen::Index best = 0;
    joint.col(l).maxCoeff(&best);
    bool strict = true;
    for (Eigen::Index c = 0; c < joint.rows(); ++c) {
      if (c != best && joint(best, l) - joint(c, l) <= kTieTolerance) {
        strict = false;
        break;
      }
    }
    const auto column = static_cast<std::size_t>(l);
    if (strict) {
      sets.by_candidate[static_cast<std::size_t>(best)].push_back(column);
    } else {
      sets.inconclusive.push_back(column);
    }
  }
  return sets;
}

}  // namespace povmtree
