#include "povmtree/merit.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "povmtree/errors.hpp"

namespace povmtree {

namespace {

void require_two_rows(const Eigen::MatrixXd& joint, const char* what) {
  if (joint.rows() != 2) {
    throw ValidationError(std::string(what) +
                          ": defined for two candidates only, got " +
                          std::to_string(joint.rows()));
  }
}

}  // namespace

double bhattacharyya(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) {
    throw DimensionError("bhattacharyya: distributions differ in length");
  }
  double sum = 0.0;
  for (std::size_t x = 0; x < p.size(); ++x) {
    sum += std::sqrt(std::max(p[x], 0.0) * std::max(q[x], 0.0));
  }
  return sum;
}

double distinguishability(const Eigen::MatrixXd& joint,
                          std::span<const double> priors,
                          PairConvention pairs) {
  if (static_cast<std::size_t>(joint.rows()) != priors.size()) {
    throw DimensionError("distinguishability: one prior per row required");
  }
  const Eigen::MatrixXd roots = joint.cwiseMax(0.0).cwiseSqrt();
  double overlap = 0.0;
  for (Eigen::Index c = 0; c < joint.rows(); ++c) {
    for (Eigen::Index other = c + 1; other < joint.rows(); ++other) {
      const double bc = roots.row(c).dot(roots.row(other));
      overlap += priors[static_cast<std::size_t>(c)] *
                 priors[static_cast<std::size_t>(other)] * bc;
    }
  }
  if (pairs == PairConvention::kOrdered) overlap *= 2.0;
  return std::sqrt(std::max(0.0, 1.0 - overlap));
}

double min_to_max(const Eigen::MatrixXd& joint) {
  require_two_rows(joint, "min_to_max");
  double sum = 0.0;
  for (Eigen::Index l = 0; l < joint.cols(); ++l) {
    const double hi = joint.col(l).maxCoeff();
    if (hi <= 0.0) continue;
    sum += joint.col(l).sum() * joint.col(l).minCoeff() / hi;
  }
  return sum;
}

double discrimination_error(const Eigen::MatrixXd& joint,
                            InconclusivePolicy policy) {
  require_two_rows(joint, "discrimination_error");
  const LeafSets sets = assign_leaf_sets(joint);
  double error = 0.0;
  // Leaves in L_1 misidentify candidate 2, and vice versa.
  for (std::size_t l : sets.by_candidate[0]) {
    error += joint(1, static_cast<Eigen::Index>(l));
  }
  for (std::size_t l : sets.by_candidate[1]) {
    error += joint(0, static_cast<Eigen::Index>(l));
  }
  if (policy == InconclusivePolicy::kCountAsError) {
    for (std::size_t l : sets.inconclusive) {
      error += joint.col(static_cast<Eigen::Index>(l)).sum();
    }
  }
  return std::clamp(error, 0.0, 1.0);
}

double orthogonality(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim()) {
    throw DimensionError("orthogonality: states differ in dimension");
  }
  return 1.0 - (a.matrix() * b.matrix()).trace().real();
}

EffectivePovmElement reconstruct_effective_povm(const DecisionTree& tree,
                                                std::size_t candidate) {
  if (candidate >= tree.candidates()) {
    throw ValidationError("reconstruct_effective_povm: candidate " +
                          std::to_string(candidate) + " out of range");
  }
  const LeafTable table = leaf_distributions(tree);
  const LeafSets sets = assign_leaf_sets(table.joint);
  const auto& assigned = sets.by_candidate[candidate];
  const auto d = static_cast<Eigen::Index>(tree.root().states.front()->dim());
  EffectivePovmElement out{ComplexMatrix::Zero(d, d), assigned.empty()};
  const double prior = tree.priors()[candidate];
  if (prior <= 0.0) return out;
  std::vector<char> in_set(table.leaves(), 0);
  for (std::size_t l : assigned) in_set[l] = 1;
  for (const auto& node : tree.nodes()) {
    if (node.kind != NodeKind::kLeaf || !in_set[node.position - 1]) continue;
    const auto& state = node.states[candidate];
    if (!state) continue;
    out.op += (node.probs[candidate] / prior) * state->matrix();
  }
  return out;
}

MeritReport evaluate(const DecisionTree& tree, const CandidatePool& pool,
                     const MeritOptions& options) {
  const LeafTable table = leaf_distributions(tree);
  MeritReport report;
  report.distinguishability =
      distinguishability(table.joint, tree.priors(), options.pairs);
  if (tree.candidates() == 2) {
    report.min_to_max = min_to_max(table.joint);
    report.error = discrimination_error(table.joint, options.inconclusive);
  }
  const auto c = static_cast<Eigen::Index>(pool.size());
  report.orthogonality = Eigen::MatrixXd::Zero(c, c);
  for (Eigen::Index i = 0; i < c; ++i) {
    for (Eigen::Index j = 0; j < c; ++j) {
      report.orthogonality(i, j) =
          orthogonality(pool.states[static_cast<std::size_t>(i)],
                        pool.states[static_cast<std::size_t>(j)]);
    }
  }
  report.pruned_mass = table.total_pruned();
  return report;
}

}  // namespace povmtree
