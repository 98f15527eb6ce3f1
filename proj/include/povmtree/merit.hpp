#pragma once

// Figures of merit over joint leaf tables (row c, column l), and the
// effective POVM recovered by summing branch superoperators.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "povmtree/fock.hpp"
#include "povmtree/tree.hpp"

namespace povmtree {

/// Whether the c != c' sum in the distinguishability runs over ordered
/// pairs (both (1,2) and (2,1)) or unordered ones.
enum class PairConvention { kOrdered, kUnordered };

/// How inconclusive (tied) leaves enter the discrimination error.
enum class InconclusivePolicy { kCountAsError, kDiscard };

/// sum_x sqrt(p(x) q(x)).
double bhattacharyya(std::span<const double> p, std::span<const double> q);

/// sqrt(1 - sum_{c != c'} pi_c pi_c' sum_l sqrt(P_c(l) P_c'(l))) for joint
/// probabilities P and priors pi. The radicand is clamped at zero.
double distinguishability(const Eigen::MatrixXd& joint,
                          std::span<const double> priors,
                          PairConvention pairs = PairConvention::kOrdered);

/// Mean min-to-max ratio; two candidates only. Leaves where every row is
/// zero contribute nothing.
double min_to_max(const Eigen::MatrixXd& joint);

/// Probability of misidentifying one of two candidates under the
/// maximum-likelihood leaf assignment.
double discrimination_error(
    const Eigen::MatrixXd& joint,
    InconclusivePolicy policy = InconclusivePolicy::kCountAsError);

/// 1 - Tr(rho1 rho2).
double orthogonality(const DensityMatrix& a, const DensityMatrix& b);

struct EffectivePovmElement {
  ComplexMatrix op;
  bool empty_leaf_set = false;
};

/// Sum over the leaves assigned to `candidate` of the unnormalized state
/// reached along each branch from that candidate's initial state. Its trace
/// is the probability of correctly identifying the candidate.
EffectivePovmElement reconstruct_effective_povm(const DecisionTree& tree,
                                                std::size_t candidate);

struct MeritOptions {
  PairConvention pairs = PairConvention::kOrdered;
  InconclusivePolicy inconclusive = InconclusivePolicy::kCountAsError;
};

struct MeritReport {
  double distinguishability = 0.0;
  std::optional<double> min_to_max;  // two candidates only
  std::optional<double> error;       // two candidates only
  Eigen::MatrixXd orthogonality;     // pairwise over the initial pool
  double pruned_mass = 0.0;
};

MeritReport evaluate(const DecisionTree& tree, const CandidatePool& pool,
                     const MeritOptions& options = {});

}  // namespace povmtree
