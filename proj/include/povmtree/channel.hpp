#pragma once

// One partial measurement: couple the system mode to an ancilla on a beam
// splitter, apply the tunable unitary to the ancilla and detect it. Seen
// from the system mode this is a Kraus channel per outcome.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "povmtree/elements.hpp"
#include "povmtree/fock.hpp"

namespace povmtree {

/// Probabilities below this mark an outcome as unreachable.
inline constexpr double kUnreachableProbability = 1e-14;

class MeasurementStep {
 public:
  /// The ancilla defaults to vacuum. All parts must share one Fock dimension.
  MeasurementStep(UnitaryFamily unitary, PovmFamily povm, double transmission,
                  std::optional<DensityMatrix> ancilla = std::nullopt);

  const UnitaryFamily& unitary() const { return unitary_; }
  const PovmFamily& povm() const { return povm_; }
  double transmission() const { return transmission_; }
  const DensityMatrix& ancilla() const { return ancilla_; }
  const ComplexMatrix& splitter() const { return splitter_; }
  std::size_t dim() const { return unitary_.dim(); }
  std::size_t outcomes() const { return povm_.outcomes(); }

 private:
  UnitaryFamily unitary_;
  PovmFamily povm_;
  double transmission_;
  DensityMatrix ancilla_;
  ComplexMatrix splitter_;
};

/// Builds one step per level from a shared unitary family and detector,
/// using the equal-splitting transmission schedule.
std::vector<MeasurementStep> uniform_steps(const UnitaryFamily& unitary,
                                           const PovmFamily& povm, int depth);

/// K_{i,j} = <i| (I (x) sqrt(Pi_mu) A_tau) B_t |j>, with the bra and ket on
/// the ancilla mode. Returns a dim x dim operator on the system mode.
ComplexMatrix kraus(const MeasurementStep& step, double tau,
                    std::size_t outcome, std::size_t out_index,
                    std::size_t in_index);

/// Kraus operators and effects of a step at one parameter value.
///
/// Only the ancilla matrix elements that are non-zero contribute, so the
/// default vacuum ancilla reduces to the single sum over K_{i,0}.
class StepOperators {
 public:
  StepOperators(const MeasurementStep& step, double tau);

  double tau() const { return tau_; }
  std::size_t outcomes() const { return effects_.size(); }

  /// sum_{i,n,m} <n|rho_anc|m> K_{i,n} rho K_{i,m}^dag, not normalized.
  ComplexMatrix apply_unnormalized(std::size_t outcome,
                                   const ComplexMatrix& rho) const;

  /// Effect operator E with Tr(E rho) the probability of `outcome`.
  const ComplexMatrix& effect(std::size_t outcome) const {
    return effects_.at(outcome);
  }

  /// Conditional probability of `outcome` for rho (normalized by its trace).
  double probability(std::size_t outcome, const ComplexMatrix& rho) const;

 private:
  struct AncillaTerm {
    Complex weight;
    std::size_t left;   // slot of K_{i,n}
    std::size_t right;  // slot of K_{i,m}
  };

  double tau_;
  std::size_t dim_;
  std::vector<AncillaTerm> terms_;
  // kraus_[outcome][slot][i] = K_{i, in_indices_[slot]}
  std::vector<std::vector<std::vector<ComplexMatrix>>> kraus_;
  std::vector<ComplexMatrix> effects_;
};

struct StepOutcome {
  double probability = 0.0;
  std::optional<DensityMatrix> state;  // normalized; empty when unreachable

  bool reachable() const { return state.has_value(); }
};

StepOutcome apply_step(const StepOperators& ops, std::size_t outcome,
                       const DensityMatrix& rho);
StepOutcome apply_step(const MeasurementStep& step, double tau,
                       std::size_t outcome, const DensityMatrix& rho);

/// Sequence of outcomes mu^(1)..mu^(k), stored 0-based. The leaf index is
/// 1-based with mu^(1) as the most significant base-M digit.
struct Branch {
  std::vector<std::size_t> outcomes;

  std::uint64_t leaf_index(std::size_t outcome_count) const;
  static Branch from_leaf_index(std::uint64_t leaf, std::size_t outcome_count,
                                std::size_t depth);
  /// 0-based outcome digits, e.g. "0101".
  std::string label() const;
};

/// prior * prod_k p(mu^(k) | state after k - 1 steps). Returns 0 as soon as
/// an outcome along the branch is unreachable.
double branch_probability(std::span<const MeasurementStep> steps,
                          std::span<const double> taus, const Branch& branch,
                          const DensityMatrix& initial, double prior);

}  // namespace povmtree
