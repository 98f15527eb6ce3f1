#include "povmtree/channel.hpp"

#include <algorithm>
#include <string>

#include "povmtree/errors.hpp"

namespace povmtree {

namespace {

// Kraus operators K_{i,j} for all i at a fixed ancilla input j, given
// X = sqrt(Pi_mu) A_tau. Entry (a, b) of K_{i,j} is
// sum_c X(i, c) B(a*d + c, b*d + j).
std::vector<ComplexMatrix> kraus_column(const ComplexMatrix& splitter,
                                        const ComplexMatrix& x,
                                        std::size_t dim, std::size_t in_index) {
  const auto d = static_cast<Eigen::Index>(dim);
  const auto j = static_cast<Eigen::Index>(in_index);
  std::vector<ComplexMatrix> out(dim, ComplexMatrix::Zero(d, d));
  ComplexMatrix block(d, d);
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index c = 0; c < d; ++c) {
      for (Eigen::Index b = 0; b < d; ++b) {
        block(c, b) = splitter(a * d + c, b * d + j);
      }
    }
    const ComplexMatrix rows = x * block;
    for (Eigen::Index i = 0; i < d; ++i) {
      out[static_cast<std::size_t>(i)].row(a) = rows.row(i);
    }
  }
  return out;
}

}  // namespace

MeasurementStep::MeasurementStep(UnitaryFamily unitary, PovmFamily povm,
                                 double transmission,
                                 std::optional<DensityMatrix> ancilla)
    : unitary_(std::move(unitary)),
      povm_(std::move(povm)),
      transmission_(transmission),
      ancilla_(ancilla ? std::move(*ancilla)
                       : DensityMatrix::vacuum(unitary_.dim())),
      splitter_(beam_splitter(transmission, unitary_.dim())) {
  if (povm_.dim() != unitary_.dim() || ancilla_.dim() != unitary_.dim()) {
    throw ValidationError(
        "step: unitary, detector and ancilla dimensions differ (" +
        std::to_string(unitary_.dim()) + ", " + std::to_string(povm_.dim()) +
        ", " + std::to_string(ancilla_.dim()) + ")");
  }
}

std::vector<MeasurementStep> uniform_steps(const UnitaryFamily& unitary,
                                           const PovmFamily& povm, int depth) {
  std::vector<MeasurementStep> steps;
  for (double t : schedule(depth).transmissions) {
    steps.emplace_back(unitary, povm, t);
  }
  return steps;
}

ComplexMatrix kraus(const MeasurementStep& step, double tau,
                    std::size_t outcome, std::size_t out_index,
                    std::size_t in_index) {
  if (out_index >= step.dim() || in_index >= step.dim()) {
    throw DimensionError("kraus: ancilla index outside Fock dimension");
  }
  const ComplexMatrix x = step.povm().sqrt_element(outcome) * step.unitary()(tau);
  return kraus_column(step.splitter(), x, step.dim(), in_index)[out_index];
}

StepOperators::StepOperators(const MeasurementStep& step, double tau)
    : tau_(tau), dim_(step.dim()) {
  const ComplexMatrix& anc = step.ancilla().matrix();
  std::vector<std::size_t> in_indices;
  auto slot_of = [&](std::size_t n) {
    auto it = std::find(in_indices.begin(), in_indices.end(), n);
    if (it != in_indices.end()) {
      return static_cast<std::size_t>(it - in_indices.begin());
    }
    in_indices.push_back(n);
    return in_indices.size() - 1;
  };
  for (std::size_t n = 0; n < dim_; ++n) {
    for (std::size_t m = 0; m < dim_; ++m) {
      const Complex w =
          anc(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
      if (w == Complex(0.0)) continue;
      const std::size_t left = slot_of(n);
      const std::size_t right = slot_of(m);
      terms_.push_back({w, left, right});
    }
  }

  const ComplexMatrix a = step.unitary()(tau);
  const auto d = static_cast<Eigen::Index>(dim_);
  kraus_.resize(step.outcomes());
  effects_.reserve(step.outcomes());
  for (std::size_t mu = 0; mu < step.outcomes(); ++mu) {
    const ComplexMatrix x = step.povm().sqrt_element(mu) * a;
    for (std::size_t n : in_indices) {
      kraus_[mu].push_back(kraus_column(step.splitter(), x, dim_, n));
    }
    ComplexMatrix effect = ComplexMatrix::Zero(d, d);
    for (const auto& term : terms_) {
      for (std::size_t i = 0; i < dim_; ++i) {
        effect.noalias() += term.weight * kraus_[mu][term.right][i].adjoint() *
                            kraus_[mu][term.left][i];
      }
    }
    effects_.push_back(std::move(effect));
  }
}

ComplexMatrix StepOperators::apply_unnormalized(std::size_t outcome,
                                                const ComplexMatrix& rho) const {
  const auto d = static_cast<Eigen::Index>(dim_);
  ComplexMatrix out = ComplexMatrix::Zero(d, d);
  const auto& ops = kraus_.at(outcome);
  for (const auto& term : terms_) {
    for (std::size_t i = 0; i < dim_; ++i) {
      out.noalias() +=
          term.weight * ops[term.left][i] * rho * ops[term.right][i].adjoint();
    }
  }
  return out;
}

double StepOperators::probability(std::size_t outcome,
                                  const ComplexMatrix& rho) const {
  const double norm = rho.trace().real();
  const double p = (effects_.at(outcome) * rho).trace().real() / norm;
  return std::clamp(p, 0.0, 1.0);
}

StepOutcome apply_step(const StepOperators& ops, std::size_t outcome,
                       const DensityMatrix& rho) {
  const ComplexMatrix out = ops.apply_unnormalized(outcome, rho.matrix());
  const double p = out.trace().real() / rho.trace();
  StepOutcome result;
  result.probability = std::clamp(p, 0.0, 1.0);
  if (p >= kUnreachableProbability) {
    result.state = DensityMatrix::from_channel_output(out);
  } else {
    result.probability = 0.0;
  }
  return result;
}

StepOutcome apply_step(const MeasurementStep& step, double tau,
                       std::size_t outcome, const DensityMatrix& rho) {
  return apply_step(StepOperators(step, tau), outcome, rho);
}

std::uint64_t Branch::leaf_index(std::size_t outcome_count) const {
  std::uint64_t index = 0;
  for (std::size_t mu : outcomes) {
    if (mu >= outcome_count) {
      throw ValidationError("branch: outcome " + std::to_string(mu) +
                            " outside 0.." + std::to_string(outcome_count - 1));
    }
    index = index * outcome_count + mu;
  }
  return index + 1;
}

Branch Branch::from_leaf_index(std::uint64_t leaf, std::size_t outcome_count,
                               std::size_t depth) {
  if (leaf == 0) throw ValidationError("branch: leaf indices start at 1");
  Branch branch;
  branch.outcomes.assign(depth, 0);
  std::uint64_t rest = leaf - 1;
  for (std::size_t k = depth; k-- > 0;) {
    branch.outcomes[k] = static_cast<std::size_t>(rest % outcome_count);
    rest /= outcome_count;
  }
  if (rest != 0) {
    throw ValidationError("branch: leaf " + std::to_string(leaf) +
                          " exceeds M^N");
  }
  return branch;
}

std::string Branch::label() const {
  std::string out;
  for (std::size_t mu : outcomes) out += std::to_string(mu);
  return out;
}

double branch_probability(std::span<const MeasurementStep> steps,
                          std::span<const double> taus, const Branch& branch,
                          const DensityMatrix& initial, double prior) {
  if (branch.outcomes.size() != steps.size() || taus.size() != steps.size()) {
    throw ValidationError(
        "branch_probability: branch, steps and parameters differ in length");
  }
  double p = prior;
  DensityMatrix rho = initial;
  for (std::size_t k = 0; k < steps.size(); ++k) {
    auto next = apply_step(steps[k], taus[k], branch.outcomes[k], rho);
    if (!next.reachable()) return 0.0;
    p *= next.probability;
    rho = std::move(*next.state);
  }
  return p;
}

}  // namespace povmtree
