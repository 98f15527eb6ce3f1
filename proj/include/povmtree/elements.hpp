#pragma once

// Physical building blocks: candidate pools, tunable unitaries, beam
// splitters and detector POVMs.

#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "povmtree/fock.hpp"

namespace povmtree {

/// The states to discriminate together with their prior probabilities.
struct CandidatePool {
  std::vector<DensityMatrix> states;
  std::vector<double> priors;

  std::size_t size() const { return states.size(); }
  std::size_t dim() const { return states.empty() ? 0 : states.front().dim(); }

  /// Throws ValidationError unless there are at least two states of equal
  /// dimension, no two entrywise equal, and priors summing to one.
  void validate() const;
};

CandidatePool make_pool(std::vector<DensityMatrix> states,
                        std::vector<double> priors);

/// C real qubits spread evenly around the x-z great circle, with uniform
/// priors, embedded in Fock levels {0, 1} of a `dim`-level mode.
/// Candidate c (1-based) has Bloch angle (2c - 1) pi / C.
CandidatePool qubit_pool(int count, std::size_t dim);

struct ParameterRange {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
  bool contains(double x) const { return x >= lo && x <= hi; }
};

enum class UnitaryKind { kRotation, kDisplacement };

/// kUnitary is the proper rotation [[c, s], [-s, c]] with c = cos(tau/2),
/// s = sin(tau/2). kPrinted is the rank-one matrix [[c^2, cs], [sc, s^2]],
/// kept only for side-by-side comparison; it is not unitary.
enum class RotationForm { kUnitary, kPrinted };

ComplexMatrix rotation(double tau, std::size_t dim,
                       RotationForm form = RotationForm::kUnitary);

/// exp(alpha a^dag - conj(alpha) a) from the closed-form Fock matrix
/// elements (associated Laguerre polynomials), truncated to `dim` levels.
ComplexMatrix displacement(Complex alpha, std::size_t dim);

/// Two-mode beam splitter on dim^2 levels. Creation operators map as
/// a0^dag -> t a0^dag + r a1^dag and a1^dag -> -r a0^dag + t a1^dag with
/// r = sqrt(1 - t^2). Components that would leave the truncated space are
/// dropped, so the matrix is exactly unitary only on states whose total
/// photon number stays below `dim`.
ComplexMatrix beam_splitter(double t, std::size_t dim);

/// Parametrized unitary applied to each ancilla mode before detection.
class UnitaryFamily {
 public:
  static UnitaryFamily rotation(std::size_t dim,
                                ParameterRange range = {-std::numbers::pi,
                                                        std::numbers::pi},
                                RotationForm form = RotationForm::kUnitary);
  static UnitaryFamily displacement(std::size_t dim,
                                    ParameterRange range = {-1.0, 1.0});

  ComplexMatrix operator()(double tau) const;

  UnitaryKind kind() const { return kind_; }
  RotationForm rotation_form() const { return form_; }
  const ParameterRange& range() const { return range_; }
  std::size_t dim() const { return dim_; }
  std::string name() const;

 private:
  UnitaryFamily(UnitaryKind kind, std::size_t dim, ParameterRange range,
                RotationForm form);

  UnitaryKind kind_;
  std::size_t dim_;
  ParameterRange range_;
  RotationForm form_;
};

/// Transmissions t^(k) = sqrt((N - k) / (N - k + 1)), k = 1..N, which spread
/// a single photon over the N ancillas with equal probability.
struct SplitterSchedule {
  std::vector<double> transmissions;

  std::size_t depth() const { return transmissions.size(); }
};

SplitterSchedule schedule(int depth);

enum class DetectorKind { kApd, kPnrd, kHomodyne };

std::string to_string(DetectorKind kind);

/// Ordered POVM elements plus detector metadata. Square roots of the
/// elements are computed once at construction.
class PovmFamily {
 public:
  PovmFamily(DetectorKind kind, double efficiency, int saturation,
             std::vector<ComplexMatrix> elements);

  std::size_t outcomes() const { return elements_.size(); }
  std::size_t dim() const;
  const ComplexMatrix& element(std::size_t outcome) const {
    return elements_.at(outcome);
  }
  const ComplexMatrix& sqrt_element(std::size_t outcome) const {
    return sqrt_elements_.at(outcome);
  }
  const std::vector<ComplexMatrix>& elements() const { return elements_; }

  DetectorKind kind() const { return kind_; }
  double efficiency() const { return efficiency_; }
  int saturation() const { return saturation_; }

 private:
  DetectorKind kind_;
  double efficiency_;
  int saturation_;
  std::vector<ComplexMatrix> elements_;
  std::vector<ComplexMatrix> sqrt_elements_;
};

/// On/off detector: no-click = sum_n (1 - eta)^n |n><n|, click = I - no-click.
PovmFamily apd(double efficiency, std::size_t dim);

/// Photon-number-resolving detector that saturates at `saturation` counts.
/// Outcome mu (0-based, mu < saturation) is
/// eta^mu sum_{n >= mu} (1 - eta)^(n - mu) C(n, mu) |n><n|; the last outcome
/// collects the remainder.
PovmFamily pnrd(double efficiency, int saturation, std::size_t dim);

/// Homodyne detection binned by the sign of the x quadrature. The first
/// element integrates |x><x| over x < 0 in the Hermite-Gauss basis;
/// `quadrature_scale` rescales x in the wave functions.
PovmFamily homodyne_binned(std::size_t dim, double quadrature_scale = 1.0);

}  // namespace povmtree
