#pragma once

// Dense complex linear algebra on a truncated Fock space.
//
// Operators are stored as dense Eigen matrices indexed by Fock number.
// Two-mode operators use mode 0 as the slow index: |n0, n1> sits at
// n0 * dim + n1.

#include <complex>
#include <cstddef>

#include <Eigen/Dense>

namespace povmtree {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

namespace tol {
inline constexpr double kHermitian = 1e-10;
inline constexpr double kEigenFloor = -1e-9;
inline constexpr double kTrace = 1e-9;
}  // namespace tol

inline constexpr std::size_t kDefaultDimensionCap = 4096;

/// Kronecker product a (x) b. Throws DimensionError for non-square operands
/// or when the result would exceed `dim_cap`.
ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b,
                     std::size_t dim_cap = kDefaultDimensionCap);

Complex trace(const ComplexMatrix& m);
ComplexMatrix dagger(const ComplexMatrix& m);

// Ring operations with explicit dimension checks.
ComplexMatrix multiply(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix add(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix scale(const ComplexMatrix& m, Complex factor);

ComplexMatrix identity(std::size_t dim);
ComplexMatrix basis_projector(std::size_t n, std::size_t dim);
ComplexMatrix outer(const ComplexVector& ket);
ComplexMatrix annihilation(std::size_t dim);

bool is_hermitian(const ComplexMatrix& m, double tolerance = tol::kHermitian);

/// Smallest eigenvalue of the Hermitian part of `m`.
double min_eigenvalue(const ComplexMatrix& m);

/// Principal square root of a Hermitian PSD matrix. Eigenvalues in
/// [kEigenFloor, 0) are clamped to zero; anything lower throws.
ComplexMatrix psd_sqrt(const ComplexMatrix& m);

/// Hermitian, positive semidefinite operator with trace in (0, 1].
///
/// Normalized matrices must have unit trace; sub-normalized ones (unnormalized
/// conditional states) only need a positive trace not exceeding one.
class DensityMatrix {
 public:
  enum class Normalization { kNormalized, kSubnormalized };

  explicit DensityMatrix(ComplexMatrix mat,
                         Normalization norm = Normalization::kNormalized);

  static DensityMatrix pure(const ComplexVector& ket);
  static DensityMatrix vacuum(std::size_t dim);

  /// Skips the eigenvalue check; the matrix is symmetrized and rescaled to
  /// unit trace. Used on channel outputs, which are PSD by construction.
  static DensityMatrix from_channel_output(const ComplexMatrix& unnormalized);

  const ComplexMatrix& matrix() const { return mat_; }
  std::size_t dim() const { return static_cast<std::size_t>(mat_.rows()); }
  double trace() const { return povmtree::trace(mat_).real(); }

  /// Re-runs the full invariant check, throwing ValidationError on failure.
  void validate(Normalization norm = Normalization::kNormalized) const;

 private:
  struct Unchecked {};
  DensityMatrix(ComplexMatrix mat, Unchecked) : mat_(std::move(mat)) {}

  ComplexMatrix mat_;
};

}  // namespace povmtree
