#include "povmtree/fock.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "povmtree/errors.hpp"

namespace povmtree {

namespace {

void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw DimensionError(std::string(what) + ": matrix is " +
                         std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()) + ", expected square");
  }
}

void require_same_shape(const ComplexMatrix& a, const ComplexMatrix& b,
                        const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(what) + ": shape mismatch");
  }
}

}  // namespace

ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b,
                     std::size_t dim_cap) {
  require_square(a, "tensor");
  require_square(b, "tensor");
  const auto da = static_cast<std::size_t>(a.rows());
  const auto db = static_cast<std::size_t>(b.rows());
  if (da != 0 && db > dim_cap / da) {
    throw DimensionError("tensor: product dimension " +
                         std::to_string(da) + "*" + std::to_string(db) +
                         " exceeds cap " + std::to_string(dim_cap));
  }
  const auto n = static_cast<Eigen::Index>(da * db);
  ComplexMatrix out(n, n);
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Complex trace(const ComplexMatrix& m) {
  require_square(m, "trace");
  return m.trace();
}

ComplexMatrix dagger(const ComplexMatrix& m) { return m.adjoint(); }

ComplexMatrix multiply(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("multiply: inner dimensions " +
                         std::to_string(a.cols()) + " and " +
                         std::to_string(b.rows()) + " differ");
  }
  return a * b;
}

ComplexMatrix add(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_shape(a, b, "add");
  return a + b;
}

ComplexMatrix scale(const ComplexMatrix& m, Complex factor) {
  return factor * m;
}

ComplexMatrix identity(std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  return ComplexMatrix::Identity(n, n);
}

ComplexMatrix basis_projector(std::size_t n, std::size_t dim) {
  if (n >= dim) {
    throw DimensionError("basis_projector: index " + std::to_string(n) +
                         " outside dimension " + std::to_string(dim));
  }
  const auto d = static_cast<Eigen::Index>(dim);
  ComplexMatrix out = ComplexMatrix::Zero(d, d);
  out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)) = 1.0;
  return out;
}

ComplexMatrix outer(const ComplexVector& ket) { return ket * ket.adjoint(); }

ComplexMatrix annihilation(std::size_t dim) {
  const auto d = static_cast<Eigen::Index>(dim);
  ComplexMatrix a = ComplexMatrix::Zero(d, d);
  for (Eigen::Index n = 1; n < d; ++n) {
    a(n - 1, n) = std::sqrt(static_cast<double>(n));
  }
  return a;
}

bool is_hermitian(const ComplexMatrix& m, double tolerance) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tolerance;
}

double min_eigenvalue(const ComplexMatrix& m) {
  require_square(m, "min_eigenvalue");
  const ComplexMatrix herm = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(herm,
                                                      Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

ComplexMatrix psd_sqrt(const ComplexMatrix& m) {
  require_square(m, "psd_sqrt");
  const ComplexMatrix herm = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(herm);
  Eigen::VectorXd values = solver.eigenvalues();
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (values(i) < tol::kEigenFloor) {
      throw ValidationError("psd_sqrt: eigenvalue " +
                            std::to_string(values(i)) + " below floor");
    }
    values(i) = std::sqrt(std::max(values(i), 0.0));
  }
  const ComplexMatrix& vecs = solver.eigenvectors();
  return vecs * values.cast<Complex>().asDiagonal() * vecs.adjoint();
}

DensityMatrix::DensityMatrix(ComplexMatrix mat, Normalization norm)
    : mat_(std::move(mat)) {
  validate(norm);
}

DensityMatrix DensityMatrix::pure(const ComplexVector& ket) {
  return DensityMatrix(outer(ket));
}

DensityMatrix DensityMatrix::vacuum(std::size_t dim) {
  return DensityMatrix(basis_projector(0, dim));
}

DensityMatrix DensityMatrix::from_channel_output(
    const ComplexMatrix& unnormalized) {
  const double tr = unnormalized.trace().real();
  ComplexMatrix herm = (0.5 / tr) * (unnormalized + unnormalized.adjoint());
  return DensityMatrix(std::move(herm), Unchecked{});
}

void DensityMatrix::validate(Normalization norm) const {
  if (mat_.rows() == 0 || mat_.rows() != mat_.cols()) {
    throw ValidationError("density matrix: must be square and non-empty");
  }
  if (!mat_.allFinite()) {
    throw ValidationError("density matrix: non-finite entries");
  }
  if (!is_hermitian(mat_)) {
    throw ValidationError("density matrix: not Hermitian within 1e-10");
  }
  const double tr = mat_.trace().real();
  if (norm == Normalization::kNormalized) {
    if (std::abs(tr - 1.0) > tol::kTrace) {
      throw ValidationError("density matrix: trace " + std::to_string(tr) +
                            " is not 1");
    }
  } else if (!(tr > 0.0) || tr > 1.0 + tol::kTrace) {
    throw ValidationError("density matrix: trace " + std::to_string(tr) +
                          " outside (0, 1]");
  }
  const double lowest = min_eigenvalue(mat_);
  if (lowest < tol::kEigenFloor) {
    throw ValidationError("density matrix: eigenvalue " +
                          std::to_string(lowest) + " below -1e-9");
  }
}

}  // namespace povmtree
