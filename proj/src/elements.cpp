#include "povmtree/elements.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "povmtree/errors.hpp"

namespace povmtree {

namespace {

double factorial(std::size_t n) {
  return std::tgamma(static_cast<double>(n) + 1.0);
}

double binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  return std::round(factorial(n) / (factorial(k) * factorial(n - k)));
}

void require_efficiency(double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw ValidationError("detector.eta: efficiency " + std::to_string(eta) +
                          " outside [0, 1]");
  }
}

void require_dim(std::size_t dim, std::size_t minimum, const char* what) {
  if (dim < minimum) {
    throw ValidationError(std::string(what) + ": Fock dimension " +
                          std::to_string(dim) + " below " +
                          std::to_string(minimum));
  }
}

Complex int_pow(Complex z, std::size_t k) {
  Complex out(1.0, 0.0);
  for (std::size_t i = 0; i < k; ++i) out *= z;
  return out;
}

bool is_diagonal(const ComplexMatrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (i != j && m(i, j) != Complex(0.0)) return false;
    }
  }
  return true;
}

ComplexMatrix diagonal_sqrt(const ComplexMatrix& m) {
  ComplexMatrix out = ComplexMatrix::Zero(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out(i, i) = std::sqrt(std::max(m(i, i).real(), 0.0));
  }
  return out;
}

// Normalized Hermite-Gauss functions psi_0..psi_{count-1} at x, by the
// standard three-term recurrence.
std::vector<double> hermite_functions(double x, std::size_t count) {
  std::vector<double> psi(count);
  if (count == 0) return psi;
  psi[0] = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * x * x);
  if (count > 1) psi[1] = std::sqrt(2.0) * x * psi[0];
  for (std::size_t n = 1; n + 1 < count; ++n) {
    const auto nd = static_cast<double>(n);
    psi[n + 1] = std::sqrt(2.0 / (nd + 1.0)) * x * psi[n] -
                 std::sqrt(nd / (nd + 1.0)) * psi[n - 1];
  }
  return psi;
}

}  // namespace

void CandidatePool::validate() const {
  if (states.size() < 2) {
    throw ValidationError("pool: need at least two candidate states, got " +
                          std::to_string(states.size()));
  }
  if (priors.size() != states.size()) {
    throw ValidationError("pool.priors: " + std::to_string(priors.size()) +
                          " priors for " + std::to_string(states.size()) +
                          " states");
  }
  double total = 0.0;
  for (double p : priors) {
    if (!(p >= 0.0)) throw ValidationError("pool.priors: negative prior");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw ValidationError("pool.priors: priors sum to " +
                          std::to_string(total) + ", expected 1");
  }
  const std::size_t d = states.front().dim();
  for (std::size_t c = 0; c < states.size(); ++c) {
    if (states[c].dim() != d) {
      throw ValidationError("pool.states: state " + std::to_string(c) +
                            " has dimension " +
                            std::to_string(states[c].dim()) + ", expected " +
                            std::to_string(d));
    }
    for (std::size_t other = 0; other < c; ++other) {
      const double diff =
          (states[c].matrix() - states[other].matrix()).cwiseAbs().maxCoeff();
      if (diff <= 1e-12) {
        throw ValidationError("pool.states: states " + std::to_string(other) +
                              " and " + std::to_string(c) + " are identical");
      }
    }
  }
}

CandidatePool make_pool(std::vector<DensityMatrix> states,
                        std::vector<double> priors) {
  CandidatePool pool{std::move(states), std::move(priors)};
  pool.validate();
  return pool;
}

CandidatePool qubit_pool(int count, std::size_t dim) {
  if (count < 2) {
    throw ValidationError("pool.C: need at least 2 candidates, got " +
                          std::to_string(count));
  }
  require_dim(dim, 2, "qubit_pool");
  std::vector<DensityMatrix> states;
  states.reserve(static_cast<std::size_t>(count));
  for (int c = 1; c <= count; ++c) {
    const double theta = (2.0 * c - 1.0) * std::numbers::pi / count;
    ComplexVector ket = ComplexVector::Zero(static_cast<Eigen::Index>(dim));
    ket(0) = std::cos(theta / 2.0);
    ket(1) = std::sin(theta / 2.0);
    states.push_back(DensityMatrix::pure(ket));
  }
  std::vector<double> priors(static_cast<std::size_t>(count), 1.0 / count);
  return make_pool(std::move(states), std::move(priors));
}

ComplexMatrix rotation(double tau, std::size_t dim, RotationForm form) {
  require_dim(dim, 2, "rotation");
  ComplexMatrix out = identity(dim);
  const double c = std::cos(tau / 2.0);
  const double s = std::sin(tau / 2.0);
  if (form == RotationForm::kUnitary) {
    out(0, 0) = c;
    out(0, 1) = s;
    out(1, 0) = -s;
    out(1, 1) = c;
  } else {
    out(0, 0) = c * c;
    out(0, 1) = c * s;
    out(1, 0) = s * c;
    out(1, 1) = s * s;
  }
  return out;
}

ComplexMatrix displacement(Complex alpha, std::size_t dim) {
  require_dim(dim, 1, "displacement");
  const auto d = static_cast<Eigen::Index>(dim);
  const double x = std::norm(alpha);
  const double envelope = std::exp(-0.5 * x);
  ComplexMatrix out(d, d);
  for (std::size_t m = 0; m < dim; ++m) {
    for (std::size_t n = 0; n < dim; ++n) {
      Complex value;
      if (m >= n) {
        const std::size_t k = m - n;
        value = std::sqrt(factorial(n) / factorial(m)) * int_pow(alpha, k) *
                std::assoc_laguerre(static_cast<unsigned>(n),
                                    static_cast<unsigned>(k), x);
      } else {
        const std::size_t k = n - m;
        value = std::sqrt(factorial(m) / factorial(n)) *
                int_pow(-std::conj(alpha), k) *
                std::assoc_laguerre(static_cast<unsigned>(m),
                                    static_cast<unsigned>(k), x);
      }
      out(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n)) =
          envelope * value;
    }
  }
  return out;
}

ComplexMatrix beam_splitter(double t, std::size_t dim) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw ValidationError("beam_splitter: transmission " + std::to_string(t) +
                          " outside [0, 1]");
  }
  require_dim(dim, 1, "beam_splitter");
  const double r = std::sqrt(std::max(0.0, 1.0 - t * t));
  const auto d = static_cast<Eigen::Index>(dim);
  ComplexMatrix out = ComplexMatrix::Zero(d * d, d * d);
  // |n0, n1> = (a0^dag)^n0 (a1^dag)^n1 / sqrt(n0! n1!) |0, 0>, expanded
  // binomially after substituting the mapped creation operators.
  for (std::size_t n0 = 0; n0 < dim; ++n0) {
    for (std::size_t n1 = 0; n1 < dim; ++n1) {
      const std::size_t total = n0 + n1;
      const double norm_in = std::sqrt(factorial(n0) * factorial(n1));
      const auto col = static_cast<Eigen::Index>(n0 * dim + n1);
      for (std::size_t j = 0; j <= n0; ++j) {
        for (std::size_t k = 0; k <= n1; ++k) {
          const std::size_t out0 = j + k;
          const std::size_t out1 = total - out0;
          if (out0 >= dim || out1 >= dim) continue;
          const double amp =
              binomial(n0, j) * binomial(n1, k) *
              std::pow(t, static_cast<double>(j)) *
              std::pow(r, static_cast<double>(n0 - j)) *
              std::pow(-r, static_cast<double>(k)) *
              std::pow(t, static_cast<double>(n1 - k)) *
              std::sqrt(factorial(out0) * factorial(out1)) / norm_in;
          const auto row = static_cast<Eigen::Index>(out0 * dim + out1);
          out(row, col) += amp;
        }
      }
    }
  }
  return out;
}

UnitaryFamily::UnitaryFamily(UnitaryKind kind, std::size_t dim,
                             ParameterRange range, RotationForm form)
    : kind_(kind), dim_(dim), range_(range), form_(form) {
  if (!(range.lo <= range.hi) || !std::isfinite(range.lo) ||
      !std::isfinite(range.hi)) {
    throw ValidationError("unitary.range: invalid interval [" +
                          std::to_string(range.lo) + ", " +
                          std::to_string(range.hi) + "]");
  }
}

UnitaryFamily UnitaryFamily::rotation(std::size_t dim, ParameterRange range,
                                      RotationForm form) {
  require_dim(dim, 2, "unitary");
  return UnitaryFamily(UnitaryKind::kRotation, dim, range, form);
}

UnitaryFamily UnitaryFamily::displacement(std::size_t dim,
                                          ParameterRange range) {
  require_dim(dim, 2, "unitary");
  return UnitaryFamily(UnitaryKind::kDisplacement, dim, range,
                       RotationForm::kUnitary);
}

ComplexMatrix UnitaryFamily::operator()(double tau) const {
  if (kind_ == UnitaryKind::kRotation) {
    return povmtree::rotation(tau, dim_, form_);
  }
  return povmtree::displacement(Complex(tau, 0.0), dim_);
}

std::string UnitaryFamily::name() const {
  if (kind_ == UnitaryKind::kDisplacement) return "displacement";
  return form_ == RotationForm::kUnitary ? "rotation" : "rotation_printed";
}

SplitterSchedule schedule(int depth) {
  if (depth < 1) {
    throw ValidationError("depths: depth " + std::to_string(depth) +
                          " must be at least 1");
  }
  SplitterSchedule out;
  out.transmissions.reserve(static_cast<std::size_t>(depth));
  for (int k = 1; k <= depth; ++k) {
    const double remaining = depth - k;
    out.transmissions.push_back(std::sqrt(remaining / (remaining + 1.0)));
  }
  return out;
}

std::string to_string(DetectorKind kind) {
  switch (kind) {
    case DetectorKind::kApd:
      return "apd";
    case DetectorKind::kPnrd:
      return "pnrd";
    case DetectorKind::kHomodyne:
      return "homodyne";
  }
  return "unknown";
}

PovmFamily::PovmFamily(DetectorKind kind, double efficiency, int saturation,
                       std::vector<ComplexMatrix> elements)
    : kind_(kind),
      efficiency_(efficiency),
      saturation_(saturation),
      elements_(std::move(elements)) {
  if (elements_.size() < 2) {
    throw ValidationError("povm: need at least two outcomes");
  }
  const Eigen::Index d = elements_.front().rows();
  ComplexMatrix total = ComplexMatrix::Zero(d, d);
  for (std::size_t mu = 0; mu < elements_.size(); ++mu) {
    const ComplexMatrix& e = elements_[mu];
    if (e.rows() != d || e.cols() != d) {
      throw ValidationError("povm: element " + std::to_string(mu) +
                            " has mismatched dimension");
    }
    if (!is_hermitian(e)) {
      throw ValidationError("povm: element " + std::to_string(mu) +
                            " is not Hermitian");
    }
    if (min_eigenvalue(e) < tol::kEigenFloor) {
      throw ValidationError("povm: element " + std::to_string(mu) +
                            " is not positive semidefinite");
    }
    total += e;
  }
  if ((total - ComplexMatrix::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-9) {
    throw ValidationError("povm: elements do not sum to identity");
  }
  sqrt_elements_.reserve(elements_.size());
  for (const auto& e : elements_) {
    sqrt_elements_.push_back(is_diagonal(e) ? diagonal_sqrt(e) : psd_sqrt(e));
  }
}

std::size_t PovmFamily::dim() const {
  return static_cast<std::size_t>(elements_.front().rows());
}

PovmFamily apd(double efficiency, std::size_t dim) {
  require_efficiency(efficiency);
  require_dim(dim, 1, "detector");
  const auto d = static_cast<Eigen::Index>(dim);
  ComplexMatrix no_click = ComplexMatrix::Zero(d, d);
  for (Eigen::Index n = 0; n < d; ++n) {
    no_click(n, n) = std::pow(1.0 - efficiency, static_cast<double>(n));
  }
  ComplexMatrix click = ComplexMatrix::Identity(d, d) - no_click;
  return PovmFamily(DetectorKind::kApd, efficiency, 1,
                    {std::move(no_click), std::move(click)});
}

PovmFamily pnrd(double efficiency, int saturation, std::size_t dim) {
  require_efficiency(efficiency);
  if (saturation < 1) {
    throw ValidationError("detector.saturation: must be at least 1, got " +
                          std::to_string(saturation));
  }
  require_dim(dim, 1, "detector");
  const auto d = static_cast<Eigen::Index>(dim);
  const double loss = 1.0 - efficiency;
  std::vector<ComplexMatrix> elements;
  ComplexMatrix rest = ComplexMatrix::Identity(d, d);
  for (int mu = 0; mu < saturation; ++mu) {
    ComplexMatrix e = ComplexMatrix::Zero(d, d);
    for (std::size_t n = static_cast<std::size_t>(mu); n < dim; ++n) {
      const auto m = static_cast<std::size_t>(mu);
      e(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)) =
          std::pow(efficiency, static_cast<double>(m)) *
          std::pow(loss, static_cast<double>(n - m)) * binomial(n, m);
    }
    rest -= e;
    elements.push_back(std::move(e));
  }
  elements.push_back(std::move(rest));
  return PovmFamily(DetectorKind::kPnrd, efficiency, saturation,
                    std::move(elements));
}

PovmFamily homodyne_binned(std::size_t dim, double quadrature_scale) {
  require_dim(dim, 1, "homodyne");
  if (!(quadrature_scale > 0.0)) {
    throw ValidationError("homodyne: quadrature scale must be positive");
  }
  using boost::math::quadrature::gauss_kronrod;
  const auto d = static_cast<Eigen::Index>(dim);
  ComplexMatrix negative = ComplexMatrix::Zero(d, d);
  const double lambda = quadrature_scale;
  for (std::size_t n = 0; n < dim; ++n) {
    for (std::size_t m = n; m < dim; ++m) {
      auto integrand = [&](double x) {
        const auto psi = hermite_functions(lambda * x, m + 1);
        return lambda * psi[n] * psi[m];
      };
      const double value = gauss_kronrod<double, 61>::integrate(
          integrand, -std::numeric_limits<double>::infinity(), 0.0, 15,
          1e-12);
      negative(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m)) =
          value;
      negative(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n)) =
          value;
    }
  }
  ComplexMatrix positive = ComplexMatrix::Identity(d, d) - negative;
  return PovmFamily(DetectorKind::kHomodyne, 1.0, 1,
                    {std::move(negative), std::move(positive)});
}

}  // namespace povmtree
