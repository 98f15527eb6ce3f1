#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "povmtree/elements.hpp"
#include "povmtree/errors.hpp"

using namespace povmtree;
using std::numbers::pi;

namespace {

ComplexVector ket2(double a, double b, std::size_t dim = 2) {
  ComplexVector v = ComplexVector::Zero(static_cast<Eigen::Index>(dim));
  v(0) = a;
  v(1) = b;
  return v;
}

// |<target|psi>| for normalized vectors.
double overlap(const ComplexVector& a, const ComplexVector& b) {
  return std::abs(a.dot(b));
}

double max_abs(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

ComplexVector two_mode_ket(std::size_t n0, std::size_t n1, std::size_t d) {
  ComplexVector v = ComplexVector::Zero(static_cast<Eigen::Index>(d * d));
  v(static_cast<Eigen::Index>(n0 * d + n1)) = 1.0;
  return v;
}

}  // namespace

TEST_CASE("qubit pool of two") {
  const CandidatePool pool = qubit_pool(2, 2);
  REQUIRE(pool.size() == 2);
  CHECK(pool.priors[0] == doctest::Approx(0.5));
  CHECK(pool.priors[1] == doctest::Approx(0.5));
  const double h = 1.0 / std::sqrt(2.0);
  CHECK((pool.states[0].matrix() - outer(ket2(h, h))).norm() < 1e-15);
  // sin(3 pi / 4) > 0 > cos(3 pi / 4): the second state is -(|0> - |1>)/sqrt 2.
  CHECK((pool.states[1].matrix() - outer(ket2(h, -h))).norm() < 1e-15);
}

TEST_CASE("qubit pool of four") {
  const CandidatePool pool = qubit_pool(4, 3);
  REQUIRE(pool.size() == 4);
  CHECK(pool.dim() == 3);
  CHECK(pool.states[0].matrix()(0, 0).real() == doctest::Approx(0.85355339059));
  CHECK(pool.states[0].matrix()(1, 1).real() == doctest::Approx(0.14644660941));
  CHECK(pool.states[0].matrix()(2, 2) == Complex(0.0));
  for (double p : pool.priors) CHECK(p == doctest::Approx(0.25));
}

TEST_CASE("pool preconditions") {
  CHECK_THROWS_AS(qubit_pool(1, 2), ValidationError);
  const auto pool = qubit_pool(2, 2);
  CHECK_THROWS_AS(make_pool(pool.states, {0.7, 0.4}), ValidationError);
  CHECK_THROWS_AS(make_pool({pool.states[0], pool.states[0]}, {0.5, 0.5}),
                  ValidationError);
  CHECK_THROWS_AS(make_pool({pool.states[0]}, {1.0}), ValidationError);
  CHECK_NOTHROW(make_pool(pool.states, {0.25, 0.75}));
}

TEST_CASE("rotation examples") {
  CHECK((rotation(0.0, 2) - identity(2)).norm() == 0.0);
  const double h = 1.0 / std::sqrt(2.0);
  const ComplexMatrix r = rotation(pi / 2, 2);
  CHECK(overlap(r * ket2(h, h), ket2(1, 0)) == doctest::Approx(1.0));
  CHECK(overlap(r * ket2(h, -h), ket2(0, 1)) == doctest::Approx(1.0));
}

TEST_CASE("rotation is unitary and leaves higher levels alone") {
  for (int i = 0; i <= 40; ++i) {
    const double tau = -pi + 2 * pi * i / 40.0;
    const ComplexMatrix r = rotation(tau, 4);
    CHECK(max_abs(r.adjoint() * r - identity(4)) < 1e-15);
    CHECK(r(2, 2) == Complex(1.0));
    CHECK(r(3, 3) == Complex(1.0));
    CHECK(r(0, 2) == Complex(0.0));
  }
}

TEST_CASE("printed rotation form is singular") {
  const ComplexMatrix r = rotation(0.7, 2, RotationForm::kPrinted);
  CHECK(std::abs(r.determinant()) < 1e-15);
  CHECK(r(0, 1) == r(1, 0));
}

TEST_CASE("displacement examples") {
  CHECK((displacement(0.0, 12) - identity(12)).norm() == 0.0);
  CHECK(displacement(1.0, 12)(0, 0).real() == doctest::Approx(std::exp(-0.5)));
  CHECK(displacement(1.0, 12)(0, 0).real() == doctest::Approx(0.60653).epsilon(1e-5));
  CHECK(displacement(0.5, 12)(1, 0).real() == doctest::Approx(0.5 * std::exp(-0.125)));
  CHECK(displacement(0.5, 12)(1, 0).real() == doctest::Approx(0.44125).epsilon(1e-5));
}

TEST_CASE("displacement matches the exponentiated generator") {
  for (double tau : {-2.0, -1.0, -0.3, 0.5, 1.0, 2.0}) {
    const ComplexMatrix lib = displacement(tau, 12);
    const ComplexMatrix ref = oracle::displacement(tau, 12);
    CHECK(max_abs(lib - ref) < 1e-12);
  }
}

TEST_CASE("displacement truncation leak") {
  // Vacuum and single-photon inputs are the only ones the qubit pool
  // populates. Column 0 stays within 1e-8 at 12 levels; column 1 loses
  // about 1e-7 at the range ends and needs 16 levels for 1e-8.
  for (double tau : {-1.0, -0.5, 0.5, 1.0}) {
    const ComplexMatrix d12 = displacement(tau, 12);
    CHECK(d12.col(0).squaredNorm() >= 1.0 - 1e-8);
    CHECK(d12.col(1).squaredNorm() >= 1.0 - 2e-7);
    const ComplexMatrix d16 = displacement(tau, 16);
    CHECK(d16.col(1).squaredNorm() >= 1.0 - 1e-8);
  }
}

TEST_CASE("displacement inverse on low Fock levels") {
  for (double tau : {-1.0, -0.4, 0.8, 1.0}) {
    const ComplexMatrix p16 = displacement(tau, 16) * displacement(-tau, 16);
    CHECK(max_abs(p16.topLeftCorner(4, 4) - identity(4)) < 1e-7);
    const ComplexMatrix p12 = displacement(tau, 12) * displacement(-tau, 12);
    CHECK(max_abs(p12.topLeftCorner(4, 4) - identity(4)) < 2e-4);
  }
}

TEST_CASE("beam splitter examples") {
  const std::size_t d = 3;
  CHECK(max_abs(beam_splitter(1.0, d) - identity(d * d)) < 1e-15);
  const ComplexMatrix b = beam_splitter(std::sqrt(0.5), d);
  const ComplexVector out = b * two_mode_ket(1, 0, d);
  const double h = 1.0 / std::sqrt(2.0);
  CHECK(out(static_cast<Eigen::Index>(1 * d + 0)).real() == doctest::Approx(h));
  CHECK(std::abs(out(static_cast<Eigen::Index>(0 * d + 1))) == doctest::Approx(h));
  for (double t : {0.0, 0.3, 0.9, 1.0}) {
    const ComplexVector vac = beam_splitter(t, d) * two_mode_ket(0, 0, d);
    CHECK(std::abs(vac(0)) == doctest::Approx(1.0));
  }
  // Full transfer at t = 0: |1,0> -> |0,1>.
  const ComplexVector swap = beam_splitter(0.0, d) * two_mode_ket(1, 0, d);
  CHECK(swap(static_cast<Eigen::Index>(1)).real() == doctest::Approx(1.0));
}

TEST_CASE("beam splitter matches the generator oracle") {
  for (double t : {0.0, 0.25, std::sqrt(0.5), 0.8, 1.0}) {
    for (std::size_t d : {2u, 3u, 4u}) {
      const ComplexMatrix lib = beam_splitter(t, d);
      const ComplexMatrix ref = oracle::splitter(t, 0, 1, 2, d);
      // Blocks with total photon number below d are exact in both.
      for (std::size_t n0 = 0; n0 < d; ++n0) {
        for (std::size_t n1 = 0; n0 + n1 < d; ++n1) {
          const auto col = static_cast<Eigen::Index>(n0 * d + n1);
          CHECK((lib.col(col) - ref.col(col)).cwiseAbs().maxCoeff() < 1e-12);
        }
      }
    }
  }
}

TEST_CASE("beam splitter conserves photon number") {
  const std::size_t d = 4;
  const ComplexMatrix b = beam_splitter(0.6, d);
  for (std::size_t i = 0; i < d * d; ++i) {
    for (std::size_t j = 0; j < d * d; ++j) {
      const std::size_t ni = i / d + i % d;
      const std::size_t nj = j / d + j % d;
      if (ni != nj) {
        CHECK(std::abs(b(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) <
              1e-12);
      }
    }
  }
}

TEST_CASE("beam splitter rejects transmissions outside the unit interval") {
  CHECK_THROWS_AS(beam_splitter(1.2, 2), ValidationError);
  CHECK_THROWS_AS(beam_splitter(-0.1, 2), ValidationError);
}

TEST_CASE("transmission schedule") {
  CHECK(schedule(1).transmissions == std::vector<double>{0.0});
  const auto two = schedule(2).transmissions;
  REQUIRE(two.size() == 2);
  CHECK(two[0] == doctest::Approx(std::sqrt(0.5)));
  CHECK(two[1] == 0.0);
  const auto four = schedule(4).transmissions;
  CHECK(four[0] == doctest::Approx(std::sqrt(0.75)));
  CHECK(four[1] == doctest::Approx(std::sqrt(2.0 / 3.0)));
  CHECK(four[2] == doctest::Approx(std::sqrt(0.5)));
  CHECK(four[3] == 0.0);
  CHECK_THROWS_AS(schedule(0), ValidationError);
}

TEST_CASE("single photon spreads evenly over the ancillas") {
  for (int n = 1; n <= 6; ++n) {
    const auto t = schedule(n).transmissions;
    double stay = 1.0;  // amplitude still in mode 0
    for (int k = 0; k < n; ++k) {
      const double r = std::sqrt(1.0 - t[k] * t[k]);
      const double exit = stay * r;
      CHECK(std::abs(exit * exit - 1.0 / n) < 1e-10);
      stay *= t[k];
    }
    CHECK(stay == 0.0);
  }
}

TEST_CASE("APD examples") {
  const PovmFamily ideal = apd(1.0, 3);
  CHECK(max_abs(ideal.element(0) - basis_projector(0, 3)) < 1e-15);
  CHECK(apd(0.9, 3).element(0)(1, 1).real() == doctest::Approx(0.1));
  const PovmFamily blind = apd(0.0, 3);
  CHECK(max_abs(blind.element(0) - identity(3)) < 1e-15);
  CHECK(max_abs(blind.element(1)) < 1e-15);
  CHECK(apd(0.7, 3).kind() == DetectorKind::kApd);
  CHECK(pnrd(0.7, 1, 3).kind() == DetectorKind::kPnrd);
}

TEST_CASE("PNRD examples") {
  const PovmFamily p = pnrd(0.8, 2, 4);
  CHECK(p.outcomes() == 3);
  // Outcome index 1 is the second element, counting from zero.
  CHECK(p.element(1)(2, 2).real() == doctest::Approx(0.32).epsilon(1e-12));
  CHECK(p.element(2)(2, 2).real() == doctest::Approx(0.64));
  CHECK(p.element(0)(2, 2).real() == doctest::Approx(0.04));
  CHECK_THROWS_AS(pnrd(0.8, 0, 4), ValidationError);
}

TEST_CASE("PNRD saturating at one photon is the APD") {
  for (double eta : {0.3, 0.7, 1.0}) {
    const PovmFamily a = apd(eta, 6);
    const PovmFamily p = pnrd(eta, 1, 6);
    REQUIRE(a.outcomes() == p.outcomes());
    for (std::size_t mu = 0; mu < a.outcomes(); ++mu) {
      CHECK(max_abs(a.element(mu) - p.element(mu)) <= 1e-12);
    }
  }
}

TEST_CASE("detector efficiency must lie in the unit interval") {
  CHECK_THROWS_AS(apd(1.1, 2), ValidationError);
  CHECK_THROWS_AS(pnrd(-0.2, 2, 3), ValidationError);
}

TEST_CASE("homodyne binned matrix elements") {
  const PovmFamily h = homodyne_binned(6);
  CHECK(h.element(0)(0, 0).real() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(h.element(0)(0, 1).real() ==
        doctest::Approx(-1.0 / std::sqrt(2.0 * pi)).epsilon(1e-10));
  CHECK(std::abs(h.element(0)(0, 2)) < 1e-10);
  for (unsigned n = 0; n < 6; ++n) {
    for (unsigned m = 0; m < 6; ++m) {
      const double ref = oracle::negative_quadrature_overlap(n, m);
      CHECK(std::abs(h.element(0)(n, m).real() - ref) < 1e-10);
      CHECK(std::abs(h.element(0)(n, m).imag()) == 0.0);
    }
  }
}

TEST_CASE("homodyne binning is invariant under quadrature rescaling") {
  const PovmFamily a = homodyne_binned(8, 1.0);
  const PovmFamily b = homodyne_binned(8, std::sqrt(2.0));
  CHECK(max_abs(a.element(0) - b.element(0)) < 1e-10);
  CHECK(oracle::negative_quadrature_overlap(1, 2, std::sqrt(2.0)) ==
        doctest::Approx(oracle::negative_quadrature_overlap(1, 2)).epsilon(1e-9));
}

TEST_CASE("every detector is complete and positive") {
  for (double eta : {0.0, 0.3, 0.7, 0.9, 1.0}) {
    for (const PovmFamily& f : {apd(eta, 5), pnrd(eta, 2, 5), pnrd(eta, 3, 5)}) {
      ComplexMatrix sum = ComplexMatrix::Zero(5, 5);
      for (const auto& e : f.elements()) {
        sum += e;
        CHECK(min_eigenvalue(e) >= -1e-9);
      }
      CHECK(max_abs(sum - identity(5)) <= 1e-9);
    }
  }
  const PovmFamily h = homodyne_binned(12);
  CHECK(max_abs(h.element(0) + h.element(1) - identity(12)) <= 1e-9);
  CHECK(min_eigenvalue(h.element(0)) >= -1e-9);
  CHECK(min_eigenvalue(h.element(1)) >= -1e-9);
}

TEST_CASE("square roots of detector elements") {
  const PovmFamily a = apd(0.9, 4);
  for (std::size_t mu = 0; mu < 2; ++mu) {
    for (Eigen::Index n = 0; n < 4; ++n) {
      CHECK(a.sqrt_element(mu)(n, n).real() ==
            doctest::Approx(std::sqrt(a.element(mu)(n, n).real())));
    }
  }
  const PovmFamily h = homodyne_binned(6);
  const ComplexMatrix s = h.sqrt_element(0);
  CHECK(max_abs(s * s - h.element(0)) < 1e-9);
}

TEST_CASE("unitary families") {
  const UnitaryFamily rot = UnitaryFamily::rotation(2);
  CHECK(rot.range().lo == doctest::Approx(-pi));
  CHECK(rot.range().hi == doctest::Approx(pi));
  CHECK(rot.name() == "rotation");
  CHECK(max_abs(rot(0.3) - rotation(0.3, 2)) == 0.0);
  const UnitaryFamily dis = UnitaryFamily::displacement(12);
  CHECK(dis.range().lo == -1.0);
  CHECK(dis.name() == "displacement");
  CHECK(max_abs(dis(0.4) - displacement(0.4, 12)) == 0.0);
  CHECK(UnitaryFamily::rotation(2, {-pi, pi}, RotationForm::kPrinted).name() ==
        "rotation_printed");
  CHECK_THROWS_AS(UnitaryFamily::rotation(2, {1.0, -1.0}), ValidationError);
}
