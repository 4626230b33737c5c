#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>

#include "qhist/errors.hpp"
#include "qhist/linalg.hpp"

using namespace qhist;

namespace {

Matrix hadamard() {
  const double h = std::sqrt(0.5);
  Matrix m(2, 2);
  m(0, 0) = h;
  m(0, 1) = h;
  m(1, 0) = h;
  m(1, 1) = -h;
  return m;
}

}  // namespace

TEST_CASE("vector norms and finiteness") {
  Vector v{{3.0, 0.0}, {0.0, 4.0}};
  CHECK(v.size() == 2);
  CHECK(v.squared_norm() == doctest::Approx(25.0));
  CHECK(v.norm() == doctest::Approx(5.0));
  CHECK(v.all_finite());
  v[0] = Complex(std::numeric_limits<double>::infinity(), 0.0);
  CHECK_FALSE(v.all_finite());
}

TEST_CASE("inner product is conjugate linear in the first argument") {
  Vector a{{1.0, 1.0}, {0.0, 2.0}};
  Vector b{{2.0, -1.0}, {1.0, 0.0}};
  const Complex alpha(0.5, -1.5);
  Vector scaled(2);
  for (std::size_t i = 0; i < 2; ++i) scaled[i] = alpha * a[i];
  CHECK(std::abs(inner_product(scaled, b) - std::conj(alpha) * inner_product(a, b)) <
        1e-15);
  CHECK(std::abs(inner_product(a, a).imag()) == 0.0);
  CHECK(inner_product(a, a).real() == doctest::Approx(a.squared_norm()));
  // Swapping arguments conjugates exactly, not just within rounding.
  CHECK(inner_product(a, b) == std::conj(inner_product(b, a)));
}

TEST_CASE("matrix product against a hand computation") {
  Matrix m(2, 2);
  m(0, 0) = Complex(1, 0);
  m(0, 1) = Complex(0, 1);
  m(1, 0) = Complex(2, 0);
  m(1, 1) = Complex(0, -1);
  const Matrix p = matmul(m, m);
  CHECK(std::abs(p(0, 0) - Complex(1, 2)) < 1e-15);
  CHECK(std::abs(p(0, 1) - Complex(1, 1)) < 1e-15);
  CHECK(std::abs(p(1, 0) - Complex(2, -2)) < 1e-15);
  CHECK(std::abs(p(1, 1) - Complex(-1, 2)) < 1e-15);
  CHECK(std::abs(trace(p) - Complex(0, 4)) < 1e-15);
}

TEST_CASE("adjoint and outer product") {
  Vector a{{1.0, 2.0}, {3.0, 0.0}};
  Vector b{{0.0, 1.0}, {1.0, -1.0}};
  const Matrix ab = outer_product(a, b);
  // (a b^dagger)_{ij} = a_i conj(b_j)
  CHECK(std::abs(ab(0, 1) - Complex(1.0, 2.0) * std::conj(Complex(1.0, -1.0))) < 1e-15);
  const Matrix back = adjoint(ab);
  CHECK(std::abs(back(1, 0) - std::conj(ab(0, 1))) == 0.0);
  CHECK(max_abs_diff(adjoint(back), ab) == 0.0);
}

TEST_CASE("apply matches matmul against a column") {
  const Matrix h = hadamard();
  Vector v{{1.0, 0.0}, {0.0, 0.0}};
  const Vector hv = apply(h, v);
  CHECK(std::abs(hv[0] - Complex(std::sqrt(0.5), 0.0)) < 1e-15);
  CHECK(std::abs(hv[1] - Complex(std::sqrt(0.5), 0.0)) < 1e-15);
}

TEST_CASE("unitary, projector and density predicates") {
  CHECK(is_unitary(hadamard(), 1e-12));
  CHECK(is_unitary(Matrix::identity(3), 0.0));
  Matrix skew = hadamard();
  skew(0, 0) += 1e-6;
  CHECK_FALSE(is_unitary(skew, 1e-9));

  Matrix p(2, 2);
  p(0, 0) = 1.0;
  CHECK(is_projector(p, 1e-12));
  p(0, 0) = 0.5;
  CHECK_FALSE(is_projector(p, 1e-9));

  Matrix w(2, 2);
  w(0, 0) = 0.5;
  w(1, 1) = 0.5;
  CHECK(is_density(w, 1e-12));
  w(1, 1) = 0.6;  // trace 1.1
  CHECK_FALSE(is_density(w, 1e-9));
  Matrix neg(2, 2);
  neg(0, 0) = 1.5;
  neg(1, 1) = -0.5;  // trace 1 but not positive semidefinite
  CHECK_FALSE(is_density(neg, 1e-9));
}

TEST_CASE("hermiticity residual") {
  Matrix m(2, 2);
  m(0, 1) = Complex(0.0, 1.0);
  m(1, 0) = Complex(0.0, 1.0);  // conjugate would be -i
  CHECK(hermiticity_residual(m) == doctest::Approx(2.0));
  m(1, 0) = Complex(0.0, -1.0);
  CHECK(hermiticity_residual(m) == 0.0);
}

TEST_CASE("eigendecomposition of a known 2x2 hermitian matrix") {
  // [[2, i], [-i, 2]] has eigenvalues 3 and 1.
  Matrix m(2, 2);
  m(0, 0) = 2.0;
  m(0, 1) = Complex(0.0, 1.0);
  m(1, 0) = Complex(0.0, -1.0);
  m(1, 1) = 2.0;
  const EigenDecomposition eig = hermitian_eig(m);
  REQUIRE(eig.eigenvalues.size() == 2);
  CHECK(eig.eigenvalues[0] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(eig.eigenvalues[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(eig.eigenvalues[0] >= eig.eigenvalues[1]);

  for (std::size_t k = 0; k < 2; ++k) {
    const Vector& v = eig.eigenvectors[k];
    CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-12));
    const Vector mv = apply(m, v);
    for (std::size_t i = 0; i < 2; ++i) {
      CHECK(std::abs(mv[i] - eig.eigenvalues[k] * v[i]) < 1e-12);
    }
  }
  CHECK(std::abs(inner_product(eig.eigenvectors[0], eig.eigenvectors[1])) < 1e-12);
}

TEST_CASE("eigendecomposition reconstructs a larger matrix") {
  const std::size_t d = 5;
  Matrix m(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const double re = 0.1 * static_cast<double>(i + j);
      const double im = 0.05 * (static_cast<double>(i) - static_cast<double>(j));
      m(i, j) = Complex(re, im);
    }
    m(i, i) = static_cast<double>(i);
  }
  const EigenDecomposition eig = hermitian_eig(m);
  Matrix rebuilt(d, d);
  for (std::size_t k = 0; k < d; ++k) {
    const Vector& v = eig.eigenvectors[k];
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        rebuilt(i, j) += eig.eigenvalues[k] * v[i] * std::conj(v[j]);
      }
    }
  }
  CHECK(max_abs_diff(rebuilt, m) < 1e-12);
}

TEST_CASE("eigendecomposition rejects bad input") {
  Matrix rect(2, 3);
  CHECK_THROWS_AS(hermitian_eig(rect), ShapeError);
  Matrix skew(2, 2);
  skew(0, 1) = 1.0;  // missing conjugate partner
  CHECK_THROWS_AS(hermitian_eig(skew), ValidationError);
}
