#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <vector>

#include "qhist/errors.hpp"

namespace qhist {

using Complex = std::complex<double>;

/// Absolute entrywise tolerance used by all validation predicates unless the
/// caller overrides it. File-loaded matrices carry decimal round-trip error,
/// so this is deliberately looser than machine epsilon.
inline constexpr double kDefaultTolerance = 1e-9;

/// Dense complex column vector.
class Vector {
 public:
  Vector() = default;
  explicit Vector(std::size_t dim) : entries_(dim) {}
  Vector(std::initializer_list<Complex> init) : entries_(init) {}

  std::size_t size() const { return entries_.size(); }
  Complex& operator[](std::size_t i) { return entries_[i]; }
  const Complex& operator[](std::size_t i) const { return entries_[i]; }

  const std::vector<Complex>& entries() const { return entries_; }

  double squared_norm() const;
  double norm() const;

  bool all_finite() const;

 private:
  std::vector<Complex> entries_;
};

/// Dense complex matrix, row-major.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), entries_(rows * cols) {}

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }

  Complex& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
  const Complex& operator()(std::size_t i, std::size_t j) const {
    return entries_[i * cols_ + j];
  }

  const std::vector<Complex>& entries() const { return entries_; }

  bool all_finite() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> entries_;
};

// Elementwise arithmetic. Shapes must match.
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(const Complex& s, const Matrix& m);
Vector operator+(const Vector& a, const Vector& b);
Vector operator-(const Vector& a, const Vector& b);
Vector operator*(const Complex& s, const Vector& v);

/// Standard matrix product; throws ShapeError on an inner-dimension mismatch.
Matrix matmul(const Matrix& a, const Matrix& b);
inline Matrix operator*(const Matrix& a, const Matrix& b) { return matmul(a, b); }

/// Conjugate transpose.
Matrix adjoint(const Matrix& m);

/// Sum of diagonal entries; throws ShapeError on non-square input.
Complex trace(const Matrix& m);

/// Matrix-vector product; throws ShapeError when m.cols() != v.size().
Vector apply(const Matrix& m, const Vector& v);
inline Vector operator*(const Matrix& m, const Vector& v) { return apply(m, v); }

/// Inner product, conjugate-linear in the first argument:
/// sum over i of conj(a[i]) * b[i].
Complex inner_product(const Vector& a, const Vector& b);

/// Rank-1 matrix a * b^dagger.
Matrix outer_product(const Vector& a, const Vector& b);

/// Largest entry magnitude.
double max_abs(const Matrix& m);

/// Largest entrywise difference |a - b|.
double max_abs_diff(const Matrix& a, const Matrix& b);

/// True iff the max-entry deviation of m^dagger m from the identity is at
/// most tol. Non-square matrices are never unitary.
bool is_unitary(const Matrix& m, double tol = kDefaultTolerance);

/// True iff m is Hermitian and idempotent, both within tol entrywise.
bool is_projector(const Matrix& m, double tol = kDefaultTolerance);

/// True iff m is Hermitian within tol, has trace within tol of 1, and all
/// eigenvalues are at least -tol.
bool is_density(const Matrix& m, double tol = kDefaultTolerance);

/// Deviation from Hermitian symmetry, max |m - m^dagger| over entries.
double hermiticity_residual(const Matrix& m);

struct EigenDecomposition {
  std::vector<double> eigenvalues;   // descending
  std::vector<Vector> eigenvectors;  // orthonormal, aligned with eigenvalues
};

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
/// The input must be Hermitian within tol (ValidationError otherwise).
/// Contract: reconstruction sum(lambda_k v_k v_k^dagger) matches m to 1e-9
/// entrywise for the pipeline-scale dimensions this library targets.
EigenDecomposition hermitian_eig(const Matrix& m, double tol = kDefaultTolerance);

}  // namespace qhist
