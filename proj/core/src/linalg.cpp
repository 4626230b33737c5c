#include "qhist/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace qhist {

namespace {

std::string shape_string(std::size_t r, std::size_t c) {
  std::ostringstream os;
  os << r << "x" << c;
  return os.str();
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError(std::string(op) + ": shapes " +
                     shape_string(a.rows(), a.cols()) + " and " +
                     shape_string(b.rows(), b.cols()) + " differ");
  }
}

}  // namespace

double Vector::squared_norm() const {
  double acc = 0.0;
  for (const Complex& z : entries_) acc += std::norm(z);
  return acc;
}

double Vector::norm() const { return std::sqrt(squared_norm()); }

bool Vector::all_finite() const {
  for (const Complex& z : entries_) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = Complex(1.0, 0.0);
  return m;
}

bool Matrix::all_finite() const {
  for (const Complex& z : entries_) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "matrix add");
  Matrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j) + b(i, j);
  return out;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "matrix subtract");
  Matrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j) - b(i, j);
  return out;
}

Matrix operator*(const Complex& s, const Matrix& m) {
  Matrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = s * m(i, j);
  return out;
}

Vector operator+(const Vector& a, const Vector& b) {
  if (a.size() != b.size())
    throw ShapeError("vector add: lengths differ");
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

Vector operator-(const Vector& a, const Vector& b) {
  if (a.size() != b.size())
    throw ShapeError("vector subtract: lengths differ");
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

Vector operator*(const Complex& s, const Vector& v) {
  Vector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = s * v[i];
  return out;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: " + shape_string(a.rows(), a.cols()) + " times " +
                     shape_string(b.rows(), b.cols()));
  }
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Complex aik = a(i, k);
      if (aik == Complex{}) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  }
  return out;
}

Matrix adjoint(const Matrix& m) {
  Matrix out(m.cols(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(j, i) = std::conj(m(i, j));
  return out;
}

Complex trace(const Matrix& m) {
  if (!m.is_square()) {
    throw ShapeError("trace: matrix is " + shape_string(m.rows(), m.cols()));
  }
  Complex acc{};
  for (std::size_t i = 0; i < m.rows(); ++i) acc += m(i, i);
  return acc;
}

Vector apply(const Matrix& m, const Vector& v) {
  if (m.cols() != v.size()) {
    throw ShapeError("apply: matrix is " + shape_string(m.rows(), m.cols()) +
                     ", vector has length " + std::to_string(v.size()));
  }
  Vector out(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Complex acc{};
    for (std::size_t j = 0; j < m.cols(); ++j) acc += m(i, j) * v[j];
    out[i] = acc;
  }
  return out;
}

Complex inner_product(const Vector& a, const Vector& b) {
  if (a.size() != b.size())
    throw ShapeError("inner_product: lengths differ");
  Complex acc{};
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
  return acc;
}

Matrix outer_product(const Vector& a, const Vector& b) {
  Matrix out(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out(i, j) = a[i] * std::conj(b[j]);
  return out;
}

double max_abs(const Matrix& m) {
  double mx = 0.0;
  for (const Complex& z : m.entries()) mx = std::max(mx, std::abs(z));
  return mx;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "max_abs_diff");
  double mx = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      mx = std::max(mx, std::abs(a(i, j) - b(i, j)));
  return mx;
}

bool is_unitary(const Matrix& m, double tol) {
  if (!m.is_square() || m.rows() == 0) return false;
  const Matrix gram = matmul(adjoint(m), m);
  return max_abs_diff(gram, Matrix::identity(m.rows())) <= tol;
}

double hermiticity_residual(const Matrix& m) {
  double mx = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      mx = std::max(mx, std::abs(m(i, j) - std::conj(m(j, i))));
  return mx;
}

bool is_projector(const Matrix& m, double tol) {
  if (!m.is_square() || m.rows() == 0) return false;
  if (hermiticity_residual(m) > tol) return false;
  return max_abs_diff(matmul(m, m), m) <= tol;
}

bool is_density(const Matrix& m, double tol) {
  if (!m.is_square() || m.rows() == 0) return false;
  if (hermiticity_residual(m) > tol) return false;
  if (std::abs(trace(m) - Complex(1.0, 0.0)) > tol) return false;
  const EigenDecomposition eig = hermitian_eig(m, tol);
  for (double lambda : eig.eigenvalues) {
    if (lambda < -tol) return false;
  }
  return true;
}

EigenDecomposition hermitian_eig(const Matrix& m, double tol) {
  if (!m.is_square()) {
    throw ShapeError("hermitian_eig: matrix is " +
                     shape_string(m.rows(), m.cols()));
  }
  const double sym_residual = hermiticity_residual(m);
  if (sym_residual > tol) {
    std::ostringstream os;
    os << "hermitian_eig: input hermiticity residual " << sym_residual
       << " exceeds tolerance " << tol;
    throw ValidationError(os.str());
  }

  const std::size_t n = m.rows();
  // Work on the exactly-Hermitian average of m and its adjoint so the sweep
  // below only ever sees a_ij = conj(a_ji).
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      a(i, j) = 0.5 * (m(i, j) + std::conj(m(j, i)));

  Matrix v = Matrix::identity(n);

  // Cyclic complex Jacobi: each rotation annihilates one off-diagonal pair.
  // Matrices here are tiny (pipeline dimension), so convergence is quick.
  const int max_sweeps = 64;
  const double off_target = 1e-14;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off = std::max(off, std::abs(a(p, q)));
    if (off <= off_target) break;

    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Complex apq = a(p, q);
        const double mag = std::abs(apq);
        if (mag <= off_target) continue;

        // Absorb the phase of a_pq so the 2x2 block is real symmetric, then
        // diagonalize it with a real Givens rotation.
        const Complex phase = apq / mag;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double theta = 0.5 * std::atan2(2.0 * mag, app - aqq);
        const double c = std::cos(theta);
        const Complex s = std::sin(theta) * phase;

        // Columns: col_p <- c*col_p + conj(s)*col_q ; col_q <- -s*col_p + c*col_q
        for (std::size_t i = 0; i < n; ++i) {
          const Complex aip = a(i, p);
          const Complex aiq = a(i, q);
          a(i, p) = c * aip + std::conj(s) * aiq;
          a(i, q) = -s * aip + c * aiq;
        }
        // Rows (conjugate rotation from the left).
        for (std::size_t j = 0; j < n; ++j) {
          const Complex apj = a(p, j);
          const Complex aqj = a(q, j);
          a(p, j) = c * apj + s * aqj;
          a(q, j) = -std::conj(s) * apj + c * aqj;
        }
        // Keep the eliminated pair and the diagonal exactly clean.
        a(p, q) = Complex{};
        a(q, p) = Complex{};
        a(p, p) = Complex(a(p, p).real(), 0.0);
        a(q, q) = Complex(a(q, q).real(), 0.0);

        for (std::size_t i = 0; i < n; ++i) {
          const Complex vip = v(i, p);
          const Complex viq = v(i, q);
          v(i, p) = c * vip + std::conj(s) * viq;
          v(i, q) = -s * vip + c * viq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return a(x, x).real() > a(y, y).real();
  });

  EigenDecomposition out;
  out.eigenvalues.reserve(n);
  out.eigenvectors.reserve(n);
  for (std::size_t k : order) {
    out.eigenvalues.push_back(a(k, k).real());
    Vector col(n);
    for (std::size_t i = 0; i < n; ++i) col[i] = v(i, k);
    out.eigenvectors.push_back(std::move(col));
  }
  return out;
}

}  // namespace qhist
