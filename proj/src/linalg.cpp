#include "jacnet/linalg.hpp"

#include <cmath>
#include <cstdlib>

namespace jacnet {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

struct LuFactors {
  Matrix lu;              // L below diagonal (unit diag implicit), U on/above
  std::vector<int> perm;  // row permutation applied to the input
  double sign = 1.0;      // permutation sign
};

// Doolittle LU with partial pivoting. Zero pivots are left in place (the
// column below a zero pivot is necessarily zero as well), so factorization
// always completes and the determinant falls out of the diagonal.
LuFactors lu_factor(const Matrix& m) {
  const int n = m.rows;
  LuFactors f{m, std::vector<int>(n), 1.0};
  for (int i = 0; i < n; ++i) f.perm[i] = i;
  for (int col = 0; col < n; ++col) {
    int piv = col;
    double best = std::abs(f.lu(col, col));
    for (int r = col + 1; r < n; ++r) {
      double v = std::abs(f.lu(r, col));
      if (v > best) {
        best = v;
        piv = r;
      }
    }
    if (piv != col) {
      for (int j = 0; j < n; ++j) std::swap(f.lu(col, j), f.lu(piv, j));
      std::swap(f.perm[col], f.perm[piv]);
      f.sign = -f.sign;
    }
    const double pivot = f.lu(col, col);
    if (pivot == 0.0) continue;
    for (int r = col + 1; r < n; ++r) {
      const double mult = f.lu(r, col) / pivot;
      f.lu(r, col) = mult;
      for (int j = col + 1; j < n; ++j) f.lu(r, j) -= mult * f.lu(col, j);
    }
  }
  return f;
}

// Solve LU x = b (b already permuted by the caller).
Vector lu_solve_permuted(const LuFactors& f, const Vector& b) {
  const int n = f.lu.rows;
  Vector x(b);
  for (int i = 1; i < n; ++i) {
    double s = x[i];
    for (int j = 0; j < i; ++j) s -= f.lu(i, j) * x[j];
    x[i] = s;
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = x[i];
    for (int j = i + 1; j < n; ++j) s -= f.lu(i, j) * x[j];
    x[i] = s / f.lu(i, i);
  }
  return x;
}

constexpr double kPivotFloor = 1e-12;

}  // namespace

Matrix::Matrix(int r, int c, double fill)
    : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, fill) {
  require(r > 0 && c > 0, "Matrix: dimensions must be positive");
}

Matrix Matrix::identity(int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Vector matvec(const Matrix& m, const Vector& v) {
  require(m.cols == static_cast<int>(v.size()), "matvec: dimension mismatch");
  Vector out(m.rows, 0.0);
  for (int i = 0; i < m.rows; ++i) {
    double s = 0.0;
    for (int j = 0; j < m.cols; ++j) s += m(i, j) * v[j];
    out[i] = s;
  }
  return out;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  require(a.cols == b.rows, "matmul: dimension mismatch");
  Matrix out(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i)
    for (int k = 0; k < a.cols; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < b.cols; ++j) out(i, j) += aik * b(k, j);
    }
  return out;
}

Matrix transpose(const Matrix& m) {
  Matrix out(m.cols, m.rows);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) out(j, i) = m(i, j);
  return out;
}

Matrix lu_inverse(const Matrix& m) {
  require(m.rows == m.cols, "lu_inverse: matrix must be square");
  const int n = m.rows;
  LuFactors f = lu_factor(m);
  for (int i = 0; i < n; ++i) {
    if (std::abs(f.lu(i, i)) < kPivotFloor)
      throw SingularMatrixError("lu_inverse: pivot below 1e-12 at index " + std::to_string(i));
  }
  Matrix inv(n, n);
  Vector e(n, 0.0);
  for (int col = 0; col < n; ++col) {
    for (int i = 0; i < n; ++i) e[i] = (f.perm[i] == col) ? 1.0 : 0.0;
    Vector x = lu_solve_permuted(f, e);
    for (int i = 0; i < n; ++i) inv(i, col) = x[i];
  }
  return inv;
}

double determinant(const Matrix& m) {
  require(m.rows == m.cols, "determinant: matrix must be square");
  LuFactors f = lu_factor(m);
  double det = f.sign;
  for (int i = 0; i < m.rows; ++i) det *= f.lu(i, i);
  return det;
}

bool cholesky_check(const Matrix& m, double floor) {
  require(m.rows == m.cols, "cholesky_check: matrix must be square");
  const int n = m.rows;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      require(std::abs(m(i, j) - m(j, i)) <= 1e-12, "cholesky_check: matrix not symmetric");

  Matrix a = m;
  for (int i = 0; i < n; ++i) a(i, i) -= floor;

  double scl = 1.0;
  for (int i = 0; i < n; ++i) scl = std::max(scl, std::abs(a(i, i)));
  const double tol = 1e-12 * scl;       // diagonal roundoff allowance
  const double col_tol = 1e-6 * scl;    // off-diagonal allowance at a zero pivot

  Matrix chol(n, n);
  for (int j = 0; j < n; ++j) {
    double d = a(j, j);
    for (int k = 0; k < j; ++k) d -= chol(j, k) * chol(j, k);
    if (d < -tol) return false;
    if (d <= tol) {
      // Semidefinite pivot: valid only if the rest of the column vanishes too.
      chol(j, j) = 0.0;
      for (int i = j + 1; i < n; ++i) {
        double s = a(i, j);
        for (int k = 0; k < j; ++k) s -= chol(i, k) * chol(j, k);
        if (std::abs(s) > col_tol) return false;
        chol(i, j) = 0.0;
      }
    } else {
      chol(j, j) = std::sqrt(d);
      for (int i = j + 1; i < n; ++i) {
        double s = a(i, j);
        for (int k = 0; k < j; ++k) s -= chol(i, k) * chol(j, k);
        chol(i, j) = s / chol(j, j);
      }
    }
  }
  return true;
}

Vector add(const Vector& a, const Vector& b) {
  require(a.size() == b.size(), "add: dimension mismatch");
  Vector out(a);
  for (std::size_t i = 0; i < b.size(); ++i) out[i] += b[i];
  return out;
}

Vector sub(const Vector& a, const Vector& b) {
  require(a.size() == b.size(), "sub: dimension mismatch");
  Vector out(a);
  for (std::size_t i = 0; i < b.size(); ++i) out[i] -= b[i];
  return out;
}

Vector scale(const Vector& v, double s) {
  Vector out(v);
  for (double& x : out) x *= s;
  return out;
}

void axpy(double alpha, const Vector& x, Vector& y) {
  if (x.size() != y.size()) throw std::invalid_argument("axpy: dimension mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

double max_abs(const Vector& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

Matrix outer(const Vector& u, const Vector& v) {
  Matrix out(static_cast<int>(u.size()), static_cast<int>(v.size()));
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j)
      out(static_cast<int>(i), static_cast<int>(j)) = u[i] * v[j];
  return out;
}

bool all_finite(const Vector& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

bool all_finite(const Matrix& m) { return all_finite(m.data); }

}  // namespace jacnet
