#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace jacnet {

using Vector = std::vector<double>;

class SingularMatrixError : public std::runtime_error {
 public:
  explicit SingularMatrixError(const std::string& what) : std::runtime_error(what) {}
};

/// Dense row-major fp64 matrix. Everything in this project is small
/// (at most ~64x64), so there are no sparse or blocked paths.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;  // row-major, rows*cols entries

  Matrix() = default;
  Matrix(int r, int c, double fill = 0.0);

  double& operator()(int i, int j) { return data[static_cast<std::size_t>(i) * cols + j]; }
  double operator()(int i, int j) const { return data[static_cast<std::size_t>(i) * cols + j]; }

  static Matrix identity(int n);
};

Vector matvec(const Matrix& m, const Vector& v);
Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& m);

/// Inverse via LU with partial pivoting. A pivot magnitude below 1e-12
/// throws SingularMatrixError.
Matrix lu_inverse(const Matrix& m);

/// Signed product of the LU pivots. Returns 0.0 for singular input.
double determinant(const Matrix& m);

/// True iff all eigenvalues of m are >= floor, decided by attempting a
/// Cholesky factorization of m - floor*I (tolerating factorization
/// roundoff). Input must be symmetric within 1e-12.
bool cholesky_check(const Matrix& m, double floor);

// Small vector helpers shared by the numeric modules.
Vector add(const Vector& a, const Vector& b);
Vector sub(const Vector& a, const Vector& b);
Vector scale(const Vector& v, double s);
void axpy(double alpha, const Vector& x, Vector& y);  // y += alpha*x
double max_abs(const Vector& v);
Matrix outer(const Vector& u, const Vector& v);
bool all_finite(const Vector& v);
bool all_finite(const Matrix& m);

}  // namespace jacnet
