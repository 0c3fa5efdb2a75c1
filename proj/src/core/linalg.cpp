#include "linalg.hpp"

#include <algorithm>

namespace recoil {

std::vector<double> lsq_qr(Mat A, std::vector<double> b,
                           std::vector<double>* r_diag) {
  const int m = A.rows, n = A.cols;
  if (static_cast<int>(b.size()) != m)
    throw InternalError("lsq_qr: dimension mismatch");
  if (m < n) throw InputError("lsq_qr: underdetermined system");

  // Householder QR, applying reflectors to b as we go.
  for (int k = 0; k < n; ++k) {
    double norm = 0.0;
    for (int i = k; i < m; ++i) norm += A(i, k) * A(i, k);
    norm = std::sqrt(norm);
    if (norm == 0.0) {
      if (r_diag) {
        r_diag->assign(n, 0.0);
        for (int j = 0; j < n; ++j) (*r_diag)[j] = (j < k) ? A(j, j) : 0.0;
      }
      throw InputError("lsq_qr: rank-deficient system (column " +
                       std::to_string(k) + ")");
    }
    const double alpha = (A(k, k) >= 0.0) ? -norm : norm;
    // v = x - alpha e1, stored in place below the diagonal
    A(k, k) -= alpha;
    double vtv = 0.0;
    for (int i = k; i < m; ++i) vtv += A(i, k) * A(i, k);
    for (int j = k + 1; j < n; ++j) {
      double dot = 0.0;
      for (int i = k; i < m; ++i) dot += A(i, k) * A(i, j);
      const double f = 2.0 * dot / vtv;
      for (int i = k; i < m; ++i) A(i, j) -= f * A(i, k);
    }
    double dot = 0.0;
    for (int i = k; i < m; ++i) dot += A(i, k) * b[i];
    const double f = 2.0 * dot / vtv;
    for (int i = k; i < m; ++i) b[i] -= f * A(i, k);
    A(k, k) = alpha;  // R diagonal
  }

  if (r_diag) {
    r_diag->resize(n);
    for (int j = 0; j < n; ++j) (*r_diag)[j] = A(j, j);
  }

  // Back substitution on R x = Q^T b.
  std::vector<double> x(n, 0.0);
  for (int i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (int j = i + 1; j < n; ++j) s -= A(i, j) * x[j];
    x[i] = s / A(i, i);
  }
  return x;
}

std::vector<double> cholesky_solve(Mat M, std::vector<double> b) {
  const int n = M.rows;
  if (M.cols != n || static_cast<int>(b.size()) != n)
    throw InternalError("cholesky_solve: dimension mismatch");
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < j; ++k)
      for (int i = j; i < n; ++i) M(i, j) -= M(i, k) * M(j, k);
    if (!(M(j, j) > 0.0))
      throw InputError("cholesky_solve: matrix not positive definite");
    const double d = std::sqrt(M(j, j));
    for (int i = j; i < n; ++i) M(i, j) /= d;
  }
  for (int i = 0; i < n; ++i) {  // L y = b
    double s = b[i];
    for (int j = 0; j < i; ++j) s -= M(i, j) * b[j];
    b[i] = s / M(i, i);
  }
  for (int i = n - 1; i >= 0; --i) {  // L^T x = y
    double s = b[i];
    for (int j = i + 1; j < n; ++j) s -= M(j, i) * b[j];
    b[i] = s / M(i, i);
  }
  return b;
}

Mat spd_inverse(Mat M) {
  const int n = M.rows;
  Mat inv(n, n);
  for (int c = 0; c < n; ++c) {
    std::vector<double> e(n, 0.0);
    e[c] = 1.0;
    const auto col = cholesky_solve(M, std::move(e));
    for (int r = 0; r < n; ++r) inv(r, c) = col[r];
  }
  return inv;
}

}  // namespace recoil
