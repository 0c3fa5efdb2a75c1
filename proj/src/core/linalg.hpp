#pragma once

#include <cmath>
#include <vector>

#include "errors.hpp"

namespace recoil {

// Small dense column-major matrix, just enough for the fitting code.
struct Mat {
  int rows = 0, cols = 0;
  std::vector<double> a;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0.0) {}
  double& operator()(int i, int j) { return a[static_cast<size_t>(j) * rows + i]; }
  double operator()(int i, int j) const {
    return a[static_cast<size_t>(j) * rows + i];
  }
};

// Least-squares solve of min ||A x - b|| by Householder QR. Returns the
// solution; optionally reports the R diagonal for rank diagnostics.
std::vector<double> lsq_qr(Mat A, std::vector<double> b,
                           std::vector<double>* r_diag = nullptr);

// Cholesky solve of the SPD system M x = b (in place on copies).
std::vector<double> cholesky_solve(Mat M, std::vector<double> b);

// Inverse of an SPD matrix via Cholesky (for covariance estimates).
Mat spd_inverse(Mat M);

}  // namespace recoil
