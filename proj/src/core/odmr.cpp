#include "odmr.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace recoil {

std::array<double, 8> predict_odmr(const Vec3& field_gauss, double d_ghz,
                                   double gamma_mhz_per_g) {
  // The four <111> axes of the diamond lattice.
  static const std::array<Vec3, 4> axes = {
      Vec3{1.0, 1.0, 1.0}, Vec3{1.0, -1.0, -1.0}, Vec3{-1.0, 1.0, -1.0},
      Vec3{-1.0, -1.0, 1.0}};
  const double inv_sqrt3 = 1.0 / std::sqrt(3.0);
  std::array<double, 8> out{};
  const double d_mhz = d_ghz * 1000.0;
  for (size_t k = 0; k < axes.size(); ++k) {
    const double proj = std::abs(field_gauss.x * axes[k].x +
                                 field_gauss.y * axes[k].y +
                                 field_gauss.z * axes[k].z) *
                        inv_sqrt3;
    const double split = gamma_mhz_per_g * proj;
    out[2 * k] = d_mhz - split;
    out[2 * k + 1] = d_mhz + split;
  }
  std::sort(out.begin(), out.end());
  return out;
}

OdmrFit fit_odmr(const Spectrum& s, int n_dips, const FitOptions& opts) {
  s.validate();
  if (s.kind == AxisKind::WavelengthNm)
    throw InputError("fit_odmr: frequency-axis spectrum required");
  if (n_dips < 1 || n_dips > 8)
    throw InputError("fit_odmr: n_dips must be in 1..8");
  const double to_mhz = (s.kind == AxisKind::FrequencyGHz) ? 1000.0 : 1.0;

  const int n = static_cast<int>(s.size());
  const int p = 3 * n_dips + 1;
  if (n < 3 * p)
    throw InputError("fit_odmr: spectrum has too few points for " +
                     std::to_string(n_dips) + " dips");
  std::vector<double> x(n), y(s.intensity);
  for (int i = 0; i < n; ++i) x[i] = s.axis[i] * to_mhz;
  const double step = (x.back() - x.front()) / (n - 1);

  // Seeds: constant baseline from the median, dips from local minima of the
  // median-smoothed trace that actually undercut the baseline.
  std::vector<double> sorted_y = y;
  std::nth_element(sorted_y.begin(), sorted_y.begin() + n / 2, sorted_y.end());
  const double baseline0 = sorted_y[n / 2];
  const auto smoothed = moving_median(y, 5);
  const auto candidates = local_extrema_ranked(smoothed, true, 3, 6 * n_dips);
  double noise = 0.0;
  for (int i = 0; i < n; ++i) noise += std::abs(y[i] - smoothed[i]);
  noise = std::max(noise / n, 1e-12);
  // Candidates arrive deepest-first. Keep the ones clearly below the
  // baseline, merging candidates that share a dip: two minima count as one
  // unless the trace rises significantly between them (prominence rule).
  std::vector<size_t> seeds;
  for (size_t c : candidates) {
    if (baseline0 - smoothed[c] <= 3.5 * noise) continue;
    bool merged = false;
    for (size_t p : seeds) {
      const size_t a = std::min(c, p), b = std::max(c, p);
      double ridge = -1e300;
      for (size_t i = a; i <= b; ++i) ridge = std::max(ridge, smoothed[i]);
      if (ridge - std::max(smoothed[c], smoothed[p]) <= 3.5 * noise) {
        merged = true;
        break;
      }
    }
    if (!merged) seeds.push_back(c);
    if (static_cast<int>(seeds.size()) == n_dips) break;
  }
  std::sort(seeds.begin(), seeds.end());
  if (static_cast<int>(seeds.size()) < n_dips)
    throw ResolveError("fit_odmr: only " + std::to_string(seeds.size()) +
                           " of " + std::to_string(n_dips) +
                           " dips resolvable",
                       static_cast<int>(seeds.size()));

  // Parameters: [c1, w1, depth1, ..., baseline].
  std::vector<double> params;
  for (size_t si : seeds) {
    params.push_back(x[si]);
    params.push_back(5.0 * step);
    params.push_back(std::max(baseline0 - smoothed[si], 1e-12));
  }
  params.push_back(baseline0);

  auto eval = [&](const std::vector<double>& q, std::vector<double>& r,
                  Mat* jac) {
    for (int i = 0; i < n; ++i) {
      double model = q[3 * n_dips];
      for (int k = 0; k < n_dips; ++k) {
        const double c = q[3 * k], w = q[3 * k + 1], depth = q[3 * k + 2];
        const double u = 2.0 * (x[i] - c) / w;
        const double d = 1.0 + u * u;
        model -= depth / d;
        if (jac) {
          (*jac)(i, 3 * k) = -depth * 4.0 * u / (w * d * d);
          (*jac)(i, 3 * k + 1) = -depth * 2.0 * u * u / (w * d * d);
          (*jac)(i, 3 * k + 2) = -1.0 / d;
        }
      }
      if (jac) (*jac)(i, 3 * n_dips) = 1.0;
      r[i] = model - y[i];
    }
  };

  const LMResult res = lm_minimize(n, params, eval, opts);

  std::vector<int> order(n_dips);
  for (int k = 0; k < n_dips; ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return res.params[3 * a] < res.params[3 * b];
  });

  OdmrFit fit;
  fit.baseline = res.params[3 * n_dips];
  fit.converged = res.converged;
  fit.residual_norm = std::sqrt(res.ssr);
  for (int k : order) {
    OdmrDip dip;
    dip.center_mhz = res.params[3 * k];
    dip.fwhm_mhz = std::abs(res.params[3 * k + 1]);
    dip.contrast = res.params[3 * k + 2] / fit.baseline;
    dip.center_sigma_mhz =
        std::sqrt(std::max(0.0, res.covariance(3 * k, 3 * k)));
    dip.fwhm_sigma_mhz =
        std::sqrt(std::max(0.0, res.covariance(3 * k + 1, 3 * k + 1)));
    dip.contrast_sigma =
        std::sqrt(std::max(0.0, res.covariance(3 * k + 2, 3 * k + 2))) /
        fit.baseline;
    fit.dips.push_back(dip);
  }

  if (n_dips == 8) {
    for (int i = 0; i < 4; ++i)
      fit.pair_midpoints_mhz[i] =
          0.5 * (fit.dips[i].center_mhz + fit.dips[7 - i].center_mhz);
    double mean = 0.0;
    for (double m : fit.pair_midpoints_mhz) mean += m;
    mean /= 4.0;
    double var = 0.0;
    for (double m : fit.pair_midpoints_mhz) var += (m - mean) * (m - mean);
    var /= 3.0;  // sample variance over the 4 pairs
    fit.zfs_mean_ghz = mean / 1000.0;
    fit.zfs_std_ghz = std::sqrt(var) / 1000.0;
  }
  return fit;
}

}  // namespace recoil
