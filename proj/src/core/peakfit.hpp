#pragma once

#include <functional>
#include <vector>

#include "linalg.hpp"
#include "spectrum.hpp"

namespace recoil {

// Lorentzian with height h, center c and full width at half maximum w:
// L(x) = h / (1 + 4 (x-c)^2 / w^2); area = (pi/2) h w.
double lorentzian(double x, double center, double fwhm, double height);

struct PeakFit {
  double center = 0.0, fwhm = 0.0, height = 0.0, area = 0.0;
  double center_sigma = 0.0, fwhm_sigma = 0.0, height_sigma = 0.0,
         area_sigma = 0.0;
  std::vector<double> background;  // coefficients in powers of (x - center0)
  double background_center = 0.0;
  double residual_norm = 0.0;
  bool converged = false;
};

struct FitOptions {
  int max_iterations = 200;
  double relative_cost_tol = 1e-10;
  double lambda0 = 1e-3;
  double lambda_up = 2.0;    // rejected step
  double lambda_down = 3.0;  // accepted step
};

// Damped least squares (Gauss-Newton with adaptive damping).
struct LMResult {
  std::vector<double> params;
  Mat covariance;
  double ssr = 0.0;
  int iterations = 0;
  bool converged = false;
};
using LMEval = std::function<void(const std::vector<double>& params,
                                  std::vector<double>& residuals, Mat* jac)>;
LMResult lm_minimize(int n_residuals, std::vector<double> x0,
                     const LMEval& eval, const FitOptions& opts = {});

// Fits n_peaks Lorentzians plus a polynomial background (degree 0..2) on the
// window. Peaks are seeded from local maxima of the median-smoothed data and
// returned sorted by center.
std::vector<PeakFit> fit_peak(const Spectrum& s, double window_lo,
                              double window_hi, int n_peaks,
                              int background_degree,
                              const FitOptions& opts = {});

struct TemplateFit {
  double scale = 0.0;
  double scale_sigma = 0.0;
  std::vector<double> background;
  double background_center = 0.0;
  double residual_norm = 0.0;
};

// Linear fit of spectrum ~ scale * template + polynomial background;
// the scale is constrained non-negative.
TemplateFit fit_template_background(const Spectrum& s, const Spectrum& tmpl,
                                    double window_lo, double window_hi,
                                    int background_degree = 2);

struct ChargeRatio {
  double ratio = 0.0;  // area637 / (area637 + area575)
  double sigma = 0.0;
  PeakFit nv0;  // 575 nm
  PeakFit nvm;  // 637 nm
};

// NV-/(NV- + NV0) from the fitted ZPL areas at 637 nm and 575 nm, each on a
// quadratic background.
ChargeRatio charge_ratio(const Spectrum& s, double window_half_nm = 3.0);

// Seed-finding helpers shared with the ODMR fitter.
std::vector<double> moving_median(const std::vector<double>& y, int window);
std::vector<size_t> local_extrema_ranked(const std::vector<double>& smoothed,
                                         bool minima, int min_separation,
                                         int max_count);

}  // namespace recoil
