#include "peakfit.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace recoil {

double lorentzian(double x, double center, double fwhm, double height) {
  const double u = 2.0 * (x - center) / fwhm;
  return height / (1.0 + u * u);
}

// ---- damped least squares --------------------------------------------------

LMResult lm_minimize(int n_residuals, std::vector<double> x0,
                     const LMEval& eval, const FitOptions& opts) {
  const int p = static_cast<int>(x0.size());
  std::vector<double> r(n_residuals);
  Mat jac(n_residuals, p);

  eval(x0, r, &jac);
  double ssr = 0.0;
  for (double v : r) ssr += v * v;

  double lambda = opts.lambda0;
  LMResult out;
  out.params = x0;
  out.ssr = ssr;

  std::vector<double> r_try(n_residuals);
  int iter = 0;
  for (; iter < opts.max_iterations; ++iter) {
    // normal equations
    Mat jtj(p, p);
    std::vector<double> jtr(p, 0.0);
    for (int j = 0; j < p; ++j) {
      for (int k = 0; k <= j; ++k) {
        double s = 0.0;
        for (int i = 0; i < n_residuals; ++i) s += jac(i, j) * jac(i, k);
        jtj(j, k) = s;
        jtj(k, j) = s;
      }
      double s = 0.0;
      for (int i = 0; i < n_residuals; ++i) s += jac(i, j) * r[i];
      jtr[j] = s;
    }

    bool accepted = false;
    double ssr_try = ssr;
    std::vector<double> x_try;
    while (lambda < 1e14) {
      Mat damped = jtj;
      for (int j = 0; j < p; ++j)
        damped(j, j) += lambda * std::max(jtj(j, j), 1e-30);
      std::vector<double> step;
      try {
        std::vector<double> rhs(p);
        for (int j = 0; j < p; ++j) rhs[j] = -jtr[j];
        step = cholesky_solve(damped, rhs);
      } catch (const InputError&) {
        lambda *= opts.lambda_up;
        continue;
      }
      x_try = out.params;
      for (int j = 0; j < p; ++j) x_try[j] += step[j];
      eval(x_try, r_try, nullptr);
      ssr_try = 0.0;
      for (double v : r_try) ssr_try += v * v;
      if (std::isfinite(ssr_try) && ssr_try <= ssr) {
        accepted = true;
        break;
      }
      lambda *= opts.lambda_up;
    }
    if (!accepted) break;  // damping exhausted

    const double drop = ssr - ssr_try;
    out.params = x_try;
    ssr = ssr_try;
    lambda /= opts.lambda_down;
    eval(out.params, r, &jac);
    if (drop <= opts.relative_cost_tol * std::max(ssr, 1e-300)) {
      out.converged = true;
      ++iter;
      break;
    }
  }

  out.iterations = iter;
  out.ssr = ssr;

  // Covariance from the final Jacobian: sigma^2 (J^T J)^-1.
  Mat jtj(p, p);
  for (int j = 0; j < p; ++j)
    for (int k = 0; k <= j; ++k) {
      double s = 0.0;
      for (int i = 0; i < n_residuals; ++i) s += jac(i, j) * jac(i, k);
      jtj(j, k) = s;
      jtj(k, j) = s;
    }
  const int dof = std::max(1, n_residuals - p);
  const double sigma2 = ssr / dof;
  try {
    out.covariance = spd_inverse(jtj);
    for (double& v : out.covariance.a) v *= sigma2;
  } catch (const InputError&) {
    out.covariance = Mat(p, p);  // singular: report zero covariance
  }
  return out;
}

// ---- seeding helpers --------------------------------------------------------

std::vector<double> moving_median(const std::vector<double>& y, int window) {
  const int n = static_cast<int>(y.size());
  const int half = window / 2;
  std::vector<double> out(n);
  std::vector<double> buf;
  for (int i = 0; i < n; ++i) {
    const int lo = std::max(0, i - half);
    const int hi = std::min(n - 1, i + half);
    buf.assign(y.begin() + lo, y.begin() + hi + 1);
    std::nth_element(buf.begin(), buf.begin() + buf.size() / 2, buf.end());
    out[i] = buf[buf.size() / 2];
  }
  return out;
}

std::vector<size_t> local_extrema_ranked(const std::vector<double>& smoothed,
                                         bool minima, int min_separation,
                                         int max_count) {
  const int n = static_cast<int>(smoothed.size());
  auto value = [&](int i) { return minima ? -smoothed[i] : smoothed[i]; };
  std::vector<size_t> candidates;
  for (int i = 1; i + 1 < n; ++i)
    if (value(i) >= value(i - 1) && value(i) > value(i + 1))
      candidates.push_back(static_cast<size_t>(i));
  std::stable_sort(candidates.begin(), candidates.end(),
                   [&](size_t a, size_t b) {
                     return value(static_cast<int>(a)) > value(static_cast<int>(b));
                   });
  // Returned strongest-first so callers can truncate by rank.
  std::vector<size_t> picked;
  for (size_t c : candidates) {
    bool ok = true;
    for (size_t q : picked)
      if (std::llabs(static_cast<long long>(c) - static_cast<long long>(q)) <
          min_separation)
        ok = false;
    if (ok) picked.push_back(c);
    if (static_cast<int>(picked.size()) == max_count) break;
  }
  return picked;
}

// ---- fit_peak ----------------------------------------------------------------

namespace {

void eval_poly_background(const std::vector<double>& coeffs, double xc,
                          double x, double& value,
                          std::vector<double>* basis) {
  double pw = 1.0;
  value = 0.0;
  for (size_t j = 0; j < coeffs.size(); ++j) {
    value += coeffs[j] * pw;
    if (basis) (*basis)[j] = pw;
    pw *= (x - xc);
  }
}

}  // namespace

std::vector<PeakFit> fit_peak(const Spectrum& s, double window_lo,
                              double window_hi, int n_peaks,
                              int background_degree, const FitOptions& opts) {
  s.validate();
  if (n_peaks < 1 || n_peaks > 8)
    throw InputError("fit_peak: n_peaks must be in 1..8");
  if (background_degree < 0 || background_degree > 2)
    throw InputError("fit_peak: background degree must be 0..2");
  const auto [lo, hi] = s.window_indices(window_lo, window_hi);
  const int n = static_cast<int>(hi - lo);
  const int p = 3 * n_peaks + background_degree + 1;
  if (n < 3 * p)
    throw InputError("fit_peak: window has " + std::to_string(n) +
                     " points, needs at least " + std::to_string(3 * p));

  const std::vector<double> x(s.axis.begin() + lo, s.axis.begin() + hi);
  const std::vector<double> y(s.intensity.begin() + lo, s.intensity.begin() + hi);
  const double xc = 0.5 * (x.front() + x.back());
  const double step = (x.back() - x.front()) / (n - 1);

  // Seeds: endpoint background, median-smoothed local maxima, 5-step width.
  std::vector<double> bg0(background_degree + 1, 0.0);
  if (background_degree == 0) {
    bg0[0] = 0.5 * (y.front() + y.back());
  } else {
    const double slope = (y.back() - y.front()) / (x.back() - x.front());
    bg0[0] = y.front() + slope * (xc - x.front());
    bg0[1] = slope;
  }
  const auto smoothed = moving_median(y, 5);
  std::vector<double> detrended(smoothed.size());
  for (size_t i = 0; i < smoothed.size(); ++i) {
    double bgv;
    eval_poly_background(bg0, xc, x[i], bgv, nullptr);
    detrended[i] = smoothed[i] - bgv;
  }
  const auto seeds = local_extrema_ranked(detrended, false, 3, n_peaks);
  if (static_cast<int>(seeds.size()) < n_peaks)
    throw ResolveError("fit_peak: only " + std::to_string(seeds.size()) +
                           " of " + std::to_string(n_peaks) +
                           " peaks resolvable in window",
                       static_cast<int>(seeds.size()));

  std::vector<double> params;
  for (size_t si : seeds) {
    params.push_back(x[si]);                      // center
    params.push_back(5.0 * step);                 // fwhm
    params.push_back(std::max(detrended[si], 1e-12));  // height
  }
  params.insert(params.end(), bg0.begin(), bg0.end());

  auto eval = [&](const std::vector<double>& q, std::vector<double>& r,
                  Mat* jac) {
    std::vector<double> basis(background_degree + 1);
    const std::vector<double> bg(q.begin() + 3 * n_peaks, q.end());
    for (int i = 0; i < n; ++i) {
      double model;
      eval_poly_background(bg, xc, x[i], model, &basis);
      for (int k = 0; k < n_peaks; ++k) {
        const double c = q[3 * k], w = q[3 * k + 1], h = q[3 * k + 2];
        const double u = 2.0 * (x[i] - c) / w;
        const double d = 1.0 + u * u;
        model += h / d;
        if (jac) {
          (*jac)(i, 3 * k) = h * 4.0 * u / (w * d * d);          // d/dc
          (*jac)(i, 3 * k + 1) = h * 2.0 * u * u / (w * d * d);  // d/dw
          (*jac)(i, 3 * k + 2) = 1.0 / d;                        // d/dh
        }
      }
      if (jac)
        for (int j = 0; j <= background_degree; ++j)
          (*jac)(i, 3 * n_peaks + j) = basis[j];
      r[i] = model - y[i];
    }
  };

  const LMResult res = lm_minimize(n, params, eval, opts);

  std::vector<int> order(n_peaks);
  for (int k = 0; k < n_peaks; ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return res.params[3 * a] < res.params[3 * b];
  });

  std::vector<PeakFit> fits;
  for (int k : order) {
    PeakFit f;
    f.center = res.params[3 * k];
    f.fwhm = std::abs(res.params[3 * k + 1]);
    f.height = res.params[3 * k + 2];
    f.area = 0.5 * M_PI * f.height * f.fwhm;
    f.center_sigma = std::sqrt(std::max(0.0, res.covariance(3 * k, 3 * k)));
    f.fwhm_sigma =
        std::sqrt(std::max(0.0, res.covariance(3 * k + 1, 3 * k + 1)));
    f.height_sigma =
        std::sqrt(std::max(0.0, res.covariance(3 * k + 2, 3 * k + 2)));
    const double vw = res.covariance(3 * k + 1, 3 * k + 1);
    const double vh = res.covariance(3 * k + 2, 3 * k + 2);
    const double cwh = res.covariance(3 * k + 1, 3 * k + 2);
    f.area_sigma =
        0.5 * M_PI *
        std::sqrt(std::max(0.0, f.height * f.height * vw +
                                    f.fwhm * f.fwhm * vh +
                                    2.0 * f.height * f.fwhm * cwh));
    f.background.assign(res.params.begin() + 3 * n_peaks, res.params.end());
    f.background_center = xc;
    f.residual_norm = std::sqrt(res.ssr);
    f.converged = res.converged;
    fits.push_back(std::move(f));
  }
  return fits;
}

// ---- fit_template_background -------------------------------------------------

TemplateFit fit_template_background(const Spectrum& s, const Spectrum& tmpl,
                                    double window_lo, double window_hi,
                                    int background_degree) {
  s.validate();
  tmpl.validate();
  if (background_degree < 0 || background_degree > 2)
    throw InputError("fit_template_background: degree must be 0..2");
  const auto [lo, hi] = s.window_indices(window_lo, window_hi);
  const int n = static_cast<int>(hi - lo);
  const std::vector<double> x(s.axis.begin() + lo, s.axis.begin() + hi);
  const std::vector<double> y(s.intensity.begin() + lo, s.intensity.begin() + hi);
  const std::vector<double> tv = resample_linear(tmpl, x, "template");
  const double xc = 0.5 * (x.front() + x.back());

  const int p = background_degree + 2;
  auto build = [&](bool with_template) {
    const int cols = with_template ? p : p - 1;
    Mat a(n, cols);
    for (int i = 0; i < n; ++i) {
      int j = 0;
      if (with_template) a(i, j++) = tv[i];
      double pw = 1.0;
      for (int d = 0; d <= background_degree; ++d) {
        a(i, j++) = pw;
        pw *= (x[i] - xc);
      }
    }
    return a;
  };

  std::vector<double> r_diag;
  std::vector<double> sol;
  try {
    sol = lsq_qr(build(true), y, &r_diag);
  } catch (const InputError&) {
    throw InputError(
        "fit_template_background: rank-deficient system (template "
        "indistinguishable from the background basis on this window)");
  }
  double rmax = 0.0, rmin = 1e300;
  for (double d : r_diag) {
    rmax = std::max(rmax, std::abs(d));
    rmin = std::min(rmin, std::abs(d));
  }
  if (rmin < 1e-10 * rmax)
    throw InputError(
        "fit_template_background: rank-deficient system (template "
        "indistinguishable from the background basis on this window)");

  TemplateFit out;
  out.background_center = xc;
  if (sol[0] >= 0.0) {
    out.scale = sol[0];
    out.background.assign(sol.begin() + 1, sol.end());
  } else {
    out.scale = 0.0;  // constrained fit lands on the boundary
    out.background = lsq_qr(build(false), y, nullptr);
  }

  double ssr = 0.0;
  for (int i = 0; i < n; ++i) {
    double model = out.scale * tv[i];
    double pw = 1.0;
    for (size_t d = 0; d < out.background.size(); ++d) {
      model += out.background[d] * pw;
      pw *= (x[i] - xc);
    }
    ssr += (model - y[i]) * (model - y[i]);
  }
  out.residual_norm = std::sqrt(ssr);

  // 1-sigma of the scale from the unconstrained normal equations.
  Mat a = build(true);
  Mat jtj(p, p);
  for (int j = 0; j < p; ++j)
    for (int k = 0; k <= j; ++k) {
      double sdot = 0.0;
      for (int i = 0; i < n; ++i) sdot += a(i, j) * a(i, k);
      jtj(j, k) = sdot;
      jtj(k, j) = sdot;
    }
  try {
    const Mat cov = spd_inverse(jtj);
    const double sigma2 = ssr / std::max(1, n - p);
    out.scale_sigma = std::sqrt(std::max(0.0, cov(0, 0) * sigma2));
  } catch (const InputError&) {
    out.scale_sigma = 0.0;
  }
  return out;
}

// ---- charge_ratio --------------------------------------------------------------

ChargeRatio charge_ratio(const Spectrum& s, double window_half_nm) {
  if (s.kind != AxisKind::WavelengthNm)
    throw InputError("charge_ratio: wavelength-axis spectrum required");
  const double nv0_zpl = 575.0, nvm_zpl = 637.0;
  if (s.axis.front() > nv0_zpl - window_half_nm ||
      s.axis.back() < nvm_zpl + window_half_nm)
    throw InputError("charge_ratio: spectrum must cover the 575 nm and 637 nm "
                     "zero-phonon lines");
  ChargeRatio out;
  auto fits0 = fit_peak(s, nv0_zpl - window_half_nm, nv0_zpl + window_half_nm,
                        1, 2);
  auto fitsm = fit_peak(s, nvm_zpl - window_half_nm, nvm_zpl + window_half_nm,
                        1, 2);
  out.nv0 = fits0[0];
  out.nvm = fitsm[0];
  if (!out.nv0.converged || !out.nvm.converged)
    throw InputError("charge_ratio: zero-phonon-line fit did not converge");
  const double a = out.nvm.area, b = out.nv0.area;
  if (!(a + b > 0.0)) throw InputError("charge_ratio: zero total ZPL area");
  out.ratio = a / (a + b);
  const double den = (a + b) * (a + b);
  out.sigma = std::sqrt(b * b * out.nvm.area_sigma * out.nvm.area_sigma +
                        a * a * out.nv0.area_sigma * out.nv0.area_sigma) /
              den;
  return out;
}

}  // namespace recoil
