#include "unmix.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"
#include "linalg.hpp"

namespace recoil {

UnmixResult unmix(const UnmixInput& input) {
  input.spectrum.validate();
  if (input.models.empty()) throw InputError("unmix: no model spectra");
  const auto [lo, hi] =
      input.spectrum.window_indices(input.band_lo_nm, input.band_hi_nm);
  const int n = static_cast<int>(hi - lo);
  const std::vector<double> x(input.spectrum.axis.begin() + lo,
                              input.spectrum.axis.begin() + hi);
  const std::vector<double> y(input.spectrum.intensity.begin() + lo,
                              input.spectrum.intensity.begin() + hi);
  const double xc = 0.5 * (x.front() + x.back());

  std::vector<std::string> names;
  std::vector<std::vector<double>> model_cols;
  for (const auto& [name, model] : input.models) {
    names.push_back(name);
    model_cols.push_back(resample_linear(model, x, "model '" + name + "'"));
  }
  const int n_models = static_cast<int>(names.size());
  const int n_bg = 3;  // quadratic background
  const int p = n_models + n_bg;
  if (n < p) throw InputError("unmix: band covers too few points");

  auto solve_subset = [&](unsigned zero_mask, std::vector<double>& sol,
                          std::vector<double>* r_diag) {
    std::vector<int> free_models;
    for (int m = 0; m < n_models; ++m)
      if (!(zero_mask & (1u << m))) free_models.push_back(m);
    const int cols = static_cast<int>(free_models.size()) + n_bg;
    Mat a(n, cols);
    for (int i = 0; i < n; ++i) {
      int j = 0;
      for (int m : free_models) a(i, j++) = model_cols[m][i];
      double pw = 1.0;
      for (int d = 0; d < n_bg; ++d) {
        a(i, j++) = pw;
        pw *= (x[i] - xc);
      }
    }
    const auto q = lsq_qr(a, y, r_diag);
    sol.assign(p, 0.0);
    for (size_t k = 0; k < free_models.size(); ++k)
      sol[free_models[k]] = q[k];
    for (int d = 0; d < n_bg; ++d)
      sol[n_models + d] = q[free_models.size() + d];
  };

  auto ssr_of = [&](const std::vector<double>& sol) {
    double ssr = 0.0;
    for (int i = 0; i < n; ++i) {
      double model = 0.0;
      for (int m = 0; m < n_models; ++m) model += sol[m] * model_cols[m][i];
      double pw = 1.0;
      for (int d = 0; d < n_bg; ++d) {
        model += sol[n_models + d] * pw;
        pw *= (x[i] - xc);
      }
      ssr += (model - y[i]) * (model - y[i]);
    }
    return ssr;
  };

  // The constrained optimum has some active set of models pinned at zero;
  // with a handful of models, checking every subset is exact and cheap.
  std::vector<double> best;
  double best_ssr = 0.0;
  bool have = false;
  std::vector<double> r_diag_full;
  for (unsigned mask = 0; mask < (1u << n_models); ++mask) {
    std::vector<double> sol;
    try {
      solve_subset(mask, sol, mask == 0 ? &r_diag_full : nullptr);
    } catch (const InputError&) {
      if (mask == 0)
        throw InputError("unmix: model spectra are collinear on the band");
      continue;
    }
    bool feasible = true;
    for (int m = 0; m < n_models; ++m)
      if (sol[m] < 0.0) feasible = false;
    if (!feasible) continue;
    const double ssr = ssr_of(sol);
    if (!have || ssr < best_ssr) {
      best = sol;
      best_ssr = ssr;
      have = true;
    }
  }
  if (!have) throw InternalError("unmix: no feasible active set");

  UnmixResult out;
  out.background_center = xc;
  double rmax = 0.0, rmin = 1e300;
  for (double d : r_diag_full) {
    rmax = std::max(rmax, std::abs(d));
    rmin = std::min(rmin, std::abs(d));
  }
  out.condition_number = rmin > 0.0 ? rmax / rmin : 1e300;
  out.ill_conditioned = out.condition_number > 1e8;

  std::vector<double> fit(n, 0.0), bg(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double pw = 1.0;
    for (int d = 0; d < n_bg; ++d) {
      bg[i] += best[n_models + d] * pw;
      pw *= (x[i] - xc);
    }
    fit[i] = bg[i];
    for (int m = 0; m < n_models; ++m) fit[i] += best[m] * model_cols[m][i];
  }
  for (int m = 0; m < n_models; ++m) {
    out.weights[names[m]] = best[m];
    std::vector<double> comp(n);
    for (int i = 0; i < n; ++i) comp[i] = best[m] * model_cols[m][i];
    out.contributions[names[m]] =
        trapezoid(x, comp, input.band_lo_nm, input.band_hi_nm);
  }
  out.background.assign(best.begin() + n_models, best.end());
  out.background_integral = trapezoid(x, bg, input.band_lo_nm, input.band_hi_nm);
  out.total_fit_integral = trapezoid(x, fit, input.band_lo_nm, input.band_hi_nm);
  out.residual_norm = std::sqrt(best_ssr);
  if (out.contributions.count("NV"))
    out.nv_with_background =
        out.contributions.at("NV") + out.background_integral;
  return out;
}

}  // namespace recoil
