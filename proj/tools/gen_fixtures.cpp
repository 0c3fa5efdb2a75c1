// Regenerates the shipped data files: synthetic model spectra, the demo
// hyperspectral cube, the ODMR fixture and the FIB recipe table (beam
// diameters back-solved from the published fluence values). Development
// utility; the outputs are committed under data/.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fib_dose.hpp"
#include "hyperspectral.hpp"
#include "odmr.hpp"
#include "peakfit.hpp"
#include "rng.hpp"
#include "spectrum.hpp"

using namespace recoil;

namespace {

void save(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
  std::printf("wrote %s (%zu bytes)\n", path.c_str(), text.size());
}

double gaussian(double x, double c, double sigma, double h) {
  const double u = (x - c) / sigma;
  return h * std::exp(-0.5 * u * u);
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = a + (b - a) * i / (n - 1);
  return x;
}

void add_noise(Spectrum& s, double sigma, RngStream& rng) {
  for (auto& v : s.intensity) {
    const double u1 = std::max(rng.uniform(), 1e-12);
    const double u2 = rng.uniform();
    v += sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }
}

// ---- model spectra ------------------------------------------------------

Spectrum nv_model(const std::vector<double>& axis) {
  Spectrum s{AxisKind::WavelengthNm, axis, {}};
  s.intensity.resize(axis.size());
  for (size_t i = 0; i < axis.size(); ++i) {
    const double x = axis[i];
    // ZPL at 637 nm plus a broad phonon-sideband hump
    s.intensity[i] = lorentzian(x, 637.0, 1.6, 1.0) +
                     gaussian(x, 660.0, 12.0, 0.50) +
                     gaussian(x, 682.0, 16.0, 0.78) +
                     gaussian(x, 708.0, 20.0, 0.52) +
                     gaussian(x, 740.0, 26.0, 0.22);
  }
  return s;
}

Spectrum siv_model(const std::vector<double>& axis) {
  Spectrum s{AxisKind::WavelengthNm, axis, {}};
  s.intensity.resize(axis.size());
  for (size_t i = 0; i < axis.size(); ++i) {
    const double x = axis[i];
    s.intensity[i] = lorentzian(x, 737.0, 1.3, 1.0) +
                     gaussian(x, 757.0, 7.0, 0.06) +
                     gaussian(x, 766.0, 9.0, 0.03);
  }
  return s;
}

Spectrum irradiation_model(const std::vector<double>& axis) {
  Spectrum s{AxisKind::WavelengthNm, axis, {}};
  s.intensity.resize(axis.size());
  for (size_t i = 0; i < axis.size(); ++i) {
    const double x = axis[i];
    // broad structureless fluorescence with a mild double hump
    s.intensity[i] =
        gaussian(x, 662.0, 28.0, 0.55) + gaussian(x, 742.0, 38.0, 1.0);
  }
  return s;
}

// ---- FIB recipe table -----------------------------------------------------

struct Row {
  const char* name;
  double current_na, dwell_us;
  int passes;
  double fluence, sigma;  // published central values
};

double round_3sig(double v) {
  const double scale = std::pow(10.0, std::floor(std::log10(v)) - 2.0);
  return std::round(v / scale) * scale;
}

void make_recipes_csv(const std::string& path) {
  const std::vector<Row> rows = {
      {"P1", 0.79, 1.0, 10, 1.30e16, 0.14e16},
      {"P2", 0.79, 1.0, 2, 2.61e15, 0.28e15},
      {"P3", 0.43, 1.0, 1, 1.14e15, 0.15e15},
      {"P4", 0.08, 1.0, 1, 9.7e14, 2.8e14},
      {"P5", 0.024, 1.0, 1, 5.19e14, 0.50e14},
      {"P6", 0.0077, 1.0, 1, 2.87e14, 0.36e14},
      {"P7", 0.0013, 1.0, 1, 1.24e14, 0.25e14},
      {"P8", 0.0013, 0.5, 1, 6.2e13, 1.2e13},
      {"P9", 0.0013, 0.25, 1, 3.10e13, 0.62e13},
      {"P10", 0.0013, 0.1, 1, 1.24e13, 0.25e13},
      {"P11", 0.0013, 0.05, 1, 6.2e12, 1.2e12},
      {"P12", 0.0013, 0.025, 1, 3.10e12, 0.62e12},
  };

  // Back-solve one spot diameter per beam current such that every row using
  // that current reproduces its published fluence to the printed digits.
  std::string csv =
      "name,current_nA,dwell_us,passes,overlap,diameter_nm,diameter_sigma_nm\n";
  std::vector<bool> done(rows.size(), false);
  for (size_t i = 0; i < rows.size(); ++i) {
    if (done[i]) continue;
    std::vector<size_t> group;
    for (size_t j = i; j < rows.size(); ++j)
      if (!done[j] && rows[j].current_na == rows[i].current_na) group.push_back(j);

    // candidate spot areas from each row, then scan the hull for a value
    // consistent with every row of the group
    double a_lo = 1e300, a_hi = 0.0;
    for (size_t j : group) {
      const double ions = ions_per_dwell(rows[j].current_na, rows[j].dwell_us);
      const double area = 3.0 * rows[j].passes * ions / rows[j].fluence;
      a_lo = std::min(a_lo, area * 0.995);
      a_hi = std::max(a_hi, area * 1.005);
    }
    double chosen_lo = -1, chosen_hi = -1;
    const int steps = 40000;
    for (int k = 0; k <= steps; ++k) {
      const double area = a_lo + (a_hi - a_lo) * k / steps;
      bool ok = true;
      for (size_t j : group) {
        const double ions = ions_per_dwell(rows[j].current_na, rows[j].dwell_us);
        const double f = 3.0 * rows[j].passes * ions / area;
        if (round_3sig(f) != round_3sig(rows[j].fluence)) {
          ok = false;
          break;
        }
      }
      if (ok) {
        if (chosen_lo < 0) chosen_lo = area;
        chosen_hi = area;
      } else if (chosen_lo >= 0) {
        break;
      }
    }
    if (chosen_lo < 0)
      throw std::runtime_error(std::string("no consistent diameter for ") +
                               rows[i].name);
    const double area = 0.5 * (chosen_lo + chosen_hi);
    const double d_nm = std::sqrt(4.0 * area / M_PI) * 1e7;
    const double d_rounded = std::round(d_nm * 1e4) / 1e4;
    // sigma from the first row of the group: sigma_d = d * (sigma_F/F) / 2
    const Row& r0 = rows[group[0]];
    const double ds_nm =
        std::round(d_rounded * (r0.sigma / r0.fluence) / 2.0 * 1e4) / 1e4;

    for (size_t j : group) {
      BeamRecipe rec;
      rec.name = rows[j].name;
      rec.current_na = rows[j].current_na;
      rec.dwell_us = rows[j].dwell_us;
      rec.passes = rows[j].passes;
      rec.beam_diameter_nm = d_rounded;
      rec.beam_diameter_sigma_nm = ds_nm;
      const FluenceEstimate est = fluence(rec);
      if (round_3sig(est.value_cm2) != round_3sig(rows[j].fluence))
        throw std::runtime_error(std::string("rounded diameter breaks ") +
                                 rows[j].name);
      char line[256];
      std::snprintf(line, sizeof line, "%s,%g,%g,%d,0.5,%.4f,%.4f\n",
                    rows[j].name, rows[j].current_na, rows[j].dwell_us,
                    rows[j].passes, d_rounded, ds_nm);
      csv += line;
      done[j] = true;
    }
  }
  save(path, csv);
}

// ---- cube fixture -----------------------------------------------------------

void make_cube(const std::string& cube_path, const std::string& mask_path) {
  HyperspectralCube cube;
  cube.nx = 12;
  cube.ny = 12;
  cube.kind = AxisKind::WavelengthNm;
  cube.axis = linspace(610.0, 670.0, 241);  // 0.25 nm sampling around the ZPL
  cube.pixels.assign(144, {});
  std::string mask = "# 1 = inside the bright square\n";
  RngStream rng(424242, 0);
  for (int iy = 0; iy < 12; ++iy) {
    for (int ix = 0; ix < 12; ++ix) {
      const bool inside = ix >= 4 && ix < 8 && iy >= 4 && iy < 8;
      Spectrum s{cube.kind, cube.axis, {}};
      s.intensity.resize(cube.axis.size());
      for (size_t i = 0; i < cube.axis.size(); ++i) {
        const double x = cube.axis[i] - 640.0;
        s.intensity[i] = 40.0 + 0.02 * x - 2e-4 * x * x;
        if (inside)
          s.intensity[i] += lorentzian(cube.axis[i], 637.0, 1.5, 600.0);
      }
      add_noise(s, 2.0, rng);
      cube.pixels[static_cast<size_t>(iy) * 12 + ix] = s.intensity;
      mask += inside ? "1" : "0";
      mask += (ix == 11) ? "\n" : ",";
    }
  }
  save(cube_path, write_cube_binary(cube));
  save(mask_path, mask);
}

// ---- ODMR fixture -----------------------------------------------------------

void make_odmr(const std::string& path) {
  // 24 G along a direction with four distinct axis projections
  Vec3 b{5.4, 10.8, 19.8};
  const double norm = std::sqrt(b.x * b.x + b.y * b.y + b.z * b.z);
  b = {b.x * 24.0 / norm, b.y * 24.0 / norm, b.z * 24.0 / norm};
  const auto dips = predict_odmr(b);
  Spectrum s{AxisKind::FrequencyMHz, linspace(2740.0, 3000.0, 521), {}};
  s.intensity.assign(s.axis.size(), 1.0);
  for (size_t i = 0; i < s.axis.size(); ++i)
    for (double c : dips)
      s.intensity[i] -= lorentzian(s.axis[i], c, 8.4, 0.03);
  RngStream rng(31415926, 0);
  add_noise(s, 0.002, rng);
  save(path, write_spectrum_csv(s));
}

// ---- demo PL mixture ----------------------------------------------------------

void make_pl_mixture(const std::string& path,
                     const std::vector<double>& axis) {
  const Spectrum nv = nv_model(axis), siv = siv_model(axis),
                 irr = irradiation_model(axis);
  Spectrum s{AxisKind::WavelengthNm, axis, {}};
  s.intensity.resize(axis.size());
  for (size_t i = 0; i < axis.size(); ++i) {
    const double x = axis[i] - 700.0;
    s.intensity[i] = 0.8 * nv.intensity[i] + 0.5 * siv.intensity[i] +
                     0.3 * irr.intensity[i] + 0.05 + 1e-4 * x + 1.5e-6 * x * x;
  }
  RngStream rng(2718281, 0);
  add_noise(s, 0.004, rng);
  save(path, write_spectrum_csv(s));
}

}  // namespace

int main(int argc, char** argv) {
  const std::string root = argc > 1 ? argv[1] : "data";
  try {
    const auto axis = linspace(600.0, 800.0, 801);
    save(root + "/models/nv_model.csv", write_spectrum_csv(nv_model(axis)));
    save(root + "/models/siv_model.csv", write_spectrum_csv(siv_model(axis)));
    save(root + "/models/irradiation_model.csv",
         write_spectrum_csv(irradiation_model(axis)));
    make_recipes_csv(root + "/fib_recipes.csv");
    make_cube(root + "/fixtures/cube_12x12.rkhc",
              root + "/fixtures/cube_12x12_mask.csv");
    make_odmr(root + "/fixtures/odmr_24G.csv");
    make_pl_mixture(root + "/fixtures/pl_mixture.csv", axis);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "gen-fixtures: %s\n", e.what());
    return 1;
  }
  return 0;
}
