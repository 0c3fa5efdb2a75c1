#include "recoilkit.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "../core/csv.hpp"
#include "../core/errors.hpp"
#include "../core/fib_dose.hpp"
#include "../core/hyperspectral.hpp"
#include "../core/odmr.hpp"
#include "../core/peakfit.hpp"
#include "../core/spectrum.hpp"
#include "../core/transport.hpp"
#include "../core/unmix.hpp"
#include "../core/yield.hpp"

using nlohmann::json;

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw recoil::InputError("cannot open file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw recoil::InputError("cannot write file: " + path);
  f << text;
  if (!f) throw recoil::InputError("write failed: " + path);
}

template <typename Fn>
rk_status wrap(Fn&& fn) {
  try {
    fn();
    return RK_OK;
  } catch (const recoil::ConfigError& e) {
    g_last_error = e.what();
    return RK_ERR_CONFIG;
  } catch (const recoil::InputError& e) {
    g_last_error = e.what();
    return RK_ERR_INPUT;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return RK_ERR_INTERNAL;
  }
}

// Linewidth in frequency units via dnu = c dlambda / lambda^2.
double fwhm_ghz_from_nm(double center_nm, double fwhm_nm) {
  const double c_nm_per_s = 2.99792458e17;
  return c_nm_per_s * fwhm_nm / (center_nm * center_nm) * 1e-9;
}

json peak_to_json(const recoil::PeakFit& f, bool wavelength_axis) {
  json e;
  e["center"] = f.center;
  e["center_sigma"] = f.center_sigma;
  e["fwhm"] = f.fwhm;
  e["fwhm_sigma"] = f.fwhm_sigma;
  e["height"] = f.height;
  e["height_sigma"] = f.height_sigma;
  e["area"] = f.area;
  e["area_sigma"] = f.area_sigma;
  e["converged"] = f.converged;
  if (wavelength_axis) {
    e["fwhm_ghz"] = fwhm_ghz_from_nm(f.center, f.fwhm);
    e["linewidth_conversion"] = "dnu = c*dlambda/lambda^2";
  }
  return e;
}

json analyze_peak(const json& opts) {
  const std::string path = opts.at("spectrum_path").get<std::string>();
  const recoil::Spectrum s = recoil::read_spectrum_csv(read_file(path));
  const double lo = opts.at("window").at(0).get<double>();
  const double hi = opts.at("window").at(1).get<double>();
  const int n_peaks = opts.value("n_peaks", 1);
  const int degree = opts.value("background_degree", 2);

  json rep;
  rep["kind"] = "peak_fit_report";
  rep["spectrum"] = path;
  rep["window"] = {lo, hi};
  try {
    const auto fits = recoil::fit_peak(s, lo, hi, n_peaks, degree);
    bool all_ok = true;
    for (const auto& f : fits) {
      rep["peaks"].push_back(
          peak_to_json(f, s.kind == recoil::AxisKind::WavelengthNm));
      all_ok = all_ok && f.converged;
    }
    rep["background"] = fits[0].background;
    rep["background_center"] = fits[0].background_center;
    rep["residual_norm"] = fits[0].residual_norm;
    rep["converged"] = all_ok;
  } catch (const recoil::ResolveError& e) {
    rep["error"] = e.what();
    rep["resolved_count"] = e.resolved_count;
    rep["converged"] = false;
  }
  return rep;
}

json analyze_unmix(const json& opts) {
  recoil::UnmixInput input;
  const std::string path = opts.at("spectrum_path").get<std::string>();
  input.spectrum = recoil::read_spectrum_csv(read_file(path));
  if (!opts.contains("models") || opts["models"].empty())
    throw recoil::ConfigError("analyze unmix: no model spectra given");
  for (auto it = opts["models"].begin(); it != opts["models"].end(); ++it) {
    try {
      input.models[it.key()] =
          recoil::read_spectrum_csv(read_file(it.value().get<std::string>()));
    } catch (const recoil::InputError& e) {
      throw recoil::InputError("model '" + it.key() + "': " + e.what());
    }
  }
  if (opts.contains("band")) {
    input.band_lo_nm = opts["band"].at(0).get<double>();
    input.band_hi_nm = opts["band"].at(1).get<double>();
  }
  const recoil::UnmixResult r = recoil::unmix(input);

  json rep;
  rep["kind"] = "unmix_report";
  rep["spectrum"] = path;
  rep["band"] = {input.band_lo_nm, input.band_hi_nm};
  for (const auto& [k, v] : r.weights) rep["weights"][k] = v;
  for (const auto& [k, v] : r.contributions) rep["contributions"][k] = v;
  rep["background"] = r.background;
  rep["background_center"] = r.background_center;
  rep["background_integral"] = r.background_integral;
  rep["total_fit_integral"] = r.total_fit_integral;
  rep["residual_norm"] = r.residual_norm;
  rep["condition_number"] = r.condition_number;
  rep["ill_conditioned"] = r.ill_conditioned;
  if (r.contributions.count("NV"))
    rep["nv_with_background"] = r.nv_with_background;
  return rep;
}

json analyze_odmr(const json& opts) {
  const std::string path = opts.at("spectrum_path").get<std::string>();
  const recoil::Spectrum s = recoil::read_spectrum_csv(read_file(path));
  const int n_dips = opts.value("n_dips", 8);

  json rep;
  rep["kind"] = "odmr_report";
  rep["spectrum"] = path;
  try {
    const recoil::OdmrFit fit = recoil::fit_odmr(s, n_dips);
    for (const auto& d : fit.dips) {
      json e;
      e["center_mhz"] = d.center_mhz;
      e["center_sigma_mhz"] = d.center_sigma_mhz;
      e["fwhm_mhz"] = d.fwhm_mhz;
      e["fwhm_sigma_mhz"] = d.fwhm_sigma_mhz;
      e["contrast"] = d.contrast;
      e["contrast_sigma"] = d.contrast_sigma;
      rep["dips"].push_back(e);
    }
    rep["baseline"] = fit.baseline;
    if (n_dips == 8) {
      rep["pair_midpoints_mhz"] = fit.pair_midpoints_mhz;
      rep["zfs_mean_ghz"] = fit.zfs_mean_ghz;
      rep["zfs_std_ghz"] = fit.zfs_std_ghz;
    }
    rep["residual_norm"] = fit.residual_norm;
    rep["converged"] = fit.converged;
  } catch (const recoil::ResolveError& e) {
    rep["error"] = e.what();
    rep["resolved_count"] = e.resolved_count;
    rep["converged"] = false;
  }
  return rep;
}

json analyze_bin(const json& opts) {
  recoil::HyperspectralCube cube;
  if (opts.contains("cube_path")) {
    const std::string path = opts["cube_path"].get<std::string>();
    cube = recoil::read_cube_binary(read_file(path));
  } else if (opts.contains("cube_index_path")) {
    const std::string path = opts["cube_index_path"].get<std::string>();
    const size_t slash = path.find_last_of('/');
    const std::string dir = slash == std::string::npos ? "." : path.substr(0, slash);
    cube = recoil::read_cube_index(read_file(path), dir);
  } else {
    throw recoil::ConfigError("analyze bin: cube_path or cube_index_path required");
  }

  recoil::BinSpec spec;
  spec.window_lo = opts.at("window").at(0).get<double>();
  spec.window_hi = opts.at("window").at(1).get<double>();
  spec.background_degree = opts.value("background_degree", 2);
  if (opts.contains("template_path"))
    spec.template_spectrum = recoil::read_spectrum_csv(
        read_file(opts["template_path"].get<std::string>()));

  const int threads = opts.value("threads", 1);
  const recoil::IntensityMap map = recoil::bin_hyperspectral(cube, spec, threads);

  json rep;
  rep["kind"] = "bin_report";
  rep["nx"] = map.nx;
  rep["ny"] = map.ny;
  rep["failed_pixels"] = map.failed_count;
  if (opts.contains("map_out")) {
    const std::string out = opts["map_out"].get<std::string>();
    write_file(out, map.to_csv(opts.value("manifest", "")));
    rep["map_out"] = out;
  }
  return rep;
}

recoil::FluenceEstimate fluence_from_table(const std::string& csv_text,
                                           const std::string& recipe_name) {
  const recoil::CsvTable t = recoil::parse_csv(csv_text);
  const int c_name = t.column("name");
  const int c_val = t.column("fluence_cm2");
  const int c_sig = t.column("fluence_sigma_cm2");
  for (size_t r = 0; r < t.rows.size(); ++r) {
    if (!recipe_name.empty() && t.rows[r][c_name] != recipe_name) continue;
    recoil::FluenceEstimate est;
    est.value_cm2 = recoil::csv_to_double(t, r, c_val);
    est.sigma_cm2 = recoil::csv_to_double(t, r, c_sig);
    return est;
  }
  throw recoil::InputError("fluence table: recipe not found: " + recipe_name);
}

}  // namespace

extern "C" {

struct rk_profiles {
  recoil::DepthProfileSet set;
};

const char* rk_version(void) { return "0.1.0"; }

const char* rk_last_error(void) { return g_last_error.c_str(); }

void rk_string_free(char* s) { std::free(s); }

rk_status rk_simulate(const char* config_json, int threads, rk_profiles** out) {
  if (!config_json || !out) {
    g_last_error = "rk_simulate: null argument";
    return RK_ERR_CONFIG;
  }
  *out = nullptr;
  return wrap([&] {
    const recoil::SimConfig cfg = recoil::SimConfig::from_json(config_json);
    auto* handle = new rk_profiles{recoil::run_simulation(cfg, threads)};
    *out = handle;
  });
}

rk_status rk_profiles_write_csv(const rk_profiles* p, const char* path,
                                const char* manifest) {
  if (!p || !path) {
    g_last_error = "rk_profiles_write_csv: null argument";
    return RK_ERR_CONFIG;
  }
  return wrap([&] { write_file(path, p->set.to_csv(manifest ? manifest : "")); });
}

rk_status rk_profiles_write_json(const rk_profiles* p, const char* path,
                                 const char* manifest) {
  if (!p || !path) {
    g_last_error = "rk_profiles_write_json: null argument";
    return RK_ERR_CONFIG;
  }
  return wrap([&] { write_file(path, p->set.to_json(manifest ? manifest : "")); });
}

rk_status rk_profiles_summary_json(const rk_profiles* p, char** out_json) {
  if (!p || !out_json) {
    g_last_error = "rk_profiles_summary_json: null argument";
    return RK_ERR_CONFIG;
  }
  return wrap([&] { *out_json = dup_string(p->set.summary_json()); });
}

void rk_profiles_free(rk_profiles* p) { delete p; }

rk_status rk_fluence_table(const char* recipes_csv, const char* manifest,
                           char** out_csv) {
  if (!recipes_csv || !out_csv) {
    g_last_error = "rk_fluence_table: null argument";
    return RK_ERR_CONFIG;
  }
  return wrap([&] {
    const auto recipes = recoil::read_recipes_csv(recipes_csv);
    *out_csv = dup_string(
        recoil::fluence_table_csv(recipes, manifest ? manifest : ""));
  });
}

rk_status rk_analyze(const char* mode, const char* options_json,
                     char** out_report_json) {
  if (!mode || !options_json || !out_report_json) {
    g_last_error = "rk_analyze: null argument";
    return RK_ERR_CONFIG;
  }
  return wrap([&] {
    json opts;
    try {
      opts = json::parse(options_json);
    } catch (const json::parse_error& e) {
      throw recoil::ConfigError(std::string("analyze options: ") + e.what());
    }
    json rep;
    const std::string m(mode);
    try {
      if (m == "peak")
        rep = analyze_peak(opts);
      else if (m == "unmix")
        rep = analyze_unmix(opts);
      else if (m == "odmr")
        rep = analyze_odmr(opts);
      else if (m == "bin")
        rep = analyze_bin(opts);
      else
        throw recoil::ConfigError("analyze: unknown mode '" + m + "'");
    } catch (const json::exception& e) {
      throw recoil::ConfigError(std::string("analyze options: ") + e.what());
    }
    if (opts.contains("manifest")) rep["manifest"] = opts["manifest"];
    *out_report_json = dup_string(rep.dump(2) + "\n");
  });
}

rk_status rk_yield(const char* options_json, char** out_report_json) {
  if (!options_json || !out_report_json) {
    g_last_error = "rk_yield: null argument";
    return RK_ERR_CONFIG;
  }
  return wrap([&] {
    json opts;
    try {
      opts = json::parse(options_json);
    } catch (const json::parse_error& e) {
      throw recoil::ConfigError(std::string("yield options: ") + e.what());
    }
    std::string manifest;
    recoil::DepthProfileSet profiles;
    recoil::YieldConfig cfg;
    std::string fluence_csv;
    json unmix_rep;
    try {
      manifest = opts.value("manifest", "");
      profiles = recoil::DepthProfileSet::from_json(
          read_file(opts.at("profiles_path").get<std::string>()));
      cfg = recoil::YieldConfig::from_json(
          read_file(opts.at("config_path").get<std::string>()));
      fluence_csv = read_file(opts.at("fluence_csv_path").get<std::string>());
      unmix_rep = json::parse(
          read_file(opts.at("unmix_report_path").get<std::string>()));
    } catch (const json::exception& e) {
      throw recoil::ConfigError(std::string("yield options: ") + e.what());
    }

    // Per-family PL: the NV family includes the fitted background (it is
    // dominated by the NV0 phonon sideband); others use the model integral.
    std::map<std::string, double> pl, pl_sigma;
    for (const auto& [family, species] : cfg.family_species) {
      (void)species;
      if (family == "NV" && unmix_rep.contains("nv_with_background"))
        pl[family] = unmix_rep["nv_with_background"].get<double>();
      else if (unmix_rep.contains("contributions") &&
               unmix_rep["contributions"].contains(family))
        pl[family] = unmix_rep["contributions"][family].get<double>();
      else
        throw recoil::InputError("yield: unmix report has no contribution for "
                                 "family " + family);
      pl_sigma[family] = 0.0;
    }

    const std::string recipe = opts.value("recipe_name", "");
    const recoil::FluenceEstimate fl = fluence_from_table(fluence_csv, recipe);
    const recoil::YieldReport report =
        recoil::yield_report(profiles, fl, pl, pl_sigma, cfg);

    if (opts.contains("curve_out")) {
      // One row per fluence-table recipe at the same PL contributions.
      const recoil::CsvTable t = recoil::parse_csv(fluence_csv);
      const int c_name = t.column("name");
      const int c_val = t.column("fluence_cm2");
      const int c_sig = t.column("fluence_sigma_cm2");
      std::string csv;
      if (!manifest.empty()) csv += "# manifest: " + manifest + "\n";
      csv += "name,fluence_cm2,fluence_sigma_cm2";
      for (const auto& [family, species] : cfg.family_species) {
        (void)species;
        csv += ",yield_" + family + ",yield_" + family + "_sigma";
      }
      csv += "\n";
      for (size_t r = 0; r < t.rows.size(); ++r) {
        recoil::FluenceEstimate fr;
        fr.value_cm2 = recoil::csv_to_double(t, r, c_val);
        fr.sigma_cm2 = recoil::csv_to_double(t, r, c_sig);
        const recoil::YieldReport row =
            recoil::yield_report(profiles, fr, pl, pl_sigma, cfg);
        csv += t.rows[r][c_name];
        csv += ',' + recoil::format_compact(fr.value_cm2);
        csv += ',' + recoil::format_compact(fr.sigma_cm2);
        for (const auto& f : row.families) {
          csv += ',' + recoil::format_compact(f.yield.value);
          csv += ',' + recoil::format_compact(f.yield.sigma);
        }
        csv += '\n';
      }
      write_file(opts["curve_out"].get<std::string>(), csv);
    }

    *out_report_json = dup_string(report.to_json(manifest));
  });
}

}  // extern "C"
