// recoilkit command-line tool. All functionality goes through the public C
// API (recoilkit.h); this translation unit only handles argument parsing,
// file I/O and run manifests.

#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <recoilkit.h>

using nlohmann::json;

namespace {

struct GlobalOptions {
  uint64_t seed = 0;
  bool seed_set = false;
  int threads = 1;
  std::string out_dir = ".";
};

int fail(rk_status status, const std::string& context) {
  std::cerr << "recoilkit: " << context << ": " << rk_last_error() << "\n";
  return static_cast<int>(status);
}

// Relative input paths resolve against RECOILKIT_CONFIG_ROOT when the file
// is not found next to the working directory.
std::string resolve_input(const std::string& path) {
  if (path.empty() || path[0] == '/') return path;
  std::ifstream probe(path);
  if (probe.good()) return path;
  const char* root = std::getenv("RECOILKIT_CONFIG_ROOT");
  if (root && *root) {
    const std::string alt = std::string(root) + "/" + path;
    std::ifstream probe2(alt);
    if (probe2.good()) return alt;
  }
  return path;
}

bool read_file(const std::string& path, std::string& out, std::string& err) {
  std::ifstream f(path, std::ios::binary);
  if (!f) {
    err = "cannot open file: " + path;
    return false;
  }
  std::ostringstream ss;
  ss << f.rdbuf();
  out = ss.str();
  return true;
}

bool write_file(const std::string& path, const std::string& text,
                std::string& err) {
  std::ofstream f(path, std::ios::binary);
  f << text;
  if (!f) {
    err = "cannot write file: " + path;
    return false;
  }
  return true;
}

std::string stem_of(const std::string& path) {
  const size_t slash = path.find_last_of('/');
  std::string name = slash == std::string::npos ? path : path.substr(slash + 1);
  const size_t dot = name.find_last_of('.');
  if (dot != std::string::npos && dot > 0) name = name.substr(0, dot);
  return name;
}

// Run manifest: records what produced the outputs. Timestamps live here and
// only here, so the data files themselves stay byte-reproducible.
class Manifest {
 public:
  Manifest(const std::string& subcommand, const GlobalOptions& g)
      : out_dir_(g.out_dir) {
    j_["subcommand"] = subcommand;
    j_["toolkit_version"] = rk_version();
    j_["threads"] = g.threads;
    if (g.seed_set) j_["seed"] = g.seed;
    char buf[64];
    const std::time_t now = std::time(nullptr);
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    j_["timestamp"] = buf;
  }

  void add_config(const std::string& path) { j_["configs"].push_back(path); }
  void add_input(const std::string& path) { j_["inputs"].push_back(path); }
  void add_output(const std::string& path) { j_["outputs"].push_back(path); }
  void set(const std::string& key, const json& v) { j_[key] = v; }

  std::string name() const { return "manifest.json"; }

  bool write(std::string& err) {
    return write_file(out_dir_ + "/" + name(), j_.dump(2) + "\n", err);
  }

 private:
  std::string out_dir_;
  json j_;
};

std::vector<double> parse_values(const std::string& csv, std::string& err) {
  std::vector<double> out;
  size_t start = 0;
  while (start <= csv.size()) {
    size_t comma = csv.find(',', start);
    if (comma == std::string::npos) comma = csv.size();
    const std::string tok = csv.substr(start, comma - start);
    if (!tok.empty()) {
      try {
        out.push_back(std::stod(tok));
      } catch (const std::exception&) {
        err = "bad numeric value '" + tok + "'";
        return {};
      }
    }
    start = comma + 1;
  }
  if (out.empty()) err = "empty value list";
  return out;
}

// ---- simulate ---------------------------------------------------------------

int run_simulate(const GlobalOptions& g, const std::string& config_path,
                 const std::string& sweep, const std::string& values_csv) {
  std::string err, config_text;
  const std::string resolved = resolve_input(config_path);
  if (!read_file(resolved, config_text, err)) {
    std::cerr << "recoilkit: " << err << "\n";
    return 3;
  }
  json config;
  try {
    config = json::parse(config_text);
  } catch (const json::parse_error& e) {
    std::cerr << "recoilkit: " << config_path << ": " << e.what() << "\n";
    return 2;
  }
  if (g.seed_set) config["seed"] = g.seed;

  struct Point {
    std::string tag;
    double value;
    json config;
  };
  std::vector<Point> points;
  if (sweep.empty()) {
    points.push_back({"run", 0.0, config});
  } else {
    std::vector<double> values = parse_values(values_csv, err);
    if (values.empty()) {
      std::cerr << "recoilkit: --sweep needs --values: " << err << "\n";
      return 2;
    }
    for (double v : values) {
      json c = config;
      char tag[64];
      if (sweep == "energy") {
        c["ion"]["energy_ev"] = v * 1000.0;  // sweep values in keV
        std::snprintf(tag, sizeof tag, "energy_%gkeV", v);
      } else if (sweep == "thickness") {
        if (!c.contains("layers") || c["layers"].empty()) {
          std::cerr << "recoilkit: thickness sweep needs a film layer\n";
          return 2;
        }
        c["layers"][0]["thickness_nm"] = v;
        std::snprintf(tag, sizeof tag, "thickness_%gnm", v);
      } else {
        std::cerr << "recoilkit: unknown sweep axis '" << sweep << "'\n";
        return 2;
      }
      points.push_back({tag, v, std::move(c)});
    }
  }

  Manifest manifest("simulate", g);
  manifest.add_config(resolved);
  if (!sweep.empty()) manifest.set("sweep", sweep);

  std::string summary_csv;
  bool summary_header_done = false;
  for (const auto& point : points) {
    rk_profiles* profiles = nullptr;
    const std::string cfg_text = point.config.dump();
    const rk_status st = rk_simulate(cfg_text.c_str(), g.threads, &profiles);
    if (st != RK_OK) return fail(st, "simulate " + point.tag);

    const std::string base = g.out_dir + "/profiles_" + point.tag;
    if (rk_profiles_write_csv(profiles, (base + ".csv").c_str(),
                              manifest.name().c_str()) != RK_OK ||
        rk_profiles_write_json(profiles, (base + ".json").c_str(),
                               manifest.name().c_str()) != RK_OK) {
      rk_profiles_free(profiles);
      return fail(RK_ERR_INPUT, "writing " + base);
    }
    manifest.add_output(base + ".csv");
    manifest.add_output(base + ".json");

    char* summary_text = nullptr;
    if (rk_profiles_summary_json(profiles, &summary_text) != RK_OK) {
      rk_profiles_free(profiles);
      return fail(RK_ERR_INTERNAL, "summary " + point.tag);
    }
    const json summary = json::parse(summary_text);
    rk_string_free(summary_text);
    rk_profiles_free(profiles);

    if (!summary_header_done) {
      summary_csv += "tag,sweep_value";
      for (auto it = summary["species"].begin(); it != summary["species"].end();
           ++it)
        summary_csv += ",stopped_per_ion_" + it.key() + ",substrate_per_ion_" +
                       it.key() + ",mean_depth_nm_" + it.key() +
                       ",std_depth_nm_" + it.key();
      summary_csv += "\n";
      summary_header_done = true;
    }
    std::ostringstream row;
    row << point.tag << ',' << point.value;
    for (auto it = summary["species"].begin(); it != summary["species"].end();
         ++it) {
      const json& e = it.value();
      row << ',' << e["stopped_per_ion"].get<double>() << ','
          << e["substrate_per_ion"].get<double>() << ','
          << e["mean_depth_nm"].get<double>() << ','
          << e["std_depth_nm"].get<double>();
    }
    summary_csv += row.str() + "\n";
  }

  const std::string summary_path = g.out_dir + "/sweep_summary.csv";
  if (!write_file(summary_path, "# manifest: " + manifest.name() + "\n" +
                                    summary_csv,
                  err)) {
    std::cerr << "recoilkit: " << err << "\n";
    return 3;
  }
  manifest.add_output(summary_path);
  if (!manifest.write(err)) {
    std::cerr << "recoilkit: " << err << "\n";
    return 3;
  }
  return 0;
}

// ---- fluence ----------------------------------------------------------------

int run_fluence(const GlobalOptions& g, const std::string& recipes_path) {
  std::string err, recipes_text;
  const std::string resolved = resolve_input(recipes_path);
  if (!read_file(resolved, recipes_text, err)) {
    std::cerr << "recoilkit: " << err << "\n";
    return 3;
  }
  Manifest manifest("fluence", g);
  manifest.add_input(resolved);
  char* table = nullptr;
  const rk_status st =
      rk_fluence_table(recipes_text.c_str(), manifest.name().c_str(), &table);
  if (st != RK_OK) return fail(st, "fluence");
  const std::string out_path = g.out_dir + "/fluence_table.csv";
  const bool ok = write_file(out_path, table, err);
  rk_string_free(table);
  if (!ok) {
    std::cerr << "recoilkit: " << err << "\n";
    return 3;
  }
  manifest.add_output(out_path);
  if (!manifest.write(err)) {
    std::cerr << "recoilkit: " << err << "\n";
    return 3;
  }
  return 0;
}

// ---- analyze ----------------------------------------------------------------

struct AnalyzeOptions {
  std::string mode;
  std::vector<std::string> inputs;
  std::string window_csv, band_csv;
  std::vector<double> window;
  int n_peaks = 1;
  int background_degree = 2;
  std::vector<std::string> models;  // NAME=PATH
  std::vector<double> band;
  int n_dips = 8;
  std::string cube_path, cube_index_path, template_path;
};

int run_analyze(const GlobalOptions& g, AnalyzeOptions a) {
  Manifest manifest("analyze", g);
  manifest.set("mode", a.mode);
  std::string err;
  if (!a.window_csv.empty()) {
    a.window = parse_values(a.window_csv, err);
    if (a.window.size() != 2) {
      std::cerr << "recoilkit: --window needs LO,HI\n";
      return 2;
    }
  }
  if (!a.band_csv.empty()) {
    a.band = parse_values(a.band_csv, err);
    if (a.band.size() != 2) {
      std::cerr << "recoilkit: --band needs LO,HI\n";
      return 2;
    }
  }

  auto emit_report = [&](const std::string& stem,
                         const std::string& options) -> int {
    char* report = nullptr;
    const rk_status st = rk_analyze(a.mode.c_str(), options.c_str(), &report);
    if (st != RK_OK) return fail(st, "analyze " + a.mode);
    const std::string path = g.out_dir + "/" + stem + ".report.json";
    const bool ok = write_file(path, report, err);
    rk_string_free(report);
    if (!ok) {
      std::cerr << "recoilkit: " << err << "\n";
      return 3;
    }
    manifest.add_output(path);
    return 0;
  };

  if (a.mode == "bin") {
    json opts;
    if (!a.cube_path.empty()) {
      opts["cube_path"] = resolve_input(a.cube_path);
      manifest.add_input(opts["cube_path"]);
    } else if (!a.cube_index_path.empty()) {
      opts["cube_index_path"] = resolve_input(a.cube_index_path);
      manifest.add_input(opts["cube_index_path"]);
    } else {
      std::cerr << "recoilkit: analyze bin needs --cube or --cube-index\n";
      return 2;
    }
    if (a.window.size() != 2) {
      std::cerr << "recoilkit: analyze bin needs --window LO,HI\n";
      return 2;
    }
    opts["window"] = a.window;
    opts["background_degree"] = a.background_degree;
    if (!a.template_path.empty())
      opts["template_path"] = resolve_input(a.template_path);
    opts["threads"] = g.threads;
    opts["manifest"] = manifest.name();
    const std::string stem =
        stem_of(a.cube_path.empty() ? a.cube_index_path : a.cube_path);
    opts["map_out"] = g.out_dir + "/" + stem + ".map.csv";
    const int rc = emit_report(stem, opts.dump());
    if (rc != 0) return rc;
    manifest.add_output(g.out_dir + "/" + stem + ".map.csv");
  } else {
    if (a.inputs.empty()) {
      std::cerr << "recoilkit: analyze " << a.mode << " needs input files\n";
      return 2;
    }
    for (const auto& input : a.inputs) {
      const std::string resolved = resolve_input(input);
      manifest.add_input(resolved);
      json opts;
      opts["spectrum_path"] = resolved;
      opts["manifest"] = manifest.name();
      if (a.mode == "peak") {
        if (a.window.size() != 2) {
          std::cerr << "recoilkit: analyze peak needs --window LO,HI\n";
          return 2;
        }
        opts["window"] = a.window;
        opts["n_peaks"] = a.n_peaks;
        opts["background_degree"] = a.background_degree;
      } else if (a.mode == "unmix") {
        if (a.models.empty()) {
          std::cerr << "recoilkit: analyze unmix needs --model NAME=PATH\n";
          return 2;
        }
        for (const auto& m : a.models) {
          const size_t eq = m.find('=');
          if (eq == std::string::npos) {
            std::cerr << "recoilkit: bad --model '" << m
                      << "' (expected NAME=PATH)\n";
            return 2;
          }
          opts["models"][m.substr(0, eq)] = resolve_input(m.substr(eq + 1));
        }
        if (a.band.size() == 2) opts["band"] = a.band;
      } else if (a.mode == "odmr") {
        opts["n_dips"] = a.n_dips;
      } else {
        std::cerr << "recoilkit: unknown analyze mode '" << a.mode << "'\n";
        return 2;
      }
      const int rc = emit_report(stem_of(input), opts.dump());
      if (rc != 0) return rc;
    }
  }
  if (!manifest.write(err)) {
    std::cerr << "recoilkit: " << err << "\n";
    return 3;
  }
  return 0;
}

// ---- yield ------------------------------------------------------------------

int run_yield(const GlobalOptions& g, const std::string& profiles_path,
              const std::string& fluence_path, const std::string& unmix_path,
              const std::string& refconfig_path, const std::string& recipe) {
  Manifest manifest("yield", g);
  json opts;
  opts["profiles_path"] = resolve_input(profiles_path);
  opts["fluence_csv_path"] = resolve_input(fluence_path);
  opts["unmix_report_path"] = resolve_input(unmix_path);
  opts["config_path"] = resolve_input(refconfig_path);
  if (!recipe.empty()) opts["recipe_name"] = recipe;
  opts["curve_out"] = g.out_dir + "/yield_curve.csv";
  opts["manifest"] = manifest.name();
  for (const auto& key :
       {"profiles_path", "fluence_csv_path", "unmix_report_path", "config_path"})
    manifest.add_input(opts[key]);

  char* report = nullptr;
  const rk_status st = rk_yield(opts.dump().c_str(), &report);
  if (st != RK_OK) return fail(st, "yield");
  std::string err;
  const std::string out_path = g.out_dir + "/yield_report.json";
  const bool ok = write_file(out_path, report, err);
  rk_string_free(report);
  if (!ok) {
    std::cerr << "recoilkit: " << err << "\n";
    return 3;
  }
  manifest.add_output(out_path);
  manifest.add_output(g.out_dir + "/yield_curve.csv");
  if (!manifest.write(err)) {
    std::cerr << "recoilkit: " << err << "\n";
    return 3;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "recoilkit: ion-beam recoil implantation simulator and PL/ODMR "
      "analysis toolkit"};
  app.name("recoilkit");
  app.require_subcommand(1);

  GlobalOptions g;
  app.add_option("--seed", g.seed, "Override the RNG seed of the run")
      ->each([&](const std::string&) { g.seed_set = true; });
  app.add_option("--threads", g.threads, "Worker threads (default 1)");
  app.add_option("--out", g.out_dir, "Output directory (default .)");

  // simulate
  auto* sim = app.add_subcommand(
      "simulate", "Run the binary-collision transport simulation");
  std::string sim_config, sim_sweep, sim_values;
  sim->add_option("--config", sim_config, "Simulation config JSON")->required();
  sim->add_option("--sweep", sim_sweep, "Sweep axis: energy (keV) or thickness (nm)");
  sim->add_option("--values", sim_values, "Comma-separated sweep values");

  // fluence
  auto* flu = app.add_subcommand("fluence",
                                 "Compute areal ion fluence from FIB recipes");
  std::string flu_recipes;
  flu->add_option("--recipes", flu_recipes, "Recipe table CSV")->required();

  // analyze
  auto* ana = app.add_subcommand("analyze", "Fit and decompose spectra");
  AnalyzeOptions a;
  ana->add_option("--mode", a.mode, "peak | unmix | odmr | bin")->required();
  ana->add_option("--window", a.window_csv, "Fit window LO,HI");
  ana->add_option("--peaks", a.n_peaks, "Number of peaks (peak mode)");
  ana->add_option("--bg-degree", a.background_degree,
                  "Background polynomial degree 0..2");
  ana->add_option("--model", a.models,
                  "Model spectrum NAME=PATH (unmix mode, repeatable)");
  ana->add_option("--band", a.band_csv, "Unmix band LO,HI in nm");
  ana->add_option("--dips", a.n_dips, "Number of dips (odmr mode)");
  ana->add_option("--cube", a.cube_path, "Hyperspectral cube container");
  ana->add_option("--cube-index", a.cube_index_path,
                  "Hyperspectral cube index JSON");
  ana->add_option("--template", a.template_path,
                  "Template spectrum CSV (bin mode)");
  ana->add_option("files", a.inputs, "Input spectrum CSV files");

  // yield
  auto* yld = app.add_subcommand(
      "yield", "Combine profiles, fluence and spectra into a yield report");
  std::string y_profiles, y_fluence, y_unmix, y_ref, y_recipe;
  yld->add_option("--profiles", y_profiles, "Depth profiles JSON")->required();
  yld->add_option("--fluence", y_fluence, "Fluence table CSV")->required();
  yld->add_option("--unmix", y_unmix, "Unmix report JSON")->required();
  yld->add_option("--refconfig", y_ref, "Reference/normalization config JSON")
      ->required();
  yld->add_option("--recipe", y_recipe, "Recipe name inside the fluence table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;  // command-line problems are config errors
  }

  std::error_code ec;
  std::filesystem::create_directories(g.out_dir, ec);
  if (ec) {
    std::cerr << "recoilkit: cannot create output directory " << g.out_dir
              << ": " << ec.message() << "\n";
    return 3;
  }

  if (sim->parsed()) return run_simulate(g, sim_config, sim_sweep, sim_values);
  if (flu->parsed()) return run_fluence(g, flu_recipes);
  if (ana->parsed()) return run_analyze(g, a);
  if (yld->parsed())
    return run_yield(g, y_profiles, y_fluence, y_unmix, y_ref, y_recipe);
  return 2;
}
