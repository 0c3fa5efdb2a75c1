#include "hyperspectral.hpp"

#include <atomic>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <thread>

#include <json.hpp>

#include "csv.hpp"
#include "errors.hpp"

namespace recoil {

void HyperspectralCube::validate() const {
  if (nx < 1 || ny < 1) throw InputError("cube: empty grid");
  if (axis.size() < 2) throw InputError("cube: axis too short");
  for (size_t i = 1; i < axis.size(); ++i)
    if (!(axis[i] > axis[i - 1]))
      throw InputError("cube: axis not strictly increasing");
  if (pixels.size() != static_cast<size_t>(nx) * ny)
    throw InputError("cube: pixel count does not match grid");
  for (const auto& p : pixels)
    if (p.size() != axis.size())
      throw InputError("cube: pixel spectrum length mismatch");
}

Spectrum HyperspectralCube::pixel(int ix, int iy) const {
  Spectrum s;
  s.kind = kind;
  s.axis = axis;
  s.intensity = pixels[static_cast<size_t>(iy) * nx + ix];
  return s;
}

// ---- binary container -------------------------------------------------------

namespace {

template <typename T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

template <typename T>
T take(const std::string& in, size_t& off) {
  if (off + sizeof(T) > in.size()) throw InputError("cube: truncated container");
  T v;
  std::memcpy(&v, in.data() + off, sizeof(T));
  off += sizeof(T);
  return v;
}

}  // namespace

std::string write_cube_binary(const HyperspectralCube& cube) {
  cube.validate();
  std::string out;
  out += "RKHC";
  put<uint32_t>(out, 1);
  put<uint32_t>(out, static_cast<uint32_t>(cube.nx));
  put<uint32_t>(out, static_cast<uint32_t>(cube.ny));
  put<uint32_t>(out, static_cast<uint32_t>(cube.axis.size()));
  put<uint32_t>(out, static_cast<uint32_t>(cube.kind));
  for (double v : cube.axis) put<double>(out, v);
  for (const auto& p : cube.pixels)
    for (double v : p) put<double>(out, v);
  return out;
}

HyperspectralCube read_cube_binary(const std::string& bytes) {
  if (bytes.size() < 4 || bytes.compare(0, 4, "RKHC") != 0)
    throw InputError("cube: bad magic (not an RKHC container)");
  size_t off = 4;
  const uint32_t version = take<uint32_t>(bytes, off);
  if (version != 1)
    throw InputError("cube: unsupported container version " +
                     std::to_string(version));
  HyperspectralCube cube;
  cube.nx = static_cast<int>(take<uint32_t>(bytes, off));
  cube.ny = static_cast<int>(take<uint32_t>(bytes, off));
  const uint32_t npts = take<uint32_t>(bytes, off);
  cube.kind = static_cast<AxisKind>(take<uint32_t>(bytes, off));
  cube.axis.resize(npts);
  for (auto& v : cube.axis) v = take<double>(bytes, off);
  cube.pixels.assign(static_cast<size_t>(cube.nx) * cube.ny,
                     std::vector<double>(npts));
  for (auto& p : cube.pixels)
    for (auto& v : p) v = take<double>(bytes, off);
  cube.validate();
  return cube;
}

HyperspectralCube read_cube_index(const std::string& index_json_text,
                                  const std::string& base_dir) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(index_json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("cube index: ") + e.what());
  }
  HyperspectralCube cube;
  cube.nx = j.at("nx").get<int>();
  cube.ny = j.at("ny").get<int>();
  const auto& files = j.at("files");
  if (static_cast<int>(files.size()) != cube.ny)
    throw InputError("cube index: files has wrong row count");
  bool first = true;
  for (int iy = 0; iy < cube.ny; ++iy) {
    const auto& row = files[iy];
    if (static_cast<int>(row.size()) != cube.nx)
      throw InputError("cube index: row " + std::to_string(iy) +
                       " has wrong column count");
    for (int ix = 0; ix < cube.nx; ++ix) {
      const std::string path = base_dir + "/" + row[ix].get<std::string>();
      std::ifstream f(path, std::ios::binary);
      if (!f) throw InputError("cube index: cannot open " + path);
      std::string text((std::istreambuf_iterator<char>(f)),
                       std::istreambuf_iterator<char>());
      const Spectrum s = read_spectrum_csv(text);
      if (first) {
        cube.kind = s.kind;
        cube.axis = s.axis;
        cube.pixels.assign(static_cast<size_t>(cube.nx) * cube.ny, {});
        first = false;
      } else if (s.axis != cube.axis) {
        throw InputError("cube index: " + path +
                         " axis differs from the first pixel");
      }
      cube.pixels[static_cast<size_t>(iy) * cube.nx + ix] = s.intensity;
    }
  }
  cube.validate();
  return cube;
}

// ---- binning -----------------------------------------------------------------

std::string IntensityMap::to_csv(const std::string& manifest_name) const {
  std::string out;
  out += "# intensity map: rows are y, columns are x\n";
  if (!manifest_name.empty()) out += "# manifest: " + manifest_name + "\n";
  out += "# failed_pixels: " + std::to_string(failed_count) + "\n";
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      if (ix) out += ',';
      const double v = at(ix, iy);
      out += std::isnan(v) ? "nan" : format_compact(v);
    }
    out += '\n';
  }
  return out;
}

namespace {

// One pixel: integrated fitted-peak (or scaled-template) intensity.
// Returns NaN when nothing credible was fit.
double bin_pixel(const Spectrum& s, const BinSpec& spec) {
  try {
    if (spec.template_spectrum) {
      const TemplateFit tf =
          fit_template_background(s, *spec.template_spectrum, spec.window_lo,
                                  spec.window_hi, spec.background_degree);
      std::vector<double> scaled = spec.template_spectrum->intensity;
      for (auto& v : scaled) v *= tf.scale;
      return trapezoid(spec.template_spectrum->axis, scaled, spec.window_lo,
                       spec.window_hi);
    }
    const auto fits = fit_peak(s, spec.window_lo, spec.window_hi, 1,
                               spec.background_degree);
    const PeakFit& f = fits[0];
    // Sanity gates against fitting pure noise: the peak must be resolved
    // (wider than one grid step, narrower than the window), inside the
    // window, and significant against both the residual and its own sigma.
    const auto [wlo, whi] = s.window_indices(spec.window_lo, spec.window_hi);
    const double pts = static_cast<double>(whi - wlo);
    const double rms = f.residual_norm / std::sqrt(pts);
    const double step = (spec.window_hi - spec.window_lo) / pts;
    if (!f.converged || f.height <= 0.0 || f.height < 3.0 * rms ||
        f.center < spec.window_lo || f.center > spec.window_hi ||
        f.fwhm < step || f.fwhm > (spec.window_hi - spec.window_lo) ||
        f.area < 3.0 * f.area_sigma)
      return std::numeric_limits<double>::quiet_NaN();
    return f.area;
  } catch (const InputError&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

}  // namespace

IntensityMap bin_hyperspectral(const HyperspectralCube& cube,
                               const BinSpec& spec, int threads) {
  cube.validate();
  IntensityMap map;
  map.nx = cube.nx;
  map.ny = cube.ny;
  const size_t n = static_cast<size_t>(cube.nx) * cube.ny;
  map.values.assign(n, 0.0);

  std::atomic<size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const size_t i = next.fetch_add(1);
      if (i >= n) break;
      map.values[i] = bin_pixel(
          cube.pixel(static_cast<int>(i % cube.nx), static_cast<int>(i / cube.nx)),
          spec);
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (double v : map.values)
    if (std::isnan(v)) ++map.failed_count;
  return map;
}

}  // namespace recoil
