#pragma once

#include <optional>
#include <string>
#include <vector>

#include "peakfit.hpp"
#include "spectrum.hpp"

namespace recoil {

// x-y grid of spectra sharing one axis; pixel (ix, iy) stored row-major
// at iy * nx + ix.
struct HyperspectralCube {
  int nx = 0, ny = 0;
  AxisKind kind = AxisKind::WavelengthNm;
  std::vector<double> axis;
  std::vector<std::vector<double>> pixels;

  void validate() const;
  Spectrum pixel(int ix, int iy) const;
};

// Binary container layout (little endian): magic "RKHC", u32 version=1,
// u32 nx, u32 ny, u32 npts, u32 axis_kind, axis doubles, then
// nx*ny*npts float64 pixel-major.
std::string write_cube_binary(const HyperspectralCube& cube);
HyperspectralCube read_cube_binary(const std::string& bytes);

// Directory variant: an index JSON {"nx":..,"ny":..,"files":[[...]]} with
// per-pixel spectrum CSV paths relative to the index file.
HyperspectralCube read_cube_index(const std::string& index_json_text,
                                  const std::string& base_dir);

// How to bin one pixel: either a Lorentzian peak fit on a window, or a
// template fit (for structured lines such as the diamond Raman profile).
struct BinSpec {
  double window_lo = 0.0;
  double window_hi = 0.0;
  int background_degree = 2;
  std::optional<Spectrum> template_spectrum;  // set -> template mode
};

struct IntensityMap {
  int nx = 0, ny = 0;
  std::vector<double> values;  // NaN marks a failed pixel
  int failed_count = 0;

  double at(int ix, int iy) const { return values[static_cast<size_t>(iy) * nx + ix]; }
  std::string to_csv(const std::string& manifest_name = "") const;
};

// Integrated ZPL (or template) intensity per pixel. Per-pixel failures are
// recorded as NaN and counted; the map itself always completes. Pixels may
// be fit concurrently; the output is identical for any thread count.
IntensityMap bin_hyperspectral(const HyperspectralCube& cube,
                               const BinSpec& spec, int threads = 1);

}  // namespace recoil
