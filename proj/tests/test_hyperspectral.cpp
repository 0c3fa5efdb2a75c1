#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "errors.hpp"
#include "hyperspectral.hpp"
#include "synthetic.hpp"

using namespace recoil;

namespace {

HyperspectralCube uniform_cube(int nx, int ny) {
  const Spectrum base = synth::spectrum_of(
      AxisKind::WavelengthNm, synth::linspace(620.0, 660.0, 201),
      {{637.0, 1.5, 500.0}}, {40.0}, 640.0);
  HyperspectralCube cube;
  cube.nx = nx;
  cube.ny = ny;
  cube.kind = base.kind;
  cube.axis = base.axis;
  cube.pixels.assign(static_cast<size_t>(nx) * ny, base.intensity);
  return cube;
}

}  // namespace

TEST_CASE("uniform cube bins to a constant map") {
  const HyperspectralCube cube = uniform_cube(6, 4);
  BinSpec spec;
  spec.window_lo = 630.0;
  spec.window_hi = 644.0;
  const IntensityMap map = bin_hyperspectral(cube, spec, 1);
  CHECK(map.failed_count == 0);
  const double first = map.at(0, 0);
  CHECK(first == doctest::Approx(0.5 * M_PI * 500.0 * 1.5).epsilon(1e-4));
  for (int iy = 0; iy < 4; ++iy)
    for (int ix = 0; ix < 6; ++ix)
      CHECK(map.at(ix, iy) == doctest::Approx(first).epsilon(1e-9));
}

TEST_CASE("bright square region yields a binary map") {
  HyperspectralCube cube = uniform_cube(10, 10);
  // baseline: background only
  const Spectrum bg = synth::spectrum_of(AxisKind::WavelengthNm, cube.axis,
                                         {}, {40.0}, 640.0);
  const Spectrum bright = synth::spectrum_of(
      AxisKind::WavelengthNm, cube.axis, {{637.0, 1.5, 800.0}}, {40.0}, 640.0);
  RngStream rng(5, 0);
  for (int iy = 0; iy < 10; ++iy)
    for (int ix = 0; ix < 10; ++ix) {
      const bool inside = ix >= 3 && ix < 7 && iy >= 3 && iy < 7;
      Spectrum s;
      s.kind = cube.kind;
      s.axis = cube.axis;
      s.intensity = (inside ? bright : bg).intensity;
      synth::add_noise(s, 2.0, rng);
      cube.pixels[static_cast<size_t>(iy) * 10 + ix] = s.intensity;
    }
  BinSpec spec;
  spec.window_lo = 630.0;
  spec.window_hi = 644.0;
  const IntensityMap map = bin_hyperspectral(cube, spec, 1);
  const double thresh = 0.5 * 0.5 * M_PI * 800.0 * 1.5;
  for (int iy = 0; iy < 10; ++iy)
    for (int ix = 0; ix < 10; ++ix) {
      const bool inside = ix >= 3 && ix < 7 && iy >= 3 && iy < 7;
      const double v = map.at(ix, iy);
      if (inside) {
        CHECK(v > thresh);
      } else {
        CHECK((std::isnan(v) || v < thresh));
      }
    }
}

TEST_CASE("flat-noise pixel becomes a sentinel, not a spurious area") {
  HyperspectralCube cube = uniform_cube(2, 1);
  RngStream rng(9, 0);
  Spectrum flat;
  flat.kind = cube.kind;
  flat.axis = cube.axis;
  flat.intensity.assign(cube.axis.size(), 40.0);
  synth::add_noise(flat, 3.0, rng);
  cube.pixels[1] = flat.intensity;
  BinSpec spec;
  spec.window_lo = 630.0;
  spec.window_hi = 644.0;
  const IntensityMap map = bin_hyperspectral(cube, spec, 1);
  CHECK_FALSE(std::isnan(map.at(0, 0)));
  CHECK(std::isnan(map.at(1, 0)));
  CHECK(map.failed_count == 1);
  const std::string csv = map.to_csv();
  CHECK(csv.find("nan") != std::string::npos);
  CHECK(csv.find("failed_pixels: 1") != std::string::npos);
}

TEST_CASE("binning is identical across thread counts") {
  HyperspectralCube cube = uniform_cube(8, 8);
  RngStream rng(6, 0);
  for (auto& p : cube.pixels) {
    Spectrum s;
    s.kind = cube.kind;
    s.axis = cube.axis;
    s.intensity = p;
    synth::add_noise(s, 2.0, rng);
    p = s.intensity;
  }
  BinSpec spec;
  spec.window_lo = 630.0;
  spec.window_hi = 644.0;
  const IntensityMap one = bin_hyperspectral(cube, spec, 1);
  const IntensityMap four = bin_hyperspectral(cube, spec, 4);
  CHECK(one.to_csv() == four.to_csv());
}

TEST_CASE("binary container round trip") {
  const HyperspectralCube cube = uniform_cube(5, 3);
  const std::string bytes = write_cube_binary(cube);
  const HyperspectralCube back = read_cube_binary(bytes);
  CHECK(back.nx == cube.nx);
  CHECK(back.ny == cube.ny);
  CHECK(back.axis == cube.axis);
  CHECK(back.pixels == cube.pixels);
  CHECK_THROWS_AS(read_cube_binary("garbage"), InputError);
  CHECK_THROWS_AS(read_cube_binary(bytes.substr(0, bytes.size() / 2)),
                  InputError);
}

TEST_CASE("directory-of-CSVs cube with an index file") {
  const HyperspectralCube cube = uniform_cube(2, 2);
  const std::string dir = "hyper_test_dir";
  std::remove((dir + "/index.json").c_str());
  REQUIRE(std::system(("mkdir -p " + dir).c_str()) == 0);
  std::string files = "[";
  for (int iy = 0; iy < 2; ++iy) {
    files += iy ? ",[" : "[";
    for (int ix = 0; ix < 2; ++ix) {
      char name[64];
      std::snprintf(name, sizeof name, "px_%d_%d.csv", iy, ix);
      std::ofstream f(dir + "/" + name);
      f << write_spectrum_csv(cube.pixel(ix, iy));
      files += std::string(ix ? "," : "") + "\"" + name + "\"";
    }
    files += "]";
  }
  files += "]";
  const std::string index =
      R"({"nx": 2, "ny": 2, "files": )" + files + "}";
  const HyperspectralCube back = read_cube_index(index, dir);
  CHECK(back.pixels == cube.pixels);
  CHECK(back.axis == cube.axis);
}
