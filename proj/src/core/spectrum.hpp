#pragma once

#include <string>
#include <vector>

namespace recoil {

enum class AxisKind { WavelengthNm, FrequencyMHz, FrequencyGHz };

std::string axis_kind_name(AxisKind k);
AxisKind axis_kind_from_header(const std::string& column_name);

// 1-D intensity data on a strictly increasing axis.
struct Spectrum {
  AxisKind kind = AxisKind::WavelengthNm;
  std::vector<double> axis;
  std::vector<double> intensity;

  void validate() const;  // lengths equal, axis strictly increasing
  size_t size() const { return axis.size(); }

  // Index range [lo, hi) covering the window [x0, x1]; throws InputError
  // when fewer than two points fall inside.
  std::pair<size_t, size_t> window_indices(double x0, double x1) const;
};

// CSV with a one-line header declaring the axis kind, e.g.
// "wavelength_nm,intensity" or "frequency_MHz,intensity".
Spectrum read_spectrum_csv(const std::string& csv_text);
std::string write_spectrum_csv(const Spectrum& s);

// Linear interpolation of `src` onto `axis`; every target point must be
// inside the source range.
std::vector<double> resample_linear(const Spectrum& src,
                                    const std::vector<double>& axis,
                                    const std::string& what);

// Trapezoidal integral of y over the axis range [x0, x1] (clipped to data).
double trapezoid(const std::vector<double>& axis, const std::vector<double>& y,
                 double x0, double x1);

}  // namespace recoil
