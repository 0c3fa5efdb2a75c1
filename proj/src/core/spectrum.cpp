#include "spectrum.hpp"

#include <algorithm>
#include <cmath>

#include "csv.hpp"
#include "errors.hpp"

namespace recoil {

std::string axis_kind_name(AxisKind k) {
  switch (k) {
    case AxisKind::WavelengthNm: return "wavelength_nm";
    case AxisKind::FrequencyMHz: return "frequency_MHz";
    case AxisKind::FrequencyGHz: return "frequency_GHz";
  }
  return "unknown";
}

AxisKind axis_kind_from_header(const std::string& column_name) {
  if (column_name == "wavelength_nm") return AxisKind::WavelengthNm;
  if (column_name == "frequency_MHz") return AxisKind::FrequencyMHz;
  if (column_name == "frequency_GHz") return AxisKind::FrequencyGHz;
  throw InputError("spectrum CSV: unrecognized axis column '" + column_name +
                   "' (expected wavelength_nm, frequency_MHz or frequency_GHz)");
}

void Spectrum::validate() const {
  if (axis.size() != intensity.size())
    throw InputError("spectrum: axis/intensity length mismatch");
  if (axis.size() < 2) throw InputError("spectrum: needs at least two points");
  for (size_t i = 1; i < axis.size(); ++i)
    if (!(axis[i] > axis[i - 1]))
      throw InputError("spectrum: axis not strictly increasing at index " +
                       std::to_string(i));
  for (double v : intensity)
    if (!std::isfinite(v)) throw InputError("spectrum: non-finite intensity");
}

std::pair<size_t, size_t> Spectrum::window_indices(double x0, double x1) const {
  auto lo = std::lower_bound(axis.begin(), axis.end(), x0);
  auto hi = std::upper_bound(axis.begin(), axis.end(), x1);
  const size_t a = static_cast<size_t>(lo - axis.begin());
  const size_t b = static_cast<size_t>(hi - axis.begin());
  if (b < a + 2)
    throw InputError("window [" + std::to_string(x0) + ", " +
                     std::to_string(x1) + "] covers fewer than two points");
  return {a, b};
}

Spectrum read_spectrum_csv(const std::string& csv_text) {
  const CsvTable t = parse_csv(csv_text);
  if (t.header.size() != 2 || t.header[1] != "intensity")
    throw InputError("spectrum CSV: header must be '<axis>,intensity'");
  Spectrum s;
  s.kind = axis_kind_from_header(t.header[0]);
  s.axis.reserve(t.rows.size());
  s.intensity.reserve(t.rows.size());
  for (size_t r = 0; r < t.rows.size(); ++r) {
    s.axis.push_back(csv_to_double(t, r, 0));
    s.intensity.push_back(csv_to_double(t, r, 1));
  }
  s.validate();
  return s;
}

std::string write_spectrum_csv(const Spectrum& s) {
  std::string out = axis_kind_name(s.kind) + ",intensity\n";
  for (size_t i = 0; i < s.axis.size(); ++i)
    out += format_compact(s.axis[i]) + ',' + format_compact(s.intensity[i]) + '\n';
  return out;
}

std::vector<double> resample_linear(const Spectrum& src,
                                    const std::vector<double>& axis,
                                    const std::string& what) {
  std::vector<double> out;
  out.reserve(axis.size());
  for (double x : axis) {
    if (x < src.axis.front() || x > src.axis.back())
      throw InputError(what + ": does not cover point " + std::to_string(x));
    auto it = std::lower_bound(src.axis.begin(), src.axis.end(), x);
    size_t i = static_cast<size_t>(it - src.axis.begin());
    if (i == 0) {
      out.push_back(src.intensity.front());
      continue;
    }
    const double x0 = src.axis[i - 1], x1 = src.axis[i];
    const double t = (x - x0) / (x1 - x0);
    out.push_back(src.intensity[i - 1] +
                  t * (src.intensity[i] - src.intensity[i - 1]));
  }
  return out;
}

double trapezoid(const std::vector<double>& axis, const std::vector<double>& y,
                 double x0, double x1) {
  double sum = 0.0;
  for (size_t i = 1; i < axis.size(); ++i) {
    const double a = std::max(axis[i - 1], x0);
    const double b = std::min(axis[i], x1);
    if (b <= a) continue;
    // linear segment between the two samples, clipped to [x0, x1]
    const double dx = axis[i] - axis[i - 1];
    const double ya = y[i - 1] + (y[i] - y[i - 1]) * (a - axis[i - 1]) / dx;
    const double yb = y[i - 1] + (y[i] - y[i - 1]) * (b - axis[i - 1]) / dx;
    sum += 0.5 * (ya + yb) * (b - a);
  }
  return sum;
}

}  // namespace recoil
