#include "material.hpp"

#include <cctype>
#include <cmath>

#include "errors.hpp"
#include "units.hpp"

namespace recoil {

double Material::mass_density_roundtrip_g_cm3() const {
  double sum = 0.0;  // g/cm^3 = sum_i n_i [1/nm^3] * M_i [g/mol] / (NA * 1e-21)
  for (const auto& c : components)
    sum += c.number_density * c.element.mass_amu;
  return sum / kDensityToAtomsPerNm3;
}

Formula parse_formula(const std::string& text) {
  Formula out;
  size_t i = 0;
  while (i < text.size()) {
    if (!std::isupper(static_cast<unsigned char>(text[i])))
      throw InputError("bad formula '" + text + "': expected element symbol at position " +
                       std::to_string(i));
    std::string sym(1, text[i++]);
    while (i < text.size() && std::islower(static_cast<unsigned char>(text[i])))
      sym += text[i++];
    size_t start = i;
    while (i < text.size() &&
           (std::isdigit(static_cast<unsigned char>(text[i])) || text[i] == '.'))
      ++i;
    double count = 1.0;
    if (i > start) {
      try {
        count = std::stod(text.substr(start, i - start));
      } catch (const std::exception&) {
        throw InputError("bad formula '" + text + "': malformed count after " + sym);
      }
    }
    if (!(count > 0.0))
      throw InputError("bad formula '" + text + "': non-positive count for " + sym);
    out.emplace_back(sym, count);
  }
  if (out.empty()) throw InputError("empty formula");
  return out;
}

Material material_from_formula(const std::string& name, const Formula& formula,
                               double density_g_cm3,
                               const ElementTable& elements) {
  if (!(density_g_cm3 > 0.0))
    throw InputError("material " + name + ": density must be positive");
  if (formula.empty()) throw InputError("material " + name + ": empty formula");

  Material m;
  m.name = name;
  m.mass_density_g_cm3 = density_g_cm3;

  double total_count = 0.0;
  for (const auto& [sym, count] : formula) total_count += count;

  double molar_mass = 0.0;  // g/mol per atom, fraction weighted
  for (const auto& [sym, count] : formula) {
    Material::Component c;
    c.element = elements.get(sym);
    c.fraction = count / total_count;
    molar_mass += c.fraction * c.element.mass_amu;
    m.components.push_back(std::move(c));
  }
  m.molar_mass = molar_mass;

  const double atoms_per_nm3 =
      density_g_cm3 * kDensityToAtomsPerNm3 / molar_mass;
  m.total_number_density = atoms_per_nm3;
  for (auto& c : m.components) c.number_density = c.fraction * atoms_per_nm3;
  return m;
}

}  // namespace recoil
