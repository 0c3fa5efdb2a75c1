#include "target.hpp"

#include <cmath>
#include <limits>

#include <json.hpp>

#include "errors.hpp"

namespace recoil {

TargetStack::TargetStack(std::vector<Layer> films, Material substrate)
    : films_(std::move(films)), substrate_(std::move(substrate)) {
  double depth = 0.0;
  for (const auto& f : films_) {
    if (!(f.thickness_nm > 0.0))
      throw ConfigError("layer '" + f.material.name +
                        "': thickness must be positive");
    depth += f.thickness_nm;
    boundaries_.push_back(depth);
  }
  substrate_start_ = depth;
}

int TargetStack::layer_index(double depth_nm) const {
  if (depth_nm < 0.0)
    throw InputError("negative depth: " + std::to_string(depth_nm));
  for (size_t i = 0; i < boundaries_.size(); ++i)
    if (depth_nm < boundaries_[i]) return static_cast<int>(i);
  return static_cast<int>(films_.size());  // substrate
}

const Material& TargetStack::locate(double depth_nm) const {
  return layer_material(layer_index(depth_nm));
}

const Material& TargetStack::layer_material(int index) const {
  if (index < 0 || index > static_cast<int>(films_.size()))
    throw InternalError("layer index out of range");
  if (index == static_cast<int>(films_.size())) return substrate_;
  return films_[static_cast<size_t>(index)].material;
}

namespace {

Formula formula_from_json(const nlohmann::json& j, const std::string& mat) {
  if (j.is_string()) return parse_formula(j.get<std::string>());
  if (j.is_object()) {
    Formula f;
    for (auto it = j.begin(); it != j.end(); ++it)
      f.emplace_back(it.key(), it.value().get<double>());
    if (f.empty()) throw ConfigError("material " + mat + ": empty formula");
    return f;
  }
  throw ConfigError("material " + mat + ": formula must be string or object");
}

}  // namespace

TargetConfig load_target_config_json(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("target config: ") + e.what());
  }

  ElementTable elements = ElementTable::defaults();
  if (j.contains("elements")) {
    for (auto it = j["elements"].begin(); it != j["elements"].end(); ++it) {
      const auto& e = it.value();
      ElementSpec spec;
      spec.symbol = it.key();
      spec.z = e.at("Z").get<int>();
      spec.mass_amu = e.at("mass_amu").get<double>();
      // Optional fields inherit the defaults table when the symbol is known.
      const bool known = elements.contains(spec.symbol);
      const ElementSpec base = known ? elements.get(spec.symbol) : ElementSpec{};
      spec.displacement_energy_ev =
          e.value("displacement_energy_ev", known ? base.displacement_energy_ev : 25.0);
      spec.lattice_binding_ev =
          e.value("lattice_binding_ev", known ? base.lattice_binding_ev : 3.0);
      elements.add(spec);
    }
  }

  if (!j.contains("materials"))
    throw ConfigError("target config: missing 'materials'");
  std::map<std::string, Material> materials;
  for (auto it = j["materials"].begin(); it != j["materials"].end(); ++it) {
    const std::string name = it.key();
    const auto& m = it.value();
    if (!m.contains("density_g_cm3"))
      throw ConfigError("material " + name + ": missing density_g_cm3");
    try {
      materials[name] =
          material_from_formula(name, formula_from_json(m.at("formula"), name),
                                m.at("density_g_cm3").get<double>(), elements);
    } catch (const InputError& e) {
      throw ConfigError(e.what());  // reclassify: raised while loading config
    }
  }

  if (!j.contains("substrate"))
    throw ConfigError("target config: missing 'substrate'");
  const std::string sub_name = j["substrate"].get<std::string>();
  if (!materials.count(sub_name))
    throw ConfigError("substrate material not defined: " + sub_name);

  std::vector<TargetStack::Layer> films;
  if (j.contains("layers")) {
    for (const auto& l : j["layers"]) {
      const std::string mat_name = l.at("material").get<std::string>();
      if (!materials.count(mat_name))
        throw ConfigError("layer material not defined: " + mat_name);
      films.push_back({materials[mat_name], l.at("thickness_nm").get<double>()});
    }
  }

  return TargetConfig{std::move(elements),
                      TargetStack(std::move(films), materials[sub_name])};
}

}  // namespace recoil
