#pragma once

#include <string>
#include <vector>

#include "material.hpp"

namespace recoil {

// Layered target: films stacked from the surface at z = 0 over a
// semi-infinite substrate. Immutable after construction; safe to share
// read-only across worker threads.
class TargetStack {
 public:
  struct Layer {
    Material material;
    double thickness_nm = 0.0;  // substrate layer uses +inf sentinel
  };

  TargetStack(std::vector<Layer> films, Material substrate);

  // Layer index containing `depth`; a boundary depth belongs to the deeper
  // layer, and anything past the last boundary is the substrate.
  int layer_index(double depth_nm) const;
  const Material& locate(double depth_nm) const;

  const std::vector<Layer>& films() const { return films_; }
  const Material& substrate() const { return substrate_; }
  // Depth of the film/substrate interface (0 for a bare substrate).
  double substrate_start_nm() const { return substrate_start_; }
  // Film boundaries plus the substrate start, strictly increasing.
  const std::vector<double>& boundaries() const { return boundaries_; }
  int layer_count() const { return static_cast<int>(films_.size()) + 1; }
  const Material& layer_material(int index) const;

 private:
  std::vector<Layer> films_;
  Material substrate_;
  std::vector<double> boundaries_;  // cumulative film end depths
  double substrate_start_ = 0.0;
};

// Config-file loading (JSON text): element table overrides, material
// definitions {formula, density}, layer list, substrate name.
struct TargetConfig {
  ElementTable elements;
  TargetStack stack;
};
TargetConfig load_target_config_json(const std::string& json_text);

}  // namespace recoil
