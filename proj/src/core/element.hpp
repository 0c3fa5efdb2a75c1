#pragma once

#include <map>
#include <string>

namespace recoil {

// One chemical species with the per-element parameters the transport engine
// needs. displacement_energy is the minimum recoil energy that creates a
// stable vacancy; lattice_binding is subtracted from a displaced recoil's
// kinetic energy.
struct ElementSpec {
  std::string symbol;
  int z = 0;                        // atomic number
  double mass_amu = 0.0;
  double displacement_energy_ev = 0.0;
  double lattice_binding_ev = 0.0;

  void validate() const;
};

// Table of known elements, seeded with toolkit defaults and extendable /
// overridable from config. Defaults cover the species used by the shipped
// configs: C, N, O, Si, Ga.
class ElementTable {
 public:
  static ElementTable defaults();

  void add(const ElementSpec& spec);  // replaces an existing entry
  bool contains(const std::string& symbol) const;
  const ElementSpec& get(const std::string& symbol) const;  // throws InputError

  const std::map<std::string, ElementSpec>& entries() const { return table_; }

 private:
  std::map<std::string, ElementSpec> table_;
};

}  // namespace recoil
