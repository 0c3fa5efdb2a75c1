#include "element.hpp"

#include "errors.hpp"

namespace recoil {

void ElementSpec::validate() const {
  if (symbol.empty()) throw ConfigError("element with empty symbol");
  if (z < 1) throw ConfigError("element " + symbol + ": Z must be >= 1");
  if (!(mass_amu > 0.0))
    throw ConfigError("element " + symbol + ": mass must be positive");
  if (!(displacement_energy_ev > 0.0))
    throw ConfigError("element " + symbol +
                      ": displacement energy must be positive");
  if (lattice_binding_ev < 0.0)
    throw ConfigError("element " + symbol +
                      ": lattice binding must be non-negative");
}

ElementTable ElementTable::defaults() {
  ElementTable t;
  // Displacement energies are toolkit defaults, user-overridable via the
  // element table in the config file. Lattice binding defaults to 3 eV.
  t.add({"C", 6, 12.011, 37.5, 3.0});
  t.add({"N", 7, 14.007, 28.0, 3.0});
  t.add({"O", 8, 15.999, 28.0, 3.0});
  t.add({"Si", 14, 28.085, 15.0, 3.0});
  t.add({"Ga", 31, 69.72, 25.0, 3.0});
  return t;
}

void ElementTable::add(const ElementSpec& spec) {
  spec.validate();
  table_[spec.symbol] = spec;
}

bool ElementTable::contains(const std::string& symbol) const {
  return table_.count(symbol) != 0;
}

const ElementSpec& ElementTable::get(const std::string& symbol) const {
  auto it = table_.find(symbol);
  if (it == table_.end()) throw InputError("unknown element: " + symbol);
  return it->second;
}

}  // namespace recoil
