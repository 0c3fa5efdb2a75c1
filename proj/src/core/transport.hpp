#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "kinematics.hpp"
#include "rng.hpp"
#include "scatter.hpp"
#include "target.hpp"

namespace recoil {

// A moving particle: the primary ion (generation 0) or a recoil.
struct IonState {
  int species = 0;  // index into the run's species registry
  double energy_ev = 0.0;
  Vec3 position;    // z is depth below the surface
  Vec3 direction;   // unit vector, +z into the target
  uint32_t generation = 0;
};

// Trajectory termination: "floor" follows every moving atom down to the
// configured floor energy (final positions match TRIM-style range runs);
// "min_displacement" stops atoms once they can no longer displace anything
// in the local material.
enum class CutoffRule { Floor, MinDisplacement };

struct SimConfig {
  explicit SimConfig(TargetConfig t) : target(std::move(t)) {}

  TargetConfig target;
  std::string ion_symbol;
  double ion_energy_ev = 0.0;
  double incidence_angle_deg = 0.0;  // from the surface normal
  uint64_t ion_count = 0;
  uint64_t seed = 1;
  double bin_width_nm = 0.5;
  double max_depth_nm = 300.0;
  double cutoff_floor_ev = 3.0;
  CutoffRule cutoff_rule = CutoffRule::Floor;
  std::string echo_json;  // normalized config echo for output metadata

  static SimConfig from_json(const std::string& json_text);
  void validate() const;  // throws ConfigError
};

struct TransportEvent {
  enum class Kind : uint8_t {
    Segment,      // free flight + electronic loss
    Collision,    // elastic transfer at the segment end
    Vacancy,      // displacement at the collision site
    RecoilSpawn,  // new cascade particle
    Stop,         // particle came to rest (binned by z)
    Exit,         // left through the surface (backward) or max depth
  };
  Kind kind;
  int species = 0;
  uint32_t generation = 0;
  double z = 0.0;
  double z_start = 0.0;          // Segment: depth where the flight began
  double length_nm = 0.0;        // Segment
  double energy_before = 0.0;
  double energy_after = 0.0;
  double transfer = 0.0;         // Collision: T
  int target_species = -1;       // Collision / Vacancy
  bool backward = false;         // Exit
};

// Deterministic species registry for one run: primary ion first, then every
// element of the stack in layer order, deduplicated by symbol.
struct SpeciesRegistry {
  std::vector<ElementSpec> species;
  int index_of(const std::string& symbol) const;  // -1 when absent
};
SpeciesRegistry build_registry(const SimConfig& config);

// Prepared per-run transport data; immutable and shared across workers.
//
// Sink is duck-typed with inline no-op methods compiling away in the tally
// path: segment(state, length, e_before), collision(state, t, target, z),
// vacancy(target, z), recoil(state), stopped(state), exited(state, backward).
class TransportModel {
 public:
  TransportModel(const SimConfig& config, const SpeciesRegistry& registry);

  // Runs one full cascade history (primary plus all recoils).
  template <class Sink>
  void run_history(const IonState& primary, RngStream& rng, Sink& sink) const;

  IonState make_primary(const SimConfig& config) const;
  const SpeciesRegistry& registry() const { return registry_; }
  double substrate_start_nm() const { return substrate_start_; }
  double max_depth_nm() const { return max_depth_; }

 private:
  struct Pair {
    double inv_a = 0.0;       // 1 / screening length [1/nm]
    double eps_per_ev = 0.0;  // reduced energy per eV of lab energy
    double gamma = 0.0;       // max transfer fraction
    double mass_ratio = 0.0;  // m1/m2
    double ed_ev = 0.0;       // target displacement energy
    double eb_ev = 0.0;       // target lattice binding
    int target = 0;           // registry index
  };
  struct Layer {
    double z_end = 0.0;  // +inf for the substrate
    double flight_nm = 0.0;
    double pmax_nm = 0.0;
    double cutoff_ev = 0.0;
    std::vector<double> cum_fraction;          // per target slot
    std::vector<Pair> pairs;                   // [moving * slots + slot]
    std::vector<double> se_coef;               // per moving species
    int slots = 0;
  };

  int locate_layer(double z) const {
    int i = 0;
    while (layers_[i].z_end <= z) ++i;
    return i;
  }

  SpeciesRegistry registry_;
  std::vector<Layer> layers_;
  double substrate_start_ = 0.0;
  double max_depth_ = 0.0;
};

// The transport_history operation: full event log for one primary ion.
std::vector<TransportEvent> transport_history(const SimConfig& config,
                                              uint64_t history_id);

// ---- aggregated output -------------------------------------------------

// Integer tallies make the parallel reduction exact: merging per-thread
// partials is associative and commutative, so a fixed seed gives bitwise
// identical profiles for any worker count.
struct DepthProfileSet {
  std::vector<std::string> species;  // registry order
  double bin_width_nm = 0.0;
  double max_depth_nm = 0.0;
  double substrate_start_nm = 0.0;
  uint64_t ion_count = 0;
  uint64_t seed = 0;
  int bin_count = 0;

  std::vector<std::vector<uint64_t>> stopped;    // [species][bin]
  std::vector<std::vector<uint64_t>> vacancies;  // [host species][bin]
  std::vector<uint64_t> backscattered;           // per species
  std::vector<uint64_t> transmitted;             // per species
  // Per-history substrate-stop moments, for the statistical error of the
  // per-ion counts: sum k and sum k^2 over histories.
  std::vector<uint64_t> substrate_sum;
  std::vector<uint64_t> substrate_sum_sq;

  std::string config_echo;  // normalized config JSON

  double bin_center(int i) const { return (i + 0.5) * bin_width_nm; }
  double stopped_per_ion_per_nm(int sp, int bin) const;
  double stopped_per_ion_total(int sp) const;
  double substrate_per_ion(int sp) const;
  double substrate_per_ion_sigma(int sp) const;  // std error of the mean
  double mean_stop_depth_nm(int sp) const;       // from bin centers
  double std_stop_depth_nm(int sp) const;
  int species_index(const std::string& symbol) const;  // throws InputError

  std::string to_csv(const std::string& manifest_name = "") const;
  std::string to_json(const std::string& manifest_name = "") const;
  static DepthProfileSet from_json(const std::string& text);
  std::string summary_json() const;
};

DepthProfileSet run_simulation(const SimConfig& config, int threads = 1);

// ---- template implementation --------------------------------------------

template <class Sink>
void TransportModel::run_history(const IonState& primary, RngStream& rng,
                                 Sink& sink) const {
  const ScatterTable& table = ScatterTable::instance();
  std::vector<IonState> pending;
  pending.reserve(32);
  pending.push_back(primary);

  while (!pending.empty()) {
    IonState p = pending.back();
    pending.pop_back();

    for (;;) {
      const Layer& home = layers_[locate_layer(p.position.z)];
      if (p.energy_ev < home.cutoff_ev) {
        sink.stopped(p);
        break;
      }

      // Free flight of one interatomic distance in the local material.
      const double length = home.flight_nm;
      const double z_new = p.position.z + length * p.direction.z;
      if (z_new < 0.0) {
        sink.exited(p, /*backward=*/true);
        break;
      }
      if (z_new >= max_depth_) {
        sink.exited(p, /*backward=*/false);
        break;
      }
      const double e_before = p.energy_ev;
      double eloss =
          home.se_coef[p.species] * std::sqrt(p.energy_ev) * length;
      if (eloss > p.energy_ev) eloss = p.energy_ev;
      p.energy_ev -= eloss;
      p.position.x += length * p.direction.x;
      p.position.y += length * p.direction.y;
      p.position.z = z_new;
      sink.segment(p, length, e_before);
      if (p.energy_ev <= 0.0) {
        sink.stopped(p);
        break;
      }

      // Collision partner from the material at the collision site.
      const Layer& site = layers_[locate_layer(z_new)];
      const double u_species = rng.uniform();
      int slot = 0;
      while (slot + 1 < site.slots && u_species > site.cum_fraction[slot])
        ++slot;
      const Pair& pair = site.pairs[p.species * site.slots + slot];

      // Impact parameter uniform in area up to p_max of the flight segment;
      // azimuth from a rejection-sampled point on the unit circle.
      const double p_impact = home.pmax_nm * std::sqrt(rng.uniform());
      double v1, v2, rr;
      do {
        v1 = 2.0 * rng.uniform() - 1.0;
        v2 = 2.0 * rng.uniform() - 1.0;
        rr = v1 * v1 + v2 * v2;
      } while (rr >= 1.0 || rr == 0.0);
      const double inv_rr = 1.0 / rr;
      const double cos_az = (v1 * v1 - v2 * v2) * inv_rr;
      const double sin_az = 2.0 * v1 * v2 * inv_rr;

      const double eps = pair.eps_per_ev * p.energy_ev;
      const double b = p_impact * pair.inv_a;
      const double s2 = table.sin2_half(eps, b);
      const double transfer = pair.gamma * p.energy_ev * s2;
      sink.collision(p, transfer, pair.target, z_new);

      if (transfer > pair.ed_ev) {
        sink.vacancy(pair.target, z_new);
        IonState rec;
        rec.species = pair.target;
        rec.energy_ev = std::max(0.0, transfer - pair.eb_ev);
        rec.position = p.position;
        rec.direction = rotate_direction(p.direction, std::sqrt(s2),
                                         std::sqrt(1.0 - s2), -cos_az, -sin_az);
        rec.generation = p.generation + 1;
        sink.recoil(rec);
        pending.push_back(rec);
      }

      const double cos_cm = 1.0 - 2.0 * s2;
      const double sin_cm = 2.0 * std::sqrt(std::max(0.0, s2 * (1.0 - s2)));
      const double den2 =
          1.0 + 2.0 * pair.mass_ratio * cos_cm + pair.mass_ratio * pair.mass_ratio;
      if (den2 > 1e-300) {
        const double inv_den = 1.0 / std::sqrt(den2);
        p.direction =
            rotate_direction(p.direction, (cos_cm + pair.mass_ratio) * inv_den,
                             sin_cm * inv_den, cos_az, sin_az);
      }
      p.energy_ev -= transfer;
    }
  }
}

}  // namespace recoil
