#include "transport.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <thread>

#include <json.hpp>

#include "errors.hpp"
#include "stopping.hpp"
#include "units.hpp"

namespace recoil {

using nlohmann::json;

// ---- config --------------------------------------------------------------

SimConfig SimConfig::from_json(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("sim config: ") + e.what());
  }

  SimConfig cfg(load_target_config_json(json_text));
  try {
    const auto& ion = j.at("ion");
    cfg.ion_symbol = ion.at("species").get<std::string>();
    cfg.ion_energy_ev = ion.at("energy_ev").get<double>();
    cfg.incidence_angle_deg = ion.value("angle_deg", 0.0);
    cfg.ion_count = j.at("ion_count").get<uint64_t>();
    cfg.seed = j.value("seed", uint64_t{1});
    cfg.bin_width_nm = j.value("bin_width_nm", 0.5);
    cfg.max_depth_nm = j.value("max_depth_nm", 300.0);
    cfg.cutoff_floor_ev = j.value("cutoff_floor_ev", 3.0);
    const std::string rule = j.value("cutoff_rule", "floor");
    if (rule == "floor")
      cfg.cutoff_rule = CutoffRule::Floor;
    else if (rule == "min_displacement")
      cfg.cutoff_rule = CutoffRule::MinDisplacement;
    else
      throw ConfigError("sim config: cutoff_rule must be 'floor' or "
                        "'min_displacement'");
  } catch (const json::exception& e) {
    throw ConfigError(std::string("sim config: ") + e.what());
  }
  cfg.echo_json = j.dump();
  cfg.validate();
  return cfg;
}

void SimConfig::validate() const {
  if (!target.elements.contains(ion_symbol))
    throw ConfigError("ion species not in element table: " + ion_symbol);
  if (!(ion_energy_ev > 0.0)) throw ConfigError("ion energy must be positive");
  if (incidence_angle_deg < 0.0 || incidence_angle_deg >= 90.0)
    throw ConfigError("incidence angle must be in [0, 90) deg");
  if (ion_count < 1) throw ConfigError("ion_count must be >= 1");
  if (!(bin_width_nm > 0.0)) throw ConfigError("bin_width_nm must be positive");
  if (!(max_depth_nm > target.stack.substrate_start_nm()))
    throw ConfigError("max_depth_nm must exceed the deepest layer boundary");
  if (!(cutoff_floor_ev > 0.0))
    throw ConfigError("cutoff_floor_ev must be positive");
}

SpeciesRegistry build_registry(const SimConfig& config) {
  SpeciesRegistry reg;
  auto add = [&reg](const ElementSpec& e) {
    for (const auto& s : reg.species)
      if (s.symbol == e.symbol) return;
    reg.species.push_back(e);
  };
  add(config.target.elements.get(config.ion_symbol));
  for (const auto& layer : config.target.stack.films())
    for (const auto& c : layer.material.components) add(c.element);
  for (const auto& c : config.target.stack.substrate().components)
    add(c.element);
  return reg;
}

int SpeciesRegistry::index_of(const std::string& symbol) const {
  for (size_t i = 0; i < species.size(); ++i)
    if (species[i].symbol == symbol) return static_cast<int>(i);
  return -1;
}

// ---- model preparation -----------------------------------------------------

TransportModel::TransportModel(const SimConfig& config,
                               const SpeciesRegistry& registry)
    : registry_(registry),
      substrate_start_(config.target.stack.substrate_start_nm()),
      max_depth_(config.max_depth_nm) {
  const TargetStack& stack = config.target.stack;
  const int n_moving = static_cast<int>(registry_.species.size());

  for (int li = 0; li < stack.layer_count(); ++li) {
    const Material& mat = stack.layer_material(li);
    Layer layer;
    layer.z_end = (li < stack.layer_count() - 1)
                      ? stack.boundaries()[li]
                      : std::numeric_limits<double>::infinity();
    const double n_total = mat.total_number_density;
    layer.flight_nm = 1.0 / std::cbrt(n_total);
    layer.pmax_nm = 1.0 / std::sqrt(M_PI * n_total * layer.flight_nm);
    layer.slots = static_cast<int>(mat.components.size());

    double min_ed = std::numeric_limits<double>::infinity();
    double cum = 0.0;
    for (const auto& c : mat.components) {
      cum += c.number_density / n_total;
      layer.cum_fraction.push_back(cum);
      min_ed = std::min(min_ed, c.element.displacement_energy_ev);
    }
    layer.cum_fraction.back() = 1.0;
    layer.cutoff_ev = (config.cutoff_rule == CutoffRule::MinDisplacement)
                          ? std::max(config.cutoff_floor_ev, min_ed)
                          : config.cutoff_floor_ev;

    layer.pairs.resize(static_cast<size_t>(n_moving) * layer.slots);
    layer.se_coef.resize(n_moving);
    for (int m = 0; m < n_moving; ++m) {
      const ElementSpec& mv = registry_.species[m];
      layer.se_coef[m] = ls_material_coefficient(mv, mat);
      for (int s = 0; s < layer.slots; ++s) {
        const ElementSpec& tg = mat.components[s].element;
        Pair pr;
        pr.inv_a = 1.0 / screening_length_nm(mv.z, tg.z);
        pr.eps_per_ev = reduced_energy(mv.z, mv.mass_amu, tg.z, tg.mass_amu, 1.0);
        pr.gamma = transfer_fraction_max(mv.mass_amu, tg.mass_amu);
        pr.mass_ratio = mv.mass_amu / tg.mass_amu;
        pr.ed_ev = tg.displacement_energy_ev;
        pr.eb_ev = tg.lattice_binding_ev;
        pr.target = registry_.index_of(tg.symbol);
        layer.pairs[static_cast<size_t>(m) * layer.slots + s] = pr;
      }
    }
    layers_.push_back(std::move(layer));
  }
}

IonState TransportModel::make_primary(const SimConfig& config) const {
  IonState ion;
  ion.species = 0;
  ion.energy_ev = config.ion_energy_ev;
  ion.position = {0.0, 0.0, 0.0};
  const double a = config.incidence_angle_deg * M_PI / 180.0;
  ion.direction = {std::sin(a), 0.0, std::cos(a)};
  ion.generation = 0;
  return ion;
}

// ---- sinks -----------------------------------------------------------------

namespace {

struct EventSink {
  std::vector<TransportEvent> events;

  void segment(const IonState& p, double length, double e_before) {
    TransportEvent e{};
    e.kind = TransportEvent::Kind::Segment;
    e.species = p.species;
    e.generation = p.generation;
    e.z = p.position.z;
    // direction is unchanged during the flight, so the start is recoverable
    e.z_start = p.position.z - length * p.direction.z;
    e.length_nm = length;
    e.energy_before = e_before;
    e.energy_after = p.energy_ev;
    events.push_back(e);
  }
  void collision(const IonState& p, double t, int target, double z) {
    TransportEvent e{};
    e.kind = TransportEvent::Kind::Collision;
    e.species = p.species;
    e.generation = p.generation;
    e.z = z;
    e.energy_before = p.energy_ev;
    e.energy_after = p.energy_ev - t;
    e.transfer = t;
    e.target_species = target;
    events.push_back(e);
  }
  void vacancy(int target, double z) {
    TransportEvent e{};
    e.kind = TransportEvent::Kind::Vacancy;
    e.target_species = target;
    e.species = target;
    e.z = z;
    events.push_back(e);
  }
  void recoil(const IonState& r) {
    TransportEvent e{};
    e.kind = TransportEvent::Kind::RecoilSpawn;
    e.species = r.species;
    e.generation = r.generation;
    e.z = r.position.z;
    e.energy_after = r.energy_ev;
    events.push_back(e);
  }
  void stopped(const IonState& p) {
    TransportEvent e{};
    e.kind = TransportEvent::Kind::Stop;
    e.species = p.species;
    e.generation = p.generation;
    e.z = p.position.z;
    e.energy_after = p.energy_ev;
    events.push_back(e);
  }
  void exited(const IonState& p, bool backward) {
    TransportEvent e{};
    e.kind = TransportEvent::Kind::Exit;
    e.species = p.species;
    e.generation = p.generation;
    e.z = p.position.z;
    e.energy_after = p.energy_ev;
    e.backward = backward;
    events.push_back(e);
  }
};

struct TallySink {
  int n_species = 0;
  int n_bins = 0;
  double inv_bin = 0.0;
  double substrate_start = 0.0;
  std::vector<uint64_t> stop_counts;  // [species * n_bins + bin]
  std::vector<uint64_t> vac_counts;   // [species * n_bins + bin]
  std::vector<uint64_t> back_counts, trans_counts;
  std::vector<uint64_t> sub_sum, sub_sum_sq;
  std::vector<uint32_t> history_substrate;  // per-history scratch

  TallySink(int ns, int nb, double bin_width, double sub_start)
      : n_species(ns),
        n_bins(nb),
        inv_bin(1.0 / bin_width),
        substrate_start(sub_start),
        stop_counts(static_cast<size_t>(ns) * nb, 0),
        vac_counts(static_cast<size_t>(ns) * nb, 0),
        back_counts(ns, 0),
        trans_counts(ns, 0),
        sub_sum(ns, 0),
        sub_sum_sq(ns, 0),
        history_substrate(ns, 0) {}

  int bin_of(double z) const {
    int b = static_cast<int>(z * inv_bin);
    if (b < 0) b = 0;
    if (b >= n_bins) b = n_bins - 1;
    return b;
  }

  void segment(const IonState&, double, double) {}
  void collision(const IonState&, double, int, double) {}
  void recoil(const IonState&) {}
  void vacancy(int target, double z) {
    ++vac_counts[static_cast<size_t>(target) * n_bins + bin_of(z)];
  }
  void stopped(const IonState& p) {
    ++stop_counts[static_cast<size_t>(p.species) * n_bins +
                  bin_of(p.position.z)];
    if (p.position.z >= substrate_start) ++history_substrate[p.species];
  }
  void exited(const IonState& p, bool backward) {
    if (backward)
      ++back_counts[p.species];
    else
      ++trans_counts[p.species];
  }

  void end_history() {
    for (int s = 0; s < n_species; ++s) {
      const uint64_t k = history_substrate[s];
      sub_sum[s] += k;
      sub_sum_sq[s] += k * k;
      history_substrate[s] = 0;
    }
  }

  void merge_into(DepthProfileSet& out) const {
    for (int s = 0; s < n_species; ++s) {
      for (int b = 0; b < n_bins; ++b) {
        out.stopped[s][b] += stop_counts[static_cast<size_t>(s) * n_bins + b];
        out.vacancies[s][b] += vac_counts[static_cast<size_t>(s) * n_bins + b];
      }
      out.backscattered[s] += back_counts[s];
      out.transmitted[s] += trans_counts[s];
      out.substrate_sum[s] += sub_sum[s];
      out.substrate_sum_sq[s] += sub_sum_sq[s];
    }
  }
};

}  // namespace

std::vector<TransportEvent> transport_history(const SimConfig& config,
                                              uint64_t history_id) {
  const SpeciesRegistry registry = build_registry(config);
  const TransportModel model(config, registry);
  RngStream rng(config.seed, history_id);
  EventSink sink;
  model.run_history(model.make_primary(config), rng, sink);
  return sink.events;
}

// ---- simulation driver -----------------------------------------------------

DepthProfileSet run_simulation(const SimConfig& config, int threads) {
  config.validate();
  const SpeciesRegistry registry = build_registry(config);
  const TransportModel model(config, registry);

  const int n_species = static_cast<int>(registry.species.size());
  const int n_bins =
      static_cast<int>(std::ceil(config.max_depth_nm / config.bin_width_nm));

  DepthProfileSet out;
  for (const auto& s : registry.species) out.species.push_back(s.symbol);
  out.bin_width_nm = config.bin_width_nm;
  out.max_depth_nm = config.max_depth_nm;
  out.substrate_start_nm = config.target.stack.substrate_start_nm();
  out.ion_count = config.ion_count;
  out.seed = config.seed;
  out.bin_count = n_bins;
  out.stopped.assign(n_species, std::vector<uint64_t>(n_bins, 0));
  out.vacancies.assign(n_species, std::vector<uint64_t>(n_bins, 0));
  out.backscattered.assign(n_species, 0);
  out.transmitted.assign(n_species, 0);
  out.substrate_sum.assign(n_species, 0);
  out.substrate_sum_sq.assign(n_species, 0);
  out.config_echo = config.echo_json;

  if (threads < 1) threads = 1;
  const uint64_t n = config.ion_count;
  if (static_cast<uint64_t>(threads) > n) threads = static_cast<int>(n);

  auto run_chunk = [&](uint64_t lo, uint64_t hi, TallySink& tally) {
    const IonState primary = model.make_primary(config);
    for (uint64_t h = lo; h < hi; ++h) {
      RngStream rng(config.seed, h);
      model.run_history(primary, rng, tally);
      tally.end_history();
    }
  };

  std::vector<TallySink> tallies;
  tallies.reserve(threads);
  for (int t = 0; t < threads; ++t)
    tallies.emplace_back(n_species, n_bins, config.bin_width_nm,
                         out.substrate_start_nm);

  if (threads == 1) {
    run_chunk(0, n, tallies[0]);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
      const uint64_t lo = n * t / threads;
      const uint64_t hi = n * (t + 1) / threads;
      pool.emplace_back(run_chunk, lo, hi, std::ref(tallies[t]));
    }
    for (auto& th : pool) th.join();
  }
  // Integer merge: result independent of the thread partition.
  for (const auto& t : tallies) t.merge_into(out);
  return out;
}

// ---- DepthProfileSet -------------------------------------------------------

double DepthProfileSet::stopped_per_ion_per_nm(int sp, int bin) const {
  return static_cast<double>(stopped[sp][bin]) /
         (static_cast<double>(ion_count) * bin_width_nm);
}

double DepthProfileSet::stopped_per_ion_total(int sp) const {
  uint64_t total = 0;
  for (uint64_t c : stopped[sp]) total += c;
  return static_cast<double>(total) / static_cast<double>(ion_count);
}

double DepthProfileSet::substrate_per_ion(int sp) const {
  return static_cast<double>(substrate_sum[sp]) /
         static_cast<double>(ion_count);
}

double DepthProfileSet::substrate_per_ion_sigma(int sp) const {
  const double n = static_cast<double>(ion_count);
  if (n < 2) return 0.0;
  const double sum = static_cast<double>(substrate_sum[sp]);
  const double sum_sq = static_cast<double>(substrate_sum_sq[sp]);
  const double var = (sum_sq - sum * sum / n) / (n - 1.0);
  return std::sqrt(std::max(0.0, var) / n);
}

double DepthProfileSet::mean_stop_depth_nm(int sp) const {
  double w = 0.0, wz = 0.0;
  for (int b = 0; b < bin_count; ++b) {
    const double c = static_cast<double>(stopped[sp][b]);
    w += c;
    wz += c * bin_center(b);
  }
  return w > 0.0 ? wz / w : 0.0;
}

double DepthProfileSet::std_stop_depth_nm(int sp) const {
  const double mu = mean_stop_depth_nm(sp);
  double w = 0.0, wz2 = 0.0;
  for (int b = 0; b < bin_count; ++b) {
    const double c = static_cast<double>(stopped[sp][b]);
    const double d = bin_center(b) - mu;
    w += c;
    wz2 += c * d * d;
  }
  return w > 0.0 ? std::sqrt(wz2 / w) : 0.0;
}

int DepthProfileSet::species_index(const std::string& symbol) const {
  for (size_t i = 0; i < species.size(); ++i)
    if (species[i] == symbol) return static_cast<int>(i);
  throw InputError("species not present in profile set: " + symbol);
}

namespace {

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string DepthProfileSet::to_csv(const std::string& manifest_name) const {
  std::string out;
  out.reserve(static_cast<size_t>(bin_count) * species.size() * 12);
  out += "# depth profiles: stopped atoms and vacancies per incident ion\n";
  if (!manifest_name.empty()) out += "# manifest: " + manifest_name + "\n";
  out += "# units: atoms*ion^-1*nm^-1; depth at bin centers\n";
  out += "depth_nm";
  for (const auto& s : species) out += ",stopped_" + s;
  for (const auto& s : species) out += ",vacancies_" + s;
  out += "\n";
  const double norm =
      1.0 / (static_cast<double>(ion_count) * bin_width_nm);
  for (int b = 0; b < bin_count; ++b) {
    out += format_double(bin_center(b));
    for (size_t s = 0; s < species.size(); ++s) {
      out += ',';
      out += format_double(static_cast<double>(stopped[s][b]) * norm);
    }
    for (size_t s = 0; s < species.size(); ++s) {
      out += ',';
      out += format_double(static_cast<double>(vacancies[s][b]) * norm);
    }
    out += '\n';
  }
  return out;
}

std::string DepthProfileSet::to_json(const std::string& manifest_name) const {
  json j;
  j["kind"] = "depth_profiles";
  if (!manifest_name.empty()) j["manifest"] = manifest_name;
  j["species"] = species;
  j["ion_count"] = ion_count;
  j["seed"] = seed;
  j["bin_width_nm"] = bin_width_nm;
  j["max_depth_nm"] = max_depth_nm;
  j["substrate_start_nm"] = substrate_start_nm;
  j["bin_count"] = bin_count;
  for (size_t s = 0; s < species.size(); ++s) {
    j["stopped_counts"][species[s]] = stopped[s];
    j["vacancy_counts"][species[s]] = vacancies[s];
    j["backscattered"][species[s]] = backscattered[s];
    j["transmitted"][species[s]] = transmitted[s];
    j["substrate_moments"][species[s]] = {{"sum", substrate_sum[s]},
                                          {"sum_sq", substrate_sum_sq[s]}};
  }
  if (!config_echo.empty()) j["config"] = json::parse(config_echo);
  return j.dump(2) + "\n";
}

DepthProfileSet DepthProfileSet::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("depth profiles: ") + e.what());
  }
  if (j.value("kind", "") != "depth_profiles")
    throw InputError("depth profiles: unexpected document kind");
  DepthProfileSet p;
  try {
    p.species = j.at("species").get<std::vector<std::string>>();
    p.ion_count = j.at("ion_count").get<uint64_t>();
    p.seed = j.at("seed").get<uint64_t>();
    p.bin_width_nm = j.at("bin_width_nm").get<double>();
    p.max_depth_nm = j.at("max_depth_nm").get<double>();
    p.substrate_start_nm = j.at("substrate_start_nm").get<double>();
    p.bin_count = j.at("bin_count").get<int>();
    for (const auto& s : p.species) {
      p.stopped.push_back(j.at("stopped_counts").at(s).get<std::vector<uint64_t>>());
      p.vacancies.push_back(j.at("vacancy_counts").at(s).get<std::vector<uint64_t>>());
      p.backscattered.push_back(j.at("backscattered").at(s).get<uint64_t>());
      p.transmitted.push_back(j.at("transmitted").at(s).get<uint64_t>());
      p.substrate_sum.push_back(
          j.at("substrate_moments").at(s).at("sum").get<uint64_t>());
      p.substrate_sum_sq.push_back(
          j.at("substrate_moments").at(s).at("sum_sq").get<uint64_t>());
    }
    if (j.contains("config")) p.config_echo = j["config"].dump();
  } catch (const json::exception& e) {
    throw InputError(std::string("depth profiles: ") + e.what());
  }
  return p;
}

std::string DepthProfileSet::summary_json() const {
  json j;
  j["ion_count"] = ion_count;
  j["seed"] = seed;
  j["substrate_start_nm"] = substrate_start_nm;
  const double n = static_cast<double>(ion_count);
  for (size_t s = 0; s < species.size(); ++s) {
    json e;
    e["stopped_per_ion"] = stopped_per_ion_total(static_cast<int>(s));
    e["backscattered_fraction"] = static_cast<double>(backscattered[s]) / n;
    e["transmitted_fraction"] = static_cast<double>(transmitted[s]) / n;
    e["mean_depth_nm"] = mean_stop_depth_nm(static_cast<int>(s));
    e["std_depth_nm"] = std_stop_depth_nm(static_cast<int>(s));
    e["substrate_per_ion"] = substrate_per_ion(static_cast<int>(s));
    e["substrate_per_ion_sigma"] = substrate_per_ion_sigma(static_cast<int>(s));
    j["species"][species[s]] = e;
  }
  return j.dump(2) + "\n";
}

}  // namespace recoil
