#include "cli_config.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>

namespace nfloc::cli {

namespace pt = boost::property_tree;

const std::vector<std::pair<std::string, std::string>>& default_keys() {
  static const std::vector<std::pair<std::string, std::string>> keys = {
      {"scene.tiles", "16"},
      {"scene.tile_spacing_m", "0.4"},
      {"scene.ris_center_m", "5,10,2"},
      {"scene.ris_axis", "1,0,0"},
      {"scene.elements_x", "4"},
      {"scene.elements_z", "10"},
      {"scene.bs_position_m", "0,5,2"},
      {"scene.room_min_m", "0,0,0"},
      {"scene.room_max_m", "10,10,3"},
      {"scene.wall_clearance_m", "0.5"},
      {"waveform.subcarriers", "256"},
      {"waveform.subcarrier_spacing_hz", "1562500"},
      {"waveform.bandwidth_hz", ""},
      {"waveform.carrier_hz", "28e9"},
      {"waveform.tx_power_dbm", "20"},
      {"waveform.noise_dbm", "-151"},
      {"waveform.oversampling", "4"},
      {"waveform.clock_uncertainty_s", "1e-6"},
      {"psp.frames", "8"},
      {"psp.exclusive_tiles", "4"},
      {"multipath.paths", "3"},
      {"multipath.relative_power_db", "-15"},
      {"multipath.excess_min_m", "0.5"},
      {"multipath.excess_max_m", "5"},
      {"spd.method", "successive"},
      {"spd.noise_threshold", "6"},
      {"spd.relative_floor", "0"},
      {"spd.refine", "false"},
      {"spd.unwrap", "true"},
      {"spl.method", "hybrid"},
      {"spl.residual_cap", "8"},
      {"spl.gate_cells", "0.1"},
      {"spl.room_prior", "true"},
      {"experiment.trials", "200"},
      {"experiment.seed", "1"},
      {"experiment.threads", "0"},
      {"experiment.sweep_var", "L"},
      {"experiment.sweep_values", "8,16"},
      {"experiment.heatmap_resolution_m", "1"},
  };
  return keys;
}

namespace {

std::set<std::string> known_keys() {
  std::set<std::string> out;
  for (const auto& [k, v] : default_keys()) out.insert(k);
  return out;
}

std::string text(const pt::ptree& tree, const std::string& key) {
  return tree.get<std::string>(pt::ptree::path_type(key, '.'));
}

double number(const pt::ptree& tree, const std::string& key) {
  const std::string s = text(tree, key);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size() || !std::isfinite(v))
    throw ConfigError(key + ": expected a number, got '" + s + "'");
  return v;
}

std::size_t count(const pt::ptree& tree, const std::string& key) {
  const double v = number(tree, key);
  if (v < 0.0 || v != std::floor(v)) throw ConfigError(key + ": expected a non-negative integer");
  return static_cast<std::size_t>(v);
}

bool flag(const pt::ptree& tree, const std::string& key) {
  const std::string s = text(tree, key);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError(key + ": expected true or false, got '" + s + "'");
}

std::vector<double> list(const pt::ptree& tree, const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(text(tree, key));
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    try {
      out.push_back(std::stod(item, &used));
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0) throw ConfigError(key + ": bad list entry '" + item + "'");
  }
  return out;
}

Vec3 vec3(const pt::ptree& tree, const std::string& key) {
  const auto v = list(tree, key);
  if (v.size() != 3) throw ConfigError(key + ": expected three comma-separated numbers");
  return {v[0], v[1], v[2]};
}

void put(pt::ptree& tree, const std::string& key, const std::string& value) {
  tree.put(pt::ptree::path_type(key, '.'), value);
}

}  // namespace

pt::ptree load_tree(const std::string& path, const std::map<std::string, std::string>& overrides) {
  const auto known = known_keys();
  pt::ptree tree;
  for (const auto& [k, v] : default_keys()) put(tree, k, v);

  if (!path.empty()) {
    pt::ptree file;
    try {
      pt::read_ini(path, file);
    } catch (const pt::ini_parser_error& e) {
      throw ConfigError(e.what());
    }
    for (const auto& [section, body] : file) {
      if (body.empty()) throw ConfigError("key '" + section + "' outside any section");
      for (const auto& [key, value] : body) {
        const std::string full = section + "." + key;
        if (!known.count(full)) throw ConfigError("unknown config key '" + full + "'");
        put(tree, full, value.data());
      }
    }
  }
  for (const auto& [k, v] : overrides) {
    if (!known.count(k)) throw ConfigError("unknown config key '" + k + "'");
    put(tree, k, v);
  }
  return tree;
}

CliConfig from_tree(const pt::ptree& tree) {
  CliConfig out;
  ExperimentConfig& c = out.experiment;

  c.layout.k = count(tree, "scene.tiles");
  c.layout.tile_spacing = number(tree, "scene.tile_spacing_m");
  c.layout.center = vec3(tree, "scene.ris_center_m");
  c.layout.axis = vec3(tree, "scene.ris_axis");
  if (c.layout.axis.norm() == 0.0) throw ConfigError("scene.ris_axis: zero vector");
  c.layout.axis.normalize();
  c.layout.m_x = count(tree, "scene.elements_x");
  c.layout.m_z = count(tree, "scene.elements_z");
  c.p_bs = vec3(tree, "scene.bs_position_m");
  c.room.lo = vec3(tree, "scene.room_min_m");
  c.room.hi = vec3(tree, "scene.room_max_m");
  c.wall_clearance = number(tree, "scene.wall_clearance_m");

  c.waveform.spacing = number(tree, "waveform.subcarrier_spacing_hz");
  if (!(c.waveform.spacing > 0.0)) throw ConfigError("waveform.subcarrier_spacing_hz must be positive");
  if (text(tree, "waveform.bandwidth_hz").empty()) {
    c.waveform.n_subcarriers = count(tree, "waveform.subcarriers");
  } else {
    const double b = number(tree, "waveform.bandwidth_hz");
    if (!(b > 0.0)) throw ConfigError("waveform.bandwidth_hz must be positive");
    c.waveform.n_subcarriers = static_cast<std::size_t>(std::llround(b / c.waveform.spacing));
  }
  c.waveform.carrier = number(tree, "waveform.carrier_hz");
  c.waveform.tx_power = dbm_to_watts(number(tree, "waveform.tx_power_dbm"));
  c.waveform.noise_psd = text(tree, "waveform.noise_dbm") == "off" ? 0.0
                                                                    : dbm_to_watts(number(tree, "waveform.noise_dbm"));
  c.oversampling = count(tree, "waveform.oversampling");
  c.clock_uncertainty = number(tree, "waveform.clock_uncertainty_s");

  c.waveform.l_frames = count(tree, "psp.frames");
  c.k0 = count(tree, "psp.exclusive_tiles");

  c.multipath.j_paths = count(tree, "multipath.paths");
  c.multipath.relative_power_db = number(tree, "multipath.relative_power_db");
  c.multipath.excess_min_m = number(tree, "multipath.excess_min_m");
  c.multipath.excess_max_m = number(tree, "multipath.excess_max_m");

  const std::string spd = text(tree, "spd.method");
  if (spd == "successive") c.extract.method = ExtractMethod::successive;
  else if (spd == "peaks") c.extract.method = ExtractMethod::peaks;
  else throw ConfigError("spd.method: expected successive or peaks, got '" + spd + "'");
  c.extract.noise_threshold = number(tree, "spd.noise_threshold");
  c.extract.relative_floor = number(tree, "spd.relative_floor");
  c.extract.refine = flag(tree, "spd.refine");
  c.extract.unwrap = flag(tree, "spd.unwrap");

  const std::string spl = text(tree, "spl.method");
  if (spl == "hybrid") c.spl.method = SplMethod::hybrid;
  else if (spl == "sort") c.spl.method = SplMethod::sort;
  else if (spl == "residual") c.spl.method = SplMethod::residual;
  else throw ConfigError("spl.method: expected hybrid, sort or residual, got '" + spl + "'");
  c.spl.residual_cap = count(tree, "spl.residual_cap");
  c.gate_cells = number(tree, "spl.gate_cells");
  c.spl.solve.use_room_prior = flag(tree, "spl.room_prior");

  c.trials = count(tree, "experiment.trials");
  c.seed = static_cast<std::uint64_t>(count(tree, "experiment.seed"));
  c.threads = count(tree, "experiment.threads");
  try {
    c.sweep_var = parse_sweep_var(text(tree, "experiment.sweep_var"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("experiment.sweep_var: ") + e.what());
  }
  c.sweep_values = list(tree, "experiment.sweep_values");
  out.heatmap_resolution_m = number(tree, "experiment.heatmap_resolution_m");
  if (!(out.heatmap_resolution_m > 0.0)) throw ConfigError("experiment.heatmap_resolution_m must be positive");

  try {
    c.validate();
    (void)assign(c.layout.k, c.waveform.l_frames, c.k0);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return out;
}

void write_tree(const std::string& path, const pt::ptree& tree) {
  pt::write_ini(path, tree);
}

}  // namespace nfloc::cli
