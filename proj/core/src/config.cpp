#include "ddlink/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ddlink/errors.hpp"

namespace ddlink {

namespace {

std::string trim(const std::string& s) {
  auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

double to_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: invalid number for key '" + key + "': " + value);
  }
}

long to_long(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    long v = std::stol(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: invalid integer for key '" + key + "': " + value);
  }
}

std::vector<double> to_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(key, trim(item)));
  if (out.empty()) throw ConfigError("config: empty list for key '" + key + "'");
  return out;
}

}  // namespace

std::vector<double> parse_grid(const std::string& text) {
  if (text.find(':') != std::string::npos) {
    std::stringstream ss(text);
    std::string a, b, step;
    std::getline(ss, a, ':');
    std::getline(ss, b, ':');
    std::getline(ss, step);
    double lo = to_double("grid", trim(a));
    double hi = to_double("grid", trim(b));
    double st = step.empty() ? 1.0 : to_double("grid", trim(step));
    if (st <= 0.0) throw ConfigError("config: grid step must be positive");
    std::vector<double> out;
    for (double v = lo; v <= hi + 1e-9 * st; v += st) out.push_back(v);
    return out;
  }
  return to_list("grid", text);
}

SweepConfig parse_config_text(const std::string& text) {
  SweepConfig cfg;
  std::stringstream ss(text);
  std::string line;
  std::string section;
  while (std::getline(ss, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config: malformed section header: " + line);
      section = trim(line.substr(1, line.size() - 2));
      if (section != "otfs" && section != "channel" && section != "hardware" &&
          section != "pilot" && section != "sim")
        throw ConfigError("config: unknown section '" + section + "'");
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: expected key=value, got: " + line);
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    std::string qualified = section + "." + key;

    if (qualified == "otfs.m") cfg.m = to_long(key, value);
    else if (qualified == "otfs.n") cfg.n = to_long(key, value);
    else if (qualified == "otfs.delta_f_hz") cfg.delta_f_hz = to_double(key, value);
    else if (qualified == "otfs.carrier_hz") cfg.carrier_hz = to_double(key, value);
    else if (qualified == "otfs.cp_len") cfg.cp_len = to_long(key, value);
    else if (qualified == "otfs.mod_order") cfg.mod_order = static_cast<int>(to_long(key, value));
    else if (qualified == "channel.max_delay") cfg.max_delay = to_long(key, value);
    else if (qualified == "channel.v_max_kmh") cfg.v_max_kmh = to_double(key, value);
    else if (qualified == "channel.f_max_hz") cfg.f_max_hz = to_double(key, value);
    else if (qualified == "channel.path_powers") cfg.path_powers = to_list(key, value);
    else if (qualified == "hardware.xi_i") cfg.xi_i = to_list(key, value);
    else if (qualified == "hardware.xi_o") cfg.xi_o = to_list(key, value);
    else if (qualified == "pilot.pilot_delay") cfg.pilot_delay = to_long(key, value);
    else if (qualified == "pilot.pilot_doppler") cfg.pilot_doppler = to_long(key, value);
    else if (qualified == "pilot.pilot_power") cfg.pilot_power = to_double(key, value);
    else if (qualified == "pilot.data_power") cfg.data_power = to_double(key, value);
    else if (qualified == "sim.resolution") cfg.resolution = static_cast<int>(to_long(key, value));
    else if (qualified == "sim.snr_db") cfg.snr_db = parse_grid(value);
    else if (qualified == "sim.trials") cfg.trials = to_long(key, value);
    else if (qualified == "sim.seed") { cfg.seed = static_cast<std::uint64_t>(to_long(key, value)); cfg.seed_set = true; }
    else if (qualified == "sim.mode") cfg.mode = value;
    else if (qualified == "sim.csi") cfg.csi = value;
    else if (qualified == "sim.threads") cfg.threads = static_cast<int>(to_long(key, value));
    else if (qualified == "sim.out") cfg.out_dir = value;
    else throw ConfigError("config: unknown key '" + qualified + "'");
  }
  cfg.validate();
  return cfg;
}

SweepConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

void SweepConfig::validate() const {
  if (m < 2 || n < 2) throw ConfigError("config: need otfs.m >= 2 and otfs.n >= 2");
  if (delta_f_hz <= 0 || carrier_hz <= 0)
    throw ConfigError("config: frequencies must be positive");
  if (mod_order < 4) throw ConfigError("config: mod_order must be >= 4");
  if (max_delay < 0 || max_delay + 1 > m)
    throw ConfigError("config: channel.max_delay must lie in [0, m-1]");
  if (!path_powers.empty() &&
      static_cast<Eigen::Index>(path_powers.size()) != max_delay + 1)
    throw ConfigError("config: channel.path_powers must have max_delay+1 entries");
  if (f_max_hz < 0 && v_max_kmh < 0)
    throw ConfigError("config: need channel.v_max_kmh or channel.f_max_hz");
  for (double x : xi_i)
    if (x <= 0.0 || x > 1.0)
      throw ConfigError("config: hardware.xi_i must lie in (0, 1]");
  for (double x : xi_o)
    if (x <= 0.0 || x > 1.0)
      throw ConfigError("config: hardware.xi_o must lie in (0, 1]");
  if (pilot_power < 0 || data_power <= 0)
    throw ConfigError("config: invalid pilot/data power");
  if (resolution < 1) throw ConfigError("config: sim.resolution must be >= 1");
  if (snr_db.empty()) throw ConfigError("config: empty SNR grid");
  if (trials < 1) throw ConfigError("config: sim.trials must be >= 1");
  if (mode != "mse" && mode != "ber" && mode != "both")
    throw ConfigError("config: sim.mode must be mse, ber or both");
  if (csi != "estimated" && csi != "perfect")
    throw ConfigError("config: sim.csi must be estimated or perfect");
  if (threads < 1) throw ConfigError("config: sim.threads must be >= 1");
}

double SweepConfig::derived_f_max() const {
  if (f_max_hz >= 0) return f_max_hz;
  return max_doppler_from_speed(carrier_hz, v_max_kmh / 3.6);
}

OtfsParams SweepConfig::otfs_params() const {
  OtfsParams params;
  params.delay_bins = m;
  params.doppler_bins = n;
  params.subcarrier_spacing_hz = delta_f_hz;
  params.carrier_freq_hz = carrier_hz;
  params.cp_len = cp_len >= 0 ? cp_len : max_delay;
  params.modulation = ModulationSpec::square_qam(mod_order);
  params.validate();
  return params;
}

ChannelProfile SweepConfig::channel_profile() const {
  OtfsParams params = otfs_params();
  ChannelProfile profile;
  if (path_powers.empty()) {
    profile = ChannelProfile::uniform(max_delay + 1, derived_f_max(),
                                      params.sample_interval());
  } else {
    profile.path_powers = path_powers;
    profile.max_doppler_hz = derived_f_max();
    profile.sample_interval_s = params.sample_interval();
    profile.validate();
  }
  return profile;
}

PilotConfig SweepConfig::pilot_config(const OtfsParams& params,
                                      const ChannelProfile& profile) const {
  auto [q_s, q_l] = derive_orders(params, profile, resolution);
  PilotConfig pilot;
  pilot.pilot_delay = pilot_delay >= 0 ? pilot_delay : params.delay_bins / 2;
  pilot.pilot_doppler =
      pilot_doppler >= 0 ? pilot_doppler : params.doppler_bins / 2;
  pilot.guard_delay = max_delay;
  pilot.order_ce = q_s;
  pilot.order_gce = q_l;
  pilot.pilot_power = pilot_power;
  pilot.data_power = data_power;
  pilot.validate(params);
  return pilot;
}

}  // namespace ddlink
