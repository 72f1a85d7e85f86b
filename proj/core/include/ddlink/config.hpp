#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ddlink/link.hpp"

namespace ddlink {

// Sweep configuration, parsed from a flat key=value file with sections
// [otfs] [channel] [hardware] [pilot] [sim]. Unset keys take the defaults
// below. SNR is defined as sigma_d^2 / sigma_w^2.
struct SweepConfig {
  // [otfs]
  Eigen::Index m = 64;
  Eigen::Index n = 16;
  double delta_f_hz = 30e3;
  double carrier_hz = 4e9;
  Eigen::Index cp_len = -1;  // -1: use the channel delay spread
  int mod_order = 4;

  // [channel]
  Eigen::Index max_delay = 5;  // L
  double v_max_kmh = 500.0;
  double f_max_hz = -1.0;  // <0: derive from v_max_kmh
  std::vector<double> path_powers;  // empty: uniform

  // [hardware]
  std::vector<double> xi_i{1.0};
  std::vector<double> xi_o{1.0};

  // [pilot]
  Eigen::Index pilot_delay = -1;    // -1: centered
  Eigen::Index pilot_doppler = -1;  // -1: centered
  double pilot_power = 1.0;
  double data_power = 1.0;

  // [sim]
  int resolution = 2;
  std::vector<double> snr_db{0, 5, 10, 15, 20, 25};
  long trials = 200;
  std::uint64_t seed = 1;
  bool seed_set = false;
  std::string mode = "both";        // mse | ber | both
  std::string csi = "estimated";    // estimated | perfect
  int threads = 1;
  std::string out_dir = "results";

  void validate() const;
  double derived_f_max() const;
  OtfsParams otfs_params() const;
  ChannelProfile channel_profile() const;
  // Pilot layout with (Q_S, Q_L) derived from the channel and resolution.
  PilotConfig pilot_config(const OtfsParams& params,
                           const ChannelProfile& profile) const;
  bool wants_mse() const { return mode == "mse" || mode == "both"; }
  bool wants_ber() const { return mode == "ber" || mode == "both"; }
};

SweepConfig parse_config_text(const std::string& text);
SweepConfig parse_config_file(const std::string& path);

// "a:b:step" or comma-separated values.
std::vector<double> parse_grid(const std::string& text);

}  // namespace ddlink
