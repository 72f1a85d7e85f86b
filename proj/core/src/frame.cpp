#include "ddlink/frame.hpp"

#include <cmath>

#include "ddlink/errors.hpp"

namespace ddlink {

void OtfsParams::validate() const {
  if (delay_bins < 2 || doppler_bins < 2)
    throw ConfigError("OtfsParams: need M, N >= 2");
  if (subcarrier_spacing_hz <= 0.0 || carrier_freq_hz <= 0.0)
    throw ConfigError("OtfsParams: frequencies must be positive");
  if (cp_len < 0) throw ConfigError("OtfsParams: cp_len must be >= 0");
}

PilotConfig PilotConfig::centered(const OtfsParams& params,
                                  Eigen::Index guard_delay, int order_ce,
                                  int order_gce, double pilot_power,
                                  double data_power) {
  PilotConfig pilot;
  pilot.pilot_delay = params.delay_bins / 2;
  pilot.pilot_doppler = params.doppler_bins / 2;
  pilot.guard_delay = guard_delay;
  pilot.order_ce = order_ce;
  pilot.order_gce = order_gce;
  pilot.pilot_power = pilot_power;
  pilot.data_power = data_power;
  pilot.validate(params);
  return pilot;
}

void PilotConfig::validate(const OtfsParams& params) const {
  if (guard_delay < 0 || order_ce < 0 || order_gce < 0)
    throw ConfigError("PilotConfig: negative guard sizes");
  if ((order_ce + order_gce) % 2 != 0)
    throw ConfigError("PilotConfig: Q_S + Q_L must be even");
  if (pilot_power < 0.0 || data_power < 0.0)
    throw ConfigError("PilotConfig: negative powers");
  Eigen::Index kw = doppler_halfwidth();
  if (pilot_delay - guard_delay < 0 ||
      pilot_delay + guard_delay >= params.delay_bins)
    throw ConfigError("PilotConfig: delay guard region exceeds the grid");
  if (pilot_doppler - kw < 0 || pilot_doppler + kw >= params.doppler_bins)
    throw ConfigError("PilotConfig: Doppler guard region exceeds the grid");
}

CVec DdFrame::dd_vector() const {
  CVec x(grid.size());
  Eigen::Index i = 0;
  for (Eigen::Index k = 0; k < grid.cols(); ++k)
    for (Eigen::Index m = 0; m < grid.rows(); ++m) x(i++) = grid(m, k);
  return x;
}

double pilot_overhead(const OtfsParams& params, const PilotConfig& pilot) {
  double cells = static_cast<double>(2 * pilot.guard_delay + 1) *
                 static_cast<double>(pilot.order_ce + pilot.order_gce + 1);
  return cells / static_cast<double>(params.frame_size());
}

Eigen::Index data_cell_count(const OtfsParams& params,
                             const PilotConfig& pilot) {
  return params.frame_size() -
         (2 * pilot.guard_delay + 1) *
             static_cast<Eigen::Index>(pilot.order_ce + pilot.order_gce + 1);
}

namespace {

bool in_guard(const PilotConfig& pilot, Eigen::Index m, Eigen::Index k) {
  return m >= pilot.pilot_delay - pilot.guard_delay &&
         m <= pilot.pilot_delay + pilot.guard_delay &&
         k >= pilot.pilot_doppler - pilot.doppler_halfwidth() &&
         k <= pilot.pilot_doppler + pilot.doppler_halfwidth();
}

}  // namespace

std::vector<Eigen::Index> data_cell_indices(const OtfsParams& params,
                                            const PilotConfig& pilot) {
  std::vector<Eigen::Index> cells;
  cells.reserve(data_cell_count(params, pilot));
  for (Eigen::Index k = 0; k < params.doppler_bins; ++k)
    for (Eigen::Index m = 0; m < params.delay_bins; ++m)
      if (!in_guard(pilot, m, k)) cells.push_back(k * params.delay_bins + m);
  return cells;
}

Eigen::Index frame_bit_count(const OtfsParams& params,
                             const PilotConfig& pilot) {
  return data_cell_count(params, pilot) * params.modulation.bits_per_symbol;
}

DdFrame build_frame(const OtfsParams& params, const PilotConfig& pilot,
                    const std::vector<std::uint8_t>& data_bits) {
  params.validate();
  pilot.validate(params);
  if (static_cast<Eigen::Index>(data_bits.size()) <
      frame_bit_count(params, pilot))
    throw ConfigError("build_frame: not enough data bits for the frame");

  DdFrame frame;
  frame.grid = CMat::Zero(params.delay_bins, params.doppler_bins);
  frame.mask.setConstant(params.delay_bins, params.doppler_bins,
                         static_cast<std::uint8_t>(CellKind::Data));

  std::vector<cxd> symbols = qam_map(data_bits, params.modulation);
  const double data_amp = std::sqrt(pilot.data_power);
  std::size_t s = 0;
  for (Eigen::Index k = 0; k < params.doppler_bins; ++k) {
    for (Eigen::Index m = 0; m < params.delay_bins; ++m) {
      if (in_guard(pilot, m, k)) {
        frame.mask(m, k) = static_cast<std::uint8_t>(CellKind::Guard);
      } else {
        frame.grid(m, k) = data_amp * symbols[s++];
      }
    }
  }
  frame.grid(pilot.pilot_delay, pilot.pilot_doppler) =
      std::sqrt(pilot.pilot_power);
  frame.mask(pilot.pilot_delay, pilot.pilot_doppler) =
      static_cast<std::uint8_t>(CellKind::Pilot);
  return frame;
}

DdFrame pilot_frame(const OtfsParams& params, const PilotConfig& pilot) {
  params.validate();
  pilot.validate(params);
  DdFrame frame;
  frame.grid = CMat::Zero(params.delay_bins, params.doppler_bins);
  frame.mask.setConstant(params.delay_bins, params.doppler_bins,
                         static_cast<std::uint8_t>(CellKind::Data));
  for (Eigen::Index k = 0; k < params.doppler_bins; ++k)
    for (Eigen::Index m = 0; m < params.delay_bins; ++m)
      if (in_guard(pilot, m, k))
        frame.mask(m, k) = static_cast<std::uint8_t>(CellKind::Guard);
  frame.grid(pilot.pilot_delay, pilot.pilot_doppler) =
      std::sqrt(pilot.pilot_power);
  frame.mask(pilot.pilot_delay, pilot.pilot_doppler) =
      static_cast<std::uint8_t>(CellKind::Pilot);
  return frame;
}

CVec modulate(const DdFrame& frame, const OtfsParams& params) {
  if (frame.grid.rows() != params.delay_bins ||
      frame.grid.cols() != params.doppler_bins)
    throw DimensionError("modulate: frame does not match params");
  CMat f_n = dft_matrix(params.doppler_bins);
  CMat s_mat = frame.grid * f_n.adjoint();  // M x N, s[n*M+m] = s_mat(m,n)
  const Eigen::Index nm = params.frame_size();
  CVec out(nm + params.cp_len);
  Eigen::Map<const CVec> s_flat(s_mat.data(), nm);
  out.tail(nm) = s_flat;
  if (params.cp_len > 0) out.head(params.cp_len) = s_flat.tail(params.cp_len);
  return out;
}

CVec demodulate(const CVec& received, const OtfsParams& params) {
  const Eigen::Index nm = params.frame_size();
  if (received.size() != nm)
    throw DimensionError("demodulate: expected CP-free vector of length N*M");
  CMat f_n = dft_matrix(params.doppler_bins);
  Eigen::Map<const CMat> r_mat(received.data(), params.delay_bins,
                               params.doppler_bins);
  // y[k*M+m] = sum_n F_N[k,n] r[n*M+m]; F_N is symmetric.
  CMat y_mat = r_mat * f_n;
  return Eigen::Map<const CVec>(y_mat.data(), nm);
}

CVec strip_cp(const CVec& with_cp, Eigen::Index cp_len) {
  if (with_cp.size() <= cp_len)
    throw DimensionError("strip_cp: vector shorter than the prefix");
  return with_cp.tail(with_cp.size() - cp_len);
}

}  // namespace ddlink
