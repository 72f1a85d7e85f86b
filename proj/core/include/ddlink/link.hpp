#pragma once

#include <memory>
#include <optional>

#include "ddlink/detector.hpp"
#include "ddlink/estimator.hpp"

namespace ddlink {

enum class CsiMode { Estimated, Perfect };

struct LinkSpec {
  OtfsParams params;
  ChannelProfile profile;
  PilotConfig pilot;
  HardwareProfile hw;
  int resolution = 2;
  CsiMode csi = CsiMode::Estimated;
};

// Per-configuration state shared (immutably) by all Monte Carlo trials of one
// sweep cell.
struct LinkContext {
  LinkSpec spec;
  BemConfig bem;
  ChannelSampler sampler;
  PowerMatrices powers;
  std::optional<EstimatorContext> estimator;
  CMat r_n;     // detector noise covariance
  CMat f_dd;    // dense DD transform
  CVec s_p;     // pilot time signal (no CP)
  std::vector<Eigen::Index> data_cells;
  double signal_power = 0.0;

  explicit LinkContext(const LinkSpec& s);
  const EstimatorContext& est() const;
};

struct TrialOutcome {
  double channel_sq_err = 0.0;  // ||h - h_hat||_F^2
  long bit_errors = 0;
  long bits = 0;
  double ber_theory_avg = 0.0;
  double ber_theory_bound = 0.0;
  bool has_mse = false;
  bool has_ber = false;
};

struct TrialRequest {
  bool want_mse = true;
  bool want_ber = true;
};

TrialOutcome run_trial(const LinkContext& ctx, RngStream& rng,
                       const TrialRequest& request);

// Structured per-trial detection used by run_trial. h_hat_gains carries the
// (estimated or true) tap trajectories; h_true_gains drives the effective
// matrix diagonal for the BER theory.
struct FastDetection {
  CVec data_dd;   // F G_t r_hat
  RVec t_diag;    // Re diag of sqrt(xi) F G_t H_true F^H
};

FastDetection detect_fast(const LinkContext& ctx, const CVec& r_o,
                          const ChannelRealization& h_hat,
                          const ChannelRealization& h_true, bool want_theory);

}  // namespace ddlink
