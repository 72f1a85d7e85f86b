#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "ddlink/config.hpp"

namespace ddlink {

struct ResultRow {
  double snr_db = 0.0;
  double xi_i = 1.0;
  double xi_o = 1.0;
  double mse_sim = std::nan("");
  double mse_theory = std::nan("");
  double ber_sim = std::nan("");
  double ber_theory_avg = std::nan("");
  double ber_bound = std::nan("");
  long trials = 0;
  long bit_errors = 0;
  double elapsed_s = 0.0;
  // Not part of the CSV schema.
  bool converged = true;
  std::string status = "ok";
};

struct SweepResult {
  std::vector<ResultRow> rows;
  bool any_failed = false;
  bool any_unconverged = false;
};

// Runs the full (SNR, xi_i, xi_o) grid. Per-trial RNG streams derive from
// (seed, cell index, trial index), so results are identical for any thread
// count.
SweepResult run_sweep(const SweepConfig& cfg);

std::string csv_header();
std::string to_csv(const std::vector<ResultRow>& rows);
std::vector<ResultRow> parse_csv(const std::string& text);
std::string summary_table(const std::vector<ResultRow>& rows);

// Writes one CSV per executed mode plus summary.txt under cfg.out_dir;
// returns the paths written.
std::vector<std::string> emit_results(const SweepResult& result,
                                      const SweepConfig& cfg);

// 0 ok, 2 cell failures, 3 BER cells below the convergence requirement.
int sweep_exit_code(const SweepResult& result, const SweepConfig& cfg);

}  // namespace ddlink
