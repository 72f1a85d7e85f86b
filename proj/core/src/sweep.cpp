#include "ddlink/sweep.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "ddlink/errors.hpp"

namespace ddlink {

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.16e", v);
  return buf;
}

struct CellSpec {
  double snr_db;
  double xi_i;
  double xi_o;
};

ResultRow run_cell(const SweepConfig& cfg, const CellSpec& cell,
                   std::size_t cell_index) {
  ResultRow row;
  row.snr_db = cell.snr_db;
  row.xi_i = cell.xi_i;
  row.xi_o = cell.xi_o;
  row.trials = cfg.trials;

  auto t0 = std::chrono::steady_clock::now();

  OtfsParams params = cfg.otfs_params();
  ChannelProfile profile = cfg.channel_profile();
  PilotConfig pilot = cfg.pilot_config(params, profile);

  LinkSpec spec;
  spec.params = params;
  spec.profile = profile;
  spec.pilot = pilot;
  spec.hw.tx_quality = cell.xi_i;
  spec.hw.rx_quality = cell.xi_o;
  spec.hw.awgn_var = cfg.data_power / std::pow(10.0, cell.snr_db / 10.0);
  spec.resolution = cfg.resolution;
  spec.csi = cfg.csi == "perfect" ? CsiMode::Perfect : CsiMode::Estimated;

  LinkContext ctx(spec);

  TrialRequest request;
  request.want_mse = cfg.wants_mse();
  request.want_ber = cfg.wants_ber();

  std::vector<TrialOutcome> outcomes(cfg.trials);
  auto work = [&](long first, long last) {
    for (long t = first; t < last; ++t) {
      RngStream rng = RngStream::derive(cfg.seed, cell_index,
                                        static_cast<std::uint64_t>(t));
      outcomes[t] = run_trial(ctx, rng, request);
    }
  };
  int workers = std::min<long>(cfg.threads, cfg.trials);
  if (workers <= 1) {
    work(0, cfg.trials);
  } else {
    std::vector<std::thread> pool;
    long chunk = (cfg.trials + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      long first = w * chunk;
      long last = std::min<long>(cfg.trials, first + chunk);
      if (first >= last) break;
      pool.emplace_back(work, first, last);
    }
    for (auto& th : pool) th.join();
  }

  if (request.want_mse) {
    double denom = static_cast<double>(params.frame_size()) *
                   profile.num_taps() * cfg.trials;
    double acc = 0.0;
    for (const auto& o : outcomes) acc += o.channel_sq_err;
    row.mse_sim = acc / denom;
    row.mse_theory =
        spec.csi == CsiMode::Estimated ? ctx.est().mse.total : 0.0;
  }

  if (request.want_ber) {
    long errors = 0;
    long bits = 0;
    double avg = 0.0;
    double bound = 0.0;
    double frame_ber_mean = 0.0;
    double frame_ber_sq = 0.0;
    for (const auto& o : outcomes) {
      errors += o.bit_errors;
      bits += o.bits;
      avg += o.ber_theory_avg;
      bound += o.ber_theory_bound;
      double fb = o.bits > 0 ? static_cast<double>(o.bit_errors) / o.bits : 0.0;
      frame_ber_mean += fb;
      frame_ber_sq += fb * fb;
    }
    row.bit_errors = errors;
    row.ber_sim = bits > 0 ? static_cast<double>(errors) / bits : 0.0;
    row.ber_theory_avg = avg / cfg.trials;
    row.ber_bound = bound / cfg.trials;
    // Standard error of the per-frame BER mean gates convergence.
    frame_ber_mean /= cfg.trials;
    double var = frame_ber_sq / cfg.trials - frame_ber_mean * frame_ber_mean;
    double se = cfg.trials > 1 ? std::sqrt(std::max(var, 0.0) / cfg.trials)
                               : frame_ber_mean;
    row.converged = row.ber_sim > 0.0 && se <= row.ber_sim / 3.0;
  }

  row.elapsed_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return row;
}

}  // namespace

SweepResult run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  std::vector<double> snr = cfg.snr_db;
  std::sort(snr.begin(), snr.end());

  SweepResult result;
  std::size_t cell_index = 0;
  for (double s : snr) {
    for (double xi : cfg.xi_i) {
      for (double xo : cfg.xi_o) {
        CellSpec cell{s, xi, xo};
        try {
          ResultRow row = run_cell(cfg, cell, cell_index);
          if (cfg.wants_ber() && !row.converged) result.any_unconverged = true;
          result.rows.push_back(std::move(row));
        } catch (const std::exception& e) {
          ResultRow row;
          row.snr_db = s;
          row.xi_i = xi;
          row.xi_o = xo;
          row.trials = cfg.trials;
          row.converged = false;
          row.status = e.what();
          result.rows.push_back(std::move(row));
          result.any_failed = true;
        }
        ++cell_index;
      }
    }
  }
  return result;
}

std::string csv_header() {
  return "snr_db,xi_i,xi_o,mse_sim,mse_theory,ber_sim,ber_theory_avg,"
         "ber_bound,trials,bit_errors,elapsed_s";
}

std::string to_csv(const std::vector<ResultRow>& rows) {
  std::string out = csv_header() + "\n";
  for (const auto& r : rows) {
    out += fmt_double(r.snr_db) + "," + fmt_double(r.xi_i) + "," +
           fmt_double(r.xi_o) + "," + fmt_double(r.mse_sim) + "," +
           fmt_double(r.mse_theory) + "," + fmt_double(r.ber_sim) + "," +
           fmt_double(r.ber_theory_avg) + "," + fmt_double(r.ber_bound) + "," +
           std::to_string(r.trials) + "," + std::to_string(r.bit_errors) +
           "," + fmt_double(r.elapsed_s) + "\n";
  }
  return out;
}

std::vector<ResultRow> parse_csv(const std::string& text) {
  std::stringstream ss(text);
  std::string line;
  if (!std::getline(ss, line) || line != csv_header())
    throw ConfigError("parse_csv: unexpected header");
  std::vector<ResultRow> rows;
  while (std::getline(ss, line)) {
    if (line.empty()) continue;
    std::stringstream ls(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (fields.size() != 11) throw ConfigError("parse_csv: malformed row");
    ResultRow r;
    r.snr_db = std::strtod(fields[0].c_str(), nullptr);
    r.xi_i = std::strtod(fields[1].c_str(), nullptr);
    r.xi_o = std::strtod(fields[2].c_str(), nullptr);
    r.mse_sim = std::strtod(fields[3].c_str(), nullptr);
    r.mse_theory = std::strtod(fields[4].c_str(), nullptr);
    r.ber_sim = std::strtod(fields[5].c_str(), nullptr);
    r.ber_theory_avg = std::strtod(fields[6].c_str(), nullptr);
    r.ber_bound = std::strtod(fields[7].c_str(), nullptr);
    r.trials = std::strtol(fields[8].c_str(), nullptr, 10);
    r.bit_errors = std::strtol(fields[9].c_str(), nullptr, 10);
    r.elapsed_s = std::strtod(fields[10].c_str(), nullptr);
    rows.push_back(r);
  }
  return rows;
}

std::string summary_table(const std::vector<ResultRow>& rows) {
  std::stringstream out;
  out << "  snr_db   xi_i   xi_o     mse_sim  mse_theory     ber_sim"
         "   ber_bound  status\n";
  char buf[200];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf),
                  "%8.2f %6.3f %6.3f %11.4e %11.4e %11.4e %11.4e  %s%s\n",
                  r.snr_db, r.xi_i, r.xi_o, r.mse_sim, r.mse_theory, r.ber_sim,
                  r.ber_bound, r.status.c_str(),
                  r.status == "ok" && !r.converged ? " (not converged)" : "");
    out << buf;
  }
  return out.str();
}

std::vector<std::string> emit_results(const SweepResult& result,
                                      const SweepConfig& cfg) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec)
    throw ModelError("emit_results: cannot create output directory " +
                     cfg.out_dir + ": " + ec.message());
  std::vector<std::string> paths;
  auto write = [&](const std::string& name, const std::string& body) {
    std::string path = (fs::path(cfg.out_dir) / name).string();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ModelError("emit_results: cannot write " + path);
    out << body;
    paths.push_back(path);
  };
  if (cfg.wants_mse()) write("results_mse.csv", to_csv(result.rows));
  if (cfg.wants_ber()) write("results_ber.csv", to_csv(result.rows));
  write("summary.txt", summary_table(result.rows));
  return paths;
}

int sweep_exit_code(const SweepResult& result, const SweepConfig& cfg) {
  if (result.any_failed) return 2;
  if (cfg.wants_ber() && result.any_unconverged) return 3;
  return 0;
}

}  // namespace ddlink
