#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "ddlink/errors.hpp"
#include "ddlink/sweep.hpp"

using namespace ddlink;

namespace {

// Field-wise row comparison; elapsed_s is wall-clock and excluded.
bool rows_equal(const ResultRow& a, const ResultRow& b) {
  auto same = [](double x, double y) {
    if (std::isnan(x) && std::isnan(y)) return true;
    return x == y;
  };
  return same(a.snr_db, b.snr_db) && same(a.xi_i, b.xi_i) &&
         same(a.xi_o, b.xi_o) && same(a.mse_sim, b.mse_sim) &&
         same(a.mse_theory, b.mse_theory) && same(a.ber_sim, b.ber_sim) &&
         same(a.ber_theory_avg, b.ber_theory_avg) &&
         same(a.ber_bound, b.ber_bound) && a.trials == b.trials &&
         a.bit_errors == b.bit_errors;
}

SweepConfig tiny_config() {
  SweepConfig cfg;
  cfg.m = 16;
  cfg.n = 8;
  cfg.max_delay = 2;
  cfg.trials = 10;
  cfg.snr_db = {8.0};
  cfg.seed = 3;
  cfg.mode = "both";
  return cfg;
}

}  // namespace

TEST_CASE("defaults reproduce the reference configuration") {
  SweepConfig cfg = parse_config_text("");
  CHECK(cfg.m == 64);
  CHECK(cfg.n == 16);
  CHECK(cfg.delta_f_hz == doctest::Approx(30e3));
  CHECK(cfg.carrier_hz == doctest::Approx(4e9));
  CHECK(cfg.max_delay == 5);
  CHECK(cfg.resolution == 2);
  CHECK(cfg.mod_order == 4);
  CHECK(cfg.derived_f_max() == doctest::Approx(1851.85).epsilon(1e-3));
  OtfsParams params = cfg.otfs_params();
  ChannelProfile profile = cfg.channel_profile();
  PilotConfig pilot = cfg.pilot_config(params, profile);
  CHECK(pilot.order_ce == 2);
  CHECK(pilot.order_gce == 4);
  CHECK(pilot.pilot_delay == 32);
  CHECK(pilot.pilot_doppler == 8);
  CHECK(params.cp_len == 5);
  CHECK(pilot_overhead(params, pilot) ==
        doctest::Approx(77.0 / 1024.0).epsilon(1e-12));
}

TEST_CASE("config parsing") {
  SUBCASE("sections, comments and overrides") {
    SweepConfig cfg = parse_config_text(
        "# comment\n"
        "[otfs]\n"
        "m = 32\n"
        "n = 8\n"
        "[channel]\n"
        "max_delay = 3\n"
        "[sim]\n"
        "snr_db = 0:10:5\n"
        "trials = 7\n"
        "seed = 99\n");
    CHECK(cfg.m == 32);
    CHECK(cfg.n == 8);
    CHECK(cfg.max_delay == 3);
    CHECK(cfg.trials == 7);
    CHECK(cfg.seed == 99);
    CHECK(cfg.seed_set);
    CHECK(cfg.snr_db == std::vector<double>{0.0, 5.0, 10.0});
    OtfsParams params = cfg.otfs_params();
    ChannelProfile profile = cfg.channel_profile();
    PilotConfig pilot = cfg.pilot_config(params, profile);
    CHECK(pilot.order_ce == 2);  // re-derived at the smaller grid
    CHECK(pilot.order_gce == 2);
  }
  SUBCASE("quality factor range is enforced") {
    CHECK_THROWS_AS(parse_config_text("[hardware]\nxi_i = 0\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[hardware]\nxi_o = 1.2\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[hardware]\nxi_i = -0.5\n"),
                    ConfigError);
  }
  SUBCASE("unknown keys are named in the error") {
    try {
      parse_config_text("[otfs]\nbogus_key = 3\n");
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("bogus_key") != std::string::npos);
    }
  }
  SUBCASE("unknown section rejected") {
    CHECK_THROWS_AS(parse_config_text("[nope]\nx = 1\n"), ConfigError);
  }
  SUBCASE("malformed numbers rejected") {
    CHECK_THROWS_AS(parse_config_text("[otfs]\nm = twelve\n"), ConfigError);
  }
  SUBCASE("grid forms") {
    CHECK(parse_grid("1,2,3") == std::vector<double>{1.0, 2.0, 3.0});
    CHECK(parse_grid("0:25:5") ==
          std::vector<double>{0.0, 5.0, 10.0, 15.0, 20.0, 25.0});
    CHECK_THROWS_AS(parse_grid("0:10:0"), ConfigError);
  }
  SUBCASE("mode and csi validated") {
    CHECK_THROWS_AS(parse_config_text("[sim]\nmode = all\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[sim]\ncsi = oracle\n"), ConfigError);
  }
}

TEST_CASE("sweep determinism") {
  SweepConfig cfg = tiny_config();
  SweepResult a = run_sweep(cfg);
  SweepResult b = run_sweep(cfg);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i)
    CHECK(rows_equal(a.rows[i], b.rows[i]));

  SUBCASE("independent of the worker count") {
    SweepConfig threaded = cfg;
    threaded.threads = 3;
    SweepResult c = run_sweep(threaded);
    REQUIRE(c.rows.size() == a.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i)
      CHECK(rows_equal(a.rows[i], c.rows[i]));
  }
  SUBCASE("different seed changes the draw") {
    SweepConfig other = cfg;
    other.seed = 4;
    SweepResult c = run_sweep(other);
    CHECK(c.rows[0].mse_sim != a.rows[0].mse_sim);
  }
}

TEST_CASE("SNR definition: awgn variance is data power over linear SNR") {
  SweepConfig cfg = tiny_config();
  cfg.mode = "mse";
  cfg.trials = 5;
  cfg.snr_db = {7.0};
  SweepResult swept = run_sweep(cfg);
  REQUIRE(swept.rows.size() == 1);

  // Re-run the same cell by hand with sigma_w^2 = sigma_d^2 / 10^(SNR/10).
  OtfsParams params = cfg.otfs_params();
  ChannelProfile profile = cfg.channel_profile();
  LinkSpec spec;
  spec.params = params;
  spec.profile = profile;
  spec.pilot = cfg.pilot_config(params, profile);
  spec.hw.awgn_var = cfg.data_power / std::pow(10.0, 0.7);
  spec.resolution = cfg.resolution;
  LinkContext ctx(spec);
  double acc = 0.0;
  for (long t = 0; t < cfg.trials; ++t) {
    RngStream rng = RngStream::derive(cfg.seed, 0, t);
    acc += run_trial(ctx, rng, TrialRequest{true, false}).channel_sq_err;
  }
  double mse = acc / (double(cfg.trials) * params.frame_size() *
                      profile.num_taps());
  CHECK(mse == swept.rows[0].mse_sim);
}

TEST_CASE("csv round trip") {
  SweepConfig cfg = tiny_config();
  cfg.trials = 4;
  SweepResult result = run_sweep(cfg);
  std::string csv = to_csv(result.rows);

  SUBCASE("header is byte-exact") {
    CHECK(csv.substr(0, csv.find('\n')) ==
          "snr_db,xi_i,xi_o,mse_sim,mse_theory,ber_sim,ber_theory_avg,"
          "ber_bound,trials,bit_errors,elapsed_s");
  }
  SUBCASE("single row gives a two-line file") {
    std::string one = to_csv({result.rows[0]});
    CHECK(std::count(one.begin(), one.end(), '\n') == 2);
  }
  SUBCASE("parse returns identical values") {
    std::vector<ResultRow> parsed = parse_csv(csv);
    REQUIRE(parsed.size() == result.rows.size());
    for (std::size_t i = 0; i < parsed.size(); ++i) {
      CHECK(rows_equal(parsed[i], result.rows[i]));
      CHECK(parsed[i].elapsed_s == result.rows[i].elapsed_s);
    }
  }
}

TEST_CASE("simulated BER is statistically consistent with the theory") {
  SweepConfig cfg = tiny_config();
  cfg.mode = "ber";
  cfg.trials = 150;
  cfg.snr_db = {8.0};
  SweepResult result = run_sweep(cfg);
  REQUIRE(result.rows.size() == 1);
  const ResultRow& row = result.rows[0];
  CHECK(row.converged);
  // Standard error from the binomial count at frame level is conservative;
  // use 3x the aggregate-rate standard error.
  double bits = double(row.trials) *
                (16 * 8 - 5 * 5) * 2;  // data cells x bits per symbol
  double se = std::sqrt(row.ber_sim * (1.0 - row.ber_sim) / bits);
  CHECK(row.ber_sim == doctest::Approx(row.ber_theory_avg)
                           .epsilon(3.0 * se / row.ber_theory_avg + 0.10));
  CHECK(row.ber_bound <= row.ber_theory_avg);
}

TEST_CASE("failed cells are reported and the sweep continues") {
  SweepConfig cfg = tiny_config();
  cfg.n = 4;  // Doppler guard cannot fit: every cell fails
  SweepResult result = run_sweep(cfg);
  CHECK(result.any_failed);
  REQUIRE(!result.rows.empty());
  CHECK(result.rows[0].status != "ok");
  CHECK(std::isnan(result.rows[0].mse_sim));
  CHECK(sweep_exit_code(result, cfg) == 2);
}

TEST_CASE("exit codes") {
  SweepConfig cfg = tiny_config();
  SweepResult ok;
  ok.rows.push_back(ResultRow{});
  CHECK(sweep_exit_code(ok, cfg) == 0);
  SweepResult unconverged = ok;
  unconverged.any_unconverged = true;
  CHECK(sweep_exit_code(unconverged, cfg) == 3);
  cfg.mode = "mse";
  CHECK(sweep_exit_code(unconverged, cfg) == 0);
  SweepResult failed = ok;
  failed.any_failed = true;
  CHECK(sweep_exit_code(failed, cfg) == 2);
}
