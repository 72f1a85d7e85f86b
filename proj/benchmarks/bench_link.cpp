// Microbenchmarks for the per-cell setup and per-trial link costs at desk
// scale (M=32, N=8, L=3).

#include <benchmark/benchmark.h>

#include "ddlink/link.hpp"

using namespace ddlink;

namespace {

LinkSpec desk_spec(CsiMode csi = CsiMode::Estimated) {
  LinkSpec spec;
  spec.params.delay_bins = 32;
  spec.params.doppler_bins = 8;
  spec.params.cp_len = 3;
  spec.profile =
      ChannelProfile::uniform(4, 1851.85, spec.params.sample_interval());
  spec.pilot = PilotConfig::centered(spec.params, 3, 2, 2);
  spec.hw.tx_quality = 0.95;
  spec.hw.rx_quality = 0.95;
  spec.hw.awgn_var = 0.03;
  spec.csi = csi;
  return spec;
}

void BM_ContextBuild(benchmark::State& state) {
  LinkSpec spec = desk_spec();
  for (auto _ : state) {
    LinkContext ctx(spec);
    benchmark::DoNotOptimize(ctx.r_n.data());
  }
}
BENCHMARK(BM_ContextBuild)->Unit(benchmark::kMillisecond);

void BM_ChannelSample(benchmark::State& state) {
  LinkSpec spec = desk_spec();
  ChannelSampler sampler(spec.profile, spec.params.frame_size());
  RngStream rng(1);
  for (auto _ : state) {
    ChannelRealization h = sampler.sample(rng);
    benchmark::DoNotOptimize(h.gains.data());
  }
}
BENCHMARK(BM_ChannelSample);

void BM_MseTrial(benchmark::State& state) {
  LinkContext ctx(desk_spec());
  std::uint64_t trial = 0;
  for (auto _ : state) {
    RngStream rng = RngStream::derive(7, 0, trial++);
    TrialOutcome out = run_trial(ctx, rng, TrialRequest{true, false});
    benchmark::DoNotOptimize(out.channel_sq_err);
  }
}
BENCHMARK(BM_MseTrial)->Unit(benchmark::kMicrosecond);

void BM_BerTrial(benchmark::State& state) {
  LinkContext ctx(desk_spec());
  std::uint64_t trial = 0;
  for (auto _ : state) {
    RngStream rng = RngStream::derive(7, 0, trial++);
    TrialOutcome out = run_trial(ctx, rng, TrialRequest{false, true});
    benchmark::DoNotOptimize(out.bit_errors);
  }
}
BENCHMARK(BM_BerTrial)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
