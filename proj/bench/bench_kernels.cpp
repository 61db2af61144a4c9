#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "bldc/kernels.hpp"

using namespace bldc;

namespace {

struct Batch {
  std::vector<ThreePhaseVector> abc;
  std::vector<DQVector> dq;
  std::vector<double> theta;
};

Batch make_batch(std::size_t n) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  Batch b;
  b.abc.reserve(n);
  b.dq.reserve(n);
  b.theta.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    b.abc.push_back({u(rng), u(rng), u(rng)});
    b.dq.push_back({u(rng), u(rng)});
    b.theta.push_back(u(rng));
  }
  return b;
}

template <bool Parallel>
void BM_DqTransform(benchmark::State& state) {
  const Batch b = make_batch(static_cast<std::size_t>(state.range(0)));
  std::vector<DQVector> out(b.abc.size());
  for (auto _ : state) {
    if constexpr (Parallel) {
      kernels::dq_transform_batch(b.abc, b.theta, out);
    } else {
      kernels::dq_transform_batch_serial(b.abc, b.theta, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void BM_TrigIdentity(benchmark::State& state) {
  const Batch b = make_batch(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    double e = Parallel ? kernels::trig_identity_max_error(b.theta) : kernels::trig_identity_max_error_serial(b.theta);
    benchmark::DoNotOptimize(e);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void BM_PowerInvariance(benchmark::State& state) {
  const Batch b = make_batch(static_cast<std::size_t>(state.range(0)));
  std::vector<ThreePhaseVector> v;
  std::vector<ThreePhaseVector> i;
  for (std::size_t k = 0; k < b.dq.size(); ++k) {
    v.push_back(inverse_dq(b.dq[k], b.theta[k]));
    i.push_back(inverse_dq({b.dq[k].q, b.dq[k].d}, b.theta[k]));
  }
  for (auto _ : state) {
    double e = Parallel ? kernels::power_invariance_max_error(v, i, b.theta)
                        : kernels::power_invariance_max_error_serial(v, i, b.theta);
    benchmark::DoNotOptimize(e);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void BM_Ensemble(benchmark::State& state) {
  QAxisMotorModel m;
  m.ktq = m.kbq = 0.1;
  m.r_phase = 0.2;
  m.l_effective = 1e-4;
  m.inertia = 1e-4;
  m.pole_pairs = 7;
  std::vector<kernels::EnsembleCase> cases;
  for (int n = 0; n < state.range(0); ++n) {
    cases.push_back({m, Controller::voltage(2.0 + 0.1 * n), LoadProfile::constant(0.0),
                     n % 2 ? ModelSelector::ThreePhase : ModelSelector::QAxis, RunOptions{0.01, 1e-5, {}, 100}});
  }
  for (auto _ : state) {
    auto r = Parallel ? kernels::run_ensemble(cases) : kernels::run_ensemble_serial(cases);
    benchmark::DoNotOptimize(r.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_DqTransform<false>)->Arg(1 << 16)->Name("dq_transform/serial");
BENCHMARK(BM_DqTransform<true>)->Arg(1 << 16)->Name("dq_transform/parallel");
BENCHMARK(BM_TrigIdentity<false>)->Arg(1 << 16)->Name("trig_identity/serial");
BENCHMARK(BM_TrigIdentity<true>)->Arg(1 << 16)->Name("trig_identity/parallel");
BENCHMARK(BM_PowerInvariance<false>)->Arg(1 << 16)->Name("power_invariance/serial");
BENCHMARK(BM_PowerInvariance<true>)->Arg(1 << 16)->Name("power_invariance/parallel");
BENCHMARK(BM_Ensemble<false>)->Arg(8)->Unit(benchmark::kMillisecond)->Name("ensemble/serial");
BENCHMARK(BM_Ensemble<true>)->Arg(8)->Unit(benchmark::kMillisecond)->Name("ensemble/parallel");

BENCHMARK_MAIN();
