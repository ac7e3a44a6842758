#include <benchmark/benchmark.h>

#include "spt/gauss.hpp"
#include "spt/learner.hpp"
#include "spt/safety.hpp"

namespace {

void BM_NormalCdf(benchmark::State& state) {
  const spt::GaussParams p(0.3, 0.8);
  double x = -4.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(spt::normal_cdf(x, p));
    x += 1e-6;
  }
}
BENCHMARK(BM_NormalCdf);

void BM_TailMass(benchmark::State& state) {
  const spt::GaussParams p(0.1, 0.4);
  double t = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(spt::tail_mass(p, t));
    t += 1e-6;
  }
}
BENCHMARK(BM_TailMass);

void BM_ArmStep(benchmark::State& state) {
  const spt::ArmModel model = spt::make_train_model();
  spt::EnvState s;
  s.angles << 0.2, -0.1;
  s.velocities << 0.5, 0.3;
  const Eigen::Vector2d torque(0.5, -0.2);
  for (auto _ : state) {
    auto r = spt::step(model, s, torque);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_ArmStep);

void BM_CollectBatch(benchmark::State& state) {
  spt::ArmEnv env(spt::make_test_model(), 0.3);
  const spt::SafetySpec spec{};
  const spt::PolicyParams policy(2, 8, 0.5);
  for (auto _ : state) {
    spt::Rng rng(7);
    auto batch = spt::collect(policy, env, spec, 0.5, 5, 200, rng);
    benchmark::DoNotOptimize(batch);
  }
}
BENCHMARK(BM_CollectBatch);

void BM_SafetyIteration(benchmark::State& state) {
  spt::ArmEnv env(spt::make_test_model(), 0.3);
  const spt::SafetySpec spec{};
  const spt::PolicyParams policy(2, 8, 0.5);
  spt::Rng rng(7);
  const auto batch = spt::collect(policy, env, spec, 0.5, 5, 200, rng);
  const spt::SafetyConfig cfg;
  for (auto _ : state) {
    auto report = spt::run_iteration(policy, batch, 0.5, cfg, 0.05);
    benchmark::DoNotOptimize(report);
  }
}
BENCHMARK(BM_SafetyIteration);

}  // namespace

BENCHMARK_MAIN();
