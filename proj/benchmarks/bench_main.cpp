// Copyright 2026 The vnls Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include "vnls/engine.hpp"
#include "vnls/problems.hpp"

using namespace vnls;

namespace {

Rbm make_rbm(int n, RbmFlavor flavor) {
  return Rbm(init_gaussian(n, hidden_units(n, kDefaultHiddenDensity), flavor, 0.05, 1));
}

void BM_ApplySumRow(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const LinearProblem p = ising_problem(n, 10.0);
  BasisIndex x = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(apply_sum_row(p.a, x));
    x = (x + 1) & (dimension(n) - 1);
  }
}
BENCHMARK(BM_ApplySumRow)->Arg(8)->Arg(12)->Arg(20);

void BM_RbmLogAmp(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Rbm psi = make_rbm(n, state.range(1) ? RbmFlavor::Complex : RbmFlavor::Real);
  BasisIndex x = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(psi.log_amp(x));
    x = (x + 1) & (dimension(n) - 1);
  }
}
BENCHMARK(BM_RbmLogAmp)->Args({12, 0})->Args({12, 1})->Args({20, 1});

void BM_LocalEnergyVnls(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const LinearProblem p = ising_problem(n, 10.0);
  const Rbm psi = make_rbm(n, RbmFlavor::Complex);
  const SampleBatch beta = sample_beta(p.b, 1024, 2);
  const BetaExpectation e = estimate_beta_expectation(p.a, p.b, psi, beta, psi.log_amp(0));
  BasisIndex x = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(local_energy_vnls(p.a, p.b, psi, x, e));
    x = (x + 1) & (dimension(n) - 1);
  }
}
BENCHMARK(BM_LocalEnergyVnls)->Arg(8)->Arg(12);

void BM_MetropolisBatch(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Rbm psi = make_rbm(n, RbmFlavor::Real);
  MetropolisConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(metropolis_sample(psi, cfg));
    ++cfg.seed;
  }
}
BENCHMARK(BM_MetropolisBatch)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_FisherAndSr(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const LinearProblem p = ising_problem(n, 10.0);
  const Rbm psi = make_rbm(n, RbmFlavor::Complex);
  MetropolisConfig cfg;
  const auto samples = vnls_local_energies(p.a, p.b, psi, metropolis_sample(psi, cfg).batch,
                                           sample_beta(p.b, 1024, 3));
  const Eigen::VectorXd theta = psi.parameters();
  for (auto _ : state) {
    SrState sr;
    sr.grad = estimate_gradient(samples, sample_mean(samples));
    sr.fisher = estimate_fisher(samples);
    benchmark::DoNotOptimize(sr_step(theta, sr));
  }
}
BENCHMARK(BM_FisherAndSr)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_VnlsEpoch(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const LinearProblem p = ising_problem(n, 10.0);
  Rbm psi = make_rbm(n, state.range(1) ? RbmFlavor::Complex : RbmFlavor::Real);
  TrainConfig cfg;
  cfg.epochs = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(train_vnls(p.a, p.b, psi, cfg));
    ++cfg.seed;
  }
}
BENCHMARK(BM_VnlsEpoch)->Args({12, 0})->Args({12, 1})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
