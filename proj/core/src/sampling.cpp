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

#include "vnls/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace vnls {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void run_chain(const Wavefunction& psi, ChainState& chain, std::size_t count, std::size_t burn_in,
               std::size_t thin, SampleBatch& out) {
  const int n = psi.num_qubits();
  std::mt19937_64 rng(chain.seed);
  chain.x = uniform_below(rng, dimension(n));
  Complex log_amp = psi.log_amp(chain.x);
  chain.log_prob = 2.0 * log_amp.real();

  // Draw n + 1 means "stay": without it a near-uniform target walks the
  // hypercube with alternating parity and an even thin never leaves one class.
  auto step = [&] {
    const auto draw = uniform_below(rng, static_cast<std::uint64_t>(n) + 1);
    if (draw == static_cast<std::uint64_t>(n)) return;
    const int q = static_cast<int>(draw);
    const BasisIndex proposal = chain.x ^ qubit_mask(n, q);
    const Complex proposal_log_amp = psi.log_amp(proposal);
    const double proposal_log_prob = 2.0 * proposal_log_amp.real();
    const double u = uniform01(rng);
    ++chain.proposed;
    const bool stuck = std::isinf(chain.log_prob) && chain.log_prob < 0.0;
    if (stuck || u < std::exp(proposal_log_prob - chain.log_prob)) {
      chain.x = proposal;
      chain.log_prob = proposal_log_prob;
      log_amp = proposal_log_amp;
      ++chain.accepted;
    }
  };

  for (std::size_t s = 0; s < burn_in; ++s) step();
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t s = 0; s < thin; ++s) step();
    out.xs.push_back(chain.x);
    out.log_amps.push_back(log_amp);
  }
}

}  // namespace

// Both draws are fixed across standard library implementations, unlike the
// <random> distributions.
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t r = 0;
  do {
    r = rng();
  } while (r >= limit);
  return r % bound;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(splitmix64(master) ^ a) ^ (b + 0x632be59bd9b4e019ULL));
}

std::size_t default_burn_in(int n) {
  const auto nn = static_cast<std::size_t>(n);
  return 10 * nn * nn;
}

std::size_t default_thin(int n) { return static_cast<std::size_t>(n); }

MetropolisResult metropolis_sample(const Wavefunction& psi, const MetropolisConfig& config) {
  if (config.chains < 1) throw std::invalid_argument("need at least one Markov chain");
  if (config.batch_size < 1) throw std::invalid_argument("batch size must be positive");
  const int n = psi.num_qubits();
  const std::size_t burn_in = config.burn_in.value_or(default_burn_in(n));
  const std::size_t thin = std::max<std::size_t>(1, config.thin.value_or(default_thin(n)));
  const auto chains = static_cast<std::size_t>(config.chains);
  const std::size_t per_chain = config.batch_size / chains;

  MetropolisResult result;
  result.batch.source = SampleSource::Pi;
  result.batch.xs.reserve(config.batch_size);
  result.batch.log_amps.reserve(config.batch_size);
  result.chains.resize(chains);
  for (std::size_t c = 0; c < chains; ++c) {
    auto& chain = result.chains[c];
    chain.seed = derive_seed(config.seed, c);
    const std::size_t count =
        c + 1 == chains ? config.batch_size - per_chain * (chains - 1) : per_chain;
    run_chain(psi, chain, count, burn_in, thin, result.batch);
  }
  return result;
}

SampleBatch sample_beta(const DenseState& b, std::size_t k, std::uint64_t seed) {
  std::vector<BasisIndex> support;
  std::vector<double> cumulative;
  double total = 0.0;
  const auto& amps = b.amplitudes();
  for (Eigen::Index x = 0; x < amps.size(); ++x) {
    const double w = std::norm(amps[x]);
    if (w == 0.0) continue;
    total += w;
    support.push_back(static_cast<BasisIndex>(x));
    cumulative.push_back(total);
  }
  if (support.empty()) throw std::invalid_argument("b has no nonzero entries");

  SampleBatch batch;
  batch.source = SampleSource::Beta;
  batch.xs.reserve(k);
  batch.log_amps.reserve(k);
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < k; ++i) {
    const double target = uniform01(rng) * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
    if (it == cumulative.end()) --it;
    const BasisIndex x = support[static_cast<std::size_t>(it - cumulative.begin())];
    batch.xs.push_back(x);
    batch.log_amps.push_back(std::log(b[x]));
  }
  return batch;
}

double acceptance_stats(std::span<const ChainState> chains) {
  double sum = 0.0;
  std::size_t used = 0;
  for (const auto& c : chains) {
    if (c.proposed == 0) continue;
    sum += c.acceptance();
    ++used;
  }
  return used == 0 ? 0.0 : sum / static_cast<double>(used);
}

SampleBatch enumerate_born(const Wavefunction& psi, int dense_limit) {
  const VectorXc amps = enumerate_amplitudes(psi, dense_limit);
  const double z = amps.squaredNorm();
  SampleBatch batch;
  batch.source = SampleSource::Enumerated;
  for (Eigen::Index x = 0; x < amps.size(); ++x) {
    const double p = std::norm(amps[x]) / z;
    if (p == 0.0) continue;
    const auto bx = static_cast<BasisIndex>(x);
    batch.xs.push_back(bx);
    batch.log_amps.push_back(psi.log_amp(bx));
    batch.weights.push_back(p);
  }
  return batch;
}

SampleBatch enumerate_beta(const DenseState& b) {
  const auto& amps = b.amplitudes();
  const double z = amps.squaredNorm();
  SampleBatch batch;
  batch.source = SampleSource::Enumerated;
  for (Eigen::Index x = 0; x < amps.size(); ++x) {
    if (amps[x] == Complex{0.0, 0.0}) continue;
    const auto bx = static_cast<BasisIndex>(x);
    batch.xs.push_back(bx);
    batch.log_amps.push_back(std::log(amps[x]));
    batch.weights.push_back(std::norm(amps[x]) / z);
  }
  return batch;
}

}  // namespace vnls
