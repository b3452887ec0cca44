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

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "vnls/states.hpp"
#include "vnls/types.hpp"

namespace vnls {

enum class SampleSource { Pi, Beta, Enumerated };

/// Basis indices drawn from a Born distribution together with the
/// log-amplitude of the sampled state at each index. `weights` is empty for
/// ordinary (equal-weight) batches; exact enumerations carry the Born
/// probabilities instead.
struct SampleBatch {
  SampleSource source = SampleSource::Pi;
  std::vector<BasisIndex> xs;
  std::vector<Complex> log_amps;
  std::vector<double> weights;

  std::size_t size() const { return xs.size(); }
  bool weighted() const { return !weights.empty(); }
  double weight(std::size_t i) const {
    return weighted() ? weights[i] : 1.0 / static_cast<double>(xs.size());
  }
};

struct ChainState {
  BasisIndex x = 0;
  double log_prob = 0.0;  // 2 Re log psi(x), unnormalized
  std::uint64_t seed = 0;
  std::size_t accepted = 0;
  std::size_t proposed = 0;

  double acceptance() const {
    return proposed == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(proposed);
  }
};

inline constexpr int kDefaultChains = 8;

struct MetropolisConfig {
  std::size_t batch_size = 1024;
  int chains = kDefaultChains;
  std::optional<std::size_t> burn_in;  // single-flip steps; default 10 sweeps of n flips each
  std::optional<std::size_t> thin;     // default n
  std::uint64_t seed = 0;
};

std::size_t default_burn_in(int n);
std::size_t default_thin(int n);

struct MetropolisResult {
  SampleBatch batch;
  std::vector<ChainState> chains;
};

/// Single-bit-flip Metropolis sampling of |psi(x)|^2. Each step flips a
/// uniformly chosen qubit or, with probability 1/(n+1), stays put; stays are
/// not counted as proposals. Chain c produces batch_size / chains samples,
/// the last chain also takes the remainder; samples are concatenated in
/// chain order.
MetropolisResult metropolis_sample(const Wavefunction& psi, const MetropolisConfig& config);

/// Exact inverse-CDF sampling of beta(x) = |b(x)|^2 / <b|b> over the support of b.
SampleBatch sample_beta(const DenseState& b, std::size_t k, std::uint64_t seed);

/// Mean of the per-chain acceptance ratios; chains without proposals are skipped.
double acceptance_stats(std::span<const ChainState> chains);

/// Every basis state with nonzero amplitude, weighted by its exact Born probability.
SampleBatch enumerate_born(const Wavefunction& psi, int dense_limit = kDefaultDenseLimit);

/// Support of b weighted by beta(x).
SampleBatch enumerate_beta(const DenseState& b);

// Uniform double in [0, 1) from the top 53 bits of one draw.
double uniform01(std::mt19937_64& rng);
// Uniform integer in [0, bound), by rejection.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound);

/// Deterministic stream seed for (master, a, b), via SplitMix64 mixing.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0);

}  // namespace vnls
