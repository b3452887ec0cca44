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

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "vnls/operators.hpp"
#include "vnls/sampling.hpp"
#include "vnls/states.hpp"

namespace vnls {

struct LocalEnergySample {
  BasisIndex x = 0;
  Complex l;
  VectorXc log_grad;
  double weight = 1.0;  // relative; estimators normalize by the total
};

/// l(x) = (H psi)(x) / psi(x), evaluated in the log domain.
Complex local_energy_h(const PauliSum& h, const Wavefunction& psi, BasisIndex x);
Complex local_energy_h(const PauliSum& h, const Wavefunction& psi, BasisIndex x,
                       Complex log_amp_x);

/// Monte Carlo estimate of E_{x'~beta}[(A psi)(x') / b(x')], stored as
/// value * exp(log_scale) so that it stays representable for any overall
/// normalization of psi.
struct BetaExpectation {
  Complex value;
  Complex log_scale;
};

BetaExpectation estimate_beta_expectation(const PauliSum& a, const DenseState& b,
                                          const Wavefunction& psi, const SampleBatch& beta_batch,
                                          Complex log_scale);

/// l(x) = [(A^2 psi)(x) - (A b)(x) * E_beta] / psi(x).
Complex local_energy_vnls(const PauliSum& a, const DenseState& b, const Wavefunction& psi,
                          BasisIndex x, const BetaExpectation& e_beta);
Complex local_energy_vnls(const PauliSum& a, const DenseState& b, const Wavefunction& psi,
                          BasisIndex x, Complex log_amp_x, const BetaExpectation& e_beta);
Complex local_energy_vnls(const PauliSum& a, const DenseState& b, const Wavefunction& psi,
                          BasisIndex x, const SampleBatch& beta_batch);

/// Local energies and log-gradients for every sample of `batch`.
std::vector<LocalEnergySample> vqmc_local_energies(const PauliSum& h, const Wavefunction& psi,
                                                   const SampleBatch& batch);
/// As above for the VNLS Hamiltonian A P_b^perp A. E_beta is estimated once
/// from `beta_batch` and shared by every sample.
std::vector<LocalEnergySample> vnls_local_energies(const PauliSum& a, const DenseState& b,
                                                   const Wavefunction& psi,
                                                   const SampleBatch& pi_batch,
                                                   const SampleBatch& beta_batch);

// Weighted batch mean of l; the real part is the objective estimate.
Complex sample_mean(std::span<const LocalEnergySample> samples);
double estimate_objective(std::span<const LocalEnergySample> samples);
double estimate_variance(std::span<const LocalEnergySample> samples);

/// dL/dtheta_k = 2 Re E[(l - L) conj(O_k - <O_k>)]; exact for the weighted
/// full enumeration.
Eigen::VectorXd estimate_gradient(std::span<const LocalEnergySample> samples, Complex loss);

/// 4 Re Cov(O): the Fisher information of pi for real parameters, and the
/// real part of the quantum geometric tensor (times 4) when O is complex.
Eigen::MatrixXd estimate_fisher(std::span<const LocalEnergySample> samples);

inline constexpr double kDefaultLearningRate = 0.005;
inline constexpr double kDefaultDiagShift = 1e-2;
inline constexpr double kDefaultEpsilon = 1e-6;

struct SrState {
  Eigen::VectorXd grad;
  Eigen::MatrixXd fisher;
  double shift = kDefaultDiagShift;  // lambda, relative to diag(F)
  double epsilon = kDefaultEpsilon;  // absolute
  double learning_rate = kDefaultLearningRate;
};

struct SrStepResult {
  Eigen::VectorXd theta;
  bool fallback = false;  // solve failed; a plain gradient step was taken
};

/// theta - lr * (F + shift*diag(F) + eps*I)^{-1} grad.
SrStepResult sr_step(const Eigen::VectorXd& theta, const SrState& sr);

struct EpochRecord {
  int epoch = 0;
  double loss = 0.0;
  double loss_imag = 0.0;
  double loss_var = 0.0;
  double grad_norm = 0.0;
  double acceptance = 0.0;
  std::optional<double> fidelity;
  std::optional<double> wall_ms;
  bool sr_fallback = false;
  bool hermiticity_warning = false;
};

/// Everything one epoch computed, for callers that need more than the record.
struct EpochTrace {
  int epoch;
  const std::vector<LocalEnergySample>& samples;
  const Eigen::VectorXd& grad;
  const Eigen::VectorXd& theta_before;
  const Eigen::VectorXd& theta_after;
};

struct TrainConfig {
  int epochs = 1000;
  std::size_t batch_size = 1024;
  int chains = kDefaultChains;
  std::optional<std::size_t> burn_in;
  std::optional<std::size_t> thin;
  std::uint64_t seed = 0;

  double learning_rate = kDefaultLearningRate;
  double diag_shift = kDefaultDiagShift;
  double epsilon = kDefaultEpsilon;

  // Fidelity against a reference, evaluated on epochs divisible by
  // monitor_every (0 disables).
  int monitor_every = 0;
  std::function<double(const Wavefunction&)> fidelity_monitor;

  bool record_timing = false;

  std::function<void(const EpochRecord&)> on_epoch;
  std::function<void(const EpochTrace&)> on_trace;
};

/// Ground-state search for a Hermitian H: sample, local energies, SR update.
std::vector<EpochRecord> train_vqmc(const PauliSum& h, Wavefunction& psi,
                                    const TrainConfig& config);

/// Linear solve A x ∝ b by minimizing <psi|A P_b^perp A|psi> / <psi|psi>.
std::vector<EpochRecord> train_vnls(const PauliSum& a, const DenseState& b, Wavefunction& psi,
                                    const TrainConfig& config);

}  // namespace vnls
