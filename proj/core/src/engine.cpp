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

#include "vnls/engine.hpp"

#include <chrono>
#include <cmath>

namespace vnls {

namespace {

void require_nonzero(Complex log_amp_x, BasisIndex x) {
  if (std::isinf(log_amp_x.real()) && log_amp_x.real() < 0.0) {
    throw ZeroAmplitudeError("psi vanishes at x=" + std::to_string(x));
  }
}

// sum_col v * psi(col) / psi(x) over a merged row.
Complex ratio_sum(const SparseRow& row, const Wavefunction& psi, BasisIndex x,
                  Complex log_amp_x) {
  Complex acc{0.0, 0.0};
  for (const auto& [col, v] : row) {
    if (col == x) {
      acc += v;
    } else {
      acc += v * std::exp(psi.log_amp(col) - log_amp_x);
    }
  }
  return acc;
}

double total_weight(std::span<const LocalEnergySample> samples) {
  double w = 0.0;
  for (const auto& s : samples) w += s.weight;
  return w;
}

VectorXc mean_log_grad(std::span<const LocalEnergySample> samples, double total) {
  VectorXc mean = VectorXc::Zero(samples.front().log_grad.size());
  for (const auto& s : samples) mean += s.weight * s.log_grad;
  return mean / total;
}

std::vector<LocalEnergySample> collect(const Wavefunction& psi, const SampleBatch& batch,
                                       const std::function<Complex(std::size_t)>& local) {
  std::vector<LocalEnergySample> out;
  out.reserve(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    out.push_back({batch.xs[i], local(i), psi.log_grad(batch.xs[i]), batch.weight(i)});
  }
  return out;
}

using LocalEnergyFn = std::function<std::vector<LocalEnergySample>(const Wavefunction&,
                                                                   const SampleBatch&, int)>;

std::vector<EpochRecord> train_loop(Wavefunction& psi, const TrainConfig& config,
                                    const LocalEnergyFn& local_energies) {
  if (config.epochs < 0) throw std::invalid_argument("epochs must be non-negative");
  if (config.monitor_every > 0 && !config.fidelity_monitor) {
    throw std::invalid_argument("monitor_every set without a fidelity monitor");
  }
  std::vector<EpochRecord> records;
  records.reserve(static_cast<std::size_t>(config.epochs));
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    EpochRecord rec;
    rec.epoch = epoch;
    if (config.monitor_every > 0 && epoch % config.monitor_every == 0) {
      rec.fidelity = config.fidelity_monitor(psi);
    }

    MetropolisConfig mc;
    mc.batch_size = config.batch_size;
    mc.chains = config.chains;
    mc.burn_in = config.burn_in;
    mc.thin = config.thin;
    mc.seed = derive_seed(config.seed, static_cast<std::uint64_t>(epoch), 0);
    const auto sampled = metropolis_sample(psi, mc);
    rec.acceptance = acceptance_stats(sampled.chains);

    const auto samples = local_energies(psi, sampled.batch, epoch);
    const Complex loss = sample_mean(samples);
    rec.loss = loss.real();
    rec.loss_imag = loss.imag();
    rec.hermiticity_warning = std::abs(loss.imag()) > 1e-6 * std::abs(loss.real());
    rec.loss_var = estimate_variance(samples);

    SrState sr;
    sr.grad = estimate_gradient(samples, loss);
    sr.fisher = estimate_fisher(samples);
    sr.shift = config.diag_shift;
    sr.epsilon = config.epsilon;
    sr.learning_rate = config.learning_rate;
    rec.grad_norm = sr.grad.norm();

    const Eigen::VectorXd theta = psi.parameters();
    const auto step = sr_step(theta, sr);
    rec.sr_fallback = step.fallback;
    psi.set_parameters(step.theta);

    if (config.record_timing) {
      rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                        .count();
    }
    if (config.on_trace) config.on_trace({epoch, samples, sr.grad, theta, step.theta});
    if (config.on_epoch) config.on_epoch(rec);
    records.push_back(rec);
  }
  return records;
}

}  // namespace

Complex local_energy_h(const PauliSum& h, const Wavefunction& psi, BasisIndex x) {
  return local_energy_h(h, psi, x, psi.log_amp(x));
}

Complex local_energy_h(const PauliSum& h, const Wavefunction& psi, BasisIndex x,
                       Complex log_amp_x) {
  require_nonzero(log_amp_x, x);
  return ratio_sum(apply_sum_row(h, x), psi, x, log_amp_x);
}

BetaExpectation estimate_beta_expectation(const PauliSum& a, const DenseState& b,
                                          const Wavefunction& psi, const SampleBatch& beta_batch,
                                          Complex log_scale) {
  if (beta_batch.size() == 0) throw std::invalid_argument("empty beta batch");
  Complex acc{0.0, 0.0};
  double total = 0.0;
  for (std::size_t i = 0; i < beta_batch.size(); ++i) {
    const BasisIndex xp = beta_batch.xs[i];
    const Complex bx = b[xp];
    if (bx == Complex{0.0, 0.0}) throw ZeroAmplitudeError("beta sample outside the support of b");
    Complex a_psi{0.0, 0.0};
    for (const auto& [col, v] : apply_sum_row(a, xp)) {
      a_psi += v * std::exp(psi.log_amp(col) - log_scale);
    }
    if (beta_batch.weighted()) {
      acc += beta_batch.weights[i] * (a_psi / bx);
      total += beta_batch.weights[i];
    } else {
      acc += a_psi / bx;
    }
  }
  const double denom = beta_batch.weighted() ? total : static_cast<double>(beta_batch.size());
  return {acc / denom, log_scale};
}

Complex local_energy_vnls(const PauliSum& a, const DenseState& b, const Wavefunction& psi,
                          BasisIndex x, const BetaExpectation& e_beta) {
  return local_energy_vnls(a, b, psi, x, psi.log_amp(x), e_beta);
}

Complex local_energy_vnls(const PauliSum& a, const DenseState& b, const Wavefunction& psi,
                          BasisIndex x, Complex log_amp_x, const BetaExpectation& e_beta) {
  require_nonzero(log_amp_x, x);
  const Complex a2_term = ratio_sum(squared_sum_row(a, x), psi, x, log_amp_x);
  Complex ab{0.0, 0.0};
  for (const auto& [col, v] : apply_sum_row(a, x)) ab += v * b[col];
  return a2_term - ab * e_beta.value * std::exp(e_beta.log_scale - log_amp_x);
}

Complex local_energy_vnls(const PauliSum& a, const DenseState& b, const Wavefunction& psi,
                          BasisIndex x, const SampleBatch& beta_batch) {
  const Complex lx = psi.log_amp(x);
  require_nonzero(lx, x);
  return local_energy_vnls(a, b, psi, x, lx, estimate_beta_expectation(a, b, psi, beta_batch, lx));
}

std::vector<LocalEnergySample> vqmc_local_energies(const PauliSum& h, const Wavefunction& psi,
                                                   const SampleBatch& batch) {
  return collect(psi, batch, [&](std::size_t i) {
    return local_energy_h(h, psi, batch.xs[i], batch.log_amps[i]);
  });
}

std::vector<LocalEnergySample> vnls_local_energies(const PauliSum& a, const DenseState& b,
                                                   const Wavefunction& psi,
                                                   const SampleBatch& pi_batch,
                                                   const SampleBatch& beta_batch) {
  if (pi_batch.size() == 0) return {};
  const auto e_beta = estimate_beta_expectation(a, b, psi, beta_batch, pi_batch.log_amps.front());
  return collect(psi, pi_batch, [&](std::size_t i) {
    return local_energy_vnls(a, b, psi, pi_batch.xs[i], pi_batch.log_amps[i], e_beta);
  });
}

Complex sample_mean(std::span<const LocalEnergySample> samples) {
  if (samples.empty()) throw std::invalid_argument("empty sample batch");
  Complex acc{0.0, 0.0};
  for (const auto& s : samples) acc += s.weight * s.l;
  return acc / total_weight(samples);
}

double estimate_objective(std::span<const LocalEnergySample> samples) {
  return sample_mean(samples).real();
}

double estimate_variance(std::span<const LocalEnergySample> samples) {
  const Complex mean = sample_mean(samples);
  double acc = 0.0;
  for (const auto& s : samples) acc += s.weight * std::norm(s.l - mean);
  return acc / total_weight(samples);
}

Eigen::VectorXd estimate_gradient(std::span<const LocalEnergySample> samples, Complex loss) {
  if (samples.empty()) throw std::invalid_argument("empty sample batch");
  const double total = total_weight(samples);
  const VectorXc mean = mean_log_grad(samples, total);
  VectorXc acc = VectorXc::Zero(mean.size());
  for (const auto& s : samples) acc += (s.weight * (s.l - loss)) * (s.log_grad - mean).conjugate();
  return 2.0 * acc.real() / total;
}

Eigen::MatrixXd estimate_fisher(std::span<const LocalEnergySample> samples) {
  if (samples.empty()) throw std::invalid_argument("empty sample batch");
  const double total = total_weight(samples);
  const VectorXc mean = mean_log_grad(samples, total);
  const auto k = static_cast<Eigen::Index>(samples.size());
  const Eigen::Index p = mean.size();
  Eigen::MatrixXd re(k, p);
  Eigen::MatrixXd im(k, p);
  bool has_imag = false;
  for (Eigen::Index i = 0; i < k; ++i) {
    const auto& s = samples[static_cast<std::size_t>(i)];
    const double scale = std::sqrt(s.weight / total);
    const VectorXc d = (s.log_grad - mean) * scale;
    re.row(i) = d.real().transpose();
    im.row(i) = d.imag().transpose();
    has_imag = has_imag || !d.imag().isZero(0.0);
  }
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(p, p);
  f.selfadjointView<Eigen::Lower>().rankUpdate(re.transpose(), 4.0);
  if (has_imag) f.selfadjointView<Eigen::Lower>().rankUpdate(im.transpose(), 4.0);
  f.triangularView<Eigen::StrictlyUpper>() = f.transpose();
  return f;
}

SrStepResult sr_step(const Eigen::VectorXd& theta, const SrState& sr) {
  if (sr.grad.size() != theta.size() || sr.fisher.rows() != theta.size() ||
      sr.fisher.cols() != theta.size()) {
    throw std::invalid_argument("SR state does not match parameter count");
  }
  Eigen::MatrixXd m = sr.fisher;
  m.diagonal().array() += sr.shift * sr.fisher.diagonal().array() + sr.epsilon;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(m);
  Eigen::VectorXd delta;
  // A regularized Fisher matrix is positive definite; anything else means the
  // estimate is broken and the plain gradient is used instead.
  bool fallback = ldlt.info() != Eigen::Success || !ldlt.isPositive() || !(ldlt.rcond() > 1e-14);
  if (!fallback) {
    delta = ldlt.solve(sr.grad);
    fallback = !delta.allFinite();
  }
  if (fallback) delta = sr.grad;
  return {theta - sr.learning_rate * delta, fallback};
}

std::vector<EpochRecord> train_vqmc(const PauliSum& h, Wavefunction& psi,
                                    const TrainConfig& config) {
  if (h.num_qubits() != psi.num_qubits()) throw std::invalid_argument("H and psi sizes differ");
  return train_loop(psi, config, [&](const Wavefunction& w, const SampleBatch& batch, int) {
    return vqmc_local_energies(h, w, batch);
  });
}

std::vector<EpochRecord> train_vnls(const PauliSum& a, const DenseState& b, Wavefunction& psi,
                                    const TrainConfig& config) {
  if (!a.is_hermitian()) {
    throw std::invalid_argument("VNLS needs a Hermitian A; use embed_hermitian first");
  }
  if (a.num_qubits() != psi.num_qubits() || b.num_qubits() != psi.num_qubits()) {
    throw std::invalid_argument("A, b and psi sizes differ");
  }
  return train_loop(psi, config, [&](const Wavefunction& w, const SampleBatch& batch, int epoch) {
    const auto beta = sample_beta(b, config.batch_size,
                                  derive_seed(config.seed, static_cast<std::uint64_t>(epoch), 1));
    return vnls_local_energies(a, b, w, batch, beta);
  });
}

}  // namespace vnls
