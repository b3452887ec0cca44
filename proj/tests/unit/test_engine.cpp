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

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numeric>

#include "dense_oracle.hpp"
#include "vnls/engine.hpp"
#include "vnls/oracle.hpp"
#include "vnls/problems.hpp"

using namespace vnls;

namespace {

PauliSum single(Pauli p, double c = 1.0) { return PauliSum(1, {PauliTerm(c, {{0, p}}, 1)}); }

DenseState state2(Complex a0, Complex a1) {
  VectorXc v(2);
  v << a0, a1;
  return {1, v};
}

LocalEnergySample sample_with(Complex l, VectorXc o, double w = 1.0) { return {0, l, std::move(o), w}; }

double mean_of(const std::vector<EpochRecord>& r, std::size_t from, std::size_t to,
               double EpochRecord::*field) {
  double acc = 0.0;
  for (std::size_t i = from; i < to; ++i) acc += r[i].*field;
  return acc / static_cast<double>(to - from);
}

}  // namespace

TEST_CASE("local energy of Z on the uniform state", "[engine][local]") {
  const PauliSum z = single(Pauli::Z);
  const DenseState psi = state2(1.0, 1.0);
  CHECK(local_energy_h(z, psi, 0) == Complex{1.0, 0.0});
  CHECK(local_energy_h(z, psi, 1) == Complex{-1.0, 0.0});
  const auto samples = vqmc_local_energies(z, psi, enumerate_born(psi));
  CHECK(std::abs(estimate_objective(samples)) < 1e-15);
}

TEST_CASE("local energy of X on its eigenvector", "[engine][local]") {
  const PauliSum x = single(Pauli::X);
  const DenseState psi = state2(1.0, 1.0);
  CHECK(local_energy_h(x, psi, 0) == Complex{1.0, 0.0});
  CHECK(local_energy_h(x, psi, 1) == Complex{1.0, 0.0});
  CHECK(estimate_variance(vqmc_local_energies(x, psi, enumerate_born(psi))) == 0.0);
}

TEST_CASE("local energy of X + Z by hand", "[engine][local]") {
  PauliSum h = single(Pauli::X);
  h.add(PauliTerm(1.0, {{0, Pauli::Z}}, 1));
  const DenseState psi = state2(2.0, 1.0);
  CHECK(std::abs(local_energy_h(h, psi, 0) - 1.5) < 1e-15);
  CHECK(std::abs(local_energy_h(h, psi, 1) - 1.0) < 1e-15);
}

TEST_CASE("local energy at a zero amplitude is an error", "[engine][local]") {
  const DenseState psi = state2(1.0, 0.0);
  CHECK_THROWS_AS(local_energy_h(single(Pauli::X), psi, 1), ZeroAmplitudeError);
}

TEST_CASE("VNLS local energy vanishes at the exact solution of A = I", "[engine][vnls]") {
  testing::Rng rng(4);
  const int n = 3;
  const PauliSum id(n, {PauliTerm::identity(1.0, n)});
  const DenseState b(n, testing::random_vector(rng, n));
  const DenseState psi = b;
  const auto beta = sample_beta(b, 64, 1);
  for (BasisIndex x = 0; x < dimension(n); ++x) {
    CHECK(std::abs(local_energy_vnls(id, b, psi, x, beta)) < 1e-14);
  }
  const auto e = estimate_beta_expectation(id, b, psi, enumerate_beta(b), 0.0);
  CHECK(std::abs(e.value - 1.0) < 1e-14);
  CHECK_THROWS_AS(estimate_beta_expectation(id, b, psi, SampleBatch{}, 0.0), std::invalid_argument);
}

TEST_CASE("VNLS local energy scaling", "[engine][vnls][scaling]") {
  testing::Rng rng(10);
  const LinearProblem p = ising_problem(4, 10.0);
  const Rbm psi(testing::random_rbm(rng, 4, 8, RbmFlavor::Complex));
  const auto pi = enumerate_born(psi);
  const auto beta = sample_beta(p.b, 256, 7);
  const auto base = vnls_local_energies(p.a, p.b, psi, pi, beta);

  const DenseState b2(4, 2.0 * p.b.amplitudes());
  const auto scaled_b = vnls_local_energies(p.a, b2, psi, pi, sample_beta(b2, 256, 7));
  for (std::size_t i = 0; i < base.size(); ++i) CHECK(scaled_b[i].l == base[i].l);

  for (const double c : {2.0, 0.5}) {
    const auto scaled_a = vnls_local_energies(p.a.scaled(c), p.b, psi, pi, beta);
    for (std::size_t i = 0; i < base.size(); ++i) CHECK(scaled_a[i].l == c * c * base[i].l);
  }
  const auto scaled3 = vnls_local_energies(p.a.scaled(3.0), p.b, psi, pi, beta);
  for (std::size_t i = 0; i < base.size(); ++i) {
    CHECK(std::abs(scaled3[i].l - 9.0 * base[i].l) <= 1e-12 * std::abs(base[i].l) + 1e-14);
  }
}

TEST_CASE("objective and variance of simple batches", "[engine][estimators]") {
  std::vector<LocalEnergySample> batch;
  for (int i = 0; i < 10; ++i) batch.push_back(sample_with(5.0, VectorXc::Ones(3)));
  CHECK(estimate_objective(batch) == 5.0);
  CHECK(estimate_variance(batch) == 0.0);
  CHECK(estimate_gradient(batch, 5.0).isZero(0.0));
  CHECK(estimate_fisher(batch).isZero(0.0));
  CHECK_THROWS_AS(estimate_objective(std::vector<LocalEnergySample>{}), std::invalid_argument);

  const std::vector<LocalEnergySample> one{sample_with({2.0, 0.5}, VectorXc::Random(4))};
  CHECK(estimate_gradient(one, sample_mean(one)).isZero(0.0));
}

TEST_CASE("two-sample covariance by hand", "[engine][fisher]") {
  VectorXc o1(2), o2(2);
  o1 << 1.0, 0.0;
  o2 << 3.0, 2.0;
  const std::vector<LocalEnergySample> batch{sample_with(0.0, o1), sample_with(0.0, o2)};
  // Deviations from the mean (2, 1) are (-1, -1) and (1, 1): covariance [[1,1],[1,1]].
  Eigen::MatrixXd expected(2, 2);
  expected << 4.0, 4.0, 4.0, 4.0;
  CHECK((estimate_fisher(batch) - expected).norm() < 1e-14);

  VectorXc c1(1), c2(1);
  c1 << Complex{0.0, 1.0};
  c2 << Complex{0.0, -1.0};
  // Purely imaginary scores: 4 Re <|O - <O>|^2> = 4.
  const std::vector<LocalEnergySample> cbatch{sample_with(0.0, c1), sample_with(0.0, c2)};
  CHECK(std::abs(estimate_fisher(cbatch)(0, 0) - 4.0) < 1e-14);
}

TEST_CASE("weights scale out of every estimator", "[engine][estimators]") {
  testing::Rng rng(2);
  std::vector<LocalEnergySample> a, b;
  for (int i = 0; i < 6; ++i) {
    const Complex l{testing::uniform(rng, -1, 1), testing::uniform(rng, -1, 1)};
    const VectorXc o = testing::random_vector(rng, 2);
    const double w = testing::uniform(rng, 0.1, 1.0);
    a.push_back(sample_with(l, o, w));
    b.push_back(sample_with(l, o, 8.0 * w));
  }
  CHECK(std::abs(sample_mean(a) - sample_mean(b)) < 1e-15);
  CHECK(std::abs(estimate_variance(a) - estimate_variance(b)) < 1e-15);
  CHECK((estimate_gradient(a, sample_mean(a)) - estimate_gradient(b, sample_mean(b))).norm() < 1e-14);
  CHECK((estimate_fisher(a) - estimate_fisher(b)).norm() < 1e-14);
}

TEST_CASE("enumerated objective and variance match dense expectations", "[engine][estimators]") {
  testing::Rng rng(55);
  for (int n = 1; n <= 6; ++n) {
    const PauliSum h = testing::random_sum(rng, n, 5);
    const MatrixXc dh = testing::brute_dense(h);
    const DenseState psi(n, testing::random_vector(rng, n));
    const auto samples = vqmc_local_energies(h, psi, enumerate_born(psi));
    const double l = testing::dense_rayleigh(dh, psi.amplitudes()).real();
    const double h2 = testing::dense_rayleigh(dh * dh, psi.amplitudes()).real();
    CHECK(std::abs(estimate_objective(samples) - l) < 1e-10);
    CHECK(std::abs(estimate_variance(samples) - (h2 - l * l)) < 1e-10);
  }
}

TEST_CASE("sampled objective lies within five standard errors", "[engine][estimators]") {
  testing::Rng rng(66);
  for (int n = 2; n <= 8; n += 3) {
    const PauliSum h = testing::random_sum(rng, n, 6);
    const Rbm psi(testing::random_rbm(rng, n, n, RbmFlavor::Complex, 0.3));
    MetropolisConfig cfg;
    cfg.batch_size = 20000;
    cfg.thin = 2 * static_cast<std::size_t>(n);
    cfg.seed = static_cast<std::uint64_t>(n);
    const auto samples = vqmc_local_energies(h, psi, metropolis_sample(psi, cfg).batch);
    const double exact =
        testing::dense_rayleigh(testing::brute_dense(h), testing::amplitudes_of(psi)).real();
    const double se = std::sqrt(estimate_variance(samples) / static_cast<double>(samples.size()));
    CHECK(std::abs(estimate_objective(samples) - exact) < 5.0 * se + 1e-12);
  }
}

TEST_CASE("every local energy equals the eigenvalue at an eigenvector", "[engine][zero-variance]") {
  testing::Rng rng(12);
  for (int n = 1; n <= 5; ++n) {
    const PauliSum h = testing::random_sum(rng, n, 4);
    const Eigen::SelfAdjointEigenSolver<MatrixXc> eig(testing::brute_dense(h));
    for (Eigen::Index k = 0; k < eig.eigenvalues().size(); ++k) {
      const DenseState psi(n, eig.eigenvectors().col(k));
      const auto samples = vqmc_local_energies(h, psi, enumerate_born(psi));
      // Roundoff-sized amplitudes make l(x) meaningless there, but such x
      // carry no weight.
      for (const auto& s : samples) {
        if (s.weight > 1e-12) REQUIRE(std::abs(s.l - eig.eigenvalues()[k]) < 1e-9);
      }
      CHECK(estimate_variance(samples) < 1e-10);
      CHECK(estimate_gradient(samples, sample_mean(samples)).norm() < 1e-9);
    }
  }
}

TEST_CASE("enumerated VNLS loss is non-negative and zero only at the solution",
          "[engine][vnls]") {
  testing::Rng rng(14);
  for (int n = 2; n <= 6; ++n) {
    const LinearProblem p = random_pauli_problem(n, 4, static_cast<std::uint64_t>(n));
    const DenseState psi(n, testing::random_vector(rng, n));
    const auto samples = vnls_local_energies(p.a, p.b, psi, enumerate_born(psi), enumerate_beta(p.b));
    CHECK(estimate_objective(samples) > 1e-6);
    const DenseState solution(n, exact_solve(testing::brute_dense(p.a), p.b.amplitudes()));
    const auto at_solution =
        vnls_local_energies(p.a, p.b, solution, enumerate_born(solution), enumerate_beta(p.b));
    CHECK(std::abs(estimate_objective(at_solution)) < 1e-12);
  }
}

TEST_CASE("Fisher estimate is symmetric positive semidefinite", "[engine][fisher]") {
  testing::Rng rng(15);
  const Rbm psi(testing::random_rbm(rng, 5, 4, RbmFlavor::Complex));
  MetropolisConfig cfg;
  cfg.batch_size = 200;
  const auto samples = vqmc_local_energies(testing::random_sum(rng, 5, 3), psi,
                                           metropolis_sample(psi, cfg).batch);
  const Eigen::MatrixXd f = estimate_fisher(samples);
  CHECK((f - f.transpose()).norm() == 0.0);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(f);
  CHECK(eig.eigenvalues().minCoeff() > -1e-10);
}

TEST_CASE("sr_step examples", "[engine][sr]") {
  const Eigen::VectorXd theta = Eigen::Vector2d(1.0, -1.0);
  SrState sr;
  sr.grad = Eigen::Vector2d(0.5, 2.0);
  sr.fisher = Eigen::Matrix2d::Identity();
  sr.shift = 0.0;
  sr.epsilon = 0.0;
  sr.learning_rate = 0.1;
  auto step = sr_step(theta, sr);
  CHECK_FALSE(step.fallback);
  CHECK((step.theta - (theta - 0.1 * sr.grad)).norm() < 1e-15);

  sr.grad.setZero();
  CHECK(sr_step(theta, sr).theta == theta);

  sr.fisher << 2.0, 1.0, 1.0, 3.0;
  sr.grad = Eigen::Vector2d(1.0, 2.0);
  sr.learning_rate = 1.0;
  step = sr_step(theta, sr);
  CHECK((step.theta - (theta - Eigen::Vector2d(0.2, 0.6))).norm() < 1e-14);
  sr.shift = 0.5;
  step = sr_step(theta, sr);
  CHECK((step.theta - (theta - Eigen::Vector2d(0.2, 0.4))).norm() < 1e-14);

  sr.fisher.setZero();
  sr.shift = 0.0;
  step = sr_step(theta, sr);
  CHECK(step.fallback);
  CHECK(step.theta == theta - sr.grad);

  sr.fisher = Eigen::Matrix3d::Identity();
  CHECK_THROWS_AS(sr_step(theta, sr), std::invalid_argument);
}

TEST_CASE("VQMC finds the ground state of Z", "[engine][train]") {
  const PauliSum z = single(Pauli::Z);
  Rbm psi(init_gaussian(1, 2, RbmFlavor::Real, kDefaultSigmaReal, 3));
  TrainConfig cfg;
  cfg.epochs = 300;
  cfg.batch_size = 256;
  cfg.learning_rate = 0.1;
  cfg.seed = 9;
  const auto records = train_vqmc(z, psi, cfg);
  REQUIRE(records.size() == 300);
  const VectorXc amps = testing::amplitudes_of(psi);
  const double exact = (std::norm(amps[0]) - std::norm(amps[1])) / amps.squaredNorm();
  CHECK(exact < -0.95);
  CHECK(records.back().loss < -0.95);
}

TEST_CASE("VQMC variance decreases on a four-qubit model", "[engine][train]") {
  PauliSum h(4);
  for (int j = 0; j < 4; ++j) h.add(PauliTerm(-1.0, {{j, Pauli::X}}, 4));
  for (int j = 0; j + 1 < 4; ++j) h.add(PauliTerm(0.5, {{j, Pauli::Z}, {j + 1, Pauli::Z}}, 4));
  Rbm psi(init_gaussian(4, 8, RbmFlavor::Real, 0.3, 4));
  TrainConfig cfg;
  cfg.epochs = 200;
  cfg.batch_size = 512;
  cfg.learning_rate = 0.05;
  cfg.seed = 1;
  const auto r = train_vqmc(h, psi, cfg);
  CHECK(mean_of(r, 180, 200, &EpochRecord::loss_var) < mean_of(r, 0, 20, &EpochRecord::loss_var));
  const Eigen::SelfAdjointEigenSolver<MatrixXc> eig(testing::brute_dense(h), Eigen::EigenvaluesOnly);
  CHECK(r.back().loss < eig.eigenvalues()[0] + 0.1);
}

TEST_CASE("zero epochs produce no records", "[engine][train]") {
  Rbm psi(RbmParams::zeros(2, 2, RbmFlavor::Real));
  TrainConfig cfg;
  cfg.epochs = 0;
  CHECK(train_vqmc(PauliSum(2), psi, cfg).empty());
  CHECK(train_vnls(PauliSum(2, {PauliTerm::identity(1.0, 2)}), DenseState::ones(2), psi, cfg).empty());
}

TEST_CASE("VNLS solves the identity system", "[engine][train]") {
  const int n = 4;
  const PauliSum id(n, {PauliTerm::identity(1.0, n)});
  Rbm psi(init_gaussian(n, 8, RbmFlavor::Real, kDefaultSigmaReal, 2));
  TrainConfig cfg;
  cfg.epochs = 100;
  cfg.seed = 3;
  const auto r = train_vnls(id, DenseState::ones(n), psi, cfg);
  REQUIRE(r.size() == 100);
  const VectorXc amps = testing::amplitudes_of(psi);
  CHECK(exact_loss(id, VectorXc::Ones(amps.size()), amps) < 1e-3);
  CHECK(r.back().loss < 1e-3);
}

TEST_CASE("training is deterministic and reports fidelity", "[engine][train]") {
  const LinearProblem p = ising_problem(4, 10.0);
  const VectorXc solution = exact_solve(p.a, p.b);
  auto run = [&] {
    Rbm psi(init_gaussian(4, 8, RbmFlavor::Complex, kDefaultSigmaComplex, 5));
    TrainConfig cfg;
    cfg.epochs = 6;
    cfg.batch_size = 128;
    cfg.seed = 11;
    cfg.monitor_every = 2;
    cfg.fidelity_monitor = [&](const Wavefunction& w) {
      return fidelity(enumerate_amplitudes(w), solution);
    };
    int traced = 0;
    cfg.on_trace = [&](const EpochTrace& t) {
      CHECK(t.samples.size() == 128);
      CHECK(t.theta_before.size() == t.theta_after.size());
      ++traced;
    };
    auto records = train_vnls(p.a, p.b, psi, cfg);
    CHECK(traced == 6);
    return std::pair{records, psi.parameters()};
  };
  const auto [r1, t1] = run();
  const auto [r2, t2] = run();
  CHECK(t1 == t2);
  for (std::size_t i = 0; i < r1.size(); ++i) {
    CHECK(r1[i].loss == r2[i].loss);
    CHECK(r1[i].fidelity.has_value() == (i % 2 == 0));
    CHECK_FALSE(r1[i].wall_ms.has_value());
  }
  CHECK(*r1[0].fidelity > 0.9);
}

TEST_CASE("VNLS rejects non-Hermitian or mismatched input", "[engine][train]") {
  Rbm psi(RbmParams::zeros(2, 2, RbmFlavor::Real));
  TrainConfig cfg;
  const PauliSum nonherm(2, {PauliTerm({0.0, 1.0}, {{0, Pauli::X}}, 2)});
  CHECK_THROWS_AS(train_vnls(nonherm, DenseState::ones(2), psi, cfg), std::invalid_argument);
  CHECK_THROWS_AS(train_vnls(PauliSum(3), DenseState::ones(3), psi, cfg), std::invalid_argument);
  cfg.monitor_every = 1;
  CHECK_THROWS_AS(train_vqmc(PauliSum(2), psi, cfg), std::invalid_argument);
}
