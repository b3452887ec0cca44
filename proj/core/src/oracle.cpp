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

#include "vnls/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>

#include "vnls/problems.hpp"
#include "vnls/sampling.hpp"
#include "vnls/text_io.hpp"

namespace vnls {

namespace {

constexpr int kMaxPowerIterations = 5000;
constexpr double kPowerTolerance = 1e-13;

double relative_residual(const auto& a, const VectorXc& x, const VectorXc& b) {
  return (a * x - b).norm() / b.norm();
}

void check_residual(double residual) {
  if (!(residual < kSolveTolerance)) {
    throw SolveError("exact solve residual " + text::format_real(residual) + " above tolerance");
  }
}

VectorXc solve_for_size(const SparseMatrixC& a, const VectorXc& b, int n) {
  if (n <= kDenseFactorLimit) return exact_solve(MatrixXc(a), b);
  return exact_solve(a, b);
}

bool is_hermitian(const MatrixXc& a) {
  return (a - a.adjoint()).norm() <= 1e-12 * std::max(1.0, a.norm());
}

VectorXc start_vector(Eigen::Index dim) {
  std::mt19937_64 rng(0x5eed);
  VectorXc v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v[i] = {uniform01(rng) - 0.5, uniform01(rng) - 0.5};
  return v.normalized();
}

// Largest eigenvalue of the positive semidefinite map `apply` by power iteration.
template <typename Apply>
double dominant_eigenvalue(Eigen::Index dim, Apply apply) {
  VectorXc v = start_vector(dim);
  double mu = 0.0;
  for (int it = 0; it < kMaxPowerIterations; ++it) {
    VectorXc w = apply(v);
    const double next = v.dot(w).real();
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    v = w / norm;
    if (it > 0 && std::abs(next - mu) <= kPowerTolerance * std::abs(next)) return next;
    mu = next;
  }
  return mu;
}

Complex inner(const VectorXc& u, const VectorXc& v) { return u.dot(v); }

SparseMatrixC zz_chain(int n) {
  PauliSum zz(n);
  for (int j = 0; j + 1 < n; ++j) zz.add(PauliTerm(1.0, {{j, Pauli::Z}, {j + 1, Pauli::Z}}, n));
  return to_sparse(zz, n);
}

// Z_j Z_{j+1} Z_k Z_{k+1} with repeated factors cancelled.
PauliTerm zz_product(int n, int j, int k) {
  std::map<int, Pauli> factors;
  for (const int q : {j, j + 1, k, k + 1}) {
    if (!factors.erase(q)) factors.emplace(q, Pauli::Z);
  }
  return {1.0, std::move(factors), n};
}

}  // namespace

VectorXc exact_solve(const MatrixXc& a, const VectorXc& b) {
  if (a.rows() != a.cols() || a.rows() != b.size()) throw std::invalid_argument("size mismatch");
  Eigen::PartialPivLU<MatrixXc> lu(a);
  if (!(lu.rcond() > 1e-14)) throw SolveError("matrix is singular to working precision");
  VectorXc x = lu.solve(b);
  check_residual(relative_residual(a, x, b));
  return x;
}

VectorXc exact_solve(const SparseMatrixC& a, const VectorXc& b) {
  if (a.rows() != a.cols() || a.rows() != b.size()) throw std::invalid_argument("size mismatch");
  Eigen::BiCGSTAB<SparseMatrixC> iterative;
  iterative.setTolerance(1e-13);
  iterative.setMaxIterations(20000);
  iterative.compute(a);
  VectorXc x = iterative.solve(b);
  if (iterative.info() == Eigen::Success && relative_residual(a, x, b) < kSolveTolerance) return x;

  Eigen::SparseMatrix<Complex> col_major = a;
  Eigen::SparseLU<Eigen::SparseMatrix<Complex>> direct;
  direct.compute(col_major);
  if (direct.info() != Eigen::Success) throw SolveError("sparse factorization failed");
  x = direct.solve(b);
  check_residual(relative_residual(a, x, b));
  return x;
}

VectorXc exact_solve(const PauliSum& a, const DenseState& b, int dense_limit) {
  if (b.num_qubits() != a.num_qubits()) {
    throw std::invalid_argument("A and b act on different qubit counts");
  }
  return solve_for_size(to_sparse(a, dense_limit), b.amplitudes(), a.num_qubits());
}

SingularRange extremal_singular_values(const MatrixXc& a) {
  if (is_hermitian(a)) {
    const Eigen::SelfAdjointEigenSolver<MatrixXc> eig(a, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd mags = eig.eigenvalues().cwiseAbs();
    return {mags.minCoeff(), mags.maxCoeff()};
  }
  const Eigen::BDCSVD<MatrixXc> svd(a);
  const auto& s = svd.singularValues();
  return {s.minCoeff(), s.maxCoeff()};
}

SingularRange extremal_singular_values(const SparseMatrixC& a) {
  const Eigen::Index dim = a.rows();
  const SparseMatrixC adj = a.adjoint();
  const double top = dominant_eigenvalue(dim, [&](const VectorXc& v) -> VectorXc {
    return adj * (a * v);
  });
  // Inverse iteration on A^dagger A, one solve with A and one with A^dagger.
  const double inv = dominant_eigenvalue(dim, [&](const VectorXc& v) -> VectorXc {
    return exact_solve(a, exact_solve(adj, v));
  });
  return {1.0 / std::sqrt(inv), std::sqrt(top)};
}

double fidelity(const VectorXc& u, const VectorXc& v) {
  const double uu = u.squaredNorm();
  const double vv = v.squaredNorm();
  if (uu == 0.0 || vv == 0.0) throw std::invalid_argument("fidelity of a zero vector");
  return std::clamp(std::norm(inner(u, v)) / (uu * vv), 0.0, 1.0);
}

double trace_distance(const VectorXc& u, const VectorXc& v) {
  return std::sqrt(std::max(0.0, 1.0 - fidelity(u, v)));
}

Complex rayleigh_quotient(const SparseMatrixC& h, const VectorXc& psi) {
  return inner(psi, h * psi) / psi.squaredNorm();
}

double exact_loss(const SparseMatrixC& a, const VectorXc& b, const VectorXc& psi) {
  const VectorXc a_psi = a * psi;
  const double projected = std::norm(inner(b, a_psi)) / b.squaredNorm();
  return (a_psi.squaredNorm() - projected) / psi.squaredNorm();
}

double exact_loss(const PauliSum& a, const VectorXc& b, const VectorXc& psi) {
  return exact_loss(to_sparse(a), b, psi);
}

ExactSystem analyze_system(const PauliSum& a, const DenseState& b,
                           std::optional<double> kappa_nominal, int dense_limit) {
  const int n = a.num_qubits();
  if (b.num_qubits() != n) throw std::invalid_argument("A and b act on different qubit counts");
  if (n > dense_limit) {
    throw CapabilityError("n=" + std::to_string(n) + " exceeds the dense limit " +
                          std::to_string(dense_limit));
  }
  ExactSystem sys;
  sys.n = n;
  sys.a = to_sparse(a, dense_limit);
  sys.b = b.amplitudes();
  sys.kappa_nominal = kappa_nominal;
  if (n <= kDenseFactorLimit) {
    const MatrixXc dense(sys.a);
    sys.solution = exact_solve(dense, sys.b);
    sys.sigma = extremal_singular_values(dense);
  } else {
    sys.solution = exact_solve(sys.a, sys.b);
    sys.sigma = extremal_singular_values(sys.a);
  }
  sys.solve_residual = relative_residual(sys.a, sys.solution, sys.b);
  return sys;
}

OracleReport check_error_bound(const ExactSystem& sys, const VectorXc& psi) {
  OracleReport r;
  r.n = sys.n;
  r.kappa_nominal = sys.kappa_nominal;
  r.kappa_actual = sys.kappa();
  r.norm_a = sys.sigma.max;
  r.sigma_min = sys.sigma.min;
  r.solve_residual = sys.solve_residual;
  r.loss = exact_loss(sys.a, sys.b, psi);
  r.fidelity = fidelity(psi, sys.solution);
  r.trace_distance = trace_distance(psi, sys.solution);
  const double root = std::sqrt(std::max(0.0, r.loss));
  r.naive_bound = r.kappa_actual * root;
  r.bound = r.naive_bound / r.norm_a;
  const double dist_sq = r.trace_distance * r.trace_distance;
  r.bound_satisfied = dist_sq <= r.bound * r.bound * (1.0 + 1e-9) + 1e-12;
  r.solution = sys.solution;
  return r;
}

OracleReport check_error_bound(const PauliSum& a, const DenseState& b, const VectorXc& psi,
                               int dense_limit) {
  return check_error_bound(analyze_system(a, b, std::nullopt, dense_limit), psi);
}

std::string format_report(const OracleReport& r) {
  std::string out;
  auto kv = [&out](const char* key, const std::string& value) {
    out += key;
    out += '=';
    out += value;
    out += '\n';
  };
  kv("n", std::to_string(r.n));
  kv("kappa_nominal", r.kappa_nominal ? text::format_real(*r.kappa_nominal) : "");
  kv("kappa_actual", text::format_real(r.kappa_actual));
  kv("norm_a", text::format_real(r.norm_a));
  kv("sigma_min", text::format_real(r.sigma_min));
  kv("solve_residual", text::format_real(r.solve_residual));
  kv("loss", text::format_real(r.loss));
  kv("fidelity", text::format_real(r.fidelity));
  kv("trace_distance", text::format_real(r.trace_distance));
  kv("bound", text::format_real(r.bound));
  kv("naive_bound", text::format_real(r.naive_bound));
  kv("bound_satisfied", r.bound_satisfied ? "true" : "false");
  return out;
}

std::string report_csv_header() {
  return "n,kappa_nominal,kappa_actual,norm_a,sigma_min,solve_residual,loss,fidelity,"
         "trace_distance,bound,naive_bound,bound_satisfied";
}

std::string report_csv_row(const OracleReport& r) {
  std::string out = std::to_string(r.n);
  for (const auto& field :
       {r.kappa_nominal ? text::format_real(*r.kappa_nominal) : std::string(),
        text::format_real(r.kappa_actual), text::format_real(r.norm_a),
        text::format_real(r.sigma_min), text::format_real(r.solve_residual),
        text::format_real(r.loss), text::format_real(r.fidelity),
        text::format_real(r.trace_distance), text::format_real(r.bound),
        text::format_real(r.naive_bound), std::string(r.bound_satisfied ? "true" : "false")}) {
    out += ',';
    out += field;
  }
  return out;
}

VectorXc random_state_vector(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto dim = static_cast<Eigen::Index>(dimension(n));
  VectorXc v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    // Box-Muller, so the stream does not depend on the library's normal distribution.
    const double r = std::sqrt(-2.0 * std::log1p(-uniform01(rng)));
    const double phi = 2.0 * std::numbers::pi * uniform01(rng);
    v[i] = std::polar(r, phi);
  }
  return v;
}

BoundProbe probe_bounds(const PauliSum& a, const DenseState& b, double scale, std::size_t trials,
                        std::uint64_t seed) {
  const ExactSystem sys =
      analyze_system(a.scaled(scale), b, std::nullopt, kDenseFactorLimit);
  BoundProbe probe;
  probe.trials = trials;
  for (std::size_t t = 0; t < trials; ++t) {
    const VectorXc psi = random_state_vector(sys.n, derive_seed(seed, t));
    const OracleReport r = check_error_bound(sys, psi);
    if (!r.bound_satisfied) ++probe.corrected_violations;
    if (r.trace_distance > r.naive_bound) ++probe.naive_violations;
    if (r.naive_bound > 0.0) {
      probe.worst_naive_ratio = std::max(probe.worst_naive_ratio, r.trace_distance / r.naive_bound);
    }
  }
  return probe;
}

double zz_sum_entry(int n, BasisIndex x) {
  int agree = 0;
  for (int j = 0; j + 1 < n; ++j) agree += qubit_bit(x, n, j) == qubit_bit(x, n, j + 1) ? 1 : -1;
  return agree * std::pow(2.0, -0.5 * n);
}

IsingIdentityReport ising_identities(int n, double kappa, int dense_limit) {
  const LinearProblem problem = ising_problem(n, kappa);
  if (n > dense_limit) {
    throw CapabilityError("n=" + std::to_string(n) + " exceeds the dense limit " +
                          std::to_string(dense_limit));
  }
  IsingIdentityReport r;
  r.n = n;
  r.kappa = kappa;
  const VectorXc b_hat = problem.b.amplitudes().normalized();
  const DenseState b_state(n, b_hat);
  const AmplitudeFn b_fn = [&b_state](BasisIndex x) { return b_state[x]; };

  for (int j = 0; j + 1 < n; ++j) {
    for (int k = 0; k + 1 < n; ++k) {
      const PauliSum op(n, {zz_product(n, j, k)});
      Complex overlap{0.0, 0.0};
      for (Eigen::Index x = 0; x < b_hat.size(); ++x) {
        overlap += std::conj(b_hat[x]) * apply_to_state(op, b_fn, static_cast<BasisIndex>(x));
      }
      const double expected = j == k ? 1.0 : 0.0;
      r.delta_max_error = std::max(r.delta_max_error, std::abs(overlap - expected));
    }
  }

  const SparseMatrixC a = to_sparse(problem.a, dense_limit);
  const VectorXc a_b = a * b_hat;
  const VectorXc zz_b = zz_chain(n) * b_hat;
  const double c = 0.05 * (kappa - 1.0) / (n * kappa);
  r.perturbation_max_error = (a_b - b_hat - c * zz_b).cwiseAbs().maxCoeff();
  r.entry_perturbation = (a_b - b_hat).cwiseAbs().maxCoeff();
  r.entry_bound = 0.05 * std::pow(2.0, -0.5 * n);
  for (Eigen::Index x = 0; x < zz_b.size(); ++x) {
    r.zz_entry_max_error = std::max(
        r.zz_entry_max_error, std::abs(zz_b[x] - zz_sum_entry(n, static_cast<BasisIndex>(x))));
  }

  const VectorXc solution = solve_for_size(a, b_hat, n);
  r.distance_sq = (b_hat - solution).squaredNorm();
  r.distance_bound = 0.0025 * (kappa - 1.0) * (kappa - 1.0) * (n - 1) / (static_cast<double>(n) * n);
  const SingularRange sigma =
      n <= kDenseFactorLimit ? extremal_singular_values(MatrixXc(a)) : extremal_singular_values(a);
  r.inverse_norm = 1.0 / sigma.min;
  r.measured_distance_bound = r.inverse_norm * r.inverse_norm * (a_b - b_hat).squaredNorm();
  r.fidelity = fidelity(b_hat, solution);
  return r;
}

}  // namespace vnls
