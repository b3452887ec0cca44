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
#include <string>

#include <Eigen/SparseCore>

#include "vnls/operators.hpp"
#include "vnls/states.hpp"

namespace vnls {

using SparseMatrixC = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;

// Above this many qubits the reference switches from dense factorizations to
// sparse iterative solves.
inline constexpr int kDenseFactorLimit = 10;

// Required relative residual of every exact solve.
inline constexpr double kSolveTolerance = 1e-10;

VectorXc exact_solve(const MatrixXc& a, const VectorXc& b);
VectorXc exact_solve(const SparseMatrixC& a, const VectorXc& b);
// Dense factorization up to kDenseFactorLimit qubits, sparse iteration above.
VectorXc exact_solve(const PauliSum& a, const DenseState& b, int dense_limit = kDefaultDenseLimit);

struct SingularRange {
  double min;
  double max;
};

SingularRange extremal_singular_values(const MatrixXc& a);
SingularRange extremal_singular_values(const SparseMatrixC& a);

// |<u|v>|^2 / (<u|u><v|v>), clamped to [0, 1].
double fidelity(const VectorXc& u, const VectorXc& v);
// sqrt(1 - fidelity).
double trace_distance(const VectorXc& u, const VectorXc& v);

// <psi|H|psi> / <psi|psi>.
Complex rayleigh_quotient(const SparseMatrixC& h, const VectorXc& psi);

// <psi|A P_b^perp A|psi> / <psi|psi>, A Hermitian.
double exact_loss(const SparseMatrixC& a, const VectorXc& b, const VectorXc& psi);
double exact_loss(const PauliSum& a, const VectorXc& b, const VectorXc& psi);

/// A, b and A^{-1} b materialized once, with the extremal singular values of A.
struct ExactSystem {
  int n = 0;
  SparseMatrixC a;
  VectorXc b;
  VectorXc solution;
  SingularRange sigma{0.0, 0.0};
  std::optional<double> kappa_nominal;
  double solve_residual = 0.0;

  double kappa() const { return sigma.max / sigma.min; }
};

ExactSystem analyze_system(const PauliSum& a, const DenseState& b,
                           std::optional<double> kappa_nominal = std::nullopt,
                           int dense_limit = kDefaultDenseLimit);

struct OracleReport {
  int n = 0;
  std::optional<double> kappa_nominal;
  double kappa_actual = 0.0;
  double norm_a = 0.0;
  double sigma_min = 0.0;
  double solve_residual = 0.0;
  double loss = 0.0;
  double fidelity = 0.0;
  double trace_distance = 0.0;
  double bound = 0.0;        // kappa sqrt(L) / ||A||
  double naive_bound = 0.0;  // kappa sqrt(L)
  bool bound_satisfied = false;
  VectorXc solution;
};

/// Compares psi with A^{-1} b: dist_Tr <= kappa sqrt(L) / ||A|| must hold.
OracleReport check_error_bound(const ExactSystem& sys, const VectorXc& psi);
OracleReport check_error_bound(const PauliSum& a, const DenseState& b, const VectorXc& psi,
                               int dense_limit = kDefaultDenseLimit);

// Flat `key=value` block and a CSV row under report_csv_header().
std::string format_report(const OracleReport& report);
std::string report_csv_header();
std::string report_csv_row(const OracleReport& report);

struct BoundProbe {
  std::size_t trials = 0;
  std::size_t naive_violations = 0;
  std::size_t corrected_violations = 0;
  double worst_naive_ratio = 0.0;  // max over trials of dist / naive bound
};

/// Random states against (scale * A, b): counts how often the uncorrected
/// bound dist <= kappa sqrt(L) fails and how often the corrected one does.
BoundProbe probe_bounds(const PauliSum& a, const DenseState& b, double scale, std::size_t trials,
                        std::uint64_t seed);

// Complex Gaussian vector of length 2^n.
VectorXc random_state_vector(int n, std::uint64_t seed);

struct IsingIdentityReport {
  int n = 0;
  double kappa = 0.0;
  double delta_max_error = 0.0;         // max |<b|Z_{j+1}Z_jZ_kZ_{k+1}|b> - delta_jk|
  double perturbation_max_error = 0.0;  // max |A b - b - c sum ZZ b|, c = 0.05(kappa-1)/(n kappa)
  double zz_entry_max_error = 0.0;      // max |(sum ZZ b)(x) - 2^{-n/2}(agree - disagree)|
  double entry_perturbation = 0.0;      // max |(A b - b)(x)|
  double entry_bound = 0.0;             // 0.05 * 2^{-n/2}
  double distance_sq = 0.0;             // ||b - A^{-1} b||^2
  double distance_bound = 0.0;          // 0.0025 (kappa-1)^2 (n-1) / n^2
  // The nominal bound assumes ||A^{-1}|| <= kappa. This one uses the
  // measured ||A^{-1}||^2 ||A b - b||^2 and always holds.
  double inverse_norm = 0.0;
  double measured_distance_bound = 0.0;
  double fidelity = 0.0;                // fidelity(b, A^{-1} b)
  // b is unit-normalized throughout.

  bool entry_bound_holds() const { return entry_perturbation <= entry_bound; }
  bool distance_bound_holds() const { return distance_sq <= distance_bound; }
  bool measured_distance_bound_holds() const {
    return distance_sq <= measured_distance_bound * (1.0 + 1e-9);
  }
};

IsingIdentityReport ising_identities(int n, double kappa, int dense_limit = kDefaultDenseLimit);

// 2^{-n/2} (#equal - #unequal adjacent bit pairs of x).
double zz_sum_entry(int n, BasisIndex x);

}  // namespace vnls
