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
#include <optional>
#include <string>
#include <string_view>

#include "vnls/operators.hpp"
#include "vnls/states.hpp"

namespace vnls {

struct LinearProblem {
  PauliSum a;
  DenseState b;
  int n;
  std::optional<double> kappa;  // nominal condition number, when known
};

struct IsingCoefficients {
  double eta;
  double zeta;
};

// eta = n (kappa + 1) / (kappa - 1), zeta = n + eta = 2 n kappa / (kappa - 1).
IsingCoefficients ising_coefficients(int n, double kappa);

/// A = (sum_j X_j + 0.1 sum_j Z_j Z_{j+1} + eta I) / zeta with b = all ones.
LinearProblem ising_problem(int n, double kappa);

/// Random real Pauli sum shifted by (sum |coef| + margin) I so that A is
/// positive definite, with a random sparse b.
LinearProblem random_pauli_problem(int n, int terms, std::uint64_t seed, double margin = 0.5);

// Problem file: `n=<int>`, optional `kappa=<real>`, operator lines, then
// `b dense` (2^n lines `re [im]`) or `b sparse` (lines `index re [im]`).
std::string format_problem(const LinearProblem& problem);
LinearProblem parse_problem(std::string_view text);
void save_problem(const LinearProblem& problem, const std::string& path);
LinearProblem load_problem(const std::string& path);

// Operator-only file (header `n=<int>` plus term lines), as used by `vqmc`.
PauliSum parse_operator_file(std::string_view text);
PauliSum load_operator_file(const std::string& path);

// A dense vector in the `b dense` body format (one amplitude per line),
// with an `n=<int>` header.
DenseState parse_state_file(std::string_view text);
DenseState load_state_file(const std::string& path);

}  // namespace vnls
