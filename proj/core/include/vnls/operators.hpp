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

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/SparseCore>

#include "vnls/types.hpp"

namespace vnls {

enum class Pauli : char { X = 'X', Y = 'Y', Z = 'Z' };

// c * (P_0 (x) ... (x) P_{n-1}) with identity on every qubit absent from
// `factors`. Every row of its matrix holds exactly one nonzero entry.
class PauliTerm {
 public:
  PauliTerm(Complex coefficient, std::map<int, Pauli> factors, int n);

  static PauliTerm identity(Complex coefficient, int n) { return {coefficient, {}, n}; }

  Complex coefficient() const { return coefficient_; }
  const std::map<int, Pauli>& factors() const { return factors_; }
  int num_qubits() const { return n_; }

  // Bits flipped by X/Y factors, and bits whose value contributes a sign
  // (Y/Z factors).
  BasisIndex flip_mask() const { return flip_mask_; }
  BasisIndex phase_mask() const { return phase_mask_; }
  int y_count() const { return y_count_; }

  PauliTerm scaled(Complex factor) const;

  friend bool operator==(const PauliTerm&, const PauliTerm&) = default;

 private:
  Complex coefficient_;
  std::map<int, Pauli> factors_;
  int n_;
  BasisIndex flip_mask_ = 0;
  BasisIndex phase_mask_ = 0;
  int y_count_ = 0;
};

class PauliSum {
 public:
  explicit PauliSum(int n);
  PauliSum(int n, std::vector<PauliTerm> terms);

  int num_qubits() const { return n_; }
  const std::vector<PauliTerm>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

  void add(PauliTerm term);

  // All coefficients real. Each Pauli string is Hermitian, so this is the
  // structural Hermiticity flag used by the VNLS entry points.
  bool is_hermitian() const { return hermitian_; }

  PauliSum scaled(Complex factor) const;

  friend bool operator==(const PauliSum&, const PauliSum&) = default;

 private:
  int n_;
  std::vector<PauliTerm> terms_;
  bool hermitian_ = true;
};

struct RowEntry {
  BasisIndex col;
  Complex value;
  friend bool operator==(const RowEntry&, const RowEntry&) = default;
};
using SparseRow = std::vector<RowEntry>;

// Entries with magnitude below this are dropped when a row is merged.
inline constexpr double kRowDropTolerance = 1e-15;

struct RowApplyStats {
  std::size_t terms_visited = 0;
};

using AmplitudeFn = std::function<Complex(BasisIndex)>;

// One operator term per line: `<re> [<im>] <tok>...`, tok in {I, X<k>, Y<k>, Z<k>}.
// Blank lines and `#` comments are skipped.
PauliSum parse_pauli_sum(std::string_view text, int n);

// One term line (comment already stripped); `line` is used in error messages.
PauliTerm parse_pauli_term(std::string_view body, int n, int line = 0);

// Inverse of parse_pauli_sum; coefficients printed with round-trip precision.
std::string format_pauli_sum(const PauliSum& sum);
std::string format_pauli_term(const PauliTerm& term);

RowEntry apply_term_row(const PauliTerm& term, BasisIndex x);

// Row x of H as (column, value) pairs sorted by column, duplicates merged.
SparseRow apply_sum_row(const PauliSum& h, BasisIndex x, RowApplyStats* stats = nullptr);

// Row x of A^2, obtained by expanding each column of row x once more.
SparseRow squared_sum_row(const PauliSum& a, BasisIndex x);

// (H psi)(x).
Complex apply_to_state(const PauliSum& h, const AmplitudeFn& psi, BasisIndex x);

// (A^2 psi)(x) via two nested row expansions.
Complex apply_squared_row(const PauliSum& a, const AmplitudeFn& psi, BasisIndex x);

// [[0, A], [A^dagger, 0]] on n+1 qubits with the ancilla as qubit 0.
PauliSum embed_hermitian(const PauliSum& a);

// Exact matrices built from Kronecker products of the 2x2 factors.
MatrixXc to_dense(const PauliSum& h, int dense_limit = kDefaultDenseLimit);
Eigen::SparseMatrix<Complex, Eigen::RowMajor> to_sparse(const PauliSum& h,
                                                        int dense_limit = kDefaultDenseLimit);

}  // namespace vnls
