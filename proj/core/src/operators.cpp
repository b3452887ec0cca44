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

#include "vnls/operators.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

#include <unsupported/Eigen/KroneckerProduct>

#include "vnls/text_io.hpp"

namespace vnls {

namespace {

Complex minus_i_power(int k) {
  switch (k & 3) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, -1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, 1.0};
  }
}

void check_qubit_count(int n) {
  if (n < 1 || n > kMaxQubits) {
    throw std::invalid_argument("qubit count must be in [1, " + std::to_string(kMaxQubits) +
                                "], got " + std::to_string(n));
  }
}

SparseRow merge_row(SparseRow entries) {
  std::stable_sort(entries.begin(), entries.end(),
                   [](const RowEntry& a, const RowEntry& b) { return a.col < b.col; });
  SparseRow out;
  out.reserve(entries.size());
  for (std::size_t i = 0; i < entries.size();) {
    RowEntry merged = entries[i];
    std::size_t j = i + 1;
    for (; j < entries.size() && entries[j].col == merged.col; ++j) merged.value += entries[j].value;
    if (std::abs(merged.value) >= kRowDropTolerance) out.push_back(merged);
    i = j;
  }
  return out;
}

Eigen::Matrix2cd pauli_matrix(std::optional<Pauli> p) {
  using namespace std::complex_literals;
  Eigen::Matrix2cd m;
  if (!p) {
    m << 1.0, 0.0, 0.0, 1.0;
    return m;
  }
  switch (*p) {
    case Pauli::X: m << 0.0, 1.0, 1.0, 0.0; break;
    case Pauli::Y: m << 0.0, -1.0i, 1.0i, 0.0; break;
    case Pauli::Z: m << 1.0, 0.0, 0.0, -1.0; break;
  }
  return m;
}

std::optional<Pauli> factor_at(const PauliTerm& t, int q) {
  const auto it = t.factors().find(q);
  if (it == t.factors().end()) return std::nullopt;
  return it->second;
}

void check_dense_limit(int n, int limit) {
  if (n > limit) {
    throw CapabilityError("n=" + std::to_string(n) + " exceeds the dense limit " +
                          std::to_string(limit));
  }
}

}  // namespace

PauliTerm::PauliTerm(Complex coefficient, std::map<int, Pauli> factors, int n)
    : coefficient_(coefficient), factors_(std::move(factors)), n_(n) {
  check_qubit_count(n);
  for (const auto& [q, p] : factors_) {
    if (q < 0 || q >= n) {
      throw std::out_of_range("qubit index " + std::to_string(q) + " outside [0, " +
                              std::to_string(n) + ")");
    }
    const BasisIndex bit = qubit_mask(n, q);
    if (p == Pauli::X || p == Pauli::Y) flip_mask_ |= bit;
    if (p == Pauli::Y || p == Pauli::Z) phase_mask_ |= bit;
    if (p == Pauli::Y) ++y_count_;
  }
}

PauliTerm PauliTerm::scaled(Complex factor) const {
  return {coefficient_ * factor, factors_, n_};
}

PauliSum::PauliSum(int n) : n_(n) { check_qubit_count(n); }

PauliSum::PauliSum(int n, std::vector<PauliTerm> terms) : n_(n) {
  check_qubit_count(n);
  terms_.reserve(terms.size());
  for (auto& t : terms) add(std::move(t));
}

void PauliSum::add(PauliTerm term) {
  if (term.num_qubits() != n_) {
    throw std::invalid_argument("term acts on " + std::to_string(term.num_qubits()) +
                                " qubits, sum on " + std::to_string(n_));
  }
  if (term.coefficient().imag() != 0.0) hermitian_ = false;
  terms_.push_back(std::move(term));
}

PauliSum PauliSum::scaled(Complex factor) const {
  PauliSum out(n_);
  for (const auto& t : terms_) out.add(t.scaled(factor));
  return out;
}

PauliTerm parse_pauli_term(std::string_view body, int n, int line_no) {
  const auto toks = text::split_ws(body);
  if (toks.empty()) throw ParseError("empty term", line_no);
  const auto re = text::parse_real(toks[0]);
  if (!re) throw ParseError("bad coefficient '" + std::string(toks[0]) + "'", line_no);
  std::size_t pos = 1;
  double im = 0.0;
  if (pos < toks.size()) {
    if (const auto v = text::parse_real(toks[pos])) {
      im = *v;
      ++pos;
    }
  }
  if (pos == toks.size()) throw ParseError("term has no operator tokens", line_no);

  std::map<int, Pauli> factors;
  for (; pos < toks.size(); ++pos) {
    const auto tok = toks[pos];
    if (tok == "I") continue;
    const char head = tok.front();
    if (tok.size() < 2 || (head != 'X' && head != 'Y' && head != 'Z')) {
      throw ParseError("malformed token '" + std::string(tok) + "'", line_no);
    }
    const auto q = text::parse_int(tok.substr(1));
    if (!q || *q < 0) throw ParseError("malformed token '" + std::string(tok) + "'", line_no);
    if (*q >= n) {
      throw ParseError("qubit index " + std::to_string(*q) + " >= n=" + std::to_string(n),
                       line_no);
    }
    const int qi = static_cast<int>(*q);
    if (!factors.emplace(qi, static_cast<Pauli>(head)).second) {
      throw ParseError("duplicate qubit " + std::to_string(qi) + " in one term", line_no);
    }
  }
  return {{*re, im}, std::move(factors), n};
}

PauliSum parse_pauli_sum(std::string_view text, int n) {
  check_qubit_count(n);
  PauliSum sum(n);
  const auto all = text::lines(text);
  for (std::size_t li = 0; li < all.size(); ++li) {
    const auto body = text::strip_comment(all[li]);
    if (body.empty()) continue;
    sum.add(parse_pauli_term(body, n, static_cast<int>(li) + 1));
  }
  return sum;
}

std::string format_pauli_term(const PauliTerm& term) {
  std::string out = text::format_real(term.coefficient().real());
  if (term.coefficient().imag() != 0.0) {
    out += ' ';
    out += text::format_real(term.coefficient().imag());
  }
  if (term.factors().empty()) {
    out += " I";
    return out;
  }
  for (const auto& [q, p] : term.factors()) {
    out += ' ';
    out += static_cast<char>(p);
    out += std::to_string(q);
  }
  return out;
}

std::string format_pauli_sum(const PauliSum& sum) {
  std::string out;
  for (const auto& t : sum.terms()) {
    out += format_pauli_term(t);
    out += '\n';
  }
  return out;
}

RowEntry apply_term_row(const PauliTerm& term, BasisIndex x) {
  Complex value = term.coefficient() * minus_i_power(term.y_count());
  if (std::popcount(x & term.phase_mask()) & 1) value = -value;
  return {x ^ term.flip_mask(), value};
}

SparseRow apply_sum_row(const PauliSum& h, BasisIndex x, RowApplyStats* stats) {
  SparseRow entries;
  entries.reserve(h.size());
  for (const auto& t : h.terms()) entries.push_back(apply_term_row(t, x));
  if (stats) stats->terms_visited += h.size();
  return merge_row(std::move(entries));
}

SparseRow squared_sum_row(const PauliSum& a, BasisIndex x) {
  SparseRow entries;
  const auto outer = apply_sum_row(a, x);
  entries.reserve(outer.size() * a.size());
  for (const auto& [c1, v1] : outer) {
    for (const auto& [c2, v2] : apply_sum_row(a, c1)) entries.push_back({c2, v1 * v2});
  }
  return merge_row(std::move(entries));
}

Complex apply_to_state(const PauliSum& h, const AmplitudeFn& psi, BasisIndex x) {
  Complex acc{0.0, 0.0};
  for (const auto& [col, v] : apply_sum_row(h, x)) acc += v * psi(col);
  return acc;
}

Complex apply_squared_row(const PauliSum& a, const AmplitudeFn& psi, BasisIndex x) {
  Complex acc{0.0, 0.0};
  for (const auto& [col, v] : squared_sum_row(a, x)) acc += v * psi(col);
  return acc;
}

PauliSum embed_hermitian(const PauliSum& a) {
  const int n = a.num_qubits() + 1;
  PauliSum out(n);
  for (const auto& t : a.terms()) {
    std::map<int, Pauli> shifted;
    for (const auto& [q, p] : t.factors()) shifted.emplace(q + 1, p);
    const Complex c = t.coefficient();
    if (c.real() != 0.0) {
      auto f = shifted;
      f.emplace(0, Pauli::X);
      out.add(PauliTerm(c.real(), std::move(f), n));
    }
    if (c.imag() != 0.0) {
      auto f = shifted;
      f.emplace(0, Pauli::Y);
      out.add(PauliTerm(-c.imag(), std::move(f), n));
    }
  }
  return out;
}

MatrixXc to_dense(const PauliSum& h, int dense_limit) {
  const int n = h.num_qubits();
  check_dense_limit(n, dense_limit);
  const auto dim = static_cast<Eigen::Index>(dimension(n));
  MatrixXc out = MatrixXc::Zero(dim, dim);
  for (const auto& t : h.terms()) {
    MatrixXc m = pauli_matrix(factor_at(t, 0));
    for (int q = 1; q < n; ++q) {
      MatrixXc next = Eigen::kroneckerProduct(m, pauli_matrix(factor_at(t, q))).eval();
      m.swap(next);
    }
    out += t.coefficient() * m;
  }
  return out;
}

Eigen::SparseMatrix<Complex, Eigen::RowMajor> to_sparse(const PauliSum& h, int dense_limit) {
  using Sparse = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;
  const int n = h.num_qubits();
  check_dense_limit(n, dense_limit);
  const auto dim = static_cast<Eigen::Index>(dimension(n));
  Sparse out(dim, dim);
  for (const auto& t : h.terms()) {
    Sparse m = pauli_matrix(factor_at(t, 0)).sparseView();
    for (int q = 1; q < n; ++q) {
      Sparse f = pauli_matrix(factor_at(t, q)).sparseView();
      Sparse next = Eigen::kroneckerProduct(m, f);
      m.swap(next);
    }
    out += t.coefficient() * m;
  }
  out.prune(Complex{0.0, 0.0}, 0.0);
  out.makeCompressed();
  return out;
}

}  // namespace vnls
