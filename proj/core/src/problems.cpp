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

#include "vnls/problems.hpp"

#include <cmath>
#include <random>
#include <set>
#include <span>
#include <stdexcept>
#include <vector>

#include "vnls/sampling.hpp"
#include "vnls/text_io.hpp"

namespace vnls {

namespace {

// Files larger than this would not fit a dense b anyway.
constexpr int kMaxFileQubits = 30;

struct Header {
  std::optional<int> n;
  std::optional<double> kappa;
};

int parse_qubit_count(std::string_view val, int line_no) {
  const auto v = text::parse_int(val);
  if (!v || *v < 1 || *v > kMaxFileQubits) {
    throw ParseError("n must be an integer in [1, " + std::to_string(kMaxFileQubits) + "]",
                     line_no);
  }
  return static_cast<int>(*v);
}

// Returns true when `line` was a `key=value` header and records it.
bool read_header(std::string_view line, int line_no, Header& h, bool allow_kappa) {
  const auto eq = line.find('=');
  if (eq == std::string_view::npos) return false;
  const auto key = text::trim(line.substr(0, eq));
  const auto val = text::trim(line.substr(eq + 1));
  if (key == "n") {
    if (h.n) throw ParseError("duplicate n header", line_no);
    h.n = parse_qubit_count(val, line_no);
  } else if (key == "kappa" && allow_kappa) {
    const auto k = text::parse_real(val);
    if (!k || !std::isfinite(*k)) throw ParseError("bad kappa", line_no);
    h.kappa = *k;
  } else {
    throw ParseError("unknown header key '" + std::string(key) + "'", line_no);
  }
  return true;
}

Complex parse_value(std::span<const std::string_view> toks, int line_no) {
  if (toks.empty() || toks.size() > 2) throw ParseError("expected `re [im]`", line_no);
  const auto re = text::parse_real(toks[0]);
  const auto im = toks.size() == 2 ? text::parse_real(toks[1]) : std::optional<double>(0.0);
  if (!re || !im) throw ParseError("bad amplitude value", line_no);
  return {*re, *im};
}

void append_value(std::string& out, Complex v) {
  out += text::format_real(v.real());
  if (v.imag() != 0.0) {
    out += ' ';
    out += text::format_real(v.imag());
  }
  out += '\n';
}

DenseState make_state(int n, VectorXc amps, int line_no) {
  try {
    return {n, std::move(amps)};
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what(), line_no);
  }
}

}  // namespace

IsingCoefficients ising_coefficients(int n, double kappa) {
  if (!(kappa > 1.0)) throw std::invalid_argument("kappa must exceed 1");
  if (n < 2) throw std::invalid_argument("Ising problem needs n >= 2");
  const double nd = n;
  return {nd * (kappa + 1.0) / (kappa - 1.0), 2.0 * nd * kappa / (kappa - 1.0)};
}

LinearProblem ising_problem(int n, double kappa) {
  const auto [eta, zeta] = ising_coefficients(n, kappa);
  PauliSum a(n);
  for (int j = 0; j < n; ++j) a.add(PauliTerm(1.0 / zeta, {{j, Pauli::X}}, n));
  for (int j = 0; j + 1 < n; ++j) {
    a.add(PauliTerm(0.1 / zeta, {{j, Pauli::Z}, {j + 1, Pauli::Z}}, n));
  }
  a.add(PauliTerm::identity(eta / zeta, n));
  return {std::move(a), DenseState::ones(n), n, kappa};
}

LinearProblem random_pauli_problem(int n, int terms, std::uint64_t seed, double margin) {
  if (terms < 0) throw std::invalid_argument("term count must be non-negative");
  if (!(margin > 0.0)) throw std::invalid_argument("margin must be positive");
  std::mt19937_64 rng(seed);
  constexpr Pauli kinds[] = {Pauli::X, Pauli::Y, Pauli::Z};
  PauliSum a(n);
  double shift = margin;
  for (int t = 0; t < terms; ++t) {
    const int width = 1 + static_cast<int>(uniform_below(rng, std::min(n, 3)));
    std::map<int, Pauli> factors;
    while (static_cast<int>(factors.size()) < width) {
      const int q = static_cast<int>(uniform_below(rng, n));
      factors.emplace(q, kinds[uniform_below(rng, 3)]);
    }
    const double coef = 2.0 * uniform01(rng) - 1.0;
    shift += std::abs(coef);
    a.add(PauliTerm(coef, std::move(factors), n));
  }
  a.add(PauliTerm::identity(shift, n));

  const auto dim = static_cast<Eigen::Index>(dimension(n));
  VectorXc b = VectorXc::Zero(dim);
  for (Eigen::Index x = 0; x < dim; ++x) {
    if (uniform01(rng) < 0.5) continue;
    const double re = 2.0 * uniform01(rng) - 1.0;
    const double im = 2.0 * uniform01(rng) - 1.0;
    b[x] = {re, im};
  }
  if (b.cwiseAbs().maxCoeff() == 0.0) b[static_cast<Eigen::Index>(uniform_below(rng, dim))] = 1.0;
  return {std::move(a), DenseState(n, std::move(b)), n, std::nullopt};
}

std::string format_problem(const LinearProblem& problem) {
  std::string out = "n=" + std::to_string(problem.n) + '\n';
  if (problem.kappa) out += "kappa=" + text::format_real(*problem.kappa) + '\n';
  out += format_pauli_sum(problem.a);
  const auto& amps = problem.b.amplitudes();
  const auto nnz = (amps.array() != Complex{0.0, 0.0}).count();
  if (2 * nnz <= amps.size()) {
    out += "b sparse\n";
    for (Eigen::Index x = 0; x < amps.size(); ++x) {
      if (amps[x] == Complex{0.0, 0.0}) continue;
      out += std::to_string(x);
      out += ' ';
      append_value(out, amps[x]);
    }
  } else {
    out += "b dense\n";
    for (Eigen::Index x = 0; x < amps.size(); ++x) append_value(out, amps[x]);
  }
  return out;
}

LinearProblem parse_problem(std::string_view body) {
  enum class Section { Operator, Dense, Sparse };
  Header h;
  Section section = Section::Operator;
  std::optional<PauliSum> a;
  VectorXc amps;
  Eigen::Index dense_rows = 0;
  std::set<BasisIndex> seen;
  int b_line = 0;
  int last_line = 0;

  const auto all = text::lines(body);
  for (std::size_t li = 0; li < all.size(); ++li) {
    const int line_no = static_cast<int>(li) + 1;
    const auto line = text::strip_comment(all[li]);
    if (line.empty()) continue;
    last_line = line_no;
    const auto toks = text::split_ws(line);

    if (section == Section::Operator) {
      if (!a && read_header(line, line_no, h, true)) continue;
      if (!h.n) throw ParseError("missing n= header before operator terms", line_no);
      if (!a) a.emplace(*h.n);
      if (toks[0] == "b") {
        if (toks.size() != 2 || (toks[1] != "dense" && toks[1] != "sparse")) {
          throw ParseError("expected `b dense` or `b sparse`", line_no);
        }
        section = toks[1] == "dense" ? Section::Dense : Section::Sparse;
        amps = VectorXc::Zero(static_cast<Eigen::Index>(dimension(*h.n)));
        b_line = line_no;
        continue;
      }
      PauliTerm term = parse_pauli_term(line, *h.n, line_no);
      if (term.coefficient().imag() != 0.0) {
        throw ParseError("problem operators must have real coefficients", line_no);
      }
      a->add(std::move(term));
    } else if (section == Section::Dense) {
      if (dense_rows == amps.size()) throw ParseError("more than 2^n dense values", line_no);
      amps[dense_rows++] = parse_value(toks, line_no);
    } else {
      if (toks.size() < 2) throw ParseError("expected `index re [im]`", line_no);
      const auto x = text::parse_uint(toks[0]);
      if (!x || *x >= dimension(*h.n)) throw ParseError("bad basis index", line_no);
      if (!seen.insert(*x).second) throw ParseError("duplicate basis index", line_no);
      amps[static_cast<Eigen::Index>(*x)] =
          parse_value(std::span(toks).subspan(1), line_no);
    }
  }
  if (!h.n) throw ParseError("missing n= header");
  if (section == Section::Operator) throw ParseError("missing b section", last_line);
  if (section == Section::Dense && dense_rows != amps.size()) {
    throw ParseError("b dense needs " + std::to_string(amps.size()) + " values, got " +
                         std::to_string(dense_rows),
                     last_line);
  }
  return {std::move(*a), make_state(*h.n, std::move(amps), b_line), *h.n, h.kappa};
}

void save_problem(const LinearProblem& problem, const std::string& path) {
  text::write_file(path, format_problem(problem));
}

LinearProblem load_problem(const std::string& path) { return parse_problem(text::read_file(path)); }

PauliSum parse_operator_file(std::string_view body) {
  Header h;
  std::optional<PauliSum> sum;
  const auto all = text::lines(body);
  for (std::size_t li = 0; li < all.size(); ++li) {
    const int line_no = static_cast<int>(li) + 1;
    const auto line = text::strip_comment(all[li]);
    if (line.empty()) continue;
    if (!sum && read_header(line, line_no, h, false)) continue;
    if (!h.n) throw ParseError("missing n= header before operator terms", line_no);
    if (!sum) sum.emplace(*h.n);
    sum->add(parse_pauli_term(line, *h.n, line_no));
  }
  if (!h.n) throw ParseError("missing n= header");
  if (!sum) sum.emplace(*h.n);
  return std::move(*sum);
}

PauliSum load_operator_file(const std::string& path) {
  return parse_operator_file(text::read_file(path));
}

DenseState parse_state_file(std::string_view body) {
  Header h;
  VectorXc amps;
  Eigen::Index rows = 0;
  int last_line = 0;
  const auto all = text::lines(body);
  for (std::size_t li = 0; li < all.size(); ++li) {
    const int line_no = static_cast<int>(li) + 1;
    const auto line = text::strip_comment(all[li]);
    if (line.empty()) continue;
    last_line = line_no;
    if (!h.n && read_header(line, line_no, h, false)) {
      amps = VectorXc::Zero(static_cast<Eigen::Index>(dimension(*h.n)));
      continue;
    }
    if (!h.n) throw ParseError("missing n= header before amplitudes", line_no);
    if (rows == amps.size()) throw ParseError("more than 2^n amplitudes", line_no);
    amps[rows++] = parse_value(text::split_ws(line), line_no);
  }
  if (!h.n) throw ParseError("missing n= header");
  if (rows != amps.size()) {
    throw ParseError("expected " + std::to_string(amps.size()) + " amplitudes, got " +
                         std::to_string(rows),
                     last_line);
  }
  return make_state(*h.n, std::move(amps), last_line);
}

DenseState load_state_file(const std::string& path) { return parse_state_file(text::read_file(path)); }

}  // namespace vnls
