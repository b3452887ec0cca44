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

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace vnls {

using Real = double;
using Complex = std::complex<double>;

using VectorXc = Eigen::VectorXcd;
using MatrixXc = Eigen::MatrixXcd;

// Standard basis index x in [0, 2^n). Qubit 0 is the most significant bit,
// which matches the Kronecker order A_0 (x) A_1 (x) ... (x) A_{n-1}.
using BasisIndex = std::uint64_t;

inline constexpr int kMaxQubits = 62;

// Default cap on qubit counts for anything that materializes 2^n vectors.
inline constexpr int kDefaultDenseLimit = 14;

inline constexpr BasisIndex dimension(int n) { return BasisIndex{1} << n; }

// Bit mask of qubit q in an n-qubit basis index.
inline constexpr BasisIndex qubit_mask(int n, int q) {
  return BasisIndex{1} << (n - 1 - q);
}

inline constexpr int qubit_bit(BasisIndex x, int n, int q) {
  return static_cast<int>((x >> (n - 1 - q)) & 1U);
}

// Malformed text input (operator, problem, checkpoint files).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

// A request exceeds what the dense reference can materialize.
class CapabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Evaluation hit a point where the amplitude or a divisor vanishes.
class ZeroAmplitudeError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A file could not be read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Linear solve failed (singular or did not converge).
class SolveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace vnls
