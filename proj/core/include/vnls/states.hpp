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
#include <memory>
#include <string>
#include <string_view>

#include "vnls/types.hpp"

namespace vnls {

/// Amplitude oracle psi_theta(x) with analytic log-derivatives.
///
/// Parameters are exposed as a flat real vector. log_grad(x)[k] is the
/// complex derivative of log psi(x) with respect to real parameter k, so for
/// a complex weight w = u + i v the entries for u and v are O and i*O.
class Wavefunction {
 public:
  virtual ~Wavefunction() = default;

  virtual int num_qubits() const = 0;

  /// log psi(x); the imaginary part is the phase. A vanishing amplitude is
  /// reported as -inf real part with zero phase.
  virtual Complex log_amp(BasisIndex x) const = 0;

  virtual VectorXc log_grad(BasisIndex x) const = 0;

  virtual Eigen::Index param_count() const = 0;
  virtual Eigen::VectorXd parameters() const = 0;
  virtual void set_parameters(const Eigen::VectorXd& theta) = 0;

  virtual std::unique_ptr<Wavefunction> clone() const = 0;

  Complex amplitude(BasisIndex x) const { return std::exp(log_amp(x)); }
};

enum class RbmFlavor { Real, Complex };

std::string_view to_string(RbmFlavor flavor);
RbmFlavor parse_rbm_flavor(std::string_view s);

// Hidden-unit count ceil(alpha * n).
int hidden_units(int n, double alpha);

inline constexpr double kDefaultHiddenDensity = 2.0;
inline constexpr double kDefaultSigmaReal = 0.01;
inline constexpr double kDefaultSigmaComplex = 0.05;

struct RbmParams {
  RbmFlavor flavor = RbmFlavor::Real;
  VectorXc visible_bias;  // a, length n
  VectorXc hidden_bias;   // c, length m
  MatrixXc weights;       // W, m x n

  int n() const { return static_cast<int>(visible_bias.size()); }
  int m() const { return static_cast<int>(hidden_bias.size()); }

  static RbmParams zeros(int n, int m, RbmFlavor flavor);
};

// log(2 cosh z) without overflow.
double log_2cosh(double z);
Complex log_2cosh(Complex z);

// Visible spin of qubit i: +1 when its bit is 0, -1 otherwise.
inline double spin(BasisIndex x, int n, int i) { return qubit_bit(x, n, i) ? -1.0 : 1.0; }

/// log psi(x) = sum_i a_i s_i + sum_j log(2 cosh(c_j + sum_i W_ji s_i)).
Complex rbm_log_amp(const RbmParams& p, BasisIndex x);

/// Derivatives of log psi with respect to (a, c, W) in holomorphic form,
/// flattened as [a_0..a_{n-1}, c_0..c_{m-1}, W_00, W_01, ..., W_{m-1,n-1}].
VectorXc rbm_log_grad(const RbmParams& p, BasisIndex x);

RbmParams init_gaussian(int n, int m, RbmFlavor flavor, double sigma, std::uint64_t seed);

class Rbm final : public Wavefunction {
 public:
  explicit Rbm(RbmParams params);

  int num_qubits() const override { return params_.n(); }
  Complex log_amp(BasisIndex x) const override;
  VectorXc log_grad(BasisIndex x) const override;
  Eigen::Index param_count() const override;
  Eigen::VectorXd parameters() const override;
  void set_parameters(const Eigen::VectorXd& theta) override;
  std::unique_ptr<Wavefunction> clone() const override;

  const RbmParams& params() const { return params_; }
  Eigen::Index raw_count() const;

 private:
  RbmParams params_;
};

/// Explicitly stored vector, used for b and for reference states.
/// As a Wavefunction its parameters are the real and imaginary parts of the
/// amplitudes, [Re psi_0 .. Re psi_{N-1}, Im psi_0 .. Im psi_{N-1}].
class DenseState final : public Wavefunction {
 public:
  DenseState(int n, VectorXc amplitudes);

  static DenseState ones(int n);

  int num_qubits() const override { return n_; }
  Complex log_amp(BasisIndex x) const override;
  VectorXc log_grad(BasisIndex x) const override;
  Eigen::Index param_count() const override { return 2 * amplitudes_.size(); }
  Eigen::VectorXd parameters() const override;
  void set_parameters(const Eigen::VectorXd& theta) override;
  std::unique_ptr<Wavefunction> clone() const override;

  const VectorXc& amplitudes() const { return amplitudes_; }
  Complex operator[](BasisIndex x) const { return amplitudes_[static_cast<Eigen::Index>(x)]; }

 private:
  int n_;
  VectorXc amplitudes_;
};

/// log b(x); throws ZeroAmplitudeError when b(x) == 0.
Complex dense_log_amp(const DenseState& s, BasisIndex x);

// All 2^n amplitudes of psi, normalized so the largest has modulus one.
VectorXc enumerate_amplitudes(const Wavefunction& psi, int dense_limit = kDefaultDenseLimit);

struct Checkpoint {
  RbmParams params;
  std::uint64_t seed = 0;
};

// Text checkpoint: header lines `flavor=`, `n=`, `m=`, `seed=`, `count=`,
// then one parameter per line (`re` or `re im`) in rbm_log_grad order.
std::string format_checkpoint(const Checkpoint& ckpt);
Checkpoint parse_checkpoint(std::string_view text);
void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace vnls
