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

#include "vnls/states.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "vnls/text_io.hpp"

namespace vnls {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

Eigen::VectorXd spins(BasisIndex x, int n) {
  Eigen::VectorXd s(n);
  for (int i = 0; i < n; ++i) s[i] = spin(x, n, i);
  return s;
}

}  // namespace

std::string_view to_string(RbmFlavor flavor) {
  return flavor == RbmFlavor::Real ? "real" : "complex";
}

RbmFlavor parse_rbm_flavor(std::string_view s) {
  if (s == "real") return RbmFlavor::Real;
  if (s == "complex") return RbmFlavor::Complex;
  throw std::invalid_argument("unknown RBM flavor '" + std::string(s) + "'");
}

int hidden_units(int n, double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("hidden-unit density must be positive");
  return static_cast<int>(std::ceil(alpha * n - 1e-12));
}

RbmParams RbmParams::zeros(int n, int m, RbmFlavor flavor) {
  if (n < 1 || m < 1) throw std::invalid_argument("RBM needs n >= 1 and m >= 1");
  return {flavor, VectorXc::Zero(n), VectorXc::Zero(m), MatrixXc::Zero(m, n)};
}

double log_2cosh(double z) {
  const double a = std::abs(z);
  return a + std::log1p(std::exp(-2.0 * a));
}

Complex log_2cosh(Complex z) {
  // cosh is even; fold onto Re z >= 0 so that |exp(-2z)| <= 1.
  if (z.real() < 0.0) z = -z;
  return z + std::log(1.0 + std::exp(-2.0 * z));
}

Complex rbm_log_amp(const RbmParams& p, BasisIndex x) {
  const int n = p.n();
  const Eigen::VectorXd s = spins(x, n);
  if (p.flavor == RbmFlavor::Real) {
    double acc = p.visible_bias.real().dot(s);
    const Eigen::VectorXd theta = p.hidden_bias.real() + p.weights.real() * s;
    for (Eigen::Index j = 0; j < theta.size(); ++j) acc += log_2cosh(theta[j]);
    return {acc, 0.0};
  }
  Complex acc = p.visible_bias.transpose() * s.cast<Complex>();
  const VectorXc theta = p.hidden_bias + p.weights * s.cast<Complex>();
  for (Eigen::Index j = 0; j < theta.size(); ++j) acc += log_2cosh(theta[j]);
  return acc;
}

VectorXc rbm_log_grad(const RbmParams& p, BasisIndex x) {
  const int n = p.n();
  const int m = p.m();
  const Eigen::VectorXd s = spins(x, n);
  VectorXc g(n + m + m * n);
  g.head(n) = s.cast<Complex>();
  VectorXc t(m);
  if (p.flavor == RbmFlavor::Real) {
    const Eigen::VectorXd theta = p.hidden_bias.real() + p.weights.real() * s;
    t = theta.array().tanh().matrix().cast<Complex>();
  } else {
    const VectorXc theta = p.hidden_bias + p.weights * s.cast<Complex>();
    for (int j = 0; j < m; ++j) t[j] = std::tanh(theta[j]);
  }
  g.segment(n, m) = t;
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < n; ++i) g[n + m + j * n + i] = t[j] * s[i];
  }
  return g;
}

RbmParams init_gaussian(int n, int m, RbmFlavor flavor, double sigma, std::uint64_t seed) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("init sigma must be positive and finite");
  }
  RbmParams p = RbmParams::zeros(n, m, flavor);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, sigma);
  auto draw = [&]() -> Complex {
    const double re = normal(rng);
    const double im = flavor == RbmFlavor::Complex ? normal(rng) : 0.0;
    return {re, im};
  };
  for (int i = 0; i < n; ++i) p.visible_bias[i] = draw();
  for (int j = 0; j < m; ++j) p.hidden_bias[j] = draw();
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < n; ++i) p.weights(j, i) = draw();
  }
  return p;
}

Rbm::Rbm(RbmParams params) : params_(std::move(params)) {
  const auto n = params_.visible_bias.size();
  const auto m = params_.hidden_bias.size();
  if (n < 1 || m < 1 || params_.weights.rows() != m || params_.weights.cols() != n) {
    throw std::invalid_argument("inconsistent RBM parameter shapes");
  }
  if (!params_.visible_bias.allFinite() || !params_.hidden_bias.allFinite() ||
      !params_.weights.allFinite()) {
    throw std::invalid_argument("RBM parameters must be finite");
  }
  if (params_.flavor == RbmFlavor::Real) {
    params_.visible_bias = params_.visible_bias.real().cast<Complex>();
    params_.hidden_bias = params_.hidden_bias.real().cast<Complex>();
    params_.weights = params_.weights.real().cast<Complex>();
  }
}

Complex Rbm::log_amp(BasisIndex x) const { return rbm_log_amp(params_, x); }

Eigen::Index Rbm::raw_count() const {
  return params_.n() + params_.m() + static_cast<Eigen::Index>(params_.m()) * params_.n();
}

Eigen::Index Rbm::param_count() const {
  return params_.flavor == RbmFlavor::Real ? raw_count() : 2 * raw_count();
}

VectorXc Rbm::log_grad(BasisIndex x) const {
  VectorXc o = rbm_log_grad(params_, x);
  if (params_.flavor == RbmFlavor::Real) return o;
  VectorXc g(2 * o.size());
  g.head(o.size()) = o;
  g.tail(o.size()) = Complex{0.0, 1.0} * o;
  return g;
}

Eigen::VectorXd Rbm::parameters() const {
  const int n = params_.n();
  const int m = params_.m();
  const Eigen::Index raw = raw_count();
  VectorXc flat(raw);
  flat.head(n) = params_.visible_bias;
  flat.segment(n, m) = params_.hidden_bias;
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < n; ++i) flat[n + m + j * n + i] = params_.weights(j, i);
  }
  if (params_.flavor == RbmFlavor::Real) return flat.real();
  Eigen::VectorXd out(2 * raw);
  out.head(raw) = flat.real();
  out.tail(raw) = flat.imag();
  return out;
}

void Rbm::set_parameters(const Eigen::VectorXd& theta) {
  if (theta.size() != param_count()) {
    throw std::invalid_argument("parameter vector has wrong length");
  }
  const int n = params_.n();
  const int m = params_.m();
  const Eigen::Index raw = raw_count();
  VectorXc flat(raw);
  if (params_.flavor == RbmFlavor::Real) {
    flat = theta.cast<Complex>();
  } else {
    for (Eigen::Index k = 0; k < raw; ++k) flat[k] = {theta[k], theta[raw + k]};
  }
  params_.visible_bias = flat.head(n);
  params_.hidden_bias = flat.segment(n, m);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < n; ++i) params_.weights(j, i) = flat[n + m + j * n + i];
  }
}

std::unique_ptr<Wavefunction> Rbm::clone() const { return std::make_unique<Rbm>(*this); }

DenseState::DenseState(int n, VectorXc amplitudes) : n_(n), amplitudes_(std::move(amplitudes)) {
  if (n < 1 || n > kMaxQubits) throw std::invalid_argument("bad qubit count for dense state");
  if (static_cast<BasisIndex>(amplitudes_.size()) != dimension(n)) {
    throw std::invalid_argument("dense state needs 2^n amplitudes");
  }
  if (!amplitudes_.allFinite()) throw std::invalid_argument("dense state amplitudes must be finite");
  if (amplitudes_.cwiseAbs().maxCoeff() == 0.0) {
    throw std::invalid_argument("dense state needs at least one nonzero amplitude");
  }
}

DenseState DenseState::ones(int n) {
  return {n, VectorXc::Ones(static_cast<Eigen::Index>(dimension(n)))};
}

Complex DenseState::log_amp(BasisIndex x) const {
  const Complex a = (*this)[x];
  if (a == Complex{0.0, 0.0}) return {kNegInf, 0.0};
  return std::log(a);
}

VectorXc DenseState::log_grad(BasisIndex x) const {
  const Complex a = (*this)[x];
  if (a == Complex{0.0, 0.0}) throw ZeroAmplitudeError("log_grad at a zero amplitude");
  const Eigen::Index dim = amplitudes_.size();
  VectorXc g = VectorXc::Zero(2 * dim);
  const auto i = static_cast<Eigen::Index>(x);
  g[i] = 1.0 / a;
  g[dim + i] = Complex{0.0, 1.0} / a;
  return g;
}

Eigen::VectorXd DenseState::parameters() const {
  const Eigen::Index dim = amplitudes_.size();
  Eigen::VectorXd out(2 * dim);
  out.head(dim) = amplitudes_.real();
  out.tail(dim) = amplitudes_.imag();
  return out;
}

void DenseState::set_parameters(const Eigen::VectorXd& theta) {
  const Eigen::Index dim = amplitudes_.size();
  if (theta.size() != 2 * dim) throw std::invalid_argument("parameter vector has wrong length");
  for (Eigen::Index i = 0; i < dim; ++i) amplitudes_[i] = {theta[i], theta[dim + i]};
}

std::unique_ptr<Wavefunction> DenseState::clone() const {
  return std::make_unique<DenseState>(*this);
}

Complex dense_log_amp(const DenseState& s, BasisIndex x) {
  if (x >= dimension(s.num_qubits())) throw std::out_of_range("basis index out of range");
  if (s[x] == Complex{0.0, 0.0}) {
    throw ZeroAmplitudeError("zero amplitude at x=" + std::to_string(x));
  }
  return std::log(s[x]);
}

VectorXc enumerate_amplitudes(const Wavefunction& psi, int dense_limit) {
  const int n = psi.num_qubits();
  if (n > dense_limit) {
    throw CapabilityError("n=" + std::to_string(n) + " exceeds the dense limit " +
                          std::to_string(dense_limit));
  }
  const auto dim = static_cast<Eigen::Index>(dimension(n));
  VectorXc logs(dim);
  double top = kNegInf;
  for (Eigen::Index x = 0; x < dim; ++x) {
    logs[x] = psi.log_amp(static_cast<BasisIndex>(x));
    top = std::max(top, logs[x].real());
  }
  if (!std::isfinite(top)) throw ZeroAmplitudeError("wavefunction vanishes everywhere");
  VectorXc out(dim);
  for (Eigen::Index x = 0; x < dim; ++x) {
    out[x] = std::isinf(logs[x].real()) ? Complex{0.0, 0.0}
                                        : std::exp(logs[x] - Complex{top, 0.0});
  }
  return out;
}

std::string format_checkpoint(const Checkpoint& ckpt) {
  const Rbm rbm(ckpt.params);
  const VectorXc raw = [&] {
    const Eigen::VectorXd flat = rbm.parameters();
    const Eigen::Index count = rbm.raw_count();
    VectorXc v(count);
    for (Eigen::Index k = 0; k < count; ++k) {
      v[k] = ckpt.params.flavor == RbmFlavor::Real ? Complex{flat[k], 0.0}
                                                   : Complex{flat[k], flat[count + k]};
    }
    return v;
  }();
  std::string out = "# vnls rbm checkpoint\n";
  out += "flavor=" + std::string(to_string(ckpt.params.flavor)) + "\n";
  out += "n=" + std::to_string(ckpt.params.n()) + "\n";
  out += "m=" + std::to_string(ckpt.params.m()) + "\n";
  out += "seed=" + std::to_string(ckpt.seed) + "\n";
  out += "count=" + std::to_string(raw.size()) + "\n";
  for (Eigen::Index k = 0; k < raw.size(); ++k) {
    out += text::format_real(raw[k].real());
    if (ckpt.params.flavor == RbmFlavor::Complex) {
      out += ' ';
      out += text::format_real(raw[k].imag());
    }
    out += '\n';
  }
  return out;
}

Checkpoint parse_checkpoint(std::string_view body) {
  std::optional<RbmFlavor> flavor;
  std::optional<std::int64_t> n, m, count;
  std::optional<std::uint64_t> seed;
  std::vector<Complex> values;
  const auto all = text::lines(body);
  for (std::size_t li = 0; li < all.size(); ++li) {
    const int line_no = static_cast<int>(li) + 1;
    const auto line = text::strip_comment(all[li]);
    if (line.empty()) continue;
    if (const auto eq = line.find('='); eq != std::string_view::npos) {
      const auto key = text::trim(line.substr(0, eq));
      const auto val = text::trim(line.substr(eq + 1));
      if (key == "flavor") {
        try {
          flavor = parse_rbm_flavor(val);
        } catch (const std::invalid_argument& e) {
          throw ParseError(e.what(), line_no);
        }
      } else if (key == "n") {
        n = text::parse_int(val);
      } else if (key == "m") {
        m = text::parse_int(val);
      } else if (key == "count") {
        count = text::parse_int(val);
      } else if (key == "seed") {
        seed = text::parse_uint(val);
        if (!seed) throw ParseError("bad seed", line_no);
      } else {
        throw ParseError("unknown header key '" + std::string(key) + "'", line_no);
      }
      continue;
    }
    const auto toks = text::split_ws(line);
    const auto re = text::parse_real(toks[0]);
    std::optional<double> im = 0.0;
    if (toks.size() == 2) im = text::parse_real(toks[1]);
    if (!re || !im || toks.size() > 2) throw ParseError("bad parameter value", line_no);
    values.emplace_back(*re, *im);
  }
  if (!flavor || !n || !m || !count || !seed) throw ParseError("checkpoint header incomplete");
  if (*n < 1 || *m < 1) throw ParseError("checkpoint has non-positive n or m");
  if (static_cast<std::int64_t>(values.size()) != *count || *count != *n + *m + *m * *n) {
    throw ParseError("checkpoint parameter count mismatch");
  }
  RbmParams p = RbmParams::zeros(static_cast<int>(*n), static_cast<int>(*m), *flavor);
  const int ni = p.n();
  const int mi = p.m();
  for (int i = 0; i < ni; ++i) p.visible_bias[i] = values[i];
  for (int j = 0; j < mi; ++j) p.hidden_bias[j] = values[ni + j];
  for (int j = 0; j < mi; ++j) {
    for (int i = 0; i < ni; ++i) p.weights(j, i) = values[ni + mi + j * ni + i];
  }
  return {std::move(p), *seed};
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  text::write_file(path, format_checkpoint(ckpt));
}

Checkpoint load_checkpoint(const std::string& path) { return parse_checkpoint(text::read_file(path)); }

}  // namespace vnls
