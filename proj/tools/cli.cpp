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

#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <utility>

#include <CLI11.hpp>

#include "vnls/oracle.hpp"
#include "vnls/problems.hpp"
#include "vnls/text_io.hpp"

namespace vnls::cli {

namespace {

// Seed stream for the initial parameters, disjoint from the per-epoch streams.
constexpr std::uint64_t kInitStream = ~std::uint64_t{0};

// Failure of a configuration check; maps to kExitConfig.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TrainOptions {
  std::vector<double> ising;
  std::string problem_path;
  std::string operator_path;
  std::string model = "rbm-real";
  double alpha = kDefaultHiddenDensity;
  double init_sigma = 0.0;  // 0 selects the flavor default
  std::string init_state;
  std::string init_checkpoint;

  double learning_rate = kDefaultLearningRate;
  double diag_shift = kDefaultDiagShift;
  double epsilon = kDefaultEpsilon;
  int epochs = 1000;
  int batch_size = 1024;
  int chains = kDefaultChains;
  int burn_in = -1;  // -1 selects the default
  int thin = -1;
  std::uint64_t seed = 0;

  int oracle_every = 0;
  int dense_limit = kDefaultDenseLimit;
  std::string output;
  std::string save_checkpoint;
  bool timing = false;
};

void add_model_options(CLI::App& cmd, TrainOptions& o) {
  cmd.add_option("--model", o.model, "rbm-real, rbm-complex or dense")
      ->check(CLI::IsMember({"rbm-real", "rbm-complex", "dense"}))
      ->capture_default_str();
  cmd.add_option("--alpha", o.alpha, "hidden-unit density")->capture_default_str();
  cmd.add_option("--init-sigma", o.init_sigma,
                 "std. dev. of the initial parameters (default 0.01 real, 0.05 complex)");
  cmd.add_option("--init-state", o.init_state, "initial amplitudes for --model dense");
  cmd.add_option("--init-checkpoint", o.init_checkpoint, "initial RBM parameters");
  cmd.add_option("--lr", o.learning_rate, "learning rate")->capture_default_str();
  cmd.add_option("--diag-shift", o.diag_shift, "relative Fisher diagonal shift")
      ->capture_default_str();
  cmd.add_option("--epsilon", o.epsilon, "absolute Fisher regularizer")->capture_default_str();
  cmd.add_option("--epochs", o.epochs)->capture_default_str();
  cmd.add_option("--batch-size", o.batch_size, "samples per epoch")->capture_default_str();
  cmd.add_option("--chains", o.chains, "Markov chains per batch")->capture_default_str();
  cmd.add_option("--burn-in", o.burn_in, "burn-in flips per chain (default 10 n^2)");
  cmd.add_option("--thin", o.thin, "flips between kept samples (default n)");
  cmd.add_option("--seed", o.seed)->capture_default_str();
  cmd.add_option("--oracle-every", o.oracle_every, "fidelity interval in epochs, 0 = off")
      ->capture_default_str();
  cmd.add_option("--dense-limit", o.dense_limit)->capture_default_str();
  cmd.add_option("-o,--output", o.output, "CSV log path (default stdout)");
  cmd.add_option("--save-checkpoint", o.save_checkpoint, "write final RBM parameters");
  cmd.add_flag("--timing", o.timing, "fill the wall_ms column");
}

void add_problem_options(CLI::App& cmd, std::vector<double>& ising, std::string& path) {
  auto* is = cmd.add_option("--ising", ising, "Ising problem: N KAPPA")->expected(2);
  auto* pf = cmd.add_option("--problem", path, "problem file");
  is->excludes(pf);
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

void validate(const TrainOptions& o) {
  require(o.alpha > 0.0, "--alpha must be positive");
  require(o.init_sigma >= 0.0, "--init-sigma must be positive");
  require(o.learning_rate > 0.0, "--lr must be positive");
  require(o.diag_shift >= 0.0, "--diag-shift must be non-negative");
  require(o.epsilon >= 0.0, "--epsilon must be non-negative");
  require(o.epochs >= 0, "--epochs must be non-negative");
  require(o.batch_size > 0, "--batch-size must be positive");
  require(o.chains > 0, "--chains must be positive");
  require(o.chains <= o.batch_size, "--chains cannot exceed --batch-size");
  require(o.burn_in >= -1 && o.thin >= -1 && o.thin != 0, "--burn-in/--thin out of range");
  require(o.oracle_every >= 0, "--oracle-every must be non-negative");
  require(o.dense_limit >= 1 && o.dense_limit <= kDefaultDenseLimit,
          "--dense-limit must be in [1, " + std::to_string(kDefaultDenseLimit) + "]");
  require(o.init_state.empty() || o.model == "dense", "--init-state needs --model dense");
  require(o.init_checkpoint.empty() || o.model != "dense",
          "--init-checkpoint needs an RBM model");
  require(o.save_checkpoint.empty() || o.model != "dense",
          "--save-checkpoint needs an RBM model");
}

void check_capability(int n, int limit, const char* what) {
  if (n > limit) {
    throw CapabilityError(std::string(what) + " needs n <= " + std::to_string(limit) +
                          ", got n=" + std::to_string(n));
  }
}

LinearProblem make_problem(const std::vector<double>& ising, const std::string& path) {
  if (!ising.empty()) {
    const double n = ising[0];
    require(n == std::floor(n) && n >= 2 && n <= kMaxQubits, "--ising N must be an integer >= 2");
    require(ising[1] > 1.0, "--ising KAPPA must exceed 1");
    return ising_problem(static_cast<int>(n), ising[1]);
  }
  require(!path.empty(), "one of --ising or --problem is required");
  return load_problem(path);
}

std::unique_ptr<Wavefunction> make_model(const TrainOptions& o, int n) {
  if (o.model == "dense") {
    check_capability(n, o.dense_limit, "--model dense");
    if (o.init_state.empty()) return std::make_unique<DenseState>(DenseState::ones(n));
    DenseState s = load_state_file(o.init_state);
    require(s.num_qubits() == n, "--init-state has the wrong qubit count");
    return std::make_unique<DenseState>(std::move(s));
  }
  const RbmFlavor flavor = o.model == "rbm-real" ? RbmFlavor::Real : RbmFlavor::Complex;
  if (!o.init_checkpoint.empty()) {
    Checkpoint ck = load_checkpoint(o.init_checkpoint);
    require(ck.params.n() == n, "--init-checkpoint has the wrong qubit count");
    require(ck.params.flavor == flavor, "--init-checkpoint flavor differs from --model");
    return std::make_unique<Rbm>(std::move(ck.params));
  }
  const double sigma = o.init_sigma > 0.0 ? o.init_sigma
                       : flavor == RbmFlavor::Real ? kDefaultSigmaReal
                                                   : kDefaultSigmaComplex;
  return std::make_unique<Rbm>(
      init_gaussian(n, hidden_units(n, o.alpha), flavor, sigma, derive_seed(o.seed, kInitStream)));
}

TrainConfig make_train_config(const TrainOptions& o) {
  TrainConfig c;
  c.epochs = o.epochs;
  c.batch_size = static_cast<std::size_t>(o.batch_size);
  c.chains = o.chains;
  if (o.burn_in >= 0) c.burn_in = static_cast<std::size_t>(o.burn_in);
  if (o.thin > 0) c.thin = static_cast<std::size_t>(o.thin);
  c.seed = o.seed;
  c.learning_rate = o.learning_rate;
  c.diag_shift = o.diag_shift;
  c.epsilon = o.epsilon;
  c.record_timing = o.timing;
  return c;
}

// CSV sink: a file when a path is given, otherwise `fallback`.
class CsvSink {
 public:
  CsvSink(const std::string& path, std::ostream& fallback) {
    if (path.empty()) {
      stream_ = &fallback;
      return;
    }
    file_.open(path, std::ios::binary | std::ios::trunc);
    if (!file_) throw IoError("cannot open output file " + path);
    stream_ = &file_;
  }
  std::ostream& stream() { return *stream_; }
  bool to_file() const { return file_.is_open(); }

 private:
  std::ofstream file_;
  std::ostream* stream_ = nullptr;
};

struct RunSummary {
  int epochs = 0;
  std::optional<EpochRecord> last;
  int sr_fallbacks = 0;
  int hermiticity_warnings = 0;
};

std::string summary_line(std::string_view command, int n, const RunSummary& s) {
  std::string line(command);
  line += " n=" + std::to_string(n) + " epochs=" + std::to_string(s.epochs);
  if (s.last) {
    line += " loss=" + text::format_real(s.last->loss);
    line += " loss_var=" + text::format_real(s.last->loss_var);
    if (s.last->fidelity) line += " fidelity=" + text::format_real(*s.last->fidelity);
  }
  line += " sr_fallbacks=" + std::to_string(s.sr_fallbacks);
  return line;
}

// Runs one training job, streaming CSV rows as epochs finish.
template <typename Train>
RunSummary run_training(const TrainOptions& o, std::ostream& csv,
                        std::optional<VectorXc> reference, Train train) {
  TrainConfig config = make_train_config(o);
  if (o.oracle_every > 0) {
    config.monitor_every = o.oracle_every;
    config.fidelity_monitor = [ref = std::move(*reference), limit = o.dense_limit](
                                  const Wavefunction& w) {
      return fidelity(enumerate_amplitudes(w, limit), ref);
    };
  }
  RunSummary summary;
  csv << csv_header() << '\n';
  config.on_epoch = [&](const EpochRecord& rec) {
    csv << csv_row(rec) << '\n';
    ++summary.epochs;
    summary.last = rec;
    summary.sr_fallbacks += rec.sr_fallback ? 1 : 0;
    summary.hermiticity_warnings += rec.hermiticity_warning ? 1 : 0;
  };
  train(config);
  csv.flush();
  if (!csv) throw std::runtime_error("failed writing the CSV log");
  return summary;
}

void finish_run(const TrainOptions& o, const Wavefunction& psi, const RunSummary& summary,
                std::string_view command, bool csv_to_file, std::ostream& out, std::ostream& err) {
  if (!o.save_checkpoint.empty()) {
    const auto& rbm = dynamic_cast<const Rbm&>(psi);
    save_checkpoint({rbm.params(), o.seed}, o.save_checkpoint);
  }
  if (summary.hermiticity_warnings > 0) {
    err << "warning: |Im loss| > 1e-6 |Re loss| in " << summary.hermiticity_warnings << " of "
        << summary.epochs << " epochs\n";
  }
  (csv_to_file ? out : err) << summary_line(command, psi.num_qubits(), summary) << '\n';
}

int cmd_solve(const TrainOptions& o, const LinearProblem& problem, std::ostream& out,
              std::ostream& err) {
  validate(o);
  if (o.oracle_every > 0) check_capability(problem.n, o.dense_limit, "--oracle-every");
  auto psi = make_model(o, problem.n);
  std::optional<VectorXc> reference;
  if (o.oracle_every > 0) reference = exact_solve(problem.a, problem.b, o.dense_limit);
  CsvSink sink(o.output, out);
  const RunSummary summary =
      run_training(o, sink.stream(), std::move(reference), [&](const TrainConfig& c) {
        train_vnls(problem.a, problem.b, *psi, c);
      });
  finish_run(o, *psi, summary, "solve", sink.to_file(), out, err);
  return kExitOk;
}

int cmd_vqmc(const TrainOptions& o, std::ostream& out, std::ostream& err) {
  validate(o);
  require(!o.operator_path.empty(), "--operator is required");
  const PauliSum h = load_operator_file(o.operator_path);
  const int n = h.num_qubits();
  if (o.oracle_every > 0) check_capability(n, o.dense_limit, "--oracle-every");
  auto psi = make_model(o, n);
  std::optional<VectorXc> reference;
  if (o.oracle_every > 0) {
    const Eigen::SelfAdjointEigenSolver<MatrixXc> eig(to_dense(h, o.dense_limit));
    reference = eig.eigenvectors().col(0);
  }
  CsvSink sink(o.output, out);
  const RunSummary summary = run_training(
      o, sink.stream(), std::move(reference),
      [&](const TrainConfig& c) { train_vqmc(h, *psi, c); });
  finish_run(o, *psi, summary, "vqmc", sink.to_file(), out, err);
  return kExitOk;
}

struct OracleOptions {
  std::vector<double> ising;
  std::string problem_path;
  std::string checkpoint;
  std::string state;
  std::string csv;
  int dense_limit = kDefaultDenseLimit;
};

int cmd_oracle(const OracleOptions& o, std::ostream& out) {
  require(o.dense_limit >= 1 && o.dense_limit <= kDefaultDenseLimit, "--dense-limit out of range");
  const LinearProblem problem = make_problem(o.ising, o.problem_path);
  check_capability(problem.n, o.dense_limit, "oracle");
  VectorXc psi = problem.b.amplitudes();
  if (!o.checkpoint.empty()) {
    Checkpoint ck = load_checkpoint(o.checkpoint);
    require(ck.params.n() == problem.n, "checkpoint has the wrong qubit count");
    psi = enumerate_amplitudes(Rbm(std::move(ck.params)), o.dense_limit);
  } else if (!o.state.empty()) {
    const DenseState s = load_state_file(o.state);
    require(s.num_qubits() == problem.n, "state file has the wrong qubit count");
    psi = s.amplitudes();
  }
  const ExactSystem sys = analyze_system(problem.a, problem.b, problem.kappa, o.dense_limit);
  const OracleReport report = check_error_bound(sys, psi);
  out << format_report(report);
  if (!o.ising.empty()) {
    const IsingIdentityReport id = ising_identities(problem.n, *problem.kappa, o.dense_limit);
    out << "identity.delta_max_error=" << text::format_real(id.delta_max_error) << '\n'
        << "identity.perturbation_max_error=" << text::format_real(id.perturbation_max_error)
        << '\n'
        << "identity.zz_entry_max_error=" << text::format_real(id.zz_entry_max_error) << '\n'
        << "identity.entry_perturbation=" << text::format_real(id.entry_perturbation) << '\n'
        << "identity.entry_bound=" << text::format_real(id.entry_bound) << '\n'
        << "identity.distance_sq=" << text::format_real(id.distance_sq) << '\n'
        << "identity.distance_bound=" << text::format_real(id.distance_bound) << '\n'
        << "identity.fidelity_b_solution=" << text::format_real(id.fidelity) << '\n';
  }
  if (!o.csv.empty()) {
    text::write_file(o.csv, report_csv_header() + "\n" + report_csv_row(report) + "\n");
  }
  return kExitOk;
}

struct SweepOptions {
  std::string axis;
  std::string values;
  std::string output_dir = ".";
  std::string prefix = "sweep";
};

std::vector<double> parse_list(const std::string& s, const char* what) {
  std::vector<double> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    const auto tok = text::trim(item);
    if (tok.empty()) continue;
    const auto v = text::parse_real(tok);
    require(v.has_value() && *v > 0.0, std::string("bad value in ") + what + ": '" +
                                           std::string(tok) + "'");
    out.push_back(*v);
  }
  return out;
}

int cmd_sweep(TrainOptions base, const SweepOptions& s, const LinearProblem& problem,
              std::ostream& out, std::ostream& err) {
  validate(base);
  const bool batch_axis = s.axis == "batch";
  std::vector<double> values =
      s.values.empty() && batch_axis ? std::vector<double>{512, 1024, 2048}
                                     : parse_list(s.values, "--values");
  require(!values.empty(), "sweep needs at least one setting");
  // Settings are validated up front so a bad entry does not leave partial output.
  std::vector<TrainOptions> runs;
  for (std::size_t i = 0; i < values.size(); ++i) {
    TrainOptions o = base;
    const double v = values[i];
    double epochs = 0.0;
    if (batch_axis) {
      require(v == std::floor(v), "batch sizes must be integers");
      o.batch_size = static_cast<int>(v);
      epochs = static_cast<double>(base.epochs) * base.batch_size / v;
    } else {
      o.learning_rate = v;
      epochs = static_cast<double>(base.epochs) * base.learning_rate / v;
    }
    o.epochs = static_cast<int>(std::llround(epochs));
    o.seed = derive_seed(base.seed, i);
    o.output = s.output_dir + "/" + s.prefix + "_" + s.axis + "_" + text::format_real(v) + ".csv";
    o.save_checkpoint.clear();
    validate(o);
    runs.push_back(std::move(o));
  }
  for (const auto& o : runs) {
    out << "setting " << o.output << " epochs=" << o.epochs << '\n';
    cmd_solve(o, problem, out, err);
  }
  return kExitOk;
}

struct ScanOptions {
  int n_min = 5;
  int n_max = 12;
  std::string kappas = "10";
  std::string output;
  int dense_limit = kDefaultDenseLimit;
};

int cmd_ising_scan(const ScanOptions& o, std::ostream& out) {
  require(o.dense_limit >= 1 && o.dense_limit <= kDefaultDenseLimit, "--dense-limit out of range");
  require(o.n_min >= 2 && o.n_min <= o.n_max, "need 2 <= --n-min <= --n-max");
  const std::vector<double> kappas = parse_list(o.kappas, "--kappa");
  require(!kappas.empty(), "--kappa needs at least one value");
  for (const double k : kappas) require(k > 1.0, "every kappa must exceed 1");
  check_capability(o.n_max, o.dense_limit, "ising-scan");

  std::string body = "n,kappa,fidelity\n";
  for (const double kappa : kappas) {
    for (int n = o.n_min; n <= o.n_max; ++n) {
      const LinearProblem p = ising_problem(n, kappa);
      const VectorXc x = exact_solve(p.a, p.b, o.dense_limit);
      body += std::to_string(n) + "," + text::format_real(kappa) + "," +
              text::format_real(fidelity(p.b.amplitudes(), x)) + "\n";
    }
  }
  if (o.output.empty()) {
    out << body;
  } else {
    text::write_file(o.output, body);
  }
  return kExitOk;
}

}  // namespace

std::string csv_header() { return "epoch,loss,loss_var,grad_norm,acceptance,fidelity,wall_ms"; }

std::string csv_row(const EpochRecord& r) {
  std::string out = std::to_string(r.epoch);
  for (const auto& field :
       {text::format_real(r.loss), text::format_real(r.loss_var), text::format_real(r.grad_norm),
        text::format_real(r.acceptance),
        r.fidelity ? text::format_real(*r.fidelity) : std::string(),
        r.wall_ms ? text::format_real(*r.wall_ms) : std::string()}) {
    out += ',';
    out += csv_field(field);
  }
  return out;
}

std::string csv_field(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (const char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Neural-network linear solver via variational Monte Carlo", "vnls"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML/INI file; command-line flags take precedence");

  TrainOptions solve_opts;
  auto* solve = app.add_subcommand("solve", "train an RBM on A x = b");
  add_problem_options(*solve, solve_opts.ising, solve_opts.problem_path);
  add_model_options(*solve, solve_opts);

  TrainOptions vqmc_opts;
  auto* vqmc = app.add_subcommand("vqmc", "ground-state search for an operator file");
  vqmc->add_option("--operator", vqmc_opts.operator_path, "operator file")->required();
  add_model_options(*vqmc, vqmc_opts);

  OracleOptions oracle_opts;
  auto* oracle = app.add_subcommand("oracle", "dense reference report for a problem");
  add_problem_options(*oracle, oracle_opts.ising, oracle_opts.problem_path);
  oracle->add_option("--checkpoint", oracle_opts.checkpoint, "RBM checkpoint to evaluate");
  oracle->add_option("--state", oracle_opts.state, "dense state file to evaluate");
  oracle->add_option("--csv", oracle_opts.csv, "also write the report as a CSV row");
  oracle->add_option("--dense-limit", oracle_opts.dense_limit)->capture_default_str();

  TrainOptions sweep_opts;
  SweepOptions sweep_axis;
  auto* sweep = app.add_subcommand("sweep", "one solve per batch size or learning rate");
  add_problem_options(*sweep, sweep_opts.ising, sweep_opts.problem_path);
  add_model_options(*sweep, sweep_opts);
  sweep->add_option("--axis", sweep_axis.axis, "batch or lr")
      ->required()
      ->check(CLI::IsMember({"batch", "lr"}));
  sweep->add_option("--values", sweep_axis.values,
                    "comma-separated settings (batch default 512,1024,2048)");
  sweep->add_option("--output-dir", sweep_axis.output_dir)->capture_default_str();
  sweep->add_option("--prefix", sweep_axis.prefix)->capture_default_str();

  ScanOptions scan_opts;
  auto* scan = app.add_subcommand("ising-scan", "fidelity of b with A^-1 b across sizes");
  scan->add_option("--n-min", scan_opts.n_min)->capture_default_str();
  scan->add_option("--n-max", scan_opts.n_max)->capture_default_str();
  scan->add_option("--kappa", scan_opts.kappas, "comma-separated list")->capture_default_str();
  scan->add_option("-o,--output", scan_opts.output, "CSV path (default stdout)");
  scan->add_option("--dense-limit", scan_opts.dense_limit)->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (solve->parsed()) {
      return cmd_solve(solve_opts, make_problem(solve_opts.ising, solve_opts.problem_path), out,
                       err);
    }
    if (vqmc->parsed()) return cmd_vqmc(vqmc_opts, out, err);
    if (oracle->parsed()) return cmd_oracle(oracle_opts, out);
    if (sweep->parsed()) {
      return cmd_sweep(sweep_opts, sweep_axis,
                       make_problem(sweep_opts.ising, sweep_opts.problem_path), out, err);
    }
    if (scan->parsed()) return cmd_ising_scan(scan_opts, out);
  } catch (const CapabilityError& e) {
    err << "error: " << e.what() << '\n';
    return kExitCapability;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitConfig;
}

}  // namespace vnls::cli
