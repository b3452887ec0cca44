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

#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "../../tools/cli.hpp"
#include "vnls/problems.hpp"
#include "vnls/states.hpp"

namespace fs = std::filesystem;
using namespace vnls;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& body) {
  std::ofstream(p, std::ios::binary) << body;
}

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

// Fresh scratch directory per test case.
fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("vnls_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

const std::string kHeader = "epoch,loss,loss_var,grad_norm,acceptance,fidelity,wall_ms";

}  // namespace

TEST_CASE("CSV header is frozen", "[cli][csv]") {
  CHECK(cli::csv_header() == kHeader);
  EpochRecord r;
  r.epoch = 3;
  r.loss = 0.5;
  CHECK(cli::csv_row(r) == "3,0.5,0,0,0,,");
  r.fidelity = 0.25;
  r.wall_ms = 1.5;
  CHECK(cli::csv_row(r) == "3,0.5,0,0,0,0.25,1.5");
}

TEST_CASE("CSV field quoting", "[cli][csv]") {
  CHECK(cli::csv_field("plain") == "plain");
  CHECK(cli::csv_field("a,b") == "\"a,b\"");
  CHECK(cli::csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(cli::csv_field("two\nlines") == "\"two\nlines\"");
}

TEST_CASE("solve with zero epochs writes only the header", "[cli][solve]") {
  const auto r = run({"solve", "--ising", "4", "10", "--epochs", "0"});
  CHECK(r.code == 0);
  CHECK(r.out == kHeader + "\n");
  CHECK(r.err.find("solve n=4 epochs=0") != std::string::npos);
}

TEST_CASE("solve writes one row per epoch", "[cli][solve]") {
  const fs::path dir = scratch("rows");
  const auto csv = (dir / "log.csv").string();
  const auto r = run({"solve", "--ising", "4", "10", "--epochs", "5", "--batch-size", "64",
                      "--oracle-every", "2", "-o", csv, "--seed", "3"});
  REQUIRE(r.code == 0);
  const auto rows = lines_of(slurp(csv));
  REQUIRE(rows.size() == 6);
  CHECK(rows[0] == kHeader);
  CHECK(rows[1].rfind("0,", 0) == 0);
  CHECK(rows[5].rfind("4,", 0) == 0);
  // Fidelity on epochs 0, 2, 4; wall_ms empty without --timing.
  CHECK(rows[1].back() == ',');
  CHECK(rows[2].find(",,") != std::string::npos);
  CHECK(r.out.find("fidelity=") != std::string::npos);
}

TEST_CASE("timing fills wall_ms", "[cli][solve]") {
  const auto r = run({"solve", "--ising", "3", "10", "--epochs", "2", "--batch-size", "32",
                      "--timing"});
  REQUIRE(r.code == 0);
  for (const auto& row : lines_of(r.out)) {
    if (row == kHeader) continue;
    CHECK(row.back() != ',');
  }
}

TEST_CASE("solve is byte-for-byte deterministic", "[cli][determinism]") {
  for (const std::string model : {"rbm-real", "rbm-complex"}) {
    const std::vector<std::string> args{"solve",     "--ising",        "5",  "10", "--epochs",
                                        "4",         "--batch-size",   "96", "--model", model,
                                        "--seed",    "17",             "--oracle-every", "1"};
    const auto a = run(args);
    const auto b = run(args);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    auto other = args;
    other[10] = "18";
    CHECK(run(other).out != a.out);
  }
}

TEST_CASE("configuration errors exit with code 2", "[cli][errors]") {
  CHECK(run({"solve", "--ising", "3", "0.5"}).code == 2);
  CHECK(run({"solve", "--ising", "3", "1"}).code == 2);
  CHECK(run({"solve", "--ising", "3.5", "10"}).code == 2);
  CHECK(run({"solve"}).code == 2);
  CHECK(run({"solve", "--ising", "3", "10", "--lr", "-1"}).code == 2);
  CHECK(run({"solve", "--ising", "3", "10", "--batch-size", "0"}).code == 2);
  CHECK(run({"solve", "--ising", "3", "10", "--model", "mlp"}).code == 2);
  CHECK(run({"solve", "--ising", "3", "10", "--no-such-flag"}).code == 2);
  CHECK(run({"solve", "--problem", "/nonexistent/a.problem"}).code == 2);
  CHECK(run({"vqmc", "--operator", "/nonexistent/h.op"}).code == 2);
  CHECK(run({"vqmc"}).code == 2);
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
}

TEST_CASE("malformed problem file exits with code 2 and names the line", "[cli][errors]") {
  const fs::path dir = scratch("malformed");
  spit(dir / "bad.problem", "n=2\n1 X0\n1 Q7\nb dense\n1\n1\n1\n1\n");
  const auto r = run({"solve", "--problem", (dir / "bad.problem").string(), "--epochs", "1"});
  CHECK(r.code == 2);
  CHECK(r.err.find("line 3") != std::string::npos);
}

TEST_CASE("capability limits exit with code 3", "[cli][errors]") {
  CHECK(run({"oracle", "--ising", "15", "10"}).code == 3);
  CHECK(run({"solve", "--ising", "15", "10", "--oracle-every", "1", "--epochs", "1"}).code == 3);
  CHECK(run({"ising-scan", "--n-min", "5", "--n-max", "15"}).code == 3);
  CHECK(run({"oracle", "--ising", "6", "10", "--dense-limit", "5"}).code == 3);
}

TEST_CASE("help exits cleanly", "[cli]") {
  const auto r = run({"solve", "--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("--ising") != std::string::npos);
}

TEST_CASE("vqmc finds the ground state of Z0", "[cli][vqmc]") {
  const fs::path dir = scratch("vqmc");
  spit(dir / "z.op", "n=1\n1 Z0\n");
  const auto csv = (dir / "log.csv").string();
  const auto r = run({"vqmc", "--operator", (dir / "z.op").string(), "--epochs", "300", "--lr",
                      "0.1", "--batch-size", "256", "--chains", "4", "-o", csv});
  REQUIRE(r.code == 0);
  const auto rows = lines_of(slurp(csv));
  REQUIRE(rows.size() == 301);
  const double final_loss = std::stod(rows.back().substr(rows.back().find(',') + 1));
  CHECK(final_loss < -0.95);
}

TEST_CASE("vqmc from an eigenstate has zero variance", "[cli][vqmc]") {
  const fs::path dir = scratch("eigen");
  spit(dir / "x.op", "n=2\n1 X0\n1 X1\n");
  spit(dir / "plus.state", "n=2\n1\n1\n1\n1\n");
  const auto r = run({"vqmc", "--operator", (dir / "x.op").string(), "--model", "dense",
                      "--init-state", (dir / "plus.state").string(), "--epochs", "3",
                      "--batch-size", "64"});
  REQUIRE(r.code == 0);
  const auto rows = lines_of(r.out);
  REQUIRE(rows.size() == 4);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].rfind(std::to_string(i - 1) + ",2,0,0,", 0) == 0);
}

TEST_CASE("oracle reports on Ising problems", "[cli][oracle]") {
  const auto r = run({"oracle", "--ising", "8", "10"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("bound_satisfied=true") != std::string::npos);
  CHECK(r.out.find("identity.delta_max_error=") != std::string::npos);
}

TEST_CASE("oracle on a converged checkpoint", "[cli][oracle]") {
  const fs::path dir = scratch("ckpt");
  const auto ckpt = (dir / "run.ckpt").string();
  const auto train = run({"solve", "--ising", "4", "10", "--epochs", "150", "--batch-size", "512",
                          "--lr", "0.05", "--seed", "2", "-o", (dir / "log.csv").string(),
                          "--save-checkpoint", ckpt});
  REQUIRE(train.code == 0);
  const auto r = run({"oracle", "--ising", "4", "10", "--checkpoint", ckpt, "--csv",
                      (dir / "report.csv").string()});
  REQUIRE(r.code == 0);
  const auto pos = r.out.find("\nfidelity=");
  REQUIRE(pos != std::string::npos);
  CHECK(std::stod(r.out.substr(pos + 10)) >= 0.99);
  CHECK(lines_of(slurp(dir / "report.csv")).size() == 2);
}

TEST_CASE("sweep over batch sizes keeps total samples fixed", "[cli][sweep]") {
  const fs::path dir = scratch("sweep");
  const auto r = run({"sweep", "--ising", "3", "10", "--axis", "batch", "--epochs", "8",
                      "--batch-size", "64", "--values", "32,64,128", "--output-dir",
                      dir.string()});
  REQUIRE(r.code == 0);
  const std::vector<std::pair<std::string, std::size_t>> expected{
      {"sweep_batch_32.csv", 16}, {"sweep_batch_64.csv", 8}, {"sweep_batch_128.csv", 4}};
  for (const auto& [file, epochs] : expected) {
    REQUIRE(fs::exists(dir / file));
    CHECK(lines_of(slurp(dir / file)).size() == epochs + 1);
  }
}

TEST_CASE("sweep over learning rates scales epochs inversely", "[cli][sweep]") {
  const fs::path dir = scratch("sweep_lr");
  const auto r = run({"sweep", "--ising", "3", "10", "--axis", "lr", "--epochs", "6", "--lr",
                      "0.01", "--batch-size", "32", "--values", "0.02,0.005", "--output-dir",
                      dir.string(), "--prefix", "fig2"});
  REQUIRE(r.code == 0);
  CHECK(lines_of(slurp(dir / "fig2_lr_0.02.csv")).size() == 4);
  CHECK(lines_of(slurp(dir / "fig2_lr_0.005.csv")).size() == 13);
}

TEST_CASE("sweep with no settings exits with code 2", "[cli][sweep]") {
  CHECK(run({"sweep", "--ising", "3", "10", "--axis", "lr", "--values", ""}).code == 2);
  CHECK(run({"sweep", "--ising", "3", "10", "--axis", "lr"}).code == 2);
  CHECK(run({"sweep", "--ising", "3", "10", "--axis", "depth"}).code == 2);
}

TEST_CASE("ising-scan fidelity is nondecreasing for each kappa", "[cli][scan]") {
  const auto r = run({"ising-scan", "--n-min", "5", "--n-max", "9", "--kappa", "10,100"});
  REQUIRE(r.code == 0);
  const auto rows = lines_of(r.out);
  REQUIRE(rows.size() == 11);
  CHECK(rows[0] == "n,kappa,fidelity");
  for (std::size_t i = 2; i < rows.size(); ++i) {
    if (i == 6) continue;  // first row of the second kappa
    const double prev = std::stod(rows[i - 1].substr(rows[i - 1].rfind(',') + 1));
    const double cur = std::stod(rows[i].substr(rows[i].rfind(',') + 1));
    CHECK(cur >= prev);
  }
}

TEST_CASE("config file supplies defaults that flags override", "[cli][config]") {
  const fs::path dir = scratch("config");
  spit(dir / "run.toml", "[solve]\nising = [3, 10]\nepochs = 2\nbatch-size = 32\n");
  const auto from_file = run({"--config", (dir / "run.toml").string(), "solve"});
  REQUIRE(from_file.code == 0);
  CHECK(lines_of(from_file.out).size() == 3);
  const auto overridden =
      run({"--config", (dir / "run.toml").string(), "solve", "--epochs", "4"});
  REQUIRE(overridden.code == 0);
  CHECK(lines_of(overridden.out).size() == 5);
}

TEST_CASE("golden problem file drives solve", "[cli][solve]") {
  const auto golden = fs::path(VNLS_TEST_DATA_DIR) / "ising_n3_k10.problem";
  const auto a = run({"solve", "--problem", golden.string(), "--epochs", "3", "--batch-size",
                      "32", "--seed", "5"});
  const auto b = run({"solve", "--ising", "3", "10", "--epochs", "3", "--batch-size", "32",
                      "--seed", "5"});
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
}
