// Copyright 2026 The rbmsim Authors. - All Rights Reserved.
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

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "rbm/io.hpp"

namespace {

namespace fs = std::filesystem;

std::string cli_path() { return RBMSIM_CLI_PATH; }

int run_cli(const std::string& args) {
  const std::string cmd = cli_path() + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string run_cli_stdout(const std::string& args) {
  const std::string out = (fs::temp_directory_path() / "rbm_cli_out").string();
  const std::string cmd = cli_path() + " " + args + " > " + out + " 2>/dev/null";
  if (std::system(cmd.c_str()) == -1) return "";
  return rbm::read_file(out);
}

fs::path sandbox(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "rbm_cli_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

const char* kTinyConfig = R"(
[system]
dimension = 2
species = 2
end_time = 1.0
tau = 0.25

[species.1]
count = 8
batch_size = 2
sigma = 0.5
potential = quadratic_well
well_strength = 3.0
well_center = 0.0, 0.0
init_variance = 1.0

[species.2]
count = 4
batch_size = 2
sigma = 0.5
potential = quadratic_well
well_strength = 3.0
well_center = 1.0, 1.0
init_variance = 1.0

[kernel.1.2]
form = scaled_cauchy
q_i = -0.5
q_j = 0.5

[run]
seed = 5
replicas = 3
tau_list = 0.25, 0.125, 0.0625
ref_refinement = 1
)";

const char* kZeroKernelConfig = R"(
[system]
dimension = 1
species = 1
end_time = 1.0
tau = 0.25

[species.1]
count = 4
batch_size = 2
sigma = 0.5
potential = quadratic_well
well_strength = 1.0
well_center = 0.0

[run]
seed = 2
replicas = 2
tau_list = 0.25, 0.125, 0.0625
ref_refinement = 0
)";

}  // namespace

TEST_CASE("cli: identical invocations produce byte-identical outputs") {
  const auto dir = sandbox("determinism");
  const std::string cfg = (dir / "sys.cfg").string();
  rbm::write_file_atomic(cfg, kTinyConfig);
  const std::string base = " simulate --config " + cfg + " --seed 31 ";
  REQUIRE(run_cli(base + "-o " + (dir / "a").string()) == 0);
  REQUIRE(run_cli(base + "-o " + (dir / "b").string()) == 0);
  CHECK(rbm::read_file((dir / "a/trajectory.csv").string()) ==
        rbm::read_file((dir / "b/trajectory.csv").string()));
}

TEST_CASE("cli: invalid tau exits with the config code") {
  CHECK(run_cli("simulate --preset test3 --tau 0 -o /tmp/rbm_cli_tests/x") ==
        1);
}

TEST_CASE("cli: pinned preset parameters need --force") {
  const auto dir = sandbox("force");
  CHECK(run_cli("simulate --preset test3 --tau 0.5 -o " + dir.string()) == 1);
  CHECK(run_cli("simulate --preset population3 --counts 10,10,10 -o " +
                dir.string()) == 1);
}

TEST_CASE("cli: consistency gate exit codes") {
  const auto dir = sandbox("consistency");
  CHECK(run_cli("consistency --micro-counts 4,4 --micro-batches 2,2 -o " +
                dir.string()) == 0);
  CHECK(run_cli("consistency --micro-counts 4,6 --micro-batches 2,2 "
                "--legacy-beta -o " +
                dir.string()) == 3);
  // equal batch counts: the correction factor is 1, so the legacy weights
  // stay consistent and the gate passes
  CHECK(run_cli("consistency --micro-counts 4,4 --micro-batches 2,2 "
                "--legacy-beta -o " +
                dir.string()) == 0);
}

TEST_CASE("cli: converge needs at least three step sizes") {
  const auto dir = sandbox("tau_list");
  const std::string cfg = (dir / "sys.cfg").string();
  rbm::write_file_atomic(cfg, kTinyConfig);
  CHECK(run_cli("converge --config " + cfg + " --tau-list 0.25 -o " +
                dir.string()) == 1);
}

TEST_CASE("cli: zero-kernel convergence reports a skipped fit and succeeds") {
  const auto dir = sandbox("zero_kernel");
  const std::string cfg = (dir / "sys.cfg").string();
  rbm::write_file_atomic(cfg, kZeroKernelConfig);
  const std::string out =
      run_cli_stdout("converge --config " + cfg + " -o " + dir.string());
  CHECK(out.find("slope fit skipped") != std::string::npos);
  CHECK(run_cli("converge --config " + cfg + " -o " + dir.string()) == 0);
}

TEST_CASE("cli: cost subcommand reports the micro counts") {
  const auto dir = sandbox("cost");
  const std::string cfg = (dir / "sys.cfg").string();
  rbm::write_file_atomic(cfg, R"(
[system]
dimension = 1
species = 1
end_time = 1.0
tau = 0.5

[species.1]
count = 4
batch_size = 2
sigma = 1.0
)");
  const std::string out =
      run_cli_stdout("cost --config " + cfg + " -o " + dir.string());
  CHECK(out.find("full/step=12") != std::string::npos);
  CHECK(out.find("rbm/step=4") != std::string::npos);
}

TEST_CASE("cli: blow-up exits with its own code") {
  const auto dir = sandbox("blowup");
  const std::string cfg = (dir / "sys.cfg").string();
  // explicit Euler on a stiff well: |1 - tau r| = 49 per step; 200 steps
  // overflow double range
  rbm::write_file_atomic(cfg, R"(
[system]
dimension = 1
species = 1
end_time = 100.0
tau = 0.5

[species.1]
count = 4
batch_size = 2
sigma = 0.0
potential = quadratic_well
well_strength = 100.0
well_center = 0.0
init_variance = 1.0
)");
  CHECK(run_cli("simulate --config " + cfg + " -o " + dir.string()) == 2);
}

TEST_CASE("cli: converge writes the error series files") {
  const auto dir = sandbox("converge_files");
  const std::string cfg = (dir / "sys.cfg").string();
  rbm::write_file_atomic(cfg, kTinyConfig);
  REQUIRE(run_cli("converge --config " + cfg + " -o " + dir.string()) == 0);
  const std::string csv = rbm::read_file((dir / "errors.csv").string());
  CHECK(csv.rfind("tau,mean_error,std_error", 0) == 0);
  const std::string json = rbm::read_file((dir / "errors.json").string());
  CHECK(json.find("\"slope\"") != std::string::npos);
}
