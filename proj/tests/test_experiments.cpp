// Copyright 2026 The hqem Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "hqem/analysis.hpp"
#include "hqem/errors.hpp"
#include "hqem/experiments.hpp"

namespace {

using namespace hqem;
using nlohmann::json;

std::string message_of(const std::string& toml) {
  try {
    validate_config(parse_config_document(toml, ConfigFormat::Toml));
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(ConfigTest, TomlAndJsonAgree) {
  const std::string toml = R"(
experiment = "vqe"
seed = 3
shots = 100
[vqe]
p = 0.02
repetitions = 4
modes = ["noisy", "hybrid"]
)";
  const std::string js =
      R"({"experiment": "vqe", "seed": 3, "shots": 100,
          "vqe": {"p": 0.02, "repetitions": 4, "modes": ["noisy", "hybrid"]}})";
  const auto a = validate_config(parse_config_document(toml));
  const auto b = validate_config(parse_config_document(js));
  EXPECT_EQ(a.to_json(), b.to_json());
  EXPECT_EQ(a.kind, ExperimentKind::Vqe);
  EXPECT_EQ(a.seed, 3u);
  EXPECT_EQ(a.shots, 100u);
  EXPECT_DOUBLE_EQ(a.params["p"].get<double>(), 0.02);
  EXPECT_EQ(a.params["thetas"].size(), 13u);
}

TEST(ConfigTest, MissingShotsNamesField) {
  const std::string msg = message_of("experiment = \"vqe\"\n[vqe]\np = 0.01\n");
  EXPECT_NE(msg.find("shots"), std::string::npos) << msg;
  EXPECT_NE(msg.find("missing required field"), std::string::npos) << msg;
}

TEST(ConfigTest, ExactExperimentsNeedNoShots) {
  EXPECT_EQ(message_of("experiment = \"overhead\"\n"), "");
  EXPECT_EQ(message_of("experiment = \"infidelity\"\n"), "");
}

TEST(ConfigTest, FieldLevelErrors) {
  EXPECT_NE(message_of("experiment = \"vqe\"\nshots = 10\nbogus = 1\n").find("bogus: unknown field"),
            std::string::npos);
  EXPECT_NE(message_of("experiment = \"vqe\"\nshots = 10\n[vqe]\np = 2.0\n").find("vqe.p"),
            std::string::npos);
  EXPECT_NE(message_of("experiment = \"vqe\"\nshots = 10\n[vqe]\nmodes = [\"hybrid\", \"x\"]\n")
                .find("vqe.modes[1]"),
            std::string::npos);
  EXPECT_NE(message_of("experiment = \"overhead\"\n[overhead]\nn_encoded = 5\n").find("overhead.n_encoded"),
            std::string::npos);
  EXPECT_NE(message_of("experiment = \"cb\"\nshots = 10\n[cb.noise]\nXI = 1.5\n").find("cb.noise.XI"),
            std::string::npos);
  EXPECT_NE(message_of("experiment = \"tomography\"\n").find("unknown experiment"), std::string::npos);
  EXPECT_NE(message_of("experiment = \"vqe\"\nshots = -4\n").find("shots"), std::string::npos);
}

TEST(ConfigTest, SyntaxErrorIsParseError) {
  EXPECT_THROW(parse_config_document("experiment = \n", ConfigFormat::Toml), ParseError);
  EXPECT_THROW(parse_config_document("{\"experiment\": ", ConfigFormat::Json), ParseError);
}

TEST(ConfigTest, ShippedConfigsValidate) {
  const std::filesystem::path dir = HQEM_SOURCE_DIR "/configs";
  std::size_t seen = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.path().extension() != ".toml") continue;
    EXPECT_NO_THROW(load_config(e.path())) << e.path();
    ++seen;
  }
  EXPECT_EQ(seen, 5u);
}

TEST(Fnv1aTest, KnownVectors) {
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
  EXPECT_EQ(fnv1a_hex("foobar"), "85944171f73967e8");
}

TEST(RunTest, OverheadArtifactsAndManifest) {
  const auto cfg = validate_config(parse_config_document("experiment = \"overhead\"\nseed = 4\n"));
  const RunResult r = run_experiment(cfg);
  ASSERT_EQ(r.artifacts.size(), 1u);
  EXPECT_EQ(r.artifacts[0].name, "overhead.csv");
  const std::string& csv = r.artifacts[0].content;
  EXPECT_EQ(csv.rfind("L,p,gamma2_layer,gamma2_end,gamma2_hybrid,hybrid_acceptance\n", 0), 0u);
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);
  std::size_t rows = 0;
  while (std::getline(lines, line)) {
    double v[6];
    char comma;
    std::istringstream ls(line);
    ls >> v[0] >> comma >> v[1] >> comma >> v[2] >> comma >> v[3] >> comma >> v[4] >> comma >> v[5];
    ASSERT_FALSE(ls.fail()) << line;
    EXPECT_LE(v[4], v[3]) << line;
    EXPECT_LE(v[3], v[2]) << line;
    ++rows;
  }
  EXPECT_EQ(rows, 60u);

  const json& m = r.manifest;
  EXPECT_EQ(m["experiment"], "overhead");
  EXPECT_EQ(m["seed"], 4);
  EXPECT_EQ(m["config_hash"], fnv1a_hex(cfg.to_json().dump()));
  EXPECT_EQ(m["artifacts"][0]["fnv1a"], fnv1a_hex(csv));
  EXPECT_EQ(m["artifacts"][0]["bytes"], csv.size());
  EXPECT_TRUE(m["versions"].contains("hqem"));
  EXPECT_NE(m["notes"][0].get<std::string>().find("60/60"), std::string::npos);
}

TEST(RunTest, SameSeedGivesIdenticalBytes) {
  const std::string toml = R"(
experiment = "vqe"
seed = 12
shots = 300
[vqe]
repetitions = 2
thetas = [-1.0, -0.5, 0.0, 0.5, 1.0]
pes_grid_points = 200
)";
  const auto cfg = validate_config(parse_config_document(toml));
  const RunResult a = run_experiment(cfg);
  const RunResult b = run_experiment(cfg);
  ASSERT_EQ(a.artifacts.size(), b.artifacts.size());
  for (std::size_t i = 0; i < a.artifacts.size(); ++i) {
    EXPECT_EQ(a.artifacts[i].name, b.artifacts[i].name);
    EXPECT_EQ(a.artifacts[i].content, b.artifacts[i].content) << a.artifacts[i].name;
  }
  EXPECT_EQ(a.manifest, b.manifest);

  const auto dir = std::filesystem::temp_directory_path() / "hqem_run_test";
  std::filesystem::remove_all(dir);
  write_run(a, dir / "one");
  write_run(b, dir / "two");
  for (const auto& art : a.artifacts) {
    EXPECT_EQ(read_file(dir / "one" / art.name), read_file(dir / "two" / art.name));
  }
  EXPECT_TRUE(std::filesystem::exists(dir / "one" / "manifest.json"));
  std::filesystem::remove_all(dir);

  auto other = cfg;
  other.seed = 13;
  EXPECT_NE(run_experiment(other).artifacts[0].content, a.artifacts[0].content);
}

TEST(RunTest, CbAndTwirlBenchProduceArtifacts) {
  const auto cb = run_experiment(validate_config(parse_config_document(
      "experiment = \"cb\"\nshots = 2000\n[cb]\ndepths = [2, 4, 8]\ninstances = 2\n")));
  std::set<std::string> names;
  for (const auto& a : cb.artifacts) names.insert(a.name);
  EXPECT_TRUE(names.count("cb_points.csv"));
  const auto tb = run_experiment(validate_config(parse_config_document(
      "experiment = \"twirl-bench\"\nshots = 1000\n[twirl_bench]\ndepths = [1, 2]\n")));
  EXPECT_EQ(tb.artifacts.front().name, "twirl_bench.csv");
}

TEST(TableTest, Slice) {
  const std::string s = h2_table_slice(0.7, 0.8);
  EXPECT_EQ(s, "R,g1,g2,g5,g3,g4\n0.75,-0.349833,-0.388748,0.181771,-0.388748,0.0111772\n");
  EXPECT_EQ(h2_table_slice(5.0, 6.0), "R,g1,g2,g5,g3,g4\n");
}

TEST(NoiseReportTest, EncodedVqeCircuit) {
  const json j = noise_report(encoded_vqe_circuit(vqe_code(), 0.5, 0.01), vqe_code());
  EXPECT_TRUE(j.contains("total"));
  EXPECT_TRUE(j.contains("filtered"));
  EXPECT_LT(j["acceptance"].get<double>(), 1.0);
}

}  // namespace
