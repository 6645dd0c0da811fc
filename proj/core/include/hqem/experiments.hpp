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

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "hqem/codes.hpp"
#include "hqem/sim.hpp"

namespace hqem {

enum class ExperimentKind { Vqe, Overhead, Infidelity, Cb, TwirlBench };
std::string experiment_name(ExperimentKind kind);
ExperimentKind experiment_kind_from_name(const std::string& name);

// A schema-checked experiment description. `params` holds the experiment's own table with
// every default filled in, so the manifest records exactly what ran.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Vqe;
  std::uint64_t seed = 1;
  std::uint64_t shots = 0;  // 0 for exact experiments
  std::string output = ".";
  nlohmann::json params = nlohmann::json::object();

  nlohmann::json to_json() const;
};

enum class ConfigFormat { Auto, Toml, Json };

// Converts TOML or JSON text to a JSON document; ParseError on malformed input.
nlohmann::json parse_config_document(std::string_view text, ConfigFormat format = ConfigFormat::Auto);
// Schema check with field-level messages ("vqe.p: expected a number in [0, 1]");
// throws ValidationError naming the first offending field.
ExperimentConfig validate_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

struct Artifact {
  std::string name;
  std::string content;
};

struct RunResult {
  std::vector<Artifact> artifacts;
  nlohmann::json manifest;
  // One line per acceptance-style property the run checks, e.g. overhead ordering.
  std::vector<std::string> notes;
};

// Pure function of the config: identical config and seed give identical artifacts.
RunResult run_experiment(const ExperimentConfig& config);
// Writes the artifacts and manifest.json into config.output (created if missing).
void write_run(const RunResult& result, const std::filesystem::path& directory);

// 64-bit FNV-1a, hex encoded.
std::string fnv1a_hex(std::string_view bytes);
nlohmann::json version_info();

// N_tot and the detectable-filtered, Pauli-reduced channel of a noisy circuit.
nlohmann::json noise_report(const Circuit& circuit, const std::optional<CodeSpec>& code,
                            double probability_floor = 1e-12);
// Rows of the H2 coefficient table with r_min <= R <= r_max, as CSV with header.
std::string h2_table_slice(double r_min, double r_max);

}  // namespace hqem
