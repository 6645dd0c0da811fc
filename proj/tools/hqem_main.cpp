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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "hqem/analysis.hpp"
#include "hqem/codes.hpp"
#include "hqem/errors.hpp"
#include "hqem/experiments.hpp"
#include "hqem/sim.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitSimulation = 3;

std::optional<hqem::CodeSpec> code_by_name(const std::string& name) {
  if (name == "none") return std::nullopt;
  if (name == "qedc4") return hqem::qedc(4);
  if (name == "qedc4-compiled") return hqem::vqe_code();
  if (name == "qedc6") return hqem::qedc(6);
  throw hqem::ValidationError(fmt::format("--code: unknown code '{}'", name));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid error detection and mitigation experiments"};
  app.require_subcommand(1);
  std::optional<std::uint64_t> seed;
  app.add_option("--seed", seed, "Override the config's master seed");

  std::string config_path;
  std::string output;
  auto* run = app.add_subcommand("run", "Run an experiment config and write its artifacts");
  run->add_option("config", config_path, "TOML or JSON experiment config")->required();
  run->add_option("-o,--output", output, "Output directory (overrides the config)");

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Schema-check a config without running it");
  validate->add_option("config", validate_path, "TOML or JSON experiment config")->required();

  std::optional<double> theta;
  double p = 0.01;
  std::string circuit_path;
  std::string code_name = "qedc4-compiled";
  double floor = 1e-12;
  auto* report = app.add_subcommand("noise-report", "Dump N_tot and N_reduced as JSON");
  auto* theta_opt = report->add_option("--vqe-theta", theta, "Encoded H2 VQE circuit at this angle");
  report->add_option("--p", p, "Depolarizing rate per CX for --vqe-theta")->check(CLI::Range(0.0, 1.0));
  auto* circuit_opt = report->add_option("--circuit", circuit_path, "Circuit JSON file");
  report->add_option("--code", code_name, "none, qedc4, qedc4-compiled or qedc6");
  report->add_option("--floor", floor, "Probability floor for the accumulation");
  theta_opt->excludes(circuit_opt);
  circuit_opt->excludes(theta_opt);

  double r_min = 0.0;
  double r_max = 10.0;
  auto* table = app.add_subcommand("table", "Print rows of the H2 coefficient table");
  table->add_option("--r-min", r_min, "Smallest R (Angstrom)");
  table->add_option("--r-max", r_max, "Largest R (Angstrom)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*validate) {
      const hqem::ExperimentConfig c = hqem::load_config(validate_path);
      std::cout << fmt::format("{}: valid {} config\n", validate_path, hqem::experiment_name(c.kind));
      return 0;
    }
    if (*run) {
      hqem::ExperimentConfig c = hqem::load_config(config_path);
      if (seed) c.seed = *seed;
      if (!output.empty()) c.output = output;
      const hqem::RunResult r = hqem::run_experiment(c);
      hqem::write_run(r, c.output);
      for (const auto& a : r.artifacts) std::cout << fmt::format("wrote {}\n", (std::filesystem::path(c.output) / a.name).string());
      for (const auto& n : r.notes) std::cout << n << "\n";
      return 0;
    }
    if (*report) {
      hqem::Circuit circuit;
      std::optional<hqem::CodeSpec> code = code_by_name(code_name);
      if (theta) {
        code = hqem::vqe_code();
        circuit = hqem::encoded_vqe_circuit(*code, *theta, p);
      } else if (!circuit_path.empty()) {
        std::ifstream in(circuit_path);
        if (!in) throw hqem::ValidationError(fmt::format("cannot read {}", circuit_path));
        std::stringstream ss;
        ss << in.rdbuf();
        circuit = hqem::circuit_from_json(nlohmann::json::parse(ss.str()));
      } else {
        throw hqem::ValidationError("noise-report needs --vqe-theta or --circuit");
      }
      std::cout << hqem::noise_report(circuit, code, floor).dump(2) << "\n";
      return 0;
    }
    if (*table) {
      std::cout << hqem::h2_table_slice(r_min, r_max);
      return 0;
    }
  } catch (const hqem::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const hqem::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSimulation;
  }
  return 0;
}
