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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "hqem/channel.hpp"
#include "hqem/pauli.hpp"
#include "hqem/sim.hpp"
#include "hqem/twirl.hpp"

namespace hqem {

inline const std::vector<std::size_t> kDefaultCbDepths{4, 16, 32, 64, 128};

// Smallest k <= max_order with U^k proportional to the identity; 0 if none.
std::size_t unitary_order(const Eigen::MatrixXcd& u, std::size_t max_order = 64);

struct CbDesign {
  Gate gate;                 // acts on qubits {0, 1} of a 2-qubit register
  PauliString basis;         // prepared stabilizer, letters only
  std::vector<std::size_t> depths = kDefaultCbDepths;
  bool random_frames = true;  // uniform single-qubit Pauli layer before every gate
  std::uint64_t shots = 10000;
  std::size_t instances = 4;  // random frame draws per depth; shots are split evenly
  std::optional<PauliChannel> noise;     // attached after every gate
  std::optional<ReadoutModel> readout;

  // Depths strictly increasing and multiples of the gate order.
  void validate() const;
};

struct CbCircuit {
  Circuit circuit;
  // Tracked Paulis (sub-strings of the basis) after the final basis rotation;
  // each is +-(Z-type) and its expectation is sign * parity.
  std::vector<PauliString> observables;
  std::vector<PauliString> measured;
};

// Prep rotations, m x (random Pauli layer + gate), final Pauli layer, rotation to Z.
CbCircuit build_cb_circuit(const CbDesign& design, std::size_t depth, std::uint64_t seed);

struct ExponentialFit {
  double amplitude = 1.0;
  double fidelity = 1.0;
  Eigen::Matrix2d covariance = Eigen::Matrix2d::Zero();  // of (ln A, ln f)
  std::vector<double> residuals;                          // in log space
  bool clamped = false;
  std::size_t excluded = 0;  // sign-flipped points within kCbNoiseFloorSigmas of zero
};

inline constexpr double kCbNoiseFloorSigmas = 3.0;

struct CbPoint {
  double depth = 0.0;
  double value = 0.0;
  double std_error = 0.0;  // 0 means unweighted
};

// Log-linear weighted least squares of value = A f^m.
ExponentialFit fit_exponential(const std::vector<CbPoint>& points);

struct FidelityRecord {
  std::vector<std::string> labels;  // one label, or the degenerate orbit
  double value = 1.0;               // fitted fidelity; product over the orbit for pairs
  double split_value = 1.0;         // per-member value under the equal-split assumption
  double amplitude = 1.0;
  double residual = 0.0;
  bool learnable = true;
  std::vector<CbPoint> points;
};

// Conjugation orbits of the 15 non-identity 2-qubit Paulis under the gate.
std::vector<std::vector<std::string>> learnability_partition(const Gate& gate);

struct CbOptions {
  std::vector<std::size_t> depths = kDefaultCbDepths;
  std::uint64_t shots = 10000;
  std::size_t instances = 4;
  std::optional<ReadoutModel> readout;
  std::uint64_t seed = 1;
};

// Simulated cycle benchmarking over the nine two-letter preparation bases.
std::vector<FidelityRecord> learn_pauli_fidelities(const Gate& gate, const PauliChannel& noise,
                                                   const CbOptions& options);
// Equal-split fidelities for every label (f_I = 1).
FidelityVector fidelity_vector_from_records(const std::vector<FidelityRecord>& records);

enum class TwirlMode { None, Full, Partial };
std::string twirl_mode_name(TwirlMode mode);

struct TwirlBenchmarkConfig {
  Circuit gate_sequence;  // noiseless, 3 qubits
  ChiMatrix noise;        // 3-qubit channel after each application
  std::vector<std::size_t> depths{1, 2, 4, 8, 16};
  std::vector<TwirlMode> modes{TwirlMode::None, TwirlMode::Full, TwirlMode::Partial};
  std::optional<TwirlSet> partial_set;  // post-gate frame; searched when absent
  std::size_t partial_max_size = 8;
  std::uint64_t shots = 10000;
  std::uint64_t seed = 1;
};

struct TwirlBenchmarkRow {
  TwirlMode mode = TwirlMode::None;
  std::string stabilizer;
  std::size_t depth = 0;
  std::size_t repetitions = 0;
  double fidelity = 1.0;  // exact expectation
  double estimate = 1.0;  // shot-sampled
  double std_error = 0.0;
};

struct TwirlBenchmarkResult {
  std::size_t order = 0;
  TwirlSet partial_set;  // post-gate frame
  TwirlSet partial_set_pre_gate;
  TwirlObjectiveReport partial_report;
  std::vector<TwirlBenchmarkRow> rows;
};

// Per-qubit coherent Rx(eps) noise on n qubits.
ChiMatrix coherent_rx_noise(std::size_t n_qubits, double eps);
// CX(0,1) then CX(1,2).
Circuit default_twirl_benchmark_sequence();

// GHZ_3 with two syndrome ancillas, stabilizer S, k*n twirled noisy applications,
// bit-flip syndrome and correction, then <S> for S in {XXX, IZZ}.
TwirlBenchmarkResult run_twirl_benchmark(const TwirlBenchmarkConfig& config);

nlohmann::json to_json(const FidelityRecord& r);
std::string cb_points_csv(const std::vector<FidelityRecord>& records);
std::string twirl_benchmark_csv(const TwirlBenchmarkResult& result);

}  // namespace hqem
