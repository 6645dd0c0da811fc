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
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "hqem/pauli.hpp"
#include "hqem/sim.hpp"

namespace hqem {

// Register placement of an [[n, n-2, 2]] code: the two check qubits and the
// position of logical qubit j (0-based, logical order) for j < n - 2.
struct QedcLayout {
  std::size_t check_x = 0;
  std::size_t check_z = 1;
  std::vector<std::size_t> data;

  // q_x = 0, q_z = 1, logical qubit j at position n - 1 - j.
  static QedcLayout standard(std::size_t n);
  // n = 4 register order (q_x, q_2, q_z, q_1): the standard code with physical
  // qubits 2 and 3 (1-based) exchanged, as in the compiled two-qubit circuit.
  static QedcLayout compiled_four();
  static QedcLayout from_positions(std::size_t n, std::size_t check_x, std::size_t check_z,
                                   std::vector<std::size_t> data);
};

struct CodeSpec {
  std::string name;
  std::size_t n_physical = 0;
  std::size_t k_logical = 0;
  std::vector<PauliString> generators;
  std::vector<PauliString> logical_x;
  std::vector<PauliString> logical_z;
  std::optional<QedcLayout> layout;

  // Checks commutation relations; throws ValidationError.
  void validate() const;
  bool detects(const PauliString& error) const;
  std::vector<std::size_t> check_positions() const;
};

CodeSpec qedc(std::size_t n, std::optional<QedcLayout> layout = std::nullopt);

// Maps |+>_{q_x} |0>_{q_z} |psi> to the encoded state.
Circuit encode_circuit(const CodeSpec& code);
Circuit decode_circuit(const CodeSpec& code);
// H on q_x so both checks read out in the computational basis after decode.
Circuit check_readout_circuit(const CodeSpec& code);
// Physical register state |+>|0>|psi> for a k-qubit logical statevector.
Eigen::VectorXcd unencoded_input(const CodeSpec& code, const Eigen::VectorXcd& logical_state);

// Physical image of a Hermitian logical Pauli (letters in logical order).
PauliString logical_image(const CodeSpec& code, const PauliString& logical);
Gate encoded_exponential(const CodeSpec& code, const PauliString& logical, double theta);

struct PostSelectionResult {
  Counts accepted;  // data bits only, logical order
  double acceptance_rate = 0.0;
  std::uint64_t accepted_shots = 0;
  std::uint64_t rejected = 0;
};

PostSelectionResult post_select(const Counts& counts, const CodeSpec& code);
// Histogram form: input over the physical register, output over the k logical bits.
std::vector<std::uint64_t> post_select_histogram(const std::vector<std::uint64_t>& histogram,
                                                 const CodeSpec& code, std::uint64_t* accepted);
// Marginal over the logical data bits without post-selection.
std::vector<std::uint64_t> data_marginal_histogram(const std::vector<std::uint64_t>& histogram,
                                                   const CodeSpec& code);

// Three-qubit repetition code with two syndrome ancillas (register of five).
struct BitflipCode {
  CodeSpec spec;
  std::vector<std::size_t> data{0, 1, 2};
  std::vector<std::size_t> ancillas{3, 4};

  std::size_t register_size() const { return 5; }
  // Parity checks Z0Z1 -> ancilla 3, Z1Z2 -> ancilla 4.
  Circuit syndrome_circuit() const;
  // Syndrome bits (s1, s2) of a Pauli on the three data qubits.
  std::pair<int, int> syndrome_of(const PauliString& data_error) const;
  // Data qubit flipped for a syndrome, or -1.
  int correction_for(int s1, int s2) const;
  // Kraus set measuring the ancillas, applying the X correction and resetting the ancillas.
  std::vector<Eigen::MatrixXcd> correction_kraus() const;
  void syndrome_and_correct(DensityMatrix& state) const;
};

BitflipCode bitflip_code();

nlohmann::json to_json(const CodeSpec& code);

}  // namespace hqem
