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
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hqem/channel.hpp"
#include "hqem/codes.hpp"
#include "hqem/generalized_error.hpp"
#include "hqem/pauli.hpp"
#include "hqem/sim.hpp"

namespace hqem {

// Mixture rho -> sum_k p_k E_k rho E_k^dagger of normalized generalized errors.
struct ErrorEnsemble {
  struct Entry {
    double probability = 0.0;
    GeneralizedError error;
    // Number of non-identity Pauli picks that produced this entry (capped at 2).
    int order = 0;
  };

  std::size_t n_qubits = 0;
  std::vector<Entry> entries;
  // Mass removed by the probability floor or the first-order restriction.
  double dropped_mass = 0.0;
  // filter_detectable only: surviving mass before renormalisation.
  double acceptance = 1.0;
  bool all_detected = false;

  static ErrorEnsemble identity(std::size_t n_qubits);
  double total_probability() const;
  // Throws ConsistencyError unless probabilities sum to 1 and every error is normalized.
  void validate(double tol = 1e-10) const;
  // Dense action on a density matrix (n <= kMaxSimQubits).
  DensityMatrix apply(const DensityMatrix& rho) const;
};

// V P V^dagger for a Clifford gate; P spans the whole register.
PauliString conjugate_clifford(const Gate& gate, const PauliString& p);
// R_axis(theta) P R_axis(theta)^dagger with the rotation on `qubit` of P's register.
GeneralizedError conjugate_rotation(char axis, std::size_t qubit, double theta,
                                    const PauliString& p);
// U E U^dagger for any supported gate.
GeneralizedError conjugate(const Gate& gate, const GeneralizedError& e);
GeneralizedError conjugate(const std::vector<Gate>& layer, const GeneralizedError& e);

struct PropagationReport {
  std::size_t max_terms_seen = 0;
  double truncated_weight = 0.0;
};

// Pushes an error sitting after layer `layer_index` through every later layer.
GeneralizedError propagate_to_end(const Circuit& circuit, std::size_t layer_index,
                                  const GeneralizedError& error, std::size_t max_terms = 1 << 16,
                                  PropagationReport* report = nullptr);

struct AccumulateOptions {
  double probability_floor = 1e-9;
  bool first_order = false;
};

// Joint distribution over per-layer Pauli picks, each composite error carried to the circuit end.
ErrorEnsemble accumulate_total_noise(const Circuit& circuit, const AccumulateOptions& options = {});

// Where the ensemble sits relative to the code:
//   Encoded  - on the code space; a term survives if it commutes with every generator.
//   Decoded  - after decode; q_x holds |+> and q_z holds |0>, so a term survives if its q_x
//              letter is I or X and its q_z letter is I or Z.
//   Readout  - after decode and the H on q_x; both check letters must be I or Z.
enum class DetectionFrame { Encoded, Decoded, Readout };

// Removes detected terms and renormalizes. Decoded and Readout results are restricted to the
// data qubits in logical order; Encoded keeps the full register.
ErrorEnsemble filter_detectable(const ErrorEnsemble& ensemble, const CodeSpec& code,
                                DetectionFrame frame = DetectionFrame::Decoded);
bool survives_detection(const PauliString& p, const CodeSpec& code, DetectionFrame frame);

// Diagonal part: c_j = sum_k p_k |a_{k,j}|^2, normalized.
PauliChannel reduce_to_pauli(const ErrorEnsemble& ensemble);

// Cross-term contribution sum_k p_k sum_{r != s} a_r conj(a_s) Tr(P_s A P_r rho).
double offdiagonal_bias_bound(const ErrorEnsemble& ensemble, const PauliString& observable,
                              const DensityMatrix& state);

nlohmann::json to_json(const GeneralizedError& e);
nlohmann::json to_json(const ErrorEnsemble& e);

}  // namespace hqem
