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
#include <functional>
#include <optional>
#include <vector>

#include "hqem/channel.hpp"
#include "hqem/codes.hpp"
#include "hqem/pauli.hpp"
#include "hqem/sim.hpp"

namespace hqem {

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n_samples = 0;
  double gamma = 1.0;
  // Samples or terms discarded because post-selection kept no shots.
  std::size_t dropped = 0;

  double two_sigma() const { return 2.0 * std_error; }
};

// How one noisy circuit is measured. `distribution(P)` returns the exact outcome
// probabilities over the full register when the Pauli P (on the mitigated
// register) is inserted after the circuit.
struct MeasurementSetup {
  std::size_t n_qubits = 0;
  std::function<std::vector<double>(const PauliString& inserted)> distribution;
  // Post-selection on the check bits when present; the observable then lives on
  // the logical data bits in logical order.
  std::optional<CodeSpec> code;
  std::optional<ReadoutModel> readout;
  // Unfold readout noise with IBU before post-selection.
  std::size_t ibu_iterations = 0;
  // Z-type observable: bit b of the mask is logical/register qubit (width-1-b).
  std::uint64_t parity_mask = 0;
};

// Parity expectation sum_b (-1)^{|b & mask|} n_b / N; NaN when N = 0.
double parity_expectation(const std::vector<double>& histogram, std::uint64_t mask);
// Mask of the Z-type support of an observable spelled over `width` qubits.
std::uint64_t parity_mask_of(const PauliString& z_observable);

// Draws `shots` outcomes, applies readout noise, optional unfolding and
// post-selection; returns the kept (quasi-)histogram over the observable's register.
std::vector<double> measure(const MeasurementSetup& setup, const std::vector<double>& probs,
                            std::uint64_t shots, std::mt19937_64& rng);

// (gamma/N) sum_k s_k <A>_k with one Pauli insertion drawn from |eta|/gamma per sample.
Estimate pec_sample(const MeasurementSetup& setup, const QuasiProbability& inverse,
                    std::uint64_t shots_per_sample, std::size_t n_samples, std::uint64_t seed);

// sum_j eta_j <A>_j over every label with eta_j != 0, `shots` each; variances add.
Estimate pec_direct(const MeasurementSetup& setup, const QuasiProbability& inverse,
                    std::uint64_t shots, std::uint64_t seed);

// Iterative Bayesian unfolding from a uniform prior; output sums to the input total.
std::vector<double> ibu_mitigate(const std::vector<double>& counts, const ReadoutModel& readout,
                                 std::size_t iterations);
std::vector<double> ibu_mitigate(const std::vector<std::uint64_t>& histogram,
                                 const ReadoutModel& readout, std::size_t iterations);

}  // namespace hqem
