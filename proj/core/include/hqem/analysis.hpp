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

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hqem/channel.hpp"
#include "hqem/codes.hpp"
#include "hqem/mitigate.hpp"
#include "hqem/propagate.hpp"
#include "hqem/sim.hpp"
#include "hqem/twirl.hpp"

namespace hqem {

// ---------------------------------------------------------------------------
// H2 Hamiltonian coefficients.

struct H2Coefficients {
  double r = 0.0;  // internuclear distance, Angstrom
  double g1 = 0.0;
  double g2 = 0.0;
  double g3 = 0.0;
  double g4 = 0.0;
  double g5 = 0.0;
};

// The 45 shipped rows, R = 0.05 ... 3.95.
const std::vector<H2Coefficients>& h2_table();
std::string_view h2_table_csv();
// Parses "R,g1,g2,g5,g3,g4" CSV text.
std::vector<H2Coefficients> parse_h2_csv(std::string_view text);
const H2Coefficients& h2_row(double r);

struct H2Expectations {
  double z1 = 0.0;
  double z2 = 0.0;
  double z1z2 = 0.0;
  double x1x2 = 0.0;
};

// g1 + g2 <Z1> + g3 <Z2> + g4 <Z1 Z2> + g5 <X1 X2>
double h2_energy(const H2Expectations& e, const H2Coefficients& g);
// Ideal UCC values: <Z1> = <Z2> = cos(theta), <Z1 Z2> = 1, <X1 X2> = sin(theta).
H2Expectations ucc_expectations(double theta);
// g1 + g4 - sqrt((g2 + g3)^2 + g5^2)
double ucc_ground_energy(const H2Coefficients& g);
double ucc_optimal_theta(const H2Coefficients& g);

// ---------------------------------------------------------------------------
// Logical error statistics of [[n, n-2, 2]] under per-qubit noise.

enum class InfidelityMode { Untwirled, Full, Partial };
std::string infidelity_mode_name(InfidelityMode mode);
// Single-qubit twirl set for a mode: {I}, {I,X,Y,Z} or {I,X,Z}.
TwirlSet single_qubit_twirl(InfidelityMode mode);

// Single-qubit Z over-rotation rho -> R rho R^dagger, R = cos(w/2) I + i sin(w/2) Z.
ChiMatrix z_rotation_chi(double omega);

struct LogicalErrorStats {
  double p_c = 0.0;    // sum of chi_EE over weight-1 errors
  double p_u = 1.0;    // 1 - p_c
  double r_bar = 1.0;  // cross terms over pairs with equal syndrome and equal data restriction
  double r_bar_stabilizer = 1.0;  // cross terms over pairs with E E' in the stabilizer group
};

// chi of the n-qubit channel is the tensor power of the (twirled) single-qubit chi;
// entries are evaluated lazily so n = 6 stays cheap.
LogicalErrorStats logical_error_stats(const CodeSpec& code, const ChiMatrix& single_qubit,
                                      const TwirlSet& per_qubit_twirl);

// The printed closed forms; partial at omega = 0 uses 1 - (38/9) c^6 s^2.
double closed_form_infidelity(double omega, InfidelityMode mode);
double closed_form_partial_simplified(double omega);

struct InfidelityRow {
  double omega = 0.0;
  InfidelityMode mode = InfidelityMode::Untwirled;
  LogicalErrorStats stats;
  double closed_form = 1.0;
};

std::vector<InfidelityRow> infidelity_curves(const std::vector<double>& omegas);
std::string infidelity_csv(const std::vector<InfidelityRow>& rows);

// ---------------------------------------------------------------------------
// Sampling overhead of three PEC settings under L layers of n-qubit depolarizing noise.

struct OverheadConfig {
  std::size_t n_unencoded = 4;
  std::size_t n_encoded = 6;
  std::vector<std::size_t> layers{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<double> error_rates{0.001, 0.002, 0.005, 0.01, 0.015, 0.02};
};

struct OverheadRow {
  std::size_t layers = 0;
  double p = 0.0;
  double gamma2_layer = 1.0;
  double gamma2_end = 1.0;
  double gamma2_hybrid = 1.0;
  double hybrid_acceptance = 1.0;
};

std::vector<OverheadRow> overhead_study(const OverheadConfig& config);
std::string overhead_csv(const std::vector<OverheadRow>& rows);

// ---------------------------------------------------------------------------
// H2 VQE experiment on the encoded compiled circuit.

// Which support qubit of a compiled Pauli exponential carries the Rz.
enum class RotationQubit { Last, First };

// exp(-i theta P / 2) for a Hermitian register Pauli as basis change, CX ladder,
// Rz and uncompute, one gate per layer. The ladder runs toward the rotation qubit.
Circuit compiled_pauli_exponential(const PauliString& p, double theta,
                                   RotationQubit rotation = RotationQubit::Last);
// Encoded |0...0>: H on q_x, then a nearest-neighbour CX chain from q_x through the register.
Circuit ghz_logical_zero(const CodeSpec& code);
// Logical UCC circuit exp(-i theta Y1 X2 / 2) on |00>.
Circuit logical_ucc_circuit(double theta);
// GHZ encoding -> compiled exp(-i theta Z1 X2 Y4 / 2) -> decode, starting from |0000>, with
// 2-qubit depolarizing(p) after every CX (none when p = 0).
Circuit encoded_vqe_circuit(const CodeSpec& code, double theta, double p,
                            RotationQubit rotation = RotationQubit::Last);
CodeSpec vqe_code();

enum class VqeMode { Noisy, Qedc, Hybrid };
std::string vqe_mode_name(VqeMode mode);
inline constexpr std::array<const char*, 4> kVqeObservables = {"Z1", "Z2", "Z1Z2", "X1X2"};
double vqe_ideal(std::size_t observable, double theta);

struct VqeConfig {
  std::vector<double> thetas;  // default: 13 points on [-pi/2, pi/2]
  double p = 0.01;
  std::uint64_t shots = 10000;
  std::size_t repetitions = 100;
  std::vector<VqeMode> modes{VqeMode::Noisy, VqeMode::Qedc, VqeMode::Hybrid};
  std::optional<ReadoutModel> readout;  // on the 4-qubit register
  std::size_t ibu_iterations = 2;
  double probability_floor = 1e-12;
  RotationQubit rotation = RotationQubit::Last;
  std::uint64_t seed = 1;
};
std::vector<double> default_theta_grid();

struct VqePoint {
  double theta = 0.0;
  VqeMode mode = VqeMode::Noisy;
  std::size_t observable = 0;
  double mean = 0.0;
  double sigma = 0.0;  // standard deviation across repetitions
  double ideal = 0.0;
};

struct VqeThetaInfo {
  double theta = 0.0;
  double acceptance = 1.0;  // exact post-selection probability, Z-basis circuit
  double gamma = 1.0;       // of the N_reduced inverse
  PauliChannel reduced;
  std::array<double, 4> offdiagonal_bias{};
};

struct VqeResult {
  std::vector<VqePoint> points;
  std::vector<VqeThetaInfo> info;

  const VqePoint& at(std::size_t theta_index, VqeMode mode, std::size_t observable) const;
  // max over theta of |mean - ideal| for one observable (or all when observable = 4).
  double max_bias(VqeMode mode, std::size_t observable = 4) const;
};

// Logical noise of the encoded circuit at one theta: N_tot, filtered (decoded frame).
ErrorEnsemble vqe_logical_noise(const CodeSpec& code, double theta, double p,
                                double probability_floor = 1e-12,
                                RotationQubit rotation = RotationQubit::Last);
// Cross-term bias of the four observables on the ideal logical state.
std::array<double, 4> vqe_offdiagonal_bias(const ErrorEnsemble& logical, double theta);

VqeResult run_vqe_experiment(const VqeConfig& config);
std::string expectations_csv(const VqeResult& result);

// ---------------------------------------------------------------------------
// Potential energy surface.

struct PesOptions {
  std::size_t grid_points = 2000;
  double tolerance_bits = 40;
};

struct PesRow {
  double r = 0.0;
  double theta_min = 0.0;
  double energy = 0.0;
};

// Natural cubic spline per observable over theta, E(theta; R) minimized on a dense grid with
// Brent refinement. `expectations[i]` belongs to `thetas[i]`.
std::vector<PesRow> pes_curve(const std::vector<double>& thetas,
                              const std::vector<H2Expectations>& expectations,
                              const std::vector<H2Coefficients>& table,
                              const PesOptions& options = {});
std::vector<H2Expectations> vqe_expectation_table(const VqeResult& result, VqeMode mode);
std::string pes_csv(const std::vector<std::pair<std::string, std::vector<PesRow>>>& curves);

}  // namespace hqem
