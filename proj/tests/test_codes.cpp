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

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "hqem/codes.hpp"
#include "hqem/errors.hpp"
#include "hqem/sim.hpp"

namespace {

using namespace hqem;
using cd = std::complex<double>;

PauliString P(const char* s) { return PauliString::parse(s); }

Eigen::VectorXcd random_state(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::VectorXcd v(Eigen::Index{1} << n);
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = {g(rng), g(rng)};
  return v.normalized();
}

Eigen::Matrix2cd random_unitary(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::Matrix2cd a;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) a(i, j) = {g(rng), g(rng)};
  Eigen::HouseholderQR<Eigen::Matrix2cd> qr(a);
  return qr.householderQ();
}

// Probability that the checks flag after decode, for a one-qubit error on the encoded state.
double detection_probability(const CodeSpec& code, const Eigen::VectorXcd& logical,
                             const Eigen::MatrixXcd& error, std::size_t qubit) {
  const Eigen::VectorXcd in = unencoded_input(code, logical);
  DensityMatrix rho = run_density(encode_circuit(code), DensityMatrix::from_statevector(in));
  rho.apply_unitary(error, {qubit});
  rho = run_density(decode_circuit(code), rho);
  rho = run_density(check_readout_circuit(code), rho);
  const auto probs = rho.probabilities();
  std::vector<std::uint64_t> hist(probs.size());
  double accepted = 0;
  const auto& l = *code.layout;
  const std::size_t n = code.n_physical;
  for (std::size_t idx = 0; idx < probs.size(); ++idx)
    if (((idx >> (n - 1 - l.check_x)) & 1U) == 0 && ((idx >> (n - 1 - l.check_z)) & 1U) == 0)
      accepted += probs[idx];
  return 1.0 - accepted;
}

TEST(CodesTest, FourQubitLogicals) {
  const CodeSpec code = qedc(4);
  EXPECT_EQ(code.k_logical, 2u);
  EXPECT_EQ(code.logical_x[0], P("IXIX"));
  EXPECT_EQ(code.logical_x[1], P("IXXI"));
  EXPECT_EQ(code.logical_z[0], P("ZIIZ"));
  EXPECT_EQ(code.logical_z[1], P("ZIZI"));
  EXPECT_EQ(code.generators[0], P("XXXX"));
  EXPECT_EQ(code.generators[1], P("ZZZZ"));
}

TEST(CodesTest, SixQubitCode) {
  const CodeSpec code = qedc(6);
  EXPECT_EQ(code.k_logical, 4u);
  for (const auto& g : code.generators) EXPECT_EQ(g.weight(), 6u);
  EXPECT_NO_THROW(code.validate());
}

TEST(CodesTest, OddOrSmallSizesRejected) {
  EXPECT_THROW((void)qedc(5), UnsupportedParameterError);
  EXPECT_THROW((void)qedc(2), UnsupportedParameterError);
}

TEST(CodesTest, LogicalZeroCodeword) {
  const CodeSpec code = qedc(4);
  const Eigen::VectorXcd zero = Eigen::Vector4cd(1, 0, 0, 0);
  const Eigen::MatrixXcd u = circuit_unitary(encode_circuit(code));
  const Eigen::VectorXcd out = u * unencoded_input(code, zero);
  Eigen::VectorXcd expected = Eigen::VectorXcd::Zero(16);
  expected(0) = expected(15) = 1 / std::sqrt(2.0);
  EXPECT_NEAR(std::abs(expected.dot(out)), 1.0, 1e-14);
}

TEST(CodesTest, EncodeDecodeInverse) {
  for (std::size_t n : {4u, 6u}) {
    const CodeSpec code = qedc(n);
    const auto d = Eigen::Index{1} << n;
    const Eigen::MatrixXcd u =
        circuit_unitary(decode_circuit(code)) * circuit_unitary(encode_circuit(code));
    EXPECT_LT((u - Eigen::MatrixXcd::Identity(d, d)).norm(), 1e-12);
  }
}

TEST(CodesPropertyTest, StabilizersOnEncodedStates) {
  std::mt19937_64 rng(31);
  for (const CodeSpec& code : {qedc(4), qedc(4, QedcLayout::compiled_four()), qedc(6)}) {
    for (int trial = 0; trial < 5; ++trial) {
      const Eigen::VectorXcd in = unencoded_input(code, random_state(code.k_logical, rng));
      const DensityMatrix rho =
          run_density(encode_circuit(code), DensityMatrix::from_statevector(in));
      for (const auto& g : code.generators) EXPECT_NEAR(expectation(rho, g), 1.0, 1e-12);
    }
  }
}

TEST(CodesPropertyTest, WeightOneErrorsDetected) {
  for (std::size_t n : {4u, 6u}) {
    const CodeSpec code = qedc(n);
    std::size_t detected = 0;
    for (std::size_t q = 0; q < n; ++q)
      for (char letter : {'X', 'Y', 'Z'}) detected += code.detects(PauliString::single(n, q, letter));
    EXPECT_EQ(detected, 3 * n);
  }
}

TEST(CodesPropertyTest, LogicalOperatorsCommuteWithGenerators) {
  for (std::size_t n : {4u, 6u}) {
    const CodeSpec code = qedc(n);
    for (std::size_t j = 0; j < code.k_logical; ++j) {
      for (const auto& g : code.generators) {
        EXPECT_TRUE(commutes(code.logical_x[j], g));
        EXPECT_TRUE(commutes(code.logical_z[j], g));
      }
      for (std::size_t i = 0; i < code.k_logical; ++i)
        EXPECT_EQ(commutes(code.logical_x[j], code.logical_z[i]), i != j);
    }
  }
}

TEST(CodesTest, CompiledLayoutImageOfYX) {
  const CodeSpec code = qedc(4, QedcLayout::compiled_four());
  EXPECT_EQ(logical_image(code, P("YX")), P("ZXIY"));
  EXPECT_EQ(logical_image(qedc(4), P("YX")), P("ZIXY"));
  EXPECT_THROW((void)logical_image(code, P("YXZ")), MappingError);
  EXPECT_THROW((void)logical_image(code, P("iYX")), MappingError);
}

TEST(CodesTest, EncodedExponentialIdentity) {
  const CodeSpec code = qedc(4, QedcLayout::compiled_four());
  const Eigen::MatrixXcd enc = circuit_unitary(encode_circuit(code));
  const Eigen::MatrixXcd dec = circuit_unitary(decode_circuit(code));
  for (int i = 0; i < 20; ++i) {
    const double theta = -std::numbers::pi + 2 * std::numbers::pi * i / 19.0;
    const Gate g = encoded_exponential(code, P("YX"), theta);
    EXPECT_EQ(g.register_pauli(4), P("ZXIY"));
    Circuit c(4);
    c.add_gate(g);
    const Eigen::MatrixXcd phys = dec * circuit_unitary(c) * enc;
    const Eigen::MatrixXcd logical = Gate::pauli_exp(P("YX"), theta).matrix();
    for (Eigen::Index a = 0; a < 4; ++a) {
      const Eigen::VectorXcd basis = Eigen::VectorXcd::Unit(4, a);
      const Eigen::VectorXcd got = phys * unencoded_input(code, basis);
      const Eigen::VectorXcd want = unencoded_input(code, logical * basis);
      EXPECT_LT((got - want).norm(), 1e-10) << theta;
    }
  }
  Circuit zero(4);
  zero.add_gate(encoded_exponential(code, P("YX"), 0.0));
  EXPECT_LT((circuit_unitary(zero) - Eigen::MatrixXcd::Identity(16, 16)).norm(), 1e-15);
}

TEST(CodesTest, PostSelectCounts) {
  const CodeSpec code = qedc(4);
  const PostSelectionResult clean = post_select({{"0000", 50}, {"0011", 50}}, code);
  EXPECT_DOUBLE_EQ(clean.acceptance_rate, 1.0);
  EXPECT_EQ(clean.accepted.at("11"), 50u);
  const PostSelectionResult mixed = post_select({{"0001", 30}, {"1000", 10}, {"0110", 60}}, code);
  EXPECT_DOUBLE_EQ(mixed.acceptance_rate, 0.3);
  EXPECT_EQ(mixed.rejected, 70u);
  EXPECT_EQ(mixed.accepted.at("10"), 30u);
}

TEST(CodesTest, InjectedXErrorRejected) {
  const CodeSpec code = qedc(4);
  const Eigen::VectorXcd in = unencoded_input(code, Eigen::Vector4cd(1, 0, 0, 0));
  Circuit c = encode_circuit(code);
  c.add_gate(Gate::x(2));
  c.append(decode_circuit(code));
  c.append(check_readout_circuit(code));
  const DensityMatrix out = run_density(c, DensityMatrix::from_statevector(in));
  const PostSelectionResult r = post_select(sample_counts(out, 1000, std::nullopt, 3), code);
  EXPECT_EQ(r.acceptance_rate, 0.0);

  Circuit clean = encode_circuit(code);
  clean.append(decode_circuit(code));
  clean.append(check_readout_circuit(code));
  const DensityMatrix ok = run_density(clean, DensityMatrix::from_statevector(in));
  EXPECT_EQ(post_select(sample_counts(ok, 1000, std::nullopt, 3), code).acceptance_rate, 1.0);
}

TEST(CodesTest, HadamardErrorAlwaysDetected) {
  const CodeSpec code = qedc(4);
  std::mt19937_64 rng(32);
  const Eigen::MatrixXcd h = Gate::h(0).matrix();
  for (std::size_t q = 0; q < 4; ++q)
    EXPECT_NEAR(detection_probability(code, random_state(2, rng), h, q), 1.0, 1e-12);
}

TEST(CodesPropertyTest, DetectionProbabilityOfUnitaryError) {
  std::mt19937_64 rng(33);
  const CodeSpec code = qedc(4);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Matrix2cd u = random_unitary(rng);
    const double expected = 1.0 - std::norm((u(0, 0) + u(1, 1)) / 2.0);
    const std::size_t q = static_cast<std::size_t>(trial % 4);
    EXPECT_NEAR(detection_probability(code, random_state(2, rng), u, q), expected, 1e-8);
  }
}

TEST(CodesTest, HistogramPostSelection) {
  const CodeSpec code = qedc(4);
  std::vector<std::uint64_t> hist(16, 0);
  hist[0b0011] = 7;
  hist[0b0100] = 5;
  hist[0b1001] = 2;
  std::uint64_t accepted = 0;
  const auto out = post_select_histogram(hist, code, &accepted);
  EXPECT_EQ(accepted, 7u);
  EXPECT_EQ(out[0b11], 7u);
  const auto marg = data_marginal_histogram(hist, code);
  EXPECT_EQ(marg[0b11], 7u);
  EXPECT_EQ(marg[0b00], 5u);
  EXPECT_EQ(marg[0b10], 2u);
}

TEST(BitflipTest, SingleXErrorsCorrected) {
  const BitflipCode code = bitflip_code();
  const double a = 0.6, b = 0.8;
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(32);
  psi(0) = a;
  psi(0b11100) = b;
  const DensityMatrix clean = DensityMatrix::from_statevector(psi);
  for (std::size_t q = 0; q < 3; ++q) {
    const PauliString err = PauliString::single(3, q, 'X');
    const auto [s1, s2] = code.syndrome_of(err);
    EXPECT_EQ(code.correction_for(s1, s2), static_cast<int>(q));
    DensityMatrix rho = clean;
    rho.apply_gate(Gate::x(q));
    code.syndrome_and_correct(rho);
    EXPECT_LT((rho.matrix() - clean.matrix()).norm(), 1e-12);
  }
  EXPECT_EQ(code.syndrome_of(P("XII")), std::make_pair(1, 0));
  EXPECT_EQ(code.syndrome_of(P("IXI")), std::make_pair(1, 1));
}

TEST(BitflipTest, NoErrorAndPhaseErrors) {
  const BitflipCode code = bitflip_code();
  EXPECT_EQ(code.syndrome_of(P("III")), std::make_pair(0, 0));
  EXPECT_EQ(code.correction_for(0, 0), -1);
  for (std::size_t q = 0; q < 3; ++q)
    EXPECT_EQ(code.syndrome_of(PauliString::single(3, q, 'Z')), std::make_pair(0, 0));

  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(32);
  psi(0) = psi(0b11100) = 1 / std::sqrt(2.0);
  const DensityMatrix clean = DensityMatrix::from_statevector(psi);
  DensityMatrix rho = clean;
  code.syndrome_and_correct(rho);
  EXPECT_LT((rho.matrix() - clean.matrix()).norm(), 1e-12);
  rho.apply_gate(Gate::z(1));
  code.syndrome_and_correct(rho);
  EXPECT_NEAR(expectation(rho, P("XXXII")), -1.0, 1e-12);
}

TEST(CodesTest, CodeJson) {
  const nlohmann::json j = to_json(qedc(4));
  EXPECT_EQ(j["n"], 4);
  EXPECT_EQ(j["generators"][0], "+XXXX");
}

}  // namespace
