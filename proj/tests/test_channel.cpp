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
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "hqem/channel.hpp"
#include "hqem/errors.hpp"
#include "hqem/sim.hpp"

namespace {

using namespace hqem;

PauliChannel random_channel(std::size_t n, std::mt19937_64& rng, double error_scale = 0.2) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> r(pauli_count(n));
  double sum = 0.0;
  for (std::size_t j = 1; j < r.size(); ++j) sum += r[j] = u(rng);
  for (std::size_t j = 1; j < r.size(); ++j) r[j] *= error_scale / sum;
  r[0] = 1.0 - error_scale;
  return PauliChannel(n, r);
}

Eigen::MatrixXcd random_density(std::size_t n, std::mt19937_64& rng) {
  const auto d = static_cast<Eigen::Index>(1) << n;
  std::normal_distribution<double> g;
  Eigen::MatrixXcd a(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) a(i, j) = {g(rng), g(rng)};
  Eigen::MatrixXcd rho = a * a.adjoint();
  return rho / rho.trace();
}

TEST(ChannelTest, DepolarizingRatesAndFidelities) {
  const PauliChannel c = depolarizing(1, 0.04);
  EXPECT_NEAR(c.rates()[0], 0.97, 1e-15);
  for (std::size_t j = 1; j < 4; ++j) EXPECT_NEAR(c.rates()[j], 0.01, 1e-15);
  const FidelityVector f = fidelities_from_rates(c);
  EXPECT_NEAR(f.values()[0], 1.0, 1e-15);
  for (std::size_t j = 1; j < 4; ++j) EXPECT_NEAR(f.values()[j], 0.96, 1e-15);
  const auto& r = c.rates();
  EXPECT_NEAR(f.values()[1], r[0] + r[1] - r[2] - r[3], 1e-15);
}

TEST(ChannelTest, IdentityChannel) {
  const FidelityVector f = fidelities_from_rates(PauliChannel::identity(2));
  for (double v : f.values()) EXPECT_DOUBLE_EQ(v, 1.0);
  const QuasiProbability q = invert_pauli_channel(PauliChannel::identity(2));
  EXPECT_DOUBLE_EQ(q.gamma(), 1.0);
  EXPECT_DOUBLE_EQ(q.eta()[0], 1.0);
  for (std::size_t j = 1; j < 16; ++j) EXPECT_DOUBLE_EQ(q.eta()[j], 0.0);
}

TEST(ChannelTest, DepolarizingInverseGamma) {
  const double p = 0.01;
  const QuasiProbability q = invert_pauli_channel(depolarizing(1, p));
  EXPECT_NEAR(q.gamma(), (2 + p) / (2 * (1 - p)), 1e-12);
  EXPECT_NEAR(q.gamma(), 1.015152, 1e-6);
  EXPECT_NEAR(q.gamma() * q.gamma(), 1.03053, 1e-5);
}

TEST(ChannelTest, FourQubitDepolarizingPtmDiagonal) {
  EXPECT_EQ(depolarizing(4, 0.0).rates()[0], 1.0);
  const FidelityVector f = fidelities_from_rates(depolarizing(4, 0.02));
  ASSERT_EQ(f.values().size(), 256u);
  EXPECT_NEAR(f.values()[0], 1.0, 1e-14);
  for (std::size_t j = 1; j < 256; ++j) EXPECT_NEAR(f.values()[j], 0.98, 1e-14);
}

TEST(ChannelTest, ComposeDepolarizing) {
  const double p = 0.03;
  const PauliChannel c = compose(depolarizing(1, p), depolarizing(1, p));
  const FidelityVector f = fidelities_from_rates(c);
  for (std::size_t j = 1; j < 4; ++j) EXPECT_NEAR(f.values()[j], (1 - p) * (1 - p), 1e-15);
  const PauliChannel d = depolarizing(2, 0.1);
  const PauliChannel same = compose(PauliChannel::identity(2), d);
  for (std::size_t j = 0; j < 16; ++j) EXPECT_NEAR(same.rates()[j], d.rates()[j], 1e-15);
}

TEST(ChannelTest, SingularInverseNamesLabel) {
  std::vector<double> f(4, 1.0);
  f[3] = 1e-8;
  try {
    (void)invert_pauli_channel(FidelityVector(1, f));
    FAIL() << "expected SingularChannelError";
  } catch (const SingularChannelError& e) {
    EXPECT_EQ(e.label(), 3u);
  }
}

TEST(ChannelTest, RzChiEntries) {
  const double w = 0.7;
  const Eigen::Matrix2cd rz =
      std::cos(w / 2) * Eigen::Matrix2cd::Identity() +
      std::complex<double>(0, std::sin(w / 2)) * Eigen::Matrix2cd(Eigen::Vector2cd(1, -1).asDiagonal());
  const ChiMatrix chi = chi_of_kraus({KrausTerm{{1.0, 0.0}, rz}});
  const double c = std::cos(w / 2), s = std::sin(w / 2);
  EXPECT_NEAR(std::abs(chi(0, 0) - c * c), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(chi(3, 3) - s * s), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(chi(0, 3) - std::complex<double>(0, -c * s)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(chi(3, 0) - std::complex<double>(0, c * s)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(chi(1, 1)) + std::abs(chi(2, 2)) + std::abs(chi(0, 1)), 0.0, 1e-14);
}

TEST(ChannelTest, PauliChannelChiIsDiagonal) {
  std::mt19937_64 rng(3);
  const PauliChannel c = random_channel(2, rng);
  std::vector<KrausTerm> kraus;
  for (std::size_t j = 0; j < 16; ++j)
    kraus.push_back({std::sqrt(c.rates()[j]), PauliString::from_label(2, PauliLabel(j)).matrix()});
  const ChiMatrix chi = chi_of_kraus(kraus);
  EXPECT_LT(chi.offdiagonal_norm(), 1e-14);
  for (std::size_t j = 0; j < 16; ++j) EXPECT_NEAR(chi.diagonal()[j], c.rates()[j], 1e-14);
}

TEST(ChannelTest, NonTracePreservingKrausRejected) {
  EXPECT_THROW((void)chi_of_kraus({KrausTerm{{0.5, 0.0}, Eigen::Matrix2cd::Identity()}}),
               ValidationError);
}

TEST(ChannelPropertyTest, WalshHadamardRoundTrip) {
  std::mt19937_64 rng(4);
  for (std::size_t n = 1; n <= 3; ++n) {
    for (int trial = 0; trial < 10; ++trial) {
      const PauliChannel c = random_channel(n, rng);
      const PauliChannel back = rates_from_fidelities(fidelities_from_rates(c));
      for (std::size_t j = 0; j < c.rates().size(); ++j)
        EXPECT_NEAR(back.rates()[j], c.rates()[j], 1e-12);
    }
  }
}

TEST(ChannelPropertyTest, ComposeWithInverseIsIdentity) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const PauliChannel c = random_channel(2, rng);
    const FidelityVector f = fidelities_from_rates(c);
    const QuasiProbability q = invert_pauli_channel(f);
    std::vector<double> finv = q.eta();
    walsh_hadamard(finv, 2);
    for (std::size_t k = 0; k < 16; ++k) EXPECT_NEAR(finv[k] * f.values()[k], 1.0, 1e-10);
    EXPECT_GE(q.gamma(), 1.0);
  }
}

TEST(ChannelPropertyTest, GammaApproachesOne) {
  double previous = 1e9;
  for (double p : {0.2, 0.1, 0.01, 1e-3, 1e-5}) {
    const double g = invert_pauli_channel(depolarizing(2, p)).gamma();
    EXPECT_GE(g, 1.0);
    EXPECT_LT(g, previous);
    previous = g;
  }
  EXPECT_NEAR(previous, 1.0, 1e-4);
}

TEST(ChannelPropertyTest, ConvolutionMatchesCompose) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    const PauliChannel a = random_channel(2, rng);
    const PauliChannel b = random_channel(2, rng);
    const PauliChannel x = compose(a, b);
    const PauliChannel y = convolve_rates(a, b);
    for (std::size_t j = 0; j < 16; ++j) EXPECT_NEAR(x.rates()[j], y.rates()[j], 1e-12);
  }
}

TEST(ChannelPropertyTest, PtmMatchesDenseSimulation) {
  std::mt19937_64 rng(7);
  const PauliChannel a = random_channel(2, rng);
  const PauliChannel b = random_channel(2, rng);
  const PauliChannel ab = compose(a, b);
  const Eigen::MatrixXcd rho = random_density(2, rng);
  DensityMatrix dense(2, rho);
  dense.apply_pauli_channel(a, {0, 1});
  dense.apply_pauli_channel(b, {0, 1});
  const Eigen::MatrixXd ptm = ChiMatrix::from_pauli_channel(ab).ptm();
  const FidelityVector f = fidelities_from_rates(ab);
  for (std::size_t k = 0; k < 16; ++k) {
    const PauliString pk = PauliString::from_label(2, PauliLabel(k));
    EXPECT_NEAR(ptm(k, k), f.values()[k], 1e-12);
    const double in = trace_with(pk, rho).real();
    const double out = trace_with(pk, dense.matrix()).real();
    EXPECT_NEAR(out, f.values()[k] * in, 1e-10);
  }
}

TEST(ChannelPropertyTest, ChiHermitianPsdOnRandomMixtures) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::MatrixXcd a(4, 4);
    for (Eigen::Index i = 0; i < 4; ++i)
      for (Eigen::Index j = 0; j < 4; ++j) a(i, j) = {g(rng), g(rng)};
    const Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
    const Eigen::MatrixXcd u = qr.householderQ();
    const double w = std::uniform_real_distribution<double>(0, 1)(rng);
    const ChiMatrix chi = chi_of_kraus({KrausTerm{{std::sqrt(w), 0.0}, u},
                                        KrausTerm{{std::sqrt(1 - w), 0.0}, Eigen::MatrixXcd::Identity(4, 4)}});
    EXPECT_TRUE(chi.is_hermitian());
    EXPECT_TRUE(chi.is_positive_semidefinite());
    EXPECT_NEAR(chi.matrix().trace().real(), 1.0, 1e-12);
  }
}

TEST(ChannelTest, QuasiProbabilitySampling) {
  const QuasiProbability q = invert_pauli_channel(depolarizing(1, 0.2));
  std::mt19937_64 rng(9);
  std::vector<int> hits(4, 0);
  const int n = 200000;
  for (int i = 0; i < n; ++i) ++hits[q.sample(rng).value()];
  for (std::size_t j = 0; j < 4; ++j) {
    const double p = q.probability(PauliLabel(j));
    EXPECT_NEAR(hits[j] / double(n), p, 4 * std::sqrt(p * (1 - p) / n));
  }
  EXPECT_EQ(q.sign(PauliLabel(1)), -1);
  EXPECT_EQ(q.sign(PauliLabel(0)), 1);
}

TEST(ChannelTest, JsonRoundTrip) {
  const PauliChannel c = depolarizing(2, 0.05);
  const PauliChannel back = pauli_channel_from_json(to_json(c));
  EXPECT_EQ(back.n_qubits(), 2u);
  for (std::size_t j = 0; j < 16; ++j) EXPECT_DOUBLE_EQ(back.rates()[j], c.rates()[j]);
}

TEST(ChannelTest, TensorOfDepolarizing) {
  const PauliChannel t = tensor(depolarizing(1, 0.1), PauliChannel::identity(1));
  EXPECT_NEAR(t.rate(PauliLabel(4)), 0.1 / 4, 1e-15);  // XI
  EXPECT_NEAR(t.rate(PauliLabel(1)), 0.0, 1e-15);      // IX
}

}  // namespace
