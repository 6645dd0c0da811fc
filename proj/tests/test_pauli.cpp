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

#include <complex>
#include <random>
#include <string>

#include <gtest/gtest.h>

#include "hqem/errors.hpp"
#include "hqem/pauli.hpp"

namespace {

using hqem::PauliLabel;
using hqem::PauliString;

PauliString P(const char* s) { return PauliString::parse(s); }

PauliString random_pauli(std::size_t n, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::uint64_t> bits(0, (std::uint64_t{1} << n) - 1);
  std::uniform_int_distribution<unsigned> phase(0, 3);
  return PauliString(n, bits(rng), bits(rng), phase(rng));
}

TEST(PauliTest, BitConvention) {
  const PauliString xi = P("XI");
  EXPECT_EQ(xi.x_mask(), 0b10u);
  EXPECT_EQ(xi.z_mask(), 0u);
  EXPECT_EQ(xi.letter(0), 'X');
  EXPECT_EQ(P("IZ").label().value(), 3u);
  EXPECT_EQ(P("YI").label().value(), 8u);
}

TEST(PauliTest, SymplecticProduct) {
  EXPECT_EQ(hqem::symplectic_product(P("XI"), P("ZZ")), 1);
  EXPECT_EQ(hqem::symplectic_product(P("XX"), P("ZZ")), 0);
  EXPECT_TRUE(hqem::commutes(P("XXXX"), P("ZZZZ")));
  EXPECT_FALSE(hqem::commutes(P("Y"), P("Z")));
}

TEST(PauliTest, ProductPhases) {
  EXPECT_EQ(P("X") * P("Z"), P("-iY"));
  EXPECT_EQ(P("Z") * P("X"), P("iY"));
  EXPECT_EQ(P("X") * P("Y"), P("iZ"));
  EXPECT_EQ(P("XZ") * P("ZX"), P("YY"));
  EXPECT_EQ(P("Y") * P("Y"), P("I"));
}

TEST(PauliTest, ParseRejectsIllegalLetter) {
  try {
    (void)P("XQ");
    FAIL() << "expected ParseError";
  } catch (const hqem::ParseError& e) {
    EXPECT_EQ(e.position(), 1u);
  }
  EXPECT_THROW((void)P(""), hqem::ParseError);
  EXPECT_THROW((void)P("-i"), hqem::ParseError);
}

TEST(PauliTest, StringRoundTrip) {
  for (const char* s : {"+XI", "-iY", "+iZZXY", "-IIII"}) {
    EXPECT_EQ(P(s).str(), s);
    EXPECT_EQ(P(P(s).str().c_str()), P(s));
  }
  EXPECT_EQ(P("-iXY").letters(), "XY");
}

TEST(PauliTest, YIsIXZ) {
  const Eigen::MatrixXcd x = P("X").matrix();
  const Eigen::MatrixXcd z = P("Z").matrix();
  const Eigen::MatrixXcd y = P("Y").matrix();
  EXPECT_LT((y - std::complex<double>(0, 1) * x * z).norm(), 1e-15);
}

TEST(PauliTest, LabelRoundTrip) {
  for (std::uint64_t v = 0; v < hqem::pauli_count(3); ++v) {
    const PauliString p = PauliString::from_label(3, PauliLabel(v));
    EXPECT_EQ(p.label().value(), v);
    EXPECT_EQ(hqem::label_letters(3, PauliLabel(v)), p.letters());
  }
}

TEST(PauliTest, EmbedAndRestrict) {
  const std::size_t pos[] = {3, 1};
  const PauliString e = P("-XZ").embed(4, pos);
  EXPECT_EQ(e, P("-IZIX"));
  EXPECT_EQ(e.restrict_to(pos), P("-XZ"));
}

TEST(PauliTest, TraceWith) {
  const Eigen::MatrixXcd m = P("XY").matrix();
  EXPECT_NEAR(hqem::trace_with(P("XY"), m).real(), 4.0, 1e-14);
  EXPECT_NEAR(std::abs(hqem::trace_with(P("XZ"), m)), 0.0, 1e-14);
}

TEST(PauliPropertyTest, MatrixHomomorphism) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const PauliString a = random_pauli(3, rng);
    const PauliString b = random_pauli(3, rng);
    EXPECT_LT(((a * b).matrix() - a.matrix() * b.matrix()).norm(), 1e-12);
    const bool dense_commute = (a.matrix() * b.matrix() - b.matrix() * a.matrix()).norm() < 1e-12;
    EXPECT_EQ(hqem::commutes(a, b), dense_commute);
  }
}

TEST(PauliPropertyTest, LabelProductMatchesStringProduct) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const PauliString a = random_pauli(4, rng).unsigned_part();
    const PauliString b = random_pauli(4, rng).unsigned_part();
    EXPECT_EQ(hqem::label_product(a.label().value(), b.label().value()),
              (a * b).label().value());
    EXPECT_EQ(hqem::label_symplectic_product(a.label().value(), b.label().value()),
              hqem::symplectic_product(a, b));
  }
}

TEST(PauliPropertyTest, Associativity) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const PauliString a = random_pauli(5, rng);
    const PauliString b = random_pauli(5, rng);
    const PauliString c = random_pauli(5, rng);
    EXPECT_EQ((a * b) * c, a * (b * c));
  }
}

TEST(PauliTest, LengthMismatchThrows) {
  EXPECT_THROW((void)(P("XI") * P("X")), hqem::DimensionError);
}

}  // namespace
