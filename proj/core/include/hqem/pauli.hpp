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

#include <compare>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace hqem {

// Register convention used throughout: qubit 0 is the leftmost letter of a
// Pauli spelling and the most significant tensor factor. In the bit masks,
// qubit q lives at bit (n - 1 - q), so "XI" has x_mask 0b10. Computational
// basis indices follow the same rule.
inline constexpr std::size_t kMaxPauliQubits = 32;

// Phase-free Pauli index: base-4 digits with qubit 0 most significant and
// per-qubit digit I=0, X=1, Y=2, Z=3.
class PauliLabel {
 public:
  constexpr PauliLabel() = default;
  constexpr explicit PauliLabel(std::uint64_t value) : value_(value) {}
  constexpr std::uint64_t value() const { return value_; }
  constexpr auto operator<=>(const PauliLabel&) const = default;

 private:
  std::uint64_t value_ = 0;
};

class PauliString {
 public:
  PauliString() = default;
  explicit PauliString(std::size_t n_qubits);
  // phase_exponent k encodes the unit i^k multiplying the Hermitian string.
  PauliString(std::size_t n_qubits, std::uint64_t x_mask, std::uint64_t z_mask,
              unsigned phase_exponent = 0);

  static PauliString parse(std::string_view text);
  static PauliString from_label(std::size_t n_qubits, PauliLabel label);
  static PauliString single(std::size_t n_qubits, std::size_t qubit, char letter);

  std::size_t n_qubits() const { return n_; }
  std::uint64_t x_mask() const { return x_; }
  std::uint64_t z_mask() const { return z_; }
  unsigned phase_exponent() const { return phase_; }
  std::complex<double> phase() const;

  char letter(std::size_t qubit) const;
  PauliLabel label() const;
  PauliString unsigned_part() const { return PauliString(n_, x_, z_, 0); }
  PauliString with_phase(unsigned phase_exponent) const {
    return PauliString(n_, x_, z_, phase_exponent);
  }
  PauliString negated() const { return with_phase(phase_ + 2); }

  bool is_identity() const { return x_ == 0 && z_ == 0; }
  bool is_hermitian() const { return (phase_ & 1U) == 0; }
  std::size_t weight() const;
  std::uint64_t support_mask() const { return x_ | z_; }

  // Signed spelling, e.g. "+XI", "-iY"; parse(str()) round-trips.
  std::string str() const;
  // Letters only, no phase.
  std::string letters() const;

  // Places this k-qubit string on `positions` of an n_total register.
  PauliString embed(std::size_t n_total, std::span<const std::size_t> positions) const;
  // Keeps only `positions`, in the given order; phase retained.
  PauliString restrict_to(std::span<const std::size_t> positions) const;

  Eigen::MatrixXcd matrix() const;

  friend bool operator==(const PauliString& a, const PauliString& b) {
    return a.n_ == b.n_ && a.x_ == b.x_ && a.z_ == b.z_ && a.phase_ == b.phase_;
  }

 private:
  std::size_t n_ = 0;
  std::uint64_t x_ = 0;
  std::uint64_t z_ = 0;
  unsigned phase_ = 0;
};

int symplectic_product(const PauliString& p, const PauliString& q);
inline bool commutes(const PauliString& p, const PauliString& q) {
  return symplectic_product(p, q) == 0;
}
PauliString multiply(const PauliString& p, const PauliString& q);
inline PauliString operator*(const PauliString& p, const PauliString& q) {
  return multiply(p, q);
}

// Tr(P M) for a dense 2^n x 2^n matrix, O(2^n).
std::complex<double> trace_with(const PauliString& p, const Eigen::MatrixXcd& m);

std::string format(const PauliString& p);
PauliString parse_pauli(std::string_view text);

// Number of Paulis on n qubits (4^n).
std::uint64_t pauli_count(std::size_t n_qubits);
std::string label_letters(std::size_t n_qubits, PauliLabel label);
// Symplectic product computed directly on labels.
int label_symplectic_product(std::uint64_t a, std::uint64_t b);
// Label of the phase-free product P_a P_b.
inline std::uint64_t label_product(std::uint64_t a, std::uint64_t b) {
  // With I=0,X=1,Y=2,Z=3 the digit product is not plain XOR; remap to
  // (x, z) bit pairs where the product is XOR.
  std::uint64_t out = 0;
  std::uint64_t shift = 1;
  constexpr unsigned to_xz[4] = {0, 1, 3, 2};
  constexpr unsigned from_xz[4] = {0, 1, 3, 2};
  while (a != 0 || b != 0) {
    out += shift * from_xz[to_xz[a & 3U] ^ to_xz[b & 3U]];
    a >>= 2;
    b >>= 2;
    shift <<= 2;
  }
  return out;
}

}  // namespace hqem

template <>
struct std::hash<hqem::PauliLabel> {
  std::size_t operator()(const hqem::PauliLabel& l) const noexcept {
    return std::hash<std::uint64_t>{}(l.value());
  }
};
