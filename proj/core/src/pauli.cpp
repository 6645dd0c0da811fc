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

#include "hqem/pauli.hpp"

#include <bit>

#include <fmt/format.h>

#include "hqem/errors.hpp"

namespace hqem {

namespace {

std::uint64_t low_mask(std::size_t n) {
  return n >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1);
}

void check_same_size(const PauliString& p, const PauliString& q) {
  if (p.n_qubits() != q.n_qubits()) {
    throw DimensionError(fmt::format("Pauli length mismatch: {} vs {} qubits",
                                     p.n_qubits(), q.n_qubits()));
  }
}

}  // namespace

PauliString::PauliString(std::size_t n_qubits) : PauliString(n_qubits, 0, 0, 0) {}

PauliString::PauliString(std::size_t n_qubits, std::uint64_t x_mask,
                         std::uint64_t z_mask, unsigned phase_exponent)
    : n_(n_qubits), x_(x_mask), z_(z_mask), phase_(phase_exponent & 3U) {
  if (n_qubits > kMaxPauliQubits) {
    throw DimensionError(fmt::format("Pauli strings support at most {} qubits, got {}",
                                     kMaxPauliQubits, n_qubits));
  }
  if (((x_mask | z_mask) & ~low_mask(n_qubits)) != 0) {
    throw DimensionError("Pauli mask has bits beyond the register");
  }
}

PauliString PauliString::parse(std::string_view text) {
  std::size_t pos = 0;
  unsigned k = 0;
  if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
    if (text[pos] == '-') k = 2;
    ++pos;
  }
  if (pos < text.size() && text[pos] == 'i') {
    k += 1;
    ++pos;
  }
  if (pos == text.size()) {
    throw ParseError(fmt::format("Pauli spelling '{}' has no letters", text), pos);
  }
  const std::size_t n = text.size() - pos;
  if (n > kMaxPauliQubits) {
    throw ParseError(fmt::format("Pauli spelling longer than {} letters", kMaxPauliQubits), pos);
  }
  std::uint64_t x = 0;
  std::uint64_t z = 0;
  for (std::size_t q = 0; q < n; ++q, ++pos) {
    const std::uint64_t bit = std::uint64_t{1} << (n - 1 - q);
    switch (text[pos]) {
      case 'I': break;
      case 'X': x |= bit; break;
      case 'Y': x |= bit; z |= bit; break;
      case 'Z': z |= bit; break;
      default:
        throw ParseError(
            fmt::format("illegal character '{}' at index {} in Pauli spelling '{}'",
                        text[pos], pos, text),
            pos);
    }
  }
  return PauliString(n, x, z, k);
}

PauliString PauliString::from_label(std::size_t n_qubits, PauliLabel label) {
  if (n_qubits < kMaxPauliQubits && label.value() >= pauli_count(n_qubits)) {
    throw DimensionError(fmt::format("label {} out of range for {} qubits",
                                     label.value(), n_qubits));
  }
  std::uint64_t x = 0;
  std::uint64_t z = 0;
  std::uint64_t v = label.value();
  for (std::size_t b = 0; b < n_qubits; ++b, v >>= 2) {
    const unsigned d = v & 3U;
    const std::uint64_t bit = std::uint64_t{1} << b;
    if (d == 1 || d == 2) x |= bit;
    if (d == 2 || d == 3) z |= bit;
  }
  return PauliString(n_qubits, x, z, 0);
}

PauliString PauliString::single(std::size_t n_qubits, std::size_t qubit, char letter) {
  if (qubit >= n_qubits) {
    throw DimensionError(fmt::format("qubit {} outside {}-qubit register", qubit, n_qubits));
  }
  const std::uint64_t bit = std::uint64_t{1} << (n_qubits - 1 - qubit);
  switch (letter) {
    case 'I': return PauliString(n_qubits);
    case 'X': return PauliString(n_qubits, bit, 0);
    case 'Y': return PauliString(n_qubits, bit, bit);
    case 'Z': return PauliString(n_qubits, 0, bit);
    default: throw ParseError(fmt::format("illegal Pauli letter '{}'", letter), 0);
  }
}

std::complex<double> PauliString::phase() const {
  static constexpr std::complex<double> units[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return units[phase_];
}

char PauliString::letter(std::size_t qubit) const {
  const std::uint64_t bit = std::uint64_t{1} << (n_ - 1 - qubit);
  const bool xb = (x_ & bit) != 0;
  const bool zb = (z_ & bit) != 0;
  if (xb) return zb ? 'Y' : 'X';
  return zb ? 'Z' : 'I';
}

PauliLabel PauliString::label() const {
  std::uint64_t v = 0;
  for (std::size_t b = n_; b-- > 0;) {
    const bool xb = ((x_ >> b) & 1U) != 0;
    const bool zb = ((z_ >> b) & 1U) != 0;
    const unsigned d = xb ? (zb ? 2U : 1U) : (zb ? 3U : 0U);
    v = (v << 2) | d;
  }
  return PauliLabel(v);
}

std::size_t PauliString::weight() const { return std::popcount(x_ | z_); }

std::string PauliString::letters() const {
  std::string out(n_, 'I');
  for (std::size_t q = 0; q < n_; ++q) out[q] = letter(q);
  return out;
}

std::string PauliString::str() const {
  static constexpr const char* prefixes[4] = {"+", "+i", "-", "-i"};
  return std::string(prefixes[phase_]) + letters();
}

PauliString PauliString::embed(std::size_t n_total,
                               std::span<const std::size_t> positions) const {
  if (positions.size() != n_) {
    throw DimensionError(fmt::format("embedding {}-qubit Pauli into {} positions", n_,
                                     positions.size()));
  }
  std::uint64_t x = 0;
  std::uint64_t z = 0;
  for (std::size_t i = 0; i < n_; ++i) {
    if (positions[i] >= n_total) {
      throw DimensionError(fmt::format("position {} outside {}-qubit register",
                                       positions[i], n_total));
    }
    const std::uint64_t src = std::uint64_t{1} << (n_ - 1 - i);
    const std::uint64_t dst = std::uint64_t{1} << (n_total - 1 - positions[i]);
    if ((x & dst) != 0 || (z & dst) != 0) {
      throw DimensionError("embedding positions repeat a qubit");
    }
    if ((x_ & src) != 0) x |= dst;
    if ((z_ & src) != 0) z |= dst;
  }
  return PauliString(n_total, x, z, phase_);
}

PauliString PauliString::restrict_to(std::span<const std::size_t> positions) const {
  const std::size_t k = positions.size();
  std::uint64_t x = 0;
  std::uint64_t z = 0;
  for (std::size_t i = 0; i < k; ++i) {
    if (positions[i] >= n_) {
      throw DimensionError(fmt::format("position {} outside {}-qubit register",
                                       positions[i], n_));
    }
    const std::uint64_t src = std::uint64_t{1} << (n_ - 1 - positions[i]);
    const std::uint64_t dst = std::uint64_t{1} << (k - 1 - i);
    if ((x_ & src) != 0) x |= dst;
    if ((z_ & src) != 0) z |= dst;
  }
  return PauliString(k, x, z, phase_);
}

Eigen::MatrixXcd PauliString::matrix() const {
  const std::size_t dim = std::size_t{1} << n_;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  const unsigned base = phase_ + std::popcount(x_ & z_);
  static constexpr std::complex<double> units[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  for (std::size_t c = 0; c < dim; ++c) {
    const unsigned k = base + 2U * (std::popcount(z_ & c) & 1U);
    m(c ^ x_, c) = units[k & 3U];
  }
  return m;
}

int symplectic_product(const PauliString& p, const PauliString& q) {
  check_same_size(p, q);
  return std::popcount((p.x_mask() & q.z_mask()) ^ (p.z_mask() & q.x_mask())) & 1;
}

PauliString multiply(const PauliString& p, const PauliString& q) {
  check_same_size(p, q);
  const std::uint64_t x = p.x_mask() ^ q.x_mask();
  const std::uint64_t z = p.z_mask() ^ q.z_mask();
  const int k = static_cast<int>(p.phase_exponent() + q.phase_exponent()) +
                std::popcount(p.x_mask() & p.z_mask()) +
                std::popcount(q.x_mask() & q.z_mask()) +
                2 * std::popcount(p.z_mask() & q.x_mask()) - std::popcount(x & z);
  return PauliString(p.n_qubits(), x, z, static_cast<unsigned>(((k % 4) + 4) % 4));
}

std::complex<double> trace_with(const PauliString& p, const Eigen::MatrixXcd& m) {
  const std::size_t dim = std::size_t{1} << p.n_qubits();
  if (static_cast<std::size_t>(m.rows()) != dim || static_cast<std::size_t>(m.cols()) != dim) {
    throw DimensionError(fmt::format("matrix is {}x{}, Pauli needs {}x{}", m.rows(), m.cols(),
                                     dim, dim));
  }
  static constexpr std::complex<double> units[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  const unsigned base = p.phase_exponent() + std::popcount(p.x_mask() & p.z_mask());
  std::complex<double> acc = 0.0;
  for (std::size_t c = 0; c < dim; ++c) {
    const unsigned k = base + 2U * (std::popcount(p.z_mask() & c) & 1U);
    acc += units[k & 3U] * m(c, c ^ p.x_mask());
  }
  return acc;
}

std::string format(const PauliString& p) { return p.str(); }

PauliString parse_pauli(std::string_view text) { return PauliString::parse(text); }

std::uint64_t pauli_count(std::size_t n_qubits) {
  if (n_qubits >= kMaxPauliQubits) {
    throw DimensionError("Pauli label space exceeds 64 bits");
  }
  return std::uint64_t{1} << (2 * n_qubits);
}

std::string label_letters(std::size_t n_qubits, PauliLabel label) {
  return PauliString::from_label(n_qubits, label).letters();
}

int label_symplectic_product(std::uint64_t a, std::uint64_t b) {
  // Single-qubit digits anticommute iff both non-identity and different.
  int s = 0;
  while (a != 0 && b != 0) {
    const unsigned da = a & 3U;
    const unsigned db = b & 3U;
    s ^= static_cast<int>(da != 0 && db != 0 && da != db);
    a >>= 2;
    b >>= 2;
  }
  return s;
}

}  // namespace hqem
