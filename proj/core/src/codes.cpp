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

#include "hqem/codes.hpp"

#include <algorithm>
#include <numbers>

#include <fmt/format.h>

#include "hqem/errors.hpp"

namespace hqem {

namespace {

PauliString letters_on(std::size_t n, const std::vector<std::size_t>& qubits, char letter) {
  std::string s(n, 'I');
  for (std::size_t q : qubits) s[q] = letter;
  return PauliString::parse(s);
}

const QedcLayout& require_layout(const CodeSpec& code) {
  if (!code.layout) throw DispatchError(fmt::format("{} is not a detection code", code.name));
  return *code.layout;
}

}  // namespace

QedcLayout QedcLayout::standard(std::size_t n) {
  if (n < 4 || n % 2 != 0) {
    throw UnsupportedParameterError(fmt::format("[[n,n-2,2]] needs even n >= 4, got {}", n));
  }
  std::vector<std::size_t> data;
  for (std::size_t j = 0; j + 2 < n; ++j) data.push_back(n - 1 - j);
  return from_positions(n, 0, 1, std::move(data));
}

QedcLayout QedcLayout::compiled_four() { return from_positions(4, 0, 2, {3, 1}); }

QedcLayout QedcLayout::from_positions(std::size_t n, std::size_t check_x, std::size_t check_z,
                                      std::vector<std::size_t> data) {
  if (data.size() + 2 != n) throw DimensionError("layout must place n - 2 logical qubits");
  std::vector<std::size_t> all = data;
  all.push_back(check_x);
  all.push_back(check_z);
  std::sort(all.begin(), all.end());
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (all[i] != i) throw DimensionError("layout positions must be a permutation of the register");
  }
  return QedcLayout{check_x, check_z, std::move(data)};
}

void CodeSpec::validate() const {
  for (std::size_t a = 0; a < generators.size(); ++a) {
    for (std::size_t b = a + 1; b < generators.size(); ++b) {
      if (!commutes(generators[a], generators[b])) {
        throw ValidationError(fmt::format("generators {} and {} anticommute",
                                          generators[a].str(), generators[b].str()));
      }
    }
  }
  if (logical_x.size() != k_logical || logical_z.size() != k_logical) {
    throw ValidationError("logical operator count does not match k");
  }
  for (std::size_t j = 0; j < k_logical; ++j) {
    for (const auto& g : generators) {
      if (!commutes(g, logical_x[j]) || !commutes(g, logical_z[j])) {
        throw ValidationError(fmt::format("logical operators of qubit {} leave the code space", j));
      }
    }
    for (std::size_t i = 0; i < k_logical; ++i) {
      const bool expect_anti = i == j;
      if (commutes(logical_x[i], logical_z[j]) == expect_anti) {
        throw ValidationError(fmt::format("logical X{} / Z{} commutation is wrong", i, j));
      }
      if (!commutes(logical_x[i], logical_x[j]) || !commutes(logical_z[i], logical_z[j])) {
        throw ValidationError("logical operators of the same type must commute");
      }
    }
  }
}

bool CodeSpec::detects(const PauliString& error) const {
  return std::any_of(generators.begin(), generators.end(),
                     [&](const PauliString& g) { return !commutes(g, error); });
}

std::vector<std::size_t> CodeSpec::check_positions() const {
  const QedcLayout& l = require_layout(*this);
  return {l.check_x, l.check_z};
}

CodeSpec qedc(std::size_t n, std::optional<QedcLayout> layout) {
  if (n < 4 || n % 2 != 0) {
    throw UnsupportedParameterError(fmt::format("[[n,n-2,2]] needs even n >= 4, got {}", n));
  }
  const QedcLayout l = layout ? *layout : QedcLayout::standard(n);
  if (l.data.size() + 2 != n) throw DimensionError("layout does not match n");
  CodeSpec code;
  code.name = fmt::format("[[{},{},2]]", n, n - 2);
  code.n_physical = n;
  code.k_logical = n - 2;
  std::vector<std::size_t> all(n);
  for (std::size_t q = 0; q < n; ++q) all[q] = q;
  code.generators = {letters_on(n, all, 'X'), letters_on(n, all, 'Z')};
  for (std::size_t j = 0; j < code.k_logical; ++j) {
    code.logical_x.push_back(letters_on(n, {l.check_z, l.data[j]}, 'X'));
    code.logical_z.push_back(letters_on(n, {l.check_x, l.data[j]}, 'Z'));
  }
  code.layout = l;
  code.validate();
  return code;
}

Circuit encode_circuit(const CodeSpec& code) {
  const QedcLayout& l = require_layout(code);
  Circuit c(code.n_physical);
  for (std::size_t q : l.data) c.add_gate(Gate::cx(q, l.check_z));
  c.add_gate(Gate::cx(l.check_x, l.check_z));
  for (std::size_t q : l.data) c.add_gate(Gate::cx(l.check_x, q));
  return c;
}

Circuit decode_circuit(const CodeSpec& code) { return encode_circuit(code).inverse(); }

Circuit check_readout_circuit(const CodeSpec& code) {
  const QedcLayout& l = require_layout(code);
  Circuit c(code.n_physical);
  c.add_gate(Gate::h(l.check_x));
  return c;
}

Eigen::VectorXcd unencoded_input(const CodeSpec& code, const Eigen::VectorXcd& logical_state) {
  const QedcLayout& l = require_layout(code);
  const std::size_t n = code.n_physical;
  const std::size_t k = code.k_logical;
  if (logical_state.size() != (Eigen::Index{1} << k)) {
    throw DimensionError("logical state does not match k");
  }
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(Eigen::Index{1} << n);
  const double r = std::numbers::sqrt2 / 2;
  for (Eigen::Index a = 0; a < logical_state.size(); ++a) {
    std::uint64_t idx = 0;
    for (std::size_t j = 0; j < k; ++j) {
      if ((static_cast<std::uint64_t>(a) >> (k - 1 - j)) & 1U) {
        idx |= std::uint64_t{1} << (n - 1 - l.data[j]);
      }
    }
    psi(static_cast<Eigen::Index>(idx)) += r * logical_state(a);
    psi(static_cast<Eigen::Index>(idx | (std::uint64_t{1} << (n - 1 - l.check_x)))) +=
        r * logical_state(a);
  }
  return psi;
}

PauliString logical_image(const CodeSpec& code, const PauliString& logical) {
  if (logical.n_qubits() != code.k_logical) {
    throw MappingError(fmt::format("{} acts on {} qubits, code has {} logical qubits",
                                   logical.str(), logical.n_qubits(), code.k_logical));
  }
  if (!logical.is_hermitian()) {
    throw MappingError(fmt::format("{} is not Hermitian", logical.str()));
  }
  PauliString out(code.n_physical);
  out = out.with_phase(logical.phase_exponent());
  for (std::size_t j = 0; j < code.k_logical; ++j) {
    switch (logical.letter(j)) {
      case 'X': out = out * code.logical_x[j]; break;
      case 'Z': out = out * code.logical_z[j]; break;
      case 'Y':
        out = out * code.logical_x[j] * code.logical_z[j];
        out = out.with_phase(out.phase_exponent() + 1);
        break;
      default: break;
    }
  }
  if (!out.is_hermitian()) throw MappingError("logical image is not Hermitian");
  return out;
}

Gate encoded_exponential(const CodeSpec& code, const PauliString& logical, double theta) {
  return Gate::pauli_exp(logical_image(code, logical), theta);
}

std::vector<std::uint64_t> post_select_histogram(const std::vector<std::uint64_t>& histogram,
                                                 const CodeSpec& code, std::uint64_t* accepted) {
  const QedcLayout& l = require_layout(code);
  const std::size_t n = code.n_physical;
  const std::size_t k = code.k_logical;
  if (histogram.size() != (std::size_t{1} << n)) throw DimensionError("histogram size mismatch");
  const std::uint64_t check_mask =
      (std::uint64_t{1} << (n - 1 - l.check_x)) | (std::uint64_t{1} << (n - 1 - l.check_z));
  std::vector<std::uint64_t> out(std::size_t{1} << k, 0);
  std::uint64_t acc = 0;
  for (std::size_t idx = 0; idx < histogram.size(); ++idx) {
    if (histogram[idx] == 0 || (idx & check_mask) != 0) continue;
    std::size_t d = 0;
    for (std::size_t j = 0; j < k; ++j) {
      d = (d << 1) | ((idx >> (n - 1 - l.data[j])) & 1U);
    }
    out[d] += histogram[idx];
    acc += histogram[idx];
  }
  if (accepted != nullptr) *accepted = acc;
  return out;
}

std::vector<std::uint64_t> data_marginal_histogram(const std::vector<std::uint64_t>& histogram,
                                                   const CodeSpec& code) {
  const QedcLayout& l = require_layout(code);
  const std::size_t n = code.n_physical;
  const std::size_t k = code.k_logical;
  std::vector<std::uint64_t> out(std::size_t{1} << k, 0);
  for (std::size_t idx = 0; idx < histogram.size(); ++idx) {
    std::size_t d = 0;
    for (std::size_t j = 0; j < k; ++j) d = (d << 1) | ((idx >> (n - 1 - l.data[j])) & 1U);
    out[d] += histogram[idx];
  }
  return out;
}

PostSelectionResult post_select(const Counts& counts, const CodeSpec& code) {
  const QedcLayout& l = require_layout(code);
  PostSelectionResult r;
  std::uint64_t total = 0;
  for (const auto& [bits, k] : counts) {
    if (bits.size() != code.n_physical) {
      throw DimensionError(fmt::format("bitstring '{}' does not span {} qubits", bits,
                                       code.n_physical));
    }
    total += k;
    if (bits[l.check_x] != '0' || bits[l.check_z] != '0') {
      r.rejected += k;
      continue;
    }
    std::string data;
    for (std::size_t q : l.data) data.push_back(bits[q]);
    r.accepted[data] += k;
    r.accepted_shots += k;
  }
  r.acceptance_rate = total == 0 ? 0.0 : static_cast<double>(r.accepted_shots) / static_cast<double>(total);
  return r;
}

Circuit BitflipCode::syndrome_circuit() const {
  Circuit c(register_size());
  c.add_gate(Gate::cx(data[0], ancillas[0]));
  c.add_gate(Gate::cx(data[1], ancillas[0]));
  c.add_gate(Gate::cx(data[1], ancillas[1]));
  c.add_gate(Gate::cx(data[2], ancillas[1]));
  return c;
}

std::pair<int, int> BitflipCode::syndrome_of(const PauliString& data_error) const {
  return {symplectic_product(spec.generators[0], data_error),
          symplectic_product(spec.generators[1], data_error)};
}

int BitflipCode::correction_for(int s1, int s2) const {
  if (s1 == 1 && s2 == 0) return 0;
  if (s1 == 1 && s2 == 1) return 1;
  if (s1 == 0 && s2 == 1) return 2;
  return -1;
}

std::vector<Eigen::MatrixXcd> BitflipCode::correction_kraus() const {
  const std::size_t n = register_size();
  const std::size_t dim = std::size_t{1} << n;
  std::vector<Eigen::MatrixXcd> ops;
  for (int s1 = 0; s1 < 2; ++s1) {
    for (int s2 = 0; s2 < 2; ++s2) {
      Eigen::MatrixXcd k = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim),
                                                  static_cast<Eigen::Index>(dim));
      const int flip = correction_for(s1, s2);
      const std::size_t a1 = std::size_t{1} << (n - 1 - ancillas[0]);
      const std::size_t a2 = std::size_t{1} << (n - 1 - ancillas[1]);
      for (std::size_t b = 0; b < dim; ++b) {
        if (((b & a1) != 0) != (s1 == 1) || ((b & a2) != 0) != (s2 == 1)) continue;
        std::size_t out = b & ~(a1 | a2);
        if (flip >= 0) out ^= std::size_t{1} << (n - 1 - data[static_cast<std::size_t>(flip)]);
        k(static_cast<Eigen::Index>(out), static_cast<Eigen::Index>(b)) = 1.0;
      }
      ops.push_back(std::move(k));
    }
  }
  return ops;
}

void BitflipCode::syndrome_and_correct(DensityMatrix& state) const {
  if (state.n_qubits() != register_size()) throw DimensionError("bit-flip code needs 5 qubits");
  const Circuit syndrome = syndrome_circuit();
  for (const auto& layer : syndrome.layers()) {
    for (const auto& g : layer.gates) state.apply_gate(g);
  }
  state.apply_kraus(correction_kraus(), {0, 1, 2, 3, 4});
}

BitflipCode bitflip_code() {
  BitflipCode b;
  b.spec.name = "bit-flip repetition code [[3,1]]";
  b.spec.n_physical = 3;
  b.spec.k_logical = 1;
  b.spec.generators = {PauliString::parse("ZZI"), PauliString::parse("IZZ")};
  b.spec.logical_x = {PauliString::parse("XXX")};
  b.spec.logical_z = {PauliString::parse("ZZZ")};
  b.spec.validate();
  return b;
}

nlohmann::json to_json(const CodeSpec& code) {
  auto spell = [](const std::vector<PauliString>& ps) {
    std::vector<std::string> out;
    for (const auto& p : ps) out.push_back(p.str());
    return out;
  };
  nlohmann::json j = {{"name", code.name},
                      {"n", code.n_physical},
                      {"k", code.k_logical},
                      {"generators", spell(code.generators)},
                      {"logical_x", spell(code.logical_x)},
                      {"logical_z", spell(code.logical_z)}};
  if (code.layout) {
    j["layout"] = {{"check_x", code.layout->check_x},
                   {"check_z", code.layout->check_z},
                   {"data", code.layout->data}};
  }
  return j;
}

}  // namespace hqem
