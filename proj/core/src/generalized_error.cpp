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

#include "hqem/generalized_error.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "hqem/errors.hpp"

namespace hqem {

GeneralizedError GeneralizedError::identity(std::size_t n_qubits) {
  return GeneralizedError(n_qubits, {{PauliString(n_qubits), {1.0, 0.0}}});
}

GeneralizedError GeneralizedError::from_pauli(const PauliString& p) {
  return GeneralizedError(p.n_qubits(), {{p.unsigned_part(), p.phase()}});
}

GeneralizedError GeneralizedError::from_terms(std::size_t n_qubits, std::vector<Term> terms) {
  for (auto& t : terms) {
    if (t.op.n_qubits() != n_qubits) {
      throw DimensionError("generalized error term has wrong register size");
    }
    t.coeff *= t.op.phase();
    t.op = t.op.unsigned_part();
  }
  GeneralizedError e(n_qubits, std::move(terms));
  e.merge_sorted();
  return e;
}

void GeneralizedError::merge_sorted() {
  std::sort(terms_.begin(), terms_.end(), [](const Term& a, const Term& b) {
    return a.op.label() < b.op.label();
  });
  std::vector<Term> merged;
  merged.reserve(terms_.size());
  for (auto& t : terms_) {
    if (!merged.empty() && merged.back().op.label() == t.op.label()) {
      merged.back().coeff += t.coeff;
    } else {
      merged.push_back(t);
    }
  }
  std::erase_if(merged, [](const Term& t) { return t.coeff == std::complex<double>(0.0); });
  terms_ = std::move(merged);
}

double GeneralizedError::norm_squared() const {
  double s = 0.0;
  for (const auto& t : terms_) s += std::norm(t.coeff);
  return s;
}

GeneralizedError GeneralizedError::normalized() const {
  const double nrm = std::sqrt(norm_squared());
  if (nrm == 0.0) throw ConsistencyError("cannot normalize an empty generalized error");
  GeneralizedError out = *this;
  for (auto& t : out.terms_) t.coeff /= nrm;
  return out;
}

GeneralizedError GeneralizedError::phase_canonical() const {
  if (terms_.empty()) return *this;
  const std::complex<double> lead = terms_.front().coeff;
  const std::complex<double> unit = lead / std::abs(lead);
  GeneralizedError out = *this;
  for (auto& t : out.terms_) t.coeff /= unit;
  out.terms_.front().coeff = std::abs(lead);
  return out;
}

GeneralizedError GeneralizedError::pruned(double tol) const {
  double mx = 0.0;
  for (const auto& t : terms_) mx = std::max(mx, std::abs(t.coeff));
  GeneralizedError out = *this;
  std::erase_if(out.terms_, [&](const Term& t) { return std::abs(t.coeff) <= tol * mx; });
  return out;
}

GeneralizedError GeneralizedError::left_multiplied(const PauliString& p) const {
  std::vector<Term> out;
  out.reserve(terms_.size());
  for (const auto& t : terms_) {
    const PauliString prod = p * t.op;
    out.push_back({prod.unsigned_part(), t.coeff * prod.phase()});
  }
  GeneralizedError e(n_, std::move(out));
  e.merge_sorted();
  return e;
}

GeneralizedError GeneralizedError::right_multiplied(const PauliString& p) const {
  std::vector<Term> out;
  out.reserve(terms_.size());
  for (const auto& t : terms_) {
    const PauliString prod = t.op * p;
    out.push_back({prod.unsigned_part(), t.coeff * prod.phase()});
  }
  GeneralizedError e(n_, std::move(out));
  e.merge_sorted();
  return e;
}

GeneralizedError operator*(const GeneralizedError& a, const GeneralizedError& b) {
  if (a.n_ != b.n_) throw DimensionError("generalized error size mismatch");
  std::vector<GeneralizedError::Term> out;
  out.reserve(a.terms_.size() * b.terms_.size());
  for (const auto& ta : a.terms_) {
    for (const auto& tb : b.terms_) {
      const PauliString prod = ta.op * tb.op;
      out.push_back({prod.unsigned_part(), ta.coeff * tb.coeff * prod.phase()});
    }
  }
  GeneralizedError e(a.n_, std::move(out));
  e.merge_sorted();
  return e;
}

Eigen::MatrixXcd GeneralizedError::matrix() const {
  const std::size_t dim = std::size_t{1} << n_;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& t : terms_) m += t.coeff * t.op.matrix();
  return m;
}

std::string GeneralizedError::str() const {
  std::string out;
  for (const auto& t : terms_) {
    if (!out.empty()) out += " + ";
    out += fmt::format("({:.6g}{:+.6g}i)*{}", t.coeff.real(), t.coeff.imag(), t.op.letters());
  }
  return out.empty() ? "0" : out;
}

}  // namespace hqem
