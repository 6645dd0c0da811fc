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

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hqem/pauli.hpp"

namespace hqem {

// Linear combination sum_r a_r P_r over phase-free Pauli strings. Products of
// propagated errors pick up relative factors of i, so coefficients are complex.
class GeneralizedError {
 public:
  struct Term {
    PauliString op;  // phase +1
    std::complex<double> coeff;
  };

  GeneralizedError() = default;
  static GeneralizedError identity(std::size_t n_qubits);
  static GeneralizedError from_pauli(const PauliString& p);
  // Terms are merged and sorted; no normalization is applied.
  static GeneralizedError from_terms(std::size_t n_qubits, std::vector<Term> terms);

  std::size_t n_qubits() const { return n_; }
  const std::vector<Term>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_pauli() const { return terms_.size() == 1; }

  double norm_squared() const;
  GeneralizedError normalized() const;
  // Divides out the phase of the leading term so E and e^{i phi} E compare equal.
  GeneralizedError phase_canonical() const;
  // Drops terms with |a| <= tol * max|a|.
  GeneralizedError pruned(double tol) const;

  GeneralizedError left_multiplied(const PauliString& p) const;
  GeneralizedError right_multiplied(const PauliString& p) const;

  Eigen::MatrixXcd matrix() const;
  std::string str() const;

  friend GeneralizedError operator*(const GeneralizedError& a, const GeneralizedError& b);

 private:
  GeneralizedError(std::size_t n, std::vector<Term> terms) : n_(n), terms_(std::move(terms)) {}
  void merge_sorted();

  std::size_t n_ = 0;
  std::vector<Term> terms_;
};

}  // namespace hqem
