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

#include "hqem/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "hqem/errors.hpp"

namespace hqem {

namespace {

constexpr double kRateTolerance = 1e-12;

void check_length(std::size_t n, std::size_t size, const char* what) {
  if (size != pauli_count(n)) {
    throw DimensionError(fmt::format("{} vector has {} entries, {} qubits need {}", what, size,
                                     n, pauli_count(n)));
  }
}

std::size_t qubits_of_dim(Eigen::Index dim) {
  std::size_t n = 0;
  while ((Eigen::Index{1} << n) < dim) ++n;
  if ((Eigen::Index{1} << n) != dim) {
    throw DimensionError(fmt::format("matrix dimension {} is not a power of two", dim));
  }
  return n;
}

}  // namespace

PauliChannel::PauliChannel(std::size_t n_qubits, std::vector<double> rates)
    : n_(n_qubits), rates_(std::move(rates)) {
  check_length(n_, rates_.size(), "rate");
  double sum = 0.0;
  for (std::size_t j = 0; j < rates_.size(); ++j) {
    if (rates_[j] < -kRateTolerance || !std::isfinite(rates_[j])) {
      throw ValidationError(fmt::format("Pauli rate for {} is {}", label_letters(n_, PauliLabel(j)),
                                        rates_[j]));
    }
    rates_[j] = std::max(rates_[j], 0.0);
    sum += rates_[j];
  }
  if (std::abs(sum - 1.0) > kRateTolerance * std::max<double>(1.0, std::sqrt(rates_.size()))) {
    throw ValidationError(fmt::format("Pauli rates sum to {:.17g}, expected 1", sum));
  }
}

PauliChannel PauliChannel::identity(std::size_t n_qubits) {
  std::vector<double> r(pauli_count(n_qubits), 0.0);
  r[0] = 1.0;
  return PauliChannel(n_qubits, std::move(r));
}

FidelityVector::FidelityVector(std::size_t n_qubits, std::vector<double> f)
    : n_(n_qubits), f_(std::move(f)) {
  check_length(n_, f_.size(), "fidelity");
  if (std::abs(f_[0] - 1.0) > 1e-10) {
    throw ValidationError(fmt::format("identity fidelity is {:.17g}, expected 1", f_[0]));
  }
}

QuasiProbability::QuasiProbability(std::size_t n_qubits, std::vector<double> eta)
    : n_(n_qubits), eta_(std::move(eta)) {
  check_length(n_, eta_.size(), "quasi-probability");
  const double total = std::accumulate(eta_.begin(), eta_.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-10) {
    throw ValidationError(fmt::format("quasi-probabilities sum to {:.17g}, expected 1", total));
  }
  gamma_ = 0.0;
  cumulative_.reserve(eta_.size());
  for (double e : eta_) {
    gamma_ += std::abs(e);
    cumulative_.push_back(gamma_);
  }
}

std::vector<double> QuasiProbability::probabilities() const {
  std::vector<double> q(eta_.size());
  for (std::size_t j = 0; j < q.size(); ++j) q[j] = std::abs(eta_[j]) / gamma_;
  return q;
}

PauliLabel QuasiProbability::sample(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> u(0.0, gamma_);
  const double r = u(rng);
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), r);
  std::size_t j = static_cast<std::size_t>(it - cumulative_.begin());
  j = std::min(j, eta_.size() - 1);
  while (eta_[j] == 0.0 && j > 0) --j;
  return PauliLabel(j);
}

ChiMatrix::ChiMatrix(std::size_t n_qubits, Eigen::MatrixXcd chi) : n_(n_qubits), chi_(std::move(chi)) {
  const auto dim = static_cast<Eigen::Index>(pauli_count(n_));
  if (chi_.rows() != dim || chi_.cols() != dim) {
    throw DimensionError(fmt::format("chi matrix must be {}x{}", dim, dim));
  }
}

ChiMatrix ChiMatrix::from_pauli_channel(const PauliChannel& c) {
  const auto dim = static_cast<Eigen::Index>(c.rates().size());
  Eigen::MatrixXcd chi = Eigen::MatrixXcd::Zero(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j) chi(j, j) = c.rates()[static_cast<std::size_t>(j)];
  return ChiMatrix(c.n_qubits(), std::move(chi));
}

double ChiMatrix::offdiagonal_norm() const {
  Eigen::MatrixXcd off = chi_;
  off.diagonal().setZero();
  return off.norm();
}

bool ChiMatrix::is_hermitian(double tol) const {
  return (chi_ - chi_.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

bool ChiMatrix::is_positive_semidefinite(double tol) const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (chi_ + chi_.adjoint()),
                                                     Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -tol;
}

PauliChannel ChiMatrix::diagonal_channel() const {
  std::vector<double> r(static_cast<std::size_t>(chi_.rows()));
  for (std::size_t j = 0; j < r.size(); ++j) r[j] = chi_(j, j).real();
  return PauliChannel(n_, std::move(r));
}

Eigen::MatrixXcd ChiMatrix::apply(const Eigen::MatrixXcd& rho) const {
  const auto dim = chi_.rows();
  std::vector<Eigen::MatrixXcd> paulis;
  paulis.reserve(static_cast<std::size_t>(dim));
  for (Eigen::Index m = 0; m < dim; ++m) {
    paulis.push_back(PauliString::from_label(n_, PauliLabel(m)).matrix());
  }
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(rho.rows(), rho.cols());
  for (Eigen::Index m = 0; m < dim; ++m) {
    const Eigen::MatrixXcd left = paulis[m] * rho;
    for (Eigen::Index k = 0; k < dim; ++k) {
      if (chi_(m, k) == std::complex<double>(0.0)) continue;
      out += chi_(m, k) * left * paulis[k];
    }
  }
  return out;
}

Eigen::MatrixXd ChiMatrix::ptm() const {
  const auto dim = chi_.rows();
  const double scale = 1.0 / static_cast<double>(std::size_t{1} << n_);
  Eigen::MatrixXd r(dim, dim);
  for (Eigen::Index b = 0; b < dim; ++b) {
    const Eigen::MatrixXcd out = apply(PauliString::from_label(n_, PauliLabel(b)).matrix());
    for (Eigen::Index a = 0; a < dim; ++a) {
      r(a, b) = scale * trace_with(PauliString::from_label(n_, PauliLabel(a)), out).real();
    }
  }
  return r;
}

void walsh_hadamard(std::vector<double>& v, std::size_t n_qubits) {
  check_length(n_qubits, v.size(), "transform");
  std::size_t stride = 1;
  for (std::size_t q = 0; q < n_qubits; ++q, stride *= 4) {
    for (std::size_t base = 0; base < v.size(); base += 4 * stride) {
      for (std::size_t off = 0; off < stride; ++off) {
        double* p = v.data() + base + off;
        const double a = p[0];
        const double b = p[stride];
        const double c = p[2 * stride];
        const double d = p[3 * stride];
        p[0] = a + b + c + d;
        p[stride] = a + b - c - d;
        p[2 * stride] = a - b + c - d;
        p[3 * stride] = a - b - c + d;
      }
    }
  }
}

FidelityVector fidelities_from_rates(const PauliChannel& c) {
  std::vector<double> f = c.rates();
  walsh_hadamard(f, c.n_qubits());
  f[0] = 1.0;
  return FidelityVector(c.n_qubits(), std::move(f));
}

std::vector<double> signed_rates_from_fidelities(const FidelityVector& f) {
  std::vector<double> c = f.values();
  walsh_hadamard(c, f.n_qubits());
  const double scale = 1.0 / static_cast<double>(c.size());
  for (double& x : c) x *= scale;
  return c;
}

PauliChannel rates_from_fidelities(const FidelityVector& f) {
  return PauliChannel(f.n_qubits(), signed_rates_from_fidelities(f));
}

QuasiProbability invert_pauli_channel(const FidelityVector& f) {
  std::vector<double> inv(f.values().size());
  for (std::size_t k = 0; k < inv.size(); ++k) {
    const double fk = f.values()[k];
    if (std::abs(fk) < kSingularFidelityTolerance) {
      throw SingularChannelError(
          fmt::format("Pauli fidelity of {} is {:.3g}; channel is not invertible",
                      label_letters(f.n_qubits(), PauliLabel(k)), fk),
          k);
    }
    inv[k] = 1.0 / fk;
  }
  walsh_hadamard(inv, f.n_qubits());
  const double scale = 1.0 / static_cast<double>(inv.size());
  for (double& x : inv) x *= scale;
  return QuasiProbability(f.n_qubits(), std::move(inv));
}

PauliChannel compose(const PauliChannel& first, const PauliChannel& second) {
  if (first.n_qubits() != second.n_qubits()) {
    throw DimensionError("cannot compose channels on different registers");
  }
  const FidelityVector f1 = fidelities_from_rates(first);
  const FidelityVector f2 = fidelities_from_rates(second);
  std::vector<double> f(f1.values().size());
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = f1.values()[k] * f2.values()[k];
  std::vector<double> c = signed_rates_from_fidelities(FidelityVector(first.n_qubits(), std::move(f)));
  for (double& x : c) x = std::max(x, 0.0);
  const double total = std::accumulate(c.begin(), c.end(), 0.0);
  for (double& x : c) x /= total;
  return PauliChannel(first.n_qubits(), std::move(c));
}

PauliChannel convolve_rates(const PauliChannel& first, const PauliChannel& second) {
  if (first.n_qubits() != second.n_qubits()) {
    throw DimensionError("cannot compose channels on different registers");
  }
  std::vector<double> out(first.rates().size(), 0.0);
  for (std::size_t a = 0; a < out.size(); ++a) {
    if (first.rates()[a] == 0.0) continue;
    for (std::size_t b = 0; b < out.size(); ++b) {
      out[label_product(a, b)] += first.rates()[a] * second.rates()[b];
    }
  }
  return PauliChannel(first.n_qubits(), std::move(out));
}

PauliChannel depolarizing(std::size_t n_qubits, double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw UnsupportedParameterError(fmt::format("depolarizing rate {} outside [0, 1]", p));
  }
  const std::uint64_t d = pauli_count(n_qubits);
  const double off = p / static_cast<double>(d);
  std::vector<double> r(d, off);
  r[0] = 1.0 - p + off;
  return PauliChannel(n_qubits, std::move(r));
}

PauliChannel tensor(const PauliChannel& a, const PauliChannel& b) {
  const std::size_t db = b.rates().size();
  std::vector<double> r(a.rates().size() * db);
  for (std::size_t i = 0; i < a.rates().size(); ++i) {
    for (std::size_t j = 0; j < db; ++j) r[i * db + j] = a.rates()[i] * b.rates()[j];
  }
  return PauliChannel(a.n_qubits() + b.n_qubits(), std::move(r));
}

ChiMatrix tensor(const ChiMatrix& a, const ChiMatrix& b) {
  const auto da = a.matrix().rows();
  const auto db = b.matrix().rows();
  Eigen::MatrixXcd out(da * db, da * db);
  for (Eigen::Index i = 0; i < da; ++i) {
    for (Eigen::Index j = 0; j < da; ++j) {
      out.block(i * db, j * db, db, db) = a.matrix()(i, j) * b.matrix();
    }
  }
  return ChiMatrix(a.n_qubits() + b.n_qubits(), std::move(out));
}

ChiMatrix chi_of_kraus(const std::vector<KrausTerm>& operators) {
  if (operators.empty()) throw ValidationError("empty Kraus set");
  const auto dim = operators.front().op.rows();
  const std::size_t n = qubits_of_dim(dim);
  const auto npauli = static_cast<Eigen::Index>(pauli_count(n));
  Eigen::MatrixXcd completeness = Eigen::MatrixXcd::Zero(dim, dim);
  Eigen::MatrixXcd coeffs(npauli, static_cast<Eigen::Index>(operators.size()));
  const double scale = 1.0 / static_cast<double>(dim);
  for (std::size_t i = 0; i < operators.size(); ++i) {
    const auto& k = operators[i];
    if (k.op.rows() != dim || k.op.cols() != dim) {
      throw DimensionError("Kraus operators have inconsistent dimensions");
    }
    const Eigen::MatrixXcd kk = k.weight * k.op;
    completeness += kk.adjoint() * kk;
    for (Eigen::Index m = 0; m < npauli; ++m) {
      coeffs(m, static_cast<Eigen::Index>(i)) =
          scale * trace_with(PauliString::from_label(n, PauliLabel(m)), kk);
    }
  }
  if ((completeness - Eigen::MatrixXcd::Identity(dim, dim)).cwiseAbs().maxCoeff() > 1e-10) {
    throw ValidationError("Kraus set is not trace preserving");
  }
  return ChiMatrix(n, coeffs * coeffs.adjoint());
}

ChiMatrix chi_of_kraus(
    const std::vector<std::pair<std::complex<double>, GeneralizedError>>& ops) {
  if (ops.empty()) throw ValidationError("empty Kraus set");
  const std::size_t n = ops.front().second.n_qubits();
  const auto npauli = static_cast<Eigen::Index>(pauli_count(n));
  Eigen::MatrixXcd coeffs = Eigen::MatrixXcd::Zero(npauli, static_cast<Eigen::Index>(ops.size()));
  for (std::size_t i = 0; i < ops.size(); ++i) {
    if (ops[i].second.n_qubits() != n) throw DimensionError("Kraus terms on different registers");
    for (const auto& t : ops[i].second.terms()) {
      coeffs(static_cast<Eigen::Index>(t.op.label().value()), static_cast<Eigen::Index>(i)) +=
          ops[i].first * t.coeff;
    }
  }
  const auto dim = Eigen::Index{1} << n;
  Eigen::MatrixXcd completeness = Eigen::MatrixXcd::Zero(dim, dim);
  for (std::size_t i = 0; i < ops.size(); ++i) {
    const Eigen::MatrixXcd kk = ops[i].first * ops[i].second.matrix();
    completeness += kk.adjoint() * kk;
  }
  if ((completeness - Eigen::MatrixXcd::Identity(dim, dim)).cwiseAbs().maxCoeff() > 1e-10) {
    throw ValidationError("Kraus set is not trace preserving");
  }
  return ChiMatrix(n, coeffs * coeffs.adjoint());
}

namespace {

nlohmann::json label_map(std::size_t n, const std::vector<double>& v) {
  nlohmann::json m = nlohmann::json::object();
  for (std::size_t j = 0; j < v.size(); ++j) m[label_letters(n, PauliLabel(j))] = v[j];
  return m;
}

std::vector<double> read_label_map(std::size_t n, const nlohmann::json& m) {
  std::vector<double> v(pauli_count(n), 0.0);
  for (auto it = m.begin(); it != m.end(); ++it) {
    const PauliString p = PauliString::parse(it.key());
    if (p.n_qubits() != n || p.phase_exponent() != 0) {
      throw ValidationError(fmt::format("label '{}' does not name a {}-qubit Pauli", it.key(), n));
    }
    v[p.label().value()] = it.value().get<double>();
  }
  return v;
}

}  // namespace

nlohmann::json to_json(const PauliChannel& c) {
  return {{"n", c.n_qubits()}, {"rates", label_map(c.n_qubits(), c.rates())}};
}

nlohmann::json to_json(const FidelityVector& f) {
  return {{"n", f.n_qubits()}, {"fidelities", label_map(f.n_qubits(), f.values())}};
}

nlohmann::json to_json(const QuasiProbability& q) {
  return {{"n", q.n_qubits()}, {"gamma", q.gamma()}, {"eta", label_map(q.n_qubits(), q.eta())}};
}

PauliChannel pauli_channel_from_json(const nlohmann::json& j) {
  const auto n = j.at("n").get<std::size_t>();
  if (j.contains("rates")) return PauliChannel(n, read_label_map(n, j.at("rates")));
  if (j.contains("fidelities")) return rates_from_fidelities(fidelity_vector_from_json(j));
  throw ValidationError("channel JSON needs 'rates' or 'fidelities'");
}

FidelityVector fidelity_vector_from_json(const nlohmann::json& j) {
  const auto n = j.at("n").get<std::size_t>();
  return FidelityVector(n, read_label_map(n, j.at("fidelities")));
}

}  // namespace hqem
