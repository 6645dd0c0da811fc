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

#include "hqem/mitigate.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <map>

#include <fmt/format.h>

#include "hqem/errors.hpp"
#include "hqem/parallel.hpp"

namespace hqem {

namespace {

// Keeps outcomes with both check bits 0 and reorders data bits to logical order.
std::vector<double> post_select_quasi(const std::vector<double>& hist, const CodeSpec& code) {
  const QedcLayout& l = *code.layout;
  const std::size_t n = code.n_physical;
  const std::size_t k = code.k_logical;
  const std::uint64_t check_mask =
      (std::uint64_t{1} << (n - 1 - l.check_x)) | (std::uint64_t{1} << (n - 1 - l.check_z));
  std::vector<double> out(std::size_t{1} << k, 0.0);
  for (std::size_t idx = 0; idx < hist.size(); ++idx) {
    if ((idx & check_mask) != 0) continue;
    std::size_t d = 0;
    for (std::size_t j = 0; j < k; ++j) d = (d << 1) | ((idx >> (n - 1 - l.data[j])) & 1U);
    out[d] += hist[idx];
  }
  return out;
}

struct Measured {
  double value = 0.0;
  double kept = 0.0;
};

Measured measure_once(const MeasurementSetup& setup, const std::vector<double>& probs,
                      std::uint64_t shots, std::mt19937_64& rng) {
  const std::vector<double> hist = measure(setup, probs, shots, rng);
  double kept = 0.0;
  for (double c : hist) kept += c;
  return {parity_expectation(hist, setup.parity_mask), kept};
}

}  // namespace

double parity_expectation(const std::vector<double>& histogram, std::uint64_t mask) {
  double total = 0.0;
  double acc = 0.0;
  for (std::size_t b = 0; b < histogram.size(); ++b) {
    total += histogram[b];
    acc += (std::popcount(b & mask) & 1) ? -histogram[b] : histogram[b];
  }
  if (total <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  return acc / total;
}

std::uint64_t parity_mask_of(const PauliString& z_observable) {
  if (z_observable.x_mask() != 0) {
    throw ValidationError(fmt::format("{} is not diagonal in the computational basis",
                                      z_observable.str()));
  }
  return z_observable.z_mask();
}

std::vector<double> measure(const MeasurementSetup& setup, const std::vector<double>& probs,
                            std::uint64_t shots, std::mt19937_64& rng) {
  if (probs.size() != (std::size_t{1} << setup.n_qubits)) {
    throw DimensionError("distribution does not match the measured register");
  }
  std::vector<std::uint64_t> hist = sample_histogram(probs, shots, rng);
  std::vector<double> quasi;
  if (setup.readout) {
    hist = apply_readout(hist, *setup.readout, rng);
    if (setup.ibu_iterations > 0) {
      quasi = ibu_mitigate(hist, *setup.readout, setup.ibu_iterations);
    }
  }
  if (quasi.empty()) quasi.assign(hist.begin(), hist.end());
  if (setup.code) return post_select_quasi(quasi, *setup.code);
  return quasi;
}

Estimate pec_sample(const MeasurementSetup& setup, const QuasiProbability& inverse,
                    std::uint64_t shots_per_sample, std::size_t n_samples, std::uint64_t seed) {
  if (n_samples == 0 || shots_per_sample == 0) throw ValidationError("PEC needs samples and shots");
  std::mt19937_64 draw(stream_seed(seed, "pec-labels"));
  std::vector<PauliLabel> labels(n_samples);
  for (auto& l : labels) l = inverse.sample(draw);

  std::map<std::uint64_t, std::vector<double>> cache;
  for (const auto& l : labels) cache.emplace(l.value(), std::vector<double>{});
  std::vector<std::uint64_t> keys;
  for (const auto& [k, v] : cache) keys.push_back(k);
  std::vector<std::vector<double>> dists(keys.size());
  parallel_for(keys.size(), [&](std::size_t i) {
    dists[i] = setup.distribution(PauliString::from_label(inverse.n_qubits(), PauliLabel(keys[i])));
  });
  for (std::size_t i = 0; i < keys.size(); ++i) cache[keys[i]] = std::move(dists[i]);

  std::vector<double> values(n_samples, std::numeric_limits<double>::quiet_NaN());
  parallel_for(n_samples, [&](std::size_t s) {
    std::mt19937_64 rng(stream_seed(seed, static_cast<std::uint64_t>(s)));
    const Measured m = measure_once(setup, cache.at(labels[s].value()), shots_per_sample, rng);
    if (m.kept <= 0.0) return;
    values[s] = inverse.gamma() * inverse.sign(labels[s]) * m.value;
  });

  Estimate e;
  e.gamma = inverse.gamma();
  double sum = 0.0;
  double sum2 = 0.0;
  for (double v : values) {
    if (std::isnan(v)) {
      ++e.dropped;
      continue;
    }
    sum += v;
    sum2 += v * v;
    ++e.n_samples;
  }
  if (e.n_samples == 0) throw ConsistencyError("post-selection rejected every PEC sample");
  const double n = static_cast<double>(e.n_samples);
  e.value = sum / n;
  const double var = e.n_samples > 1 ? std::max(0.0, (sum2 - n * e.value * e.value) / (n - 1)) : 0.0;
  e.std_error = std::sqrt(var / n);
  return e;
}

Estimate pec_direct(const MeasurementSetup& setup, const QuasiProbability& inverse,
                    std::uint64_t shots, std::uint64_t seed) {
  if (shots == 0) throw ValidationError("PEC needs shots");
  const auto& eta = inverse.eta();
  std::vector<Measured> results(eta.size());
  parallel_for(eta.size(), [&](std::size_t j) {
    if (eta[j] == 0.0) return;
    std::mt19937_64 rng(stream_seed(seed, static_cast<std::uint64_t>(j)));
    const auto probs = setup.distribution(PauliString::from_label(inverse.n_qubits(), PauliLabel(j)));
    results[j] = measure_once(setup, probs, shots, rng);
  });
  Estimate e;
  e.gamma = inverse.gamma();
  double var = 0.0;
  for (std::size_t j = 0; j < eta.size(); ++j) {
    if (eta[j] == 0.0) continue;
    if (results[j].kept <= 0.0) {
      ++e.dropped;
      continue;
    }
    const double m = results[j].value;
    e.value += eta[j] * m;
    var += eta[j] * eta[j] * std::max(0.0, 1.0 - m * m) / results[j].kept;
    ++e.n_samples;
  }
  e.std_error = std::sqrt(var);
  return e;
}

std::vector<double> ibu_mitigate(const std::vector<double>& counts, const ReadoutModel& readout,
                                 std::size_t iterations) {
  if (iterations == 0) throw ValidationError("IBU needs at least one iteration");
  readout.validate();
  const std::size_t dim = std::size_t{1} << readout.n_qubits();
  if (counts.size() != dim) throw DimensionError("counts do not match the readout register");
  Eigen::MatrixXd r(dim, dim);
  for (std::size_t o = 0; o < dim; ++o) {
    for (std::size_t t = 0; t < dim; ++t) r(o, t) = readout.likelihood(o, t);
  }
  double total = 0.0;
  for (double c : counts) total += c;
  Eigen::VectorXd n = Eigen::Map<const Eigen::VectorXd>(counts.data(), dim);
  Eigen::VectorXd t = Eigen::VectorXd::Constant(dim, total / dim);
  for (std::size_t it = 0; it < iterations; ++it) {
    const Eigen::VectorXd predicted = r * t;
    Eigen::VectorXd ratio(dim);
    for (std::size_t o = 0; o < dim; ++o) ratio(o) = predicted(o) > 0.0 ? n(o) / predicted(o) : 0.0;
    t = t.cwiseProduct(r.transpose() * ratio);
  }
  const double s = t.sum();
  if (s > 0.0) t *= total / s;
  return {t.data(), t.data() + dim};
}

std::vector<double> ibu_mitigate(const std::vector<std::uint64_t>& histogram,
                                 const ReadoutModel& readout, std::size_t iterations) {
  return ibu_mitigate(std::vector<double>(histogram.begin(), histogram.end()), readout, iterations);
}

}  // namespace hqem
