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

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "hqem/analysis.hpp"
#include "hqem/bench.hpp"
#include "hqem/codes.hpp"
#include "hqem/errors.hpp"
#include "hqem/mitigate.hpp"
#include "hqem/propagate.hpp"
#include "hqem/twirl.hpp"

namespace {

using namespace hqem;
using cd = std::complex<double>;

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::string detail;
  std::vector<std::string> info;
};

PauliString P(const char* s) { return PauliString::parse(s); }

void check(Outcome& o, bool ok, const std::string& what) {
  if (!ok) {
    o.pass = false;
    o.detail += (o.detail.empty() ? "" : "; ") + what;
  }
}

// 1. H2 ground energy at R = 0.75.
Outcome criterion_1() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  const H2Coefficients& g = h2_row(0.75);
  const double oracle = g.g1 + g.g4 - std::sqrt((g.g2 + g.g3) * (g.g2 + g.g3) + g.g5 * g.g5);

  // Ideal pipeline: noiseless encoded circuit, decoded data-qubit expectations.
  const CodeSpec code = vqe_code();
  auto simulate = [&](double theta) {
    const DensityMatrix rho =
        run_density(encoded_vqe_circuit(code, theta, 0.0), DensityMatrix::zero_state(4));
    const auto& d = code.layout->data;
    H2Expectations e;
    e.z1 = expectation(rho, P("ZI").embed(4, d));
    e.z2 = expectation(rho, P("IZ").embed(4, d));
    e.z1z2 = expectation(rho, P("ZZ").embed(4, d));
    e.x1x2 = expectation(rho, P("XX").embed(4, d));
    return e;
  };
  const double analytic = h2_energy(simulate(ucc_optimal_theta(g)), g);

  const auto thetas = default_theta_grid();
  std::vector<H2Expectations> table;
  for (double t : thetas) table.push_back(simulate(t));
  const auto rows = pes_curve(thetas, table, h2_table());
  const auto best = std::min_element(rows.begin(), rows.end(),
                                     [](const PesRow& a, const PesRow& b) { return a.energy < b.energy; });
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  check(o, std::abs(oracle - (-1.137)) <= 1e-3, fmt::format("oracle {:.6f} vs -1.137", oracle));
  check(o, std::abs(analytic - oracle) <= 1e-9, fmt::format("analytic path off by {:.2e}", analytic - oracle));
  check(o, std::abs(best->r - 0.75) < 1e-12, fmt::format("spline PES minimum at R = {}", best->r));
  check(o, std::abs(best->energy - oracle) <= 1e-3,
        fmt::format("spline minimum off by {:.2e}", best->energy - oracle));
  check(o, seconds < 60.0, fmt::format("runtime {:.1f} s", seconds));
  o.info.push_back(fmt::format("oracle {:.6f} Ha, analytic {:.10f} Ha, spline {:.6f} Ha at R = {}, {:.2f} s",
                               oracle, analytic, best->energy, best->r, seconds));
  return o;
}

// 2. Hybrid recovery on the full VQE run.
Outcome criterion_2() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  VqeConfig cfg;
  cfg.p = 0.01;
  cfg.repetitions = 100;
  cfg.shots = 10000;
  cfg.seed = 2026;
  const VqeResult res = run_vqe_experiment(cfg);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::size_t outside = 0;
  for (const auto& p : res.points) {
    if (p.mode == VqeMode::Hybrid && std::abs(p.mean - p.ideal) > 2.0 * p.sigma) ++outside;
  }
  check(o, res.info.size() == 13, fmt::format("{} theta points", res.info.size()));
  check(o, outside == 0, fmt::format("{} hybrid points outside 2 sigma", outside));
  for (std::size_t obs = 0; obs <= 4; ++obs) {
    const double h = res.max_bias(VqeMode::Hybrid, obs);
    const double q = res.max_bias(VqeMode::Qedc, obs);
    const double n = res.max_bias(VqeMode::Noisy, obs);
    const std::string name = obs < 4 ? kVqeObservables[obs] : "all";
    check(o, h <= q && q <= n, fmt::format("{} bias order hybrid {:.4f} qedc {:.4f} noisy {:.4f}", name, h, q, n));
    o.info.push_back(fmt::format("{} max |bias|: hybrid {:.4f}, qedc {:.4f}, noisy {:.4f}", name, h, q, n));
  }
  check(o, seconds < 600.0, fmt::format("runtime {:.1f} s", seconds));
  o.info.push_back(fmt::format("{:.1f} s", seconds));
  return o;
}

std::array<double, 4> max_offdiagonal_bias(RotationQubit rotation) {
  std::array<double, 4> worst{};
  const CodeSpec code = vqe_code();
  for (double theta : default_theta_grid()) {
    const auto b = vqe_offdiagonal_bias(vqe_logical_noise(code, theta, 0.01, 1e-12, rotation), theta);
    for (std::size_t i = 0; i < 4; ++i) worst[i] = std::max(worst[i], std::abs(b[i]));
  }
  return worst;
}

// 3. Off-diagonal bias bound.
Outcome criterion_3() {
  Outcome o;
  const std::array<double, 4> limit{0.002, 0.002, 1e-4, 0.002};
  const auto worst = max_offdiagonal_bias(RotationQubit::Last);
  for (std::size_t i = 0; i < 4; ++i) {
    check(o, worst[i] <= limit[i],
          fmt::format("{} |bias| {:.2e} > {:.0e}", kVqeObservables[i], worst[i], limit[i]));
  }
  o.info.push_back(fmt::format("default circuit max |bias|: Z1 {:.2e}, Z2 {:.2e}, Z1Z2 {:.2e}, X1X2 {:.2e}",
                               worst[0], worst[1], worst[2], worst[3]));
  const auto first = max_offdiagonal_bias(RotationQubit::First);
  o.info.push_back(fmt::format("rz_qubit = first (information only): Z1 {:.2e}, Z2 {:.2e}, Z1Z2 {:.2e}, X1X2 {:.2e}",
                               first[0], first[1], first[2], first[3]));
  return o;
}

// 4. Overhead ordering and monotonicity.
Outcome criterion_4() {
  Outcome o;
  const auto rows = overhead_study(OverheadConfig{});
  std::size_t ordered = 0, strict = 0, strict_cells = 0, monotone_bad = 0;
  for (const auto& r : rows) {
    if (r.gamma2_hybrid <= r.gamma2_end && r.gamma2_end <= r.gamma2_layer) ++ordered;
    if (r.p >= 0.005 && r.layers >= 2) {
      ++strict_cells;
      if (r.gamma2_hybrid < r.gamma2_end && r.gamma2_end < r.gamma2_layer) ++strict;
    }
  }
  for (const auto& a : rows) {
    for (const auto& b : rows) {
      if (a.p <= b.p && a.layers <= b.layers &&
          (a.gamma2_layer > b.gamma2_layer || a.gamma2_end > b.gamma2_end ||
           a.gamma2_hybrid > b.gamma2_hybrid)) {
        ++monotone_bad;
      }
    }
  }
  check(o, rows.size() == 60, fmt::format("{} cells", rows.size()));
  check(o, ordered == rows.size(), fmt::format("ordering holds on {}/{}", ordered, rows.size()));
  check(o, strict == strict_cells, fmt::format("strict on {}/{}", strict, strict_cells));
  check(o, monotone_bad == 0, fmt::format("{} monotonicity violations", monotone_bad));
  o.info.push_back(fmt::format("ordered {}/{}, strict {}/{}, monotone", ordered, rows.size(), strict, strict_cells));
  return o;
}

// 5. Infidelity closed forms.
Outcome criterion_5() {
  Outcome o;
  std::vector<double> omegas;
  for (int i = 0; i < 50; ++i) omegas.push_back(kPi / 2 * i / 49.0);
  const auto rows = infidelity_curves(omegas);
  double dev_direct = 0, dev_complement = 0, dev_identity = 0;
  std::map<InfidelityMode, double> dev_mode_direct, dev_mode_complement;
  for (const auto& r : rows) {
    const double d = std::abs(r.stats.r_bar - r.closed_form);
    const double c = std::abs(r.stats.r_bar - (1.0 - r.closed_form));
    dev_mode_direct[r.mode] = std::max(dev_mode_direct[r.mode], d);
    dev_mode_complement[r.mode] = std::max(dev_mode_complement[r.mode], c);
    if (r.mode == InfidelityMode::Partial) {
      const double cs = std::cos(r.omega / 2), sn = std::sin(r.omega / 2);
      dev_identity = std::max(dev_identity, std::abs(r.closed_form - (1.0 - 38.0 / 9.0 * std::pow(cs, 6) * sn * sn)));
    }
  }
  for (const auto& [mode, d] : dev_mode_direct) {
    const double c = dev_mode_complement[mode];
    dev_direct = std::max(dev_direct, d);
    dev_complement = std::max(dev_complement, c);
    check(o, std::min(d, c) <= 1e-9,
          fmt::format("{} deviation {:.2e} (complement {:.2e})", infidelity_mode_name(mode), d, c));
  }
  check(o, dev_identity <= 1e-12, fmt::format("partial identity deviation {:.2e}", dev_identity));
  std::size_t order_bad = 0;
  for (int i = 1; i < 200; ++i) {
    const double w = kPi / 2 * i / 200.0;
    const double u = closed_form_infidelity(w, InfidelityMode::Untwirled);
    const double p = closed_form_infidelity(w, InfidelityMode::Partial);
    const double f = closed_form_infidelity(w, InfidelityMode::Full);
    if (!(u <= p && p <= f)) ++order_bad;
  }
  check(o, order_bad == 0, fmt::format("{} ordering violations", order_bad));
  o.info.push_back(fmt::format("max |chi-numeric - printed| {:.2e}, vs complement {:.2e}, partial identity {:.2e}",
                               dev_direct, dev_complement, dev_identity));
  return o;
}

double detection_probability(const CodeSpec& code, const Eigen::VectorXcd& logical,
                             const Eigen::MatrixXcd& error, std::size_t qubit) {
  DensityMatrix rho =
      run_density(encode_circuit(code), DensityMatrix::from_statevector(unencoded_input(code, logical)));
  rho.apply_unitary(error, {qubit});
  rho = run_density(decode_circuit(code), rho);
  rho = run_density(check_readout_circuit(code), rho);
  const auto probs = rho.probabilities();
  const auto& l = *code.layout;
  const std::size_t n = code.n_physical;
  double accepted = 0;
  for (std::size_t idx = 0; idx < probs.size(); ++idx) {
    if (((idx >> (n - 1 - l.check_x)) & 1U) == 0 && ((idx >> (n - 1 - l.check_z)) & 1U) == 0) {
      accepted += probs[idx];
    }
  }
  return 1.0 - accepted;
}

// 6. Code properties.
Outcome criterion_6() {
  Outcome o;
  for (std::size_t n : {4u, 6u}) {
    const CodeSpec code = qedc(n);
    std::size_t detected = 0;
    for (std::size_t q = 0; q < n; ++q) {
      for (char letter : {'X', 'Y', 'Z'}) {
        const PauliString e = PauliString::single(n, q, letter);
        bool anti = false;
        for (const auto& g : code.generators) anti = anti || !commutes(e, g);
        detected += anti && code.detects(e);
      }
    }
    check(o, detected == 3 * n, fmt::format("n={}: {}/{} weight-1 errors detected", n, detected, 3 * n));
    o.info.push_back(fmt::format("n={}: {}/{} weight-1 errors detected", n, detected, 3 * n));
  }

  const CodeSpec code = qedc(4, QedcLayout::compiled_four());
  const Eigen::MatrixXcd enc = circuit_unitary(encode_circuit(code));
  const Eigen::MatrixXcd dec = circuit_unitary(decode_circuit(code));
  const PauliString image = logical_image(code, P("YX"));
  check(o, image == P("ZXIY"), "image of YX is " + image.str());
  double worst = 0;
  for (int i = 0; i < 20; ++i) {
    const double theta = -kPi + 2 * kPi * i / 19.0;
    Circuit c(4);
    c.add_gate(encoded_exponential(code, P("YX"), theta));
    const Eigen::MatrixXcd phys = dec * circuit_unitary(c) * enc;
    const Eigen::MatrixXcd logical = Gate::pauli_exp(P("YX"), theta).matrix();
    for (Eigen::Index a = 0; a < 4; ++a) {
      const Eigen::VectorXcd basis = Eigen::VectorXcd::Unit(4, a);
      worst = std::max(worst, (phys * unencoded_input(code, basis) - unencoded_input(code, logical * basis)).norm());
    }
  }
  check(o, worst <= 1e-10, fmt::format("encoded exponential deviation {:.2e}", worst));
  o.info.push_back(fmt::format("encoded exponential max deviation {:.2e} over 20 theta", worst));

  std::mt19937_64 rng(6);
  std::normal_distribution<double> gauss;
  double min_detect = 1.0;
  const Eigen::MatrixXcd h = Gate::h(0).matrix();
  for (std::size_t q = 0; q < 4; ++q) {
    Eigen::VectorXcd psi(4);
    for (Eigen::Index i = 0; i < 4; ++i) psi(i) = {gauss(rng), gauss(rng)};
    min_detect = std::min(min_detect, detection_probability(qedc(4), psi.normalized(), h, q));
  }
  check(o, std::abs(min_detect - 1.0) <= 1e-12, fmt::format("Hadamard detection {:.12f}", min_detect));
  o.info.push_back(fmt::format("Hadamard error detection probability {:.12f}", min_detect));
  return o;
}

// 7. Noise-learning loop closure.
Outcome criterion_7() {
  Outcome o;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.2, 1.0);
  std::vector<double> rates(16);
  double sum = 0;
  for (std::size_t j = 1; j < 16; ++j) sum += rates[j] = u(rng);
  for (std::size_t j = 1; j < 16; ++j) rates[j] *= 0.05 / sum;
  rates[0] = 0.95;
  const PauliChannel noise(2, rates);
  const FidelityVector f = fidelities_from_rates(noise);
  CbOptions opt;
  opt.depths = {4, 16, 32, 64, 128};
  opt.shots = 10000;
  opt.seed = 2026;
  const auto records = learn_pauli_fidelities(Gate::ecr(0, 1), noise, opt);
  double worst_single = 0, worst_pair = 0;
  std::vector<std::string> learnable;
  std::vector<std::vector<std::string>> pairs;
  for (const auto& r : records) {
    if (r.learnable) {
      learnable.push_back(r.labels[0]);
      worst_single = std::max(worst_single, std::abs(r.value - f[P(r.labels[0].c_str()).label()]));
    } else {
      pairs.push_back(r.labels);
      const double product = f[P(r.labels[0].c_str()).label()] * f[P(r.labels[1].c_str()).label()];
      worst_pair = std::max(worst_pair, std::abs(r.value - product));
    }
  }
  std::sort(learnable.begin(), learnable.end());
  std::sort(pairs.begin(), pairs.end());
  const std::vector<std::string> want_learnable{"IX", "XY", "XZ", "YY", "YZ", "ZI", "ZX"};
  const std::vector<std::vector<std::string>> want_pairs{{"IY", "ZZ"}, {"IZ", "ZY"}, {"XI", "YX"}, {"XX", "YI"}};
  check(o, worst_single <= 1e-2, fmt::format("learnable deviation {:.2e}", worst_single));
  check(o, worst_pair <= 2e-2, fmt::format("pair product deviation {:.2e}", worst_pair));
  check(o, learnable == want_learnable, "learnable set " + fmt::format("{}", fmt::join(learnable, ",")));
  check(o, pairs == want_pairs, "degenerate pairs differ");
  o.info.push_back(fmt::format("learnable {{{}}}, max deviation {:.2e}; pairs max product deviation {:.2e}",
                               fmt::join(learnable, ","), worst_single, worst_pair));
  return o;
}

// 8. Twirl properties.
Outcome criterion_8() {
  Outcome o;
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g;
  double worst_full = 0;
  for (std::size_t n : {1u, 2u}) {
    const auto d = Eigen::Index{1} << n;
    for (int trial = 0; trial < 20; ++trial) {
      Eigen::MatrixXcd stacked(3 * d, d);
      for (Eigen::Index i = 0; i < stacked.rows(); ++i)
        for (Eigen::Index j = 0; j < d; ++j) stacked(i, j) = {g(rng), g(rng)};
      const Eigen::HouseholderQR<Eigen::MatrixXcd> qr(stacked);
      const Eigen::MatrixXcd q = Eigen::MatrixXcd(qr.householderQ()).leftCols(d);
      std::vector<KrausTerm> kraus;
      for (int k = 0; k < 3; ++k) kraus.push_back({1.0, q.middleRows(k * d, d)});
      worst_full = std::max(worst_full, twirl_channel(chi_of_kraus(kraus), TwirlSet::full(n)).offdiagonal_norm());
    }
  }
  check(o, worst_full < 1e-12, fmt::format("full twirl off-diagonal {:.2e}", worst_full));

  bool reduced = true;
  for (int i = 1; i <= 10; ++i) {
    const ChiMatrix chi = z_rotation_chi(kPi * i / 10.0);
    reduced = reduced && twirl_channel(chi, TwirlSet::from_labels({"I", "X", "Z"})).offdiagonal_norm() <
                             chi.offdiagonal_norm();
  }
  check(o, reduced, "{I,X,Z} does not strictly reduce off-diagonal mass");

  Circuit c(3);
  c.add_gate(Gate::h(0));
  c.add_gate(Gate::cx(0, 1));
  c.add_gate(Gate::rz(1, 0.4));
  c.add_gate(Gate::ecr(1, 2));
  c.add_gate(Gate::cx(2, 0));
  auto sites = twirl_sites(c, GateKind::CX, TwirlSet::full(2));
  const auto ecr = twirl_sites(c, GateKind::ECR, vqe_twirl_set());
  sites.insert(sites.end(), ecr.begin(), ecr.end());
  const Eigen::MatrixXcd u = circuit_unitary(c);
  double worst_inst = 0;
  for (const Circuit& inst : instantiate_twirled(c, sites, 50, 8)) {
    const Eigen::MatrixXcd v = circuit_unitary(inst);
    const cd ov = (u.adjoint() * v).trace();
    worst_inst = std::max(worst_inst, (u * (ov / std::abs(ov)) - v).norm());
  }
  check(o, worst_inst <= 1e-12, fmt::format("twirled instance deviation {:.2e}", worst_inst));

  TwirlBenchmarkConfig tb;
  tb.gate_sequence = default_twirl_benchmark_sequence();
  tb.noise = coherent_rx_noise(3, 0.05);
  tb.seed = 2026;
  const auto res = run_twirl_benchmark(tb);
  std::map<std::pair<std::string, std::size_t>, double> none;
  for (const auto& r : res.rows)
    if (r.mode == TwirlMode::None) none[{r.stabilizer, r.depth}] = r.fidelity;
  std::size_t cells = 0, wins = 0;
  double min_margin = 1.0;
  for (const auto& r : res.rows) {
    if (r.mode != TwirlMode::Partial) continue;
    ++cells;
    const double margin = r.fidelity - none.at({r.stabilizer, r.depth});
    min_margin = std::min(min_margin, margin);
    if (margin >= -1e-12) ++wins;
  }
  check(o, cells > 0 && wins == cells, fmt::format("partial >= untwirled on {}/{}", wins, cells));
  o.info.push_back(fmt::format("full twirl off-diagonal {:.2e}; instance deviation {:.2e}; partial set {{{}}}",
                               worst_full, worst_inst, fmt::join(res.partial_set.labels(), ",")));
  o.info.push_back(fmt::format("partial - untwirled fidelity >= {:.4f} on {}/{} (stabilizer, depth) cells",
                               min_margin, wins, cells));
  return o;
}

MeasurementSetup noisy_register(std::size_t n, const Circuit& prep, const PauliChannel& noise) {
  MeasurementSetup s;
  s.n_qubits = n;
  std::vector<std::size_t> all(n);
  for (std::size_t q = 0; q < n; ++q) all[q] = q;
  s.distribution = [n, prep, noise, all](const PauliString& inserted) {
    DensityMatrix rho = run_density(prep, DensityMatrix::zero_state(n));
    rho.apply_pauli_channel(noise, all);
    rho.apply_pauli(inserted);
    return rho.probabilities();
  };
  return s;
}

// 9. PEC correctness.
Outcome criterion_9() {
  Outcome o;
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0, 1);
  for (std::size_t n : {1u, 2u}) {
    std::vector<double> rates(pauli_count(n));
    double s = 0;
    for (std::size_t j = 1; j < rates.size(); ++j) s += rates[j] = u(rng);
    for (std::size_t j = 1; j < rates.size(); ++j) rates[j] *= 0.1 / s;
    rates[0] = 0.9;
    const PauliChannel noise(n, rates);
    Circuit prep(n);
    prep.add_gate(Gate::ry(0, 0.8));
    if (n == 2) prep.add_gate(Gate::ry(1, -0.5));
    MeasurementSetup setup = noisy_register(n, prep, noise);
    setup.parity_mask = n == 1 ? 0b1 : 0b11;
    const double ideal = n == 1 ? std::cos(0.8) : std::cos(0.8) * std::cos(0.5);
    const QuasiProbability inv = invert_pauli_channel(noise);
    for (int method = 0; method < 2; ++method) {
      double num = 0, var = 0;
      for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Estimate e = method == 0 ? pec_sample(setup, inv, 200, 200, 900 + seed)
                                       : pec_direct(setup, inv, 5000, 900 + seed);
        num += e.value - ideal;
        var += e.std_error * e.std_error;
      }
      const double z = num / std::sqrt(var);
      const char* name = method == 0 ? "sample" : "direct";
      check(o, std::abs(z) < 3.0, fmt::format("n={} {} z = {:.2f}", n, name, z));
      o.info.push_back(fmt::format("n={} pec_{}: z = {:+.2f} over 20 seeds", n, name, z));
    }
    const Estimate d = pec_direct(setup, inv, 20000, 99);
    const Estimate q = pec_sample(setup, inv, 100, 4000, 99);
    const double bar = std::hypot(d.std_error, q.std_error);
    check(o, std::abs(d.value - q.value) <= 2.0 * bar,
          fmt::format("n={} direct {:.4f} vs sample {:.4f} (bar {:.4f})", n, d.value, q.value, bar));
    o.info.push_back(fmt::format("n={} direct {:.4f} +- {:.4f}, sample {:.4f} +- {:.4f}", n, d.value,
                                 d.std_error, q.value, q.std_error));
  }
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"H2 ground energy", criterion_1},       {"hybrid recovery", criterion_2},
      {"off-diagonal bias bound", criterion_3}, {"overhead ordering", criterion_4},
      {"infidelity closed forms", criterion_5}, {"code properties", criterion_6},
      {"noise-learning loop closure", criterion_7}, {"twirl properties", criterion_8},
      {"PEC correctness", criterion_9}};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = fmt::format("exception: {}", e.what());
    }
    for (const auto& line : o.info) fmt::print("  [{}] {}\n", i + 1, line);
    fmt::print("{} {}: {}{}\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
               o.detail.empty() ? "" : " (" + o.detail + ")");
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  fmt::print("{}/{} criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
