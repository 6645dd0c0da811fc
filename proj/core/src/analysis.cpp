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

#include "hqem/analysis.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/tools/minima.hpp>
#include <fmt/format.h>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_spline.h>

#include "hqem/errors.hpp"
#include "hqem/parallel.hpp"

namespace hqem {

namespace detail {
extern const std::string_view kH2CoefficientCsv;
}

namespace {

using cd = std::complex<double>;

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_double(std::string_view field, std::size_t line) {
  const std::string s(trim(field));
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) {
    throw ParseError(fmt::format("line {}: '{}' is not a number", line, s), line);
  }
  return v;
}

std::string fmt_double(double v) { return fmt::format("{:.10g}", v); }

}  // namespace

// ---------------------------------------------------------------------------

std::vector<H2Coefficients> parse_h2_csv(std::string_view text) {
  std::vector<H2Coefficients> rows;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (!text.empty()) {
    const std::size_t eol = text.find('\n');
    std::string_view line = trim(text.substr(0, eol));
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != "R,g1,g2,g5,g3,g4") {
        throw ParseError(fmt::format("unexpected H2 table header '{}'", line), line_no);
      }
      header_seen = true;
      continue;
    }
    std::vector<double> f;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      f.push_back(parse_double(line.substr(start, comma - start), line_no));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (f.size() != 6) {
      throw ParseError(fmt::format("line {}: expected 6 fields, got {}", line_no, f.size()), line_no);
    }
    H2Coefficients c;
    c.r = f[0];
    c.g1 = f[1];
    c.g2 = f[2];
    c.g5 = f[3];
    c.g3 = f[4];
    c.g4 = f[5];
    if (!rows.empty() && !(c.r > rows.back().r)) {
      throw ParseError(fmt::format("line {}: R must be strictly increasing", line_no), line_no);
    }
    rows.push_back(c);
  }
  if (!header_seen) throw ParseError("empty H2 table", 0);
  return rows;
}

std::string_view h2_table_csv() { return detail::kH2CoefficientCsv; }

const std::vector<H2Coefficients>& h2_table() {
  static const std::vector<H2Coefficients> table = parse_h2_csv(detail::kH2CoefficientCsv);
  return table;
}

const H2Coefficients& h2_row(double r) {
  for (const auto& row : h2_table()) {
    if (std::abs(row.r - r) < 1e-9) return row;
  }
  throw ValidationError(fmt::format("no H2 table row at R = {}", r));
}

double h2_energy(const H2Expectations& e, const H2Coefficients& g) {
  return g.g1 + g.g2 * e.z1 + g.g3 * e.z2 + g.g4 * e.z1z2 + g.g5 * e.x1x2;
}

H2Expectations ucc_expectations(double theta) {
  return {std::cos(theta), std::cos(theta), 1.0, std::sin(theta)};
}

double ucc_ground_energy(const H2Coefficients& g) {
  return g.g1 + g.g4 - std::hypot(g.g2 + g.g3, g.g5);
}

double ucc_optimal_theta(const H2Coefficients& g) { return std::atan2(-g.g5, -(g.g2 + g.g3)); }

// ---------------------------------------------------------------------------

std::string infidelity_mode_name(InfidelityMode mode) {
  switch (mode) {
    case InfidelityMode::Untwirled: return "untwirled";
    case InfidelityMode::Full: return "full";
    case InfidelityMode::Partial: return "partial";
  }
  return "?";
}

TwirlSet single_qubit_twirl(InfidelityMode mode) {
  switch (mode) {
    case InfidelityMode::Untwirled: return TwirlSet::identity(1);
    case InfidelityMode::Full: return TwirlSet::full(1);
    case InfidelityMode::Partial: return TwirlSet::from_labels({"I", "X", "Z"});
  }
  return TwirlSet::identity(1);
}

ChiMatrix z_rotation_chi(double omega) {
  const double c = std::cos(omega / 2.0);
  const double s = std::sin(omega / 2.0);
  Eigen::Vector4cd v(c, 0.0, 0.0, cd(0.0, s));
  return ChiMatrix(1, v * v.adjoint());
}

namespace {

void require_trace_preserving(const ChiMatrix& chi) {
  const std::size_t d = chi.matrix().rows();
  const std::size_t n = chi.n_qubits();
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(std::size_t{1} << n, std::size_t{1} << n);
  for (std::size_t m = 0; m < d; ++m) {
    const Eigen::MatrixXcd pm = PauliString::from_label(n, PauliLabel(m)).matrix();
    for (std::size_t k = 0; k < d; ++k) {
      if (chi(m, k) == cd(0.0)) continue;
      acc += chi(m, k) * PauliString::from_label(n, PauliLabel(k)).matrix() * pm;
    }
  }
  const double dev = (acc - Eigen::MatrixXcd::Identity(acc.rows(), acc.cols())).norm();
  if (dev > 1e-9) {
    throw ValidationError(fmt::format("channel is not trace preserving (deviation {:.3g})", dev));
  }
}

unsigned label_digit(std::uint64_t label, std::size_t n, std::size_t q) {
  return static_cast<unsigned>((label >> (2 * (n - 1 - q))) & 3U);
}

}  // namespace

LogicalErrorStats logical_error_stats(const CodeSpec& code, const ChiMatrix& single_qubit,
                                      const TwirlSet& per_qubit_twirl) {
  if (single_qubit.n_qubits() != 1) throw DimensionError("expected a single-qubit chi matrix");
  require_trace_preserving(single_qubit);
  const ChiMatrix local = twirl_channel(single_qubit, per_qubit_twirl);
  const std::size_t n = code.n_physical;
  if (!code.layout) throw DispatchError(fmt::format("{} is not a detection code", code.name));
  const std::vector<std::size_t>& data = code.layout->data;

  auto chi_bar = [&](std::uint64_t m, std::uint64_t k) {
    cd v(1.0, 0.0);
    for (std::size_t q = 0; q < n; ++q) {
      v *= local(label_digit(m, n, q), label_digit(k, n, q));
      if (v == cd(0.0)) break;
    }
    return v;
  };

  std::vector<PauliString> errors;
  for (std::size_t q = 0; q < n; ++q) {
    for (char a : {'X', 'Y', 'Z'}) errors.push_back(PauliString::single(n, q, a));
  }
  std::vector<std::uint64_t> syndrome(errors.size(), 0);
  for (std::size_t e = 0; e < errors.size(); ++e) {
    for (std::size_t g = 0; g < code.generators.size(); ++g) {
      if (!commutes(errors[e], code.generators[g])) syndrome[e] |= std::uint64_t{1} << g;
    }
  }
  auto in_stabilizer_group = [&](const PauliString& p) {
    const std::uint64_t all = (n == 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1);
    const std::uint64_t x = p.x_mask();
    const std::uint64_t z = p.z_mask();
    return (x == 0 || x == all) && (z == 0 || z == all);
  };

  LogicalErrorStats s;
  s.p_c = 0.0;
  for (const auto& e : errors) s.p_c += chi_bar(e.label().value(), e.label().value()).real();
  s.p_u = 1.0 - s.p_c;

  cd cross(0.0);
  cd cross_stab(0.0);
  for (std::size_t a = 0; a < errors.size(); ++a) {
    for (std::size_t b = 0; b < errors.size(); ++b) {
      if (a == b || syndrome[a] != syndrome[b]) continue;
      const std::uint64_t la = errors[a].label().value();
      const std::uint64_t lb = errors[b].label().value();
      if (errors[a].restrict_to(data).unsigned_part() == errors[b].restrict_to(data).unsigned_part()) {
        cross += chi_bar(la, lb);
      }
      if (in_stabilizer_group(errors[a] * errors[b])) cross_stab += chi_bar(la, lb);
    }
  }
  s.r_bar = s.p_u - cross.real();
  s.r_bar_stabilizer = s.p_u - cross_stab.real();
  return s;
}

double closed_form_infidelity(double omega, InfidelityMode mode) {
  const double c = std::cos(omega / 2.0);
  const double s = std::sin(omega / 2.0);
  const double base = std::pow(c, 6) * s * s;
  switch (mode) {
    case InfidelityMode::Untwirled: return 1.0 - 6.0 * base;
    case InfidelityMode::Full: return 1.0 - 4.0 * base;
    case InfidelityMode::Partial:
      if (std::abs(s) < 1e-8) return closed_form_partial_simplified(omega);
      return 1.0 - 4.0 * base - std::pow(std::sin(omega), 6) / (288.0 * std::pow(s, 4));
  }
  return 1.0;
}

double closed_form_partial_simplified(double omega) {
  const double c = std::cos(omega / 2.0);
  const double s = std::sin(omega / 2.0);
  return 1.0 - (38.0 / 9.0) * std::pow(c, 6) * s * s;
}

std::vector<InfidelityRow> infidelity_curves(const std::vector<double>& omegas) {
  const CodeSpec code = qedc(4);
  constexpr std::array<InfidelityMode, 3> modes{InfidelityMode::Untwirled, InfidelityMode::Full,
                                                InfidelityMode::Partial};
  std::vector<InfidelityRow> rows(omegas.size() * modes.size());
  parallel_for(omegas.size(), [&](std::size_t i) {
    const ChiMatrix chi = z_rotation_chi(omegas[i]);
    for (std::size_t m = 0; m < modes.size(); ++m) {
      InfidelityRow& r = rows[i * modes.size() + m];
      r.omega = omegas[i];
      r.mode = modes[m];
      r.stats = logical_error_stats(code, chi, single_qubit_twirl(modes[m]));
      r.closed_form = closed_form_infidelity(omegas[i], modes[m]);
    }
  });
  return rows;
}

std::string infidelity_csv(const std::vector<InfidelityRow>& rows) {
  std::string out = "omega,mode,p_c,p_u,r_bar,r_bar_stabilizer,closed_form\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{},{},{},{}\n", fmt_double(r.omega), infidelity_mode_name(r.mode),
                       fmt_double(r.stats.p_c), fmt_double(r.stats.p_u), fmt_double(r.stats.r_bar),
                       fmt_double(r.stats.r_bar_stabilizer), fmt_double(r.closed_form));
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

FidelityVector uniform_fidelities(std::size_t n, double f) {
  std::vector<double> v(pauli_count(n), f);
  v[0] = 1.0;
  return FidelityVector(n, std::move(v));
}

bool commutes_with_both_checks(std::uint64_t label, std::size_t n) {
  unsigned xz_count = 0;  // letters anticommuting with X: Y, Z
  unsigned xy_count = 0;  // letters anticommuting with Z: X, Y
  for (std::size_t q = 0; q < n; ++q) {
    const unsigned d = label_digit(label, n, q);
    if (d == 2 || d == 3) ++xz_count;
    if (d == 1 || d == 2) ++xy_count;
  }
  return xz_count % 2 == 0 && xy_count % 2 == 0;
}

}  // namespace

std::vector<OverheadRow> overhead_study(const OverheadConfig& config) {
  if (config.n_encoded < 4 || config.n_encoded % 2 != 0) {
    throw UnsupportedParameterError("encoded register must hold an [[n,n-2,2]] code");
  }
  std::vector<std::pair<std::size_t, double>> cells;
  for (double p : config.error_rates) {
    if (!(p >= 0.0 && p < 1.0)) {
      throw UnsupportedParameterError(fmt::format("error rate {} outside [0, 1)", p));
    }
    for (std::size_t l : config.layers) {
      if (l == 0) throw UnsupportedParameterError("layer count must be positive");
      cells.emplace_back(l, p);
    }
  }
  std::vector<OverheadRow> rows(cells.size());
  parallel_for(cells.size(), [&](std::size_t i) {
    const auto [layers, p] = cells[i];
    OverheadRow& row = rows[i];
    row.layers = layers;
    row.p = p;
    const double lf = static_cast<double>(layers);

    const double g_layer = invert_pauli_channel(depolarizing(config.n_unencoded, p)).gamma();
    row.gamma2_layer = std::pow(g_layer, 2.0 * lf);

    const double f_total = std::pow(1.0 - p, lf);
    row.gamma2_end = std::pow(invert_pauli_channel(uniform_fidelities(config.n_unencoded, f_total)).gamma(), 2);

    const std::size_t ne = config.n_encoded;
    std::vector<double> rates = signed_rates_from_fidelities(uniform_fidelities(ne, f_total));
    double kept = 0.0;
    for (std::size_t j = 0; j < rates.size(); ++j) {
      if (commutes_with_both_checks(j, ne)) {
        rates[j] = std::max(rates[j], 0.0);
        kept += rates[j];
      } else {
        rates[j] = 0.0;
      }
    }
    for (double& r : rates) r /= kept;
    row.hybrid_acceptance = kept;
    row.gamma2_hybrid =
        std::pow(invert_pauli_channel(PauliChannel(ne, std::move(rates))).gamma(), 2);
  });
  return rows;
}

std::string overhead_csv(const std::vector<OverheadRow>& rows) {
  std::string out = "L,p,gamma2_layer,gamma2_end,gamma2_hybrid,hybrid_acceptance\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{},{},{}\n", r.layers, fmt_double(r.p), fmt_double(r.gamma2_layer),
                       fmt_double(r.gamma2_end), fmt_double(r.gamma2_hybrid),
                       fmt_double(r.hybrid_acceptance));
  }
  return out;
}

// ---------------------------------------------------------------------------

Circuit compiled_pauli_exponential(const PauliString& p, double theta, RotationQubit rotation) {
  if (!p.is_hermitian()) throw ValidationError(fmt::format("{} is not Hermitian", p.str()));
  const std::size_t n = p.n_qubits();
  Circuit c(n);
  if (p.is_identity()) return c;
  std::vector<std::size_t> support;
  for (std::size_t q = 0; q < n; ++q) {
    if (p.letter(q) != 'I') support.push_back(q);
  }
  if (rotation == RotationQubit::First) std::reverse(support.begin(), support.end());
  const double angle = p.phase_exponent() % 4 == 2 ? -theta : theta;
  std::vector<Gate> basis;
  for (std::size_t q : support) {
    if (p.letter(q) == 'X') basis.push_back(Gate::h(q));
    if (p.letter(q) == 'Y') basis.push_back(Gate::rx(q, std::numbers::pi / 2));
  }
  if (!basis.empty()) c.add_layer(basis);
  for (std::size_t i = 0; i + 1 < support.size(); ++i) c.add_gate(Gate::cx(support[i], support[i + 1]));
  c.add_gate(Gate::rz(support.back(), angle));
  for (std::size_t i = support.size() - 1; i > 0; --i) c.add_gate(Gate::cx(support[i - 1], support[i]));
  if (!basis.empty()) {
    std::vector<Gate> undo;
    for (const Gate& g : basis) undo.push_back(g.inverse());
    c.add_layer(undo);
  }
  return c;
}

Circuit logical_ucc_circuit(double theta) {
  Circuit c(2);
  c.add_gate(Gate::pauli_exp(PauliString::parse("YX"), theta));
  return c;
}

CodeSpec vqe_code() { return qedc(4, QedcLayout::compiled_four()); }

Circuit ghz_logical_zero(const CodeSpec& code) {
  if (!code.layout) throw DispatchError(fmt::format("{} is not a detection code", code.name));
  const std::size_t n = code.n_physical;
  const std::size_t qx = code.layout->check_x;
  Circuit c(n);
  c.add_gate(Gate::h(qx));
  for (std::size_t q = qx; q + 1 < n; ++q) c.add_gate(Gate::cx(q, q + 1));
  for (std::size_t q = qx; q > 0; --q) c.add_gate(Gate::cx(q, q - 1));
  return c;
}

Circuit encoded_vqe_circuit(const CodeSpec& code, double theta, double p, RotationQubit rotation) {
  Circuit c = ghz_logical_zero(code);
  c.append(compiled_pauli_exponential(logical_image(code, PauliString::parse("YX")), theta, rotation));
  c.append(decode_circuit(code));
  if (p > 0.0) {
    const PauliChannel dep = depolarizing(2, p);
    for (std::size_t l = 0; l < c.depth(); ++l) {
      for (const Gate& g : c.layers()[l].gates) {
        if (g.kind == GateKind::CX) c.attach_noise(l, NoiseAttachment{g.targets, dep});
      }
    }
  }
  return c;
}

std::string vqe_mode_name(VqeMode mode) {
  switch (mode) {
    case VqeMode::Noisy: return "noisy";
    case VqeMode::Qedc: return "qedc";
    case VqeMode::Hybrid: return "hybrid";
  }
  return "?";
}

double vqe_ideal(std::size_t observable, double theta) {
  switch (observable) {
    case 0:
    case 1: return std::cos(theta);
    case 2: return 1.0;
    case 3: return std::sin(theta);
    default: throw ValidationError(fmt::format("unknown observable index {}", observable));
  }
}

std::vector<double> default_theta_grid() {
  std::vector<double> t(13);
  for (std::size_t i = 0; i < t.size(); ++i) {
    t[i] = -std::numbers::pi / 2 + std::numbers::pi * static_cast<double>(i) / 12.0;
  }
  return t;
}

const VqePoint& VqeResult::at(std::size_t theta_index, VqeMode mode, std::size_t observable) const {
  if (theta_index >= info.size()) throw ValidationError("theta index out of range");
  const double theta = info[theta_index].theta;
  for (const auto& p : points) {
    if (p.theta == theta && p.mode == mode && p.observable == observable) return p;
  }
  throw ValidationError(fmt::format("no {} point for observable {} at theta index {}",
                                    vqe_mode_name(mode), observable, theta_index));
}

double VqeResult::max_bias(VqeMode mode, std::size_t observable) const {
  double worst = 0.0;
  for (const auto& p : points) {
    if (p.mode != mode || (observable < 4 && p.observable != observable)) continue;
    worst = std::max(worst, std::abs(p.mean - p.ideal));
  }
  return worst;
}

ErrorEnsemble vqe_logical_noise(const CodeSpec& code, double theta, double p,
                                double probability_floor, RotationQubit rotation) {
  AccumulateOptions opts;
  opts.probability_floor = probability_floor;
  const ErrorEnsemble total =
      accumulate_total_noise(encoded_vqe_circuit(code, theta, p, rotation), opts);
  return filter_detectable(total, code, DetectionFrame::Decoded);
}

namespace {

const std::array<PauliString, 4>& vqe_observable_paulis() {
  static const std::array<PauliString, 4> obs{PauliString::parse("ZI"), PauliString::parse("IZ"),
                                              PauliString::parse("ZZ"), PauliString::parse("XX")};
  return obs;
}

DensityMatrix ideal_logical_state(double theta) {
  return run_density(logical_ucc_circuit(theta), DensityMatrix::zero_state(2));
}

}  // namespace

std::array<double, 4> vqe_offdiagonal_bias(const ErrorEnsemble& logical, double theta) {
  const DensityMatrix rho = ideal_logical_state(theta);
  std::array<double, 4> out{};
  for (std::size_t o = 0; o < 4; ++o) {
    out[o] = offdiagonal_bias_bound(logical, vqe_observable_paulis()[o], rho);
  }
  return out;
}

namespace {

// Outcome distributions over the 4-qubit register for each inserted logical Pauli label,
// in the Z basis (b = 0) and with H on both data qubits (b = 1); H on q_x always.
struct BasisDistributions {
  std::array<std::vector<std::vector<double>>, 2> probs;
};

BasisDistributions basis_distributions(const CodeSpec& code, const DensityMatrix& decoded,
                                       bool all_labels) {
  const QedcLayout& l = *code.layout;
  BasisDistributions out;
  const std::size_t labels = all_labels ? pauli_count(code.k_logical) : 1;
  for (std::size_t b = 0; b < 2; ++b) {
    out.probs[b].resize(labels);
    for (std::size_t j = 0; j < labels; ++j) {
      DensityMatrix rho = decoded;
      if (j != 0) {
        rho.apply_pauli(PauliString::from_label(code.k_logical, PauliLabel(j))
                            .embed(code.n_physical, l.data));
      }
      if (b == 1) {
        for (std::size_t q : l.data) rho.apply_gate(Gate::h(q));
      }
      rho.apply_gate(Gate::h(l.check_x));
      out.probs[b][j] = rho.probabilities();
    }
  }
  return out;
}

std::uint64_t logical_mask(std::size_t observable) {
  constexpr std::array<std::uint64_t, 4> m{0b10, 0b01, 0b11, 0b11};
  return m[observable];
}

std::uint64_t physical_mask(const CodeSpec& code, std::size_t observable) {
  const std::uint64_t lm = logical_mask(observable);
  const std::size_t n = code.n_physical;
  const std::size_t k = code.k_logical;
  std::uint64_t out = 0;
  for (std::size_t j = 0; j < k; ++j) {
    if ((lm >> (k - 1 - j)) & 1U) out |= std::uint64_t{1} << (n - 1 - code.layout->data[j]);
  }
  return out;
}

std::size_t basis_of(std::size_t observable) { return observable == 3 ? 1 : 0; }

}  // namespace

VqeResult run_vqe_experiment(const VqeConfig& config) {
  if (config.shots == 0) throw ValidationError("shots must be positive");
  if (config.repetitions == 0) throw ValidationError("repetitions must be positive");
  if (!(config.p >= 0.0 && config.p <= 1.0)) {
    throw UnsupportedParameterError(fmt::format("error rate {} outside [0, 1]", config.p));
  }
  if (config.readout) {
    config.readout->validate();
    if (config.readout->n_qubits() != 4) throw DimensionError("VQE readout model must cover 4 qubits");
  }
  const std::vector<double> thetas = config.thetas.empty() ? default_theta_grid() : config.thetas;
  const CodeSpec code = vqe_code();
  const bool need_hybrid =
      std::find(config.modes.begin(), config.modes.end(), VqeMode::Hybrid) != config.modes.end();

  VqeResult result;
  result.info.resize(thetas.size());
  std::vector<std::vector<VqePoint>> per_theta(thetas.size());

  parallel_for(thetas.size(), [&](std::size_t ti) {
    const double theta = thetas[ti];
    VqeThetaInfo& info = result.info[ti];
    info.theta = theta;

    const DensityMatrix decoded =
        run_density(encoded_vqe_circuit(code, theta, config.p, config.rotation),
                    DensityMatrix::zero_state(code.n_physical));
    const BasisDistributions dist = basis_distributions(code, decoded, need_hybrid);

    const QedcLayout& l = *code.layout;
    const std::uint64_t check_mask = (std::uint64_t{1} << (3 - l.check_x)) |
                                     (std::uint64_t{1} << (3 - l.check_z));
    info.acceptance = 0.0;
    for (std::size_t idx = 0; idx < 16; ++idx) {
      if ((idx & check_mask) == 0) info.acceptance += dist.probs[0][0][idx];
    }

    const ErrorEnsemble logical =
        vqe_logical_noise(code, theta, config.p, config.probability_floor, config.rotation);
    info.reduced = reduce_to_pauli(logical);
    const QuasiProbability inverse = invert_pauli_channel(info.reduced);
    info.gamma = inverse.gamma();
    info.offdiagonal_bias = vqe_offdiagonal_bias(logical, theta);

    for (VqeMode mode : config.modes) {
      std::array<std::vector<double>, 4> samples;
      for (std::size_t rep = 0; rep < config.repetitions; ++rep) {
        for (std::size_t b = 0; b < 2; ++b) {
          const std::uint64_t seed = stream_seed(
              config.seed, fmt::format("vqe/{}/{}/{}/{}", ti, vqe_mode_name(mode), b, rep));
          MeasurementSetup setup;
          setup.n_qubits = 4;
          setup.readout = config.readout;
          setup.ibu_iterations = config.readout ? config.ibu_iterations : 0;
          if (mode != VqeMode::Noisy) setup.code = code;
          const auto& probs = dist.probs[b];
          setup.distribution = [&probs](const PauliString& p) { return probs.at(p.label().value()); };

          std::vector<double> hist;
          if (mode != VqeMode::Hybrid) {
            std::mt19937_64 rng(seed);
            hist = measure(setup, probs[0], config.shots, rng);
          }
          for (std::size_t o = 0; o < 4; ++o) {
            if (basis_of(o) != b) continue;
            double value = 0.0;
            switch (mode) {
              case VqeMode::Noisy: value = parity_expectation(hist, physical_mask(code, o)); break;
              case VqeMode::Qedc: value = parity_expectation(hist, logical_mask(o)); break;
              case VqeMode::Hybrid:
                setup.parity_mask = logical_mask(o);
                value = pec_direct(setup, inverse, config.shots, seed).value;
                break;
            }
            if (!std::isnan(value)) samples[o].push_back(value);
          }
        }
      }
      for (std::size_t o = 0; o < 4; ++o) {
        if (samples[o].empty()) {
          throw ConsistencyError(fmt::format("post-selection kept no shots at theta = {}", theta));
        }
        const double n = static_cast<double>(samples[o].size());
        double mean = 0.0;
        for (double v : samples[o]) mean += v;
        mean /= n;
        double var = 0.0;
        for (double v : samples[o]) var += (v - mean) * (v - mean);
        var = samples[o].size() > 1 ? var / (n - 1) : 0.0;
        per_theta[ti].push_back(VqePoint{theta, mode, o, mean, std::sqrt(var), vqe_ideal(o, theta)});
      }
    }
  });
  for (auto& v : per_theta) result.points.insert(result.points.end(), v.begin(), v.end());
  return result;
}

std::string expectations_csv(const VqeResult& result) {
  std::string out = "theta,observable,mode,value,two_sigma\n";
  for (const auto& p : result.points) {
    out += fmt::format("{},{},{},{},{}\n", fmt_double(p.theta), kVqeObservables[p.observable],
                       vqe_mode_name(p.mode), fmt_double(p.mean), fmt_double(2.0 * p.sigma));
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

class NaturalSpline {
 public:
  NaturalSpline(const std::vector<double>& x, const std::vector<double>& y)
      : acc_(gsl_interp_accel_alloc()), spline_(gsl_spline_alloc(gsl_interp_cspline, x.size())) {
    gsl_error_handler_t* old = gsl_set_error_handler_off();
    const int status = gsl_spline_init(spline_, x.data(), y.data(), x.size());
    gsl_set_error_handler(old);
    if (status != GSL_SUCCESS) {
      release();
      throw ValidationError(fmt::format("spline construction failed: {}", gsl_strerror(status)));
    }
  }
  ~NaturalSpline() { release(); }
  NaturalSpline(const NaturalSpline&) = delete;
  NaturalSpline& operator=(const NaturalSpline&) = delete;

  double operator()(double x) const { return gsl_spline_eval(spline_, x, acc_); }

 private:
  void release() {
    if (spline_ != nullptr) gsl_spline_free(spline_);
    if (acc_ != nullptr) gsl_interp_accel_free(acc_);
    spline_ = nullptr;
    acc_ = nullptr;
  }

  gsl_interp_accel* acc_;
  gsl_spline* spline_;
};

}  // namespace

std::vector<PesRow> pes_curve(const std::vector<double>& thetas,
                              const std::vector<H2Expectations>& expectations,
                              const std::vector<H2Coefficients>& table, const PesOptions& options) {
  if (thetas.size() != expectations.size()) {
    throw DimensionError("one expectation set per theta is required");
  }
  if (thetas.size() < 4) throw ValidationError("cubic spline needs at least 4 theta points");
  for (std::size_t i = 1; i < thetas.size(); ++i) {
    if (!(thetas[i] > thetas[i - 1])) throw ValidationError("theta grid must be strictly increasing");
  }
  if (options.grid_points < 2) throw ValidationError("minimization grid needs at least 2 points");

  std::array<std::vector<double>, 4> cols;
  for (const auto& e : expectations) {
    cols[0].push_back(e.z1);
    cols[1].push_back(e.z2);
    cols[2].push_back(e.z1z2);
    cols[3].push_back(e.x1x2);
  }
  const NaturalSpline z1(thetas, cols[0]);
  const NaturalSpline z2(thetas, cols[1]);
  const NaturalSpline zz(thetas, cols[2]);
  const NaturalSpline xx(thetas, cols[3]);
  auto at = [&](double t) { return H2Expectations{z1(t), z2(t), zz(t), xx(t)}; };

  const double lo = thetas.front();
  const double hi = thetas.back();
  const std::size_t m = options.grid_points;
  std::vector<H2Expectations> grid(m);
  std::vector<double> grid_theta(m);
  for (std::size_t i = 0; i < m; ++i) {
    grid_theta[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(m - 1);
    grid[i] = at(grid_theta[i]);
  }

  std::vector<PesRow> rows(table.size());
  for (std::size_t r = 0; r < table.size(); ++r) {
    const H2Coefficients& g = table[r];
    std::size_t best = 0;
    double best_e = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      const double e = h2_energy(grid[i], g);
      if (e < best_e) {
        best_e = e;
        best = i;
      }
    }
    const double a = grid_theta[best == 0 ? 0 : best - 1];
    const double b = grid_theta[std::min(best + 1, m - 1)];
    const auto [t, e] = boost::math::tools::brent_find_minima(
        [&](double x) { return h2_energy(at(x), g); }, a, b, options.tolerance_bits);
    rows[r] = e <= best_e ? PesRow{g.r, t, e} : PesRow{g.r, grid_theta[best], best_e};
  }
  return rows;
}

std::vector<H2Expectations> vqe_expectation_table(const VqeResult& result, VqeMode mode) {
  std::vector<H2Expectations> out(result.info.size());
  for (std::size_t i = 0; i < result.info.size(); ++i) {
    out[i].z1 = result.at(i, mode, 0).mean;
    out[i].z2 = result.at(i, mode, 1).mean;
    out[i].z1z2 = result.at(i, mode, 2).mean;
    out[i].x1x2 = result.at(i, mode, 3).mean;
  }
  return out;
}

std::string pes_csv(const std::vector<std::pair<std::string, std::vector<PesRow>>>& curves) {
  std::string out = "mode,R,theta_min,energy\n";
  for (const auto& [mode, rows] : curves) {
    for (const auto& r : rows) {
      out += fmt::format("{},{},{},{}\n", mode, fmt_double(r.r), fmt_double(r.theta_min),
                         fmt_double(r.energy));
    }
  }
  return out;
}

}  // namespace hqem
