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

#include "hqem/twirl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <set>

#include <fmt/format.h>

#include "hqem/errors.hpp"
#include "hqem/parallel.hpp"
#include "hqem/propagate.hpp"

namespace hqem {

namespace {

std::vector<std::string> sorted_labels(const std::vector<PauliString>& ps) {
  std::vector<std::string> out;
  for (const auto& p : ps) out.push_back(p.letters());
  return out;
}

struct Candidate {
  std::vector<std::size_t> picks;  // indices into the pool
  double objective = std::numeric_limits<double>::infinity();
  std::vector<std::string> labels;
};

bool better(const Candidate& a, const Candidate& b) {
  constexpr double kTieTol = 1e-12;
  if (a.objective < b.objective - kTieTol) return true;
  if (a.objective > b.objective + kTieTol) return false;
  if (a.picks.size() != b.picks.size()) return a.picks.size() < b.picks.size();
  return a.labels < b.labels;
}

Candidate evaluate(const ChiMatrix& chi, const ErrorPredicate& allowed,
                   const std::vector<PauliString>& pool, std::vector<std::size_t> picks) {
  std::sort(picks.begin(), picks.end());
  std::vector<PauliString> members;
  for (std::size_t i : picks) members.push_back(pool[i]);
  Candidate c;
  c.labels = sorted_labels(members);
  std::sort(c.labels.begin(), c.labels.end());
  c.objective = twirl_objective(twirl_channel(chi, TwirlSet::from_paulis(chi.n_qubits(), members)),
                                allowed);
  c.picks = std::move(picks);
  return c;
}

PauliString pauli_image(const Gate& g, const PauliString& reg) {
  if (g.is_clifford()) return conjugate_clifford(g, reg);
  const GeneralizedError img = conjugate(g, GeneralizedError::from_pauli(reg));
  if (!img.is_pauli()) {
    throw InstantiationError(fmt::format("{} does not map {} to a Pauli", gate_name(g.kind),
                                         reg.letters()));
  }
  return img.terms().front().op;
}

}  // namespace

TwirlSet TwirlSet::full(std::size_t n_qubits) {
  std::vector<PauliString> m;
  for (std::uint64_t a = 0; a < pauli_count(n_qubits); ++a) {
    m.push_back(PauliString::from_label(n_qubits, PauliLabel(a)));
  }
  return from_paulis(n_qubits, std::move(m));
}

TwirlSet TwirlSet::identity(std::size_t n_qubits) {
  return from_paulis(n_qubits, {PauliString(n_qubits)});
}

TwirlSet TwirlSet::from_labels(const std::vector<std::string>& labels) {
  if (labels.empty()) throw ValidationError("twirl set is empty");
  std::vector<PauliString> m;
  for (const auto& l : labels) m.push_back(PauliString::parse(l).unsigned_part());
  const std::size_t n = m.front().n_qubits();
  return from_paulis(n, std::move(m));
}

TwirlSet TwirlSet::from_paulis(std::size_t n_qubits, std::vector<PauliString> members) {
  TwirlSet s;
  s.n_qubits = n_qubits;
  for (auto& p : members) p = p.unsigned_part();
  s.members = std::move(members);
  s.weights.assign(s.members.size(), s.members.empty() ? 0.0 : 1.0 / s.members.size());
  s.validate();
  return s;
}

bool TwirlSet::contains(const PauliString& p) const {
  return std::any_of(members.begin(), members.end(),
                     [&](const PauliString& m) { return m == p.unsigned_part(); });
}

std::vector<std::string> TwirlSet::labels() const { return sorted_labels(members); }

void TwirlSet::validate() const {
  if (members.empty()) throw ValidationError("twirl set is empty");
  if (weights.size() != members.size()) throw ValidationError("twirl weights do not match members");
  std::set<std::uint64_t> seen;
  for (const auto& m : members) {
    if (m.n_qubits() != n_qubits) throw ValidationError("twirl members have mixed sizes");
    if (!seen.insert(m.label().value()).second) {
      throw ValidationError(fmt::format("twirl member {} repeated", m.letters()));
    }
  }
  double s = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw ValidationError("negative twirl weight");
    s += w;
  }
  if (std::abs(s - 1.0) > 1e-12) throw ValidationError("twirl weights do not sum to 1");
}

ChiMatrix twirl_channel(const ChiMatrix& chi, const TwirlSet& set) {
  if (chi.n_qubits() != set.n_qubits) throw DimensionError("twirl set and channel sizes differ");
  const std::size_t d = pauli_count(chi.n_qubits());
  Eigen::MatrixXd mask = Eigen::MatrixXd::Zero(d, d);
  for (std::size_t i = 0; i < set.size(); ++i) {
    const std::uint64_t li = set.members[i].label().value();
    std::vector<double> sign(d);
    for (std::uint64_t m = 0; m < d; ++m) sign[m] = label_symplectic_product(li, m) ? -1.0 : 1.0;
    for (std::uint64_t m = 0; m < d; ++m) {
      for (std::uint64_t n = 0; n < d; ++n) mask(m, n) += set.weights[i] * sign[m] * sign[n];
    }
  }
  return ChiMatrix(chi.n_qubits(), chi.matrix().cwiseProduct(mask.cast<std::complex<double>>()));
}

ChiMatrix twirl_channel(const std::vector<KrausTerm>& kraus, const TwirlSet& set) {
  return twirl_channel(chi_of_kraus(kraus), set);
}

double twirl_objective(const ChiMatrix& chi, const ErrorPredicate& allowed) {
  const std::size_t n = chi.n_qubits();
  const std::size_t d = pauli_count(n);
  double s = 0.0;
  for (std::uint64_t m = 0; m < d; ++m) {
    for (std::uint64_t k = 0; k < d; ++k) {
      if (m == k && (m == 0 || allowed(PauliString::from_label(n, PauliLabel(m))))) continue;
      s += std::norm(chi(m, k));
    }
  }
  return std::sqrt(s);
}

std::pair<TwirlSet, TwirlObjectiveReport> search_partial_set(const ChiMatrix& chi,
                                                             const ErrorPredicate& allowed,
                                                             const std::vector<PauliString>& pool,
                                                             std::size_t max_size) {
  if (pool.empty()) throw ValidationError("twirl candidate pool is empty");
  if (max_size == 0) throw ValidationError("twirl set size limit must be positive");
  for (const auto& p : pool) {
    if (p.n_qubits() != chi.n_qubits()) throw DimensionError("pool Pauli size mismatch");
  }
  const std::size_t limit = std::min(max_size, pool.size());
  Candidate best;
  if (pool.size() <= 12) {
    const std::size_t n_subsets = std::size_t{1} << pool.size();
    std::vector<Candidate> results(n_subsets);
    parallel_for(n_subsets, [&](std::size_t mask) {
      if (mask == 0 || static_cast<std::size_t>(std::popcount(mask)) > limit) return;
      std::vector<std::size_t> picks;
      for (std::size_t i = 0; i < pool.size(); ++i) {
        if ((mask >> i) & 1U) picks.push_back(i);
      }
      results[mask] = evaluate(chi, allowed, pool, std::move(picks));
    });
    for (auto& r : results) {
      if (!r.picks.empty() && (best.picks.empty() || better(r, best))) best = std::move(r);
    }
  } else {
    std::vector<Candidate> singles(pool.size());
    parallel_for(pool.size(), [&](std::size_t i) { singles[i] = evaluate(chi, allowed, pool, {i}); });
    for (auto& s : singles) {
      if (best.picks.empty() || better(s, best)) best = s;
    }
    auto grow_step = [&](const Candidate& cur) {
      std::vector<Candidate> trials(pool.size());
      parallel_for(pool.size(), [&](std::size_t i) {
        if (std::find(cur.picks.begin(), cur.picks.end(), i) != cur.picks.end()) return;
        auto picks = cur.picks;
        picks.push_back(i);
        trials[i] = evaluate(chi, allowed, pool, std::move(picks));
      });
      Candidate out = cur;
      for (auto& t : trials) {
        if (!t.picks.empty() && (out.picks.size() == cur.picks.size() || better(t, out))) out = std::move(t);
      }
      return out;
    };
    // Uniform weights make the objective non-monotone in the set size, so the path runs to the
    // size limit and keeps the best set seen on it.
    Candidate path = best;
    while (path.picks.size() < limit) {
      Candidate next = grow_step(path);
      if (next.picks.size() == path.picks.size()) break;
      path = std::move(next);
      if (better(path, best)) best = path;
    }
    bool improved = true;
    while (improved) {
      improved = false;
      for (std::size_t a = 0; a < best.picks.size() && !improved; ++a) {
        for (std::size_t i = 0; i < pool.size() && !improved; ++i) {
          if (std::find(best.picks.begin(), best.picks.end(), i) != best.picks.end()) continue;
          auto picks = best.picks;
          picks[a] = i;
          Candidate t = evaluate(chi, allowed, pool, std::move(picks));
          if (better(t, best)) {
            best = std::move(t);
            improved = true;
          }
        }
      }
    }
  }
  std::vector<PauliString> members;
  for (std::size_t i : best.picks) members.push_back(pool[i]);
  TwirlSet set = TwirlSet::from_paulis(chi.n_qubits(), std::move(members));
  TwirlObjectiveReport report;
  report.objective = best.objective;
  report.offdiagonal_before = chi.offdiagonal_norm();
  report.offdiagonal_after = twirl_channel(chi, set).offdiagonal_norm();
  return {std::move(set), report};
}

TwirlSet conjugated_set(const TwirlSet& set, const Gate& local_gate) {
  std::vector<PauliString> out;
  for (const auto& m : set.members) out.push_back(pauli_image(local_gate, m).unsigned_part());
  TwirlSet s = TwirlSet::from_paulis(set.n_qubits, std::move(out));
  s.weights = set.weights;
  return s;
}

std::vector<TwirlSite> twirl_sites(const Circuit& circuit, GateKind kind, const TwirlSet& set) {
  std::vector<TwirlSite> sites;
  for (std::size_t l = 0; l < circuit.depth(); ++l) {
    const auto& gates = circuit.layers()[l].gates;
    for (std::size_t g = 0; g < gates.size(); ++g) {
      if (gates[g].kind != kind) continue;
      if (gates[g].arity() != set.n_qubits) throw DimensionError("twirl set does not fit the gate");
      sites.push_back({l, g, set});
    }
  }
  return sites;
}

Circuit instantiate_choice(const Circuit& circuit, const std::vector<TwirlSite>& sites,
                           const std::vector<std::size_t>& choice) {
  if (choice.size() != sites.size()) throw DimensionError("one choice per twirl site required");
  const std::size_t n = circuit.n_qubits();
  std::map<std::size_t, std::vector<std::size_t>> by_layer;
  for (std::size_t s = 0; s < sites.size(); ++s) {
    if (sites[s].layer >= circuit.depth() ||
        sites[s].gate >= circuit.layers()[sites[s].layer].gates.size()) {
      throw InstantiationError(fmt::format("twirl site {} is outside the circuit", s));
    }
    by_layer[sites[s].layer].push_back(s);
  }
  Circuit out(n);
  for (std::size_t l = 0; l < circuit.depth(); ++l) {
    const Layer& layer = circuit.layers()[l];
    auto it = by_layer.find(l);
    if (it == by_layer.end()) {
      out.add_layer(layer.gates, layer.noise);
      continue;
    }
    std::vector<Gate> before;
    std::vector<Gate> after;
    for (std::size_t s : it->second) {
      const TwirlSite& site = sites[s];
      const Gate& g = layer.gates[site.gate];
      if (choice[s] >= site.set.size()) throw InstantiationError("twirl choice out of range");
      const PauliString p = site.set.members[choice[s]].embed(n, g.targets);
      const PauliString img = pauli_image(g, p);
      for (std::size_t q : g.targets) {
        if (p.letter(q) != 'I') before.push_back(Gate::pauli_letter(p.letter(q), q));
      }
      for (std::size_t q = 0; q < n; ++q) {
        if (img.letter(q) == 'I') continue;
        if (std::find(g.targets.begin(), g.targets.end(), q) == g.targets.end()) {
          throw InstantiationError("twirl frame correction leaves the gate's qubits");
        }
        after.push_back(Gate::pauli_letter(img.letter(q), q));
      }
    }
    if (!before.empty()) out.add_layer(std::move(before));
    out.add_layer(layer.gates, layer.noise);
    if (!after.empty()) out.add_layer(std::move(after));
  }
  return out;
}

std::vector<Circuit> instantiate_twirled(const Circuit& circuit,
                                         const std::vector<TwirlSite>& sites, std::size_t count,
                                         std::uint64_t seed) {
  if (count == 0) throw ValidationError("need at least one twirled instance");
  std::vector<Circuit> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::mt19937_64 rng(stream_seed(seed, static_cast<std::uint64_t>(i)));
    std::vector<std::size_t> choice;
    for (const auto& site : sites) {
      std::discrete_distribution<std::size_t> pick(site.set.weights.begin(), site.set.weights.end());
      choice.push_back(pick(rng));
    }
    out.push_back(instantiate_choice(circuit, sites, choice));
  }
  return out;
}

TwirlSet vqe_twirl_set() { return TwirlSet::from_labels({"IY", "IZ", "YY", "YZ", "ZI", "ZY", "ZZ"}); }

nlohmann::json to_json(const TwirlSet& set) { return set.labels(); }

TwirlSet twirl_set_from_json(const nlohmann::json& j) {
  return TwirlSet::from_labels(j.get<std::vector<std::string>>());
}

}  // namespace hqem
