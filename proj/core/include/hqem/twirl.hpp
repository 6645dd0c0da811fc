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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "hqem/channel.hpp"
#include "hqem/pauli.hpp"
#include "hqem/sim.hpp"

namespace hqem {

// Paulis on a gate's k qubits (local order), sampled with `weights`.
struct TwirlSet {
  std::size_t n_qubits = 0;
  std::vector<PauliString> members;
  std::vector<double> weights;

  static TwirlSet full(std::size_t n_qubits);
  static TwirlSet identity(std::size_t n_qubits);
  // Uniform weights; throws ValidationError on duplicates or mixed sizes.
  static TwirlSet from_labels(const std::vector<std::string>& labels);
  static TwirlSet from_paulis(std::size_t n_qubits, std::vector<PauliString> members);

  std::size_t size() const { return members.size(); }
  bool contains(const PauliString& p) const;
  std::vector<std::string> labels() const;
  void validate() const;
};

struct TwirlObjectiveReport {
  double objective = 0.0;
  double offdiagonal_before = 0.0;
  double offdiagonal_after = 0.0;
};

// (1/|S|) sum_i P_i Lambda(P_i rho P_i) P_i, computed as an elementwise sign mask on chi.
ChiMatrix twirl_channel(const ChiMatrix& chi, const TwirlSet& set);
ChiMatrix twirl_channel(const std::vector<KrausTerm>& kraus, const TwirlSet& set);

using ErrorPredicate = std::function<bool(const PauliString&)>;

// Frobenius norm of chi outside the diagonal entries on {I} and the allowed errors.
double twirl_objective(const ChiMatrix& chi, const ErrorPredicate& allowed);

// Subset of `pool` (at most max_size members) minimizing the twirled objective. Exhaustive when
// the pool has at most 12 members, greedy growth with one-swap refinement otherwise. Ties go to
// the smaller set, then the lexicographically smaller label list.
std::pair<TwirlSet, TwirlObjectiveReport> search_partial_set(const ChiMatrix& chi,
                                                             const ErrorPredicate& allowed,
                                                             const std::vector<PauliString>& pool,
                                                             std::size_t max_size);

// Set {U P U^dagger : P in set} for a Clifford gate acting on the set's qubits.
TwirlSet conjugated_set(const TwirlSet& set, const Gate& local_gate);

struct TwirlSite {
  std::size_t layer = 0;
  std::size_t gate = 0;  // index within the layer
  TwirlSet set;
};

// Every gate of `kind` in the circuit, twirled with `set`.
std::vector<TwirlSite> twirl_sites(const Circuit& circuit, GateKind kind, const TwirlSet& set);

// N random instances: each site's gate gets a sampled P before it and U P U^dagger after its
// layer noise, so the noiseless action is unchanged up to a global sign.
std::vector<Circuit> instantiate_twirled(const Circuit& circuit,
                                         const std::vector<TwirlSite>& sites, std::size_t count,
                                         std::uint64_t seed);
// The instance for a fixed choice of member index per site.
Circuit instantiate_choice(const Circuit& circuit, const std::vector<TwirlSite>& sites,
                           const std::vector<std::size_t>& choice);

// {IY, IZ, YY, YZ, ZI, ZY, ZZ} for the ECR gates of the VQE circuit.
TwirlSet vqe_twirl_set();

nlohmann::json to_json(const TwirlSet& set);
TwirlSet twirl_set_from_json(const nlohmann::json& j);

}  // namespace hqem
