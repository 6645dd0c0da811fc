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

#include <cstdint>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "hqem/analysis.hpp"
#include "hqem/bench.hpp"
#include "hqem/channel.hpp"
#include "hqem/mitigate.hpp"
#include "hqem/propagate.hpp"
#include "hqem/twirl.hpp"

namespace {

using namespace hqem;

void BM_PauliProduct(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::uint64_t> pick(0, pauli_count(n) - 1);
  std::vector<PauliString> ps;
  for (int i = 0; i < 256; ++i) ps.push_back(PauliString::from_label(n, PauliLabel(pick(rng))));
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ps[i % 256] * ps[(i + 1) % 256]);
    ++i;
  }
}
BENCHMARK(BM_PauliProduct)->Arg(2)->Arg(8)->Arg(32);

void BM_InvertPauliChannel(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const PauliChannel ch = depolarizing(n, 0.01);
  for (auto _ : state) benchmark::DoNotOptimize(invert_pauli_channel(ch).gamma());
  state.SetComplexityN(static_cast<std::int64_t>(pauli_count(n)));
}
BENCHMARK(BM_InvertPauliChannel)->DenseRange(1, 6)->Complexity(benchmark::oNLogN);

void BM_EncodedVqeDensity(benchmark::State& state) {
  const Circuit c = encoded_vqe_circuit(vqe_code(), 0.7, 0.01);
  for (auto _ : state) benchmark::DoNotOptimize(run_density(c, DensityMatrix::zero_state(4)));
}
BENCHMARK(BM_EncodedVqeDensity);

void BM_AccumulateVqeNoise(benchmark::State& state) {
  const Circuit c = encoded_vqe_circuit(vqe_code(), 0.7, 0.01);
  for (auto _ : state) benchmark::DoNotOptimize(accumulate_total_noise(c).entries.size());
}
BENCHMARK(BM_AccumulateVqeNoise)->Unit(benchmark::kMillisecond);

void BM_VqeLogicalNoise(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(reduce_to_pauli(vqe_logical_noise(vqe_code(), 0.7, 0.01)));
}
BENCHMARK(BM_VqeLogicalNoise)->Unit(benchmark::kMillisecond);

void BM_FullTwirl(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const ChiMatrix chi = coherent_rx_noise(n, 0.1);
  const TwirlSet set = TwirlSet::full(n);
  for (auto _ : state) benchmark::DoNotOptimize(twirl_channel(chi, set).offdiagonal_norm());
}
BENCHMARK(BM_FullTwirl)->DenseRange(1, 3);

void BM_PecDirect(benchmark::State& state) {
  const PauliChannel noise = depolarizing(2, 0.05);
  const QuasiProbability inv = invert_pauli_channel(noise);
  MeasurementSetup s;
  s.n_qubits = 2;
  s.parity_mask = 0b11;
  s.distribution = [&](const PauliString& p) {
    DensityMatrix rho = DensityMatrix::zero_state(2);
    rho.apply_pauli_channel(noise, {0, 1});
    rho.apply_pauli(p);
    return rho.probabilities();
  };
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(pec_direct(s, inv, 10000, ++seed).value);
}
BENCHMARK(BM_PecDirect);

void BM_CbLearning(benchmark::State& state) {
  CbOptions opt;
  opt.shots = 1000;
  opt.instances = 2;
  for (auto _ : state) {
    benchmark::DoNotOptimize(learn_pauli_fidelities(Gate::ecr(0, 1), depolarizing(2, 0.02), opt).size());
  }
}
BENCHMARK(BM_CbLearning)->Unit(benchmark::kMillisecond);

void BM_OverheadStudy(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(overhead_study(OverheadConfig{}).size());
}
BENCHMARK(BM_OverheadStudy)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
