/*
 * Copyright 2026 The ftdmet Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "ftdmet/dmet/dmet.hpp"
#include "ftdmet/dnn/functional.hpp"
#include "ftdmet/dnn/mlp.hpp"
#include "ftdmet/exact/ground_state.hpp"
#include "ftdmet/manybody/models.hpp"
#include "ftdmet/vqe/ansatz.hpp"
#include "ftdmet/vqe/vqe.hpp"

#include <benchmark/benchmark.h>

using namespace ftdmet;

namespace {

LatticeSystem ring(int sites, double u = 1.0, double t = -1.0) {
    FermiHubbardParams p;
    p.sites = sites, p.n_up = sites / 2, p.n_down = sites / 2, p.u = {u}, p.t = t;
    return fermi_hubbard(p);
}

void BM_AssembleHubbard(benchmark::State& state) {
    const auto s = ring(static_cast<int>(state.range(0)));
    for(auto _ : state) benchmark::DoNotOptimize(assemble_hamiltonian(s.h, s.interaction, s.basis()));
    state.counters["dim"] = static_cast<double>(s.basis().size());
}
BENCHMARK(BM_AssembleHubbard)->Arg(6)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_GroundState(benchmark::State& state) {
    const auto s = ring(static_cast<int>(state.range(0)));
    for(auto _ : state) benchmark::DoNotOptimize(energy_of(s).energy);
}
BENCHMARK(BM_GroundState)->Arg(6)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_MlpPredict(benchmark::State& state) {
    Rng rng(1);
    const MlpModel m({3, 64, 64, 64, 1}, Activation::relu, rng);
    const Eigen::VectorXd x = Eigen::Vector3d(1.0, 1.0, -0.5);
    for(auto _ : state) benchmark::DoNotOptimize(m.predict(x));
}
BENCHMARK(BM_MlpPredict);

void BM_HvaEnergyGradient(benchmark::State& state) {
    const auto s    = ring(2, 4.0, -1.0);
    const auto prob = make_vqe_problem(s.h, s.interaction, s.basis());
    const HvaAnsatz ansatz(prob.parts, prob.reference, static_cast<int>(state.range(0)));
    const auto h = prob.hamiltonian.sparse_matrix();
    const Eigen::VectorXd theta = Eigen::VectorXd::Constant(ansatz.parameter_count(), 0.1);
    Eigen::VectorXd grad;
    for(auto _ : state) benchmark::DoNotOptimize(ansatz.energy(h, theta, &grad));
}
BENCHMARK(BM_HvaEnergyGradient)->Arg(2)->Arg(4)->Arg(8);

void BM_DmetExactSolver(benchmark::State& state) {
    const int sites = static_cast<int>(state.range(0));
    const auto s    = ring(sites);
    DmetConfig c;
    c.solver = EmbeddedSolver::exact;
    for(auto _ : state) benchmark::DoNotOptimize(run_dmet(nullptr, s, site_fragment(0, 1, 1, sites), c).e_total);
}
BENCHMARK(BM_DmetExactSolver)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_DmetUntrainedNetwork(benchmark::State& state) {
    const auto s = ring(16);
    Rng rng(2);
    MlpModel m({3, 64, 64, 64, 1}, Activation::softplus, rng);
    m.metadata["interaction"] = ring(1).interaction.to_string();
    const auto f = make_functional({m});
    DmetConfig c;
    c.minimizer.restarts = 2;
    for(auto _ : state) benchmark::DoNotOptimize(run_dmet(f, s, site_fragment(0, 1, 1, 16), c).e_total);
}
BENCHMARK(BM_DmetUntrainedNetwork)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
