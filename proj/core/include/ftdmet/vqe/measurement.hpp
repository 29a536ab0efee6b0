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

#pragma once

#include "ftdmet/common/random.hpp"
#include "ftdmet/vqe/pauli.hpp"

#include <cstdint>
#include <vector>

namespace ftdmet {

/// Generic shot-noise model: per-qubit readout flips, a global
/// depolarizing channel per two-qubit gate equivalent, finite shots.
struct NoiseConfig {
    int shots = 0; ///< 0 means exact expectation values
    double depolarizing_rate = 0.0;
    double readout_flip = 0.0;
    std::uint64_t rng_seed = 0;

    static NoiseConfig noiseless() { return {}; }
    static NoiseConfig hardware_like(std::uint64_t seed = 0) { return {5000, 0.005, 0.01, seed}; }

    bool exact() const noexcept { return shots == 0; }
    void validate() const;

    /// Weight of the maximally mixed state after `gates` two-qubit gates.
    double mixing(int gates) const;
};

/// Strings that can be read out together: on every qubit they use the
/// same non-identity letter or the identity.
struct MeasurementGroup {
    PauliString basis; ///< measurement letter per qubit
    std::vector<PauliString> strings;
};

std::vector<MeasurementGroup> group_qubitwise(const std::vector<PauliString>& strings);

/// Measures a set of observables from one pass of grouped shots.
class MeasurementPlan {
public:
    explicit MeasurementPlan(std::vector<PauliHamiltonian> observables);

    const std::vector<MeasurementGroup>& groups() const noexcept { return groups_; }
    std::size_t observable_count() const noexcept { return observables_.size(); }

    std::vector<double> exact(const QubitState& psi) const;

    /// Infinite-shot limit of the noisy estimator.
    std::vector<double> noisy_limit(const QubitState& psi, const NoiseConfig& noise, double mixing) const;

    /// Shot estimate; with noise.shots == 0 this is exact().
    std::vector<double> sample(const QubitState& psi, const NoiseConfig& noise, double mixing,
                               Rng& rng) const;

private:
    std::vector<double> combine(const std::vector<std::vector<double>>& string_values) const;
    std::vector<double> distribution(const QubitState& psi, const MeasurementGroup& g,
                                     const NoiseConfig& noise, double mixing) const;

    std::vector<PauliHamiltonian> observables_;
    std::vector<MeasurementGroup> groups_;
    int qubits_ = 0;
};

double sampled_expectation(const QubitState& psi, const PauliHamiltonian& h, const NoiseConfig& noise,
                           int gate_equivalents = 0);

} // namespace ftdmet
