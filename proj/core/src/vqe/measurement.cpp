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

#include "ftdmet/vqe/measurement.hpp"

#include "ftdmet/common/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <set>

namespace ftdmet {

void NoiseConfig::validate() const {
    if(shots < 0) throw ConfigError("NoiseConfig: negative shot count");
    if(!(depolarizing_rate >= 0.0 && depolarizing_rate <= 1.0))
        throw ConfigError("NoiseConfig: depolarizing rate outside [0, 1]");
    if(!(readout_flip >= 0.0 && readout_flip <= 1.0))
        throw ConfigError("NoiseConfig: readout flip outside [0, 1]");
}

double NoiseConfig::mixing(int gates) const {
    return 1.0 - std::pow(1.0 - depolarizing_rate, std::max(0, gates));
}

namespace {

bool compatible(const PauliString& basis, const PauliString& s) {
    const std::uint32_t overlap = (basis.x | basis.z) & (s.x | s.z);
    return ((basis.x ^ s.x) & overlap) == 0 && ((basis.z ^ s.z) & overlap) == 0;
}

double parity_value(const std::vector<double>& prob, const PauliString& s) {
    const std::uint32_t support = s.x | s.z;
    double v = 0.0;
    for(std::size_t b = 0; b < prob.size(); ++b)
        v += (std::popcount(static_cast<std::uint32_t>(b) & support) % 2 ? -prob[b] : prob[b]);
    return v;
}

} // namespace

std::vector<MeasurementGroup> group_qubitwise(const std::vector<PauliString>& strings) {
    std::set<PauliString> unique(strings.begin(), strings.end());
    std::vector<MeasurementGroup> groups;
    for(const auto& s : unique) {
        if(s.is_identity()) continue;
        auto it = std::find_if(groups.begin(), groups.end(),
                               [&](const MeasurementGroup& g) { return compatible(g.basis, s); });
        if(it == groups.end()) {
            groups.push_back({s, {s}});
        } else {
            it->basis.x |= s.x;
            it->basis.z |= s.z;
            it->strings.push_back(s);
        }
    }
    return groups;
}

MeasurementPlan::MeasurementPlan(std::vector<PauliHamiltonian> observables)
  : observables_(std::move(observables)) {
    if(observables_.empty()) throw DimensionError("MeasurementPlan: no observables");
    qubits_ = observables_.front().qubits();
    std::vector<PauliString> all;
    for(const auto& o : observables_) {
        if(o.qubits() != qubits_) throw DimensionError("MeasurementPlan: observables on different registers");
        for(const auto& t : o.terms()) all.push_back(t.string);
    }
    groups_ = group_qubitwise(all);
}

std::vector<double> MeasurementPlan::exact(const QubitState& psi) const {
    std::vector<double> out;
    out.reserve(observables_.size());
    for(const auto& o : observables_) out.push_back(o.expectation(psi));
    return out;
}

std::vector<double> MeasurementPlan::distribution(const QubitState& psi, const MeasurementGroup& g,
                                                  const NoiseConfig& noise, double mixing) const {
    QubitState phi = psi;
    const auto dim = static_cast<std::uint32_t>(phi.size());
    const double r = 1.0 / std::sqrt(2.0);
    for(int q = 0; q < qubits_; ++q) {
        const std::uint32_t bit = 1u << q;
        if(!(g.basis.x & bit)) continue;
        for(std::uint32_t b = 0; b < dim; ++b) {
            if(b & bit) continue;
            Complex a0 = phi(b), a1 = phi(b | bit);
            if(g.basis.z & bit) a1 *= Complex(0.0, -1.0); // S^dagger, then H: Y -> Z
            phi(b)       = r * (a0 + a1);
            phi(b | bit) = r * (a0 - a1);
        }
    }
    std::vector<double> p(dim);
    for(std::uint32_t b = 0; b < dim; ++b) p[b] = std::norm(phi(b));
    if(mixing > 0.0)
        for(auto& v : p) v = (1.0 - mixing) * v + mixing / dim;
    if(noise.readout_flip > 0.0) {
        const double f = noise.readout_flip;
        for(int q = 0; q < qubits_; ++q) {
            const std::uint32_t bit = 1u << q;
            for(std::uint32_t b = 0; b < dim; ++b) {
                if(b & bit) continue;
                const double p0 = p[b], p1 = p[b | bit];
                p[b]       = (1.0 - f) * p0 + f * p1;
                p[b | bit] = (1.0 - f) * p1 + f * p0;
            }
        }
    }
    return p;
}

std::vector<double> MeasurementPlan::combine(const std::vector<std::vector<double>>& values) const {
    std::map<PauliString, double> lookup;
    for(std::size_t gi = 0; gi < groups_.size(); ++gi)
        for(std::size_t k = 0; k < groups_[gi].strings.size(); ++k)
            lookup[groups_[gi].strings[k]] = values[gi][k];
    std::vector<double> out;
    out.reserve(observables_.size());
    for(const auto& o : observables_) {
        double v = 0.0;
        for(const auto& t : o.terms()) v += t.coefficient * (t.string.is_identity() ? 1.0 : lookup.at(t.string));
        out.push_back(v);
    }
    return out;
}

std::vector<double> MeasurementPlan::noisy_limit(const QubitState& psi, const NoiseConfig& noise,
                                                 double mixing) const {
    std::vector<std::vector<double>> values;
    for(const auto& g : groups_) {
        const auto p = distribution(psi, g, noise, mixing);
        auto& v      = values.emplace_back();
        for(const auto& s : g.strings) v.push_back(parity_value(p, s));
    }
    return combine(values);
}

std::vector<double> MeasurementPlan::sample(const QubitState& psi, const NoiseConfig& noise, double mixing,
                                            Rng& rng) const {
    if(noise.exact()) return exact(psi);
    std::vector<std::vector<double>> values;
    std::vector<double> freq;
    for(const auto& g : groups_) {
        const auto p = distribution(psi, g, noise, mixing);
        // Multinomial draw as a chain of conditional binomials.
        freq.assign(p.size(), 0.0);
        int left      = noise.shots;
        double remain = 1.0;
        for(std::size_t b = 0; b < p.size() && left > 0; ++b) {
            const double q = remain > 0.0 ? std::clamp(p[b] / remain, 0.0, 1.0) : 1.0;
            const int k    = b + 1 == p.size() ? left : std::binomial_distribution<int>(left, q)(rng);
            freq[b]        = static_cast<double>(k) / noise.shots;
            left -= k;
            remain -= p[b];
        }
        auto& v = values.emplace_back();
        for(const auto& s : g.strings) v.push_back(parity_value(freq, s));
    }
    return combine(values);
}

double sampled_expectation(const QubitState& psi, const PauliHamiltonian& h, const NoiseConfig& noise,
                           int gate_equivalents) {
    noise.validate();
    if(noise.exact()) return h.expectation(psi);
    const MeasurementPlan plan({h});
    Rng rng(derive_seed(noise.rng_seed, 0));
    return plan.sample(psi, noise, noise.mixing(gate_equivalents), rng).front();
}

} // namespace ftdmet
