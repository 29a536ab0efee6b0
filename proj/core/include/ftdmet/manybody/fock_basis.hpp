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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace ftdmet {

enum class ParticleKind { fermion, boson };

struct Statistics {
    ParticleKind kind = ParticleKind::fermion;
    int max_occupancy = 1;

    static Statistics fermion() { return {ParticleKind::fermion, 1}; }
    static Statistics boson(int cap) { return {ParticleKind::boson, cap}; }

    bool is_fermion() const noexcept { return kind == ParticleKind::fermion; }
    bool is_boson() const noexcept { return kind == ParticleKind::boson; }

    bool operator==(const Statistics&) const = default;
};

/// Particle-number sector. For fermions the optional spin_up count fixes S_z;
/// spin-up modes are the even spin-orbital indices (interleaved ordering).
struct Sector {
    int particles = 0;
    std::optional<int> spin_up;

    static Sector total(int n) { return {n, std::nullopt}; }
    static Sector spins(int up, int down) { return {up + down, up}; }

    bool resolves_spin() const noexcept { return spin_up.has_value(); }
    int spin_down() const { return particles - spin_up.value(); }

    bool operator==(const Sector&) const = default;
};

std::string to_string(const Sector& s);

/// All occupation vectors of a sector, in descending lexicographic order
/// (|20>, |11>, |02> for two bosons on two sites).
class FockBasis {
public:
    FockBasis(int modes, Sector sector, Statistics statistics);

    int modes() const noexcept { return modes_; }
    int particles() const noexcept { return sector_.particles; }
    const Sector& sector() const noexcept { return sector_; }
    const Statistics& statistics() const noexcept { return statistics_; }
    std::size_t size() const noexcept { return count_; }

    std::span<const std::uint8_t> state(std::size_t index) const {
        return {occupations_.data() + index * static_cast<std::size_t>(modes_),
                static_cast<std::size_t>(modes_)};
    }

    std::optional<std::size_t> find(std::span<const std::uint8_t> occupation) const;
    std::size_t index_of(std::span<const std::uint8_t> occupation) const;

    /// Packs an occupation vector into the key used by the index map.
    std::uint64_t key(std::span<const std::uint8_t> occupation) const;

private:
    int modes_;
    Sector sector_;
    Statistics statistics_;
    std::size_t count_ = 0;
    std::uint64_t radix_ = 2;
    std::vector<std::uint8_t> occupations_;
    std::unordered_map<std::uint64_t, std::size_t> index_;
};

FockBasis enumerate_basis(int modes, int particles, Statistics statistics);
FockBasis enumerate_basis(int modes, Sector sector, Statistics statistics);

} // namespace ftdmet
