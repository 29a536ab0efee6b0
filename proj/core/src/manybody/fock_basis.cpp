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

#include "ftdmet/manybody/fock_basis.hpp"

#include "ftdmet/common/error.hpp"

#include <cmath>
#include <fmt/format.h>

namespace ftdmet {

std::string to_string(const Sector& s) {
    if(s.resolves_spin()) return fmt::format("N={} (up={}, down={})", s.particles, *s.spin_up, s.spin_down());
    return fmt::format("N={}", s.particles);
}

namespace {

struct Enumerator {
    int modes;
    int cap;
    bool spin_resolved;
    std::vector<std::uint8_t> current;
    std::vector<std::uint8_t>& out;
    std::size_t count = 0;

    // Remaining capacity of modes [m, modes) for a given spin parity.
    int capacity_from(int m, int parity) const {
        if(!spin_resolved) return (modes - m) * cap;
        int c = 0;
        for(int k = m; k < modes; ++k)
            if(k % 2 == parity) c += cap;
        return c;
    }

    void run(int m, int left, int left_up, int left_down) {
        if(m == modes) {
            if(left == 0) {
                out.insert(out.end(), current.begin(), current.end());
                ++count;
            }
            return;
        }
        if(spin_resolved) {
            if(capacity_from(m, 0) < left_up || capacity_from(m, 1) < left_down) return;
        } else if(capacity_from(m, 0) < left) {
            return;
        }
        const bool up  = m % 2 == 0;
        int hi         = std::min(cap, left);
        if(spin_resolved) hi = std::min(hi, up ? left_up : left_down);
        for(int k = hi; k >= 0; --k) {
            current[m] = static_cast<std::uint8_t>(k);
            run(m + 1, left - k, up ? left_up - k : left_up, up ? left_down : left_down - k);
        }
        current[m] = 0;
    }
};

} // namespace

FockBasis::FockBasis(int modes, Sector sector, Statistics statistics)
  : modes_(modes), sector_(sector), statistics_(statistics) {
    if(modes < 1) throw DimensionError("FockBasis: need at least one mode");
    if(sector.particles < 0) throw DimensionError("FockBasis: negative particle number");
    if(statistics.is_fermion()) statistics_.max_occupancy = 1;
    if(statistics_.max_occupancy < 1) throw DimensionError("FockBasis: occupancy cap must be positive");

    const int cap = statistics_.max_occupancy;
    if(static_cast<long>(sector.particles) > static_cast<long>(modes) * cap)
        throw CapacityError(fmt::format("FockBasis: {} particles exceed {} modes x cap {}",
                                        sector.particles, modes, cap));

    const bool spin_resolved = statistics_.is_fermion() && sector.resolves_spin();
    if(sector.resolves_spin() && !statistics_.is_fermion())
        throw DimensionError("FockBasis: spin sectors apply to fermions only");
    if(spin_resolved) {
        if(*sector.spin_up < 0 || sector.spin_down() < 0)
            throw DimensionError("FockBasis: negative spin population");
        if(*sector.spin_up > (modes + 1) / 2 || sector.spin_down() > modes / 2)
            throw CapacityError("FockBasis: spin population exceeds spin-orbitals");
    }

    radix_ = static_cast<std::uint64_t>(cap) + 1;
    if(std::log2(static_cast<double>(radix_)) * modes > 63.0)
        throw CapacityError("FockBasis: occupation key does not fit 64 bits");

    Enumerator e{modes, cap, spin_resolved, std::vector<std::uint8_t>(modes, 0), occupations_};
    e.run(0, sector.particles, spin_resolved ? *sector.spin_up : 0,
          spin_resolved ? sector.spin_down() : 0);
    count_ = e.count;

    index_.reserve(count_);
    for(std::size_t i = 0; i < count_; ++i) index_.emplace(key(state(i)), i);
}

std::uint64_t FockBasis::key(std::span<const std::uint8_t> occupation) const {
    std::uint64_t k = 0;
    for(auto it = occupation.rbegin(); it != occupation.rend(); ++it) k = k * radix_ + *it;
    return k;
}

std::optional<std::size_t> FockBasis::find(std::span<const std::uint8_t> occupation) const {
    if(occupation.size() != static_cast<std::size_t>(modes_)) return std::nullopt;
    for(auto o : occupation)
        if(o > statistics_.max_occupancy) return std::nullopt;
    const auto it = index_.find(key(occupation));
    if(it == index_.end()) return std::nullopt;
    return it->second;
}

std::size_t FockBasis::index_of(std::span<const std::uint8_t> occupation) const {
    if(auto i = find(occupation)) return *i;
    throw DimensionError("FockBasis: occupation vector not in basis");
}

FockBasis enumerate_basis(int modes, int particles, Statistics statistics) {
    return FockBasis(modes, Sector::total(particles), statistics);
}

FockBasis enumerate_basis(int modes, Sector sector, Statistics statistics) {
    return FockBasis(modes, sector, statistics);
}

} // namespace ftdmet
