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

#include "ftdmet/manybody/operators.hpp"

#include "ftdmet/common/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fmt/format.h>
#include <map>
#include <tuple>

namespace ftdmet {

OneBodyMatrix::OneBodyMatrix(Eigen::MatrixXd h) : h_(std::move(h)) {
    if(h_.rows() != h_.cols()) throw DimensionError("OneBodyMatrix: matrix must be square");
    const double asym = (h_ - h_.transpose()).cwiseAbs().maxCoeff();
    if(h_.size() > 0 && asym > 1e-12)
        throw DimensionError(fmt::format("OneBodyMatrix: asymmetry {:.3g} exceeds 1e-12", asym));
    h_ = 0.5 * (h_ + h_.transpose());
}

OneBodyMatrix OneBodyMatrix::spin_diagonal(const Eigen::MatrixXd& orbital) {
    const Eigen::Index m = orbital.rows();
    Eigen::MatrixXd h    = Eigen::MatrixXd::Zero(2 * m, 2 * m);
    for(Eigen::Index i = 0; i < m; ++i)
        for(Eigen::Index j = 0; j < m; ++j)
            for(int s = 0; s < 2; ++s) h(2 * i + s, 2 * j + s) = orbital(i, j);
    return OneBodyMatrix(std::move(h));
}

bool OneBodyMatrix::is_spin_diagonal(double tol) const {
    if(h_.rows() % 2 != 0) return false;
    const Eigen::Index m = h_.rows() / 2;
    for(Eigen::Index i = 0; i < m; ++i)
        for(Eigen::Index j = 0; j < m; ++j) {
            if(std::abs(h_(2 * i, 2 * j) - h_(2 * i + 1, 2 * j + 1)) > tol) return false;
            if(std::abs(h_(2 * i, 2 * j + 1)) > tol || std::abs(h_(2 * i + 1, 2 * j)) > tol)
                return false;
        }
    return true;
}

Eigen::MatrixXd OneBodyMatrix::orbital_part() const {
    if(!is_spin_diagonal())
        throw DimensionError("OneBodyMatrix: orbital part requires a spin-diagonal matrix");
    const Eigen::Index m = h_.rows() / 2;
    Eigen::MatrixXd out(m, m);
    for(Eigen::Index i = 0; i < m; ++i)
        for(Eigen::Index j = 0; j < m; ++j) out(i, j) = h_(2 * i, 2 * j);
    return out;
}

InteractionSpec& InteractionSpec::add_bosonic_onsite(int site, double w) {
    terms_.push_back({InteractionKind::bosonic_onsite, site, site, w});
    return *this;
}

InteractionSpec& InteractionSpec::add_fermionic_onsite(int orbital, double u) {
    terms_.push_back({InteractionKind::fermionic_onsite, orbital, orbital, u});
    return *this;
}

InteractionSpec& InteractionSpec::add_density_density(int p, int q, double c) {
    if(p == q) throw DimensionError("InteractionSpec: density-density needs distinct modes");
    terms_.push_back({InteractionKind::density_density, p, q, c});
    return *this;
}

void InteractionSpec::validate(int modes, const Statistics& statistics) const {
    for(const auto& t : terms_) {
        switch(t.kind) {
            case InteractionKind::bosonic_onsite:
                if(!statistics.is_boson())
                    throw DimensionError("InteractionSpec: bosonic term on fermionic basis");
                if(t.i < 0 || t.i >= modes)
                    throw DimensionError(fmt::format("InteractionSpec: site {} out of range", t.i));
                break;
            case InteractionKind::fermionic_onsite:
                if(!statistics.is_fermion())
                    throw DimensionError("InteractionSpec: fermionic term on bosonic basis");
                if(t.i < 0 || 2 * t.i + 1 >= modes)
                    throw DimensionError(fmt::format("InteractionSpec: orbital {} out of range", t.i));
                break;
            case InteractionKind::density_density:
                if(t.i < 0 || t.i >= modes || t.j < 0 || t.j >= modes)
                    throw DimensionError(
                      fmt::format("InteractionSpec: modes ({}, {}) out of range", t.i, t.j));
                break;
        }
    }
}

InteractionSpec InteractionSpec::restricted(const std::vector<int>& orbitals,
                                            const Statistics& statistics) const {
    auto position = [&](int orbital) -> int {
        const auto it = std::find(orbitals.begin(), orbitals.end(), orbital);
        return it == orbitals.end() ? -1 : static_cast<int>(it - orbitals.begin());
    };
    // Spin-orbital p lives on orbital p / 2 with spin p % 2.
    auto mode_position = [&](int p) -> int {
        if(!statistics.is_fermion()) return position(p);
        const int o = position(p / 2);
        return o < 0 ? -1 : 2 * o + p % 2;
    };

    InteractionSpec out;
    out.convention_ = convention_;
    for(const auto& t : terms_) {
        switch(t.kind) {
            case InteractionKind::bosonic_onsite:
            case InteractionKind::fermionic_onsite:
                if(const int o = position(t.i); o >= 0)
                    out.terms_.push_back({t.kind, o, o, t.coefficient});
                break;
            case InteractionKind::density_density: {
                const int a = mode_position(t.i), b = mode_position(t.j);
                if(a >= 0 && b >= 0) out.terms_.push_back({t.kind, a, b, t.coefficient});
                break;
            }
        }
    }
    return out;
}

InteractionSpec InteractionSpec::scaled(double factor) const {
    InteractionSpec out = *this;
    for(auto& t : out.terms_) t.coefficient *= factor;
    return out;
}

namespace {

using TermKey = std::tuple<int, int, int>;

std::map<TermKey, double> canonical(const std::vector<InteractionTerm>& terms) {
    std::map<TermKey, double> m;
    for(const auto& t : terms) {
        int a = t.i, b = t.j;
        if(t.kind == InteractionKind::density_density && a > b) std::swap(a, b);
        m[{static_cast<int>(t.kind), a, b}] += t.coefficient;
    }
    for(auto it = m.begin(); it != m.end();) it = it->second == 0.0 ? m.erase(it) : std::next(it);
    return m;
}

const char* kind_tag(InteractionKind k) {
    switch(k) {
        case InteractionKind::bosonic_onsite: return "bose";
        case InteractionKind::fermionic_onsite: return "hubbard";
        case InteractionKind::density_density: return "dens";
    }
    return "?";
}

} // namespace

std::optional<double> InteractionSpec::ratio_to(const InteractionSpec& other, double tol) const {
    if(convention_ != other.convention_) return std::nullopt;
    const auto a = canonical(terms_);
    const auto b = canonical(other.terms_);
    if(a.size() != b.size()) return std::nullopt;
    if(a.empty()) return 1.0;
    std::optional<double> ratio;
    for(auto ia = a.begin(), ib = b.begin(); ia != a.end(); ++ia, ++ib) {
        if(ia->first != ib->first) return std::nullopt;
        const double r = ia->second / ib->second;
        if(!(r > 0.0) || !std::isfinite(r)) return std::nullopt;
        if(!ratio) ratio = r;
        else if(std::abs(r - *ratio) > tol * std::max(1.0, std::abs(*ratio))) return std::nullopt;
    }
    return ratio;
}

std::string InteractionSpec::to_string() const {
    std::string s = convention_ == BosonConvention::printed ? "convention:printed" : "convention:nn1";
    for(const auto& t : terms_) {
        s += fmt::format(";{}:{}", kind_tag(t.kind), t.i);
        if(t.kind == InteractionKind::density_density) s += fmt::format(":{}", t.j);
        s += fmt::format(":{:.17g}", t.coefficient);
    }
    return s;
}

InteractionSpec InteractionSpec::parse(std::string_view text) {
    InteractionSpec out;
    auto fail = [&](std::string_view why) {
        return FormatError(fmt::format("InteractionSpec: {} in '{}'", why, text));
    };
    auto to_int = [&](std::string_view v) {
        int x = 0;
        const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
        if(r.ec != std::errc{} || r.ptr != v.data() + v.size()) throw fail("bad index");
        return x;
    };
    auto to_double = [&](std::string_view v) {
        try {
            std::size_t used = 0;
            const double x   = std::stod(std::string(v), &used);
            if(used != v.size()) throw fail("bad coefficient");
            return x;
        } catch(const std::logic_error&) { throw fail("bad coefficient"); }
    };

    std::size_t pos = 0;
    while(pos <= text.size()) {
        const std::size_t end = std::min(text.find(';', pos), text.size());
        const std::string_view item = text.substr(pos, end - pos);
        pos = end + 1;
        if(item.empty()) continue;
        std::vector<std::string_view> f;
        for(std::size_t p = 0; p <= item.size();) {
            const std::size_t e = std::min(item.find(':', p), item.size());
            f.push_back(item.substr(p, e - p));
            p = e + 1;
        }
        if(f[0] == "convention" && f.size() == 2) {
            if(f[1] == "nn1") out.convention_ = BosonConvention::n_n_minus_one;
            else if(f[1] == "printed") out.convention_ = BosonConvention::printed;
            else throw fail("unknown convention");
        } else if(f[0] == "bose" && f.size() == 3) {
            out.add_bosonic_onsite(to_int(f[1]), to_double(f[2]));
        } else if(f[0] == "hubbard" && f.size() == 3) {
            out.add_fermionic_onsite(to_int(f[1]), to_double(f[2]));
        } else if(f[0] == "dens" && f.size() == 4) {
            out.add_density_density(to_int(f[1]), to_int(f[2]), to_double(f[3]));
        } else {
            throw fail("unknown term");
        }
    }
    return out;
}

} // namespace ftdmet
