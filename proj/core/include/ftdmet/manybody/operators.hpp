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

#include "ftdmet/manybody/fock_basis.hpp"

#include <Eigen/Dense>
#include <string>
#include <string_view>
#include <vector>

namespace ftdmet {

/// Real symmetric one-body matrix over modes (spin-orbitals for fermions,
/// interleaved site0-up, site0-down, site1-up, ...).
class OneBodyMatrix {
public:
    OneBodyMatrix() = default;
    explicit OneBodyMatrix(Eigen::MatrixXd h);

    /// Expands an orbital matrix to spin-orbitals, identical for both spins.
    static OneBodyMatrix spin_diagonal(const Eigen::MatrixXd& orbital);

    const Eigen::MatrixXd& matrix() const noexcept { return h_; }
    int size() const noexcept { return static_cast<int>(h_.rows()); }
    double operator()(int i, int j) const { return h_(i, j); }

    /// Orbital block of a spin-diagonal, spin-independent matrix.
    Eigen::MatrixXd orbital_part() const;
    bool is_spin_diagonal(double tol = 1e-12) const;

private:
    Eigen::MatrixXd h_;
};

enum class InteractionKind {
    bosonic_onsite,   ///< w n_i (n_i - 1), or w (n_i^2 - 1) in the printed convention
    fermionic_onsite, ///< U n_{i up} n_{i down}, i is an orbital index
    density_density   ///< c n_p n_q over spin-orbitals p != q
};

enum class BosonConvention { n_n_minus_one, printed };

struct InteractionTerm {
    InteractionKind kind;
    int i = 0;
    int j = 0;
    double coefficient = 0.0;

    bool operator==(const InteractionTerm&) const = default;
};

class InteractionSpec {
public:
    InteractionSpec() = default;

    InteractionSpec& add_bosonic_onsite(int site, double w);
    InteractionSpec& add_fermionic_onsite(int orbital, double u);
    InteractionSpec& add_density_density(int p, int q, double c);

    const std::vector<InteractionTerm>& terms() const noexcept { return terms_; }
    bool empty() const noexcept { return terms_.empty(); }

    BosonConvention boson_convention() const noexcept { return convention_; }
    InteractionSpec& set_boson_convention(BosonConvention c) {
        convention_ = c;
        return *this;
    }

    /// Throws DimensionError when an index leaves [0, modes).
    void validate(int modes, const Statistics& statistics) const;

    /// Terms acting only on the listed orbitals, re-indexed to their
    /// positions in `orbitals`.
    InteractionSpec restricted(const std::vector<int>& orbitals,
                               const Statistics& statistics) const;

    InteractionSpec scaled(double factor) const;

    /// Positive factor lambda with this == lambda * other, if one exists.
    std::optional<double> ratio_to(const InteractionSpec& other, double tol = 1e-12) const;

    /// Compact single-line form, inverse of parse().
    std::string to_string() const;
    static InteractionSpec parse(std::string_view text);

    bool operator==(const InteractionSpec&) const = default;

private:
    std::vector<InteractionTerm> terms_;
    BosonConvention convention_ = BosonConvention::n_n_minus_one;
};

} // namespace ftdmet
