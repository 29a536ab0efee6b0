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

#include "ftdmet/common/error.hpp"
#include "ftdmet/data/dataset.hpp"
#include "ftdmet/exact/legendre.hpp"
#include "ftdmet/manybody/models.hpp"

#include <catch_amalgamated.hpp>

#include <filesystem>

using namespace ftdmet;
using Catch::Approx;

namespace {

ModelSpace dimer_space(double u = 1.0) {
    FermiHubbardParams p;
    p.sites = 1, p.u = {u}, p.periodic = false;
    return {Statistics::fermion(), 2, Sector::spins(1, 1), fermi_hubbard(p).interaction};
}

std::filesystem::path temp_file(const char* name) {
    return std::filesystem::temp_directory_path() / name;
}

} // namespace

TEST_CASE("sampled h is symmetric and inside the ranges", "[sampling]") {
    SamplingConfig c;
    c.diag_lo = -1.0, c.diag_hi = 0.5, c.offdiag_lo = 0.2, c.offdiag_hi = 0.3;
    Rng rng(3);
    for(int k = 0; k < 50; ++k) {
        const auto h = sample_h(c, 3, rng);
        CHECK((h - h.transpose()).cwiseAbs().maxCoeff() == 0.0);
        for(int i = 0; i < 3; ++i) {
            CHECK(h(i, i) >= -1.0);
            CHECK(h(i, i) <= 0.5);
            for(int j = i + 1; j < 3; ++j) {
                CHECK(h(i, j) >= 0.2);
                CHECK(h(i, j) <= 0.3);
            }
        }
    }
}

TEST_CASE("structured sampling pins and ties entries", "[sampling]") {
    SamplingConfig c;
    StructuredSampling s;
    s.fixed = {{0, 1, 1.0}, {0, 3, 0.0}, {1, 2, 0.0}};
    s.tied  = {{{{0, 2}, {1, 3}}, {1.0, 1.0}, 0.0, 2.0}};
    c.structured = s;
    Rng rng(9);
    for(int k = 0; k < 20; ++k) {
        const auto h = sample_h(c, 4, rng);
        CHECK(h(0, 1) == 1.0);
        CHECK(h(3, 0) == 0.0);
        CHECK(h(1, 2) == 0.0);
        CHECK(h(0, 2) == h(1, 3));
        CHECK(h(0, 2) >= 0.0);
        CHECK(h(0, 2) <= 2.0);
    }
    CHECK(StructuredSampling::parse(s.to_string()).to_string() == s.to_string());
}

TEST_CASE("invalid sampling ranges are rejected", "[sampling]") {
    SamplingConfig c;
    c.diag_lo = 1.0, c.diag_hi = -1.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("sample targets follow from e0 and the RDM", "[sampling]") {
    Eigen::MatrixXd h(2, 2);
    h << 0.3, -0.4, -0.4, -0.6;
    const auto sp = dimer_space();
    const auto s  = make_sample(h, sp, Backend::ed);
    const auto gs = solve_orbital(sp, h);
    CHECK(s.e0 == Approx(gs.energy).margin(1e-12));
    CHECK(s.f_dnn == Approx(gs.energy - h.diagonal().dot(s.densities)).margin(1e-12));
    CHECK(s.f_rdm == Approx(gs.energy - (h.array() * gs.gamma.array()).sum()).margin(1e-12));
    REQUIRE(s.offdiag.size() == 1);
    CHECK(s.offdiag(0) == -0.4);
    CHECK(s.densities.sum() == Approx(2.0).margin(1e-12));
}

TEST_CASE("generation is independent of the worker count", "[dataset]") {
    SamplingConfig c;
    c.sample_count = 40;
    c.seed         = 17;
    c.workers      = 1;
    const auto a = generate(c, dimer_space());
    c.workers    = 3;
    const auto b = generate(c, dimer_space());
    REQUIRE(a.samples.size() == b.samples.size());
    for(std::size_t i = 0; i < a.samples.size(); ++i) {
        CHECK(a.samples[i].h == b.samples[i].h);
        CHECK(a.samples[i].f_dnn == b.samples[i].f_dnn);
    }
}

TEST_CASE("dataset file round-trip", "[dataset]") {
    SamplingConfig c;
    c.sample_count = 12;
    c.seed         = 4;
    const auto a    = generate(c, dimer_space(2.0));
    const auto path = temp_file("ftdmet_test_dataset.txt");
    write_dataset(a, path);
    const auto b = read_dataset(path);
    std::filesystem::remove(path);
    REQUIRE(b.samples.size() == a.samples.size());
    CHECK(b.metadata.space.interaction == a.metadata.space.interaction);
    CHECK(b.metadata.sampling.seed == 4u);
    for(std::size_t i = 0; i < a.samples.size(); ++i) {
        CHECK((b.samples[i].densities - a.samples[i].densities).norm() == 0.0);
        CHECK(b.samples[i].f_dnn == a.samples[i].f_dnn);
        CHECK(b.samples[i].e0 == a.samples[i].e0);
    }
}

TEST_CASE("missing dataset file is an I/O error", "[dataset]") {
    CHECK_THROWS(read_dataset(temp_file("ftdmet_no_such_dataset.txt")));
}

TEST_CASE("statistics and sector text round-trip", "[dataset]") {
    for(const auto& s : {Statistics::fermion(), Statistics::boson(3)})
        CHECK(format_statistics(parse_statistics(format_statistics(s))) == format_statistics(s));
    for(const auto& s : {Sector::spins(2, 1), Sector::total(4)})
        CHECK(format_sector(parse_sector(format_sector(s))) == format_sector(s));
}

TEST_CASE("concatenation records every sector", "[dataset]") {
    SamplingConfig c;
    c.sample_count = 5;
    auto sp1       = dimer_space();
    auto sp2       = sp1;
    sp2.sector     = Sector::spins(1, 0);
    const auto d   = concatenate({generate(c, sp1), generate(c, sp2)});
    CHECK(d.samples.size() == 10);
    CHECK(d.metadata.sectors.size() == 2);
}
