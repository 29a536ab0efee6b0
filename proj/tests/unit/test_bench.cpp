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

#include "ftdmet/bench/experiment.hpp"
#include "ftdmet/common/error.hpp"
#include "ftdmet/exact/ground_state.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <sstream>

using namespace ftdmet;
using Catch::Approx;

TEST_CASE("figure ids map to experiments", "[config]") {
    CHECK(experiment_for_figure("fig2") == "parity");
    CHECK(experiment_for_figure("fig3") == "bose-scan");
    CHECK(experiment_for_figure("fig4") == "noisy-parity");
    CHECK(experiment_for_figure("fig5") == "fermi-scan");
    CHECK(experiment_for_figure("fig6") == "occupancy");
    CHECK(experiment_for_figure("fig7") == "quarter");
    CHECK(experiment_for_figure("fig8") == "three-quarter");
    CHECK(experiment_for_figure("fig9") == "two-band");
    CHECK_THROWS_AS(experiment_for_figure("fig1"), ConfigError);
}

TEST_CASE("every default config validates", "[config]") {
    for(const char* id :
        {"parity", "noisy-parity", "bose-scan", "fermi-scan", "occupancy", "quarter", "three-quarter", "two-band"})
        CHECK_NOTHROW(default_config(id).validate());
    CHECK(default_config("bose-scan").functional_kind() == FunctionalKind::bose_dimer);
    CHECK(default_config("two-band").functional_kind() == FunctionalKind::two_band);
    CHECK(default_config("noisy-parity").backend == Backend::vqe_noisy);
}

TEST_CASE("config file overrides defaults", "[config]") {
    std::istringstream in(R"([experiment]
id = quarter
seed = 7
workers = 2
[model]
u = 2.5
[scan]
lengths = 4, 8
hoppings = -1, -0.5
[sampling]
samples = 300
[training]
hidden = 32, 32
epochs = 10
members = 2
)");
    const auto c = parse_config(in);
    CHECK(c.id == "quarter");
    CHECK(c.seed == 7u);
    CHECK(c.workers == 2);
    CHECK(c.model.u == 2.5);
    CHECK(c.lengths == std::vector<int>{4, 8});
    CHECK(c.hoppings == std::vector<double>{-1.0, -0.5});
    CHECK(c.sampling.sample_count == 300u);
    CHECK(c.training.hidden == std::vector<int>{32, 32});
    CHECK(c.training.epochs == 10);
    CHECK(c.members == 2);
}

TEST_CASE("inline comments are ignored", "[config]") {
    std::istringstream in("[experiment]\nid = two-band   ; fig9\n; whole-line comment\nseed = 5 # five\n");
    const auto c = parse_config(in);
    CHECK(c.id == "two-band");
    CHECK(c.seed == 5u);
}

TEST_CASE("unknown keys and sections are config errors", "[config]") {
    std::istringstream bad_key("[experiment]\nid = parity\ncolour = red\n");
    CHECK_THROWS_AS(parse_config(bad_key), ConfigError);
    std::istringstream bad_section("[nope]\nx = 1\n");
    CHECK_THROWS_AS(parse_config(bad_section), ConfigError);
    std::istringstream bad_value("[experiment]\nseed = abc\n");
    CHECK_THROWS_AS(parse_config(bad_value), ConfigError);
}

TEST_CASE("missing functional file fails validation at the load stage", "[config]") {
    auto c       = default_config("fermi-scan");
    c.functional = "/nonexistent/ftdmet_models.txt";
    try {
        c.validate();
        FAIL("expected a StageError");
    } catch(const StageError& e) {
        CHECK(e.stage() == "load");
    }
}

TEST_CASE("CSV round-trip keeps full precision and NaN", "[csv]") {
    ResultTable t;
    t.metadata = {{"experiment", "demo"}, {"seed", "1"}};
    t.columns  = {"a", "b"};
    t.add_row({0.1, 1.0 / 3.0});
    t.add_row({-2.5e-17, std::nan("")});
    const auto path = std::filesystem::temp_directory_path() / "ftdmet_test_table.csv";
    write_csv(t, path);
    const auto r = read_csv(path);
    std::filesystem::remove(path);
    CHECK(r.columns == t.columns);
    CHECK(r.meta("experiment") == "demo");
    REQUIRE(r.rows.size() == 2);
    CHECK(r.rows[0][1] == 1.0 / 3.0);
    CHECK(r.rows[1][0] == -2.5e-17);
    CHECK(std::isnan(r.rows[1][1]));
    CHECK(r.column("a") == std::vector<double>{0.1, -2.5e-17});
    CHECK_THROWS_AS(r.column("c"), ConfigError);
}

TEST_CASE("rows must match the header", "[csv]") {
    ResultTable t;
    t.columns = {"a", "b"};
    CHECK_THROWS(t.add_row({1.0}));
}

TEST_CASE("small fermi scan produces one row per point with exact references", "[experiment]") {
    auto c                  = default_config("fermi-scan");
    c.lengths               = {4};
    c.hoppings              = {-0.5};
    c.sampling.sample_count = 200;
    c.training.hidden       = {16, 16};
    c.training.epochs       = 20;
    c.members               = 2;
    const auto t = run_experiment(c);
    REQUIRE(t.rows.size() == 1);
    CHECK(t.columns.front() == "length");
    FermiHubbardParams p;
    p.sites = 4, p.n_up = 2, p.n_down = 2, p.u = {1.0}, p.t = -0.5;
    CHECK(t.column("e_ref")[0] == Approx(energy_of(fermi_hubbard(p)).energy / 4).margin(1e-10));
    CHECK(t.meta("experiment") == "fermi-scan");
}

TEST_CASE("parity experiment reports holdout statistics", "[experiment]") {
    auto c                  = default_config("parity");
    c.sampling.sample_count = 200;
    c.training.hidden       = {16};
    c.training.epochs       = 10;
    c.members               = 1;
    const auto t = run_experiment(c);
    CHECK(t.rows.size() == 20);
    CHECK(std::stod(t.meta("mae")) > 0.0);
}
