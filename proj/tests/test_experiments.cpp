// SPDX-License-Identifier: Apache-2.0
//
// comp-linksim: link-level simulation of cooperative multicell MIMO-OFDM
// Copyright (C) 2026 The comp-linksim authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <catch2/catch_amalgamated.hpp>

#include "comp/config.hpp"
#include "comp/csv.hpp"
#include "comp/experiments.hpp"
#include "comp/parallel.hpp"
#include "comp/scenario.hpp"

#include <cmath>
#include <sstream>

using namespace comp;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{
    SimulationConfig parse(const std::string &text)
    {
        std::istringstream in(text);
        return parse_config(in, "test.cfg");
    }

    std::string error_of(const std::string &text)
    {
        try
        {
            parse(text);
        }
        catch (const ConfigError &e)
        {
            return e.what();
        }
        return {};
    }
}

TEST_CASE("Config - defaults and overrides")
{
    const SimulationConfig d = parse("");
    CHECK(d.bs_count == 2);
    CHECK(d.antennas_per_bs == 4);
    CHECK_THAT(linear_to_db(d.p_d() / d.p_u), WithinAbs(5.0, 1e-12));
    CHECK_THAT(d.edge_snr_ul_db(), WithinAbs(5.0, 1e-12));

    const SimulationConfig c = parse("# comment\n trials = 50 \nsnr_grid_db = 5, 10\nestimators = mmse,ls\n"
                                     "training_modes = NO\npdp = uniform  # trailing comment\n");
    CHECK(c.trials == 50);
    CHECK(c.snr_grid_db == std::vector<double>{5.0, 10.0});
    CHECK(c.estimators == std::vector<EstimatorKind>{EstimatorKind::mmse, EstimatorKind::ls});
    CHECK(c.training_modes == std::vector<TrainingMode>{TrainingMode::nonorthogonal});
    CHECK(c.pdp == PdpKind::uniform);
}

TEST_CASE("Config - diagnostics name the line and field")
{
    CHECK_THAT(error_of("trials = 5\nbogus = 1\n"), ContainsSubstring("test.cfg:2") && ContainsSubstring("bogus"));
    CHECK_THAT(error_of("trials 5\n"), ContainsSubstring("test.cfg:1") && ContainsSubstring("key = value"));
    CHECK_THAT(error_of("\n\ntaps = x\n"), ContainsSubstring("test.cfg:3") && ContainsSubstring("'taps'"));
    CHECK_THAT(error_of("seed = 1\nseed = 2\n"), ContainsSubstring("duplicate"));
    CHECK_THAT(error_of("taps =\n"), ContainsSubstring("missing value"));
    CHECK_THAT(error_of("taps = 500\n"), ContainsSubstring("'taps'"));
    CHECK_THAT(error_of("zc_roots = 1\n"), ContainsSubstring("zc_roots"));
    CHECK_THAT(error_of("estimators = zf\n"), ContainsSubstring("estimators"));
    try
    {
        parse("a\n\nbogus = 1\n");
    }
    catch (const ConfigError &e)
    {
        CHECK(e.line() == 1);
    }
    CHECK_THROWS_AS(load_config("/nonexistent/path.cfg"), ConfigFileMissing);
}

TEST_CASE("Config - canonical echo round-trips and drives the hash")
{
    SimulationConfig c;
    c.trials = 77;
    c.snr_grid_db = {5.0, 6.25};
    const SimulationConfig back = parse(c.canonical());
    CHECK(back.canonical() == c.canonical());
    CHECK(back.hash() == c.hash());
    SimulationConfig w = c;
    w.workers = 8;
    CHECK(w.hash() == c.hash());
    w.seed = 2;
    CHECK(w.hash() != c.hash());
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("Symmetric geometry - edge placement and mirror symmetry")
{
    const SimulationConfig cfg;
    const Geometry g = symmetric_geometry(cfg, 5.0);
    REQUIRE(g.ms_count() == 4);
    const double r = cfg.cell_radius_m, isd = std::sqrt(3.0) * r;
    for (std::size_t m = 0; m < 4; ++m)
    {
        CHECK_THAT(g.link_distance(m, 0), WithinRel(r, 1e-12));
        CHECK_THAT(g.link_distance(m, 1), WithinRel(r, 1e-12));
    }
    const Geometry h = symmetric_geometry(cfg, 11.0);
    const auto &p = h.ms_positions;
    // within-cell mirror about the BS-BS axis, cross-cell mirror about the boundary
    CHECK(p[0].x == p[1].x);
    CHECK(p[0].y == -p[1].y);
    CHECK(p[2].x == isd - p[0].x);
    CHECK(p[3].x == isd - p[1].x);
    CHECK(p[2].y == p[0].y);
    CHECK(p[0].y == cfg.lateral_offset_m);
    CHECK(h.serving_cell(0) == 0);
    CHECK(h.serving_cell(3) == 1);
    CHECK_THAT(snr_at_distance(h.link_distance(0, 0), h) + cfg.edge_snr_ul_db() - cfg.edge_snr_dl_db,
               WithinAbs(11.0, 1e-9));

    const arma::mat gains = large_scale_gains(cfg, h);
    for (std::size_t m = 1; m < 4; ++m)
    {
        CHECK_THAT(gains(m, h.serving_cell(m)), WithinRel(gains(0, 0), 1e-12));
        CHECK_THAT(gains(m, 1 - h.serving_cell(m)), WithinRel(gains(0, 1), 1e-12));
    }
}

TEST_CASE("Symmetric geometry - monotone in SNR and bounded")
{
    const SimulationConfig cfg;
    double prev_d1 = 1e300, prev_cross = 1e300;
    for (double snr = 5.0; snr <= max_local_snr_ul_db(cfg); snr += 1.0)
    {
        const Geometry g = symmetric_geometry(cfg, snr);
        const double d1 = g.link_distance(0, 0);
        const double cross = large_scale_gains(cfg, g)(0, 1);
        CHECK(d1 < prev_d1);
        CHECK(cross < prev_cross);
        prev_d1 = d1;
        prev_cross = cross;
    }
    CHECK_THAT(max_local_snr_ul_db(cfg), WithinAbs(5.0 + 37.6 * std::log10(2.0), 1e-9));
    CHECK_THROWS_AS(symmetric_geometry(cfg, 4.0), InfeasibleGeometry);
    CHECK_THROWS_AS(symmetric_geometry(cfg, 20.0), InfeasibleGeometry);
    SimulationConfig one = cfg;
    one.ms_per_cell = 1;
    CHECK(symmetric_geometry(one, 8.0).ms_count() == 2);
}

TEST_CASE("Random drops stay inside their hexagon")
{
    SimulationConfig cfg;
    cfg.ms_per_cell = 3;
    RngStream rng(12);
    for (int d = 0; d < 50; ++d)
    {
        const Geometry g = random_drop_geometry(cfg, rng);
        REQUIRE(g.ms_count() == 6);
        for (std::size_t m = 0; m < 6; ++m)
        {
            const std::size_t c = g.serving_cell(m);
            CHECK(inside_hexagon(g.ms_positions[m], g.bs_positions[c], cfg.cell_radius_m));
            CHECK(g.link_distance(m, c) >= cfg.min_distance_m);
        }
    }
    CHECK(inside_hexagon({216.0, 0.0}, {0.0, 0.0}, 250.0));
    CHECK_FALSE(inside_hexagon({217.0, 0.0}, {0.0, 0.0}, 250.0));
    CHECK(inside_hexagon({0.0, 249.0}, {0.0, 0.0}, 250.0));
}

TEST_CASE("Scenario - training plan")
{
    const SimulationConfig cfg;
    const Scenario o = Scenario::build(cfg, symmetric_geometry(cfg, 8.0), TrainingMode::orthogonal);
    CHECK(o.sequences.size() == 4);
    for (std::size_t b = 0; b < 2; ++b)
        CHECK(o.cross_correlation(b) < 1e-9);
    CHECK(o.sequences[3].shift == 96);

    const Scenario n = Scenario::build(cfg, symmetric_geometry(cfg, 8.0), TrainingMode::nonorthogonal);
    CHECK(n.sequences[0].root == 1);
    CHECK(n.sequences[2].root == 7);
    CHECK(n.sequences[1].shift == 64);
    CHECK(n.cross_correlation(0) > 0.01);
    CHECK_THAT(linear_to_db(n.p_d / n.p_u), WithinAbs(5.0, 1e-12));

    SimulationConfig crowded = cfg;
    crowded.ms_per_cell = 4;
    RngStream rng(3);
    CHECK_THROWS_AS(Scenario::build(crowded, random_drop_geometry(crowded, rng), TrainingMode::orthogonal),
                    InvalidParameter);
}

TEST_CASE("parallel_map - order and determinism")
{
    const auto a = parallel_map(100, 1, [](std::size_t i) { return static_cast<double>(i * i); });
    const auto b = parallel_map(100, 4, [](std::size_t i) { return static_cast<double>(i * i); });
    CHECK(a == b);
    CHECK(a[7] == 49.0);
    CHECK_THROWS_AS(parallel_map(10, 3,
                                 [](std::size_t i) {
                                     if (i == 5)
                                         throw NumericError("x");
                                     return 0;
                                 }),
                    NumericError);
}

TEST_CASE("SampleStat and quantiles")
{
    SampleStat s;
    for (double x : {1.0, 2.0, 3.0, 4.0})
        s.add(x);
    CHECK(s.mean() == 2.5);
    CHECK_THAT(s.stderr_of_mean(), WithinRel(std::sqrt(5.0 / 3.0 / 4.0), 1e-12));
    std::vector<double> xs(101);
    for (std::size_t i = 0; i < xs.size(); ++i)
        xs[i] = static_cast<double>(100 - i);
    const auto [q, se] = quantile_with_se(xs, 0.05);
    CHECK_THAT(q, WithinAbs(5.0, 1e-12));
    CHECK(se > 0.0);
    CHECK_THROWS_AS(quantile_with_se({}, 0.5), InvalidParameter);
}

TEST_CASE("Non-cooperative precoder is block diagonal with unit columns")
{
    const SimulationConfig cfg;
    const LinkSimulator sim(Scenario::build(cfg, symmetric_geometry(cfg, 7.0), TrainingMode::orthogonal));
    const auto d = sim.draw(1, 0);
    const Precoder P = sim.noncomp_precoder(d, 0);
    for (std::size_t m = 0; m < 4; ++m)
    {
        const std::size_t own = sim.scenario().serving[m];
        CHECK_THAT(P.block_power(own, m), WithinAbs(1.0, 1e-12));
        CHECK(P.block_power(1 - own, m) == 0.0);
    }
}

TEST_CASE("Block-diagonal channels make per-cell ZF equal joint ZF")
{
    RngStream rng(8);
    GlobalChannelMatrix G{arma::cx_mat(4, 8, arma::fill::zeros), 2, 4};
    for (std::size_t m = 0; m < 4; ++m)
        for (std::size_t a = 0; a < 4; ++a)
            G.rows(m, (m / 2) * 4 + a) = rng.complex_normal(1.0);
    const Precoder joint = zfbf(G);
    for (std::size_t b = 0; b < 2; ++b)
    {
        const GlobalChannelMatrix Gb{G.rows.submat(2 * b, 4 * b, 2 * b + 1, 4 * b + 3), 1, 4};
        const Precoder local = zfbf(Gb);
        CHECK(arma::abs(joint.columns.submat(4 * b, 2 * b, 4 * b + 3, 2 * b + 1) - local.columns).max() < 1e-10);
    }
}

TEST_CASE("Simulator - draws are keyed by trial, not by call order")
{
    const SimulationConfig cfg;
    const LinkSimulator sim(Scenario::build(cfg, symmetric_geometry(cfg, 9.0), TrainingMode::nonorthogonal));
    const auto a = sim.draw(3, 5);
    sim.draw(3, 6);
    const auto b = sim.draw(3, 5);
    CHECK(arma::abs(a.received[1] - b.received[1]).max() == 0.0);
    const auto G = sim.channel_at(a.taps, 17);
    const Scenario &s = sim.scenario();
    const cplx direct = cfr_at_subcarrier(a.taps[1].col(2).rows(2 * s.L, 3 * s.L - 1), s.delays[2][1], 17, s.K);
    CHECK(std::abs(G.rows(2, 4 + 2) - std::conj(direct)) < 1e-12);
}

TEST_CASE("MSE sweep - rows carry metadata; LS failure is recorded")
{
    SimulationConfig cfg;
    cfg.trials = 30;
    cfg.snr_grid_db = {5.0, 10.0};
    const ResultTable t = run_mse_sweep(cfg);
    CHECK(t.scenario_hash == cfg.hash());
    for (const auto &r : t.rows)
    {
        CHECK(r.trials > 0);
        CHECK_FALSE(std::isnan(r.stderr_value));
    }
    const auto mc = t.find(10.0, "mmse", "orthogonal", "local", "mse");
    const auto ex = t.find(10.0, "mmse", "orthogonal", "local", "mse_exact");
    REQUIRE(mc);
    REQUIRE(ex);
    CHECK(std::abs(mc->value - ex->value) < 5.0 * mc->stderr_value);
    CHECK(t.find(10.0, "ls", "orthogonal", "cross", "nmse_orth"));

    // one MS per cell on the same root, both on the shared vertex: identical training
    SimulationConfig dup;
    dup.ms_per_cell = 1;
    dup.trials = 10;
    dup.zc_roots = {1, 1};
    dup.snr_grid_db = {5.0};
    dup.training_modes = {TrainingMode::nonorthogonal};
    const ResultTable f = run_mse_sweep(dup);
    const auto failed = f.find(5.0, "ls", "nonorthogonal", "all", "estimator_failed");
    REQUIRE(failed);
    CHECK(failed->value == 1.0);
    CHECK(f.find(5.0, "mmse", "nonorthogonal", "local", "mse"));
    // lambda^2 = 1 for identical training; the eigenvalue form is rejected, not repaired
    CHECK(f.find(5.0, "mmse", "nonorthogonal", "all", "eig_invalid_spectrum"));
}

TEST_CASE("Rate sweep - orderings at the cell edge")
{
    SimulationConfig cfg;
    cfg.trials = 60;
    cfg.snr_grid_db = {5.0};
    const ResultTable t = run_rate_sweep(cfg);
    const double ideal = t.find(5.0, "ideal", "orthogonal", "mean", "rate")->value;
    const double mmse = t.find(5.0, "mmse", "orthogonal", "mean", "rate")->value;
    const double noncomp = t.find(5.0, "noncomp", "orthogonal", "mean", "rate")->value;
    CHECK(ideal > mmse);
    CHECK(mmse > noncomp);
    const double lb = t.find(5.0, "mmse", "orthogonal", "mean", "lower_bound")->value;
    CHECK(lb < mmse);
}

TEST_CASE("Random drops - small run")
{
    SimulationConfig cfg;
    cfg.drops = 6;
    cfg.drop_trials = 3;
    cfg.training_modes = {TrainingMode::orthogonal};
    const ResultTable t = run_random_drops(cfg);
    const auto used = t.find(std::nan(""), "all", "orthogonal", "all", "drops_used");
    REQUIRE(used);
    CHECK(used->value == 6.0);
    const auto p05 = t.find(std::nan(""), "mmse", "orthogonal", "all", "throughput_p05");
    const auto mean = t.find(std::nan(""), "mmse", "orthogonal", "all", "throughput_mean");
    REQUIRE(p05);
    REQUIRE(mean);
    CHECK(p05->value <= mean->value);
    CHECK(p05->trials == 24);
}

TEST_CASE("CSV writer")
{
    ResultTable t;
    t.command = "x";
    t.seed = 4;
    t.scenario_hash = "abc";
    t.rows.push_back(ResultRow{5.0, "mmse", "orthogonal", "local", "mse", 0.25, 0.01, 10});
    t.rows.push_back(ResultRow{std::nan(""), "all", "all", "a,b", "passed", 1.0, std::nan(""), 1});
    std::ostringstream os;
    write_csv(os, t);
    const std::string s = os.str();
    CHECK_THAT(s, ContainsSubstring("snr_db,estimator,training_mode,link_class,metric,value,stderr,trials,seed,"
                                    "scenario_hash\n"));
    CHECK_THAT(s, ContainsSubstring("5,mmse,orthogonal,local,mse,0.25,0.01,10,4,abc\n"));
    CHECK_THAT(s, ContainsSubstring(",all,all,\"a,b\",passed,1,,1,4,abc\n"));
    CHECK_THAT(manifest_json(t, "x.csv"), ContainsSubstring("\"scenario_hash\": \"abc\""));
}
