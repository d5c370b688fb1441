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

#include "comp/channel_model.hpp"

#include <cmath>
#include <numeric>

using namespace comp;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("build_pdp - uniform profile")
{
    const auto p = build_pdp(PdpKind::uniform, 20);
    REQUIRE(p.taps() == 20);
    for (double v : p.variances)
        CHECK_THAT(v, WithinRel(0.05, 1e-15));
}

TEST_CASE("build_pdp - exponential profile against a geometric series")
{
    for (double decay : {1.0, 1.4, 2.5})
    {
        const std::size_t L = 20;
        const auto p = build_pdp(PdpKind::exponential, L, decay);
        double norm = 0.0;
        for (std::size_t l = 0; l < L; ++l)
            norm += std::pow(decay, -static_cast<double>(l));
        for (std::size_t l = 0; l < L; ++l)
            CHECK_THAT(p.variances[l], WithinRel(std::pow(decay, -static_cast<double>(l)) / norm, 1e-12));
        CHECK_THAT(std::accumulate(p.variances.begin(), p.variances.end(), 0.0), WithinAbs(1.0, 1e-12));
    }
}

TEST_CASE("build_pdp - invalid arguments")
{
    CHECK_THROWS_AS(build_pdp(PdpKind::uniform, 0), InvalidParameter);
    CHECK_THROWS_AS(build_pdp(PdpKind::exponential, 10, 0.9), InvalidParameter);
    PowerDelayProfile bad{{0.5, 0.6}};
    CHECK_THROWS_AS(bad.validate(), InvalidParameter);
}

TEST_CASE("Path loss - SNR at distance and large-scale gain")
{
    Geometry g;
    g.cell_radius = 250.0;
    g.pathloss_exponent = 3.76;
    g.edge_snr_db = 10.0;
    CHECK_THAT(snr_at_distance(250.0, g), WithinAbs(10.0, 1e-12));
    CHECK_THAT(snr_at_distance(125.0, g), WithinAbs(10.0 + 37.6 * std::log10(2.0), 1e-12));
    CHECK_THROWS_AS(snr_at_distance(0.0, g), InvalidParameter);

    g.bs_positions = {{0.0, 0.0}};
    g.ms_positions = {{100.0, 0.0}};
    const double p_d = 3.0, noise = 0.5;
    const double a2 = large_scale_gain(0, 0, g, noise, p_d);
    CHECK_THAT(10.0 * std::log10(a2 * p_d / noise), WithinAbs(snr_at_distance(100.0, g), 1e-10));
}

TEST_CASE("Geometry - serving cell and validation")
{
    Geometry g;
    g.bs_positions = {{0.0, 0.0}, {400.0, 0.0}};
    g.ms_positions = {{100.0, 0.0}, {300.0, 10.0}, {200.0, 0.0}};
    CHECK(g.serving_cell(0) == 0);
    CHECK(g.serving_cell(1) == 1);
    CHECK(g.serving_cell(2) == 0);
    g.assigned_cells = {0, 1, 1};
    CHECK(g.serving_cell(2) == 1);
    g.validate();
    g.ms_positions[0] = {0.0, 0.0};
    CHECK_THROWS_AS(g.validate(), InvalidParameter);
}

TEST_CASE("Delay quantization")
{
    CHECK(delay_samples(0.0, 0.2e-6) == 0);
    CHECK(delay_samples(250.0 / 299792458.0, 0.2e-6) == 4);
    CHECK(delay_samples(0.5e-6, 0.2e-6) == 3);
    CHECK_THROWS_AS(delay_samples(1e-6, 0.0), InvalidParameter);
}

TEST_CASE("fourier_columns - entries and orthogonality")
{
    const std::size_t K = 128, L = 20;
    const arma::cx_mat F = fourier_columns(K, L);
    REQUIRE(F.n_rows == K);
    REQUIRE(F.n_cols == L);
    for (std::size_t k : {0u, 1u, 77u, 127u})
        for (std::size_t l : {0u, 3u, 19u})
        {
            const cplx ref = std::polar(1.0, -2.0 * pi * static_cast<double>(k * l) / static_cast<double>(K));
            CHECK(std::abs(F(k, l) - ref) < 1e-12);
        }
    const arma::cx_mat G = F.t() * F;
    CHECK(arma::abs(G - static_cast<double>(K) * arma::eye<arma::cx_mat>(L, L)).max() < 1e-10);
}

TEST_CASE("delay_phase - unit modulus ramp")
{
    const arma::cx_vec p = delay_phase(64, 5.0);
    CHECK(arma::abs(arma::abs(p) - 1.0).max() < 1e-14);
    CHECK(std::abs(p(3) - std::polar(1.0, -2.0 * pi * 15.0 / 64.0)) < 1e-14);
}

TEST_CASE("draw_small_scale_cir - per-tap second moments")
{
    const auto pdp = build_pdp(PdpKind::exponential, 8, 1.4);
    RngStream rng(17);
    const std::size_t n = 40000;
    arma::vec power(8, arma::fill::zeros), power_sq(8, arma::fill::zeros);
    cplx mean_first = 0.0;
    for (std::size_t i = 0; i < n; ++i)
    {
        const arma::cx_vec h = draw_small_scale_cir(pdp, rng);
        const arma::vec p = arma::square(arma::abs(h));
        power += p;
        power_sq += arma::square(p);
        mean_first += h(0);
    }
    power /= static_cast<double>(n);
    const arma::vec se = arma::sqrt((power_sq / static_cast<double>(n) - arma::square(power)) / static_cast<double>(n));
    for (std::size_t l = 0; l < 8; ++l)
        CHECK(std::abs(power(l) - pdp.variances[l]) < 5.0 * se(l));
    CHECK(std::abs(mean_first / static_cast<double>(n)) < 5.0 * std::sqrt(pdp.variances[0] / n));
}

TEST_CASE("cir_to_cfr - direct DFT sum with delay phase")
{
    RngStream rng(5);
    const std::size_t K = 32;
    const arma::cx_vec small = rng.complex_normal(6, 1.0);
    const double T_s = 0.2e-6;
    const CompositeCir cir = CompositeCir::compose(small, 0.7, 3.0 * T_s);
    const CompositeCfr cfr = cir_to_cfr(cir, K, T_s);
    REQUIRE(cfr.values.n_elem == K);
    for (std::size_t k = 0; k < K; ++k)
    {
        cplx ref = 0.0;
        for (std::size_t l = 0; l < 6; ++l)
            ref += 0.7 * small(l) * std::polar(1.0, -2.0 * pi * static_cast<double>(l * k) / K);
        ref *= std::polar(1.0, -2.0 * pi * 3.0 * static_cast<double>(k) / K);
        CHECK(std::abs(cfr.values(k) - ref) < 1e-12);
    }
}
