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

#include "comp/training.hpp"

#include <cmath>

using namespace comp;
using Catch::Matchers::WithinAbs;

TEST_CASE("zadoff_chu - closed-form entries")
{
    const auto t = zadoff_chu(7, 127, 128);
    REQUIRE(t.length() == 128);
    CHECK(arma::abs(arma::abs(t.values) - 1.0).max() < 1e-12);
    for (std::size_t k : {0u, 1u, 50u, 126u, 127u})
    {
        const long double n = static_cast<long double>(k % 127);
        const long double phase = -std::acos(-1.0L) * 7.0L * n * (n + 1.0L) / 127.0L;
        const cplx ref(static_cast<double>(std::cos(phase)), static_cast<double>(std::sin(phase)));
        CHECK(std::abs(t.values(k) - ref) < 1e-9);
    }
}

TEST_CASE("zadoff_chu - CAZAC correlation properties")
{
    const int N = 127;
    const auto a = zadoff_chu(1, N, N);
    const auto b = zadoff_chu(7, N, N);
    for (int lag = 1; lag < N; lag += 9)
    {
        cplx auto_c = 0.0, cross_c = 0.0;
        for (int k = 0; k < N; ++k)
        {
            auto_c += a.values(k) * std::conj(a.values((k + lag) % N));
            cross_c += a.values(k) * std::conj(b.values((k + lag) % N));
        }
        CHECK(std::abs(auto_c) < 1e-9);
        CHECK_THAT(std::abs(cross_c), WithinAbs(std::sqrt(static_cast<double>(N)), 1e-9));
    }
}

TEST_CASE("zadoff_chu - invalid parameters")
{
    CHECK_THROWS_AS(zadoff_chu(0, 127, 128), InvalidParameter);
    CHECK_THROWS_AS(zadoff_chu(127, 127, 128), InvalidParameter);
    CHECK_THROWS_AS(zadoff_chu(1, 127, 100), InvalidParameter);
}

TEST_CASE("cyclic_shift - phase ramp and composition")
{
    const auto t = zadoff_chu(1, 127, 128);
    const auto s = cyclic_shift(t, 5);
    for (std::size_t k = 0; k < 128; k += 13)
        CHECK(std::abs(s.values(k) - t.values(k) * std::polar(1.0, -2.0 * pi * 5.0 * k / 128.0)) < 1e-12);
    const auto s2 = cyclic_shift(cyclic_shift(t, 40), 30);
    CHECK(arma::abs(s2.values - cyclic_shift(t, 70).values).max() < 1e-12);
    CHECK(s2.shift == 70);
    CHECK(arma::abs(cyclic_shift(t, 128).values - t.values).max() < 1e-12);
}

TEST_CASE("max_orthogonal_family")
{
    CHECK(max_orthogonal_family(128, 20, 4) == 5);
    CHECK(max_orthogonal_family(128, 32, 0) == 4);
    CHECK_THROWS_AS(max_orthogonal_family(128, 0, 0), InvalidParameter);
}

TEST_CASE("equivalent_training_matrix - diag(t) Phi F")
{
    const auto t = zadoff_chu(3, 127, 128);
    const auto X = equivalent_training_matrix(t, 4L, 20);
    const arma::cx_mat F = fourier_columns(128, 20);
    for (std::size_t k : {0u, 9u, 100u})
        for (std::size_t l : {0u, 19u})
        {
            const cplx ref = t.values(k) * std::polar(1.0, -2.0 * pi * 4.0 * k / 128.0) * F(k, l);
            CHECK(std::abs(X.matrix(k, l) - ref) < 1e-12);
        }
    const auto Xs = equivalent_training_matrix(t, 4.1 * 0.2e-6, 0.2e-6, 20, 128);
    CHECK(arma::abs(Xs.matrix - X.matrix).max() < 1e-12);
    CHECK_THROWS_AS(equivalent_training_matrix(t, 0.0, 0.2e-6, 20, 64), InvalidParameter);
}

TEST_CASE("gram_blocks - shift-orthogonal sequences")
{
    const auto base = zadoff_chu(1, 127, 128);
    std::vector<EquivalentTrainingMatrix> X;
    const long delays[] = {4, 6, 5, 4};
    for (long m = 0; m < 4; ++m)
        X.push_back(equivalent_training_matrix(cyclic_shift(base, 32 * m), delays[m], 20));
    const GramBlocks g = gram_blocks(X);
    REQUIRE(g.M == 4);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j)
        {
            const arma::cx_mat blk = g.block(i, j);
            if (i == j)
                CHECK(arma::abs(blk - 128.0 * arma::eye<arma::cx_mat>(20, 20)).max() < 1e-9);
            else
                CHECK(arma::abs(blk).max() < 1e-9);
        }
    const arma::cx_mat stacked = stack_training(X);
    CHECK(arma::abs(gram_blocks(stacked, 20).B - g.B).max() < 1e-9);
    CHECK(arma::abs(g.Q(1, 0) - X[1].matrix.t() * X[0].matrix).max() < 1e-9);
}

TEST_CASE("cross_eigs - distinct roots and identical training")
{
    const auto X1 = equivalent_training_matrix(zadoff_chu(1, 127, 128), 4L, 20);
    const auto X2 = equivalent_training_matrix(zadoff_chu(7, 127, 128), 5L, 20);
    const auto lam = cross_eigs(X2.matrix.t() * X1.matrix, 128);
    REQUIRE(lam.size() == 20);
    for (std::size_t i = 0; i < lam.size(); ++i)
    {
        CHECK(lam[i] >= 0.0);
        CHECK(lam[i] < 1.0);
        if (i > 0)
            CHECK(lam[i] <= lam[i - 1]);
    }
    const auto same = cross_eigs(X1.matrix.t() * X1.matrix, 128);
    for (double x : same)
        CHECK_THAT(x, WithinAbs(1.0, 1e-10));
    CHECK_THROWS_AS(cross_eigs(arma::cx_mat(3, 4, arma::fill::zeros), 128), InvalidParameter);
}

TEST_CASE("received_training - signal plus noise statistics")
{
    const auto X = equivalent_training_matrix(zadoff_chu(1, 127, 128), 0L, 8);
    RngStream rng(11);
    const arma::cx_vec g = rng.complex_normal(8, 0.3);
    const double p_u = 2.0, noise = 0.5;
    double acc = 0.0;
    const int n = 400;
    for (int i = 0; i < n; ++i)
    {
        const arma::cx_vec r = received_training(X.matrix, g, p_u, noise, rng);
        acc += arma::accu(arma::square(arma::abs(r - std::sqrt(p_u) * X.matrix * g))) / 128.0;
    }
    CHECK(std::abs(acc / n - noise) < 5.0 * noise / std::sqrt(128.0 * n));
    const arma::cx_vec clean = received_training(X.matrix, g, p_u, 0.0, rng);
    CHECK(arma::abs(clean - std::sqrt(p_u) * X.matrix * g).max() < 1e-12);
}
