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

#include "comp/estimators.hpp"

#include <cmath>

using namespace comp;

namespace
{
    struct Setup
    {
        arma::cx_mat X;
        PriorCovariance prior;
        std::vector<double> gains;
        std::size_t L = 8;
        double noise = 0.7;
        double p_u = 1.5;
    };

    // Two MSs on distinct roots: non-orthogonal training.
    Setup make_setup(PdpKind kind)
    {
        Setup s;
        std::vector<EquivalentTrainingMatrix> X{equivalent_training_matrix(zadoff_chu(1, 61, 64), 2L, s.L),
                                                equivalent_training_matrix(zadoff_chu(7, 61, 64), 3L, s.L)};
        s.X = stack_training(X);
        s.gains = {2.0, 0.3};
        s.prior = PriorCovariance::from_pdp(s.gains, build_pdp(kind, s.L, 1.4));
        return s;
    }

    double max_abs(const arma::cx_mat &A) { return arma::abs(A).max(); }
}

TEST_CASE("parse_estimator")
{
    CHECK(parse_estimator("mmse") == EstimatorKind::mmse);
    CHECK(parse_estimator("robust") == EstimatorKind::robust);
    CHECK(parse_estimator("ls") == EstimatorKind::ls);
    CHECK(to_string(EstimatorKind::robust) == "robust");
    CHECK_THROWS_AS(parse_estimator("zf"), InvalidParameter);
}

TEST_CASE("PriorCovariance - structure and validation")
{
    const Setup s = make_setup(PdpKind::exponential);
    s.prior.validate();
    const auto g = s.prior.gains();
    CHECK(std::abs(g[0] - 2.0) < 1e-12);
    CHECK(std::abs(g[1] - 0.3) < 1e-12);
    CHECK(max_abs(s.prior.matrix.submat(0, 8, 7, 15)) == 0.0);

    PriorCovariance bad = s.prior;
    bad.matrix(0, 9) = cplx(0.1, 0.0);
    CHECK_THROWS_AS(bad.validate(), InvalidParameter);
    PriorCovariance neg = s.prior;
    neg.matrix(0, 0) = -1.0;
    CHECK_THROWS_AS(neg.validate(), InvalidParameter);

    const PriorCovariance D = PriorCovariance::robust(s.gains, s.L);
    CHECK(std::abs(D.matrix(0, 0) - 2.0 / 8.0) < 1e-15);
}

TEST_CASE("MMSE estimator - Wiener form")
{
    const Setup s = make_setup(PdpKind::exponential);
    RngStream rng(3);
    const arma::cx_vec r = rng.complex_normal(64, 1.0);
    const EstimateResult est = estimate_mmse(r, s.X, s.prior, s.noise, s.p_u);
    // R X^H (X R X^H + (noise/p_u) I)^-1 r / sqrt(p_u)
    const arma::cx_mat &R = s.prior.matrix;
    const arma::cx_mat S = s.X * R * s.X.t() + (s.noise / s.p_u) * arma::eye<arma::cx_mat>(64, 64);
    const arma::cx_vec ref = R * s.X.t() * arma::solve(S, r) / std::sqrt(s.p_u);
    CHECK(arma::abs(est.g_hat - ref).max() < 1e-10 * arma::abs(ref).max());
    CHECK(est.M == 2);
    CHECK(arma::abs(est.link(1) - ref.subvec(8, 15)).max() < 1e-10);

    const JointEstimator W = JointEstimator::mmse(s.X, s.prior, s.noise, s.p_u);
    CHECK(arma::abs(W.apply(r).g_hat - est.g_hat).max() < 1e-12);
}

TEST_CASE("Robust estimator equals MMSE under uniform PDP")
{
    const Setup s = make_setup(PdpKind::uniform);
    RngStream rng(4);
    const arma::cx_vec r = rng.complex_normal(64, 1.0);
    const auto a = estimate_mmse(r, s.X, s.prior, s.noise, s.p_u);
    const auto b = estimate_robust(r, s.X, s.gains, s.L, s.noise, s.p_u);
    CHECK(arma::abs(a.g_hat - b.g_hat).max() < 1e-12);
}

TEST_CASE("LS estimator - exact recovery and conditioning")
{
    const Setup s = make_setup(PdpKind::uniform);
    RngStream rng(5);
    const arma::cx_vec g = rng.complex_normal(16, 1.0);
    const arma::cx_vec r = std::sqrt(s.p_u) * s.X * g;
    CHECK(arma::abs(estimate_ls(r, s.X, s.L, s.p_u).g_hat - g).max() < 1e-10);

    const auto same = equivalent_training_matrix(zadoff_chu(1, 61, 64), 2L, s.L);
    const std::vector<EquivalentTrainingMatrix> dup{same, same};
    CHECK_THROWS_AS(JointEstimator::ls(stack_training(dup), s.L, s.p_u), IllConditionedTraining);
}

TEST_CASE("error_covariance - MMSE and LS against direct forms")
{
    const Setup s = make_setup(PdpKind::exponential);
    const GramBlocks gram = gram_blocks(s.X, s.L);
    const arma::cx_mat &R = s.prior.matrix;
    const double c = s.noise / s.p_u;
    const arma::cx_mat S = s.X * R * s.X.t() + c * arma::eye<arma::cx_mat>(64, 64);
    const arma::cx_mat mmse_ref = R - R * s.X.t() * arma::solve(S, s.X * R);
    const auto mmse = error_covariance(EstimatorKind::mmse, gram, s.prior, s.noise, s.p_u);
    CHECK(max_abs(mmse.matrix - mmse_ref) < 1e-10);
    CHECK(std::abs(link_mse(mmse, 1) - std::real(arma::trace(mmse_ref.submat(8, 8, 15, 15)))) < 1e-10);

    const auto ls = error_covariance(EstimatorKind::ls, gram, s.prior, s.noise, s.p_u);
    CHECK(max_abs(ls.matrix - c * arma::inv(s.X.t() * s.X)) < 1e-10);
}

TEST_CASE("error_covariance - robust against the estimator's error decomposition")
{
    const Setup s = make_setup(PdpKind::exponential);
    const GramBlocks gram = gram_blocks(s.X, s.L);
    const double c = s.noise / s.p_u;
    const PriorCovariance D = PriorCovariance::robust(s.gains, s.L);
    // e = (A B - I) g + A X^H n / sqrt(p_u), A = (B + c D^-1)^-1
    const arma::cx_mat B = s.X.t() * s.X;
    const arma::cx_mat A = arma::inv(B + c * arma::inv(D.matrix));
    const arma::cx_mat T = A * B - arma::eye<arma::cx_mat>(16, 16);
    const arma::cx_mat ref = T * s.prior.matrix * T.t() + c * A * B * A.t();
    const auto robust = error_covariance(EstimatorKind::robust, gram, s.prior, s.noise, s.p_u);
    CHECK(max_abs(robust.matrix - ref) < 1e-10);

    const auto mmse = error_covariance(EstimatorKind::mmse, gram, s.prior, s.noise, s.p_u);
    const arma::cx_mat delta = robust_excess_covariance(gram, s.prior, s.noise, s.p_u);
    CHECK(max_abs(mmse.matrix + delta - ref) < 1e-10);
    CHECK(std::real(arma::trace(delta)) > 0.0);
}

TEST_CASE("error_covariance - Monte-Carlo check of the LS estimator")
{
    const Setup s = make_setup(PdpKind::uniform);
    const JointEstimator W = JointEstimator::ls(s.X, s.L, s.p_u);
    RngStream rng(6);
    const arma::cx_mat Rchol = arma::sqrt(s.prior.matrix);
    const std::size_t n = 4000;
    arma::cx_mat acc(16, 16, arma::fill::zeros);
    for (std::size_t i = 0; i < n; ++i)
    {
        const arma::cx_vec g = Rchol * rng.complex_normal(16, 1.0);
        const arma::cx_vec r = std::sqrt(s.p_u) * s.X * g + rng.complex_normal(64, s.noise);
        const arma::cx_vec e = W.apply(r).g_hat - g;
        acc += e * e.t();
    }
    const auto ls = error_covariance(EstimatorKind::ls, gram_blocks(s.X, s.L), s.prior, s.noise, s.p_u);
    const double tr = std::real(arma::trace(acc)) / n;
    const double ref = std::real(arma::trace(ls.matrix));
    CHECK(std::abs(tr - ref) / ref < 0.03);
}

TEST_CASE("CFR of an estimate")
{
    RngStream rng(7);
    EstimateResult est;
    est.L = 4;
    est.M = 2;
    est.g_hat = rng.complex_normal(8, 1.0);
    const double T_s = 0.2e-6;
    const std::vector<double> delays{2.0 * T_s, 5.0 * T_s};
    const auto cfr = estimate_to_cfr(est, delays, T_s, 16);
    REQUIRE(cfr.size() == 2);
    for (std::size_t m = 0; m < 2; ++m)
        for (std::size_t k = 0; k < 16; k += 5)
        {
            const long d = m == 0 ? 2 : 5;
            CHECK(std::abs(cfr[m].values(k) - cfr_at_subcarrier(est.link(m), d, k, 16)) < 1e-12);
        }
}
