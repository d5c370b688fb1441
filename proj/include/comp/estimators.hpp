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

#ifndef COMP_ESTIMATORS_HPP
#define COMP_ESTIMATORS_HPP

#include "comp/channel_model.hpp"
#include "comp/common.hpp"
#include "comp/training.hpp"

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace comp
{
    enum class EstimatorKind
    {
        mmse,
        robust,
        ls
    };

    std::string_view to_string(EstimatorKind kind);
    EstimatorKind parse_estimator(std::string_view name);

    // Block-diagonal ML x ML prior of the stacked composite CIR at one BS antenna.
    // Block m is alpha^2_{m,b} R_{m,b,a}.
    struct PriorCovariance
    {
        arma::cx_mat matrix;
        std::size_t L = 0;
        std::size_t M = 0;

        // True prior for uncorrelated taps: block m = gains[m] * diag(pdp).
        static PriorCovariance from_pdp(std::span<const double> gains, const PowerDelayProfile &pdp);

        // Robust prior D: block m = gains[m] * (1/L) I_L.
        static PriorCovariance robust(std::span<const double> gains, std::size_t L);

        static PriorCovariance from_blocks(std::span<const arma::cx_mat> blocks);

        arma::cx_mat block(std::size_t m) const;

        // alpha^2 of each block, recovered as the block trace (small-scale traces are 1).
        std::vector<double> gains() const;

        // Hermitian, positive definite, block diagonal. Tolerance 1e-10 relative.
        void validate() const;
    };

    struct EstimateResult
    {
        arma::cx_vec g_hat;  // stacked ML-vector, MS m occupies rows m*L .. (m+1)*L-1
        EstimatorKind kind = EstimatorKind::ls;
        std::size_t L = 0;
        std::size_t M = 0;

        arma::cx_vec link(std::size_t m) const;
    };

    // Linear joint estimator g_hat = W r with W precomputed once per training matrix.
    // Every BS antenna shares X and the prior, so one instance serves all of them.
    class JointEstimator
    {
    public:
        static JointEstimator mmse(const arma::cx_mat &X, const PriorCovariance &prior,
                                   double noise_var, double p_u);
        static JointEstimator robust(const arma::cx_mat &X, std::span<const double> gains, std::size_t L,
                                     double noise_var, double p_u);
        static JointEstimator ls(const arma::cx_mat &X, std::size_t L, double p_u);

        EstimatorKind kind() const { return kind_; }
        std::size_t taps() const { return L_; }
        std::size_t ms_count() const { return M_; }
        const arma::cx_mat &weights() const { return W_; }

        EstimateResult apply(const arma::cx_vec &r) const;

        // One column per receive antenna in, one stacked estimate per column out.
        arma::cx_mat apply(const arma::cx_mat &R) const { return W_ * R; }

    private:
        JointEstimator(EstimatorKind kind, arma::cx_mat W, std::size_t L, std::size_t M)
            : kind_(kind), W_(std::move(W)), L_(L), M_(M) {}

        static JointEstimator regularized(EstimatorKind kind, const arma::cx_mat &X,
                                          const PriorCovariance &prior, double noise_var, double p_u);

        EstimatorKind kind_;
        arma::cx_mat W_;  // ML x K
        std::size_t L_;
        std::size_t M_;
    };

    // g_hat = (1/sqrt(p_u)) (X^H X + (noise/p_u) R^-1)^-1 X^H r.
    EstimateResult estimate_mmse(const arma::cx_vec &r, const arma::cx_mat &X, const PriorCovariance &prior,
                                 double noise_var, double p_u);

    // As MMSE with the robust prior D built from the large-scale gains alone.
    EstimateResult estimate_robust(const arma::cx_vec &r, const arma::cx_mat &X, std::span<const double> gains,
                                   std::size_t L, double noise_var, double p_u);

    // g_hat = (1/sqrt(p_u)) (X^H X)^-1 X^H r. Throws IllConditionedTraining when cond(B) > 1e12.
    EstimateResult estimate_ls(const arma::cx_vec &r, const arma::cx_mat &X, std::size_t L, double p_u);

    struct ErrorCovariance
    {
        arma::cx_mat matrix;
        std::size_t L = 0;
        EstimatorKind kind = EstimatorKind::ls;

        std::size_t ms_count() const { return L == 0 ? 0 : matrix.n_rows / L; }
        arma::cx_mat block(std::size_t i, std::size_t j) const;
    };

    // Exact error covariance of each estimator.
    //   mmse:   (R^-1 + (p_u/noise) B)^-1
    //   robust: Delta + mmse, Delta built from D = robust prior of the same gains as R
    //   ls:     (noise/p_u) B^-1
    ErrorCovariance error_covariance(EstimatorKind kind, const GramBlocks &gram, const PriorCovariance &prior,
                                     double noise_var, double p_u);

    // Robust-vs-MMSE excess term Delta on its own.
    arma::cx_mat robust_excess_covariance(const GramBlocks &gram, const PriorCovariance &prior,
                                          double noise_var, double p_u);

    // Trace of the m-th L x L diagonal block.
    double link_mse(const ErrorCovariance &cov, std::size_t m);

    // Per-link CFR F_{m,b} g_hat_m, F_{m,b} = Phi_{m,b} F. delays_s holds tau_{m,b} for each MS.
    std::vector<CompositeCfr> estimate_to_cfr(const EstimateResult &est, std::span<const double> delays_s,
                                              double sample_period_s, std::size_t K);

    // Single row of Phi F applied to taps: the response at subcarrier k.
    cplx cfr_at_subcarrier(const arma::cx_vec &taps, long delay, std::size_t k, std::size_t K);
}

#endif
