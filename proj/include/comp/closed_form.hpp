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

#ifndef COMP_CLOSED_FORM_HPP
#define COMP_CLOSED_FORM_HPP

#include "comp/channel_model.hpp"
#include "comp/estimators.hpp"

#include <cstddef>
#include <span>
#include <vector>

// Analytic MSE/NMSE expressions for the two-MS case. These are oracles: they never
// clamp inputs, and any spectrum outside [0, 1) is rejected rather than repaired.
namespace comp::closed_form
{
    struct LinkBudget
    {
        std::vector<double> gains;  // alpha^2_{m,b} of each MS at the BS under analysis
        double p_u = 1.0;
        double p_d = 1.0;
        double noise_ul = 1.0;      // sigma_n^2
        double noise_dl = 1.0;      // sigma_z^2
        std::size_t K = 128;
        std::size_t L = 20;

        void validate() const;
        std::size_t ms_count() const { return gains.size(); }
    };

    // eta_m = 1 / (1 + noise/(alpha^2_m p_u) * L/K)
    double eta(const LinkBudget &budget, std::size_t m);

    // beta = prod_j eta_j; requires two MSs.
    double beta(const LinkBudget &budget);

    double f_mmse(double lambda2, double beta);
    double f_ls(double lambda2);

    // eta_m (noise/p_u)(1/K) sum_l f_mmse(lambda_l).
    double mse_mmse_eig(const LinkBudget &budget, std::size_t m, std::span<const double> lambda2);

    // (noise/p_u)(1/K) sum_l 1/(1 - lambda_l^2), identical for both MSs.
    double mse_ls_eig(const LinkBudget &budget, std::span<const double> lambda2);

    // MSE / alpha^2_m. Robust maps to the MMSE expression (identical under uniform PDP).
    double nmse(EstimatorKind kind, const LinkBudget &budget, std::size_t m, std::span<const double> lambda2);

    // Orthogonal training (B = K I): valid for any number of MSs.
    double mse_orthogonal(EstimatorKind kind, const LinkBudget &budget, std::size_t m);
    double nmse_orthogonal(EstimatorKind kind, const LinkBudget &budget, std::size_t m);

    // Robust-minus-MMSE MSE under orthogonal training:
    // alpha^2 (sum_l s_l^2 / (s_l + mu) - 1/(1 + mu L)), mu = noise / (alpha^2 p_u K).
    double robust_mmse_gap(const LinkBudget &budget, std::size_t m, const PowerDelayProfile &pdp);

    // Block-inverse form of the MMSE error covariance for two MSs and uniform PDP.
    // Q is Q_{2,1} = X_2^H X_1.
    ErrorCovariance appendix_cov_mmse(const LinkBudget &budget, const arma::cx_mat &Q, std::size_t K,
                                      std::size_t L);

    // Block-inverse form of the LS error covariance for two MSs.
    ErrorCovariance appendix_cov_ls(const arma::cx_mat &Q, double noise_ul, double p_u, std::size_t K,
                                    std::size_t L);

    // Spectrum for reporting only: clamps each lambda^2 into [0, 1 - 1e-15].
    std::vector<double> clamp_for_report(std::span<const double> lambda2);
}

#endif
