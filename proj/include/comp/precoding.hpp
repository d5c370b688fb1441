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

#ifndef COMP_PRECODING_HPP
#define COMP_PRECODING_HPP

#include "comp/common.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace comp
{
    // Row m holds g_m^H, the conjugate-transposed global channel of MS m at one
    // subcarrier. Columns are BS-major: BS b occupies columns b*N_t .. (b+1)*N_t-1.
    struct GlobalChannelMatrix
    {
        arma::cx_mat rows;
        std::size_t bs_count = 1;
        std::size_t antennas = 1;

        std::size_t ms_count() const { return rows.n_rows; }
        void validate() const;
    };

    // Column m is the unit-norm beamformer v_m; v_{b,m} is its BS-b sub-block.
    struct Precoder
    {
        arma::cx_mat columns;
        std::size_t bs_count = 1;
        std::size_t antennas = 1;

        std::size_t ms_count() const { return columns.n_cols; }
        arma::cx_vec block(std::size_t b, std::size_t m) const;
        double block_power(std::size_t b, std::size_t m) const;
    };

    // V = G^H (G G^H)^-1, columns normalized. Throws SingularChannel when G is
    // rank deficient (cond(G G^H) > 1e12) or M > B N_t.
    Precoder zfbf(const GlobalChannelMatrix &G_hat);

    // Unnormalized V, exposed for the G V = I check.
    arma::cx_mat zfbf_unnormalized(const GlobalChannelMatrix &G_hat);

    // log2(1 + SINR_m) with SINR_m = p_d|g_m^H v_m|^2 / (noise + p_d sum_{j!=m}|g_m^H v_j|^2).
    std::vector<double> achieved_rate(const GlobalChannelMatrix &G_true, const Precoder &precoder,
                                      double p_d, double noise_dl);

    // ZF built from the true channel, so the interference term vanishes.
    std::vector<double> ideal_rate(const GlobalChannelMatrix &G_true, double p_d, double noise_dl);

    // I_m = sum_{j!=m} |g~_m^H v_j|^2 for every m. errors has the layout of GlobalChannelMatrix.
    std::vector<double> interference_power(const arma::cx_mat &errors, const Precoder &precoder);

    struct ErrorRealization
    {
        arma::cx_mat errors;  // M x B N_t, row m is g~_m^H
        Precoder precoder;
    };

    // log2(1 + p_d/noise * mean I_m) per MS, mean over the supplied realizations.
    std::vector<double> rate_loss_bound_empirical(std::span<const ErrorRealization> realizations,
                                                  double p_d, double noise_dl);

    // Same bound from an already-accumulated mean interference power.
    double rate_loss_bound_from_interference(double mean_interference, double p_d, double noise_dl);

    struct ClosedRateLossBound
    {
        std::vector<double> bound;                  // per MS
        std::vector<double> expected_interference;  // sum_j sum_b sigma^2_e ||v_{b,j}||^2
        // contributions[m](j, b) = SNR^d_{m,b} NMSE_{m,b} ||v_{b,j}||^2, zero on j == m
        std::vector<arma::mat> contributions;
    };

    // error_var(m, b) = sigma^2_{e_{m,b}}, gains(m, b) = alpha^2_{m,b}.
    ClosedRateLossBound rate_loss_bound_closed(const arma::mat &error_var, const arma::mat &gains,
                                               const Precoder &precoder, double p_d, double noise_dl);

    // log2(1 + (M-1) (p_d/noise_dl)(noise_ul/p_u)(L/K)); gain-independent.
    double rate_loss_bound_orth_mmse(std::size_t M, double p_d, double p_u, double noise_dl, double noise_ul,
                                     std::size_t L, std::size_t K);

    struct RateLowerBound
    {
        double value = 0.0;  // max(raw, 0)
        double raw = 0.0;    // ideal - bound
    };

    RateLowerBound rate_lower_bound(double ideal_rate_value, double bound_value);

    struct RateReport
    {
        std::vector<double> achieved;
        std::vector<double> ideal;
        std::vector<double> empirical_loss;
        std::vector<double> bound_empirical;  // Theorem 1 with Monte-Carlo E{I_m}
        std::vector<double> bound_closed;     // per-link SNR-weighted NMSE form
        double bound_orthogonal_mmse = 0.0;
        std::vector<double> lower_bound;
    };
}

#endif
