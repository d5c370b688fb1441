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

#include "comp/precoding.hpp"

#include <cmath>
#include <string>

namespace comp
{
    void GlobalChannelMatrix::validate() const
    {
        if (bs_count == 0 || antennas == 0)
            throw InvalidParameter("global channel needs at least one BS and antenna");
        if (rows.n_cols != bs_count * antennas)
            throw InvalidParameter("global channel width must equal B * N_t");
        if (rows.n_rows == 0)
            throw InvalidParameter("global channel has no MS rows");
    }

    arma::cx_vec Precoder::block(std::size_t b, std::size_t m) const
    {
        if (b >= bs_count || m >= ms_count())
            throw InvalidParameter("precoder block index out of range");
        return columns.col(m).subvec(b * antennas, (b + 1) * antennas - 1);
    }

    double Precoder::block_power(std::size_t b, std::size_t m) const
    {
        const double n = arma::norm(block(b, m));
        return n * n;
    }

    arma::cx_mat zfbf_unnormalized(const GlobalChannelMatrix &G_hat)
    {
        G_hat.validate();
        const arma::cx_mat &G = G_hat.rows;
        if (G.n_rows > G.n_cols)
            throw SingularChannel("more MSs than transmit antennas; ZF is not defined");
        arma::cx_mat gram = G * G.t();
        gram = 0.5 * (gram + gram.t());
        const double c = arma::cond(gram);
        if (!std::isfinite(c) || c > max_condition_number)
            throw SingularChannel("estimated global channel is rank deficient (cond = " + std::to_string(c) + ")");
        arma::cx_mat X;
        if (!arma::solve(X, gram, arma::eye<arma::cx_mat>(G.n_rows, G.n_rows),
                         arma::solve_opts::likely_sympd + arma::solve_opts::no_approx))
            throw SingularChannel("ZF Gram matrix is singular");
        return G.t() * X;
    }

    Precoder zfbf(const GlobalChannelMatrix &G_hat)
    {
        arma::cx_mat V = zfbf_unnormalized(G_hat);
        for (arma::uword m = 0; m < V.n_cols; ++m)
        {
            const double n = arma::norm(V.col(m));
            if (!(n > 0.0) || !std::isfinite(n))
                throw SingularChannel("ZF column has zero or non-finite norm");
            V.col(m) /= n;
        }
        return Precoder{std::move(V), G_hat.bs_count, G_hat.antennas};
    }

    std::vector<double> achieved_rate(const GlobalChannelMatrix &G_true, const Precoder &precoder,
                                      double p_d, double noise_dl)
    {
        G_true.validate();
        if (precoder.columns.n_rows != G_true.rows.n_cols || precoder.ms_count() != G_true.ms_count())
            throw InvalidParameter("precoder and channel dimensions disagree");
        if (!(noise_dl > 0.0) || !(p_d >= 0.0))
            throw InvalidParameter("downlink noise must be positive and power nonnegative");

        const arma::cx_mat H = G_true.rows * precoder.columns;  // (m, j) = g_m^H v_j
        const std::size_t M = G_true.ms_count();
        std::vector<double> rate(M);
        for (std::size_t m = 0; m < M; ++m)
        {
            double interference = 0.0;
            for (std::size_t j = 0; j < M; ++j)
                if (j != m)
                    interference += std::norm(H(m, j));
            const double sinr = p_d * std::norm(H(m, m)) / (noise_dl + p_d * interference);
            rate[m] = std::log2(1.0 + sinr);
        }
        return rate;
    }

    std::vector<double> ideal_rate(const GlobalChannelMatrix &G_true, double p_d, double noise_dl)
    {
        return achieved_rate(G_true, zfbf(G_true), p_d, noise_dl);
    }

    std::vector<double> interference_power(const arma::cx_mat &errors, const Precoder &precoder)
    {
        if (errors.n_cols != precoder.columns.n_rows || errors.n_rows != precoder.ms_count())
            throw InvalidParameter("error matrix and precoder dimensions disagree");
        const arma::cx_mat H = errors * precoder.columns;
        const std::size_t M = errors.n_rows;
        std::vector<double> out(M, 0.0);
        for (std::size_t m = 0; m < M; ++m)
            for (std::size_t j = 0; j < M; ++j)
                if (j != m)
                    out[m] += std::norm(H(m, j));
        return out;
    }

    double rate_loss_bound_from_interference(double mean_interference, double p_d, double noise_dl)
    {
        if (!(noise_dl > 0.0))
            throw InvalidParameter("downlink noise must be positive");
        return std::log2(1.0 + p_d / noise_dl * mean_interference);
    }

    std::vector<double> rate_loss_bound_empirical(std::span<const ErrorRealization> realizations,
                                                  double p_d, double noise_dl)
    {
        if (realizations.empty())
            throw InvalidParameter("need at least one error realization");
        std::vector<double> mean(realizations.front().errors.n_rows, 0.0);
        for (const auto &r : realizations)
        {
            const auto I = interference_power(r.errors, r.precoder);
            if (I.size() != mean.size())
                throw InvalidParameter("realizations disagree in MS count");
            for (std::size_t m = 0; m < I.size(); ++m)
                mean[m] += I[m];
        }
        std::vector<double> out(mean.size());
        for (std::size_t m = 0; m < mean.size(); ++m)
            out[m] = rate_loss_bound_from_interference(mean[m] / static_cast<double>(realizations.size()), p_d,
                                                       noise_dl);
        return out;
    }

    ClosedRateLossBound rate_loss_bound_closed(const arma::mat &error_var, const arma::mat &gains,
                                               const Precoder &precoder, double p_d, double noise_dl)
    {
        const std::size_t M = precoder.ms_count();
        const std::size_t B = precoder.bs_count;
        if (error_var.n_rows != M || error_var.n_cols != B || gains.n_rows != M || gains.n_cols != B)
            throw InvalidParameter("error variances and gains must be M x B");
        if (arma::any(arma::vectorise(error_var) < 0.0) || arma::any(arma::vectorise(gains) < 0.0))
            throw InvalidParameter("error variances and gains must be nonnegative");
        if (!(noise_dl > 0.0))
            throw InvalidParameter("downlink noise must be positive");

        ClosedRateLossBound out;
        out.bound.resize(M);
        out.expected_interference.assign(M, 0.0);
        out.contributions.assign(M, arma::mat(M, B, arma::fill::zeros));
        for (std::size_t m = 0; m < M; ++m)
        {
            double weighted = 0.0;
            for (std::size_t j = 0; j < M; ++j)
            {
                if (j == m)
                    continue;
                for (std::size_t b = 0; b < B; ++b)
                {
                    const double pw = precoder.block_power(b, j);
                    out.expected_interference[m] += error_var(m, b) * pw;
                    // SNR^d_{m,b} * NMSE_{m,b} = (alpha^2 p_d / noise) * (sigma^2_e / alpha^2)
                    out.contributions[m](j, b) = p_d / noise_dl * error_var(m, b) * pw;
                    weighted += out.contributions[m](j, b);
                }
            }
            out.bound[m] = std::log2(1.0 + weighted);
        }
        return out;
    }

    double rate_loss_bound_orth_mmse(std::size_t M, double p_d, double p_u, double noise_dl, double noise_ul,
                                     std::size_t L, std::size_t K)
    {
        if (M == 0 || K == 0)
            throw InvalidParameter("need at least one MS and one subcarrier");
        if (!(p_u > 0.0) || !(noise_dl > 0.0))
            throw InvalidParameter("uplink power and downlink noise must be positive");
        const double x = static_cast<double>(M - 1) * (p_d / noise_dl) * (noise_ul / p_u) *
                         (static_cast<double>(L) / static_cast<double>(K));
        return std::log2(1.0 + x);
    }

    RateLowerBound rate_lower_bound(double ideal_rate_value, double bound_value)
    {
        if (ideal_rate_value < 0.0 || bound_value < 0.0)
            throw InvalidParameter("rate and bound must be nonnegative");
        const double raw = ideal_rate_value - bound_value;
        return RateLowerBound{std::max(raw, 0.0), raw};
    }
}
