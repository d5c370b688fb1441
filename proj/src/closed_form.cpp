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

#include "comp/closed_form.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace comp::closed_form
{
    namespace
    {
        void require_two(const LinkBudget &budget)
        {
            if (budget.ms_count() != 2)
                throw InvalidParameter("eigenvalue-form oracles are defined for exactly two MSs, got " +
                                       std::to_string(budget.ms_count()));
        }

        void check_spectrum(std::span<const double> lambda2)
        {
            for (double x : lambda2)
            {
                if (!std::isfinite(x))
                    throw InvalidSpectrum("non-finite cross-correlation eigenvalue");
                if (x >= 1.0)
                    throw InvalidSpectrum("cross-correlation eigenvalue lambda^2 = " + std::to_string(x) +
                                          " >= 1; training is rank deficient");
                if (x < -1e-12)
                    throw InvalidSpectrum("negative cross-correlation eigenvalue");
            }
        }

        double ratio(const LinkBudget &b) { return static_cast<double>(b.L) / static_cast<double>(b.K); }
    }

    void LinkBudget::validate() const
    {
        if (gains.empty())
            throw InvalidParameter("link budget needs at least one gain");
        for (double g : gains)
            if (!(g > 0.0))
                throw InvalidParameter("large-scale gains must be positive");
        if (!(p_u > 0.0) || !(p_d > 0.0) || !(noise_ul > 0.0) || !(noise_dl > 0.0))
            throw InvalidParameter("powers and noise variances must be positive");
        if (L < 1 || K < L)
            throw InvalidParameter("need K >= L >= 1");
    }

    double eta(const LinkBudget &budget, std::size_t m)
    {
        budget.validate();
        if (m >= budget.ms_count())
            throw InvalidParameter("MS index out of range");
        return 1.0 / (1.0 + budget.noise_ul / (budget.gains[m] * budget.p_u) * ratio(budget));
    }

    double beta(const LinkBudget &budget)
    {
        require_two(budget);
        return eta(budget, 0) * eta(budget, 1);
    }

    double f_mmse(double lambda2, double beta_value) { return 1.0 / (1.0 - beta_value * lambda2); }

    double f_ls(double lambda2) { return 1.0 / (1.0 - lambda2); }

    double mse_mmse_eig(const LinkBudget &budget, std::size_t m, std::span<const double> lambda2)
    {
        require_two(budget);
        check_spectrum(lambda2);
        if (lambda2.size() != budget.L)
            throw InvalidParameter("spectrum must have L eigenvalues");
        const double b = beta(budget);
        double sum = 0.0;
        for (double x : lambda2)
            sum += f_mmse(x, b);
        return eta(budget, m) * budget.noise_ul / budget.p_u / static_cast<double>(budget.K) * sum;
    }

    double mse_ls_eig(const LinkBudget &budget, std::span<const double> lambda2)
    {
        require_two(budget);
        budget.validate();
        check_spectrum(lambda2);
        if (lambda2.size() != budget.L)
            throw InvalidParameter("spectrum must have L eigenvalues");
        double sum = 0.0;
        for (double x : lambda2)
            sum += f_ls(x);
        return budget.noise_ul / budget.p_u / static_cast<double>(budget.K) * sum;
    }

    double nmse(EstimatorKind kind, const LinkBudget &budget, std::size_t m, std::span<const double> lambda2)
    {
        budget.validate();
        if (m >= budget.ms_count())
            throw InvalidParameter("MS index out of range");
        const double mse = kind == EstimatorKind::ls ? mse_ls_eig(budget, lambda2)
                                                     : mse_mmse_eig(budget, m, lambda2);
        return mse / budget.gains[m];
    }

    double mse_orthogonal(EstimatorKind kind, const LinkBudget &budget, std::size_t m)
    {
        budget.validate();
        if (m >= budget.ms_count())
            throw InvalidParameter("MS index out of range");
        const double ls = budget.noise_ul / budget.p_u * ratio(budget);
        return kind == EstimatorKind::ls ? ls : eta(budget, m) * ls;
    }

    double nmse_orthogonal(EstimatorKind kind, const LinkBudget &budget, std::size_t m)
    {
        return mse_orthogonal(kind, budget, m) / budget.gains.at(m);
    }

    double robust_mmse_gap(const LinkBudget &budget, std::size_t m, const PowerDelayProfile &pdp)
    {
        budget.validate();
        pdp.validate();
        if (m >= budget.ms_count())
            throw InvalidParameter("MS index out of range");
        const double a2 = budget.gains[m];
        const double mu = budget.noise_ul / (a2 * budget.p_u * static_cast<double>(budget.K));
        double sum = 0.0;
        for (double s : pdp.variances)
            if (s > 0.0)
                sum += s * s / (s + mu);
        return a2 * (sum - 1.0 / (1.0 + mu * static_cast<double>(pdp.taps())));
    }

    ErrorCovariance appendix_cov_mmse(const LinkBudget &budget, const arma::cx_mat &Q, std::size_t K,
                                      std::size_t L)
    {
        require_two(budget);
        if (Q.n_rows != L || Q.n_cols != L)
            throw InvalidParameter("Q block must be L x L");
        const double eta1 = eta(budget, 0);
        const double eta2 = eta(budget, 1);
        const double k = static_cast<double>(K);
        const arma::cx_mat I = arma::eye<arma::cx_mat>(L, L);
        const arma::cx_mat Qk = Q / k;
        const arma::cx_mat N = arma::inv(I / eta1 - eta2 * Qk.t() * Qk);

        arma::cx_mat C(2 * L, 2 * L);
        C.submat(0, 0, L - 1, L - 1) = N;
        C.submat(0, L, L - 1, 2 * L - 1) = -eta2 * N * Qk.t();
        C.submat(L, 0, 2 * L - 1, L - 1) = -eta2 * Qk * N;
        C.submat(L, L, 2 * L - 1, 2 * L - 1) = eta2 * eta2 * Qk * N * Qk.t() + eta2 * I;
        C *= budget.noise_ul / (budget.p_u * k);
        return ErrorCovariance{std::move(C), L, EstimatorKind::mmse};
    }

    ErrorCovariance appendix_cov_ls(const arma::cx_mat &Q, double noise_ul, double p_u, std::size_t K,
                                    std::size_t L)
    {
        if (Q.n_rows != L || Q.n_cols != L)
            throw InvalidParameter("Q block must be L x L");
        if (!(p_u > 0.0) || !(noise_ul > 0.0))
            throw InvalidParameter("powers and noise variances must be positive");
        const std::vector<double> spectrum = comp::cross_eigs(Q, K);
        check_spectrum(spectrum);

        const double k = static_cast<double>(K);
        const arma::cx_mat I = arma::eye<arma::cx_mat>(L, L);
        const arma::cx_mat Qk = Q / k;
        const arma::cx_mat Mi = arma::inv(I - Qk.t() * Qk);

        arma::cx_mat C(2 * L, 2 * L);
        C.submat(0, 0, L - 1, L - 1) = Mi;
        C.submat(0, L, L - 1, 2 * L - 1) = -Mi * Qk.t();
        C.submat(L, 0, 2 * L - 1, L - 1) = -Qk * Mi;
        C.submat(L, L, 2 * L - 1, 2 * L - 1) = Qk * Mi * Qk.t() + I;
        C *= noise_ul / (p_u * k);
        return ErrorCovariance{std::move(C), L, EstimatorKind::ls};
    }

    std::vector<double> clamp_for_report(std::span<const double> lambda2)
    {
        std::vector<double> out(lambda2.begin(), lambda2.end());
        for (double &x : out)
            x = std::clamp(x, 0.0, 1.0 - 1e-15);
        return out;
    }
}
