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

#include "comp/estimators.hpp"

#include <cmath>

namespace comp
{
    std::string_view to_string(EstimatorKind kind)
    {
        switch (kind)
        {
        case EstimatorKind::mmse:
            return "mmse";
        case EstimatorKind::robust:
            return "robust";
        case EstimatorKind::ls:
            return "ls";
        }
        return "unknown";
    }

    EstimatorKind parse_estimator(std::string_view name)
    {
        if (name == "mmse")
            return EstimatorKind::mmse;
        if (name == "robust")
            return EstimatorKind::robust;
        if (name == "ls")
            return EstimatorKind::ls;
        throw InvalidParameter("unknown estimator '" + std::string(name) + "'");
    }

    namespace
    {
        arma::cx_mat hermitian_part(const arma::cx_mat &A) { return 0.5 * (A + A.t()); }

        arma::cx_mat inverse_hpd(const arma::cx_mat &A, const char *what)
        {
            arma::cx_mat out;
            if (!arma::inv_sympd(out, hermitian_part(A)))
                throw NumericError(std::string(what) + " is not positive definite");
            return hermitian_part(out);
        }

        void check_conditioning(const arma::cx_mat &B)
        {
            const double c = arma::cond(B);
            if (!std::isfinite(c) || c > max_condition_number)
                throw IllConditionedTraining("training Gram matrix is ill-conditioned (cond = " +
                                             std::to_string(c) + "); sequences are near-parallel");
        }

        // Block-diagonal inverse of a block-diagonal HPD matrix.
        arma::cx_mat prior_inverse(const PriorCovariance &prior)
        {
            arma::cx_mat out(prior.matrix.n_rows, prior.matrix.n_cols, arma::fill::zeros);
            for (std::size_t m = 0; m < prior.M; ++m)
                out.submat(m * prior.L, m * prior.L, (m + 1) * prior.L - 1, (m + 1) * prior.L - 1) =
                    inverse_hpd(prior.block(m), "prior covariance block");
            return out;
        }
    }

    PriorCovariance PriorCovariance::from_pdp(std::span<const double> gains, const PowerDelayProfile &pdp)
    {
        pdp.validate();
        std::vector<arma::cx_mat> blocks;
        arma::vec v(pdp.variances);
        for (double g : gains)
            blocks.emplace_back(arma::diagmat(arma::cx_vec(g * v, arma::vec(v.n_elem, arma::fill::zeros))));
        return from_blocks(blocks);
    }

    PriorCovariance PriorCovariance::robust(std::span<const double> gains, std::size_t L)
    {
        if (L == 0)
            throw InvalidParameter("tap count must be at least 1");
        std::vector<arma::cx_mat> blocks;
        for (double g : gains)
            blocks.emplace_back(g / static_cast<double>(L) * arma::eye<arma::cx_mat>(L, L));
        return from_blocks(blocks);
    }

    PriorCovariance PriorCovariance::from_blocks(std::span<const arma::cx_mat> blocks)
    {
        if (blocks.empty())
            throw InvalidParameter("prior needs at least one block");
        const arma::uword L = blocks.front().n_rows;
        PriorCovariance p;
        p.L = L;
        p.M = blocks.size();
        p.matrix.zeros(L * p.M, L * p.M);
        for (std::size_t m = 0; m < blocks.size(); ++m)
        {
            if (blocks[m].n_rows != L || blocks[m].n_cols != L)
                throw InvalidParameter("prior blocks must all be L x L");
            p.matrix.submat(m * L, m * L, (m + 1) * L - 1, (m + 1) * L - 1) = blocks[m];
        }
        p.validate();
        return p;
    }

    arma::cx_mat PriorCovariance::block(std::size_t m) const
    {
        if (m >= M)
            throw InvalidParameter("prior block index out of range");
        return matrix.submat(m * L, m * L, (m + 1) * L - 1, (m + 1) * L - 1);
    }

    std::vector<double> PriorCovariance::gains() const
    {
        std::vector<double> g(M);
        for (std::size_t m = 0; m < M; ++m)
            g[m] = std::real(arma::trace(block(m)));
        return g;
    }

    void PriorCovariance::validate() const
    {
        if (L == 0 || M == 0 || matrix.n_rows != L * M || matrix.n_cols != L * M)
            throw InvalidParameter("prior covariance has inconsistent dimensions");
        if (hermitian_defect(matrix) > 1e-10)
            throw InvalidParameter("prior covariance is not Hermitian");
        arma::cx_mat off = matrix;
        for (std::size_t m = 0; m < M; ++m)
            off.submat(m * L, m * L, (m + 1) * L - 1, (m + 1) * L - 1).zeros();
        if (arma::norm(off, "fro") > 1e-10 * arma::norm(matrix, "fro"))
            throw InvalidParameter("prior covariance is not block diagonal");
        arma::cx_mat chol;
        if (!arma::chol(chol, hermitian_part(matrix)))
            throw InvalidParameter("prior covariance is not positive definite");
    }

    arma::cx_vec EstimateResult::link(std::size_t m) const
    {
        if (m >= M)
            throw InvalidParameter("link index out of range");
        return g_hat.subvec(m * L, (m + 1) * L - 1);
    }

    JointEstimator JointEstimator::regularized(EstimatorKind kind, const arma::cx_mat &X,
                                               const PriorCovariance &prior, double noise_var, double p_u)
    {
        if (!(p_u > 0.0) || !(noise_var >= 0.0))
            throw InvalidParameter("training power must be positive and noise nonnegative");
        if (X.n_cols != prior.matrix.n_rows)
            throw InvalidParameter("prior dimension does not match training matrix");
        const arma::cx_mat A = hermitian_part(X.t() * X + (noise_var / p_u) * prior_inverse(prior));
        arma::cx_mat W;
        if (!arma::solve(W, A, arma::cx_mat(X.t()), arma::solve_opts::likely_sympd + arma::solve_opts::no_approx))
            throw NumericError("regularized training system is singular");
        return JointEstimator(kind, W / std::sqrt(p_u), prior.L, prior.M);
    }

    JointEstimator JointEstimator::mmse(const arma::cx_mat &X, const PriorCovariance &prior,
                                        double noise_var, double p_u)
    {
        return regularized(EstimatorKind::mmse, X, prior, noise_var, p_u);
    }

    JointEstimator JointEstimator::robust(const arma::cx_mat &X, std::span<const double> gains, std::size_t L,
                                          double noise_var, double p_u)
    {
        for (double g : gains)
            if (!(g > 0.0))
                throw InvalidParameter("robust estimator needs positive large-scale gains");
        return regularized(EstimatorKind::robust, X, PriorCovariance::robust(gains, L), noise_var, p_u);
    }

    JointEstimator JointEstimator::ls(const arma::cx_mat &X, std::size_t L, double p_u)
    {
        if (!(p_u > 0.0))
            throw InvalidParameter("training power must be positive");
        if (L == 0 || X.n_cols % L != 0)
            throw InvalidParameter("training width is not a multiple of L");
        const arma::cx_mat B = hermitian_part(X.t() * X);
        check_conditioning(B);
        arma::cx_mat W;
        if (!arma::solve(W, B, arma::cx_mat(X.t()), arma::solve_opts::likely_sympd + arma::solve_opts::no_approx))
            throw IllConditionedTraining("training Gram matrix is singular");
        return JointEstimator(EstimatorKind::ls, W / std::sqrt(p_u), L, X.n_cols / L);
    }

    EstimateResult JointEstimator::apply(const arma::cx_vec &r) const
    {
        if (r.n_elem != W_.n_cols)
            throw InvalidParameter("received vector length does not match K");
        arma::cx_vec g = W_ * r;
        if (!g.is_finite())
            throw NumericError("estimate has non-finite entries");
        return EstimateResult{std::move(g), kind_, L_, M_};
    }

    EstimateResult estimate_mmse(const arma::cx_vec &r, const arma::cx_mat &X, const PriorCovariance &prior,
                                 double noise_var, double p_u)
    {
        return JointEstimator::mmse(X, prior, noise_var, p_u).apply(r);
    }

    EstimateResult estimate_robust(const arma::cx_vec &r, const arma::cx_mat &X, std::span<const double> gains,
                                   std::size_t L, double noise_var, double p_u)
    {
        return JointEstimator::robust(X, gains, L, noise_var, p_u).apply(r);
    }

    EstimateResult estimate_ls(const arma::cx_vec &r, const arma::cx_mat &X, std::size_t L, double p_u)
    {
        return JointEstimator::ls(X, L, p_u).apply(r);
    }

    arma::cx_mat ErrorCovariance::block(std::size_t i, std::size_t j) const
    {
        return matrix.submat(i * L, j * L, (i + 1) * L - 1, (j + 1) * L - 1);
    }

    arma::cx_mat robust_excess_covariance(const GramBlocks &gram, const PriorCovariance &prior,
                                          double noise_var, double p_u)
    {
        const double c = noise_var / p_u;
        const arma::cx_mat &B = gram.B;
        const PriorCovariance D = PriorCovariance::robust(prior.gains(), prior.L);
        const arma::cx_mat D_inv = prior_inverse(D);
        const arma::cx_mat R_inv = prior_inverse(prior);
        const arma::cx_mat I = arma::eye<arma::cx_mat>(B.n_rows, B.n_cols);
        const arma::cx_mat A_d = inverse_hpd(B + c * D_inv, "robust regularized Gram matrix");
        const arma::cx_mat A_r = inverse_hpd(B + c * R_inv, "MMSE regularized Gram matrix");
        return c * A_d * B * (I - prior.matrix * D_inv) * A_d + prior.matrix * B * (A_r - A_d);
    }

    ErrorCovariance error_covariance(EstimatorKind kind, const GramBlocks &gram, const PriorCovariance &prior,
                                     double noise_var, double p_u)
    {
        if (!(p_u > 0.0) || !(noise_var >= 0.0))
            throw InvalidParameter("training power must be positive and noise nonnegative");
        if (gram.B.n_rows != prior.matrix.n_rows)
            throw InvalidParameter("Gram matrix and prior dimensions disagree");

        ErrorCovariance out;
        out.L = gram.L;
        out.kind = kind;
        switch (kind)
        {
        case EstimatorKind::ls:
        {
            check_conditioning(gram.B);
            out.matrix = (noise_var / p_u) * inverse_hpd(gram.B, "training Gram matrix");
            break;
        }
        case EstimatorKind::mmse:
        case EstimatorKind::robust:
        {
            const arma::cx_mat mmse =
                inverse_hpd(prior_inverse(prior) + (p_u / noise_var) * gram.B, "MMSE information matrix");
            out.matrix = mmse;
            if (kind == EstimatorKind::robust)
                out.matrix += robust_excess_covariance(gram, prior, noise_var, p_u);
            out.matrix = hermitian_part(out.matrix);
            break;
        }
        }
        return out;
    }

    double link_mse(const ErrorCovariance &cov, std::size_t m)
    {
        if (m >= cov.ms_count())
            throw InvalidParameter("link index out of range");
        return std::max(0.0, std::real(arma::trace(cov.block(m, m))));
    }

    cplx cfr_at_subcarrier(const arma::cx_vec &taps, long delay, std::size_t k, std::size_t K)
    {
        const auto Kl = static_cast<long long>(K);
        cplx acc(0.0, 0.0);
        for (arma::uword l = 0; l < taps.n_elem; ++l)
        {
            const long long e = ((static_cast<long long>(l) + delay) * static_cast<long long>(k)) % Kl;
            acc += taps(l) * std::polar(1.0, -2.0 * pi * static_cast<double>(e) / static_cast<double>(K));
        }
        return acc;
    }

    std::vector<CompositeCfr> estimate_to_cfr(const EstimateResult &est, std::span<const double> delays_s,
                                              double sample_period_s, std::size_t K)
    {
        if (delays_s.size() != est.M)
            throw InvalidParameter("need one delay per MS");
        std::vector<CompositeCfr> out;
        out.reserve(est.M);
        for (std::size_t m = 0; m < est.M; ++m)
            out.push_back(cir_to_cfr(CompositeCir{est.link(m), 1.0, delays_s[m]}, K, sample_period_s));
        return out;
    }
}
