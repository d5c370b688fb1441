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

#include "comp/training.hpp"

#include <algorithm>
#include <functional>

namespace comp
{
    TrainingSequence zadoff_chu(int root, int n_zc, std::size_t K)
    {
        if (n_zc < 2)
            throw InvalidParameter("Zadoff-Chu length must be at least 2");
        if (root < 1 || root >= n_zc)
            throw InvalidParameter("Zadoff-Chu root must satisfy 1 <= c < N_zc");
        if (K < static_cast<std::size_t>(n_zc))
            throw InvalidParameter("sequence length K must be at least N_zc");

        TrainingSequence seq;
        seq.root = root;
        seq.shift = 0;
        seq.values.set_size(K);
        const auto N = static_cast<long long>(n_zc);
        for (std::size_t k = 0; k < K; ++k)
        {
            const long long n = static_cast<long long>(k) % N;
            // c n (n+1) is even, so the phase is periodic in N once reduced mod 2N
            const long long e = (static_cast<long long>(root) * n * (n + 1)) % (2 * N);
            seq.values(k) = std::polar(1.0, -pi * static_cast<double>(e) / static_cast<double>(N));
        }
        return seq;
    }

    TrainingSequence cyclic_shift(const TrainingSequence &seq, long s)
    {
        const auto K = static_cast<long>(seq.length());
        TrainingSequence out = seq;
        if (K == 0)
            return out;
        const long s_mod = ((s % K) + K) % K;
        for (long k = 0; k < K; ++k)
        {
            const long e = (s_mod * k) % K;
            out.values(k) *= std::polar(1.0, -2.0 * pi * static_cast<double>(e) / static_cast<double>(K));
        }
        out.shift = ((seq.shift + s_mod) % K + K) % K;
        return out;
    }

    std::size_t max_orthogonal_family(std::size_t K, std::size_t L, std::size_t l_delay)
    {
        if (L == 0)
            throw InvalidParameter("tap count must be at least 1");
        return K / (L + l_delay);
    }

    EquivalentTrainingMatrix equivalent_training_matrix(const TrainingSequence &seq, long delay,
                                                        std::size_t L)
    {
        const std::size_t K = seq.length();
        if (L == 0 || L > K)
            throw InvalidParameter("equivalent training matrix needs 1 <= L <= K");
        const arma::cx_vec diag = seq.values % delay_phase(K, static_cast<double>(delay));
        arma::cx_mat X = fourier_columns(K, L);
        X.each_col() %= diag;
        return EquivalentTrainingMatrix{std::move(X)};
    }

    EquivalentTrainingMatrix equivalent_training_matrix(const TrainingSequence &seq, double delay_s,
                                                        double sample_period_s, std::size_t L, std::size_t K)
    {
        if (seq.length() != K)
            throw InvalidParameter("training sequence length does not match K");
        return equivalent_training_matrix(seq, delay_samples(delay_s, sample_period_s), L);
    }

    arma::cx_mat stack_training(std::span<const EquivalentTrainingMatrix> per_ms)
    {
        if (per_ms.empty())
            throw InvalidParameter("no training matrices to stack");
        const arma::uword K = per_ms.front().matrix.n_rows;
        const arma::uword L = per_ms.front().matrix.n_cols;
        arma::cx_mat X(K, L * per_ms.size());
        for (std::size_t m = 0; m < per_ms.size(); ++m)
        {
            if (per_ms[m].matrix.n_rows != K || per_ms[m].matrix.n_cols != L)
                throw InvalidParameter("training matrices disagree in K or L");
            X.cols(m * L, (m + 1) * L - 1) = per_ms[m].matrix;
        }
        return X;
    }

    arma::cx_mat GramBlocks::block(std::size_t i, std::size_t j) const
    {
        if (i >= M || j >= M)
            throw InvalidParameter("Gram block index out of range");
        return B.submat(i * L, j * L, (i + 1) * L - 1, (j + 1) * L - 1);
    }

    GramBlocks gram_blocks(const arma::cx_mat &X, std::size_t L)
    {
        if (L == 0 || X.n_cols % L != 0)
            throw InvalidParameter("stacked training width is not a multiple of L");
        arma::cx_mat B = X.t() * X;
        // exact Hermitian symmetry; the product is Hermitian up to rounding
        B = 0.5 * (B + B.t());
        return GramBlocks{std::move(B), L, X.n_cols / L};
    }

    GramBlocks gram_blocks(std::span<const EquivalentTrainingMatrix> per_ms)
    {
        return gram_blocks(stack_training(per_ms), per_ms.front().matrix.n_cols);
    }

    std::vector<double> cross_eigs(const arma::cx_mat &Q, std::size_t K)
    {
        if (Q.n_rows != Q.n_cols)
            throw InvalidParameter("cross-correlation block must be square");
        if (!Q.is_finite())
            throw NumericError("cross-correlation block has non-finite entries");
        const double k2 = static_cast<double>(K) * static_cast<double>(K);
        arma::cx_mat G = Q.t() * Q / k2;
        G = 0.5 * (G + G.t());
        arma::vec ev;
        if (!arma::eig_sym(ev, G))
            throw NumericError("Hermitian eigendecomposition failed");
        std::vector<double> out(ev.begin(), ev.end());
        // Q^H Q is PSD; round-off negatives become zero, anything larger is left for callers to reject
        for (double &x : out)
            if (x < 0.0 && x > -1e-12)
                x = 0.0;
        std::sort(out.begin(), out.end(), std::greater<>());
        return out;
    }

    arma::cx_vec received_training(const arma::cx_mat &X, const arma::cx_vec &g,
                                   double p_u, double noise_var, RngStream &rng)
    {
        if (X.n_cols != g.n_elem)
            throw InvalidParameter("channel vector length does not match training width");
        arma::cx_vec r = std::sqrt(p_u) * (X * g);
        r += rng.complex_normal(X.n_rows, noise_var);
        return r;
    }

    arma::cx_vec received_training(std::span<const EquivalentTrainingMatrix> per_ms,
                                   std::span<const arma::cx_vec> cir_per_ms,
                                   double p_u, double noise_var, RngStream &rng)
    {
        if (per_ms.size() != cir_per_ms.size())
            throw InvalidParameter("need one CIR block per MS");
        const arma::cx_mat X = stack_training(per_ms);
        const arma::uword L = per_ms.front().matrix.n_cols;
        arma::cx_vec g(X.n_cols);
        for (std::size_t m = 0; m < cir_per_ms.size(); ++m)
        {
            if (cir_per_ms[m].n_elem != L)
                throw InvalidParameter("CIR block length does not match L");
            g.subvec(m * L, (m + 1) * L - 1) = cir_per_ms[m];
        }
        return received_training(X, g, p_u, noise_var, rng);
    }
}
