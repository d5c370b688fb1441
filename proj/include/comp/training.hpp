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

#ifndef COMP_TRAINING_HPP
#define COMP_TRAINING_HPP

#include "comp/channel_model.hpp"
#include "comp/common.hpp"
#include "comp/rng.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace comp
{
    // Frequency-domain training sequence, unit modulus on every subcarrier.
    struct TrainingSequence
    {
        arma::cx_vec values;
        int root = 1;
        long shift = 0;

        std::size_t length() const { return values.n_elem; }
    };

    // t(k) = exp(-j pi c n_k (n_k + 1) / N_zc), n_k = k mod N_zc, k = 0..K-1.
    // K may exceed N_zc; the sequence then wraps cyclically.
    TrainingSequence zadoff_chu(int root, int n_zc, std::size_t K);

    // Phase ramp exp(-j 2pi s k / K), i.e. a time-domain cyclic shift by s samples.
    TrainingSequence cyclic_shift(const TrainingSequence &seq, long s);

    // floor(K / (L + l_delay)): how many shift-orthogonal sequences one root can yield.
    std::size_t max_orthogonal_family(std::size_t K, std::size_t L, std::size_t l_delay);

    struct EquivalentTrainingMatrix
    {
        arma::cx_mat matrix;  // K x L
    };

    // X = diag(t) * Phi(tau) * F, with tau quantized to whole samples of T_s.
    EquivalentTrainingMatrix equivalent_training_matrix(const TrainingSequence &seq, double delay_s,
                                                        double sample_period_s, std::size_t L, std::size_t K);

    // Same, with the delay given directly in samples.
    EquivalentTrainingMatrix equivalent_training_matrix(const TrainingSequence &seq, long delay_samples,
                                                        std::size_t L);

    // Horizontal concatenation X = [X_1, ..., X_M].
    arma::cx_mat stack_training(std::span<const EquivalentTrainingMatrix> per_ms);

    // B = X^H X with its L x L blocks. Block (i, j) = X_i^H X_j, so Q_{2,1} is block (1, 0).
    struct GramBlocks
    {
        arma::cx_mat B;
        std::size_t L = 0;
        std::size_t M = 0;

        arma::cx_mat block(std::size_t i, std::size_t j) const;
        arma::cx_mat P(std::size_t m) const { return block(m, m); }
        arma::cx_mat Q(std::size_t i, std::size_t j) const { return block(i, j); }
    };

    GramBlocks gram_blocks(std::span<const EquivalentTrainingMatrix> per_ms);
    GramBlocks gram_blocks(const arma::cx_mat &X, std::size_t L);

    // Eigenvalues lambda^2 of Q^H Q / K^2, sorted descending; round-off negatives above -1e-12 read as 0.
    std::vector<double> cross_eigs(const arma::cx_mat &Q, std::size_t K);

    // r = sqrt(p_u) X g + n, n ~ CN(0, noise_var I_K). Each cir block is one MS's composite taps.
    arma::cx_vec received_training(std::span<const EquivalentTrainingMatrix> per_ms,
                                   std::span<const arma::cx_vec> cir_per_ms,
                                   double p_u, double noise_var, RngStream &rng);

    // Stacked form: X is K x ML and g the ML-vector of all composite taps.
    arma::cx_vec received_training(const arma::cx_mat &X, const arma::cx_vec &g,
                                   double p_u, double noise_var, RngStream &rng);
}

#endif
