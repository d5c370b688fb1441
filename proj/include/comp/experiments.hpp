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

#ifndef COMP_EXPERIMENTS_HPP
#define COMP_EXPERIMENTS_HPP

#include "comp/config.hpp"
#include "comp/estimators.hpp"
#include "comp/precoding.hpp"
#include "comp/scenario.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace comp
{
    // Running mean with the standard error of the mean.
    struct SampleStat
    {
        double sum = 0.0;
        double sum_sq = 0.0;
        std::size_t n = 0;

        void add(double x);
        double mean() const;
        double stderr_of_mean() const;
    };

    struct ResultRow
    {
        double snr_db = std::numeric_limits<double>::quiet_NaN();
        std::string estimator;
        std::string training_mode;
        std::string link_class;
        std::string metric;
        double value = 0.0;
        double stderr_value = std::numeric_limits<double>::quiet_NaN();
        std::size_t trials = 0;
    };

    struct ResultTable
    {
        std::string command;
        std::uint64_t seed = 0;
        std::string scenario_hash;
        std::string config_echo;
        std::vector<ResultRow> rows;

        // First row matching every field; NaN snr_db matches NaN.
        std::optional<ResultRow> find(double snr_db, const std::string &estimator, const std::string &training_mode,
                                      const std::string &link_class, const std::string &metric) const;
    };

    inline constexpr std::array<EstimatorKind, 3> all_estimators{EstimatorKind::mmse, EstimatorKind::robust,
                                                                 EstimatorKind::ls};

    // Precomputes training matrices, estimators and exact error covariances for one
    // scenario and replays seeded trials on top of them.
    class LinkSimulator
    {
    public:
        explicit LinkSimulator(Scenario scenario);

        const Scenario &scenario() const { return scenario_; }

        // One fading and noise realization. taps[b] is ML x N_t (column a holds the
        // stacked composite taps toward antenna a), received[b] is K x N_t.
        struct Draw
        {
            std::vector<arma::cx_mat> taps;
            std::vector<arma::cx_mat> received;
        };

        // Stream key (seed, trial, b N_t + a); the SNR point is not part of the key, so
        // sweeps share small-scale fading and noise across the grid.
        Draw draw(std::uint64_t seed, std::uint64_t trial) const;

        bool available(EstimatorKind kind) const;
        const std::string &failure(EstimatorKind kind) const;

        // Estimated taps, same layout as Draw::taps. Throws IllConditionedTraining when
        // the estimator could not be formed.
        std::vector<arma::cx_mat> estimate(EstimatorKind kind, const Draw &d) const;

        const GramBlocks &gram(std::size_t b) const { return grams_[b]; }
        const PriorCovariance &prior(std::size_t b) const { return priors_[b]; }
        const ErrorCovariance &error_covariance(EstimatorKind kind, std::size_t b) const;

        // Variance of the CFR estimation error of link (m, b) at subcarrier k.
        double cfr_error_variance(EstimatorKind kind, std::size_t m, std::size_t b, std::size_t k) const;

        // Rows g_m^H at subcarrier k built from per-BS tap matrices.
        GlobalChannelMatrix channel_at(const std::vector<arma::cx_mat> &taps, std::size_t k) const;

        // Per-cell single-BS MMSE estimation of the own-cell MSs from the same received
        // training, followed by per-BS ZF. The result is block diagonal across BSs.
        Precoder noncomp_precoder(const Draw &d, std::size_t k) const;

    private:
        Scenario scenario_;
        std::vector<GramBlocks> grams_;
        std::vector<PriorCovariance> priors_;
        std::vector<arma::cx_mat> X_;
        std::array<std::vector<JointEstimator>, 3> estimators_;
        std::array<std::vector<ErrorCovariance>, 3> errors_;
        std::array<std::string, 3> failures_;
        std::vector<std::vector<std::size_t>> own_ms_;         // per BS
        std::vector<JointEstimator> own_estimators_;           // per BS
        std::vector<std::vector<arma::cx_mat>> shifted_dft_;   // [m][b], K x L, Phi_{m,b} F
    };

    // Subcarriers a rate evaluation averages over.
    std::vector<std::size_t> rate_subcarriers(const SimulationConfig &cfg);

    // MSE and NMSE per (SNR, estimator, training mode, local/cross), with the exact
    // covariance trace, the eigenvalue form (two MSs) and the orthogonal form alongside.
    ResultTable run_mse_sweep(const SimulationConfig &cfg);

    // Achieved, ideal and non-cooperative rates with the three rate-loss bounds and the
    // lower bound on the MMSE rate.
    ResultTable run_rate_sweep(const SimulationConfig &cfg);

    // Per-MS throughput over random drops: mean and 5th percentile.
    ResultTable run_random_drops(const SimulationConfig &cfg);

    struct RateLossCheck
    {
        std::size_t draws = 0;
        std::size_t failed = 0;
        std::vector<double> loss_mean;               // E{R^ideal - R} per MS
        std::vector<double> loss_se;
        std::vector<double> bound_empirical;         // log2(1 + p_d/noise E{I_m})
        std::vector<double> interference_mean;
        std::vector<double> expected_interference;   // mean of sum_j sum_b sigma^2 ||v_{b,j}||^2
        std::vector<double> interference_gap_mean;   // E{I_m - expected}
        std::vector<double> interference_gap_se;
        std::vector<double> bound_closed;            // log2(1 + p_d/noise expected)
        double bound_orthogonal = 0.0;
        double worst_closed_minus_orthogonal = -std::numeric_limits<double>::infinity();  // over draws and MSs
    };

    // Rate loss under the orthogonal-training MMSE error model at one subcarrier:
    // g_hat ~ CN(0, (alpha^2 - sigma^2_e) I), g~ ~ CN(0, sigma^2_e I) independent,
    // sigma^2_e = eta alpha^2 noise L / (alpha^2 p_u K) per link.
    // gains is M x B (alpha^2_{m,b}); powers, noise, K, L and N_t come from cfg.
    RateLossCheck run_rate_loss_check(const SimulationConfig &cfg, const arma::mat &gains, std::size_t draws,
                                      std::uint64_t seed);

    struct ValidationCheck
    {
        std::string name;
        double value = 0.0;
        double reference = 0.0;
        double tolerance = 0.0;  // absolute
        bool passed = false;
    };

    // Monte-Carlo and closed-form consistency checks on the one-MS-per-cell layout.
    std::vector<ValidationCheck> run_validation(const SimulationConfig &cfg);
    ResultTable validation_table(const SimulationConfig &cfg, const std::vector<ValidationCheck> &checks);

    // p-th sample quantile (linear interpolation) and a normal-approximation standard
    // error derived from the distribution-free order-statistic confidence interval.
    std::pair<double, double> quantile_with_se(std::vector<double> xs, double p);
}

#endif
