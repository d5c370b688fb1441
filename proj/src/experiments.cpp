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

#include "comp/experiments.hpp"

#include "comp/closed_form.hpp"
#include "comp/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace comp
{
    void SampleStat::add(double x)
    {
        sum += x;
        sum_sq += x * x;
        ++n;
    }

    double SampleStat::mean() const
    {
        return n == 0 ? std::numeric_limits<double>::quiet_NaN() : sum / static_cast<double>(n);
    }

    double SampleStat::stderr_of_mean() const
    {
        if (n < 2)
            return std::numeric_limits<double>::quiet_NaN();
        const double nd = static_cast<double>(n);
        const double var = std::max(0.0, (sum_sq - sum * sum / nd) / (nd - 1.0));
        return std::sqrt(var / nd);
    }

    std::optional<ResultRow> ResultTable::find(double snr_db, const std::string &estimator,
                                               const std::string &training_mode, const std::string &link_class,
                                               const std::string &metric) const
    {
        for (const auto &r : rows)
        {
            const bool snr_match = (std::isnan(snr_db) && std::isnan(r.snr_db)) || std::abs(r.snr_db - snr_db) < 1e-9;
            if (snr_match && r.estimator == estimator && r.training_mode == training_mode &&
                r.link_class == link_class && r.metric == metric)
                return r;
        }
        return std::nullopt;
    }

    namespace
    {
        std::size_t idx(EstimatorKind k) { return static_cast<std::size_t>(k); }

        std::string name(EstimatorKind k) { return std::string(to_string(k)); }
        std::string name(TrainingMode m) { return std::string(to_string(m)); }

        ResultTable make_table(const SimulationConfig &cfg, const std::string &command)
        {
            ResultTable t;
            t.command = command;
            t.seed = cfg.seed;
            t.config_echo = cfg.canonical();
            t.scenario_hash = fnv1a_hex(t.config_echo);
            return t;
        }

        void push(ResultTable &t, double snr, const std::string &est, const std::string &mode,
                  const std::string &cls, const std::string &metric, double value, double se, std::size_t trials)
        {
            t.rows.push_back(ResultRow{snr, est, mode, cls, metric, value, se, trials});
        }

        void push(ResultTable &t, double snr, const std::string &est, const std::string &mode,
                  const std::string &cls, const std::string &metric, const SampleStat &s)
        {
            push(t, snr, est, mode, cls, metric, s.mean(), s.stderr_of_mean(), s.n);
        }

        double log2_1p(double x) { return std::log2(1.0 + x); }

        // Delta-method standard error of log2(1 + c X) at the mean of X.
        double log_bound_se(const SampleStat &s, double c)
        {
            return c * s.stderr_of_mean() / (std::log(2.0) * (1.0 + c * s.mean()));
        }

        std::uint64_t drop_stream_seed(std::uint64_t seed) { return mix64(seed ^ 0x64726f7073ULL); }

        const char *class_name(bool local) { return local ? "local" : "cross"; }
    }

    // ---------------------------------------------------------------- LinkSimulator

    LinkSimulator::LinkSimulator(Scenario scenario) : scenario_(std::move(scenario))
    {
        const Scenario &s = scenario_;
        for (std::size_t b = 0; b < s.bs_count; ++b)
        {
            X_.push_back(s.training_matrix(b));
            grams_.push_back(gram_blocks(X_.back(), s.L));
            const std::vector<double> g = s.gains_at(b);
            priors_.push_back(PriorCovariance::from_pdp(g, s.pdp));
        }

        for (EstimatorKind kind : all_estimators)
        {
            const std::size_t k = idx(kind);
            try
            {
                for (std::size_t b = 0; b < s.bs_count; ++b)
                {
                    const std::vector<double> g = s.gains_at(b);
                    switch (kind)
                    {
                    case EstimatorKind::mmse:
                        estimators_[k].push_back(JointEstimator::mmse(X_[b], priors_[b], s.noise_ul, s.p_u));
                        break;
                    case EstimatorKind::robust:
                        estimators_[k].push_back(JointEstimator::robust(X_[b], g, s.L, s.noise_ul, s.p_u));
                        break;
                    case EstimatorKind::ls:
                        estimators_[k].push_back(JointEstimator::ls(X_[b], s.L, s.p_u));
                        break;
                    }
                    errors_[k].push_back(comp::error_covariance(kind, grams_[b], priors_[b], s.noise_ul, s.p_u));
                }
            }
            catch (const IllConditionedTraining &e)
            {
                estimators_[k].clear();
                errors_[k].clear();
                failures_[k] = e.what();
            }
        }

        own_ms_.resize(s.bs_count);
        for (std::size_t m = 0; m < s.ms_count; ++m)
            own_ms_[s.serving[m]].push_back(m);
        const std::vector<EquivalentTrainingMatrix> none;
        for (std::size_t b = 0; b < s.bs_count; ++b)
        {
            const std::vector<EquivalentTrainingMatrix> all = s.training_blocks(b);
            std::vector<EquivalentTrainingMatrix> own;
            std::vector<double> own_gains;
            for (std::size_t m : own_ms_[b])
            {
                own.push_back(all[m]);
                own_gains.push_back(s.gains(m, b));
            }
            if (own.empty())
            {
                own_estimators_.push_back(JointEstimator::ls(X_[b], s.L, s.p_u));
                continue;
            }
            const PriorCovariance own_prior = PriorCovariance::from_pdp(own_gains, s.pdp);
            own_estimators_.push_back(JointEstimator::mmse(stack_training(own), own_prior, s.noise_ul, s.p_u));
        }

        const arma::cx_mat F = fourier_columns(s.K, s.L);
        shifted_dft_.assign(s.ms_count, std::vector<arma::cx_mat>(s.bs_count));
        for (std::size_t m = 0; m < s.ms_count; ++m)
            for (std::size_t b = 0; b < s.bs_count; ++b)
            {
                arma::cx_mat Y = F;
                Y.each_col() %= delay_phase(s.K, static_cast<double>(s.delays[m][b]));
                shifted_dft_[m][b] = std::move(Y);
            }
    }

    LinkSimulator::Draw LinkSimulator::draw(std::uint64_t seed, std::uint64_t trial) const
    {
        const Scenario &s = scenario_;
        Draw d;
        d.taps.resize(s.bs_count);
        d.received.resize(s.bs_count);
        for (std::size_t b = 0; b < s.bs_count; ++b)
        {
            d.taps[b].set_size(s.ms_count * s.L, s.antennas);
            d.received[b].set_size(s.K, s.antennas);
            for (std::size_t a = 0; a < s.antennas; ++a)
            {
                RngStream rng = RngStream::derive(seed, trial, b * s.antennas + a);
                arma::cx_vec g(s.ms_count * s.L);
                for (std::size_t m = 0; m < s.ms_count; ++m)
                    g.subvec(m * s.L, (m + 1) * s.L - 1) = std::sqrt(s.gains(m, b)) * draw_small_scale_cir(s.pdp, rng);
                d.received[b].col(a) = received_training(X_[b], g, s.p_u, s.noise_ul, rng);
                d.taps[b].col(a) = g;
            }
        }
        return d;
    }

    bool LinkSimulator::available(EstimatorKind kind) const { return !estimators_[idx(kind)].empty(); }

    const std::string &LinkSimulator::failure(EstimatorKind kind) const { return failures_[idx(kind)]; }

    std::vector<arma::cx_mat> LinkSimulator::estimate(EstimatorKind kind, const Draw &d) const
    {
        if (!available(kind))
            throw IllConditionedTraining(failures_[idx(kind)]);
        std::vector<arma::cx_mat> out;
        out.reserve(scenario_.bs_count);
        for (std::size_t b = 0; b < scenario_.bs_count; ++b)
            out.push_back(estimators_[idx(kind)][b].apply(d.received[b]));
        return out;
    }

    const ErrorCovariance &LinkSimulator::error_covariance(EstimatorKind kind, std::size_t b) const
    {
        if (!available(kind))
            throw IllConditionedTraining(failures_[idx(kind)]);
        return errors_[idx(kind)].at(b);
    }

    double LinkSimulator::cfr_error_variance(EstimatorKind kind, std::size_t m, std::size_t b, std::size_t k) const
    {
        const arma::cx_rowvec w = shifted_dft_[m][b].row(k);
        const arma::cx_mat C = error_covariance(kind, b).block(m, m);
        return std::real(arma::as_scalar(w * C * w.t()));
    }

    GlobalChannelMatrix LinkSimulator::channel_at(const std::vector<arma::cx_mat> &taps, std::size_t k) const
    {
        const Scenario &s = scenario_;
        GlobalChannelMatrix G{arma::cx_mat(s.ms_count, s.bs_count * s.antennas), s.bs_count, s.antennas};
        for (std::size_t m = 0; m < s.ms_count; ++m)
            for (std::size_t b = 0; b < s.bs_count; ++b)
            {
                const arma::cx_rowvec v = shifted_dft_[m][b].row(k) * taps[b].rows(m * s.L, (m + 1) * s.L - 1);
                G.rows.submat(m, b * s.antennas, m, (b + 1) * s.antennas - 1) = arma::conj(v);
            }
        return G;
    }

    Precoder LinkSimulator::noncomp_precoder(const Draw &d, std::size_t k) const
    {
        const Scenario &s = scenario_;
        Precoder P{arma::cx_mat(s.bs_count * s.antennas, s.ms_count, arma::fill::zeros), s.bs_count, s.antennas};
        for (std::size_t b = 0; b < s.bs_count; ++b)
        {
            const auto &own = own_ms_[b];
            if (own.empty())
                continue;
            const arma::cx_mat est = own_estimators_[b].apply(d.received[b]);
            GlobalChannelMatrix Gb{arma::cx_mat(own.size(), s.antennas), 1, s.antennas};
            for (std::size_t i = 0; i < own.size(); ++i)
                Gb.rows.row(i) = arma::conj(shifted_dft_[own[i]][b].row(k) * est.rows(i * s.L, (i + 1) * s.L - 1));
            const Precoder Pb = zfbf(Gb);
            for (std::size_t i = 0; i < own.size(); ++i)
                P.columns.submat(b * s.antennas, own[i], (b + 1) * s.antennas - 1, own[i]) = Pb.columns.col(i);
        }
        return P;
    }

    std::vector<std::size_t> rate_subcarriers(const SimulationConfig &cfg)
    {
        if (!cfg.full_band)
            return {cfg.rate_subcarrier};
        std::vector<std::size_t> ks(cfg.subcarriers);
        for (std::size_t k = 0; k < ks.size(); ++k)
            ks[k] = k;
        return ks;
    }

    // ---------------------------------------------------------------- MSE sweep

    namespace
    {
        // [estimator][0 = local, 1 = cross]
        struct MseStats
        {
            std::array<std::array<SampleStat, 2>, 3> mse;
            std::array<std::array<SampleStat, 2>, 3> nmse;
        };

        MseStats monte_carlo_mse(const LinkSimulator &sim, std::uint64_t seed, std::size_t trials, std::size_t workers)
        {
            const Scenario &s = sim.scenario();
            using Sample = std::array<std::array<double, 4>, 3>;  // local mse, cross mse, local nmse, cross nmse
            auto samples = parallel_map(trials, workers, [&](std::size_t t) {
                const LinkSimulator::Draw d = sim.draw(seed, t);
                Sample out{};
                for (EstimatorKind kind : all_estimators)
                {
                    if (!sim.available(kind))
                        continue;
                    const auto est = sim.estimate(kind, d);
                    std::array<double, 4> sum{};
                    std::array<double, 2> count{};
                    for (std::size_t b = 0; b < s.bs_count; ++b)
                        for (std::size_t m = 0; m < s.ms_count; ++m)
                        {
                            const arma::span rows(m * s.L, (m + 1) * s.L - 1);
                            const arma::cx_mat e = est[b].rows(rows) - d.taps[b].rows(rows);
                            const double mse = arma::accu(arma::square(arma::abs(e))) / static_cast<double>(s.antennas);
                            const std::size_t c = s.is_local(m, b) ? 0 : 1;
                            sum[c] += mse;
                            sum[2 + c] += mse / s.gains(m, b);
                            count[c] += 1.0;
                        }
                    for (std::size_t c = 0; c < 2; ++c)
                        if (count[c] > 0.0)
                        {
                            out[idx(kind)][c] = sum[c] / count[c];
                            out[idx(kind)][2 + c] = sum[2 + c] / count[c];
                        }
                }
                return out;
            });

            MseStats stats;
            std::array<bool, 2> has_class{false, false};
            for (std::size_t m = 0; m < s.ms_count; ++m)
                for (std::size_t b = 0; b < s.bs_count; ++b)
                    has_class[s.is_local(m, b) ? 0 : 1] = true;
            for (const auto &smp : samples)
                for (EstimatorKind kind : all_estimators)
                {
                    if (!sim.available(kind))
                        continue;
                    for (std::size_t c = 0; c < 2; ++c)
                        if (has_class[c])
                        {
                            stats.mse[idx(kind)][c].add(smp[idx(kind)][c]);
                            stats.nmse[idx(kind)][c].add(smp[idx(kind)][2 + c]);
                        }
                }
            return stats;
        }

        // Class averages of a per-link analytic value.
        template <typename F>
        std::array<std::array<double, 2>, 2> class_average(const Scenario &s, F &&value)
        {
            std::array<std::array<double, 2>, 2> acc{};  // [mse|nmse][class]
            std::array<double, 2> count{};
            for (std::size_t b = 0; b < s.bs_count; ++b)
                for (std::size_t m = 0; m < s.ms_count; ++m)
                {
                    const std::size_t c = s.is_local(m, b) ? 0 : 1;
                    const double v = value(m, b);
                    acc[0][c] += v;
                    acc[1][c] += v / s.gains(m, b);
                    count[c] += 1.0;
                }
            for (std::size_t c = 0; c < 2; ++c)
                for (std::size_t q = 0; q < 2; ++q)
                    acc[q][c] = count[c] > 0.0 ? acc[q][c] / count[c] : std::numeric_limits<double>::quiet_NaN();
            return acc;
        }

        void emit_analytic(ResultTable &t, double snr, EstimatorKind kind, TrainingMode mode, const std::string &tag,
                           const std::array<std::array<double, 2>, 2> &v, std::size_t trials)
        {
            for (std::size_t c = 0; c < 2; ++c)
            {
                if (std::isnan(v[0][c]))
                    continue;
                push(t, snr, name(kind), name(mode), class_name(c == 0), "mse_" + tag, v[0][c], 0.0, trials);
                push(t, snr, name(kind), name(mode), class_name(c == 0), "nmse_" + tag, v[1][c], 0.0, trials);
            }
        }
    }

    ResultTable run_mse_sweep(const SimulationConfig &cfg)
    {
        cfg.validate();
        ResultTable t = make_table(cfg, "mse-sweep");
        for (TrainingMode mode : cfg.training_modes)
            for (double snr : cfg.snr_grid_db)
            {
                const LinkSimulator sim(Scenario::build(cfg, symmetric_geometry(cfg, snr), mode));
                const Scenario &s = sim.scenario();
                const MseStats mc = monte_carlo_mse(sim, cfg.seed, cfg.trials, cfg.workers);

                for (EstimatorKind kind : cfg.estimators)
                {
                    if (!sim.available(kind))
                    {
                        push(t, snr, name(kind), name(mode), "all", "estimator_failed", 1.0, 0.0, 0);
                        continue;
                    }
                    for (std::size_t c = 0; c < 2; ++c)
                    {
                        if (mc.mse[idx(kind)][c].n == 0)
                            continue;
                        push(t, snr, name(kind), name(mode), class_name(c == 0), "mse", mc.mse[idx(kind)][c]);
                        push(t, snr, name(kind), name(mode), class_name(c == 0), "nmse", mc.nmse[idx(kind)][c]);
                    }

                    emit_analytic(t, snr, kind, mode, "exact",
                                  class_average(s, [&](std::size_t m, std::size_t b) {
                                      return link_mse(sim.error_covariance(kind, b), m);
                                  }),
                                  cfg.trials);

                    if (s.ms_count == 2)
                    {
                        try
                        {
                            std::vector<std::vector<double>> lambda(s.bs_count);
                            for (std::size_t b = 0; b < s.bs_count; ++b)
                                lambda[b] = cross_eigs(sim.gram(b).Q(1, 0), s.K);
                            emit_analytic(t, snr, kind, mode, "eig",
                                          class_average(s,
                                                        [&](std::size_t m, std::size_t b) {
                                                            const auto lb = s.budget(b);
                                                            return closed_form::nmse(kind, lb, m, lambda[b]) *
                                                                   lb.gains[m];
                                                        }),
                                          cfg.trials);
                        }
                        catch (const InvalidSpectrum &)
                        {
                            push(t, snr, name(kind), name(mode), "all", "eig_invalid_spectrum", 1.0, 0.0, 0);
                        }
                    }

                    if (mode == TrainingMode::orthogonal)
                        emit_analytic(t, snr, kind, mode, "orth",
                                      class_average(s,
                                                    [&](std::size_t m, std::size_t b) {
                                                        return closed_form::mse_orthogonal(kind, s.budget(b), m);
                                                    }),
                                      cfg.trials);
                }
            }
        return t;
    }

    // ---------------------------------------------------------------- rate sweep

    namespace
    {
        struct RateTrial
        {
            std::vector<double> ideal;
            std::array<std::vector<double>, 3> rate;
            std::array<std::vector<double>, 3> interference;
            std::array<std::vector<double>, 3> expected;
            std::array<bool, 3> failed{false, false, false};
            std::vector<double> noncomp;
            bool noncomp_failed = false;
        };

        RateTrial rate_trial(const LinkSimulator &sim, const LinkSimulator::Draw &d, const std::vector<std::size_t> &ks,
                             const std::vector<EstimatorKind> &kinds, bool with_noncomp)
        {
            const Scenario &s = sim.scenario();
            const std::size_t M = s.ms_count;
            const double nk = static_cast<double>(ks.size());
            RateTrial out;
            out.ideal.assign(M, 0.0);
            std::vector<GlobalChannelMatrix> G;
            for (std::size_t k : ks)
                G.push_back(sim.channel_at(d.taps, k));
            try
            {
                for (const auto &Gk : G)
                {
                    const auto r = ideal_rate(Gk, s.p_d, s.noise_dl);
                    for (std::size_t m = 0; m < M; ++m)
                        out.ideal[m] += r[m] / nk;
                }
            }
            catch (const SingularChannel &)
            {
                out.ideal.clear();
            }

            for (EstimatorKind kind : kinds)
            {
                const std::size_t e = idx(kind);
                if (!sim.available(kind))
                {
                    out.failed[e] = true;
                    continue;
                }
                out.rate[e].assign(M, 0.0);
                out.interference[e].assign(M, 0.0);
                out.expected[e].assign(M, 0.0);
                try
                {
                    const auto est = sim.estimate(kind, d);
                    for (std::size_t i = 0; i < ks.size(); ++i)
                    {
                        const GlobalChannelMatrix Gh = sim.channel_at(est, ks[i]);
                        const Precoder V = zfbf(Gh);
                        const auto r = achieved_rate(G[i], V, s.p_d, s.noise_dl);
                        const auto I = interference_power(Gh.rows - G[i].rows, V);
                        arma::mat err_var(M, s.bs_count);
                        for (std::size_t m = 0; m < M; ++m)
                            for (std::size_t b = 0; b < s.bs_count; ++b)
                                err_var(m, b) = sim.cfr_error_variance(kind, m, b, ks[i]);
                        const auto closed = rate_loss_bound_closed(err_var, s.gains, V, s.p_d, s.noise_dl);
                        for (std::size_t m = 0; m < M; ++m)
                        {
                            out.rate[e][m] += r[m] / nk;
                            out.interference[e][m] += I[m] / nk;
                            out.expected[e][m] += closed.expected_interference[m] / nk;
                        }
                    }
                }
                catch (const SingularChannel &)
                {
                    out.failed[e] = true;
                }
            }

            if (with_noncomp)
            {
                out.noncomp.assign(M, 0.0);
                try
                {
                    for (std::size_t i = 0; i < ks.size(); ++i)
                    {
                        const auto r = achieved_rate(G[i], sim.noncomp_precoder(d, ks[i]), s.p_d, s.noise_dl);
                        for (std::size_t m = 0; m < M; ++m)
                            out.noncomp[m] += r[m] / nk;
                    }
                }
                catch (const SingularChannel &)
                {
                    out.noncomp_failed = true;
                }
            }
            return out;
        }

        double mean_of(const std::vector<double> &v)
        {
            double s = 0.0;
            for (double x : v)
                s += x;
            return v.empty() ? 0.0 : s / static_cast<double>(v.size());
        }
    }

    ResultTable run_rate_sweep(const SimulationConfig &cfg)
    {
        cfg.validate();
        ResultTable t = make_table(cfg, "rate-sweep");
        const std::vector<std::size_t> ks = rate_subcarriers(cfg);
        for (TrainingMode mode : cfg.training_modes)
            for (double snr : cfg.snr_grid_db)
            {
                const LinkSimulator sim(Scenario::build(cfg, symmetric_geometry(cfg, snr), mode));
                const Scenario &s = sim.scenario();
                const std::size_t M = s.ms_count;
                const double c = s.p_d / s.noise_dl;
                const double orth = rate_loss_bound_orth_mmse(M, s.p_d, s.p_u, s.noise_dl, s.noise_ul, s.L, s.K);

                const auto trials = parallel_map(cfg.trials, cfg.workers, [&](std::size_t i) {
                    return rate_trial(sim, sim.draw(cfg.seed, i), ks, cfg.estimators, cfg.include_noncomp);
                });

                const std::string md = name(mode);
                auto ms_class = [](std::size_t m) { return "ms" + std::to_string(m); };

                SampleStat ideal_mean;
                std::vector<SampleStat> ideal_ms(M);
                for (const auto &tr : trials)
                {
                    if (tr.ideal.empty())
                        continue;
                    ideal_mean.add(mean_of(tr.ideal));
                    for (std::size_t m = 0; m < M; ++m)
                        ideal_ms[m].add(tr.ideal[m]);
                }
                push(t, snr, "ideal", md, "mean", "rate", ideal_mean);
                for (std::size_t m = 0; m < M; ++m)
                    push(t, snr, "ideal", md, ms_class(m), "rate", ideal_ms[m]);

                for (EstimatorKind kind : cfg.estimators)
                {
                    const std::size_t e = idx(kind);
                    const std::string en = name(kind);
                    SampleStat rate_mean, loss_mean;
                    std::vector<SampleStat> rate_ms(M), loss_ms(M), interf_ms(M), expected_ms(M);
                    std::size_t failed = 0;
                    for (const auto &tr : trials)
                    {
                        if (tr.failed[e] || tr.ideal.empty())
                        {
                            ++failed;
                            continue;
                        }
                        rate_mean.add(mean_of(tr.rate[e]));
                        double loss_sum = 0.0;
                        for (std::size_t m = 0; m < M; ++m)
                        {
                            const double loss = tr.ideal[m] - tr.rate[e][m];
                            loss_sum += loss;
                            rate_ms[m].add(tr.rate[e][m]);
                            loss_ms[m].add(loss);
                            interf_ms[m].add(tr.interference[e][m]);
                            expected_ms[m].add(tr.expected[e][m]);
                        }
                        loss_mean.add(loss_sum / static_cast<double>(M));
                    }
                    if (failed > 0)
                        push(t, snr, en, md, "all", "estimator_failed", static_cast<double>(failed), 0.0, cfg.trials);
                    if (rate_mean.n == 0)
                        continue;

                    push(t, snr, en, md, "mean", "rate", rate_mean);
                    push(t, snr, en, md, "mean", "rate_loss", loss_mean);
                    double be_sum = 0.0, bc_sum = 0.0;
                    for (std::size_t m = 0; m < M; ++m)
                    {
                        const double be = log2_1p(c * interf_ms[m].mean());
                        const double bc = log2_1p(c * expected_ms[m].mean());
                        be_sum += be;
                        bc_sum += bc;
                        push(t, snr, en, md, ms_class(m), "rate", rate_ms[m]);
                        push(t, snr, en, md, ms_class(m), "rate_loss", loss_ms[m]);
                        push(t, snr, en, md, ms_class(m), "bound_empirical", be, log_bound_se(interf_ms[m], c),
                             interf_ms[m].n);
                        push(t, snr, en, md, ms_class(m), "bound_closed", bc, log_bound_se(expected_ms[m], c),
                             expected_ms[m].n);
                    }
                    push(t, snr, en, md, "mean", "bound_empirical", be_sum / M, 0.0, rate_mean.n);
                    push(t, snr, en, md, "mean", "bound_closed", bc_sum / M, 0.0, rate_mean.n);
                    if (kind == EstimatorKind::mmse)
                    {
                        push(t, snr, en, md, "mean", "bound_orthogonal", orth, 0.0, rate_mean.n);
                        double lb = 0.0;
                        for (std::size_t m = 0; m < M; ++m)
                            lb += rate_lower_bound(ideal_ms[m].mean(), orth).value;
                        push(t, snr, en, md, "mean", "lower_bound", lb / M, ideal_mean.stderr_of_mean(), ideal_mean.n);
                    }
                }

                if (cfg.include_noncomp)
                {
                    SampleStat nc_mean;
                    std::vector<SampleStat> nc_ms(M);
                    std::size_t failed = 0;
                    for (const auto &tr : trials)
                    {
                        if (tr.noncomp_failed)
                        {
                            ++failed;
                            continue;
                        }
                        nc_mean.add(mean_of(tr.noncomp));
                        for (std::size_t m = 0; m < M; ++m)
                            nc_ms[m].add(tr.noncomp[m]);
                    }
                    if (failed > 0)
                        push(t, snr, "noncomp", md, "all", "estimator_failed", static_cast<double>(failed), 0.0,
                             cfg.trials);
                    push(t, snr, "noncomp", md, "mean", "rate", nc_mean);
                    for (std::size_t m = 0; m < M; ++m)
                        push(t, snr, "noncomp", md, ms_class(m), "rate", nc_ms[m]);
                }
            }
        return t;
    }

    // ---------------------------------------------------------------- random drops

    std::pair<double, double> quantile_with_se(std::vector<double> xs, double p)
    {
        if (xs.empty())
            throw InvalidParameter("quantile of an empty sample");
        if (!(p >= 0.0 && p <= 1.0))
            throw InvalidParameter("quantile level must lie in [0, 1]");
        std::sort(xs.begin(), xs.end());
        const double n = static_cast<double>(xs.size());
        const double h = (n - 1.0) * p;
        const auto lo = static_cast<std::size_t>(std::floor(h));
        const std::size_t hi = std::min(lo + 1, xs.size() - 1);
        const double q = xs[lo] + (h - static_cast<double>(lo)) * (xs[hi] - xs[lo]);

        const double z = 1.959963984540054;
        const double half = z * std::sqrt(n * p * (1.0 - p));
        const auto rank = [&](double r) {
            return static_cast<std::size_t>(std::clamp(r, 0.0, n - 1.0));
        };
        const std::size_t r_lo = rank(std::floor(n * p - half));
        const std::size_t r_hi = rank(std::ceil(n * p + half));
        return {q, (xs[r_hi] - xs[r_lo]) / (2.0 * z)};
    }

    ResultTable run_random_drops(const SimulationConfig &cfg)
    {
        cfg.validate();
        ResultTable t = make_table(cfg, "drops");
        const std::vector<std::size_t> ks = rate_subcarriers(cfg);
        const std::uint64_t fading_seed = drop_stream_seed(cfg.seed);

        // labels: estimators in config order, then ideal, then noncomp
        std::vector<std::string> labels;
        for (EstimatorKind k : cfg.estimators)
            labels.push_back(name(k));
        labels.push_back("ideal");
        if (cfg.include_noncomp)
            labels.push_back("noncomp");

        for (TrainingMode mode : cfg.training_modes)
        {
            struct DropResult
            {
                bool ok = false;
                std::vector<std::vector<double>> throughput;  // [label][ms]
            };
            const auto drops = parallel_map(cfg.drops, cfg.workers, [&](std::size_t d) {
                DropResult out;
                RngStream rng = RngStream::derive(cfg.seed, d, 0xd50b5ULL);
                Geometry geom = random_drop_geometry(cfg, rng);
                std::optional<LinkSimulator> sim;
                try
                {
                    sim.emplace(Scenario::build(cfg, std::move(geom), mode));
                }
                catch (const InvalidParameter &)
                {
                    return out;
                }
                const std::size_t M = sim->scenario().ms_count;
                out.throughput.assign(labels.size(), std::vector<double>(M, 0.0));
                std::vector<std::size_t> counts(labels.size(), 0);
                for (std::size_t i = 0; i < cfg.drop_trials; ++i)
                {
                    const auto draw = sim->draw(fading_seed, d * cfg.drop_trials + i);
                    const RateTrial tr = rate_trial(*sim, draw, ks, cfg.estimators, cfg.include_noncomp);
                    auto add = [&](std::size_t l, const std::vector<double> &r) {
                        for (std::size_t m = 0; m < M; ++m)
                            out.throughput[l][m] += r[m];
                        ++counts[l];
                    };
                    for (std::size_t e = 0; e < cfg.estimators.size(); ++e)
                        if (!tr.failed[idx(cfg.estimators[e])])
                            add(e, tr.rate[idx(cfg.estimators[e])]);
                    if (!tr.ideal.empty())
                        add(cfg.estimators.size(), tr.ideal);
                    if (cfg.include_noncomp && !tr.noncomp_failed)
                        add(cfg.estimators.size() + 1, tr.noncomp);
                }
                for (std::size_t l = 0; l < labels.size(); ++l)
                {
                    if (counts[l] == 0)
                    {
                        out.throughput[l].clear();
                        continue;
                    }
                    for (double &x : out.throughput[l])
                        x /= static_cast<double>(counts[l]);
                }
                out.ok = true;
                return out;
            });

            std::size_t usable = 0;
            for (const auto &d : drops)
                usable += d.ok ? 1 : 0;
            const std::string md = name(mode);
            push(t, std::numeric_limits<double>::quiet_NaN(), "all", md, "all", "drops_used",
                 static_cast<double>(usable), 0.0, cfg.drops);
            for (std::size_t l = 0; l < labels.size(); ++l)
            {
                std::vector<double> samples;
                SampleStat stat;
                for (const auto &d : drops)
                    if (d.ok)
                        for (double x : d.throughput[l])
                        {
                            samples.push_back(x);
                            stat.add(x);
                        }
                if (samples.empty())
                    continue;
                const double nan = std::numeric_limits<double>::quiet_NaN();
                push(t, nan, labels[l], md, "all", "throughput_mean", stat);
                const auto [q, se] = quantile_with_se(samples, 0.05);
                push(t, nan, labels[l], md, "all", "throughput_p05", q, se, samples.size());
            }
        }
        return t;
    }

    // ---------------------------------------------------------------- rate-loss check

    RateLossCheck run_rate_loss_check(const SimulationConfig &cfg, const arma::mat &gains, std::size_t draws,
                                      std::uint64_t seed)
    {
        cfg.validate();
        const std::size_t M = gains.n_rows;
        const std::size_t B = gains.n_cols;
        const std::size_t Nt = cfg.antennas_per_bs;
        if (M == 0 || B != cfg.bs_count)
            throw InvalidParameter("gain matrix must be M x B");
        const double p_d = cfg.p_d();
        const double noise_dl = cfg.noise_dl;
        arma::mat err_var(M, B);
        for (std::size_t b = 0; b < B; ++b)
        {
            closed_form::LinkBudget lb;
            const arma::vec col = gains.col(b);
            lb.gains.assign(col.begin(), col.end());
            lb.p_u = cfg.p_u;
            lb.p_d = p_d;
            lb.noise_ul = cfg.noise_ul;
            lb.noise_dl = noise_dl;
            lb.K = cfg.subcarriers;
            lb.L = cfg.taps;
            for (std::size_t m = 0; m < M; ++m)
                err_var(m, b) = closed_form::mse_orthogonal(EstimatorKind::mmse, lb, m);
        }
        const double c = p_d / noise_dl;

        struct Sample
        {
            bool ok = false;
            std::vector<double> loss, I, expected;
            double worst = -std::numeric_limits<double>::infinity();
        };
        const double orth =
            rate_loss_bound_orth_mmse(M, p_d, cfg.p_u, noise_dl, cfg.noise_ul, cfg.taps, cfg.subcarriers);
        const auto samples = parallel_map(draws, cfg.workers, [&](std::size_t i) {
            Sample out;
            RngStream rng = RngStream::derive(seed, i, 0x7e57ULL);
            GlobalChannelMatrix G_hat{arma::cx_mat(M, B * Nt), B, Nt};
            arma::cx_mat E(M, B * Nt);
            for (std::size_t m = 0; m < M; ++m)
                for (std::size_t b = 0; b < B; ++b)
                    for (std::size_t a = 0; a < Nt; ++a)
                    {
                        G_hat.rows(m, b * Nt + a) = rng.complex_normal(gains(m, b) - err_var(m, b));
                        E(m, b * Nt + a) = rng.complex_normal(err_var(m, b));
                    }
            const GlobalChannelMatrix G{G_hat.rows + E, B, Nt};
            try
            {
                const Precoder V = zfbf(G_hat);
                const auto ideal = ideal_rate(G, p_d, noise_dl);
                const auto rate = achieved_rate(G, V, p_d, noise_dl);
                out.I = interference_power(E, V);
                const auto closed = rate_loss_bound_closed(err_var, gains, V, p_d, noise_dl);
                out.expected = closed.expected_interference;
                out.loss.resize(M);
                for (std::size_t m = 0; m < M; ++m)
                {
                    out.loss[m] = ideal[m] - rate[m];
                    out.worst = std::max(out.worst, closed.bound[m] - orth);
                }
                out.ok = true;
            }
            catch (const SingularChannel &)
            {
            }
            return out;
        });

        RateLossCheck r;
        r.draws = draws;
        r.bound_orthogonal = orth;
        std::vector<SampleStat> loss(M), I(M), expected(M), gap(M);
        for (const auto &smp : samples)
        {
            if (!smp.ok)
            {
                ++r.failed;
                continue;
            }
            r.worst_closed_minus_orthogonal = std::max(r.worst_closed_minus_orthogonal, smp.worst);
            for (std::size_t m = 0; m < M; ++m)
            {
                loss[m].add(smp.loss[m]);
                I[m].add(smp.I[m]);
                expected[m].add(smp.expected[m]);
                gap[m].add(smp.I[m] - smp.expected[m]);
            }
        }
        for (std::size_t m = 0; m < M; ++m)
        {
            r.loss_mean.push_back(loss[m].mean());
            r.loss_se.push_back(loss[m].stderr_of_mean());
            r.interference_mean.push_back(I[m].mean());
            r.bound_empirical.push_back(log2_1p(c * I[m].mean()));
            r.expected_interference.push_back(expected[m].mean());
            r.bound_closed.push_back(log2_1p(c * expected[m].mean()));
            r.interference_gap_mean.push_back(gap[m].mean());
            r.interference_gap_se.push_back(gap[m].stderr_of_mean());
        }
        return r;
    }

    // ---------------------------------------------------------------- validation

    namespace
    {
        ValidationCheck relative_check(std::string name, double value, double reference, double rel)
        {
            const double tol = rel * std::max(std::abs(reference), 1e-300);
            return ValidationCheck{std::move(name), value, reference, tol, std::abs(value - reference) <= tol};
        }

        std::string fmt_snr(double snr)
        {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.2f", snr);
            return buf;
        }
    }

    std::vector<ValidationCheck> run_validation(const SimulationConfig &base)
    {
        SimulationConfig cfg = base;
        cfg.ms_per_cell = 1;
        cfg.validate();
        std::vector<ValidationCheck> out;
        const double edge = cfg.edge_snr_ul_db();
        const std::vector<double> snrs{edge, std::min(edge + 5.0, max_local_snr_ul_db(cfg))};

        for (TrainingMode mode : cfg.training_modes)
            for (double snr : snrs)
            {
                const LinkSimulator sim(Scenario::build(cfg, symmetric_geometry(cfg, snr), mode));
                const Scenario &s = sim.scenario();
                const MseStats mc = monte_carlo_mse(sim, cfg.seed, cfg.trials, cfg.workers);
                const std::string where = name(mode) + "@" + fmt_snr(snr);
                for (EstimatorKind kind : cfg.estimators)
                {
                    if (!sim.available(kind))
                        continue;
                    const auto exact = class_average(
                        s, [&](std::size_t m, std::size_t b) { return link_mse(sim.error_covariance(kind, b), m); });
                    for (std::size_t c = 0; c < 2; ++c)
                    {
                        const SampleStat &st = mc.mse[idx(kind)][c];
                        const double tol = 5.0 * st.stderr_of_mean();
                        out.push_back(ValidationCheck{"monte_carlo_mse/" + where + "/" + name(kind) + "/" +
                                                          class_name(c == 0),
                                                      st.mean(), exact[0][c], tol,
                                                      std::abs(st.mean() - exact[0][c]) <= tol});
                    }
                }

                // Uniform-PDP identities on the same layout.
                SimulationConfig ucfg = cfg;
                ucfg.pdp = PdpKind::uniform;
                const Scenario us = Scenario::build(ucfg, s.geometry, mode);
                for (std::size_t b = 0; b < us.bs_count; ++b)
                {
                    const GramBlocks gram = gram_blocks(us.training_matrix(b), us.L);
                    const PriorCovariance prior = PriorCovariance::from_pdp(us.gains_at(b), us.pdp);
                    const auto lb = us.budget(b);
                    const auto lambda = cross_eigs(gram.Q(1, 0), us.K);
                    const std::string at = where + "/bs" + std::to_string(b);
                    for (EstimatorKind kind : {EstimatorKind::mmse, EstimatorKind::ls})
                    {
                        const ErrorCovariance cov = comp::error_covariance(kind, gram, prior, us.noise_ul, us.p_u);
                        for (std::size_t m = 0; m < 2; ++m)
                            out.push_back(relative_check("eigen_form/" + at + "/" + name(kind) + "/ms" +
                                                             std::to_string(m),
                                                         closed_form::nmse(kind, lb, m, lambda) * lb.gains[m],
                                                         link_mse(cov, m), 1e-10));
                        const ErrorCovariance blockwise =
                            kind == EstimatorKind::mmse
                                ? closed_form::appendix_cov_mmse(lb, gram.Q(1, 0), us.K, us.L)
                                : closed_form::appendix_cov_ls(gram.Q(1, 0), us.noise_ul, us.p_u, us.K, us.L);
                        const double defect = arma::norm(blockwise.matrix - cov.matrix, "fro");
                        const double tol = 1e-10 * arma::norm(cov.matrix, "fro");
                        out.push_back(ValidationCheck{"block_inverse/" + at + "/" + name(kind), defect, 0.0, tol,
                                                      defect <= tol});
                        if (mode == TrainingMode::orthogonal)
                            for (std::size_t m = 0; m < 2; ++m)
                                out.push_back(relative_check("orthogonal_form/" + at + "/" + name(kind) + "/ms" +
                                                                 std::to_string(m),
                                                             closed_form::mse_orthogonal(kind, lb, m),
                                                             link_mse(cov, m), 1e-10));
                    }
                }

                if (mode == TrainingMode::orthogonal)
                    for (std::size_t b = 0; b < s.bs_count; ++b)
                        for (std::size_t m = 0; m < s.ms_count; ++m)
                            out.push_back(relative_check(
                                "robust_gap/" + where + "/bs" + std::to_string(b) + "/ms" + std::to_string(m),
                                closed_form::robust_mmse_gap(s.budget(b), m, s.pdp),
                                link_mse(sim.error_covariance(EstimatorKind::robust, b), m) -
                                    link_mse(sim.error_covariance(EstimatorKind::mmse, b), m),
                                1e-8));
            }
        return out;
    }

    ResultTable validation_table(const SimulationConfig &cfg, const std::vector<ValidationCheck> &checks)
    {
        ResultTable t = make_table(cfg, "validate");
        for (const auto &c : checks)
        {
            push(t, std::numeric_limits<double>::quiet_NaN(), "all", "all", c.name, "value", c.value, c.tolerance,
                 cfg.trials);
            push(t, std::numeric_limits<double>::quiet_NaN(), "all", "all", c.name, "reference", c.reference, 0.0,
                 cfg.trials);
            push(t, std::numeric_limits<double>::quiet_NaN(), "all", "all", c.name, "passed", c.passed ? 1.0 : 0.0,
                 0.0, cfg.trials);
        }
        return t;
    }
}
