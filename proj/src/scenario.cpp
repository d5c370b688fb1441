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

#include "comp/scenario.hpp"

#include <cmath>

namespace comp
{
    double inter_site_distance(const SimulationConfig &cfg) { return std::sqrt(3.0) * cfg.cell_radius_m; }

    double max_local_snr_ul_db(const SimulationConfig &cfg)
    {
        return cfg.edge_snr_ul_db() + 10.0 * cfg.pathloss_exponent * std::log10(cfg.cell_radius_m / cfg.lateral_offset_m);
    }

    namespace
    {
        Geometry base_geometry(const SimulationConfig &cfg)
        {
            Geometry g;
            g.cell_radius = cfg.cell_radius_m;
            g.pathloss_exponent = cfg.pathloss_exponent;
            g.edge_snr_db = cfg.edge_snr_dl_db;
            g.bs_positions = {Point2{0.0, 0.0}, Point2{inter_site_distance(cfg), 0.0}};
            return g;
        }
    }

    Geometry symmetric_geometry(const SimulationConfig &cfg, double snr_db)
    {
        cfg.validate();
        if (cfg.ms_per_cell > 2)
            throw InvalidParameter("symmetric layout supports one or two MSs per cell");
        const double edge = cfg.edge_snr_ul_db();
        const double top = max_local_snr_ul_db(cfg);
        constexpr double slack = 1e-9;
        if (snr_db < edge - slack || snr_db > top + slack)
            throw InfeasibleGeometry("local uplink SNR " + std::to_string(snr_db) + " dB outside the feasible range [" +
                                     std::to_string(edge) + ", " + std::to_string(top) + "] dB");

        const double r = cfg.cell_radius_m;
        const double d3 = cfg.lateral_offset_m;
        double d1 = r;
        if (cfg.pathloss_exponent > 0.0)
            d1 = r * std::pow(10.0, -(snr_db - edge) / (10.0 * cfg.pathloss_exponent));
        d1 = std::max(d1, d3);
        const double x = std::sqrt(std::max(d1 * d1 - d3 * d3, 0.0));
        const double isd = inter_site_distance(cfg);

        Geometry g = base_geometry(cfg);
        const std::vector<double> ys = cfg.ms_per_cell == 2 ? std::vector<double>{d3, -d3} : std::vector<double>{d3};
        for (double y : ys)
        {
            g.ms_positions.push_back({x, y});
            g.assigned_cells.push_back(0);
        }
        for (double y : ys)
        {
            g.ms_positions.push_back({isd - x, y});
            g.assigned_cells.push_back(1);
        }
        g.validate();
        return g;
    }

    arma::mat large_scale_gains(const SimulationConfig &cfg, const Geometry &geometry)
    {
        arma::mat g(geometry.ms_count(), geometry.bs_count());
        for (std::size_t m = 0; m < geometry.ms_count(); ++m)
            for (std::size_t b = 0; b < geometry.bs_count(); ++b)
                g(m, b) = large_scale_gain(m, b, geometry, cfg.noise_dl, cfg.p_d());
        return g;
    }

    bool inside_hexagon(const Point2 &p, const Point2 &c, double radius)
    {
        const double dx = std::abs(p.x - c.x);
        const double dy = std::abs(p.y - c.y);
        const double apothem = std::sqrt(3.0) / 2.0 * radius;
        return dx <= apothem && dy <= radius - dx / std::sqrt(3.0);
    }

    Geometry random_drop_geometry(const SimulationConfig &cfg, RngStream &rng)
    {
        cfg.validate();
        Geometry g = base_geometry(cfg);
        const double r = cfg.cell_radius_m;
        const double apothem = std::sqrt(3.0) / 2.0 * r;
        for (std::size_t b = 0; b < g.bs_count(); ++b)
        {
            const Point2 c = g.bs_positions[b];
            for (std::size_t i = 0; i < cfg.ms_per_cell; ++i)
            {
                Point2 p;
                do
                {
                    p = {c.x + rng.uniform(-apothem, apothem), c.y + rng.uniform(-r, r)};
                } while (!inside_hexagon(p, c, r) || distance(p, c) < cfg.min_distance_m);
                g.ms_positions.push_back(p);
                g.assigned_cells.push_back(b);
            }
        }
        g.validate();
        return g;
    }

    std::vector<TrainingSequence> assign_training(const SimulationConfig &cfg, const std::vector<std::size_t> &serving,
                                                  TrainingMode mode)
    {
        const std::size_t M = serving.size();
        const std::size_t K = cfg.subcarriers;
        std::vector<TrainingSequence> out;
        out.reserve(M);
        if (mode == TrainingMode::orthogonal)
        {
            const TrainingSequence base = zadoff_chu(cfg.zc_roots.at(0), cfg.zc_length, K);
            const long spacing = static_cast<long>(K / M);
            for (std::size_t m = 0; m < M; ++m)
                out.push_back(cyclic_shift(base, static_cast<long>(m) * spacing));
            return out;
        }
        std::vector<std::size_t> per_cell(cfg.bs_count, 0);
        for (std::size_t c : serving)
            ++per_cell.at(c);
        std::vector<std::size_t> index(cfg.bs_count, 0);
        for (std::size_t m = 0; m < M; ++m)
        {
            const std::size_t c = serving[m];
            const TrainingSequence base = zadoff_chu(cfg.zc_roots.at(c), cfg.zc_length, K);
            const long spacing = static_cast<long>(K / per_cell[c]);
            out.push_back(cyclic_shift(base, static_cast<long>(index[c]++) * spacing));
        }
        return out;
    }

    Scenario Scenario::build(const SimulationConfig &cfg, Geometry geometry, TrainingMode mode)
    {
        cfg.validate();
        geometry.validate();
        if (geometry.bs_count() != cfg.bs_count)
            throw InvalidParameter("geometry BS count does not match the configuration");

        Scenario s;
        s.config = cfg;
        s.mode = mode;
        s.pdp = build_pdp(cfg.pdp, cfg.taps, cfg.pdp_decay);
        s.ms_count = geometry.ms_count();
        s.bs_count = geometry.bs_count();
        s.antennas = cfg.antennas_per_bs;
        s.K = cfg.subcarriers;
        s.L = cfg.taps;
        s.p_u = cfg.p_u;
        s.p_d = cfg.p_d();
        s.noise_ul = cfg.noise_ul;
        s.noise_dl = cfg.noise_dl;

        s.serving.resize(s.ms_count);
        s.delays.assign(s.ms_count, std::vector<long>(s.bs_count, 0));
        for (std::size_t m = 0; m < s.ms_count; ++m)
        {
            s.serving[m] = geometry.serving_cell(m);
            for (std::size_t b = 0; b < s.bs_count; ++b)
            {
                s.delays[m][b] = delay_samples(propagation_delay(m, b, geometry), cfg.sample_period_s);
            }
        }
        // alpha^2 is pinned by the downlink SNR; the uplink SNR follows from p_u / noise_ul
        s.gains = large_scale_gains(cfg, geometry);
        s.geometry = std::move(geometry);
        s.sequences = assign_training(cfg, s.serving, mode);

        if (mode == TrainingMode::orthogonal)
            for (std::size_t b = 0; b < s.bs_count; ++b)
                if (s.cross_correlation(b) > 1e-9)
                    throw InvalidParameter("orthogonal training is not block-orthogonal at BS " + std::to_string(b) +
                                           ": shift spacing " + std::to_string(s.K / s.ms_count) +
                                           " is too small for L plus the delay spread");
        return s;
    }

    std::vector<double> Scenario::gains_at(std::size_t b) const
    {
        const arma::vec col = gains.col(b);
        return std::vector<double>(col.begin(), col.end());
    }

    std::vector<EquivalentTrainingMatrix> Scenario::training_blocks(std::size_t b) const
    {
        std::vector<EquivalentTrainingMatrix> out;
        out.reserve(ms_count);
        for (std::size_t m = 0; m < ms_count; ++m)
            out.push_back(equivalent_training_matrix(sequences[m], delays[m][b], L));
        return out;
    }

    arma::cx_mat Scenario::training_matrix(std::size_t b) const { return stack_training(training_blocks(b)); }

    closed_form::LinkBudget Scenario::budget(std::size_t b) const
    {
        closed_form::LinkBudget lb;
        lb.gains = gains_at(b);
        lb.p_u = p_u;
        lb.p_d = p_d;
        lb.noise_ul = noise_ul;
        lb.noise_dl = noise_dl;
        lb.K = K;
        lb.L = L;
        return lb;
    }

    double Scenario::cross_correlation(std::size_t b) const
    {
        const GramBlocks gram = gram_blocks(training_matrix(b), L);
        double worst = 0.0;
        for (std::size_t i = 0; i < ms_count; ++i)
            for (std::size_t j = 0; j < ms_count; ++j)
                if (i != j)
                    worst = std::max(worst, arma::abs(gram.block(i, j)).max());
        return worst / static_cast<double>(K);
    }
}
