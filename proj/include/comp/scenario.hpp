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

#ifndef COMP_SCENARIO_HPP
#define COMP_SCENARIO_HPP

#include "comp/channel_model.hpp"
#include "comp/closed_form.hpp"
#include "comp/config.hpp"
#include "comp/rng.hpp"
#include "comp/training.hpp"

#include <cstddef>
#include <vector>

namespace comp
{
    // Two-cell layout: BS 0 at the origin, BS 1 one inter-site distance sqrt(3) r away
    // on the x axis. Cells are pointy-top hexagons sharing the edge x = sqrt(3) r / 2.
    double inter_site_distance(const SimulationConfig &cfg);

    // Highest local uplink SNR the symmetric layout can reach (MS at lateral offset d3).
    double max_local_snr_ul_db(const SimulationConfig &cfg);

    // MSs at distance d1 from their own BS, d1 = r 10^(-(SNR - SNR_edge) / (10 eps)),
    // mirrored across the cell boundary. With two MSs per cell they sit at y = +d3 and
    // y = -d3; with one MS per cell only at y = +d3. At the edge SNR each MS is on the
    // shared hexagon vertex, equidistant from both BSs. MS order is cell-major.
    // Throws InfeasibleGeometry outside [edge SNR, max_local_snr_ul_db].
    Geometry symmetric_geometry(const SimulationConfig &cfg, double local_snr_ul_db);

    // ms_per_cell MSs dropped uniformly in each hexagon, at least min_distance_m from
    // their own BS.
    Geometry random_drop_geometry(const SimulationConfig &cfg, RngStream &rng);

    // alpha^2_{m,b} (M x B) for a layout, pinned by the downlink SNR at p_d.
    arma::mat large_scale_gains(const SimulationConfig &cfg, const Geometry &geometry);

    bool inside_hexagon(const Point2 &p, const Point2 &center, double radius);

    // Orthogonal: all MSs share root zc_roots[0] with shifts m * floor(K / M).
    // Non-orthogonal: cell c uses root zc_roots[c], its MSs shifted by i * floor(K / M_c).
    std::vector<TrainingSequence> assign_training(const SimulationConfig &cfg,
                                                  const std::vector<std::size_t> &serving, TrainingMode mode);

    // Everything deterministic about one simulated layout.
    struct Scenario
    {
        SimulationConfig config;
        Geometry geometry;
        TrainingMode mode = TrainingMode::orthogonal;
        PowerDelayProfile pdp;

        std::size_t ms_count = 0;
        std::size_t bs_count = 0;
        std::size_t antennas = 0;
        std::size_t K = 0;
        std::size_t L = 0;
        double p_u = 1.0;
        double p_d = 1.0;
        double noise_ul = 1.0;
        double noise_dl = 1.0;

        std::vector<std::size_t> serving;           // c_m
        arma::mat gains;                            // alpha^2_{m,b}, M x B
        std::vector<std::vector<long>> delays;      // tau_{m,b} in samples
        std::vector<TrainingSequence> sequences;    // one per MS

        // Throws InvalidParameter when the orthogonal mode does not yield block-orthogonal
        // training at every BS (delay spread too wide for the shift spacing).
        static Scenario build(const SimulationConfig &cfg, Geometry geometry, TrainingMode mode);

        std::vector<double> gains_at(std::size_t b) const;
        std::vector<EquivalentTrainingMatrix> training_blocks(std::size_t b) const;
        arma::cx_mat training_matrix(std::size_t b) const;
        closed_form::LinkBudget budget(std::size_t b) const;
        bool is_local(std::size_t m, std::size_t b) const { return serving[m] == b; }

        // Largest off-diagonal Gram block, relative to K.
        double cross_correlation(std::size_t b) const;
    };
}

#endif
