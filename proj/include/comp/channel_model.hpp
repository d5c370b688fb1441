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

#ifndef COMP_CHANNEL_MODEL_HPP
#define COMP_CHANNEL_MODEL_HPP

#include "comp/common.hpp"
#include "comp/rng.hpp"

#include <cstddef>
#include <vector>

namespace comp
{
    enum class PdpKind
    {
        uniform,
        exponential
    };

    // Per-tap variances of the small-scale tapped-delay-line channel. Sums to 1.
    struct PowerDelayProfile
    {
        std::vector<double> variances;

        std::size_t taps() const { return variances.size(); }
        void validate() const;
    };

    // Uniform: every tap 1/L. Exponential: variance(l) proportional to decay^(-l).
    PowerDelayProfile build_pdp(PdpKind kind, std::size_t taps, double decay = 1.0);

    struct Point2
    {
        double x = 0.0;
        double y = 0.0;
    };

    double distance(const Point2 &a, const Point2 &b);

    struct Geometry
    {
        double cell_radius = 250.0;        // meters
        std::vector<Point2> bs_positions;  // meters
        std::vector<Point2> ms_positions;  // meters
        double pathloss_exponent = 3.76;
        double edge_snr_db = 10.0;         // receive SNR of a cell-edge MS
        double speed_of_light = 299792458.0;
        // Optional explicit MS-to-cell assignment; empty means nearest BS.
        std::vector<std::size_t> assigned_cells;

        std::size_t bs_count() const { return bs_positions.size(); }
        std::size_t ms_count() const { return ms_positions.size(); }

        double link_distance(std::size_t m, std::size_t b) const;

        // assigned_cells[m] when set, otherwise the nearest BS with ties to the lower index.
        std::size_t serving_cell(std::size_t m) const;

        // Throws when any MS-BS distance is not strictly positive.
        void validate() const;
    };

    // SNR(d) = SNR_edge + eps * 10 log10(r / d).
    double snr_at_distance(double d, const Geometry &geometry);

    // alpha^2_{m,b} chosen so that alpha^2 * ref_tx_power / ref_noise_power equals
    // the linear SNR at the link distance. Deterministic, no shadowing.
    double large_scale_gain(std::size_t m, std::size_t b, const Geometry &geometry,
                            double ref_noise_power, double ref_tx_power);

    // Propagation delay d / c, quantized to the nearest whole sample.
    long delay_samples(double delay_s, double sample_period_s);
    double propagation_delay(std::size_t m, std::size_t b, const Geometry &geometry);

    // Independent CN(0, variance_l) taps.
    arma::cx_vec draw_small_scale_cir(const PowerDelayProfile &pdp, RngStream &rng);

    struct CompositeCir
    {
        arma::cx_vec taps;              // alpha * small-scale taps
        double large_scale_gain = 1.0;  // amplitude alpha (linear)
        double delay_s = 0.0;

        static CompositeCir compose(const arma::cx_vec &small_scale, double alpha, double delay_s);
    };

    struct CompositeCfr
    {
        arma::cx_vec values;
    };

    // First L columns of the unnormalized K-point DFT matrix, entry exp(-j2pi l k / K).
    arma::cx_mat fourier_columns(std::size_t K, std::size_t L);

    // Diagonal of Phi: exp(-j 2pi/K * shift * k).
    arma::cx_vec delay_phase(std::size_t K, double shift_samples);

    // value(k) = psi(k) * sum_l taps(l) exp(-j2pi l k / K).
    CompositeCfr cir_to_cfr(const CompositeCir &cir, std::size_t K, double sample_period_s);
}

#endif
