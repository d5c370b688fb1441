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

#include "comp/channel_model.hpp"

#include <cmath>
#include <numeric>

namespace comp
{
    void PowerDelayProfile::validate() const
    {
        if (variances.empty())
            throw InvalidParameter("PDP must have at least one tap");
        double sum = 0.0;
        for (double v : variances)
        {
            if (!(v >= 0.0))
                throw InvalidParameter("PDP variances must be nonnegative");
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-12)
            throw InvalidParameter("PDP variances must sum to 1");
    }

    PowerDelayProfile build_pdp(PdpKind kind, std::size_t taps, double decay)
    {
        if (taps == 0)
            throw InvalidParameter("PDP tap count must be at least 1");

        PowerDelayProfile pdp;
        pdp.variances.assign(taps, 1.0 / static_cast<double>(taps));
        if (kind == PdpKind::uniform)
            return pdp;

        if (!(decay >= 1.0))
            throw InvalidParameter("exponential PDP decay factor must be >= 1");

        double v = 1.0;
        for (std::size_t l = 0; l < taps; ++l)
        {
            pdp.variances[l] = v;
            v /= decay;
        }
        const double sum = std::accumulate(pdp.variances.begin(), pdp.variances.end(), 0.0);
        for (double &x : pdp.variances)
            x /= sum;
        return pdp;
    }

    double distance(const Point2 &a, const Point2 &b)
    {
        return std::hypot(a.x - b.x, a.y - b.y);
    }

    double Geometry::link_distance(std::size_t m, std::size_t b) const
    {
        if (m >= ms_positions.size() || b >= bs_positions.size())
            throw InvalidParameter("MS or BS index out of range");
        return distance(ms_positions[m], bs_positions[b]);
    }

    std::size_t Geometry::serving_cell(std::size_t m) const
    {
        if (bs_positions.empty())
            throw InvalidParameter("geometry has no base stations");
        if (!assigned_cells.empty())
            return assigned_cells.at(m);
        std::size_t best = 0;
        double best_d = link_distance(m, 0);
        for (std::size_t b = 1; b < bs_positions.size(); ++b)
        {
            const double d = link_distance(m, b);
            if (d < best_d)
            {
                best = b;
                best_d = d;
            }
        }
        return best;
    }

    void Geometry::validate() const
    {
        if (!(cell_radius > 0.0))
            throw InvalidParameter("cell radius must be positive");
        if (bs_positions.empty() || ms_positions.empty())
            throw InvalidParameter("geometry needs at least one BS and one MS");
        if (!assigned_cells.empty())
        {
            if (assigned_cells.size() != ms_positions.size())
                throw InvalidParameter("assigned_cells must have one entry per MS");
            for (std::size_t c : assigned_cells)
                if (c >= bs_positions.size())
                    throw InvalidParameter("assigned cell index out of range");
        }
        for (std::size_t m = 0; m < ms_positions.size(); ++m)
            for (std::size_t b = 0; b < bs_positions.size(); ++b)
                if (!(link_distance(m, b) > 0.0))
                    throw InvalidParameter("MS " + std::to_string(m) + " coincides with BS " + std::to_string(b));
    }

    double snr_at_distance(double d, const Geometry &geometry)
    {
        if (!(d > 0.0))
            throw InvalidParameter("distance must be positive");
        return geometry.edge_snr_db + geometry.pathloss_exponent * 10.0 * std::log10(geometry.cell_radius / d);
    }

    double large_scale_gain(std::size_t m, std::size_t b, const Geometry &geometry,
                            double ref_noise_power, double ref_tx_power)
    {
        if (!(ref_noise_power > 0.0) || !(ref_tx_power > 0.0))
            throw InvalidParameter("reference powers must be positive");
        const double snr_lin = db_to_linear(snr_at_distance(geometry.link_distance(m, b), geometry));
        return snr_lin * ref_noise_power / ref_tx_power;
    }

    long delay_samples(double delay_s, double sample_period_s)
    {
        if (!(sample_period_s > 0.0))
            throw InvalidParameter("sample period must be positive");
        return std::lround(delay_s / sample_period_s);
    }

    double propagation_delay(std::size_t m, std::size_t b, const Geometry &geometry)
    {
        return geometry.link_distance(m, b) / geometry.speed_of_light;
    }

    arma::cx_vec draw_small_scale_cir(const PowerDelayProfile &pdp, RngStream &rng)
    {
        arma::cx_vec taps(pdp.taps());
        for (std::size_t l = 0; l < pdp.taps(); ++l)
            taps(l) = rng.complex_normal(pdp.variances[l]);
        return taps;
    }

    CompositeCir CompositeCir::compose(const arma::cx_vec &small_scale, double alpha, double delay_s)
    {
        if (!(alpha >= 0.0))
            throw InvalidParameter("large-scale amplitude must be nonnegative");
        return CompositeCir{alpha * small_scale, alpha, delay_s};
    }

    arma::cx_mat fourier_columns(std::size_t K, std::size_t L)
    {
        if (L > K)
            throw InvalidParameter("tap count L exceeds subcarrier count K");
        arma::cx_mat F(K, L);
        for (std::size_t l = 0; l < L; ++l)
            for (std::size_t k = 0; k < K; ++k)
            {
                // reduce the exponent mod K before forming the angle
                const double phase = -2.0 * pi * static_cast<double>((l * k) % K) / static_cast<double>(K);
                F(k, l) = std::polar(1.0, phase);
            }
        return F;
    }

    arma::cx_vec delay_phase(std::size_t K, double shift_samples)
    {
        arma::cx_vec psi(K);
        for (std::size_t k = 0; k < K; ++k)
            psi(k) = std::polar(1.0, -2.0 * pi * shift_samples * static_cast<double>(k) / static_cast<double>(K));
        return psi;
    }

    CompositeCfr cir_to_cfr(const CompositeCir &cir, std::size_t K, double sample_period_s)
    {
        const std::size_t L = cir.taps.n_elem;
        if (L > K)
            throw InvalidParameter("tap count L exceeds subcarrier count K");
        const double shift = static_cast<double>(delay_samples(cir.delay_s, sample_period_s));
        const arma::cx_vec psi = delay_phase(K, shift);
        return CompositeCfr{psi % (fourier_columns(K, L) * cir.taps)};
    }
}
