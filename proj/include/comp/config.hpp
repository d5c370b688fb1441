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

#ifndef COMP_CONFIG_HPP
#define COMP_CONFIG_HPP

#include "comp/channel_model.hpp"
#include "comp/estimators.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace comp
{
    // Malformed configuration. line is 1-based, 0 when the problem is not tied to a line.
    class ConfigError : public std::runtime_error
    {
    public:
        ConfigError(const std::string &source, std::size_t line, const std::string &field, const std::string &what);

        std::size_t line() const { return line_; }
        const std::string &field() const { return field_; }

    private:
        std::size_t line_;
        std::string field_;
    };

    struct ConfigFileMissing : std::runtime_error
    {
        using std::runtime_error::runtime_error;
    };

    enum class TrainingMode
    {
        orthogonal,
        nonorthogonal
    };

    std::string_view to_string(TrainingMode mode);
    TrainingMode parse_training_mode(std::string_view name);

    // Every knob of a simulation run. Defaults reproduce the two-cell preset:
    // B = 2, N_t = 4, r = 250 m, K = 128, L = 20, T_s = 0.2 us, exponential PDP 1.4,
    // Zadoff-Chu N = 127 with roots 1 and 7, p_d 5 dB above p_u.
    struct SimulationConfig
    {
        std::size_t bs_count = 2;
        std::size_t antennas_per_bs = 4;
        std::size_t ms_per_cell = 2;

        double cell_radius_m = 250.0;
        double lateral_offset_m = 125.0;   // d3
        double pathloss_exponent = 3.76;
        double edge_snr_dl_db = 10.0;
        double min_distance_m = 35.0;      // random drops only

        double p_u = 1.0;
        double dl_ul_power_offset_db = 5.0;
        double noise_ul = 1.0;
        double noise_dl = 1.0;

        std::size_t subcarriers = 128;
        std::size_t taps = 20;
        double sample_period_s = 0.2e-6;

        PdpKind pdp = PdpKind::exponential;
        double pdp_decay = 1.4;

        int zc_length = 127;
        std::vector<int> zc_roots{1, 7};

        std::vector<double> snr_grid_db{5.0, 7.5, 10.0, 12.5, 15.0};
        std::vector<EstimatorKind> estimators{EstimatorKind::mmse, EstimatorKind::robust, EstimatorKind::ls};
        std::vector<TrainingMode> training_modes{TrainingMode::orthogonal, TrainingMode::nonorthogonal};

        std::uint64_t seed = 1;
        std::size_t trials = 1000;
        std::size_t rate_subcarrier = 0;
        bool full_band = false;
        bool include_noncomp = true;
        std::size_t drops = 1000;
        std::size_t drop_trials = 20;
        std::size_t workers = 0;  // 0 = hardware concurrency

        double p_d() const { return p_u * db_to_linear(dl_ul_power_offset_db); }

        // Uplink local SNR of a cell-edge MS implied by the downlink edge SNR.
        double edge_snr_ul_db() const;

        void validate(const std::string &source = "<config>") const;

        // Sorted "key = value" lines; the scenario hash is computed over this text.
        std::string canonical() const;
        std::string hash() const;
    };

    // Flat "key = value" format, '#' comments, one key per line, unknown keys rejected.
    SimulationConfig parse_config(std::istream &in, const std::string &source = "<config>");
    SimulationConfig load_config(const std::filesystem::path &path);

    // FNV-1a 64-bit, hex encoded.
    std::string fnv1a_hex(const std::string &text);
}

#endif
