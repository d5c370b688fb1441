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

#include "comp/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace comp
{
    ConfigError::ConfigError(const std::string &source, std::size_t line, const std::string &field,
                             const std::string &what)
        : std::runtime_error(source + (line ? ":" + std::to_string(line) : std::string()) +
                             (field.empty() ? std::string() : ": field '" + field + "'") + ": " + what),
          line_(line), field_(field)
    {
    }

    std::string_view to_string(TrainingMode mode)
    {
        return mode == TrainingMode::orthogonal ? "orthogonal" : "nonorthogonal";
    }

    TrainingMode parse_training_mode(std::string_view name)
    {
        if (name == "orthogonal" || name == "O")
            return TrainingMode::orthogonal;
        if (name == "nonorthogonal" || name == "NO")
            return TrainingMode::nonorthogonal;
        throw InvalidParameter("unknown training mode '" + std::string(name) + "'");
    }

    double SimulationConfig::edge_snr_ul_db() const
    {
        return edge_snr_dl_db + linear_to_db((p_u / noise_ul) / (p_d() / noise_dl));
    }

    void SimulationConfig::validate(const std::string &source) const
    {
        auto fail = [&source](const std::string &field, const std::string &what) {
            throw ConfigError(source, 0, field, what);
        };
        if (bs_count != 2)
            fail("bs_count", "only two-cell clusters are supported");
        if (antennas_per_bs == 0)
            fail("antennas_per_bs", "must be at least 1");
        if (ms_per_cell == 0)
            fail("ms_per_cell", "must be at least 1");
        if (!(cell_radius_m > 0.0))
            fail("cell_radius_m", "must be positive");
        if (!(lateral_offset_m > 0.0) || lateral_offset_m > cell_radius_m)
            fail("lateral_offset_m", "must lie in (0, cell_radius_m]");
        if (!(pathloss_exponent >= 0.0))
            fail("pathloss_exponent", "must be nonnegative");
        if (!(min_distance_m > 0.0) || min_distance_m >= cell_radius_m)
            fail("min_distance_m", "must lie in (0, cell_radius_m)");
        if (!(p_u > 0.0))
            fail("p_u", "must be positive");
        if (!(noise_ul > 0.0))
            fail("noise_ul", "must be positive");
        if (!(noise_dl > 0.0))
            fail("noise_dl", "must be positive");
        if (taps == 0 || taps > subcarriers)
            fail("taps", "must satisfy 1 <= taps <= subcarriers");
        if (!(sample_period_s > 0.0))
            fail("sample_period_s", "must be positive");
        if (pdp == PdpKind::exponential && !(pdp_decay >= 1.0))
            fail("pdp_decay", "must be >= 1");
        if (zc_length < 2 || static_cast<std::size_t>(zc_length) > subcarriers)
            fail("zc_length", "must satisfy 2 <= zc_length <= subcarriers");
        if (zc_roots.size() < bs_count)
            fail("zc_roots", "need one root per cell");
        for (int c : zc_roots)
            if (c < 1 || c >= zc_length)
                fail("zc_roots", "roots must satisfy 1 <= c < zc_length");
        if (snr_grid_db.empty())
            fail("snr_grid_db", "must not be empty");
        if (estimators.empty())
            fail("estimators", "must not be empty");
        if (training_modes.empty())
            fail("training_modes", "must not be empty");
        if (trials == 0)
            fail("trials", "must be at least 1");
        if (rate_subcarrier >= subcarriers)
            fail("rate_subcarrier", "must be below subcarriers");
        if (drops == 0)
            fail("drops", "must be at least 1");
        if (drop_trials == 0)
            fail("drop_trials", "must be at least 1");
    }

    namespace
    {
        std::string fmt_double(double v)
        {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            return buf;
        }

        template <typename T, typename F>
        std::string join(const std::vector<T> &xs, F &&f)
        {
            std::string out;
            for (std::size_t i = 0; i < xs.size(); ++i)
            {
                if (i)
                    out += ",";
                out += f(xs[i]);
            }
            return out;
        }

        std::string trim(std::string_view s)
        {
            const auto b = s.find_first_not_of(" \t\r");
            if (b == std::string_view::npos)
                return {};
            const auto e = s.find_last_not_of(" \t\r");
            return std::string(s.substr(b, e - b + 1));
        }

        std::vector<std::string> split_list(const std::string &s)
        {
            std::vector<std::string> out;
            std::stringstream ss(s);
            std::string item;
            while (std::getline(ss, item, ','))
            {
                item = trim(item);
                if (!item.empty())
                    out.push_back(item);
            }
            return out;
        }

        double to_double(const std::string &s)
        {
            std::size_t pos = 0;
            const double v = std::stod(s, &pos);
            if (pos != s.size())
                throw std::invalid_argument("trailing characters");
            return v;
        }

        std::uint64_t to_u64(const std::string &s)
        {
            std::uint64_t v = 0;
            const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (ec != std::errc() || p != s.data() + s.size())
                throw std::invalid_argument("not a nonnegative integer");
            return v;
        }

        bool to_bool(const std::string &s)
        {
            if (s == "true" || s == "1" || s == "yes")
                return true;
            if (s == "false" || s == "0" || s == "no")
                return false;
            throw std::invalid_argument("not a boolean");
        }

        using Setter = std::function<void(SimulationConfig &, const std::string &)>;

        const std::map<std::string, Setter> &setters()
        {
            static const std::map<std::string, Setter> table = {
                {"bs_count", [](auto &c, auto &v) { c.bs_count = to_u64(v); }},
                {"antennas_per_bs", [](auto &c, auto &v) { c.antennas_per_bs = to_u64(v); }},
                {"ms_per_cell", [](auto &c, auto &v) { c.ms_per_cell = to_u64(v); }},
                {"cell_radius_m", [](auto &c, auto &v) { c.cell_radius_m = to_double(v); }},
                {"lateral_offset_m", [](auto &c, auto &v) { c.lateral_offset_m = to_double(v); }},
                {"pathloss_exponent", [](auto &c, auto &v) { c.pathloss_exponent = to_double(v); }},
                {"edge_snr_dl_db", [](auto &c, auto &v) { c.edge_snr_dl_db = to_double(v); }},
                {"min_distance_m", [](auto &c, auto &v) { c.min_distance_m = to_double(v); }},
                {"p_u", [](auto &c, auto &v) { c.p_u = to_double(v); }},
                {"dl_ul_power_offset_db", [](auto &c, auto &v) { c.dl_ul_power_offset_db = to_double(v); }},
                {"noise_ul", [](auto &c, auto &v) { c.noise_ul = to_double(v); }},
                {"noise_dl", [](auto &c, auto &v) { c.noise_dl = to_double(v); }},
                {"subcarriers", [](auto &c, auto &v) { c.subcarriers = to_u64(v); }},
                {"taps", [](auto &c, auto &v) { c.taps = to_u64(v); }},
                {"sample_period_s", [](auto &c, auto &v) { c.sample_period_s = to_double(v); }},
                {"pdp",
                 [](auto &c, auto &v) {
                     if (v == "uniform")
                         c.pdp = PdpKind::uniform;
                     else if (v == "exponential")
                         c.pdp = PdpKind::exponential;
                     else
                         throw std::invalid_argument("expected 'uniform' or 'exponential'");
                 }},
                {"pdp_decay", [](auto &c, auto &v) { c.pdp_decay = to_double(v); }},
                {"zc_length", [](auto &c, auto &v) { c.zc_length = static_cast<int>(to_u64(v)); }},
                {"zc_roots",
                 [](auto &c, auto &v) {
                     c.zc_roots.clear();
                     for (const auto &x : split_list(v))
                         c.zc_roots.push_back(static_cast<int>(to_u64(x)));
                 }},
                {"snr_grid_db",
                 [](auto &c, auto &v) {
                     c.snr_grid_db.clear();
                     for (const auto &x : split_list(v))
                         c.snr_grid_db.push_back(to_double(x));
                 }},
                {"estimators",
                 [](auto &c, auto &v) {
                     c.estimators.clear();
                     for (const auto &x : split_list(v))
                         c.estimators.push_back(parse_estimator(x));
                 }},
                {"training_modes",
                 [](auto &c, auto &v) {
                     c.training_modes.clear();
                     for (const auto &x : split_list(v))
                         c.training_modes.push_back(parse_training_mode(x));
                 }},
                {"seed", [](auto &c, auto &v) { c.seed = to_u64(v); }},
                {"trials", [](auto &c, auto &v) { c.trials = to_u64(v); }},
                {"rate_subcarrier", [](auto &c, auto &v) { c.rate_subcarrier = to_u64(v); }},
                {"full_band", [](auto &c, auto &v) { c.full_band = to_bool(v); }},
                {"include_noncomp", [](auto &c, auto &v) { c.include_noncomp = to_bool(v); }},
                {"drops", [](auto &c, auto &v) { c.drops = to_u64(v); }},
                {"drop_trials", [](auto &c, auto &v) { c.drop_trials = to_u64(v); }},
                {"workers", [](auto &c, auto &v) { c.workers = to_u64(v); }},
            };
            return table;
        }
    }

    std::string SimulationConfig::canonical() const
    {
        std::map<std::string, std::string> kv;
        kv["bs_count"] = std::to_string(bs_count);
        kv["antennas_per_bs"] = std::to_string(antennas_per_bs);
        kv["ms_per_cell"] = std::to_string(ms_per_cell);
        kv["cell_radius_m"] = fmt_double(cell_radius_m);
        kv["lateral_offset_m"] = fmt_double(lateral_offset_m);
        kv["pathloss_exponent"] = fmt_double(pathloss_exponent);
        kv["edge_snr_dl_db"] = fmt_double(edge_snr_dl_db);
        kv["min_distance_m"] = fmt_double(min_distance_m);
        kv["p_u"] = fmt_double(p_u);
        kv["dl_ul_power_offset_db"] = fmt_double(dl_ul_power_offset_db);
        kv["noise_ul"] = fmt_double(noise_ul);
        kv["noise_dl"] = fmt_double(noise_dl);
        kv["subcarriers"] = std::to_string(subcarriers);
        kv["taps"] = std::to_string(taps);
        kv["sample_period_s"] = fmt_double(sample_period_s);
        kv["pdp"] = pdp == PdpKind::uniform ? "uniform" : "exponential";
        kv["pdp_decay"] = fmt_double(pdp_decay);
        kv["zc_length"] = std::to_string(zc_length);
        kv["zc_roots"] = join(zc_roots, [](int c) { return std::to_string(c); });
        kv["snr_grid_db"] = join(snr_grid_db, fmt_double);
        kv["estimators"] = join(estimators, [](EstimatorKind k) { return std::string(to_string(k)); });
        kv["training_modes"] = join(training_modes, [](TrainingMode m) { return std::string(to_string(m)); });
        kv["seed"] = std::to_string(seed);
        kv["trials"] = std::to_string(trials);
        kv["rate_subcarrier"] = std::to_string(rate_subcarrier);
        kv["full_band"] = full_band ? "true" : "false";
        kv["include_noncomp"] = include_noncomp ? "true" : "false";
        kv["drops"] = std::to_string(drops);
        kv["drop_trials"] = std::to_string(drop_trials);
        // workers only affects scheduling, never results, so it stays out of the hash
        std::string out;
        for (const auto &[k, v] : kv)
            out += k + " = " + v + "\n";
        return out;
    }

    std::string fnv1a_hex(const std::string &text)
    {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (unsigned char c : text)
        {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        char buf[17];
        std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
        return buf;
    }

    std::string SimulationConfig::hash() const { return fnv1a_hex(canonical()); }

    SimulationConfig parse_config(std::istream &in, const std::string &source)
    {
        SimulationConfig cfg;
        std::set<std::string> seen;
        std::string raw;
        std::size_t line_no = 0;
        while (std::getline(in, raw))
        {
            ++line_no;
            const auto hash_pos = raw.find('#');
            const std::string line = trim(hash_pos == std::string::npos ? raw : raw.substr(0, hash_pos));
            if (line.empty())
                continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError(source, line_no, "", "expected 'key = value'");
            const std::string key = trim(line.substr(0, eq));
            const std::string value = trim(line.substr(eq + 1));
            if (key.empty())
                throw ConfigError(source, line_no, "", "missing key");
            const auto it = setters().find(key);
            if (it == setters().end())
                throw ConfigError(source, line_no, key, "unknown key");
            if (!seen.insert(key).second)
                throw ConfigError(source, line_no, key, "duplicate key");
            if (value.empty())
                throw ConfigError(source, line_no, key, "missing value");
            try
            {
                it->second(cfg, value);
            }
            catch (const std::exception &e)
            {
                throw ConfigError(source, line_no, key, "invalid value '" + value + "' (" + e.what() + ")");
            }
        }
        cfg.validate(source);
        return cfg;
    }

    SimulationConfig load_config(const std::filesystem::path &path)
    {
        std::ifstream in(path);
        if (!in)
            throw ConfigFileMissing("cannot open config file: " + path.string());
        return parse_config(in, path.string());
    }
}
