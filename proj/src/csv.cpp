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

#include "comp/csv.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace comp
{
    namespace
    {
        std::string num(double v)
        {
            if (std::isnan(v))
                return {};
            char buf[40];
            std::snprintf(buf, sizeof(buf), "%.12g", v);
            return buf;
        }

        std::string field(const std::string &s)
        {
            if (s.find_first_of(",\"\n") == std::string::npos)
                return s;
            std::string out = "\"";
            for (char c : s)
            {
                if (c == '"')
                    out += '"';
                out += c;
            }
            return out + "\"";
        }
    }

    void write_csv(std::ostream &os, const ResultTable &t)
    {
        os << "snr_db,estimator,training_mode,link_class,metric,value,stderr,trials,seed,scenario_hash\n";
        for (const auto &r : t.rows)
            os << num(r.snr_db) << ',' << field(r.estimator) << ',' << field(r.training_mode) << ','
               << field(r.link_class) << ',' << field(r.metric) << ',' << num(r.value) << ','
               << num(r.stderr_value) << ',' << r.trials << ',' << t.seed << ',' << t.scenario_hash << '\n';
    }

    std::string manifest_json(const ResultTable &t, const std::string &csv_name)
    {
        nlohmann::ordered_json j;
        j["command"] = t.command;
        j["version"] = COMP_VERSION;
        j["seed"] = t.seed;
        j["scenario_hash"] = t.scenario_hash;
        j["csv"] = csv_name;
        j["rows"] = t.rows.size();
        nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
        std::istringstream in(t.config_echo);
        std::string line;
        while (std::getline(in, line))
        {
            const auto eq = line.find(" = ");
            if (eq != std::string::npos)
                cfg[line.substr(0, eq)] = line.substr(eq + 3);
        }
        j["config"] = cfg;
        return j.dump(2) + "\n";
    }

    OutputPaths write_outputs(const std::filesystem::path &dir, const ResultTable &t)
    {
        std::filesystem::create_directories(dir);
        OutputPaths p{dir / (t.command + ".csv"), dir / (t.command + ".manifest.json")};
        {
            std::ofstream os(p.csv);
            if (!os)
                throw std::runtime_error("cannot write " + p.csv.string());
            write_csv(os, t);
        }
        std::ofstream os(p.manifest);
        if (!os)
            throw std::runtime_error("cannot write " + p.manifest.string());
        os << manifest_json(t, p.csv.filename().string());
        return p;
    }
}
