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

#ifndef COMP_CSV_HPP
#define COMP_CSV_HPP

#include "comp/experiments.hpp"

#include <filesystem>
#include <ostream>
#include <string>

namespace comp
{
    // Header: snr_db,estimator,training_mode,link_class,metric,value,stderr,trials,seed,scenario_hash.
    // NaN fields are written empty.
    void write_csv(std::ostream &os, const ResultTable &table);

    // JSON provenance record: command, version, seed, scenario hash, configuration echo.
    std::string manifest_json(const ResultTable &table, const std::string &csv_name);

    struct OutputPaths
    {
        std::filesystem::path csv;
        std::filesystem::path manifest;
    };

    // Writes <dir>/<command>.csv and <dir>/<command>.manifest.json, creating dir if needed.
    OutputPaths write_outputs(const std::filesystem::path &dir, const ResultTable &table);
}

#endif
