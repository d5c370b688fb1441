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
#include "comp/csv.hpp"
#include "comp/experiments.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace
{
    struct Options
    {
        std::string config;
        std::string out = "results";
        std::uint64_t seed = 0;
        std::size_t trials = 0;
        std::size_t workers = 0;
        bool has_seed = false;
        bool has_trials = false;
    };

    void add_common(CLI::App *cmd, Options &o)
    {
        cmd->add_option("--config", o.config, "Scenario config file (key = value)");
        cmd->add_option("--out", o.out, "Output directory")->capture_default_str();
        cmd->add_option("--seed", o.seed, "Master seed, overrides the config");
        cmd->add_option("--trials", o.trials, "Monte-Carlo trials per point, overrides the config");
        cmd->add_option("--workers", o.workers, "Worker threads, 0 = all cores");
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"Link-level simulator for cooperative two-cell MIMO-OFDM channel estimation"};
    app.set_version_flag("--version", COMP_VERSION);
    app.require_subcommand(1);

    Options o;
    auto *mse = app.add_subcommand("mse-sweep", "Estimation MSE/NMSE against local uplink SNR");
    auto *rate = app.add_subcommand("rate-sweep", "Achieved and ideal ZF rates with rate-loss bounds");
    auto *drops = app.add_subcommand("drops", "Per-MS throughput over random MS drops");
    auto *validate = app.add_subcommand("validate", "Monte-Carlo versus closed-form consistency checks");
    for (auto *cmd : {mse, rate, drops, validate})
        add_common(cmd, o);

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        return app.exit(e);
    }
    for (auto *cmd : {mse, rate, drops, validate})
    {
        o.has_seed = o.has_seed || cmd->count("--seed") > 0;
        o.has_trials = o.has_trials || cmd->count("--trials") > 0;
    }

    comp::SimulationConfig cfg;
    try
    {
        if (!o.config.empty())
            cfg = comp::load_config(o.config);
        if (o.has_seed)
            cfg.seed = o.seed;
        if (o.has_trials)
            cfg.trials = o.trials;
        cfg.workers = o.workers;
        cfg.validate(o.config.empty() ? "<defaults>" : o.config);
    }
    catch (const comp::ConfigFileMissing &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    try
    {
        comp::ResultTable table;
        int status = 0;
        if (*mse)
            table = comp::run_mse_sweep(cfg);
        else if (*rate)
            table = comp::run_rate_sweep(cfg);
        else if (*drops)
            table = comp::run_random_drops(cfg);
        else
        {
            const auto checks = comp::run_validation(cfg);
            std::size_t failed = 0;
            for (const auto &c : checks)
            {
                if (!c.passed)
                {
                    ++failed;
                    std::cout << "FAIL " << c.name << " value=" << c.value << " reference=" << c.reference
                              << " tolerance=" << c.tolerance << "\n";
                }
            }
            std::cout << checks.size() - failed << "/" << checks.size() << " checks passed\n";
            table = comp::validation_table(cfg, checks);
            status = failed == 0 ? 0 : 1;
        }
        const auto paths = comp::write_outputs(o.out, table);
        std::cout << "wrote " << paths.csv.string() << " (" << table.rows.size() << " rows)\n";
        return status;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
