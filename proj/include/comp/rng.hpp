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

#ifndef COMP_RNG_HPP
#define COMP_RNG_HPP

#include "comp/common.hpp"

#include <cstdint>
#include <random>

namespace comp
{
    // Seeded random stream. Streams are keyed by (master seed, trial index, link index)
    // so that any trial can be regenerated independently of scheduling order.
    class RngStream
    {
    public:
        explicit RngStream(std::uint64_t seed) : engine_(seed) {}

        static RngStream derive(std::uint64_t master_seed, std::uint64_t trial, std::uint64_t link);

        // Circularly-symmetric complex Gaussian with E{|x|^2} = variance.
        cplx complex_normal(double variance);
        arma::cx_vec complex_normal(arma::uword n, double variance);

        double uniform(double lo, double hi);

        std::mt19937_64 &engine() { return engine_; }

    private:
        std::mt19937_64 engine_;
    };

    // SplitMix64 finalizer, used to decorrelate nearby keys.
    std::uint64_t mix64(std::uint64_t x);
}

#endif
