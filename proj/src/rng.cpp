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

#include "comp/rng.hpp"

namespace comp
{
    std::uint64_t mix64(std::uint64_t x)
    {
        x += 0x9E3779B97F4A7C15ULL;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
        return x ^ (x >> 31);
    }

    RngStream RngStream::derive(std::uint64_t master_seed, std::uint64_t trial, std::uint64_t link)
    {
        std::uint64_t key = mix64(master_seed);
        key = mix64(key ^ (trial * 0xD6E8FEB86659FD93ULL));
        key = mix64(key ^ (link * 0xA0761D6478BD642FULL));
        return RngStream(key);
    }

    cplx RngStream::complex_normal(double variance)
    {
        if (variance <= 0.0)
            return {0.0, 0.0};
        std::normal_distribution<double> n(0.0, std::sqrt(variance / 2.0));
        const double re = n(engine_);
        const double im = n(engine_);
        return {re, im};
    }

    arma::cx_vec RngStream::complex_normal(arma::uword n, double variance)
    {
        arma::cx_vec out(n, arma::fill::zeros);
        if (variance <= 0.0)
            return out;
        std::normal_distribution<double> dist(0.0, std::sqrt(variance / 2.0));
        for (arma::uword i = 0; i < n; ++i)
        {
            const double re = dist(engine_);
            const double im = dist(engine_);
            out(i) = cplx(re, im);
        }
        return out;
    }

    double RngStream::uniform(double lo, double hi)
    {
        std::uniform_real_distribution<double> u(lo, hi);
        return u(engine_);
    }
}
