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

#ifndef COMP_PARALLEL_HPP
#define COMP_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <type_traits>
#include <vector>

namespace comp
{
    inline std::size_t resolve_workers(std::size_t requested)
    {
        if (requested > 0)
            return requested;
        return std::max<std::size_t>(1, std::thread::hardware_concurrency());
    }

    // out[i] = f(i) for i in [0, n). Results land by index, so any reduction done over
    // the returned vector is independent of the worker count.
    template <typename F>
    auto parallel_map(std::size_t n, std::size_t workers, F &&f) -> std::vector<std::invoke_result_t<F &, std::size_t>>
    {
        using T = std::invoke_result_t<F &, std::size_t>;
        std::vector<T> out(n);
        workers = std::min(resolve_workers(workers), std::max<std::size_t>(n, 1));
        if (workers <= 1)
        {
            for (std::size_t i = 0; i < n; ++i)
                out[i] = f(i);
            return out;
        }
        std::atomic<std::size_t> next{0};
        std::exception_ptr error;
        std::mutex error_mutex;
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++)
                {
                    try
                    {
                        out[i] = f(i);
                    }
                    catch (...)
                    {
                        std::lock_guard lock(error_mutex);
                        if (!error)
                            error = std::current_exception();
                        next = n;
                    }
                }
            });
        for (auto &t : pool)
            t.join();
        if (error)
            std::rethrow_exception(error);
        return out;
    }
}

#endif
