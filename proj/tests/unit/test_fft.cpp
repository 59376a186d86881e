// SPDX-License-Identifier: Apache-2.0
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

#include "doctest.h"

#include <thread>

#include "dfrc/fft.hpp"
#include "../oracles.hpp"

using namespace dfrc;

TEST_SUITE("fft")
{
    TEST_CASE("forward transform matches the direct DFT")
    {
        std::mt19937_64 rng(1);
        for (std::size_t n : {1u, 2u, 7u, 50u, 178u, 539u})
        {
            const auto x = oracle::random_complex(n, rng);
            CHECK(oracle::rel_diff(fft::forward(x), oracle::dft(x, n)) <= 1e-12);
        }
        // Zero padding to a longer length.
        const auto x = oracle::random_complex(5, rng);
        CHECK(oracle::rel_diff(fft::forward(x, 12), oracle::dft(x, 12)) <= 1e-12);
    }

    TEST_CASE("inverse undoes forward")
    {
        std::mt19937_64 rng(2);
        const auto x = oracle::random_complex(97, rng);
        CHECK(oracle::rel_diff(fft::inverse(fft::forward(x)), x) <= 1e-13);
        auto y = x;
        fft::forward_inplace(y);
        fft::inverse_inplace(y);
        CHECK(oracle::rel_diff(y, x) <= 1e-13);
    }

    TEST_CASE("fast convolutions match direct sums")
    {
        std::mt19937_64 rng(3);
        const auto a = oracle::random_complex(37, rng);
        const auto b = oracle::random_complex(11, rng);
        CHECK(oracle::rel_diff(fft::convolve(a, b), oracle::conv(a, b)) <= 1e-12);
        CHECK(oracle::rel_diff(fft::circular_convolve(a, b, 40), oracle::cconv(a, b, 40)) <= 1e-12);

        const fft::Convolver lin(b, 64, fft::Convolver::Mode::linear);
        CHECK(oracle::rel_diff(lin.apply(a), oracle::conv(a, b)) <= 1e-12);
        const auto taps = oracle::random_complex(45, rng);
        const fft::Convolver circ(taps, 45, fft::Convolver::Mode::circular);
        CHECK(oracle::rel_diff(circ.apply(a), oracle::cconv(a, taps, 45)) <= 1e-12);
    }

    TEST_CASE("good sizes are not smaller than the request")
    {
        for (std::size_t n : {1u, 17u, 539u, 1000u, 4097u})
            CHECK(fft::good_size(n) >= n);
    }

    TEST_CASE("concurrent transforms agree with serial ones")
    {
        std::mt19937_64 rng(4);
        const auto x = oracle::random_complex(333, rng);
        const auto ref = fft::forward(x);
        std::vector<double> err(4, 1.0);
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < 4; ++t)
            pool.emplace_back([&, t] {
                double worst = 0.0;
                for (int i = 0; i < 50; ++i)
                    worst = std::max(worst, oracle::rel_diff(fft::forward(x), ref));
                err[t] = worst;
            });
        for (auto &th : pool)
            th.join();
        for (double e : err)
            CHECK(e == 0.0);
    }
}
