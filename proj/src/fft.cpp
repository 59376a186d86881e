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

#include "dfrc/fft.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <utility>

#include <fftw3.h>

namespace dfrc::fft
{

namespace
{

class PlanCache
{
public:
    ~PlanCache()
    {
        for (auto &[key, plan] : plans_)
            fftw_destroy_plan(plan);
    }

    fftw_plan get(std::size_t n, int sign)
    {
        std::lock_guard lock(mutex_);
        auto key = std::make_pair(n, sign);
        if (auto it = plans_.find(key); it != plans_.end())
            return it->second;

        // The planner only needs scratch memory of the right size; execution
        // happens on caller buffers (FFTW_UNALIGNED allows any alignment).
        std::vector<cd> scratch(n);
        auto *buf = reinterpret_cast<fftw_complex *>(scratch.data());
        fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, sign,
                                          FFTW_ESTIMATE | FFTW_UNALIGNED);
        plans_.emplace(key, plan);
        return plan;
    }

private:
    std::mutex mutex_;
    std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

PlanCache &cache()
{
    static PlanCache instance;
    return instance;
}

void execute(std::span<cd> data, int sign)
{
    if (data.empty())
        return;
    fftw_plan plan = cache().get(data.size(), sign);
    auto *buf = reinterpret_cast<fftw_complex *>(data.data());
    fftw_execute_dft(plan, buf, buf);
}

} // namespace

std::size_t good_size(std::size_t n)
{
    if (n <= 1)
        return 1;
    for (std::size_t m = n;; ++m)
    {
        std::size_t r = m;
        for (std::size_t p : {2u, 3u, 5u, 7u})
            while (r % p == 0)
                r /= p;
        if (r == 1)
            return m;
    }
}

void forward_inplace(std::span<cd> data) { execute(data, FFTW_FORWARD); }

void inverse_inplace(std::span<cd> data)
{
    execute(data, FFTW_BACKWARD);
    const double scale = 1.0 / static_cast<double>(data.size());
    for (auto &v : data)
        v *= scale;
}

std::vector<cd> forward(std::span<const cd> in, std::size_t n)
{
    std::vector<cd> out(n, cd{});
    std::copy_n(in.begin(), std::min(n, in.size()), out.begin());
    forward_inplace(out);
    return out;
}

std::vector<cd> inverse(std::span<const cd> in)
{
    std::vector<cd> out(in.begin(), in.end());
    inverse_inplace(out);
    return out;
}

std::vector<cd> convolve(std::span<const cd> a, std::span<const cd> b)
{
    if (a.empty() || b.empty())
        return {};
    Convolver conv(b, a.size(), Convolver::Mode::linear);
    return conv.apply(a);
}

std::vector<cd> circular_convolve(std::span<const cd> a, std::span<const cd> b, std::size_t n)
{
    if (a.size() > n || b.size() > n)
        throw InvalidArgument("circular_convolve: input longer than the period");
    auto fa = forward(a, n);
    auto fb = forward(b, n);
    for (std::size_t i = 0; i < n; ++i)
        fa[i] *= fb[i];
    inverse_inplace(fa);
    return fa;
}

Convolver::Convolver(std::span<const cd> taps, std::size_t max_input, Mode mode)
    : mode_(mode), n_taps_(taps.size()), max_input_(max_input)
{
    if (taps.empty())
        throw InvalidArgument("Convolver: empty tap vector");
    if (mode == Mode::linear)
        size_ = good_size(max_input + n_taps_ - 1);
    else
    {
        if (max_input > n_taps_)
            throw InvalidArgument("Convolver: circular input longer than the period");
        size_ = n_taps_;
    }
    spectrum_ = forward(taps, size_);
}

std::vector<cd> Convolver::apply(std::span<const cd> input) const
{
    if (input.size() > max_input_)
        throw InvalidArgument("Convolver: input longer than configured maximum");
    auto buf = forward(input, size_);
    for (std::size_t i = 0; i < size_; ++i)
        buf[i] *= spectrum_[i];
    inverse_inplace(buf);
    if (mode_ == Mode::linear)
        buf.resize(input.empty() ? 0 : input.size() + n_taps_ - 1);
    return buf;
}

} // namespace dfrc::fft
