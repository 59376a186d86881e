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

#pragma once

#include <span>
#include <vector>

#include "dfrc/types.hpp"

// Thin FFTW3 front end. Plans are cached per (size, direction) and shared
// between threads; execution uses the new-array interface.
namespace dfrc::fft
{

/// Smallest size >= n whose only prime factors are 2, 3, 5 and 7.
std::size_t good_size(std::size_t n);

/// Unnormalized forward DFT of `in`, zero padded (or truncated) to n points.
std::vector<cd> forward(std::span<const cd> in, std::size_t n);
inline std::vector<cd> forward(std::span<const cd> in) { return forward(in, in.size()); }

/// Inverse DFT scaled by 1/n, so inverse(forward(x)) == x.
std::vector<cd> inverse(std::span<const cd> in);

/// In-place transforms on a buffer; `inverse_inplace` applies the 1/n scale.
void forward_inplace(std::span<cd> data);
void inverse_inplace(std::span<cd> data);

/// Full linear convolution, length a.size() + b.size() - 1.
std::vector<cd> convolve(std::span<const cd> a, std::span<const cd> b);

/// n-point circular convolution; inputs are zero padded to n (must not exceed n).
std::vector<cd> circular_convolve(std::span<const cd> a, std::span<const cd> b, std::size_t n);

/// Repeated convolution of many inputs with one fixed tap vector.
class Convolver
{
public:
    enum class Mode
    {
        linear,
        circular
    };

    /// Linear mode: inputs up to `max_input` samples. Circular mode: the
    /// period is taps.size() and inputs up to that length are zero padded.
    Convolver(std::span<const cd> taps, std::size_t max_input, Mode mode);

    /// Linear: returns input.size() + taps - 1 samples. Circular: taps.size() samples.
    std::vector<cd> apply(std::span<const cd> input) const;

    std::size_t taps() const { return n_taps_; }
    Mode mode() const { return mode_; }

private:
    Mode mode_;
    std::size_t n_taps_;
    std::size_t max_input_;
    std::size_t size_;
    std::vector<cd> spectrum_;
};

} // namespace dfrc::fft
