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

// Reference computations written from the definitions, sharing no code with
// the library: direct convolution, O(n^2) DFT, dense KKT solves.

#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle
{

using cd = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

inline constexpr double kPi = 3.14159265358979323846;

inline std::vector<cd> random_complex(std::size_t n, std::mt19937_64 &rng)
{
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<cd> v(n);
    for (auto &x : v)
        x = {g(rng), g(rng)};
    return v;
}

inline std::vector<cd> random_unit_modulus(std::size_t n, std::mt19937_64 &rng)
{
    std::uniform_real_distribution<double> u(0.0, 2.0 * kPi);
    std::vector<cd> v(n);
    for (auto &x : v)
        x = std::polar(1.0, u(rng));
    return v;
}

inline std::vector<cd> conv(const std::vector<cd> &a, const std::vector<cd> &b)
{
    std::vector<cd> y(a.size() + b.size() - 1, cd{});
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            y[i + j] += a[i] * b[j];
    return y;
}

inline std::vector<cd> cconv(const std::vector<cd> &a, const std::vector<cd> &b, std::size_t n)
{
    std::vector<cd> y(n, cd{});
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            y[(i + j) % n] += a[i] * b[j];
    return y;
}

inline std::vector<cd> dft(const std::vector<cd> &x, std::size_t n)
{
    std::vector<cd> X(n, cd{});
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t t = 0; t < std::min(n, x.size()); ++t)
            X[k] += x[t] * std::polar(1.0, -2.0 * kPi * static_cast<double>(k * t % n) / static_cast<double>(n));
    return X;
}

inline double rel_diff(const std::vector<cd> &a, const std::vector<cd> &b)
{
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        num += std::norm(a[i] - b[i]);
        den += std::norm(b[i]);
    }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

/// Toeplitz block built straight from the definition entry(r, c) = x(r - c).
inline CMat toeplitz(const std::vector<cd> &x, std::size_t L_f)
{
    const std::size_t L = x.size();
    CMat m = CMat::Zero(static_cast<Eigen::Index>(L + L_f - 1), static_cast<Eigen::Index>(L_f));
    for (std::size_t c = 0; c < L_f; ++c)
        for (std::size_t i = 0; i < L; ++i)
            m(static_cast<Eigen::Index>(c + i), static_cast<Eigen::Index>(c)) = x[i];
    return m;
}

/// min ||X h - e||^2 s.t. Xtil h = 0 through the bordered KKT system
/// [X^H X, Xtil^H; Xtil, 0] [h; lambda] = [X^H e; 0]. Requires full row rank
/// Xtil and a nonsingular Gram matrix; random instances satisfy both.
inline CVec kkt_solve(const CMat &X, const CMat &Xtil, const CVec &e)
{
    const auto n = X.cols();
    const auto m = Xtil.rows();
    CMat A = CMat::Zero(n + m, n + m);
    A.topLeftCorner(n, n) = X.adjoint() * X;
    A.topRightCorner(n, m) = Xtil.adjoint();
    A.bottomLeftCorner(m, n) = Xtil;
    CVec b = CVec::Zero(n + m);
    b.head(n) = X.adjoint() * e;
    return A.fullPivLu().solve(b).head(n);
}

/// The DPSK definition evaluated pointwise at t = p / fs with exact chip lookups.
inline std::vector<cd> dpsk_reference(const std::vector<int> &chips, double tau_c, double fs)
{
    const double fb = 1.0 / (2.0 * tau_c);
    const std::size_t spc = static_cast<std::size_t>(std::llround(fs * tau_c));
    const std::size_t L = chips.size() * spc;
    auto sd = [&](double t) {
        long n = static_cast<long>(std::floor(t / tau_c + 1e-12));
        n = std::clamp(n, 0L, static_cast<long>(chips.size()) - 1);
        return std::polar(1.0, kPi * (chips[static_cast<std::size_t>(n)] + 1) / 2.0);
    };
    std::vector<cd> out(L);
    for (std::size_t p = 0; p < L; ++p)
    {
        const double t = static_cast<double>(p) / fs;
        const double td = std::max(0.0, t - tau_c / 2.0);
        out[p] = sd(td) * std::abs(std::cos(2.0 * kPi * fb * t)) + cd(0, 1) * sd(t) * std::abs(std::sin(2.0 * kPi * fb * t));
    }
    return out;
}

} // namespace oracle
