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

#include "dfrc/convmat.hpp"
#include "dfrc/fft.hpp"
#include "../oracles.hpp"

using namespace dfrc;

namespace
{

std::vector<cd> as_vec(const CVector &v) { return {v.data(), v.data() + v.size()}; }

CVector as_eigen(const std::vector<cd> &v) { return Eigen::Map<const CVector>(v.data(), static_cast<Eigen::Index>(v.size())); }

WaveformAlphabet nominal_alphabet() { return make_alphabet(4, ModulationParams::make(30, 1e-3, 3000.0), Modulation::dpsk, 1); }

} // namespace

TEST_SUITE("convmat")
{
    TEST_CASE("linear matrix of [1, 2] with two taps")
    {
        const std::vector<cd> x{1.0, 2.0};
        const auto m = build_linear_conv(x, 2).entries;
        CMatrix want(3, 2);
        want << 1.0, 0.0, 2.0, 1.0, 0.0, 2.0;
        CHECK(m == want);
    }

    TEST_CASE("circular matrix of [a, b] with two taps")
    {
        const cd a{1.5, -0.5}, b{-2.0, 0.25};
        const auto m = build_circular_conv(std::vector<cd>{a, b}, 2).entries;
        CMatrix want(3, 3);
        want << a, 0.0, b, b, a, 0.0, 0.0, b, a;
        CHECK(m == want);
    }

    TEST_CASE("identity filter returns the zero padded waveform")
    {
        std::mt19937_64 rng(4);
        const auto x = oracle::random_complex(6, rng);
        CVector h = CVector::Zero(5);
        h(0) = 1.0;
        const CVector y = build_linear_conv(x, 5).entries * h;
        CHECK(y.size() == 10);
        for (Eigen::Index i = 0; i < 10; ++i)
            CHECK(y(i) == (i < 6 ? x[static_cast<std::size_t>(i)] : cd{}));
        const CVector yc = build_circular_conv(x, 5).entries * CVector::Unit(10, 0);
        CHECK((yc - y).norm() == 0.0);
    }

    TEST_CASE("products match direct convolution on random instances")
    {
        std::mt19937_64 rng(11);
        for (std::size_t L = 1; L <= 16; L += 3)
            for (std::size_t L_f = 1; L_f <= 16; L_f += 5)
            {
                const auto x = oracle::random_complex(L, rng);
                const auto h = oracle::random_complex(L_f, rng);
                const auto lin = as_vec(build_linear_conv(x, L_f).entries * as_eigen(h));
                CHECK(oracle::rel_diff(lin, oracle::conv(x, h)) <= 1e-12);

                const std::size_t n = L + L_f - 1;
                const auto hc = oracle::random_complex(n, rng);
                const auto circ = as_vec(build_circular_conv(x, L_f).entries * as_eigen(hc));
                CHECK(oracle::rel_diff(circ, oracle::cconv(x, hc, n)) <= 1e-12);
            }
        // L = 5, L_f = 7 explicitly.
        const auto x = oracle::random_complex(5, rng);
        const auto h = oracle::random_complex(7, rng);
        CHECK(oracle::rel_diff(as_vec(build_linear_conv(x, 7).entries * as_eigen(h)), oracle::conv(x, h)) <= 1e-12);
    }

    TEST_CASE("Toeplitz structure matches the entrywise definition")
    {
        std::mt19937_64 rng(2);
        const auto x = oracle::random_complex(7, rng);
        CHECK(build_linear_conv(x, 9).entries == oracle::toeplitz(x, 9));
    }

    TEST_CASE("circulant eigenvalues are the DFT of the zero padded waveform")
    {
        std::mt19937_64 rng(8);
        const auto x = oracle::random_complex(5, rng);
        const std::size_t L_f = 4, n = 8;
        const auto C = build_circular_conv(x, L_f).entries;
        const auto lambda = oracle::dft(x, n);
        // Fourier vectors f_k(t) = exp(j 2 pi k t / n) satisfy C f_k = X(k) f_k.
        for (std::size_t k = 0; k < n; ++k)
        {
            CVector f(static_cast<Eigen::Index>(n));
            for (std::size_t t = 0; t < n; ++t)
                f(static_cast<Eigen::Index>(t)) = std::polar(1.0, 2.0 * oracle::kPi * static_cast<double>(k * t) / static_cast<double>(n));
            CHECK((C * f - lambda[k] * f).norm() <= 1e-9 * f.norm() * std::max(1.0, std::abs(lambda[k])));
        }
        const auto fast = fft::forward(x, n);
        CHECK(oracle::rel_diff(fast, lambda) <= 1e-12);
    }

    TEST_CASE("feasibility bound arithmetic")
    {
        const auto at = check_feasibility(4, 90, 267);
        CHECK(at.feasible);
        CHECK(at.on_lower_bound());
        CHECK(at.lower_lhs == 1068);
        CHECK(at.middle == 1068);

        const auto below = check_feasibility(4, 90, 266);
        CHECK_FALSE(below.feasible);
        CHECK(below.lower_lhs == 1065);
        CHECK(below.middle == 1064);
        CHECK(below.violated.find("(K-1)(L+L_f-1) = 1065 > K*L_f = 1064") != std::string::npos);

        for (std::size_t L : {1u, 5u, 90u})
            for (std::size_t L_f : {1u, 2u, 50u})
                CHECK(check_feasibility(1, L, L_f).feasible);
        CHECK(default_filter_length(4, 90) == 356);
        CHECK(default_peak_index(90, 270) == 179);
    }

    TEST_CASE("block system dimensions and sparsity")
    {
        const auto alphabet = nominal_alphabet();
        const auto sys = assemble_block_system(alphabet, 270, std::nullopt, Flavor::linear);
        CHECK(sys.X.rows() == 1436);
        CHECK(sys.X.cols() == 1080);
        CHECK(sys.Xtil.rows() == 1077);
        CHECK(sys.Xtil.cols() == 1080);
        CHECK(sys.e.size() == 1436);

        const Eigen::Index r = 359, c = 270;
        for (Eigen::Index i = 0; i < 4; ++i)
            for (Eigen::Index j = 0; j < 4; ++j)
            {
                const auto blk = sys.X.block(i * r, j * c, r, c);
                if (i == j)
                    CHECK(blk == build_linear_conv(alphabet[static_cast<std::size_t>(i)], 270).entries);
                else
                    CHECK(blk.isZero(0.0));
            }
        for (Eigen::Index i = 0; i < 3; ++i)
            for (Eigen::Index j = 0; j < 4; ++j)
            {
                const auto blk = sys.Xtil.block(i * r, j * c, r, c);
                if (j == i)
                    CHECK(blk == sys.X.block(i * r, i * c, r, c));
                else if (j == i + 1)
                    CHECK(blk == -sys.X.block(j * r, j * c, r, c));
                else
                    CHECK(blk.isZero(0.0));
            }
        for (Eigen::Index k = 0; k < 4; ++k)
            CHECK(sys.e.segment(k * r, r) == CVector::Unit(r, static_cast<Eigen::Index>(sys.peak_index)));
    }

    TEST_CASE("circular block system is square per block")
    {
        std::mt19937_64 rng(3);
        std::vector<std::vector<cd>> wf{oracle::random_complex(4, rng), oracle::random_complex(4, rng)};
        const auto sys = assemble_block_system(wf, 3, std::nullopt, Flavor::circular);
        CHECK(sys.X.rows() == 12);
        CHECK(sys.X.cols() == 12);
        CHECK(sys.Xtil.rows() == 6);
        CHECK(sys.Xtil.cols() == 12);
    }

    TEST_CASE("single waveform leaves the constraint empty")
    {
        std::mt19937_64 rng(3);
        std::vector<std::vector<cd>> wf{oracle::random_complex(4, rng)};
        CHECK(assemble_block_system(wf, 3, std::nullopt, Flavor::linear).Xtil.rows() == 0);
        CHECK(assemble_block_system(wf, 3, std::nullopt, Flavor::circular).Xtil.rows() == 0);
    }

    TEST_CASE("constraint vanishes exactly when block outputs agree")
    {
        std::mt19937_64 rng(21);
        const std::size_t L = 3, K = 3, L_f = 2 * L - 1;
        std::vector<std::vector<cd>> x;
        for (std::size_t k = 0; k < K; ++k)
            x.push_back(oracle::random_complex(L, rng));
        const auto sys = assemble_block_system(x, L_f, std::nullopt, Flavor::linear);

        // h_k = product of the other two waveforms, so every Psi_k h_k equals x0 * x1 * x2.
        const std::vector<std::vector<cd>> hk{oracle::conv(x[1], x[2]), oracle::conv(x[0], x[2]),
                                              oracle::conv(x[0], x[1])};
        CVector h(static_cast<Eigen::Index>(K * L_f));
        for (std::size_t k = 0; k < K; ++k)
            h.segment(static_cast<Eigen::Index>(k * L_f), static_cast<Eigen::Index>(L_f)) = as_eigen(hk[k]);
        CHECK((sys.Xtil * h).norm() <= 1e-12 * h.norm());

        // Any h: ||Xtil h||^2 is the sum of squared neighbour output differences.
        for (int trial = 0; trial < 5; ++trial)
        {
            const auto r = as_eigen(oracle::random_complex(K * L_f, rng));
            double want = 0.0;
            for (std::size_t k = 0; k + 1 < K; ++k)
            {
                const auto seg = [&](std::size_t j) {
                    return as_vec(r.segment(static_cast<Eigen::Index>(j * L_f), static_cast<Eigen::Index>(L_f)));
                };
                const auto a = oracle::conv(x[k], seg(k));
                const auto b = oracle::conv(x[k + 1], seg(k + 1));
                for (std::size_t i = 0; i < a.size(); ++i)
                    want += std::norm(a[i] - b[i]);
            }
            CHECK((sys.Xtil * r).norm() == doctest::Approx(std::sqrt(want)).epsilon(1e-12));
            CHECK((sys.Xtil * r).norm() > 1e-3);
        }
    }

    TEST_CASE("infeasible linear system raises a dimension error carrying the bound")
    {
        const auto alphabet = nominal_alphabet();
        try
        {
            (void)assemble_block_system(alphabet, 266, std::nullopt, Flavor::linear);
            FAIL("expected DimensionError");
        }
        catch (const DimensionError &e)
        {
            CHECK(e.bound() == "(K-1)(L+L_f-1) = 1065 > K*L_f = 1064");
        }
        CHECK_THROWS_AS(assemble_block_system(alphabet, 270, std::size_t{359}, Flavor::linear), InvalidArgument);
        CHECK_THROWS_AS(build_linear_conv(alphabet[0], 0), InvalidArgument);
        CHECK_THROWS_AS(build_circular_conv(alphabet[0], 0), InvalidArgument);
    }
}
