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

#include "dfrc/processing.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "dfrc/fft.hpp"
#include "dfrc/random.hpp"

namespace dfrc
{

std::string to_string(DopplerWindow w) { return w == DopplerWindow::rectangular ? "rectangular" : "blackman-harris"; }

DopplerWindow doppler_window_from_string(const std::string &s)
{
    if (s == "rectangular" || s == "rect" || s == "none")
        return DopplerWindow::rectangular;
    if (s == "blackman-harris" || s == "blackmanharris")
        return DopplerWindow::blackman_harris;
    throw InvalidArgument("unknown Doppler window '" + s + "' (expected rectangular or blackman-harris)");
}

std::vector<double> doppler_window(DopplerWindow w, std::size_t M)
{
    std::vector<double> out(M, 1.0);
    if (w == DopplerWindow::rectangular || M < 2)
        return out;
    constexpr double a0 = 0.35875, a1 = 0.48829, a2 = 0.14128, a3 = 0.01168;
    for (std::size_t m = 0; m < M; ++m)
    {
        const double x = 2.0 * pi * static_cast<double>(m) / static_cast<double>(M - 1);
        out[m] = a0 - a1 * std::cos(x) + a2 * std::cos(2.0 * x) - a3 * std::cos(3.0 * x);
    }
    return out;
}

std::size_t RangeDopplerMap::bin_of(std::ptrdiff_t k) const
{
    const auto M = static_cast<std::ptrdiff_t>(n_bins());
    const std::ptrdiff_t lo = -((M - 1) / 2);
    std::ptrdiff_t b = (k - lo) % M;
    if (b < 0)
        b += M;
    return static_cast<std::size_t>(b);
}

Flavor default_apply_mode(const FilterBank &bank) { return bank.flavor; }

// ---- filtering ----------------------------------------------------------

DataMatrix apply_filterbank(const DataMatrix &data, const FilterBank &bank, const PulseTrain &train, Flavor mode)
{
    if (bank.K() == 0)
        throw InvalidArgument("apply_filterbank: empty filter bank");
    if (train.size() != data.cols())
        throw InvalidArgument("apply_filterbank: pulse train has " + std::to_string(train.size()) +
                              " symbols but the data has " + std::to_string(data.cols()) + " columns");
    if (data.rows() < bank.L)
        throw InvalidArgument("apply_filterbank: data columns are shorter than one pulse");
    for (std::size_t m = 0; m < train.size(); ++m)
        if (train[m] >= bank.K())
            throw InvalidArgument("apply_filterbank: symbol index " + std::to_string(train[m]) + " >= K");

    const std::size_t rows = data.rows();
    const std::size_t gates = rows - bank.L + 1;
    const std::size_t n = bank.L + bank.L_f - 1;
    const std::size_t pk = bank.peak_index;
    const std::size_t len = bank.length();

    DataMatrix out;
    out.gate_offset = data.gate_offset;
    out.entries.resize(static_cast<Eigen::Index>(gates), static_cast<Eigen::Index>(data.cols()));

    if (mode == Flavor::linear)
    {
        std::vector<fft::Convolver> conv;
        for (const auto &h : bank.filters)
            conv.emplace_back(std::span<const cd>(h.data(), len), rows, fft::Convolver::Mode::linear);
        std::vector<cd> col(rows);
        for (std::size_t m = 0; m < data.cols(); ++m)
        {
            Eigen::Map<CVector>(col.data(), static_cast<Eigen::Index>(rows)) =
                data.entries.col(static_cast<Eigen::Index>(m));
            const auto y = conv[train[m]].apply(col);
            for (std::size_t g = 0; g < gates; ++g)
                out.entries(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(m)) = y[g + pk];
        }
        return out;
    }

    if (bank.flavor != Flavor::circular || len != n)
        throw InvalidArgument("apply_filterbank: circular mode needs a circular bank of length L + L_f - 1");

    std::vector<fft::Convolver> conv;
    for (const auto &h : bank.filters)
        conv.emplace_back(std::span<const cd>(h.data(), n), n, fft::Convolver::Mode::circular);

    const std::size_t block = rows <= n ? gates : bank.L_f;
    std::vector<cd> win(n);
    for (std::size_t m = 0; m < data.cols(); ++m)
    {
        for (std::size_t g0 = 0; g0 < gates; g0 += block)
        {
            for (std::size_t i = 0; i < n; ++i)
                win[i] = g0 + i < rows ? data.entries(static_cast<Eigen::Index>(g0 + i), static_cast<Eigen::Index>(m))
                                       : cd(0.0);
            const auto c = conv[train[m]].apply(win);
            for (std::size_t j = 0; j < block && g0 + j < gates; ++j)
                out.entries(static_cast<Eigen::Index>(g0 + j), static_cast<Eigen::Index>(m)) = c[(j + pk) % n];
        }
    }
    return out;
}

// ---- range-Doppler --------------------------------------------------------

RangeDopplerMap range_doppler_map(const DataMatrix &filtered, DopplerWindow window)
{
    const std::size_t G = filtered.rows();
    const std::size_t M = filtered.cols();
    if (M == 0)
        throw InvalidArgument("range_doppler_map: no pulses");

    RangeDopplerMap map;
    map.window = window;
    map.magnitudes.resize(static_cast<Eigen::Index>(G), static_cast<Eigen::Index>(M));
    const auto lo = -static_cast<std::ptrdiff_t>((M - 1) / 2);
    for (std::size_t b = 0; b < M; ++b)
        map.doppler_axis.push_back(static_cast<double>(lo + static_cast<std::ptrdiff_t>(b)) / static_cast<double>(M));
    for (std::size_t g = 0; g < G; ++g)
        map.range_axis.push_back(filtered.gate_offset + static_cast<std::ptrdiff_t>(g));

    const auto w = doppler_window(window, M);
    std::vector<cd> buf(M);
    for (std::size_t g = 0; g < G; ++g)
    {
        for (std::size_t m = 0; m < M; ++m)
            buf[m] = filtered.entries(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(m)) * w[m];
        fft::forward_inplace(buf);
        for (std::size_t b = 0; b < M; ++b)
        {
            auto k = lo + static_cast<std::ptrdiff_t>(b);
            const auto idx = static_cast<std::size_t>((k % static_cast<std::ptrdiff_t>(M) + static_cast<std::ptrdiff_t>(M)) %
                                                      static_cast<std::ptrdiff_t>(M));
            map.magnitudes(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(b)) = std::abs(buf[idx]);
        }
    }
    return map;
}

// ---- detection ----------------------------------------------------------

DetectionResult detect_targets(const RangeDopplerMap &map, double clutter_exclusion, double threshold_db)
{
    if (!std::isfinite(threshold_db))
        throw InvalidArgument("detect_targets: threshold must be finite");
    DetectionResult res;
    const auto G = static_cast<Eigen::Index>(map.n_gates());
    const auto B = static_cast<Eigen::Index>(map.n_bins());
    if (G == 0 || B == 0)
        return res;

    std::vector<double> all(map.magnitudes.data(), map.magnitudes.data() + map.magnitudes.size());
    const auto mid = all.begin() + static_cast<std::ptrdiff_t>(all.size() / 2);
    std::nth_element(all.begin(), mid, all.end());
    double median = *mid;
    if (all.size() % 2 == 0)
        median = 0.5 * (median + *std::max_element(all.begin(), mid));
    res.median = median;
    res.threshold = median * std::pow(10.0, threshold_db / 20.0);

    for (Eigen::Index g = 0; g < G; ++g)
        for (Eigen::Index b = 0; b < B; ++b)
        {
            if (std::abs(map.doppler_axis[static_cast<std::size_t>(b)]) <= clutter_exclusion + 1e-12)
                continue;
            const double v = map.magnitudes(g, b);
            if (!(v > res.threshold))
                continue;
            bool peak = true;
            for (Eigen::Index dg = -1; dg <= 1 && peak; ++dg)
                for (Eigen::Index db = -1; db <= 1; ++db)
                {
                    const Eigen::Index gg = g + dg;
                    if (gg < 0 || gg >= G)
                        continue;
                    const Eigen::Index bb = ((b + db) % B + B) % B;
                    if (map.magnitudes(gg, bb) > v)
                    {
                        peak = false;
                        break;
                    }
                }
            if (peak)
                res.detections.push_back({map.range_axis[static_cast<std::size_t>(g)], static_cast<std::size_t>(b),
                                          map.doppler_axis[static_cast<std::size_t>(b)], v});
        }
    return res;
}

void match_truth(DetectionResult &result, const RangeDopplerMap &map, std::span<const TargetSpec> truth,
                 double tolerance_bins)
{
    const auto M = static_cast<double>(map.n_bins());
    result.matched.assign(truth.size(), false);
    result.truth_matches = 0;
    for (std::size_t i = 0; i < truth.size(); ++i)
    {
        const double centre = truth[i].normalized_doppler * M;
        for (const auto &d : result.detections)
            if (d.gate == static_cast<std::ptrdiff_t>(truth[i].range_cell) &&
                std::abs(d.doppler * M - centre) <= tolerance_bins + 1e-9)
            {
                result.matched[i] = true;
                ++result.truth_matches;
                break;
            }
    }
}

DetectionResult run_radar_trial(const Scene &scene, std::span<const std::vector<cd>> alphabet,
                                const PulseTrain &train, const FilterBank &bank, std::span<const TargetSpec> truth,
                                const RadarChainOptions &opts, RangeDopplerMap *map_out)
{
    const auto data = simulate_ncpi(scene, alphabet, train);
    const auto filtered = apply_filterbank(data, bank, train, opts.mode.value_or(default_apply_mode(bank)));
    auto map = range_doppler_map(filtered, opts.window);
    auto det = detect_targets(map, opts.detection.clutter_exclusion, opts.detection.threshold_db);
    match_truth(det, map, truth, opts.detection.doppler_tolerance_bins);
    if (map_out)
        *map_out = std::move(map);
    return det;
}

// ---- Monte Carlo ----------------------------------------------------------

std::pair<double, double> wilson_interval(std::size_t hits, std::size_t trials, double z)
{
    if (trials == 0)
        return {0.0, 1.0};
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(hits) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double centre = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    return {std::max(0.0, std::min(centre - half, p)), std::min(1.0, std::max(centre + half, p))};
}

namespace
{

/// Runs body(t, counts) for t in [0, trials) on `threads` workers, each with
/// its own count vector, and sums the counts.
template <class Body>
std::vector<std::size_t> parallel_count(std::size_t trials, std::size_t width, std::size_t threads, Body body)
{
    threads = std::max<std::size_t>(1, std::min(threads, trials));
    std::vector<std::vector<std::size_t>> partial(threads, std::vector<std::size_t>(width, 0));
    if (threads == 1)
    {
        for (std::size_t t = 0; t < trials; ++t)
            body(t, partial[0]);
        return partial[0];
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (std::size_t w = 0; w < threads; ++w)
        pool.emplace_back([&, w] {
            try
            {
                for (std::size_t t = w; t < trials; t += threads)
                    body(t, partial[w]);
            }
            catch (...)
            {
                errors[w] = std::current_exception();
            }
        });
    for (auto &th : pool)
        th.join();
    for (auto &e : errors)
        if (e)
            std::rethrow_exception(e);
    std::vector<std::size_t> total(width, 0);
    for (const auto &p : partial)
        for (std::size_t i = 0; i < width; ++i)
            total[i] += p[i];
    return total;
}

CurvePoint make_point(double x, std::size_t hits, std::size_t trials)
{
    CurvePoint p;
    p.x = x;
    p.trials = trials;
    p.hits = hits;
    p.y = static_cast<double>(hits) / static_cast<double>(trials);
    std::tie(p.ci_lo, p.ci_hi) = wilson_interval(hits, trials);
    return p;
}

/// Max-output symbol decision with the received spectrum computed once per trial.
class SymbolDecider
{
public:
    SymbolDecider(const FilterBank &bank, std::size_t input_len, Flavor mode)
    {
        const std::size_t n = bank.L + bank.L_f - 1;
        if (mode == Flavor::circular && bank.length() != n)
            throw InvalidArgument("symbol decision: circular mode needs a circular bank");
        if (mode == Flavor::circular && input_len > n)
            throw InvalidArgument("symbol decision: received block longer than the circular period");
        size_ = mode == Flavor::linear ? fft::good_size(input_len + bank.length() - 1) : n;
        for (const auto &h : bank.filters)
            spectra_.push_back(fft::forward(std::span<const cd>(h.data(), bank.length()), size_));
    }

    std::size_t decide(std::span<const cd> received) const
    {
        const auto R = fft::forward(received, size_);
        std::vector<cd> buf(size_);
        std::size_t best = 0;
        double best_peak = -1.0;
        for (std::size_t k = 0; k < spectra_.size(); ++k)
        {
            for (std::size_t i = 0; i < size_; ++i)
                buf[i] = R[i] * spectra_[k][i];
            fft::inverse_inplace(buf);
            double peak = 0.0;
            for (const auto &v : buf)
                peak = std::max(peak, std::norm(v));
            if (peak > best_peak)
            {
                best_peak = peak;
                best = k;
            }
        }
        return best;
    }

private:
    std::size_t size_ = 0;
    std::vector<std::vector<cd>> spectra_;
};

} // namespace

std::vector<std::vector<CurvePoint>> estimate_pd(std::span<const FilterBank> banks,
                                                 std::span<const std::vector<cd>> alphabet,
                                                 std::span<const double> snr_grid, std::size_t trials,
                                                 const SceneConfig &scene_template, std::uint64_t seed,
                                                 const RadarChainOptions &opts)
{
    if (trials == 0)
        throw InvalidArgument("estimate_pd: trials must be >= 1");
    if (scene_template.targets.empty())
        throw InvalidArgument("estimate_pd: the scene template has no target");
    scene_template.validate();

    std::vector<std::vector<CurvePoint>> curves(banks.size());
    for (std::size_t i = 0; i < snr_grid.size(); ++i)
    {
        SceneConfig cfg = scene_template;
        cfg.snr_db = snr_grid[i];
        for (auto &t : cfg.targets)
            t.snr_db.reset();
        const auto counts = parallel_count(trials, banks.size(), opts.threads, [&](std::size_t t, auto &cnt) {
            const std::uint64_t s = derive_seed(seed, {i, t});
            const Scene scene = generate_scene(cfg, s);
            const PulseTrain train = random_pulse_train(cfg.n_pulses, alphabet.size(), derive_seed(s, {1}));
            const auto data = simulate_ncpi(scene, alphabet, train);
            for (std::size_t b = 0; b < banks.size(); ++b)
            {
                const auto filtered =
                    apply_filterbank(data, banks[b], train, opts.mode.value_or(default_apply_mode(banks[b])));
                const auto map = range_doppler_map(filtered, opts.window);
                auto det = detect_targets(map, opts.detection.clutter_exclusion, opts.detection.threshold_db);
                match_truth(det, map, cfg.targets, opts.detection.doppler_tolerance_bins);
                cnt[b] += det.truth_matches == cfg.targets.size();
            }
        });
        for (std::size_t b = 0; b < banks.size(); ++b)
            curves[b].push_back(make_point(snr_grid[i], counts[b], trials));
    }
    return curves;
}

std::size_t decide_symbol(std::span<const cd> received, const FilterBank &bank, Flavor mode)
{
    return SymbolDecider(bank, received.size(), mode).decide(received);
}

std::vector<std::vector<CurvePoint>> simulate_ser(std::span<const std::vector<cd>> alphabet,
                                                  std::span<const FilterBank> banks, double sample_rate,
                                                  std::span<const double> snr_grid, std::size_t trials,
                                                  std::uint64_t seed, const SerOptions &opts)
{
    if (trials == 0)
        throw InvalidArgument("simulate_ser: trials must be >= 1");
    if (alphabet.empty())
        throw InvalidArgument("simulate_ser: empty alphabet");
    for (const auto &b : banks)
        if (b.K() != alphabet.size())
            throw InvalidArgument("simulate_ser: bank size differs from the alphabet size");

    std::vector<SymbolDecider> deciders;
    for (const auto &b : banks)
        deciders.emplace_back(b, alphabet.front().size(), opts.mode.value_or(default_apply_mode(b)));

    const std::size_t K = alphabet.size();
    std::vector<std::vector<CurvePoint>> curves(banks.size());
    for (std::size_t i = 0; i < snr_grid.size(); ++i)
    {
        const auto counts = parallel_count(trials, banks.size(), opts.threads, [&](std::size_t t, auto &cnt) {
            const std::uint64_t s = derive_seed(seed, {i, t});
            auto rng = make_rng(s, {0});
            const std::size_t k = std::uniform_int_distribution<std::size_t>(0, K - 1)(rng);
            const CVector r = simulate_comm_received(alphabet[k], sample_rate, opts.path_gain, opts.doppler_hz,
                                                     snr_grid[i], derive_seed(s, {1}));
            const std::span<const cd> rv(r.data(), static_cast<std::size_t>(r.size()));
            for (std::size_t b = 0; b < banks.size(); ++b)
                cnt[b] += deciders[b].decide(rv) != k;
        });
        for (std::size_t b = 0; b < banks.size(); ++b)
            curves[b].push_back(make_point(snr_grid[i], counts[b], trials));
    }
    return curves;
}

std::optional<double> snr_at_level(std::span<const CurvePoint> curve, double level)
{
    for (std::size_t i = 0; i + 1 < curve.size(); ++i)
    {
        const auto &a = curve[i];
        const auto &b = curve[i + 1];
        if (a.y >= level && b.y < level)
        {
            if (a.y == level)
                return a.x;
            if (b.y > 0.0)
            {
                const double la = std::log10(a.y), lb = std::log10(b.y), lt = std::log10(level);
                return a.x + (lt - la) / (lb - la) * (b.x - a.x);
            }
            return a.x + (a.y - level) / (a.y - b.y) * (b.x - a.x);
        }
    }
    return std::nullopt;
}

} // namespace dfrc
