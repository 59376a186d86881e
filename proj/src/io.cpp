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

#include "dfrc/io.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include <unistd.h>

namespace dfrc::io
{

namespace
{

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string hash_line(const std::string &hash) { return "# config_hash: " + hash + "\n"; }

void write_file(const std::filesystem::path &path, const char *data, std::size_t size)
{
    static std::atomic<unsigned> counter{0};
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++);
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os)
            throw Error("cannot open " + tmp.string() + " for writing");
        os.write(data, static_cast<std::streamsize>(size));
        os.flush();
        if (!os)
        {
            os.close();
            std::filesystem::remove(tmp);
            throw Error("write to " + tmp.string() + " failed");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec)
    {
        std::filesystem::remove(tmp);
        throw Error("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
    }
}

template <class T>
void put(std::vector<char> &out, T v)
{
    char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    out.insert(out.end(), b, b + sizeof(T));
}

template <class T>
T get(const std::vector<char> &in, std::size_t &pos)
{
    if (pos + sizeof(T) > in.size())
        throw InvalidArgument("datamatrix: truncated file");
    T v;
    std::memcpy(&v, in.data() + pos, sizeof(T));
    pos += sizeof(T);
    return v;
}

constexpr char kMagic[8] = {'D', 'F', 'R', 'C', 'D', 'M', '0', '1'};

} // namespace

std::string config_hash(const json &config)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : config.dump())
    {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void atomic_write(const std::filesystem::path &path, const std::string &content)
{
    write_file(path, content.data(), content.size());
}

void atomic_write(const std::filesystem::path &path, const std::vector<char> &content)
{
    write_file(path, content.data(), content.size());
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

// ---- JSON -----------------------------------------------------------------

json to_json(const ModulationParams &p)
{
    return {{"n_chips", p.n_chips},
            {"chip_duration", p.chip_duration},
            {"baseband_freq", p.baseband_freq},
            {"sample_rate", p.sample_rate},
            {"carrier_freq", p.carrier_freq},
            {"samples_per_chip", p.samples_per_chip()},
            {"pulse_duration", p.pulse_duration()}};
}

json to_json(const BasebandWaveform &wf)
{
    return {{"kind", to_string(wf.kind)}, {"seed", wf.seed}, {"length", wf.size()}, {"params", to_json(wf.params)}};
}

json to_json(const FilterBank &bank)
{
    json j{{"design", to_string(bank.design)},
           {"flavor", to_string(bank.flavor)},
           {"K", bank.K()},
           {"L", bank.L},
           {"L_f", bank.L_f},
           {"filter_length", bank.length()},
           {"peak_index", bank.peak_index},
           {"cond_gram", number(bank.cond_gram)},
           {"cond_D", number(bank.cond_D)},
           {"constraint_rank", bank.constraint_rank},
           {"constraint_rows", bank.constraint_rows},
           {"warnings", bank.warnings}};
    if (bank.design == DesignKind::baseline_penalized)
    {
        j["mu"] = bank.mu;
        json hist = json::array();
        for (double v : bank.objective_history)
            hist.push_back(number(v));
        j["objective_history"] = hist;
    }
    return j;
}

json to_json(const DesignReport &rep)
{
    json psl = json::array(), isl = json::array();
    for (double v : rep.psl_db)
        psl.push_back(number(v));
    for (double v : rep.isl_db)
        isl.push_back(number(v));
    return {{"coherence_error", number(rep.coherence_error)},
            {"psl_db", psl},
            {"isl_db", isl},
            {"objective_residual", number(rep.objective_residual)},
            {"constraint_residual", number(rep.constraint_residual)},
            {"cond_gram", number(rep.cond_gram)},
            {"cond_D", number(rep.cond_D)},
            {"mainlobe", number(rep.mainlobe)}};
}

json to_json(const Scene &scene, bool include_scatterers)
{
    json j{{"n_range_gates", scene.n_range_gates},
           {"n_pulses", scene.n_pulses},
           {"t_pri", scene.t_pri},
           {"wavelength", scene.wavelength},
           {"gate_spacing", scene.gate_spacing},
           {"cnr_db", number(scene.cnr_db)},
           {"snr_db", number(scene.snr_db)},
           {"noise_variance", scene.noise_variance},
           {"noise_seed", scene.noise_seed},
           {"n_targets", scene.n_targets()},
           {"n_clutter", scene.n_clutter()},
           {"power_reference", "per fast-time sample at the filter input, unit noise variance"}};
    json targets = json::array();
    for (const auto &s : scene.scatterers)
        if (s.kind == ScattererKind::target)
            targets.push_back({{"range_cell", s.range_cell},
                               {"normalized_doppler", s.normalized_doppler},
                               {"reflectivity", {s.reflectivity.real(), s.reflectivity.imag()}}});
    j["targets"] = targets;
    if (include_scatterers)
    {
        json all = json::array();
        for (const auto &s : scene.scatterers)
            all.push_back({{"kind", to_string(s.kind)},
                           {"range_cell", s.range_cell},
                           {"normalized_doppler", s.normalized_doppler},
                           {"reflectivity", {s.reflectivity.real(), s.reflectivity.imag()}}});
        j["scatterers"] = all;
    }
    return j;
}

json to_json(const PulseTrain &train) { return {{"seed", train.seed}, {"symbol_indices", train.symbol_indices}}; }

json to_json(const DetectionResult &det)
{
    json d = json::array();
    for (const auto &x : det.detections)
        d.push_back({{"gate", x.gate}, {"bin", x.bin}, {"doppler", x.doppler}, {"magnitude", x.magnitude}});
    return {{"detections", d},
            {"threshold", det.threshold},
            {"median", det.median},
            {"truth_matches", det.truth_matches},
            {"matched", det.matched}};
}

json to_json(const CurvePoint &p)
{
    return {{"x", number(p.x)}, {"y", p.y}, {"trials", p.trials}, {"hits", p.hits}, {"ci_lo", p.ci_lo},
            {"ci_hi", p.ci_hi}};
}

// ---- CSV ------------------------------------------------------------------

std::string waveform_csv(const BasebandWaveform &wf, const std::string &hash)
{
    std::string s = hash_line(hash) + "index,real,imag\n";
    for (std::size_t p = 0; p < wf.samples.size(); ++p)
        s += std::to_string(p) + "," + fmt(wf.samples[p].real()) + "," + fmt(wf.samples[p].imag()) + "\n";
    return s;
}

std::string filterbank_csv(const FilterBank &bank, const std::string &hash)
{
    std::string s = hash_line(hash) + "index";
    for (std::size_t k = 0; k < bank.K(); ++k)
        s += ",real_" + std::to_string(k) + ",imag_" + std::to_string(k);
    s += "\n";
    for (std::size_t i = 0; i < bank.length(); ++i)
    {
        s += std::to_string(i);
        for (const auto &h : bank.filters)
            s += "," + fmt(h(static_cast<Eigen::Index>(i)).real()) + "," + fmt(h(static_cast<Eigen::Index>(i)).imag());
        s += "\n";
    }
    return s;
}

std::string rdmap_csv(const RangeDopplerMap &map, const std::string &hash, std::ptrdiff_t first_gate,
                      std::ptrdiff_t last_gate)
{
    std::string s = hash_line(hash) + "gate";
    for (double nu : map.doppler_axis)
        s += "," + fmt(nu);
    s += "\n";
    for (std::size_t g = 0; g < map.n_gates(); ++g)
    {
        const auto gate = map.range_axis[g];
        if ((first_gate >= 0 && gate < first_gate) || (last_gate >= 0 && gate > last_gate))
            continue;
        s += std::to_string(gate);
        for (std::size_t b = 0; b < map.n_bins(); ++b)
            s += "," + fmt(map.magnitudes(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(b)));
        s += "\n";
    }
    return s;
}

json rdmap_axes_json(const RangeDopplerMap &map)
{
    return {{"doppler_axis", map.doppler_axis},
            {"range_axis", map.range_axis},
            {"window", to_string(map.window)},
            {"units", {{"doppler", "cycles per pulse"}, {"range", "gate index"}, {"value", "linear magnitude"}}}};
}

std::string curve_csv(const std::vector<CurvePoint> &curve, const std::string &hash)
{
    std::string s = hash_line(hash) + "x,y,ci_lo,ci_hi,trials,hits\n";
    for (const auto &p : curve)
        s += fmt(p.x) + "," + fmt(p.y) + "," + fmt(p.ci_lo) + "," + fmt(p.ci_hi) + "," + std::to_string(p.trials) +
             "," + std::to_string(p.hits) + "\n";
    return s;
}

std::string detections_csv(const DetectionResult &det, const std::string &hash)
{
    std::string s = hash_line(hash) + "gate,bin,doppler,magnitude\n";
    for (const auto &d : det.detections)
        s += std::to_string(d.gate) + "," + std::to_string(d.bin) + "," + fmt(d.doppler) + "," + fmt(d.magnitude) +
             "\n";
    return s;
}

std::string matrix_csv(const CMatrix &m, const std::string &hash)
{
    std::string s = hash_line(hash) + "row,col,real,imag\n";
    for (Eigen::Index c = 0; c < m.cols(); ++c)
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            if (m(r, c) != cd(0.0))
                s += std::to_string(r) + "," + std::to_string(c) + "," + fmt(m(r, c).real()) + "," +
                     fmt(m(r, c).imag()) + "\n";
    return s;
}

// ---- binary ---------------------------------------------------------------

std::vector<char> datamatrix_binary(const DataMatrix &d, const std::string &hash)
{
    std::vector<char> out(kMagic, kMagic + 8);
    put<std::uint64_t>(out, d.rows());
    put<std::uint64_t>(out, d.cols());
    put<std::int64_t>(out, d.gate_offset);
    std::string h = hash;
    h.resize(16, '0');
    out.insert(out.end(), h.begin(), h.end());
    out.reserve(out.size() + d.rows() * d.cols() * 16);
    for (Eigen::Index c = 0; c < d.entries.cols(); ++c)
        for (Eigen::Index r = 0; r < d.entries.rows(); ++r)
        {
            put<double>(out, d.entries(r, c).real());
            put<double>(out, d.entries(r, c).imag());
        }
    return out;
}

DataMatrix read_datamatrix_binary(const std::vector<char> &bytes, std::string *hash)
{
    if (bytes.size() < 8 || std::memcmp(bytes.data(), kMagic, 8) != 0)
        throw InvalidArgument("datamatrix: bad magic");
    std::size_t pos = 8;
    const auto rows = get<std::uint64_t>(bytes, pos);
    const auto cols = get<std::uint64_t>(bytes, pos);
    DataMatrix d;
    d.gate_offset = get<std::int64_t>(bytes, pos);
    if (pos + 16 > bytes.size())
        throw InvalidArgument("datamatrix: truncated file");
    if (hash)
        *hash = std::string(bytes.data() + pos, 16);
    pos += 16;
    if (bytes.size() - pos != rows * cols * 16)
        throw InvalidArgument("datamatrix: payload size does not match the header");
    d.entries.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index c = 0; c < d.entries.cols(); ++c)
        for (Eigen::Index r = 0; r < d.entries.rows(); ++r)
        {
            const double re = get<double>(bytes, pos);
            const double im = get<double>(bytes, pos);
            d.entries(r, c) = {re, im};
        }
    return d;
}

json datamatrix_header(const DataMatrix &d, const std::string &hash, const std::string &scene_digest)
{
    return {{"format", "DFRCDM01"},
            {"layout", "column-major interleaved real/imag float64 little-endian after a 48-byte header"},
            {"rows", d.rows()},
            {"cols", d.cols()},
            {"gate_offset", d.gate_offset},
            {"config_hash", hash},
            {"scene_digest", scene_digest}};
}

std::string datamatrix_csv(const DataMatrix &d, const std::string &hash)
{
    std::string s = hash_line(hash) + "row,pulse,real,imag\n";
    for (Eigen::Index c = 0; c < d.entries.cols(); ++c)
        for (Eigen::Index r = 0; r < d.entries.rows(); ++r)
            s += std::to_string(r) + "," + std::to_string(c) + "," + fmt(d.entries(r, c).real()) + "," +
                 fmt(d.entries(r, c).imag()) + "\n";
    return s;
}

json block_system_sidecar(const BlockSystem &sys, const std::string &hash)
{
    return {{"flavor", to_string(sys.flavor)},
            {"K", sys.K},
            {"L", sys.L},
            {"L_f", sys.L_f},
            {"peak_index", sys.peak_index},
            {"X", {sys.X.rows(), sys.X.cols()}},
            {"Xtil", {sys.Xtil.rows(), sys.Xtil.cols()}},
            {"waveform_ids", [&] {
                 std::vector<std::size_t> ids(sys.K);
                 for (std::size_t k = 0; k < sys.K; ++k)
                     ids[k] = k;
                 return ids;
             }()},
            {"config_hash", hash}};
}

} // namespace dfrc::io
