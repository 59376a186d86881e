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

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dfrc/config.hpp"
#include "dfrc/io.hpp"
#include "dfrc/selftest.hpp"

namespace py = pybind11;
using namespace dfrc;

namespace
{

std::vector<std::vector<cd>> to_samples(const std::vector<CVector> &wfs)
{
    std::vector<std::vector<cd>> out;
    out.reserve(wfs.size());
    for (const auto &w : wfs)
        out.emplace_back(w.data(), w.data() + w.size());
    return out;
}

std::vector<CVector> to_arrays(const std::vector<std::vector<cd>> &v)
{
    std::vector<CVector> out;
    out.reserve(v.size());
    for (const auto &x : v)
        out.push_back(Eigen::Map<const CVector>(x.data(), static_cast<Eigen::Index>(x.size())));
    return out;
}

FilterBank design(const std::string &kind, const std::vector<CVector> &waveforms, std::size_t L_f,
                  std::optional<std::size_t> peak_index, double mu, std::size_t iters)
{
    const auto s = to_samples(waveforms);
    switch (design_kind_from_string(kind))
    {
    case DesignKind::coherent_linear:
        return design_coherent_linear(s, L_f, peak_index);
    case DesignKind::coherent_circular:
        return design_coherent_circular(s, L_f, peak_index);
    case DesignKind::baseline_ls:
        return design_uncoherent_ls_baseline(s, L_f, peak_index);
    case DesignKind::baseline_penalized:
        return design_penalized_iterative_baseline(s, mu, iters, L_f, peak_index);
    }
    throw InvalidArgument("unknown design");
}

py::dict report_dict(const DesignReport &r)
{
    py::dict d;
    d["coherence_error"] = r.coherence_error;
    d["psl_db"] = r.psl_db;
    d["isl_db"] = r.isl_db;
    d["objective_residual"] = r.objective_residual;
    d["constraint_residual"] = r.constraint_residual;
    d["cond_gram"] = r.cond_gram;
    d["cond_D"] = r.cond_D;
    d["mainlobe"] = r.mainlobe;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Coherent receive filter banks for DFRC waveform alphabets";
    m.attr("__version__") = "0.1.0";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
    py::register_exception<DimensionError>(m, "DimensionError", base.ptr());
    py::register_exception<ConditioningError>(m, "ConditioningError", base.ptr());
    py::register_exception<InfeasibleError>(m, "InfeasibleError", base.ptr());

    m.def(
        "make_alphabet",
        [](std::size_t K, std::size_t n_chips, double chip_duration, double sample_rate, const std::string &kind,
           std::uint64_t seed) {
            const auto p = ModulationParams::make(n_chips, chip_duration, sample_rate, 0.0);
            return to_arrays(alphabet_samples(make_alphabet(K, p, modulation_from_string(kind), seed)));
        },
        py::arg("K") = 4, py::arg("n_chips") = 30, py::arg("chip_duration") = 1e-3, py::arg("sample_rate") = 3000.0,
        py::arg("kind") = "dpsk", py::arg("seed") = 1, "K baseband waveforms as complex arrays");

    m.def(
        "check_feasibility",
        [](std::size_t K, std::size_t L, std::size_t L_f) {
            const auto f = check_feasibility(K, L, L_f);
            py::dict d;
            d["feasible"] = f.feasible;
            d["lower_lhs"] = f.lower_lhs;
            d["middle"] = f.middle;
            d["upper_rhs"] = f.upper_rhs;
            d["on_lower_bound"] = f.on_lower_bound();
            d["violated"] = f.violated;
            return d;
        },
        py::arg("K"), py::arg("L"), py::arg("L_f"));
    m.def("default_filter_length", &default_filter_length, py::arg("K"), py::arg("L"));

    m.def(
        "block_system",
        [](const std::vector<CVector> &waveforms, std::size_t L_f, std::optional<std::size_t> peak_index,
           const std::string &flavor) {
            const auto sys = assemble_block_system(to_samples(waveforms), L_f, peak_index, flavor_from_string(flavor));
            return py::make_tuple(sys.X, sys.Xtil, sys.e, sys.peak_index);
        },
        py::arg("waveforms"), py::arg("L_f"), py::arg("peak_index") = py::none(), py::arg("flavor") = "linear",
        "(X, Xtil, e, peak_index) of the stacked design problem");

    m.def("solve_oracle", &solve_constrained_ls_oracle, py::arg("X"), py::arg("Xtil"), py::arg("e"),
          py::arg("rank_tol") = kRankThreshold, "nullspace-projection reference solution");

    py::class_<FilterBank>(m, "FilterBank")
        .def_property_readonly("filters", [](const FilterBank &b) { return b.filters; })
        .def_property_readonly("flavor", [](const FilterBank &b) { return to_string(b.flavor); })
        .def_property_readonly("design", [](const FilterBank &b) { return to_string(b.design); })
        .def_readonly("peak_index", &FilterBank::peak_index)
        .def_readonly("L", &FilterBank::L)
        .def_readonly("L_f", &FilterBank::L_f)
        .def_readonly("cond_gram", &FilterBank::cond_gram)
        .def_readonly("cond_D", &FilterBank::cond_D)
        .def_readonly("constraint_rank", &FilterBank::constraint_rank)
        .def_readonly("warnings", &FilterBank::warnings)
        .def_readonly("objective_history", &FilterBank::objective_history)
        .def("stacked", &FilterBank::stacked)
        .def("__len__", &FilterBank::K)
        .def("__repr__", [](const FilterBank &b) {
            return "<FilterBank " + to_string(b.design) + " K=" + std::to_string(b.K()) +
                   " length=" + std::to_string(b.length()) + ">";
        });

    m.def("design", &design, py::arg("kind"), py::arg("waveforms"), py::arg("L_f"),
          py::arg("peak_index") = py::none(), py::arg("mu") = 10.0, py::arg("iters") = 50,
          "kind: coherent-linear, coherent-circular, baseline-LS or baseline-penalized");

    m.def(
        "evaluate",
        [](const FilterBank &bank, const std::vector<CVector> &waveforms) {
            return report_dict(evaluate_filterbank(bank, to_samples(waveforms)));
        },
        py::arg("bank"), py::arg("waveforms"));
    m.def(
        "responses",
        [](const FilterBank &bank, const std::vector<CVector> &waveforms) {
            return to_arrays(filter_responses(bank, to_samples(waveforms)));
        },
        py::arg("bank"), py::arg("waveforms"));

    m.def(
        "range_doppler_map",
        [](const CMatrix &filtered, const std::string &window) {
            DataMatrix d;
            d.entries = filtered;
            const auto map = range_doppler_map(d, doppler_window_from_string(window));
            return py::make_tuple(map.magnitudes, map.doppler_axis);
        },
        py::arg("filtered"), py::arg("window") = "rectangular", "(magnitudes, doppler_axis)");

    m.def("wilson_interval", &wilson_interval, py::arg("hits"), py::arg("trials"),
          py::arg("z") = 1.959963984540054);

    m.def(
        "selftest",
        [](std::size_t instances, std::uint64_t seed) {
            const auto r = run_oracle_selftest(instances, seed);
            py::dict d;
            d["passed"] = r.passed();
            d["instances"] = r.cases.size();
            d["max_rel_error"] = r.max_rel_error;
            return d;
        },
        py::arg("instances") = 100, py::arg("seed") = 7);

    m.def(
        "config_hash", [](const std::string &text) { return io::config_hash(nlohmann::json::parse(text)); },
        py::arg("config_json"));
    m.def(
        "validate_config",
        [](const std::string &text) {
            const auto c = parse_config(nlohmann::json::parse(text, nullptr, true, true));
            py::dict d;
            d["K"] = c.K;
            d["L"] = c.L();
            d["L_f"] = c.resolved_L_f();
            std::vector<std::string> names;
            for (auto k : c.designs)
                names.push_back(to_string(k));
            d["designs"] = names;
            return d;
        },
        py::arg("config_json"), "parse a JSON config; raises on unknown keys or infeasible dimensions");
}
