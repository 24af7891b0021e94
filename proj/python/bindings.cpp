#include "lzpred/error.hpp"
#include "lzpred/pipeline.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace lzpred;

namespace {

py::dict coding_dict(const CodingReport& r) {
    py::dict d;
    d["symbols"] = r.symbols_consumed;
    d["bits"] = r.bits_emitted;
    d["phrases"] = r.phrases;
    d["rate"] = r.rate;
    return d;
}

// Keys mirror the CLI config file; unknown keys are a ConfigError.
RunConfig run_config(const py::dict& kw) {
    RunConfig c;
    for (auto [k, v] : kw) {
        const auto key = py::cast<std::string>(k);
        if (key == "network") c.network = py::cast<std::string>(v);
        else if (key == "trajectories") c.trajectories = py::cast<std::string>(v);
        else if (key == "source") c.source = py::cast<std::string>(v);
        else if (key == "length_law") c.length_law = py::cast<std::string>(v);
        else if (key == "count") c.synth_count = py::cast<std::size_t>(v);
        else if (key == "scheme") c.scheme = py::cast<std::string>(v);
        else if (key == "min_group_count") c.min_group_count = py::cast<std::size_t>(v);
        else if (key == "min_group_labels") c.min_group_labels = py::cast<std::size_t>(v);
        else if (key == "max_invalid_fraction") c.max_invalid_fraction = py::cast<double>(v);
        else if (key == "seed") c.seed = py::cast<std::uint64_t>(v);
        else if (key == "fano_alphabet") c.fano_alphabet = py::str(v);
        else if (key == "first_edge") c.first_edge = py::cast<std::string>(v);
        else if (key == "with_replacement") c.with_replacement = py::cast<bool>(v);
        else if (key == "target_symbols") c.target_symbols = py::cast<std::uint64_t>(v);
        else if (key == "max_symbols") c.max_symbols = py::cast<std::uint64_t>(v);
        else if (key == "workers") c.workers = py::cast<unsigned>(v);
        else throw ConfigError("unknown run setting '" + key + "'");
    }
    return c;
}

BiasConfig bias_config(const py::dict& kw) {
    BiasConfig c;
    for (auto [k, v] : kw) {
        const auto key = py::cast<std::string>(k);
        if (key == "network") c.network = py::cast<std::string>(v);
        else if (key == "source") c.source = py::cast<std::string>(v);
        else if (key == "length_law") c.length_law = py::cast<std::string>(v);
        else if (key == "count") c.count = py::cast<std::size_t>(v);
        else if (key == "scale") c.scale = py::cast<std::size_t>(v);
        else if (key == "scheme") c.scheme = py::cast<std::string>(v);
        else if (key == "seed") c.seed = py::cast<std::uint64_t>(v);
        else if (key == "fano_alphabet") c.fano_alphabet = py::str(v);
        else if (key == "first_edge") c.first_edge = py::cast<std::string>(v);
        else if (key == "min_group_labels") c.min_group_labels = py::cast<std::size_t>(v);
        else if (key == "workers") c.workers = py::cast<unsigned>(v);
        else throw ConfigError("unknown bias setting '" + key + "'");
    }
    return c;
}

}  // namespace

PYBIND11_MODULE(_lzpred, m) {
    m.doc() = "LZW coding rates and Fano predictability bounds for road-network trajectories";
    m.attr("__version__") = kToolVersion;

    auto base = py::register_exception<Error>(m, "Error", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ParseError", base.ptr());
    py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<CodecError>(m, "CodecError", base.ptr());

    m.def("code_width", &code_width, py::arg("dictionary_size"));
    m.def(
        "lzw_encode",
        [](const std::vector<Symbol>& symbols, std::size_t alphabet_size) {
            auto r = lzw_encode(symbols, alphabet_size);
            py::dict d = coding_dict(r.report);
            d["codes"] = r.stream.codes;
            d["final_dictionary_size"] = r.stream.final_dictionary_size;
            return d;
        },
        py::arg("symbols"), py::arg("alphabet_size"));
    m.def(
        "lzw_decode",
        [](const std::vector<Code>& codes, std::size_t alphabet_size) {
            return lzw_decode(CodeStream{codes, alphabet_size, 0});
        },
        py::arg("codes"), py::arg("alphabet_size"));
    m.def(
        "lzw_rate", [](const std::vector<Symbol>& symbols, std::size_t alphabet_size) {
            LzwEncoder enc(alphabet_size, false);
            for (Symbol s : symbols) enc.push(s);
            return enc.finish().report.rate;
        },
        py::arg("symbols"), py::arg("alphabet_size"));

    m.def("binary_entropy", &binary_entropy, py::arg("p"));
    m.def(
        "fano_hf", [](double p, std::size_t s) { return fano_hf(p, AlphabetSize(s)); }, py::arg("p"),
        py::arg("alphabet_size"));
    m.def(
        "invert_fano", [](double h, std::size_t s) { return invert_fano(h, AlphabetSize(s)); }, py::arg("h"),
        py::arg("alphabet_size"));
    m.def(
        "group_predictability",
        [](double rate, std::size_t n, std::size_t s, const std::string& first_edge) {
            auto g = group_predictability(rate, n, AlphabetSize(s), 1.0, parse_first_edge_correction(first_edge));
            py::dict d;
            d["n"] = g.n;
            d["rate_hat"] = g.rate_hat;
            d["pi_n"] = g.pi_n;
            d["pi_hat_n"] = g.pi_hat_n;
            return d;
        },
        py::arg("rate_hat"), py::arg("n"), py::arg("alphabet_size"), py::arg("first_edge") = "renormalize");

    m.def(
        "analytic_truth",
        [](const std::string& network, const std::string& source, const std::string& length_law, std::uint64_t seed) {
            auto src = make_source_from_spec(resolve_network(network), source, stage_seed(seed, SeedStream::source));
            return truth_json(src, LengthLaw::parse(length_law));
        },
        py::arg("network") = "builtin:grid:20x20", py::arg("source") = "dirichlet:0.2",
        py::arg("length_law") = "uniform:30:40", py::arg("seed") = 1,
        "Ground-truth JSON for the synthetic source `run` would draw with this seed.");

    m.def(
        "run_json",
        [](const py::kwargs& kw) {
            const auto cfg = run_config(kw);
            py::gil_scoped_release release;
            return report_json(run_experiment(cfg));
        },
        "Three-stage experiment; keyword settings as in the CLI config file. Returns report JSON text.");
    m.def(
        "demonstrate_bias_json",
        [](const py::kwargs& kw) {
            const auto cfg = bias_config(kw);
            py::gil_scoped_release release;
            return report_json(demonstrate_bias(cfg));
        },
        "Coding estimate against the analytic optimum. Returns bias report JSON text.");
}
