#include "lzpred/pipeline.hpp"

#include "lzpred/error.hpp"
#include "lzpred/rng.hpp"
#include "text_util.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>

namespace lzpred {

using ojson = nlohmann::ordered_json;

namespace {

template <class Fn>
void parallel_for(std::size_t count, unsigned workers, Fn fn) {
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = next++; i < count; i = next++) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

CodingReport code_stream(std::span<const Symbol> symbols, std::size_t alphabet) {
    LzwEncoder enc(alphabet, false);
    for (Symbol s : symbols) enc.push(s);
    return enc.finish().report;
}

unsigned ceil_log2(std::size_t n) {
    unsigned b = 0;
    while ((std::size_t{1} << b) < n) ++b;
    return b;
}

}  // namespace

FanoAlphabetPolicy FanoAlphabetPolicy::parse(const std::string& text) {
    if (text == "observed") return {};
    auto v = detail::parse_int(text);
    if (!v || *v < 2) throw ConfigError("Fano alphabet must be 'observed' or an integer >= 2, got '" + text + "'");
    return {static_cast<std::size_t>(*v)};
}

std::string FanoAlphabetPolicy::text() const { return fixed ? std::to_string(*fixed) : "observed"; }

AlphabetSize FanoAlphabetPolicy::resolve(std::span<const Symbol> stream) const {
    if (fixed) return AlphabetSize(*fixed);
    Symbol top = 0;
    for (Symbol s : stream) top = std::max(top, s);
    return AlphabetSize(std::max<std::size_t>(2, static_cast<std::size_t>(top) + 1));
}

RawStage run_stage_raw(const TrajectoryCorpus& c, std::uint64_t seed) {
    auto seq = build_raw_terminated_sequence(c, seed);
    RawStage r;
    r.coding = code_stream(seq.symbols, seq.alphabet_size());
    r.edges = c.total_edges();
    r.alphabet = seq.alphabet_size();
    r.naive_bits = ceil_log2(c.edge_count());
    r.bits_per_edge = static_cast<double>(r.coding.bits_emitted) / static_cast<double>(r.edges);
    return r;
}

LabeledStage run_stage_labeled(const TrajectoryCorpus& c, const LabelingScheme& s, std::uint64_t seed,
                               const FanoAlphabetPolicy& alphabet) {
    auto seq = build_terminated_sequence(c, s, seed);
    LabeledStage r;
    r.scheme = s.name();
    r.coding = code_stream(seq.symbols, seq.alphabet_size());
    r.labels = seq.symbols.size() - seq.trajectories;
    r.alphabet = seq.alphabet_size();
    const AlphabetSize fano = alphabet.resolve(seq.symbols);
    r.fano_alphabet = fano.value();
    r.naive_pi = invert_fano(r.coding.rate, fano);
    r.bits_per_edge = r.labels ? static_cast<double>(r.coding.bits_emitted) / static_cast<double>(r.labels) : 0.0;
    return r;
}

FusedStage run_stage_fused(const TrajectoryCorpus& c, const LabelingScheme& s, const FusedOptions& opts,
                           const MarkovSource* truth) {
    const GroupingResult grouping = group_by_length(c, opts.grouping);
    FusedStage f;
    f.scheme = s.name();
    f.first_edge = to_string(opts.first_edge);
    f.coverage = grouping.coverage;
    f.excluded_trajectories = grouping.excluded_trajectories;
    f.singleton_trajectories = grouping.singleton_trajectories;
    f.groups.resize(grouping.groups.size());

    parallel_for(grouping.groups.size(), opts.workers, [&](std::size_t i) {
        const LengthGroup& g = grouping.groups[i];
        FusedGroup& out = f.groups[i];
        out.seed = derive_seed(opts.seed, g.n);
        const auto seq = build_group_sequence(c, g, s, out.seed, opts.construct);
        out.source_count = seq.source_count;
        out.symbols = seq.symbols.size();
        out.coding = code_stream(seq.symbols, seq.alphabet_size);
        out.estimate = group_predictability(out.coding.rate, g.n, opts.alphabet.resolve(seq.symbols), g.weight, opts.first_edge);
        if (truth) {
            out.analytic_accuracy = analytic_optimal_accuracy(*truth, g.n);
            out.analytic_label_rate = analytic_label_rate(*truth, g.n);
        }
    });

    std::vector<GroupEstimate> estimates;
    std::vector<GroupEntropy> entropies;
    std::uint64_t bits = 0, symbols = 0;
    for (const auto& g : f.groups) {
        estimates.push_back(g.estimate);
        entropies.push_back({g.estimate.n - 1, g.estimate.weight, g.estimate.rate_hat * static_cast<double>(g.estimate.n - 1)});
        bits += g.coding.bits_emitted;
        symbols += g.symbols;
    }
    f.aggregate_pi = aggregate(std::move(estimates)).aggregate_pi;
    f.mixed = mixed_length_rate(entropies);
    f.bits_per_edge = symbols ? static_cast<double>(bits) / static_cast<double>(symbols) : 0.0;
    return f;
}

namespace {

GroundTruthSummary summarize_truth(const MarkovSource& src, const LengthLaw& law, const FusedStage* fused) {
    GroundTruthSummary t;
    std::ostringstream name;
    name << src.family << " seed " << src.seed;
    t.source = name.str();
    t.length_law = law.text();
    double mass = 0.0;
    for (const auto& row : ground_truth(src, law)) {
        if (row.n < 2) continue;
        mass += row.probability;
        t.optimal_accuracy += row.probability * row.optimal_accuracy;
        t.label_rate += row.probability * row.label_rate;
    }
    if (mass > 0.0) {
        t.optimal_accuracy /= mass;
        t.label_rate /= mass;
    }
    t.entropy_rate = analytic_entropy_rate(src);
    if (fused) {
        for (const auto& g : fused->groups)
            t.retained_optimal_accuracy += g.estimate.weight * g.analytic_accuracy.value_or(0.0);
        t.fused_below_truth = fused->aggregate_pi < t.retained_optimal_accuracy;
    }
    return t;
}

FusedOptions fused_options(const RunConfig& cfg) {
    FusedOptions o;
    o.grouping.min_group_count = cfg.min_group_count;
    o.grouping.min_group_labels = cfg.min_group_labels;
    o.construct.with_replacement = cfg.with_replacement;
    o.construct.target_symbols = cfg.target_symbols;
    o.construct.max_symbols = cfg.max_symbols;
    o.alphabet = FanoAlphabetPolicy::parse(cfg.fano_alphabet);
    o.first_edge = parse_first_edge_correction(cfg.first_edge);
    o.seed = stage_seed(cfg.seed, SeedStream::fused);
    o.workers = cfg.workers;
    return o;
}

}  // namespace

PreparedInputs prepare_inputs(const RunConfig& cfg) {
    PreparedInputs in;
    in.net = resolve_network(cfg.network);
    if (cfg.trajectories.empty()) {
        in.law = LengthLaw::parse(cfg.length_law);
        in.source = make_source_from_spec(in.net, cfg.source, stage_seed(cfg.seed, SeedStream::source));
        in.corpus = sample_corpus(*in.source, *in.law, cfg.synth_count, stage_seed(cfg.seed, SeedStream::corpus));
    } else {
        IngestOptions io;
        io.max_invalid_fraction = cfg.max_invalid_fraction;
        in.corpus = ingest_corpus_file(cfg.trajectories, in.net, io);
    }
    return in;
}

ExperimentReport run_experiment(const RunConfig& cfg) { return run_experiment(cfg, prepare_inputs(cfg)); }

ExperimentReport run_experiment(const RunConfig& cfg, const PreparedInputs& in) {
    const SchemeSpec spec = parse_scheme_spec(cfg.scheme);
    const FusedOptions fopts = fused_options(cfg);  // validates the remaining options up front

    ExperimentReport r;
    r.config = cfg;
    r.corpus.trajectories = in.corpus.size();
    r.corpus.edges = in.corpus.total_edges();
    r.corpus.mean_length = mean_length(in.corpus);
    r.corpus.invalid_records = in.corpus.invalid_records;
    r.corpus.network_vertices = in.net.vertex_count();
    r.corpus.network_edges = in.net.edge_count();
    r.corpus.max_out_degree = in.net.max_out_degree();

    r.raw = run_stage_raw(in.corpus, stage_seed(cfg.seed, SeedStream::raw));

    const auto labeled_seed = stage_seed(cfg.seed, SeedStream::labeled);
    const auto mel = build_mel(in.net, in.corpus);
    const auto rml = build_rml(in.net, in.corpus);
    r.labeled.push_back(run_stage_labeled(in.corpus, mel, labeled_seed, fopts.alphabet));
    r.labeled.push_back(run_stage_labeled(in.corpus, rml, labeled_seed, fopts.alphabet));
    std::optional<LabelingScheme> custom;
    if (spec.kind == SchemeKind::ctx) {
        custom = build_ctx(in.net, in.corpus, spec.order);
        r.labeled.push_back(run_stage_labeled(in.corpus, *custom, labeled_seed, fopts.alphabet));
    }
    const LabelingScheme& chosen = custom ? *custom : spec.kind == SchemeKind::mel ? mel : rml;

    const MarkovSource* truth = in.source ? &*in.source : nullptr;
    r.fused = run_stage_fused(in.corpus, chosen, fopts, truth);

    const LabeledStage& chosen_labeled = spec.kind == SchemeKind::mel ? r.labeled[0] : r.labeled.back();
    r.comparable_column_monotone =
        r.raw.bits_per_edge >= chosen_labeled.bits_per_edge && chosen_labeled.bits_per_edge >= r.fused.bits_per_edge;

    if (in.source && in.law) {
        r.truth = summarize_truth(*in.source, *in.law, &r.fused);
        r.truth->labeled_below_truth = chosen_labeled.naive_pi < r.truth->optimal_accuracy;
    }
    return r;
}

BiasReport demonstrate_bias(const BiasConfig& cfg) {
    if (cfg.count < 1 || cfg.scale < 1) throw ConfigError("bias demonstration needs count >= 1 and scale >= 1");
    const SchemeSpec spec = parse_scheme_spec(cfg.scheme);
    const auto law = LengthLaw::parse(cfg.length_law);
    const auto src = make_source_from_spec(resolve_network(cfg.network), cfg.source, stage_seed(cfg.seed, SeedStream::source));

    FusedOptions fopts;
    fopts.grouping.min_group_labels = cfg.min_group_labels;
    fopts.alphabet = FanoAlphabetPolicy::parse(cfg.fano_alphabet);
    fopts.first_edge = parse_first_edge_correction(cfg.first_edge);
    fopts.seed = stage_seed(cfg.seed, SeedStream::fused);
    fopts.workers = cfg.workers;

    BiasReport r;
    r.config = cfg;
    {
        const auto small = sample_corpus(src, law, cfg.count, stage_seed(cfg.seed, SeedStream::corpus));
        const auto scheme = build_scheme(src.net, small, spec);
        r.small_labeled = run_stage_labeled(small, scheme, stage_seed(cfg.seed, SeedStream::labeled), fopts.alphabet);
        // a small corpus may leave no group above the label floor
        FusedOptions small_opts = fopts;
        small_opts.grouping.min_group_labels = 0;
        r.small_fused = run_stage_fused(small, scheme, small_opts, &src);
    }
    {
        const auto large = sample_corpus(src, law, cfg.count * cfg.scale, stage_seed(cfg.seed, SeedStream::large_corpus));
        const auto scheme = build_scheme(src.net, large, spec);
        r.large_fused = run_stage_fused(large, scheme, fopts, &src);
    }
    r.truth = summarize_truth(src, law, &r.large_fused);
    r.truth.labeled_below_truth = r.small_labeled.naive_pi < r.truth.optimal_accuracy;
    r.gap_small = r.truth.optimal_accuracy - r.small_labeled.naive_pi;
    r.gap_large = r.truth.optimal_accuracy - r.large_fused.aggregate_pi;
    r.bias_demonstrated = r.gap_small >= 0.02;
    r.gap_halved = std::abs(r.gap_large) <= 0.5 * r.gap_small;
    return r;
}

namespace {

ojson to_json(const CodingReport& c) {
    return ojson{{"symbols", c.symbols_consumed}, {"bits", c.bits_emitted}, {"phrases", c.phrases}, {"rate", c.rate}};
}

ojson to_json(const RunConfig& c) {
    return ojson{{"network", c.network},
                 {"trajectories", c.trajectories},
                 {"source", c.source},
                 {"length_law", c.length_law},
                 {"synth_count", c.synth_count},
                 {"scheme", c.scheme},
                 {"min_group_count", c.min_group_count},
                 {"min_group_labels", c.min_group_labels},
                 {"max_invalid_fraction", c.max_invalid_fraction},
                 {"seed", c.seed},
                 {"fano_alphabet", c.fano_alphabet},
                 {"first_edge", c.first_edge},
                 {"with_replacement", c.with_replacement},
                 {"target_symbols", c.target_symbols},
                 {"max_symbols", c.max_symbols},
                 {"workers", c.workers}};
}

ojson to_json(const RawStage& r) {
    return ojson{{"coding", to_json(r.coding)}, {"edges", r.edges}, {"alphabet", r.alphabet},
                 {"naive_bits", r.naive_bits}, {"bits_per_edge", r.bits_per_edge}};
}

ojson to_json(const LabeledStage& r) {
    return ojson{{"scheme", r.scheme}, {"coding", to_json(r.coding)}, {"labels", r.labels}, {"alphabet", r.alphabet},
                 {"fano_alphabet", r.fano_alphabet}, {"naive_pi", r.naive_pi}, {"bits_per_edge", r.bits_per_edge}};
}

ojson to_json(const FusedStage& f) {
    ojson groups = ojson::array();
    for (const auto& g : f.groups) {
        ojson row{{"n", g.estimate.n},         {"weight", g.estimate.weight}, {"rate_hat", g.estimate.rate_hat},
                  {"pi_n", g.estimate.pi_n},   {"pi_hat_n", g.estimate.pi_hat_n}, {"fano_alphabet", g.estimate.alphabet},
                  {"source_count", g.source_count}, {"symbols", g.symbols}, {"seed", g.seed}, {"coding", to_json(g.coding)}};
        if (g.analytic_accuracy) row["analytic_accuracy"] = *g.analytic_accuracy;
        if (g.analytic_label_rate) row["analytic_label_rate"] = *g.analytic_label_rate;
        groups.push_back(std::move(row));
    }
    return ojson{{"scheme", f.scheme},
                 {"first_edge", f.first_edge},
                 {"aggregate_pi", f.aggregate_pi},
                 {"coverage", f.coverage},
                 {"excluded_trajectories", f.excluded_trajectories},
                 {"singleton_trajectories", f.singleton_trajectories},
                 {"bits_per_edge", f.bits_per_edge},
                 {"mixed_length", {{"mixed_rate", f.mixed.mixed_rate}, {"per_length_rate", f.mixed.per_length_rate}, {"certifying", f.mixed.certifying}}},
                 {"groups", std::move(groups)}};
}

ojson to_json(const GroundTruthSummary& t) {
    return ojson{{"source", t.source},
                 {"length_law", t.length_law},
                 {"optimal_accuracy", t.optimal_accuracy},
                 {"retained_optimal_accuracy", t.retained_optimal_accuracy},
                 {"label_rate", t.label_rate},
                 {"entropy_rate", t.entropy_rate},
                 {"fused_below_truth", t.fused_below_truth},
                 {"labeled_below_truth", t.labeled_below_truth}};
}

// Published measurements on a proprietary taxi corpus; recorded for
// comparison, never recomputed.
ojson reference_constants() {
    ojson inversions = ojson::array();
    for (std::size_t s : {6, 7})
        inversions.push_back({{"fano_alphabet", s},
                              {"mel", invert_fano(1.15, AlphabetSize(s))},
                              {"rml", invert_fano(1.12, AlphabetSize(s))}});
    return ojson{{"origin", "published taxi-corpus measurements; not reproducible from this toolkit's inputs"},
                 {"raw_rate_bits", 15.94},
                 {"raw_naive_bits", 16},
                 {"mel_rate_bits", 1.15},
                 {"rml_rate_bits", 1.12},
                 {"mel_bound", 0.819},
                 {"rml_bound", 0.823},
                 {"fused_bound", 0.853},
                 {"model_accuracy", 0.878},
                 {"inversions", std::move(inversions)}};
}

}  // namespace

std::string report_json(const ExperimentReport& r) {
    ojson stages_labeled = ojson::array();
    for (const auto& l : r.labeled) stages_labeled.push_back(to_json(l));
    ojson j{{"tool", "lzpred"},
            {"version", kToolVersion},
            {"config", to_json(r.config)},
            {"corpus", {{"trajectories", r.corpus.trajectories},
                        {"edges", r.corpus.edges},
                        {"mean_length", r.corpus.mean_length},
                        {"invalid_records", r.corpus.invalid_records},
                        {"network_vertices", r.corpus.network_vertices},
                        {"network_edges", r.corpus.network_edges},
                        {"max_out_degree", r.corpus.max_out_degree}}},
            {"raw", to_json(r.raw)},
            {"labeled", std::move(stages_labeled)},
            {"fused", to_json(r.fused)},
            {"comparable_column_monotone", r.comparable_column_monotone},
            {"reference_constants", reference_constants()}};
    if (r.truth) j["ground_truth"] = to_json(*r.truth);
    return j.dump(2) + "\n";
}

std::string report_json(const BiasReport& r) {
    const auto& c = r.config;
    ojson j{{"tool", "lzpred"},
            {"version", kToolVersion},
            {"config", {{"network", c.network}, {"source", c.source}, {"length_law", c.length_law}, {"count", c.count},
                        {"scale", c.scale}, {"scheme", c.scheme}, {"seed", c.seed}, {"fano_alphabet", c.fano_alphabet},
                        {"first_edge", c.first_edge}, {"min_group_labels", c.min_group_labels}, {"workers", c.workers}}},
            {"ground_truth", to_json(r.truth)},
            {"small_labeled", to_json(r.small_labeled)},
            {"small_fused", to_json(r.small_fused)},
            {"large_fused", to_json(r.large_fused)},
            {"gap_small", r.gap_small},
            {"gap_large", r.gap_large},
            {"bias_demonstrated", r.bias_demonstrated},
            {"gap_halved", r.gap_halved}};
    return j.dump(2) + "\n";
}

std::string group_table_csv(const FusedStage& f) {
    std::ostringstream out;
    out.precision(17);
    out << "n,weight,rate_hat,pi_n,pi_hat_n\n";
    for (const auto& g : f.groups)
        out << g.estimate.n << ',' << g.estimate.weight << ',' << g.estimate.rate_hat << ',' << g.estimate.pi_n << ','
            << g.estimate.pi_hat_n << '\n';
    return out.str();
}

std::string summary_markdown(const ExperimentReport& r) {
    std::ostringstream out;
    out.setf(std::ios::fixed);
    out.precision(4);
    out << "# Predictability run\n\n";
    out << "Corpus: " << r.corpus.trajectories << " trajectories, mean length " << r.corpus.mean_length << ", network "
        << r.corpus.network_edges << " edges / " << r.corpus.network_vertices << " vertices, max out-degree "
        << r.corpus.max_out_degree << ".\n\n";
    out << "| stage | input | bits/symbol | bits/edge | bound |\n";
    out << "|---|---|---|---|---|\n";
    out << "| raw | edge ids + terminators | " << r.raw.coding.rate << " | " << r.raw.bits_per_edge << " | naive "
        << r.raw.naive_bits << " bits |\n";
    for (const auto& l : r.labeled)
        out << "| labeled | " << l.scheme << " labels + terminators | " << l.coding.rate << " | " << l.bits_per_edge
            << " | " << l.naive_pi << " (S=" << l.fano_alphabet << ") |\n";
    out << "| fused | " << r.fused.scheme << " labels, per length group | " << r.fused.bits_per_edge << " | "
        << r.fused.bits_per_edge << " | " << r.fused.aggregate_pi << " |\n\n";
    out << "Fused stage: " << r.fused.groups.size() << " groups, coverage " << r.fused.coverage << ", first-edge correction "
        << r.fused.first_edge << ".\n";
    out << "Mixed-length rate E[H]/E[N] = " << r.fused.mixed.mixed_rate << " vs E[H/N] = " << r.fused.mixed.per_length_rate
        << " (mixed rate is not a valid bound input).\n";
    if (r.truth) {
        out << "\nGround truth: optimal accuracy " << r.truth->optimal_accuracy << " (retained groups "
            << r.truth->retained_optimal_accuracy << "), label rate " << r.truth->label_rate << " bits.\n";
        out << "Fused estimate " << (r.truth->fused_below_truth ? "falls below" : "does not fall below")
            << " the achievable accuracy.\n";
    }
    return out.str();
}

std::string truth_json(const MarkovSource& src, const LengthLaw& law) {
    ojson rows = ojson::array();
    for (const auto& row : ground_truth(src, law))
        rows.push_back({{"n", row.n}, {"probability", row.probability}, {"entropy", row.entropy},
                        {"label_rate", row.label_rate}, {"optimal_accuracy", row.optimal_accuracy}});
    ojson j{{"family", src.family},
            {"seed", src.seed},
            {"length_law", law.text()},
            {"mean_length", law.mean()},
            {"initial_entropy", analytic_initial_entropy(src)},
            {"entropy_rate", analytic_entropy_rate(src)},
            {"groups", std::move(rows)}};
    return j.dump(2) + "\n";
}

std::filesystem::path emit_report(const ExperimentReport& r, ReportFormat format, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
    std::filesystem::path path;
    std::string body;
    switch (format) {
        case ReportFormat::json: path = dir / "report.json"; body = report_json(r); break;
        case ReportFormat::csv: path = dir / "groups.csv"; body = group_table_csv(r.fused); break;
        case ReportFormat::markdown: path = dir / "summary.md"; body = summary_markdown(r); break;
    }
    std::ofstream out(path, std::ios::binary);
    out << body;
    if (!out) throw ConfigError("cannot write " + path.string());
    return path;
}

}  // namespace lzpred
