#pragma once

#include "lzpred/corpus.hpp"
#include "lzpred/labeling.hpp"
#include "lzpred/lzcoder.hpp"
#include "lzpred/netmodel.hpp"
#include "lzpred/predictability.hpp"
#include "lzpred/rng.hpp"
#include "lzpred/seqbuild.hpp"
#include "lzpred/synthlab.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace lzpred {

inline constexpr const char* kToolVersion = "0.1.0";

// Sub-seed streams of one run. The step-by-step CLI commands draw from the
// same streams, so synth + construct + estimate reproduce `run`.
enum class SeedStream : std::uint64_t { source = 0, corpus = 1, raw = 2, labeled = 3, fused = 4, large_corpus = 5 };
constexpr std::uint64_t stage_seed(std::uint64_t master, SeedStream s) noexcept {
    return derive_seed(master, static_cast<std::uint64_t>(s));
}

// Alphabet size used when inverting the Fano bound: the largest symbol seen in
// the coded stream plus one, or a fixed value.
struct FanoAlphabetPolicy {
    std::optional<std::size_t> fixed;

    static FanoAlphabetPolicy parse(const std::string& text);  // "observed" or an integer >= 2
    std::string text() const;
    AlphabetSize resolve(std::span<const Symbol> stream) const;
};

struct RunConfig {
    // Input: a network spec (path or builtin:...) plus a trajectory file, or a
    // synthetic source when `trajectories` is empty.
    std::string network = "builtin:grid:20x20";
    std::string trajectories;
    std::string source = "dirichlet:0.2";  // see make_source_from_spec
    std::string length_law = "uniform:30:40";
    std::size_t synth_count = 10'000;

    std::string scheme = "rml";
    std::size_t min_group_count = 1;
    std::size_t min_group_labels = 10'000;
    double max_invalid_fraction = 0.01;
    std::uint64_t seed = 1;
    std::string fano_alphabet = "observed";
    std::string first_edge = "renormalize";
    bool with_replacement = false;
    std::uint64_t target_symbols = 10'000;
    std::uint64_t max_symbols = 10'000'000;
    unsigned workers = 1;
};

struct RawStage {
    CodingReport coding;
    std::uint64_t edges = 0;         // symbols excluding terminators
    std::size_t alphabet = 0;        // |E| + terminator
    unsigned naive_bits = 0;         // ceil(log2 |E|)
    double bits_per_edge = 0.0;
};

struct LabeledStage {
    std::string scheme;
    CodingReport coding;
    std::uint64_t labels = 0;        // symbols excluding terminators
    std::size_t alphabet = 0;        // label alphabet + terminator
    std::size_t fano_alphabet = 0;
    double naive_pi = 0.0;           // invert_fano(rate) with no length correction
    double bits_per_edge = 0.0;
};

struct FusedGroup {
    GroupEstimate estimate;
    std::uint64_t source_count = 0;
    std::uint64_t symbols = 0;
    std::uint64_t seed = 0;
    CodingReport coding;
    std::optional<double> analytic_accuracy;
    std::optional<double> analytic_label_rate;
};

struct FusedStage {
    std::string scheme;
    std::string first_edge;
    std::vector<FusedGroup> groups;
    double aggregate_pi = 0.0;
    double coverage = 0.0;
    std::uint64_t excluded_trajectories = 0;
    std::uint64_t singleton_trajectories = 0;
    double bits_per_edge = 0.0;
    MixedLengthComparison mixed;     // from measured per-group label entropies
};

struct FusedOptions {
    GroupingOptions grouping;
    ConstructOptions construct;
    FanoAlphabetPolicy alphabet;
    FirstEdgeCorrection first_edge = FirstEdgeCorrection::renormalize;
    std::uint64_t seed = 1;
    unsigned workers = 1;
};

struct GroundTruthSummary {
    std::string source;              // row family and seed of the source
    std::string length_law;
    double optimal_accuracy = 0.0;   // sum_n Pr[N=n] * accuracy over positions 2..n
    double retained_optimal_accuracy = 0.0;  // same, over the fused stage's groups and weights
    double label_rate = 0.0;         // sum_n Pr[N=n] * bits per label given the first edge
    double entropy_rate = 0.0;       // stationary chain
    bool fused_below_truth = false;
    bool labeled_below_truth = false;
};

struct CorpusSummary {
    std::uint64_t trajectories = 0;
    std::uint64_t edges = 0;
    double mean_length = 0.0;
    std::uint64_t invalid_records = 0;
    std::size_t network_vertices = 0;
    std::size_t network_edges = 0;
    std::size_t max_out_degree = 0;
};

struct ExperimentReport {
    RunConfig config;
    CorpusSummary corpus;
    RawStage raw;
    std::vector<LabeledStage> labeled;  // mel, rml, then the configured scheme if different
    FusedStage fused;
    std::optional<GroundTruthSummary> truth;
    bool comparable_column_monotone = false;
};

// Raw edge ids joined with terminators, LZW coded.
RawStage run_stage_raw(const TrajectoryCorpus& c, std::uint64_t seed);
// Labels joined with terminators, LZW coded, Fano inverted without correction.
LabeledStage run_stage_labeled(const TrajectoryCorpus& c, const LabelingScheme& s, std::uint64_t seed,
                               const FanoAlphabetPolicy& alphabet);
// Per-length-group construction, coding, inversion and aggregation.
FusedStage run_stage_fused(const TrajectoryCorpus& c, const LabelingScheme& s, const FusedOptions& opts,
                           const MarkovSource* truth = nullptr);

struct PreparedInputs {
    RoadNetwork net;
    TrajectoryCorpus corpus;
    std::optional<MarkovSource> source;
    std::optional<LengthLaw> law;
};
PreparedInputs prepare_inputs(const RunConfig& cfg);

// The three-stage experiment on any corpus; pure function of the config.
ExperimentReport run_experiment(const RunConfig& cfg);
ExperimentReport run_experiment(const RunConfig& cfg, const PreparedInputs& in);

struct BiasConfig {
    std::string network = "builtin:torus:20x20";
    std::string source = "peaked:0.85";
    std::string length_law = "uniform:30:40";
    std::size_t count = 10'000;
    std::size_t scale = 100;
    std::string scheme = "rml";
    std::uint64_t seed = 1;
    std::string fano_alphabet = "observed";
    std::string first_edge = "renormalize";
    std::size_t min_group_labels = 10'000;
    unsigned workers = 1;
};

struct BiasReport {
    BiasConfig config;
    GroundTruthSummary truth;
    LabeledStage small_labeled;      // count trips, no construction
    FusedStage small_fused;          // count trips, constructed
    FusedStage large_fused;          // count * scale trips, constructed
    double gap_small = 0.0;          // truth - small_labeled.naive_pi
    double gap_large = 0.0;          // truth - large_fused.aggregate_pi
    bool bias_demonstrated = false;  // gap_small >= 0.02
    bool gap_halved = false;         // |gap_large| <= gap_small / 2
};

BiasReport demonstrate_bias(const BiasConfig& cfg);

// Serialization. Output is a pure function of the report (no timestamps).
std::string report_json(const ExperimentReport& r);
std::string report_json(const BiasReport& r);
std::string group_table_csv(const FusedStage& f);
std::string summary_markdown(const ExperimentReport& r);
std::string truth_json(const MarkovSource& src, const LengthLaw& law);

enum class ReportFormat { json, csv, markdown };
// Writes report.json / groups.csv / summary.md under `dir`; returns the path.
std::filesystem::path emit_report(const ExperimentReport& r, ReportFormat format, const std::filesystem::path& dir);

}  // namespace lzpred
