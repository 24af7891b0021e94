#pragma once

#include "lzpred/corpus.hpp"
#include "lzpred/netmodel.hpp"

#include <algorithm>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace lzpred {

using Label = std::uint32_t;

enum class SchemeKind { mel, rml, ctx };

struct LabeledTrajectory {
    EdgeId first_edge = 0;
    std::vector<Label> labels;  // one per edge after the first

    bool operator==(const LabeledTrajectory&) const = default;
};

struct SeqLess {
    using is_transparent = void;
    template <class A, class B>
    bool operator()(const A& a, const B& b) const {
        return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
    }
};

/*
  Context-dependent bijection between admissible next edges and small labels.

  The context of the edge following e_1..e_i is, from most to least specific:
    - the last j edges for j = order..2, if that j-gram was observed with a
      successor (CTX only);
    - the previous edge e_i, if it was observed with a successor (RML, CTX);
    - the vertex head(e_i) (MEL, and the fallback of every other kind).
  Within a context the out-edges of head(e_i) are ranked by descending
  frequency, ties by ascending EdgeId, and the rank is the label. Every
  ranking lists exactly the out-edges of one vertex, so labels stay below the
  network's max out-degree.
*/
class LabelingScheme {
public:
    SchemeKind kind() const noexcept { return kind_; }
    // Context length: 0 for MEL, 1 for RML, k for CTX(k).
    std::size_t order() const noexcept { return order_; }
    std::size_t alphabet_size() const noexcept { return alphabet_size_; }
    std::size_t edge_count() const noexcept { return edge_head_.size(); }
    std::string name() const;

    // Ranking used for the edge that follows `history` (non-empty).
    std::span<const EdgeId> ranking(std::span<const EdgeId> history) const;
    // Throws CodecError when `next` is not admissible after `history`.
    Label label_of(std::span<const EdgeId> history, EdgeId next) const;
    // Throws CodecError when `label` is not below the context's out-degree.
    EdgeId edge_of(std::span<const EdgeId> history, Label label) const;

    // Number of contexts that carry their own ranking, per context length
    // (index 0 = vertices, 1 = single edges, ...).
    std::vector<std::size_t> context_counts() const;

    // Versioned text artifact.
    void save(std::ostream& out) const;
    static LabelingScheme load(std::istream& in);

    friend LabelingScheme build_mel(const RoadNetwork& net, const TrajectoryCorpus& c);
    friend LabelingScheme build_rml(const RoadNetwork& net, const TrajectoryCorpus& c);
    friend LabelingScheme build_ctx(const RoadNetwork& net, const TrajectoryCorpus& c, std::size_t k);

private:
    using Ranking = std::vector<EdgeId>;

    SchemeKind kind_ = SchemeKind::mel;
    std::size_t order_ = 0;
    std::size_t alphabet_size_ = 0;
    std::vector<VertexId> edge_head_;
    std::vector<Ranking> vertex_rank_;
    std::vector<Ranking> edge_rank_;  // empty ranking = unobserved context
    std::vector<std::map<std::vector<EdgeId>, Ranking, SeqLess>> deep_rank_;  // [j-2] holds j-gram contexts

    void finish();
    void validate() const;  // ValidationError on a non-bijective table
};

LabelingScheme build_mel(const RoadNetwork& net, const TrajectoryCorpus& c);
LabelingScheme build_rml(const RoadNetwork& net, const TrajectoryCorpus& c);
// k >= 2; throws ConfigError otherwise.
LabelingScheme build_ctx(const RoadNetwork& net, const TrajectoryCorpus& c, std::size_t k);

// Parses "mel", "rml" or "ctx:k".
struct SchemeSpec {
    SchemeKind kind = SchemeKind::mel;
    std::size_t order = 0;
};
SchemeSpec parse_scheme_spec(const std::string& text);
LabelingScheme build_scheme(const RoadNetwork& net, const TrajectoryCorpus& c, const SchemeSpec& spec);

LabeledTrajectory encode_labels(const LabelingScheme& s, std::span<const EdgeId> t);
Trajectory decode_labels(const LabelingScheme& s, const LabeledTrajectory& lt);

// Histogram of labels emitted by encoding every corpus trajectory.
std::vector<std::uint64_t> label_histogram(const LabelingScheme& s, const TrajectoryCorpus& c);

}  // namespace lzpred
