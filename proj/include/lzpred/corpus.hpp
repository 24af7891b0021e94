#pragma once

#include "lzpred/netmodel.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace lzpred {

using Trajectory = std::vector<EdgeId>;

/*
  Multiset of map-matched trajectories stored back to back, plus the counters
  every later stage reads: length histogram, edge frequencies and bigram
  frequencies. Counters are updated on insertion so they always satisfy

    sum(length_histogram)  == size()
    sum(edge_freq)         == total_edges()
    sum(bigram_freq)       == total_edges() - size()
*/
class TrajectoryCorpus {
public:
    TrajectoryCorpus() = default;
    explicit TrajectoryCorpus(std::size_t edge_count);

    // Appends without validation; callers guarantee connectivity.
    void add(std::span<const EdgeId> t);
    // Adds every trajectory and counter of `other` (same edge alphabet).
    void merge(const TrajectoryCorpus& other);

    std::size_t size() const noexcept { return offsets_.size() - 1; }
    bool empty() const noexcept { return size() == 0; }
    std::span<const EdgeId> operator[](std::size_t i) const {
        return std::span<const EdgeId>(edges_).subspan(offsets_[i], offsets_[i + 1] - offsets_[i]);
    }
    std::size_t length(std::size_t i) const { return offsets_[i + 1] - offsets_[i]; }
    std::size_t edge_count() const noexcept { return edge_freq_.size(); }
    std::uint64_t total_edges() const noexcept { return edges_.size(); }

    const std::map<std::size_t, std::uint64_t>& length_histogram() const noexcept { return length_histogram_; }
    std::uint64_t edge_freq(EdgeId e) const { return edge_freq_.at(e); }
    std::span<const std::uint64_t> edge_freqs() const noexcept { return edge_freq_; }
    std::uint64_t bigram_freq(EdgeId a, EdgeId b) const;
    // Ordered view for reports and deterministic iteration.
    std::map<std::pair<EdgeId, EdgeId>, std::uint64_t> bigram_table() const;
    std::uint64_t bigram_total() const noexcept { return bigram_total_; }

    // Ingest bookkeeping (zero for corpora built in memory).
    std::uint64_t records_read = 0;
    std::uint64_t invalid_records = 0;
    std::uint64_t filtered_records = 0;
    std::vector<std::size_t> invalid_lines;  // first few, for diagnostics

private:
    std::vector<EdgeId> edges_;
    std::vector<std::size_t> offsets_{0};
    std::map<std::size_t, std::uint64_t> length_histogram_;
    std::vector<std::uint64_t> edge_freq_;
    std::unordered_map<std::uint64_t, std::uint64_t> bigram_freq_;
    std::uint64_t bigram_total_ = 0;
};

struct IngestOptions {
    double max_invalid_fraction = 0.01;
    std::size_t min_length = 1;
    std::size_t max_length = 0;  // 0 = unbounded
};

// One trajectory per line, external edge ids separated by spaces or commas.
// Records that fail to parse or validate are skipped and counted; more than
// max_invalid_fraction of them aborts with a ValidationError summary.
TrajectoryCorpus ingest_corpus(std::istream& in, const RoadNetwork& net, const IngestOptions& opts = {});
TrajectoryCorpus ingest_corpus_file(const std::string& path, const RoadNetwork& net, const IngestOptions& opts = {});

// Writes the trajectory text format in the network's external ids.
void write_corpus(std::ostream& out, const TrajectoryCorpus& c, const RoadNetwork& net);

struct LengthGroup {
    std::size_t n = 0;
    std::vector<std::size_t> members;  // indices into the corpus
    double weight = 0.0;               // renormalized Pr[N=n] over retained groups
};

struct GroupingOptions {
    std::size_t min_group_count = 1;
    // A group is also dropped when count * (n - 1) is below this.
    std::size_t min_group_labels = 0;
};

struct GroupingResult {
    std::vector<LengthGroup> groups;   // ascending n
    double coverage = 0.0;             // retained mass before renormalization
    std::uint64_t excluded_trajectories = 0;
    std::uint64_t singleton_trajectories = 0;  // length 1, never estimable
};

// Throws ConfigError if min_group_count is 0 or no group survives.
GroupingResult group_by_length(const TrajectoryCorpus& c, const GroupingOptions& opts);
inline GroupingResult group_by_length(const TrajectoryCorpus& c, std::size_t min_group_count) {
    return group_by_length(c, GroupingOptions{min_group_count, 0});
}

// E[N] of the empirical length distribution. Throws DomainError when empty.
double mean_length(const TrajectoryCorpus& c);

}  // namespace lzpred
