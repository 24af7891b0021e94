#include "lzpred/corpus.hpp"

#include "lzpred/error.hpp"
#include "text_util.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace lzpred {

namespace {

constexpr std::uint64_t bigram_key(EdgeId a, EdgeId b) { return (std::uint64_t{a} << 32) | b; }
constexpr std::size_t kInvalidLinesKept = 8;

}  // namespace

TrajectoryCorpus::TrajectoryCorpus(std::size_t edge_count) : edge_freq_(edge_count, 0) {}

void TrajectoryCorpus::add(std::span<const EdgeId> t) {
    for (std::size_t i = 0; i < t.size(); ++i) {
        ++edge_freq_.at(t[i]);
        if (i > 0) {
            ++bigram_freq_[bigram_key(t[i - 1], t[i])];
            ++bigram_total_;
        }
    }
    edges_.insert(edges_.end(), t.begin(), t.end());
    offsets_.push_back(edges_.size());
    ++length_histogram_[t.size()];
}

void TrajectoryCorpus::merge(const TrajectoryCorpus& other) {
    if (other.edge_count() != edge_count()) throw ConfigError("cannot merge corpora over different edge alphabets");
    for (std::size_t i = 0; i < other.size(); ++i) add(other[i]);
    records_read += other.records_read;
    invalid_records += other.invalid_records;
    filtered_records += other.filtered_records;
    for (std::size_t line : other.invalid_lines)
        if (invalid_lines.size() < kInvalidLinesKept) invalid_lines.push_back(line);
}

std::uint64_t TrajectoryCorpus::bigram_freq(EdgeId a, EdgeId b) const {
    auto it = bigram_freq_.find(bigram_key(a, b));
    return it == bigram_freq_.end() ? 0 : it->second;
}

std::map<std::pair<EdgeId, EdgeId>, std::uint64_t> TrajectoryCorpus::bigram_table() const {
    std::map<std::pair<EdgeId, EdgeId>, std::uint64_t> out;
    for (auto [key, count] : bigram_freq_)
        out.emplace(std::pair{static_cast<EdgeId>(key >> 32), static_cast<EdgeId>(key & 0xffffffffu)}, count);
    return out;
}

TrajectoryCorpus ingest_corpus(std::istream& in, const RoadNetwork& net, const IngestOptions& opts) {
    if (opts.max_invalid_fraction < 0.0 || opts.max_invalid_fraction > 1.0)
        throw ConfigError("max_invalid_fraction must lie in [0, 1]");
    TrajectoryCorpus corpus(net.edge_count());
    std::string line;
    std::size_t lineno = 0;
    Trajectory t;
    while (std::getline(in, line)) {
        ++lineno;
        auto fields = detail::split_fields(detail::strip_comment(line));
        if (fields.empty()) continue;
        ++corpus.records_read;
        t.clear();
        bool ok = true;
        for (std::string_view f : fields) {
            auto ext = detail::parse_int(f);
            auto e = ext ? net.find_edge(*ext) : std::nullopt;
            if (!e) {
                ok = false;
                break;
            }
            t.push_back(*e);
        }
        ok = ok && validate_trajectory(net, t).valid;
        if (!ok) {
            ++corpus.invalid_records;
            if (corpus.invalid_lines.size() < kInvalidLinesKept) corpus.invalid_lines.push_back(lineno);
            continue;
        }
        if (t.size() < opts.min_length || (opts.max_length && t.size() > opts.max_length)) {
            ++corpus.filtered_records;
            continue;
        }
        corpus.add(t);
    }
    if (corpus.records_read == 0) throw ValidationError("empty corpus: no trajectory records");
    double invalid_fraction = static_cast<double>(corpus.invalid_records) / static_cast<double>(corpus.records_read);
    if (invalid_fraction > opts.max_invalid_fraction) {
        std::ostringstream msg;
        msg << corpus.invalid_records << " of " << corpus.records_read << " trajectory records invalid (limit "
            << opts.max_invalid_fraction * 100.0 << "%); first bad lines:";
        for (std::size_t l : corpus.invalid_lines) msg << ' ' << l;
        throw ValidationError(msg.str());
    }
    if (corpus.empty()) throw ValidationError("empty corpus: every record was invalid or filtered");
    return corpus;
}

TrajectoryCorpus ingest_corpus_file(const std::string& path, const RoadNetwork& net, const IngestOptions& opts) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open trajectory file: " + path);
    return ingest_corpus(in, net, opts);
}

void write_corpus(std::ostream& out, const TrajectoryCorpus& c, const RoadNetwork& net) {
    for (std::size_t i = 0; i < c.size(); ++i) {
        auto t = c[i];
        for (std::size_t j = 0; j < t.size(); ++j) {
            if (j) out << ' ';
            out << net.external_edge_id(t[j]);
        }
        out << '\n';
    }
}

GroupingResult group_by_length(const TrajectoryCorpus& c, const GroupingOptions& opts) {
    if (opts.min_group_count < 1) throw ConfigError("min_group_count must be at least 1");
    if (c.empty()) throw ConfigError("cannot group an empty corpus");
    GroupingResult result;
    std::map<std::size_t, std::vector<std::size_t>> by_length;
    for (std::size_t i = 0; i < c.size(); ++i) by_length[c.length(i)].push_back(i);

    const auto total = static_cast<double>(c.size());
    std::uint64_t retained = 0;
    for (auto& [n, members] : by_length) {
        const std::size_t count = members.size();
        if (n < 2) {
            result.singleton_trajectories += count;
            result.excluded_trajectories += count;
            continue;
        }
        if (count < opts.min_group_count || count * (n - 1) < opts.min_group_labels) {
            result.excluded_trajectories += count;
            continue;
        }
        retained += count;
        result.groups.push_back({n, std::move(members), 0.0});
    }
    if (result.groups.empty())
        throw ConfigError("no length group survives min_group_count=" + std::to_string(opts.min_group_count) +
                          " and min_group_labels=" + std::to_string(opts.min_group_labels));
    for (LengthGroup& g : result.groups)
        g.weight = static_cast<double>(g.members.size()) / static_cast<double>(retained);
    result.coverage = static_cast<double>(retained) / total;
    return result;
}

double mean_length(const TrajectoryCorpus& c) {
    if (c.empty()) throw DomainError("mean length of an empty corpus");
    return static_cast<double>(c.total_edges()) / static_cast<double>(c.size());
}

}  // namespace lzpred
