#include "lzpred/seqbuild.hpp"

#include "lzpred/error.hpp"
#include "lzpred/rng.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>

namespace lzpred {

namespace {

// Member draw order: a seeded permutation, or uniform draws with replacement.
std::vector<std::size_t> draw_order(const LengthGroup& g, std::size_t per_trajectory, std::uint64_t seed,
                                    const ConstructOptions& opts) {
    if (g.n < 2) throw ConfigError("sequence construction needs trajectory length >= 2, got " + std::to_string(g.n));
    if (g.members.empty()) throw ConfigError("cannot construct from an empty length group");
    Rng rng(seed);
    const std::uint64_t cap = std::max<std::uint64_t>(1, opts.max_symbols / per_trajectory);
    std::vector<std::size_t> order;
    if (opts.with_replacement) {
        const std::uint64_t wanted = (opts.target_symbols + per_trajectory - 1) / per_trajectory;
        const std::uint64_t draws = std::min<std::uint64_t>(std::max<std::uint64_t>(wanted, g.members.size()), cap);
        std::uniform_int_distribution<std::size_t> pick(0, g.members.size() - 1);
        order.reserve(draws);
        for (std::uint64_t i = 0; i < draws; ++i) order.push_back(g.members[pick(rng)]);
    } else {
        order = g.members;
        std::shuffle(order.begin(), order.end(), rng);
        if (order.size() > cap) order.resize(cap);
    }
    return order;
}

std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    return order;
}

void append_labels(std::vector<Symbol>& out, const LabelingScheme& s, std::span<const EdgeId> t) {
    for (std::size_t j = 1; j < t.size(); ++j) out.push_back(s.label_of(t.first(j), t[j]));
}

}  // namespace

ConstructedSequence build_group_sequence(const TrajectoryCorpus& c, const LengthGroup& g, const LabelingScheme& s,
                                         std::uint64_t seed, const ConstructOptions& opts) {
    ConstructedSequence seq;
    seq.group_n = g.n;
    seq.alphabet_size = s.alphabet_size();
    seq.seed = seed;
    seq.with_replacement = opts.with_replacement;
    auto order = draw_order(g, g.n - 1, seed, opts);
    seq.symbols.reserve(order.size() * (g.n - 1));
    for (std::size_t idx : order) {
        auto t = c[idx];
        if (t.size() != g.n) throw ConfigError("group member " + std::to_string(idx) + " has length " + std::to_string(t.size()) + ", expected " + std::to_string(g.n));
        append_labels(seq.symbols, s, t);
    }
    seq.source_count = order.size();
    return seq;
}

ConstructedSequence build_raw_group_sequence(const TrajectoryCorpus& c, const LengthGroup& g, std::uint64_t seed,
                                             const ConstructOptions& opts) {
    ConstructedSequence seq;
    seq.group_n = g.n;
    seq.alphabet_size = c.edge_count();
    seq.seed = seed;
    seq.raw = true;
    seq.with_replacement = opts.with_replacement;
    auto order = draw_order(g, g.n, seed, opts);
    seq.symbols.reserve(order.size() * g.n);
    for (std::size_t idx : order) {
        auto t = c[idx];
        if (t.size() != g.n) throw ConfigError("group member has the wrong length");
        seq.symbols.insert(seq.symbols.end(), t.begin(), t.end());
    }
    seq.source_count = order.size();
    return seq;
}

TerminatedSequence build_terminated_sequence(const TrajectoryCorpus& c, const LabelingScheme& s, std::uint64_t seed) {
    if (c.empty()) throw ConfigError("cannot construct from an empty corpus");
    TerminatedSequence seq;
    seq.terminator = static_cast<Symbol>(s.alphabet_size());
    seq.seed = seed;
    seq.symbols.reserve(c.total_edges());
    for (std::size_t idx : shuffled_indices(c.size(), seed)) {
        append_labels(seq.symbols, s, c[idx]);
        seq.symbols.push_back(seq.terminator);
    }
    seq.trajectories = c.size();
    return seq;
}

TerminatedSequence build_raw_terminated_sequence(const TrajectoryCorpus& c, std::uint64_t seed) {
    if (c.empty()) throw ConfigError("cannot construct from an empty corpus");
    TerminatedSequence seq;
    seq.terminator = static_cast<Symbol>(c.edge_count());
    seq.seed = seed;
    seq.raw = true;
    seq.symbols.reserve(c.total_edges() + c.size());
    for (std::size_t idx : shuffled_indices(c.size(), seed)) {
        auto t = c[idx];
        seq.symbols.insert(seq.symbols.end(), t.begin(), t.end());
        seq.symbols.push_back(seq.terminator);
    }
    seq.trajectories = c.size();
    return seq;
}

std::vector<std::vector<Symbol>> split_constructed(const ConstructedSequence& seq) {
    const std::size_t per = seq.symbols_per_trajectory();
    if (per == 0 || seq.symbols.size() % per != 0) throw CodecError("constructed stream length is not a multiple of the trajectory size");
    std::vector<std::vector<Symbol>> out;
    for (std::size_t i = 0; i < seq.symbols.size(); i += per)
        out.emplace_back(seq.symbols.begin() + static_cast<std::ptrdiff_t>(i), seq.symbols.begin() + static_cast<std::ptrdiff_t>(i + per));
    return out;
}

std::vector<std::vector<Symbol>> split_terminated(const TerminatedSequence& seq) {
    std::vector<std::vector<Symbol>> out;
    std::vector<Symbol> current;
    for (Symbol x : seq.symbols) {
        if (x == seq.terminator) {
            out.push_back(std::move(current));
            current.clear();
        } else {
            current.push_back(x);
        }
    }
    if (!current.empty()) throw CodecError("terminated stream does not end with a terminator");
    return out;
}

StreamFile to_stream_file(const ConstructedSequence& seq) {
    StreamFile f;
    f.flags = (seq.raw ? StreamFile::kRaw : 0) | (seq.with_replacement ? StreamFile::kWithReplacement : 0);
    f.group_n = static_cast<std::uint32_t>(seq.group_n);
    f.alphabet_size = static_cast<std::uint32_t>(seq.alphabet_size);
    f.source_count = seq.source_count;
    f.seed = seq.seed;
    f.symbols = seq.symbols;
    return f;
}

StreamFile to_stream_file(const TerminatedSequence& seq) {
    StreamFile f;
    f.flags = StreamFile::kTerminated | (seq.raw ? StreamFile::kRaw : 0);
    f.alphabet_size = static_cast<std::uint32_t>(seq.alphabet_size());
    f.source_count = seq.trajectories;
    f.seed = seq.seed;
    f.symbols = seq.symbols;
    return f;
}

namespace {

constexpr std::array<char, 4> kStreamMagic{'L', 'Z', 'P', 'S'};
constexpr std::uint32_t kStreamVersion = 1;

template <class T>
void put_le(std::ostream& out, T v) {
    std::array<char, sizeof(T)> b;
    for (std::size_t i = 0; i < sizeof(T); ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(b.data(), b.size());
}

template <class T>
T get_le(std::istream& in) {
    std::array<unsigned char, sizeof(T)> b;
    if (!in.read(reinterpret_cast<char*>(b.data()), b.size())) throw ParseError("truncated stream file", 0);
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(b[i]) << (8 * i);
    return v;
}

}  // namespace

void write_stream(std::ostream& out, const StreamFile& f) {
    out.write(kStreamMagic.data(), kStreamMagic.size());
    put_le<std::uint32_t>(out, kStreamVersion);
    put_le<std::uint32_t>(out, f.flags);
    put_le<std::uint32_t>(out, f.group_n);
    put_le<std::uint32_t>(out, f.alphabet_size);
    put_le<std::uint64_t>(out, f.source_count);
    put_le<std::uint64_t>(out, f.seed);
    put_le<std::uint64_t>(out, f.symbols.size());
    for (Symbol s : f.symbols) put_le<std::uint32_t>(out, s);
}

StreamFile read_stream(std::istream& in) {
    std::array<char, 4> magic{};
    if (!in.read(magic.data(), magic.size()) || magic != kStreamMagic) throw ParseError("not a symbol stream file", 0);
    if (get_le<std::uint32_t>(in) != kStreamVersion) throw ParseError("unsupported stream file version", 0);
    StreamFile f;
    f.flags = get_le<std::uint32_t>(in);
    f.group_n = get_le<std::uint32_t>(in);
    f.alphabet_size = get_le<std::uint32_t>(in);
    f.source_count = get_le<std::uint64_t>(in);
    f.seed = get_le<std::uint64_t>(in);
    const auto count = get_le<std::uint64_t>(in);
    f.symbols.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(count, 1u << 24)));  // count is untrusted
    for (std::uint64_t i = 0; i < count; ++i) {
        Symbol s = get_le<std::uint32_t>(in);
        if (s >= f.alphabet_size) throw ValidationError("stream symbol " + std::to_string(s) + " outside declared alphabet");
        f.symbols.push_back(s);
    }
    return f;
}

void write_stream_file(const std::string& path, const StreamFile& f) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write stream file: " + path);
    write_stream(out, f);
    if (!out) throw ConfigError("write failed: " + path);
}

StreamFile read_stream_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open stream file: " + path);
    return read_stream(in);
}

}  // namespace lzpred
