#pragma once

#include "lzpred/corpus.hpp"
#include "lzpred/labeling.hpp"
#include "lzpred/lzcoder.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace lzpred {

// Same-length trajectories joined without separators. In label mode each
// trajectory contributes n-1 labels (its first edge is dropped); in raw mode
// it contributes its n edge ids.
struct ConstructedSequence {
    std::size_t group_n = 0;
    std::vector<Symbol> symbols;
    std::size_t alphabet_size = 0;
    std::uint64_t source_count = 0;
    std::uint64_t seed = 0;
    bool raw = false;
    bool with_replacement = false;

    std::size_t symbols_per_trajectory() const noexcept { return raw ? group_n : group_n - 1; }
};

// Trajectories of any length, each followed by a reserved terminator symbol
// equal to the base alphabet size.
struct TerminatedSequence {
    std::vector<Symbol> symbols;
    Symbol terminator = 0;
    std::uint64_t trajectories = 0;
    std::uint64_t seed = 0;
    bool raw = false;

    std::size_t alphabet_size() const noexcept { return static_cast<std::size_t>(terminator) + 1; }
};

struct ConstructOptions {
    // Default draws each member once in shuffled order. With replacement,
    // members are drawn uniformly until target_symbols is reached.
    bool with_replacement = false;
    std::uint64_t target_symbols = 10'000;
    std::uint64_t max_symbols = 10'000'000;
};

// ConfigError for n < 2 or an empty group.
ConstructedSequence build_group_sequence(const TrajectoryCorpus& c, const LengthGroup& g, const LabelingScheme& s,
                                         std::uint64_t seed, const ConstructOptions& opts = {});
ConstructedSequence build_raw_group_sequence(const TrajectoryCorpus& c, const LengthGroup& g, std::uint64_t seed,
                                             const ConstructOptions& opts = {});

TerminatedSequence build_terminated_sequence(const TrajectoryCorpus& c, const LabelingScheme& s, std::uint64_t seed);
TerminatedSequence build_raw_terminated_sequence(const TrajectoryCorpus& c, std::uint64_t seed);

// Inverses of the constructions: per-trajectory symbol strings in stream order.
std::vector<std::vector<Symbol>> split_constructed(const ConstructedSequence& seq);
std::vector<std::vector<Symbol>> split_terminated(const TerminatedSequence& seq);

/*
  Flat binary stream file, little-endian:
    "LZPS" u32 version u32 flags u32 group_n u32 alphabet_size
    u64 source_count u64 seed u64 count, then count x u32 symbols.
  flags: bit 0 terminated, bit 1 raw edges, bit 2 drawn with replacement.
  Terminated streams store group_n = 0 and alphabet_size = terminator + 1.
*/
struct StreamFile {
    std::uint32_t flags = 0;
    std::uint32_t group_n = 0;
    std::uint32_t alphabet_size = 0;
    std::uint64_t source_count = 0;
    std::uint64_t seed = 0;
    std::vector<Symbol> symbols;

    static constexpr std::uint32_t kTerminated = 1u << 0;
    static constexpr std::uint32_t kRaw = 1u << 1;
    static constexpr std::uint32_t kWithReplacement = 1u << 2;
};

StreamFile to_stream_file(const ConstructedSequence& seq);
StreamFile to_stream_file(const TerminatedSequence& seq);
void write_stream(std::ostream& out, const StreamFile& f);
StreamFile read_stream(std::istream& in);
void write_stream_file(const std::string& path, const StreamFile& f);
StreamFile read_stream_file(const std::string& path);

}  // namespace lzpred
