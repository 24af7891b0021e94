#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace lzpred {

using Symbol = std::uint32_t;
using Code = std::uint32_t;

struct CodeStream {
    std::vector<Code> codes;
    std::size_t alphabet_size = 0;
    std::size_t final_dictionary_size = 0;
};

struct CodingReport {
    std::uint64_t symbols_consumed = 0;
    std::uint64_t bits_emitted = 0;
    std::uint64_t phrases = 0;  // dictionary insertions
    double rate = 0.0;          // bits per symbol

    bool operator==(const CodingReport&) const = default;
};

struct EncodeResult {
    CodeStream stream;
    CodingReport report;
};

// Bits charged for a code emitted while the dictionary holds `size` entries:
// ceil(log2(size)), at least 1.
unsigned code_width(std::size_t dictionary_size) noexcept;

/*
  LZW over the integer alphabet [0, alphabet_size).

  The dictionary starts with every single symbol and grows without bound by
  one phrase per emitted code except the final flush. Longest-match lookup is
  a hash on (prefix code, next symbol), amortized O(1) per input symbol.
*/
class LzwEncoder {
public:
    explicit LzwEncoder(std::size_t alphabet_size, bool keep_codes = true);
    ~LzwEncoder();
    LzwEncoder(LzwEncoder&&) noexcept;
    LzwEncoder& operator=(LzwEncoder&&) noexcept;

    // Throws DomainError for a symbol outside the alphabet.
    void push(Symbol s);
    // Report as if the input ended now: includes the pending phrase's code
    // without consuming it.
    CodingReport snapshot() const;
    // Flushes the pending phrase; the encoder is spent afterwards.
    EncodeResult finish();

    std::size_t dictionary_size() const noexcept;

private:
    struct Table;
    std::size_t alphabet_size_;
    bool keep_codes_;
    bool has_pending_ = false;
    Code pending_ = 0;
    std::uint64_t symbols_ = 0;
    std::uint64_t bits_ = 0;
    std::uint64_t phrases_ = 0;
    std::vector<Code> codes_;
    std::unique_ptr<Table> table_;

    void emit(Code c);
};

// Throws DomainError for alphabet_size == 0 or an out-of-range symbol.
EncodeResult lzw_encode(std::span<const Symbol> input, std::size_t alphabet_size);

// Throws CodecError for a code beyond the next dictionary slot.
std::vector<Symbol> lzw_decode(const CodeStream& cs);

struct RatePoint {
    std::uint64_t prefix = 0;
    double rate = 0.0;
};

// Rate of each prefix from one continuous pass. Checkpoints must be
// ascending, positive and within the input; ConfigError otherwise.
std::vector<RatePoint> rate_curve(std::span<const Symbol> input, std::size_t alphabet_size,
                                  std::span<const std::uint64_t> checkpoints);

}  // namespace lzpred
