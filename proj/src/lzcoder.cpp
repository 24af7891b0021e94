#include "lzpred/lzcoder.hpp"

#include "lzpred/error.hpp"

#include <bit>
#include <string>

namespace lzpred {

unsigned code_width(std::size_t dictionary_size) noexcept {
    if (dictionary_size <= 2) return 1;
    return static_cast<unsigned>(std::bit_width(dictionary_size - 1));
}

// Open-addressing map (prefix code, symbol) -> code with linear probing.
struct LzwEncoder::Table {
    static constexpr std::uint64_t kEmpty = ~std::uint64_t{0};

    std::vector<std::uint64_t> keys;
    std::vector<Code> values;
    std::size_t used = 0;
    std::size_t mask = 0;

    Table() { rehash(1u << 12); }

    static std::uint64_t mix(std::uint64_t x) {
        x ^= x >> 30;
        x *= 0xbf58476d1ce4e5b9ULL;
        x ^= x >> 27;
        x *= 0x94d049bb133111ebULL;
        x ^= x >> 31;
        return x;
    }
    static std::uint64_t key(Code prefix, Symbol s) { return (std::uint64_t{prefix} << 32) | s; }

    const Code* find(std::uint64_t k) const {
        for (std::size_t i = mix(k) & mask;; i = (i + 1) & mask) {
            if (keys[i] == k) return &values[i];
            if (keys[i] == kEmpty) return nullptr;
        }
    }

    void insert(std::uint64_t k, Code v) {
        if (2 * (used + 1) > keys.size()) rehash(keys.size() * 2);
        place(k, v);
        ++used;
    }

    void place(std::uint64_t k, Code v) {
        std::size_t i = mix(k) & mask;
        while (keys[i] != kEmpty) i = (i + 1) & mask;
        keys[i] = k;
        values[i] = v;
    }

    void rehash(std::size_t capacity) {
        std::vector<std::uint64_t> old_keys(capacity, kEmpty);
        std::vector<Code> old_values(capacity, 0);
        old_keys.swap(keys);
        old_values.swap(values);
        mask = capacity - 1;
        for (std::size_t i = 0; i < old_keys.size(); ++i)
            if (old_keys[i] != kEmpty) place(old_keys[i], old_values[i]);
    }
};

LzwEncoder::LzwEncoder(std::size_t alphabet_size, bool keep_codes)
    : alphabet_size_(alphabet_size), keep_codes_(keep_codes), table_(std::make_unique<Table>()) {
    if (alphabet_size == 0) throw DomainError("LZW alphabet must hold at least one symbol");
    if (alphabet_size > 0xffffffffULL) throw DomainError("LZW alphabet too large");
}

LzwEncoder::~LzwEncoder() = default;
LzwEncoder::LzwEncoder(LzwEncoder&&) noexcept = default;
LzwEncoder& LzwEncoder::operator=(LzwEncoder&&) noexcept = default;

std::size_t LzwEncoder::dictionary_size() const noexcept { return alphabet_size_ + phrases_; }

void LzwEncoder::emit(Code c) {
    bits_ += code_width(dictionary_size());
    if (keep_codes_) codes_.push_back(c);
}

void LzwEncoder::push(Symbol s) {
    if (s >= alphabet_size_)
        throw DomainError("symbol " + std::to_string(s) + " outside alphabet of size " + std::to_string(alphabet_size_));
    ++symbols_;
    if (!has_pending_) {
        pending_ = s;
        has_pending_ = true;
        return;
    }
    const auto k = Table::key(pending_, s);
    if (const Code* hit = table_->find(k)) {
        pending_ = *hit;
        return;
    }
    emit(pending_);
    table_->insert(k, static_cast<Code>(dictionary_size()));
    ++phrases_;
    pending_ = s;
}

CodingReport LzwEncoder::snapshot() const {
    CodingReport r;
    r.symbols_consumed = symbols_;
    r.bits_emitted = bits_ + (has_pending_ ? code_width(dictionary_size()) : 0);
    r.phrases = phrases_;
    r.rate = symbols_ ? static_cast<double>(r.bits_emitted) / static_cast<double>(symbols_) : 0.0;
    return r;
}

EncodeResult LzwEncoder::finish() {
    EncodeResult out;
    out.report = snapshot();
    if (has_pending_) {
        if (keep_codes_) codes_.push_back(pending_);
        has_pending_ = false;
    }
    out.stream.codes = std::move(codes_);
    out.stream.alphabet_size = alphabet_size_;
    out.stream.final_dictionary_size = dictionary_size();
    return out;
}

EncodeResult lzw_encode(std::span<const Symbol> input, std::size_t alphabet_size) {
    LzwEncoder enc(alphabet_size);
    for (Symbol s : input) enc.push(s);
    return enc.finish();
}

std::vector<Symbol> lzw_decode(const CodeStream& cs) {
    std::vector<Symbol> out;
    if (cs.codes.empty()) return out;
    if (cs.alphabet_size == 0) throw CodecError("code stream has an empty alphabet");
    // Phrase c (c >= alphabet) = phrase[parent[c]] + last[c]; first[c] caches
    // its leading symbol, len[c] its length.
    std::vector<Code> parent;
    std::vector<Symbol> last, first;
    std::vector<std::uint32_t> len;
    const auto alphabet = cs.alphabet_size;
    auto dict_size = [&] { return alphabet + parent.size(); };
    auto phrase_first = [&](Code c) { return c < alphabet ? static_cast<Symbol>(c) : first[c - alphabet]; };
    auto phrase_len = [&](Code c) -> std::size_t { return c < alphabet ? 1 : len[c - alphabet]; };
    auto append_phrase = [&](Code c) {
        std::size_t n = phrase_len(c);
        out.resize(out.size() + n);
        std::size_t pos = out.size();
        while (c >= alphabet) {
            out[--pos] = last[c - alphabet];
            c = parent[c - alphabet];
        }
        out[--pos] = static_cast<Symbol>(c);
    };

    Code prev = cs.codes[0];
    if (prev >= alphabet) throw CodecError("first code " + std::to_string(prev) + " is not a single symbol");
    append_phrase(prev);
    for (std::size_t i = 1; i < cs.codes.size(); ++i) {
        const Code c = cs.codes[i];
        Symbol head;
        if (c < dict_size()) head = phrase_first(c);
        else if (c == dict_size()) head = phrase_first(prev);  // phrase defined by this very step
        else throw CodecError("code " + std::to_string(c) + " at position " + std::to_string(i) + " exceeds dictionary size " + std::to_string(dict_size()));
        parent.push_back(prev);
        last.push_back(head);
        first.push_back(phrase_first(prev));
        len.push_back(static_cast<std::uint32_t>(phrase_len(prev) + 1));
        append_phrase(c);
        prev = c;
    }
    return out;
}

std::vector<RatePoint> rate_curve(std::span<const Symbol> input, std::size_t alphabet_size,
                                  std::span<const std::uint64_t> checkpoints) {
    std::uint64_t previous = 0;
    for (std::uint64_t p : checkpoints) {
        if (p == 0 || p <= previous || p > input.size())
            throw ConfigError("rate checkpoints must be ascending and within (0, " + std::to_string(input.size()) + "]");
        previous = p;
    }
    LzwEncoder enc(alphabet_size, false);
    std::vector<RatePoint> out;
    out.reserve(checkpoints.size());
    std::size_t next = 0;
    for (std::size_t i = 0; i < input.size() && next < checkpoints.size(); ++i) {
        enc.push(input[i]);
        if (i + 1 == checkpoints[next]) out.push_back({checkpoints[next++], enc.snapshot().rate});
    }
    return out;
}

}  // namespace lzpred
