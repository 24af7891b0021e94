#include "lzpred/predictability.hpp"

#include "lzpred/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace lzpred {

AlphabetSize::AlphabetSize(std::size_t s) : s_(s) {
    if (s < 2) throw DomainError("Fano alphabet size must be at least 2, got " + std::to_string(s));
}

double binary_entropy(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("binary entropy needs p in [0, 1]");
    if (p == 0.0 || p == 1.0) return 0.0;
    return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

double fano_hf(double p, AlphabetSize s) {
    return binary_entropy(p) + (1.0 - p) * std::log2(static_cast<double>(s.value() - 1));
}

double invert_fano(double h, AlphabetSize s) {
    if (std::isnan(h) || h < 0.0) throw DomainError("entropy must be non-negative");
    const double floor_p = 1.0 / static_cast<double>(s.value());
    if (h == 0.0) return 1.0;
    if (h >= std::log2(static_cast<double>(s.value()))) return floor_p;
    // fano_hf falls strictly from log2 S at 1/S to 0 at 1.
    double lo = floor_p, hi = 1.0;
    double mid = 0.5 * (lo + hi);
    for (int iter = 0; iter < 200; ++iter) {
        mid = 0.5 * (lo + hi);
        const double f = fano_hf(mid, s);
        if (std::abs(f - h) <= 1e-12) break;
        if (f > h) lo = mid;
        else hi = mid;
        if (hi - lo <= 4 * std::numeric_limits<double>::epsilon()) break;
    }
    return mid;
}

const char* to_string(FirstEdgeCorrection c) noexcept {
    return c == FirstEdgeCorrection::renormalize ? "renormalize" : "discount";
}

FirstEdgeCorrection parse_first_edge_correction(const std::string& text) {
    if (text == "renormalize") return FirstEdgeCorrection::renormalize;
    if (text == "discount") return FirstEdgeCorrection::discount;
    throw ConfigError("unknown first-edge correction '" + text + "' (expected renormalize or discount)");
}

GroupEstimate group_predictability(double rate_hat, std::size_t n, AlphabetSize s, double weight,
                                   FirstEdgeCorrection correction) {
    if (n < 2) throw ConfigError("group predictability needs trajectory length >= 2, got " + std::to_string(n));
    if (std::isnan(rate_hat) || rate_hat < 0.0) throw DomainError("coding rate must be non-negative");
    const double shrink = static_cast<double>(n - 1) / static_cast<double>(n);
    GroupEstimate g;
    g.n = n;
    g.rate_hat = rate_hat;
    g.pi_n = invert_fano(shrink * rate_hat, s);
    g.pi_hat_n = correction == FirstEdgeCorrection::discount ? shrink * g.pi_n : std::min(1.0, g.pi_n / shrink);
    g.weight = weight;
    g.alphabet = s.value();
    return g;
}

AggregateEstimate aggregate(std::vector<GroupEstimate> groups) {
    if (groups.empty()) throw ValidationError("cannot aggregate zero groups");
    double total = 0.0;
    for (const auto& g : groups) total += g.weight;
    if (std::abs(total - 1.0) > 1e-9) throw ValidationError("group weights sum to " + std::to_string(total) + ", not 1");
    AggregateEstimate out;
    for (const auto& g : groups) out.aggregate_pi += g.weight * g.pi_hat_n;
    out.groups = std::move(groups);
    return out;
}

MixedLengthComparison mixed_length_rate(std::span<const GroupEntropy> groups) {
    double w = 0.0, wh = 0.0, wn = 0.0, wh_over_n = 0.0;
    for (const auto& g : groups) {
        if (g.n == 0) throw DomainError("group length must be positive");
        w += g.weight;
        wh += g.weight * g.entropy;
        wn += g.weight * static_cast<double>(g.n);
        wh_over_n += g.weight * g.entropy / static_cast<double>(g.n);
    }
    if (!(w > 0.0)) throw DomainError("group weights must carry positive mass");
    MixedLengthComparison out;
    out.mixed_rate = wh / wn;
    out.per_length_rate = wh_over_n / w;
    return out;
}

double plugin_entropy(std::span<const std::uint64_t> counts) {
    const double total = static_cast<double>(std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}));
    if (total == 0.0) return 0.0;
    double h = 0.0;
    for (auto c : counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / total;
        h -= p * std::log2(p);
    }
    return h;
}

}  // namespace lzpred
