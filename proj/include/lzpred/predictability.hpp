#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace lzpred {

// Number of distinct outcomes the predictor chooses among; at least 2.
class AlphabetSize {
public:
    explicit AlphabetSize(std::size_t s);
    std::size_t value() const noexcept { return s_; }

private:
    std::size_t s_;
};

// -p log2 p - (1-p) log2(1-p), with 0 log2 0 = 0. DomainError outside [0, 1].
double binary_entropy(double p);

// Fano function H(p) + (1-p) log2(S-1): the largest entropy compatible with
// prediction accuracy p over S outcomes.
double fano_hf(double p, AlphabetSize s);

// The p in [1/S, 1] with fano_hf(p) = h, by bisection to |dh| <= 1e-12.
// h <= 0 gives 1; h >= log2 S gives 1/S. DomainError for negative or NaN h.
double invert_fano(double h, AlphabetSize s);

/*
  How the bound over all n positions, pi_n, becomes a bound over positions
  2..n when the first edge is taken as unpredictable.

  renormalize: pi_hat_n = min(1, n/(n-1) * pi_n). Exact rescaling of a mean
               over n positions to a mean over n-1 positions when position 1
               contributes 0, so it stays an upper bound whenever pi_n is one.
  discount:    pi_hat_n = (n-1)/n * pi_n. Always below renormalize; fails as a
               bound on low-entropy sources (rate 0 gives (n-1)/n, not 1).
*/
enum class FirstEdgeCorrection { renormalize, discount };

const char* to_string(FirstEdgeCorrection c) noexcept;
FirstEdgeCorrection parse_first_edge_correction(const std::string& text);

struct GroupEstimate {
    std::size_t n = 0;
    double rate_hat = 0.0;   // measured bits per label
    double pi_n = 0.0;       // accuracy bound averaged over positions 1..n
    double pi_hat_n = 0.0;   // bound averaged over positions 2..n
    double weight = 0.0;     // Pr[N = n]
    std::size_t alphabet = 0;
};

// pi_n = invert_fano((n-1)/n * rate_hat), then pi_hat_n per `correction`.
// ConfigError for n < 2, DomainError for a negative rate.
GroupEstimate group_predictability(double rate_hat, std::size_t n, AlphabetSize s, double weight = 1.0,
                                   FirstEdgeCorrection correction = FirstEdgeCorrection::renormalize);

struct AggregateEstimate {
    std::vector<GroupEstimate> groups;
    double aggregate_pi = 0.0;
};

// Sum of weight * pi_hat_n. ValidationError when weights miss 1 by > 1e-9.
AggregateEstimate aggregate(std::vector<GroupEstimate> groups);

struct GroupEntropy {
    std::size_t n = 0;
    double weight = 0.0;
    double entropy = 0.0;  // bits for a whole length-n trajectory (or label string)
};

struct MixedLengthComparison {
    double mixed_rate = 0.0;         // E[H] / E[N], what a terminator-joined stream converges to
    double per_length_rate = 0.0;    // E[H / N], the quantity the bound needs
    bool certifying = false;         // mixed_rate is never a valid input to invert_fano
};

// Both statistics over the given groups; weights are renormalized.
MixedLengthComparison mixed_length_rate(std::span<const GroupEntropy> groups);

// Plug-in entropy in bits of a histogram; zero for an empty one.
double plugin_entropy(std::span<const std::uint64_t> counts);

}  // namespace lzpred
