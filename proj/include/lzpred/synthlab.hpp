#pragma once

#include "lzpred/corpus.hpp"
#include "lzpred/netmodel.hpp"
#include "lzpred/rng.hpp"

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace lzpred {

/*
  First-order Markov source over the edges of a network: a trajectory starts
  at an edge drawn from `initial` and moves to an out-edge of the current
  edge's head drawn from that edge's row. rows[e][k] is the probability of
  net.out_edges(net.head(e))[k]; rows of edges ending in a sink are empty.
*/
struct MarkovSource {
    RoadNetwork net;
    std::vector<double> initial;
    std::vector<std::vector<double>> rows;
    std::string family = "custom";  // how rows were drawn, e.g. "dirichlet:0.2"
    std::uint64_t seed = 0;
};

// Validates the invariants (row and initial sums within 1e-12, row sizes
// matching out-degrees, no negative mass). Throws ValidationError.
MarkovSource make_source(RoadNetwork net, std::vector<double> initial, std::vector<std::vector<double>> rows);

// Rows drawn from a symmetric Dirichlet with concentration `skew`: 0 gives
// one-hot rows, infinity uniform rows. The initial law is uniform over
// edges that have a successor.
MarkovSource make_markov_source(RoadNetwork net, double skew, std::uint64_t seed);

// Rows with one successor, chosen uniformly, holding `peak` and the rest
// sharing 1 - peak equally. On a network of constant out-degree D the labels
// of such a source are i.i.d. and the Fano bound at S = D is attained.
MarkovSource make_peaked_source(RoadNetwork net, double peak, std::uint64_t seed);

// "dirichlet:SKEW" (SKEW may be "inf") or "peaked:P".
MarkovSource make_source_from_spec(RoadNetwork net, const std::string& spec, std::uint64_t seed);

class LengthLaw {
public:
    static LengthLaw fixed(std::size_t n);
    static LengthLaw uniform(std::size_t lo, std::size_t hi);
    // Pr[N = n] proportional to q^(n - lo) on [lo, hi], q solved for `mean`.
    static LengthLaw truncated_geometric(double mean, std::size_t lo, std::size_t hi);
    // "fixed:N", "uniform:LO:HI" or "geometric:MEAN:LO:HI".
    static LengthLaw parse(const std::string& text);

    std::size_t min() const noexcept { return lo_; }
    std::size_t max() const noexcept { return lo_ + probs_.size() - 1; }
    double probability(std::size_t n) const noexcept;
    double mean() const noexcept;
    double variance() const noexcept;
    std::size_t sample(Rng& rng) const;
    const std::string& text() const noexcept { return text_; }

private:
    std::size_t lo_ = 1;
    std::vector<double> probs_{1.0};
    std::vector<double> cumulative_{1.0};
    std::string text_;

    LengthLaw(std::size_t lo, std::vector<double> probs, std::string text);
};

// Trajectories drawn i.i.d.: length from `law`, then a walk from the source.
// A walk that hits a sink early is discarded and redrawn. Workers split the
// count into contiguous blocks with seeds derive_seed(seed, worker); the
// result depends on (seed, workers) only.
TrajectoryCorpus sample_corpus(const MarkovSource& src, const LengthLaw& law, std::size_t count, std::uint64_t seed,
                               unsigned workers = 1);

// Per-position statistics of the edge process, positions 2..n.
struct PositionStats {
    std::vector<double> conditional_entropy;  // H(e_i | e_{i-1})
    std::vector<double> optimal_accuracy;     // sum_e P(e_{i-1} = e) max row(e)
};
PositionStats analytic_position_stats(const MarkovSource& src, std::size_t n);

// H(initial), the entropy of the first edge.
double analytic_initial_entropy(const MarkovSource& src);
// Exact H(T | N = n) = H(e_1) + sum_{i=2..n} H(e_i | e_{i-1}).
double analytic_group_entropy(const MarkovSource& src, std::size_t n);
// sum_{i=2..n} H(e_i | e_{i-1}) / (n - 1): bits per label given the first edge.
double analytic_label_rate(const MarkovSource& src, std::size_t n);
// Mean of the optimal next-edge accuracy over positions 2..n.
double analytic_optimal_accuracy(const MarkovSource& src, std::size_t n);
// Entropy rate of the stationary chain, by power iteration on edge marginals.
double analytic_entropy_rate(const MarkovSource& src);

// -sum p log2 p over an explicit outcome table (<= 1e6 outcomes, sum within
// 1e-9 of 1). ConfigError when too large, ValidationError when not a law.
double brute_force_entropy(std::span<const double> probabilities);

struct GroundTruthRow {
    std::size_t n = 0;
    double probability = 0.0;
    double entropy = 0.0;
    double label_rate = 0.0;
    double optimal_accuracy = 0.0;
};
std::vector<GroundTruthRow> ground_truth(const MarkovSource& src, const LengthLaw& law);

}  // namespace lzpred
