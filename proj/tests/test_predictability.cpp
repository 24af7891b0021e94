#include "lzpred/error.hpp"
#include "lzpred/predictability.hpp"
#include "lzpred/synthlab.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace lzpred;

TEST(BinaryEntropy, Values) {
    EXPECT_DOUBLE_EQ(binary_entropy(0.5), 1.0);
    EXPECT_EQ(binary_entropy(0.0), 0.0);
    EXPECT_EQ(binary_entropy(1.0), 0.0);
    // -0.9 log2 0.9 - 0.1 log2 0.1, long-hand
    const double expect = -(0.9 * std::log(0.9) + 0.1 * std::log(0.1)) / std::log(2.0);
    EXPECT_NEAR(binary_entropy(0.9), expect, 1e-15);
    EXPECT_NEAR(binary_entropy(0.9), 0.468995593589281, 1e-14);
    EXPECT_THROW(binary_entropy(-0.01), DomainError);
    EXPECT_THROW(binary_entropy(1.01), DomainError);
    EXPECT_THROW(binary_entropy(std::nan("")), DomainError);
}

TEST(FanoHf, Values) {
    for (std::size_t s : {2u, 3u, 7u, 64u}) {
        EXPECT_EQ(fano_hf(1.0, AlphabetSize(s)), 0.0);
        EXPECT_NEAR(fano_hf(1.0 / static_cast<double>(s), AlphabetSize(s)), std::log2(static_cast<double>(s)), 1e-12);
    }
    for (double p : {0.1, 0.37, 0.8}) EXPECT_DOUBLE_EQ(fano_hf(p, AlphabetSize(2)), binary_entropy(p));
    EXPECT_THROW(AlphabetSize(1), DomainError);
    EXPECT_THROW(fano_hf(1.5, AlphabetSize(3)), DomainError);
}

TEST(FanoHf, DecreasingOnUpperBranch) {
    for (std::size_t s : {2u, 4u, 7u, 30u}) {
        double prev = fano_hf(1.0 / static_cast<double>(s), AlphabetSize(s));
        for (int k = 1; k <= 200; ++k) {
            const double p = 1.0 / static_cast<double>(s) + (1.0 - 1.0 / static_cast<double>(s)) * k / 200.0;
            const double h = fano_hf(p, AlphabetSize(s));
            EXPECT_LT(h, prev);
            prev = h;
        }
    }
}

TEST(InvertFano, EdgeCases) {
    EXPECT_EQ(invert_fano(0.0, AlphabetSize(7)), 1.0);
    EXPECT_NEAR(invert_fano(1.0, AlphabetSize(2)), 0.5, 1e-9);
    EXPECT_DOUBLE_EQ(invert_fano(std::log2(7.0), AlphabetSize(7)), 1.0 / 7.0);
    EXPECT_DOUBLE_EQ(invert_fano(10.0, AlphabetSize(7)), 1.0 / 7.0);
    EXPECT_THROW(invert_fano(-1e-3, AlphabetSize(7)), DomainError);
    EXPECT_THROW(invert_fano(std::nan(""), AlphabetSize(7)), DomainError);
}

TEST(InvertFano, ReferenceValues) {
    EXPECT_NEAR(invert_fano(1.15, AlphabetSize(7)), 0.8190, 5e-4);
    EXPECT_NEAR(invert_fano(1.12, AlphabetSize(7)), 0.8253, 5e-4);
    EXPECT_NEAR(invert_fano(1.15, AlphabetSize(6)), 0.8083, 5e-4);
    EXPECT_NEAR(invert_fano(1.12, AlphabetSize(6)), 0.8151, 5e-4);
    for (double h : {1.15, 1.12})
        EXPECT_NEAR(fano_hf(invert_fano(h, AlphabetSize(7)), AlphabetSize(7)), h, 1e-12);
}

TEST(InvertFano, RoundtripProperty) {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 20'000; ++trial) {
        const std::size_t s = 2 + rng() % 63;
        const double p = 1.0 / static_cast<double>(s) + u(rng) * (1.0 - 1.0 / static_cast<double>(s));
        const double h = fano_hf(p, AlphabetSize(s));
        ASSERT_NEAR(invert_fano(h, AlphabetSize(s)), p, 1e-9) << "S=" << s << " p=" << p;
    }
}

TEST(InvertFano, MonotoneInEntropy) {
    std::mt19937_64 rng(78);
    std::uniform_real_distribution<double> u(0.0, 6.5);
    for (int trial = 0; trial < 2000; ++trial) {
        const std::size_t s = 2 + rng() % 40;
        double a = u(rng), b = u(rng);
        if (a > b) std::swap(a, b);
        EXPECT_GE(invert_fano(a, AlphabetSize(s)), invert_fano(b, AlphabetSize(s)));
    }
}

TEST(InvertFano, DirectionInAlphabetSize) {
    // fano_hf(p, S) grows with S at fixed p, so below log2 S the solution
    // moves up with S; once both sizes clamp, 1/S moves down.
    std::mt19937_64 rng(79);
    std::uniform_real_distribution<double> u(0.0, 6.5);
    for (int trial = 0; trial < 2000; ++trial) {
        const std::size_t s = 2 + rng() % 40;
        const double h = u(rng);
        const double here = invert_fano(h, AlphabetSize(s)), next = invert_fano(h, AlphabetSize(s + 1));
        if (h < std::log2(static_cast<double>(s))) EXPECT_GE(next, here - 1e-12) << "S=" << s << " h=" << h;
        else if (h >= std::log2(static_cast<double>(s + 1))) EXPECT_LT(next, here) << "S=" << s << " h=" << h;
    }
    EXPECT_GT(invert_fano(1.15, AlphabetSize(7)), invert_fano(1.15, AlphabetSize(6)));
}

TEST(GroupPredictability, DiscountExamples) {
    auto g = group_predictability(0.0, 10, AlphabetSize(5), 1.0, FirstEdgeCorrection::discount);
    EXPECT_EQ(g.pi_n, 1.0);
    EXPECT_DOUBLE_EQ(g.pi_hat_n, 0.9);
    const double rate = 1.3;
    auto big = group_predictability(rate, 100'000, AlphabetSize(7), 1.0, FirstEdgeCorrection::discount);
    EXPECT_NEAR(big.pi_hat_n, invert_fano(rate, AlphabetSize(7)), 1e-4);
}

TEST(GroupPredictability, SelfConsistency) {
    auto g = group_predictability(2.0, 35, AlphabetSize(6));
    EXPECT_NEAR(fano_hf(g.pi_n, AlphabetSize(6)), 34.0 / 35.0 * 2.0, 1e-12);
    EXPECT_EQ(g.n, 35u);
    EXPECT_EQ(g.alphabet, 6u);
}

TEST(GroupPredictability, RenormalizeIsDefaultAndCapped) {
    auto g = group_predictability(0.0, 10, AlphabetSize(5));
    EXPECT_EQ(g.pi_hat_n, 1.0);
    auto h = group_predictability(1.0, 8, AlphabetSize(4));
    EXPECT_DOUBLE_EQ(h.pi_hat_n, std::min(1.0, 8.0 / 7.0 * h.pi_n));
    auto d = group_predictability(1.0, 8, AlphabetSize(4), 1.0, FirstEdgeCorrection::discount);
    EXPECT_LT(d.pi_hat_n, h.pi_hat_n);
    EXPECT_EQ(parse_first_edge_correction("discount"), FirstEdgeCorrection::discount);
    EXPECT_STREQ(to_string(FirstEdgeCorrection::renormalize), "renormalize");
    EXPECT_THROW(parse_first_edge_correction("none"), ConfigError);
}

TEST(GroupPredictability, Errors) {
    EXPECT_THROW(group_predictability(1.0, 1, AlphabetSize(4)), ConfigError);
    EXPECT_THROW(group_predictability(-0.5, 5, AlphabetSize(4)), DomainError);
}

TEST(GroupPredictability, ExactEntropyNeverUnderestimates) {
    // Analytic per-label rate in, analytic optimal accuracy as the floor.
    std::mt19937_64 rng(79);
    int checked = 0;
    for (int trial = 0; trial < 40; ++trial) {
        auto net = oracle::random_toy_net(rng, 3 + trial % 3, 6 + trial % 5);
        auto src = oracle::random_toy_source(rng, net);
        for (std::size_t n = 2; n <= 8; ++n) {
            const double rate = analytic_label_rate(src, n);
            const AlphabetSize s(std::max<std::size_t>(2, net.max_out_degree()));
            auto g = group_predictability(rate, n, s);
            ASSERT_GE(g.pi_hat_n, analytic_optimal_accuracy(src, n) - 1e-9);
            ++checked;
        }
    }
    EXPECT_EQ(checked, 280);
}

TEST(Aggregate, Examples) {
    GroupEstimate a, b;
    a.weight = 0.5;
    a.pi_hat_n = 0.8;
    b.weight = 0.5;
    b.pi_hat_n = 0.9;
    EXPECT_DOUBLE_EQ(aggregate({a, b}).aggregate_pi, 0.85);
    GroupEstimate single;
    single.weight = 1.0;
    single.pi_hat_n = 0.731;
    EXPECT_DOUBLE_EQ(aggregate({single}).aggregate_pi, 0.731);
    a.weight = 0.6;
    EXPECT_THROW(aggregate({a, b}), ValidationError);
    EXPECT_THROW(aggregate({}), ValidationError);
}

TEST(MixedLength, Examples) {
    std::vector<GroupEntropy> two{{2, 0.5, 1.0}, {4, 0.5, 4.0}};
    auto m = mixed_length_rate(two);
    EXPECT_NEAR(m.mixed_rate, 2.5 / 3.0, 1e-15);
    EXPECT_NEAR(m.per_length_rate, 0.75, 1e-15);
    EXPECT_FALSE(m.certifying);
    std::vector<GroupEntropy> same{{5, 0.3, 7.0}, {5, 0.7, 7.0}};
    EXPECT_NEAR(mixed_length_rate(same).mixed_rate, 7.0 / 5.0, 1e-15);
}

TEST(MixedLength, EnumeratedSourceDistinguishesStatistics) {
    std::mt19937_64 rng(80);
    auto net = oracle::random_toy_net(rng, 4, 8);
    auto src = oracle::random_toy_source(rng, net);
    std::vector<GroupEntropy> g;
    for (std::size_t n : {2u, 6u}) g.push_back({n, 0.5, oracle::path_entropy(oracle::enumerate_paths(src, n))});
    auto m = mixed_length_rate(g);
    const double by_hand = (0.5 * g[0].entropy + 0.5 * g[1].entropy) / 4.0;
    EXPECT_NEAR(m.mixed_rate, by_hand, 1e-12);
    EXPECT_NEAR(m.per_length_rate, 0.5 * g[0].entropy / 2 + 0.5 * g[1].entropy / 6, 1e-12);
    EXPECT_GT(std::abs(m.mixed_rate - m.per_length_rate), 1e-3);
}

TEST(PluginEntropy, Values) {
    EXPECT_EQ(plugin_entropy(std::vector<std::uint64_t>{}), 0.0);
    EXPECT_EQ(plugin_entropy(std::vector<std::uint64_t>{0, 0}), 0.0);
    EXPECT_DOUBLE_EQ(plugin_entropy(std::vector<std::uint64_t>{5, 5, 5, 5}), 2.0);
    EXPECT_EQ(plugin_entropy(std::vector<std::uint64_t>{9, 0}), 0.0);
    std::vector<std::uint64_t> c{3, 1, 7, 0, 2};
    EXPECT_NEAR(plugin_entropy(c), oracle::entropy_of_counts(c), 1e-15);
}
