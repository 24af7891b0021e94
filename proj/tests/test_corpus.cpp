#include "lzpred/corpus.hpp"
#include "lzpred/error.hpp"
#include "lzpred/synthlab.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

using namespace lzpred;

namespace {

RoadNetwork three_edge_net() {
    std::istringstream in("0 0 1\n1 1 2\n2 1 0\n");
    return load_network(in);
}

TrajectoryCorpus ingest_text(const std::string& text, const RoadNetwork& net, double max_invalid = 0.01) {
    std::istringstream in(text);
    IngestOptions o;
    o.max_invalid_fraction = max_invalid;
    return ingest_corpus(in, net, o);
}

TrajectoryCorpus with_lengths(const std::map<std::size_t, std::size_t>& hist) {
    auto ring = make_ring_network(8);
    TrajectoryCorpus c(ring.edge_count());
    for (auto [n, k] : hist)
        for (std::size_t i = 0; i < k; ++i) {
            Trajectory t;
            for (std::size_t j = 0; j < n; ++j) t.push_back(static_cast<EdgeId>((i + j) % 8));
            c.add(t);
        }
    return c;
}

// Counters recomputed from scratch.
void expect_consistent(const TrajectoryCorpus& c) {
    std::map<std::size_t, std::uint64_t> hist;
    std::vector<std::uint64_t> freq(c.edge_count(), 0);
    std::map<std::pair<EdgeId, EdgeId>, std::uint64_t> bigrams;
    std::uint64_t total = 0, pairs = 0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        auto t = c[i];
        ++hist[t.size()];
        total += t.size();
        for (std::size_t j = 0; j < t.size(); ++j) {
            ++freq[t[j]];
            if (j) {
                ++bigrams[{t[j - 1], t[j]}];
                ++pairs;
            }
        }
    }
    EXPECT_EQ(hist, c.length_histogram());
    EXPECT_TRUE(std::equal(freq.begin(), freq.end(), c.edge_freqs().begin(), c.edge_freqs().end()));
    EXPECT_EQ(bigrams, c.bigram_table());
    EXPECT_EQ(total, c.total_edges());
    EXPECT_EQ(pairs, c.bigram_total());
    EXPECT_EQ(pairs, c.total_edges() - c.size());
}

}  // namespace

TEST(Ingest, TwoRecordExample) {
    auto net = three_edge_net();
    auto c = ingest_text("0 1\n0 1\n", net);
    EXPECT_EQ(c.size(), 2u);
    EXPECT_EQ(c.length_histogram(), (std::map<std::size_t, std::uint64_t>{{2, 2}}));
    EXPECT_EQ(c.bigram_freq(0, 1), 2u);
    EXPECT_EQ(c.bigram_total(), 2u);
    expect_consistent(c);
}

TEST(Ingest, DisconnectedRecordSkippedAndCounted) {
    auto net = three_edge_net();
    std::string text;
    for (int i = 0; i < 200; ++i) text += "0 1\n";
    text += "2 2\n";
    auto c = ingest_text(text, net);
    EXPECT_EQ(c.size(), 200u);
    EXPECT_EQ(c.invalid_records, 1u);
    ASSERT_EQ(c.invalid_lines.size(), 1u);
    EXPECT_EQ(c.invalid_lines[0], 201u);
}

TEST(Ingest, TooManyInvalidAborts) {
    auto net = three_edge_net();
    EXPECT_THROW(ingest_text("0 1\n2 2\n", net), ValidationError);
    auto c = ingest_text("0 1\n2 2\n", net, 0.5);
    EXPECT_EQ(c.size(), 1u);
}

TEST(Ingest, UnknownIdsAreInvalid) {
    auto net = three_edge_net();
    EXPECT_THROW(ingest_text("0 99\n", net), ValidationError);
    EXPECT_THROW(ingest_text("0 x\n", net), ValidationError);
}

TEST(Ingest, EmptyFileRejected) {
    auto net = three_edge_net();
    EXPECT_THROW(ingest_text("", net), ValidationError);
    EXPECT_THROW(ingest_text("# only a comment\n", net), ValidationError);
}

TEST(Ingest, LengthFilters) {
    auto net = three_edge_net();
    std::istringstream in("0\n0 2\n0 2 0\n0 2 0 1\n");
    IngestOptions o;
    o.min_length = 2;
    o.max_length = 3;
    auto c = ingest_corpus(in, net, o);
    EXPECT_EQ(c.size(), 2u);
    EXPECT_EQ(c.filtered_records, 2u);
}

TEST(Ingest, OrderInsensitiveStatistics) {
    auto net = make_grid_network(4, 4);
    auto src = make_markov_source(net, 0.5, 3);
    auto c = sample_corpus(src, LengthLaw::uniform(1, 7), 300, 9);
    std::vector<std::string> lines;
    for (std::size_t i = 0; i < c.size(); ++i) {
        std::ostringstream l;
        for (EdgeId e : c[i]) l << e << ' ';
        lines.push_back(l.str());
    }
    std::string forward, backward;
    for (auto& l : lines) forward += l + "\n";
    std::reverse(lines.begin(), lines.end());
    for (auto& l : lines) backward += l + "\n";
    auto a = ingest_text(forward, net), b = ingest_text(backward, net);
    EXPECT_EQ(a.length_histogram(), b.length_histogram());
    EXPECT_TRUE(std::equal(a.edge_freqs().begin(), a.edge_freqs().end(), b.edge_freqs().begin()));
    EXPECT_EQ(a.bigram_table(), b.bigram_table());
    expect_consistent(a);
}

TEST(Corpus, CountersOnRandomCorpora) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        auto net = oracle::random_toy_net(rng, 3 + trial % 3, 6);
        auto src = oracle::random_toy_source(rng, net);
        auto c = sample_corpus(src, LengthLaw::uniform(1, 9), 200, rng());
        expect_consistent(c);
    }
}

TEST(Corpus, MergeEqualsSequentialAdd) {
    auto net = make_grid_network(3, 3);
    auto src = make_markov_source(net, 1.0, 4);
    auto a = sample_corpus(src, LengthLaw::uniform(2, 6), 100, 1);
    auto b = sample_corpus(src, LengthLaw::uniform(2, 6), 80, 2);
    TrajectoryCorpus merged = a;
    merged.merge(b);
    TrajectoryCorpus direct(net.edge_count());
    for (std::size_t i = 0; i < a.size(); ++i) direct.add(a[i]);
    for (std::size_t i = 0; i < b.size(); ++i) direct.add(b[i]);
    EXPECT_EQ(merged.length_histogram(), direct.length_histogram());
    EXPECT_EQ(merged.bigram_table(), direct.bigram_table());
    EXPECT_THROW(merged.merge(TrajectoryCorpus(3)), ConfigError);
}

TEST(Corpus, WriteThenIngestRoundtrip) {
    std::istringstream nin("100 1 2\n101 2 1\n102 2 3\n103 3 2\n");
    auto net = load_network(nin);
    TrajectoryCorpus c(net.edge_count());
    c.add(std::vector<EdgeId>{0, 1, 0, 2});
    c.add(std::vector<EdgeId>{3, 1});
    std::ostringstream out;
    write_corpus(out, c, net);
    EXPECT_EQ(out.str(), "100 101 100 102\n103 101\n");
    auto back = ingest_text(out.str(), net);
    ASSERT_EQ(back.size(), 2u);
    EXPECT_TRUE(std::ranges::equal(back[0], c[0]));
    EXPECT_TRUE(std::ranges::equal(back[1], c[1]));
}

TEST(GroupByLength, Examples) {
    auto c = with_lengths({{2, 90}, {3, 10}});
    auto all = group_by_length(c, 1);
    ASSERT_EQ(all.groups.size(), 2u);
    EXPECT_DOUBLE_EQ(all.groups[0].weight, 0.9);
    EXPECT_DOUBLE_EQ(all.groups[1].weight, 0.1);
    EXPECT_DOUBLE_EQ(all.coverage, 1.0);

    auto pruned = group_by_length(c, 50);
    ASSERT_EQ(pruned.groups.size(), 1u);
    EXPECT_EQ(pruned.groups[0].n, 2u);
    EXPECT_DOUBLE_EQ(pruned.groups[0].weight, 1.0);
    EXPECT_DOUBLE_EQ(pruned.coverage, 0.9);
    EXPECT_EQ(pruned.excluded_trajectories, 10u);

    EXPECT_THROW(group_by_length(with_lengths({{5, 3}}), 10), ConfigError);
    EXPECT_THROW(group_by_length(c, 0), ConfigError);
}

TEST(GroupByLength, SingletonsAndLabelFloor) {
    auto c = with_lengths({{1, 40}, {2, 30}, {11, 30}});
    auto g = group_by_length(c, GroupingOptions{1, 100});
    ASSERT_EQ(g.groups.size(), 1u);  // 30 * 1 labels < 100, 30 * 10 labels >= 100
    EXPECT_EQ(g.groups[0].n, 11u);
    EXPECT_EQ(g.singleton_trajectories, 40u);
    EXPECT_EQ(g.excluded_trajectories, 70u);
    EXPECT_DOUBLE_EQ(g.coverage, 0.3);
}

TEST(GroupByLength, PartitionProperty) {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 30; ++trial) {
        std::map<std::size_t, std::size_t> hist;
        for (int k = 0; k < 6; ++k) hist[1 + rng() % 9] += 1 + rng() % 20;
        auto c = with_lengths(hist);
        const std::size_t floor = 1 + rng() % 10;
        GroupingResult g;
        try {
            g = group_by_length(c, floor);
        } catch (const ConfigError&) {
            continue;
        }
        std::size_t members = 0;
        double weight = 0.0;
        for (const auto& grp : g.groups) {
            members += grp.members.size();
            weight += grp.weight;
            EXPECT_GE(grp.members.size(), floor);
            for (auto i : grp.members) EXPECT_EQ(c.length(i), grp.n);
        }
        EXPECT_EQ(members + g.excluded_trajectories, c.size());
        EXPECT_NEAR(weight, 1.0, 1e-12);
    }
}

TEST(MeanLength, Examples) {
    EXPECT_DOUBLE_EQ(mean_length(with_lengths({{2, 1}, {4, 1}})), 3.0);
    EXPECT_DOUBLE_EQ(mean_length(with_lengths({{35, 17}})), 35.0);
    EXPECT_THROW(mean_length(TrajectoryCorpus(3)), DomainError);
}

TEST(MeanLength, SampledLawWithinThreeSigma) {
    auto net = make_torus_network(6, 6);
    auto src = make_markov_source(net, 1.0, 8);
    auto law = LengthLaw::uniform(30, 40);
    const std::size_t count = 5000;
    auto c = sample_corpus(src, law, count, 12);
    const double sigma = std::sqrt(law.variance() / static_cast<double>(count));
    EXPECT_NEAR(mean_length(c), 35.0, 3 * sigma);
}
