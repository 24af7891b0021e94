#include "lzpred/synthlab.hpp"

#include "lzpred/error.hpp"
#include "text_util.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <thread>

namespace lzpred {

namespace {

double unit_draw(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::size_t pick(std::span<const double> cumulative, double u) {
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    if (it == cumulative.end()) --it;  // u within rounding of the total
    return static_cast<std::size_t>(it - cumulative.begin());
}

std::vector<double> cumulate(std::span<const double> p) {
    std::vector<double> c(p.size());
    std::partial_sum(p.begin(), p.end(), c.begin());
    return c;
}

double entropy_of(std::span<const double> p) {
    double h = 0.0;
    for (double x : p)
        if (x > 0.0) h -= x * std::log2(x);
    return h;
}

void check_law(std::span<const double> p, const std::string& what) {
    double sum = 0.0;
    for (double x : p) {
        if (!(x >= 0.0)) throw ValidationError(what + " has a negative or NaN entry");
        sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw ValidationError(what + " sums to " + std::to_string(sum));
}

// Edge marginal at position i+1 from the marginal at position i.
std::vector<double> step(const MarkovSource& src, const std::vector<double>& marginal) {
    std::vector<double> next(marginal.size(), 0.0);
    for (EdgeId e = 0; e < marginal.size(); ++e) {
        if (marginal[e] == 0.0) continue;
        const auto& row = src.rows[e];
        if (row.empty())
            throw ValidationError("edge " + std::to_string(e) + " ends in a sink but carries probability mass; analytic results need walks that never stall");
        auto out = src.net.out_edges(src.net.head(e));
        for (std::size_t k = 0; k < row.size(); ++k) next[out[k]] += marginal[e] * row[k];
    }
    return next;
}

}  // namespace

MarkovSource make_source(RoadNetwork net, std::vector<double> initial, std::vector<std::vector<double>> rows) {
    if (initial.size() != net.edge_count()) throw ValidationError("initial law must cover every edge");
    if (rows.size() != net.edge_count()) throw ValidationError("need one transition row per edge");
    check_law(initial, "initial law");
    for (EdgeId e = 0; e < rows.size(); ++e) {
        const auto d = net.out_edges(net.head(e)).size();
        if (rows[e].size() != d)
            throw ValidationError("row of edge " + std::to_string(e) + " has " + std::to_string(rows[e].size()) + " entries, head out-degree is " + std::to_string(d));
        if (d > 0) check_law(rows[e], "row of edge " + std::to_string(e));
    }
    MarkovSource src;
    src.net = std::move(net);
    src.initial = std::move(initial);
    src.rows = std::move(rows);
    return src;
}

namespace {

std::vector<double> uniform_initial(const std::vector<std::vector<double>>& rows) {
    std::size_t movable = 0;
    for (const auto& row : rows) movable += !row.empty();
    if (movable == 0) throw ConfigError("network has no edge with a successor");
    std::vector<double> initial(rows.size(), 0.0);
    for (std::size_t e = 0; e < rows.size(); ++e)
        if (!rows[e].empty()) initial[e] = 1.0 / static_cast<double>(movable);
    return initial;
}

std::string number_text(double x) {
    std::ostringstream out;
    out << x;
    return out.str();
}

}  // namespace

MarkovSource make_markov_source(RoadNetwork net, double skew, std::uint64_t seed) {
    if (std::isnan(skew) || skew < 0.0) throw ConfigError("skew must be a non-negative number");
    Rng rng(seed);
    std::vector<std::vector<double>> rows(net.edge_count());
    for (EdgeId e = 0; e < net.edge_count(); ++e) {
        const auto d = net.out_edges(net.head(e)).size();
        auto& row = rows[e];
        row.assign(d, 0.0);
        if (d == 0) continue;
        if (std::isinf(skew)) {
            std::fill(row.begin(), row.end(), 1.0 / static_cast<double>(d));
        } else if (skew == 0.0) {
            row[std::uniform_int_distribution<std::size_t>(0, d - 1)(rng)] = 1.0;
        } else {
            // Gamma(a) = Gamma(a + 1) * U^(1/a), kept in log space so tiny
            // concentrations do not underflow to an all-zero row.
            std::gamma_distribution<double> gamma(skew + 1.0, 1.0);
            std::vector<double> logs(d);
            for (auto& l : logs) l = std::log(gamma(rng)) + std::log1p(-unit_draw(rng)) / skew;
            const double top = *std::max_element(logs.begin(), logs.end());
            double sum = 0.0;
            for (std::size_t k = 0; k < d; ++k) sum += row[k] = std::exp(logs[k] - top);
            for (auto& p : row) p /= sum;
        }
        // exact unit sums for the 1e-12 invariant
        double sum = std::accumulate(row.begin(), row.end(), 0.0);
        auto big = std::max_element(row.begin(), row.end());
        *big += 1.0 - sum;
    }
    auto initial = uniform_initial(rows);
    MarkovSource src = make_source(std::move(net), std::move(initial), std::move(rows));
    src.family = "dirichlet:" + number_text(skew);
    src.seed = seed;
    return src;
}

MarkovSource make_peaked_source(RoadNetwork net, double peak, std::uint64_t seed) {
    if (!(peak >= 0.0 && peak <= 1.0)) throw ConfigError("peak must lie in [0, 1]");
    Rng rng(seed);
    std::vector<std::vector<double>> rows(net.edge_count());
    for (EdgeId e = 0; e < net.edge_count(); ++e) {
        const auto d = net.out_edges(net.head(e)).size();
        auto& row = rows[e];
        if (d == 0) continue;
        if (d == 1) {
            row.assign(1, 1.0);
            continue;
        }
        row.assign(d, (1.0 - peak) / static_cast<double>(d - 1));
        row[std::uniform_int_distribution<std::size_t>(0, d - 1)(rng)] = peak;
        double sum = std::accumulate(row.begin(), row.end(), 0.0);
        *std::max_element(row.begin(), row.end()) += 1.0 - sum;
    }
    auto initial = uniform_initial(rows);
    MarkovSource src = make_source(std::move(net), std::move(initial), std::move(rows));
    src.family = "peaked:" + number_text(peak);
    src.seed = seed;
    return src;
}

MarkovSource make_source_from_spec(RoadNetwork net, const std::string& spec, std::uint64_t seed) {
    const auto colon = spec.find(':');
    const std::string kind = spec.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
    double value = 0.0;
    try {
        std::size_t used = 0;
        value = std::stod(arg, &used);
        if (used != arg.size()) throw std::invalid_argument(arg);
    } catch (const std::exception&) {
        throw ConfigError("bad source spec '" + spec + "' (want dirichlet:SKEW or peaked:P)");
    }
    if (kind == "dirichlet") return make_markov_source(std::move(net), value, seed);
    if (kind == "peaked") return make_peaked_source(std::move(net), value, seed);
    throw ConfigError("unknown source family '" + kind + "' (want dirichlet or peaked)");
}

LengthLaw::LengthLaw(std::size_t lo, std::vector<double> probs, std::string text)
    : lo_(lo), probs_(std::move(probs)), text_(std::move(text)) {
    cumulative_ = cumulate(probs_);
}

LengthLaw LengthLaw::fixed(std::size_t n) {
    if (n < 1) throw ConfigError("trajectory length must be at least 1");
    return LengthLaw(n, {1.0}, "fixed:" + std::to_string(n));
}

LengthLaw LengthLaw::uniform(std::size_t lo, std::size_t hi) {
    if (lo < 1 || hi < lo) throw ConfigError("uniform length law needs 1 <= lo <= hi");
    const std::size_t k = hi - lo + 1;
    return LengthLaw(lo, std::vector<double>(k, 1.0 / static_cast<double>(k)),
                     "uniform:" + std::to_string(lo) + ":" + std::to_string(hi));
}

LengthLaw LengthLaw::truncated_geometric(double mean, std::size_t lo, std::size_t hi) {
    if (lo < 1 || hi <= lo) throw ConfigError("geometric length law needs 1 <= lo < hi");
    if (!(mean > static_cast<double>(lo) && mean < static_cast<double>(hi)))
        throw ConfigError("geometric length law mean must lie strictly inside (lo, hi)");
    const std::size_t k = hi - lo + 1;
    auto law_for = [&](double log_q) {
        // weights q^j normalized through the largest exponent
        std::vector<double> w(k);
        const double top = log_q > 0 ? log_q * static_cast<double>(k - 1) : 0.0;
        double sum = 0.0;
        for (std::size_t j = 0; j < k; ++j) sum += w[j] = std::exp(log_q * static_cast<double>(j) - top);
        for (auto& x : w) x /= sum;
        return w;
    };
    auto mean_of = [&](const std::vector<double>& w) {
        double m = 0.0;
        for (std::size_t j = 0; j < k; ++j) m += w[j] * static_cast<double>(lo + j);
        return m;
    };
    double a = -50.0, b = 50.0;
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (a + b);
        if (mean_of(law_for(mid)) < mean) a = mid;
        else b = mid;
    }
    std::ostringstream text;
    text << "geometric:" << mean << ":" << lo << ":" << hi;
    return LengthLaw(lo, law_for(0.5 * (a + b)), text.str());
}

LengthLaw LengthLaw::parse(const std::string& text) {
    std::vector<std::string_view> parts;
    std::string_view rest = text;
    for (;;) {
        auto colon = rest.find(':');
        parts.push_back(rest.substr(0, colon));
        if (colon == std::string_view::npos) break;
        rest = rest.substr(colon + 1);
    }
    auto count = [&](std::string_view f) {
        auto v = detail::parse_int(f);
        if (!v || *v < 1) throw ConfigError("invalid length in length law '" + text + "'");
        return static_cast<std::size_t>(*v);
    };
    if (parts[0] == "fixed" && parts.size() == 2) return fixed(count(parts[1]));
    if (parts[0] == "uniform" && parts.size() == 3) return uniform(count(parts[1]), count(parts[2]));
    if (parts[0] == "geometric" && parts.size() == 4) {
        double mean = 0.0;
        try {
            mean = std::stod(std::string(parts[1]));
        } catch (const std::exception&) {
            throw ConfigError("invalid mean in length law '" + text + "'");
        }
        return truncated_geometric(mean, count(parts[2]), count(parts[3]));
    }
    throw ConfigError("unknown length law '" + text + "' (expected fixed:N, uniform:LO:HI or geometric:MEAN:LO:HI)");
}

double LengthLaw::probability(std::size_t n) const noexcept {
    if (n < lo_ || n > max()) return 0.0;
    return probs_[n - lo_];
}

double LengthLaw::mean() const noexcept {
    double m = 0.0;
    for (std::size_t j = 0; j < probs_.size(); ++j) m += probs_[j] * static_cast<double>(lo_ + j);
    return m;
}

double LengthLaw::variance() const noexcept {
    const double m = mean();
    double v = 0.0;
    for (std::size_t j = 0; j < probs_.size(); ++j) {
        const double d = static_cast<double>(lo_ + j) - m;
        v += probs_[j] * d * d;
    }
    return v;
}

std::size_t LengthLaw::sample(Rng& rng) const { return lo_ + pick(cumulative_, unit_draw(rng) * cumulative_.back()); }

TrajectoryCorpus sample_corpus(const MarkovSource& src, const LengthLaw& law, std::size_t count, std::uint64_t seed,
                               unsigned workers) {
    if (count < 1) throw ConfigError("sample count must be at least 1");
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(count)));
    const auto initial_cum = cumulate(src.initial);
    std::vector<std::vector<double>> row_cum(src.rows.size());
    for (std::size_t e = 0; e < src.rows.size(); ++e) row_cum[e] = cumulate(src.rows[e]);

    auto run_block = [&](std::size_t block_count, std::uint64_t block_seed) {
        Rng rng(block_seed);
        TrajectoryCorpus corpus(src.net.edge_count());
        Trajectory t;
        for (std::size_t i = 0; i < block_count; ++i) {
            const std::size_t n = law.sample(rng);
            for (int attempt = 0;; ++attempt) {
                if (attempt == 1000) throw ValidationError("could not sample a walk of length " + std::to_string(n) + " without reaching a sink");
                t.clear();
                t.push_back(static_cast<EdgeId>(pick(initial_cum, unit_draw(rng) * initial_cum.back())));
                while (t.size() < n) {
                    const auto& cum = row_cum[t.back()];
                    if (cum.empty()) break;
                    auto out = src.net.out_edges(src.net.head(t.back()));
                    t.push_back(out[pick(cum, unit_draw(rng) * cum.back())]);
                }
                if (t.size() == n) break;
            }
            corpus.add(t);
        }
        return corpus;
    };

    if (workers == 1) return run_block(count, derive_seed(seed, 0));
    std::vector<TrajectoryCorpus> parts(workers);
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t lo = count * w / workers, hi = count * (w + 1) / workers;
        pool.emplace_back([&, w, lo, hi] {
            try {
                parts[w] = run_block(hi - lo, derive_seed(seed, w));
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& err : errors)
        if (err) std::rethrow_exception(err);
    TrajectoryCorpus merged(src.net.edge_count());
    for (const auto& p : parts) merged.merge(p);
    return merged;
}

PositionStats analytic_position_stats(const MarkovSource& src, std::size_t n) {
    if (n < 2) throw ConfigError("position statistics need n >= 2");
    std::vector<double> row_entropy(src.rows.size()), row_max(src.rows.size());
    for (std::size_t e = 0; e < src.rows.size(); ++e) {
        row_entropy[e] = entropy_of(src.rows[e]);
        row_max[e] = src.rows[e].empty() ? 0.0 : *std::max_element(src.rows[e].begin(), src.rows[e].end());
    }
    PositionStats stats;
    std::vector<double> marginal = src.initial;
    for (std::size_t i = 2; i <= n; ++i) {
        double h = 0.0, acc = 0.0;
        for (EdgeId e = 0; e < marginal.size(); ++e) {
            h += marginal[e] * row_entropy[e];
            acc += marginal[e] * row_max[e];
        }
        marginal = step(src, marginal);  // also rejects mass stalled at a sink
        stats.conditional_entropy.push_back(h);
        stats.optimal_accuracy.push_back(std::min(acc, 1.0));  // rounding can push a sure guess past 1
    }
    return stats;
}

double analytic_initial_entropy(const MarkovSource& src) { return entropy_of(src.initial); }

double analytic_group_entropy(const MarkovSource& src, std::size_t n) {
    if (n < 1) throw ConfigError("trajectory length must be at least 1");
    double h = analytic_initial_entropy(src);
    if (n == 1) return h;
    for (double x : analytic_position_stats(src, n).conditional_entropy) h += x;
    return h;
}

double analytic_label_rate(const MarkovSource& src, std::size_t n) {
    auto stats = analytic_position_stats(src, n);
    return std::accumulate(stats.conditional_entropy.begin(), stats.conditional_entropy.end(), 0.0) / static_cast<double>(n - 1);
}

double analytic_optimal_accuracy(const MarkovSource& src, std::size_t n) {
    auto stats = analytic_position_stats(src, n);
    return std::accumulate(stats.optimal_accuracy.begin(), stats.optimal_accuracy.end(), 0.0) / static_cast<double>(n - 1);
}

double analytic_entropy_rate(const MarkovSource& src) {
    std::vector<double> marginal = src.initial;
    // Converges geometrically at the chain's mixing speed; the cap keeps large
    // slowly mixing networks cheap at a small loss of digits.
    for (int iter = 0; iter < 5000; ++iter) {
        auto next = step(src, marginal);
        double diff = 0.0;
        for (std::size_t e = 0; e < next.size(); ++e) {
            next[e] = 0.5 * (next[e] + marginal[e]);  // lazy step, same fixed point, no periodicity
            diff += std::abs(next[e] - marginal[e]);
        }
        marginal.swap(next);
        if (diff < 1e-13) break;
    }
    double h = 0.0;
    for (EdgeId e = 0; e < marginal.size(); ++e) h += marginal[e] * entropy_of(src.rows[e]);
    return h;
}

double brute_force_entropy(std::span<const double> probabilities) {
    if (probabilities.size() > 1'000'000) throw ConfigError("brute-force entropy refuses tables over 1e6 outcomes");
    double sum = 0.0;
    for (double p : probabilities) {
        if (!(p >= 0.0)) throw ValidationError("probability table has a negative or NaN entry");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw ValidationError("probability table sums to " + std::to_string(sum));
    return entropy_of(probabilities);
}

std::vector<GroundTruthRow> ground_truth(const MarkovSource& src, const LengthLaw& law) {
    const double h1 = analytic_initial_entropy(src);
    PositionStats stats;
    if (law.max() >= 2) stats = analytic_position_stats(src, law.max());
    std::vector<GroundTruthRow> rows;
    double h = 0.0, acc = 0.0;  // prefix sums over positions 2..n
    for (std::size_t n = 1; n <= law.max(); ++n) {
        if (n >= 2) {
            h += stats.conditional_entropy[n - 2];
            acc += stats.optimal_accuracy[n - 2];
        }
        const double p = law.probability(n);
        if (n < law.min() || p <= 0.0) continue;
        GroundTruthRow r;
        r.n = n;
        r.probability = p;
        r.entropy = h1 + h;
        if (n >= 2) {
            r.label_rate = h / static_cast<double>(n - 1);
            r.optimal_accuracy = acc / static_cast<double>(n - 1);
        }
        rows.push_back(r);
    }
    return rows;
}

}  // namespace lzpred
