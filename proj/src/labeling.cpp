#include "lzpred/labeling.hpp"

#include "lzpred/error.hpp"
#include "text_util.hpp"

#include <istream>
#include <ostream>
#include <sstream>

namespace lzpred {

namespace {

constexpr std::string_view kSchemeMagic = "lzpred-scheme";
constexpr int kSchemeVersion = 1;

// Out-edges of v by descending count, ties by ascending id. out_edges() is
// already ascending, so a stable sort on count alone gives the tie rule.
template <class CountFn>
std::vector<EdgeId> rank_out_edges(const RoadNetwork& net, VertexId v, CountFn count) {
    auto out = net.out_edges(v);
    std::vector<EdgeId> ranked(out.begin(), out.end());
    std::stable_sort(ranked.begin(), ranked.end(), [&](EdgeId a, EdgeId b) { return count(a) > count(b); });
    return ranked;
}

const char* kind_name(SchemeKind k) {
    switch (k) {
        case SchemeKind::mel: return "mel";
        case SchemeKind::rml: return "rml";
        case SchemeKind::ctx: return "ctx";
    }
    return "?";
}

}  // namespace

std::string LabelingScheme::name() const {
    if (kind_ == SchemeKind::ctx) return "ctx:" + std::to_string(order_);
    return kind_name(kind_);
}

void LabelingScheme::finish() {
    alphabet_size_ = 0;
    for (const Ranking& r : vertex_rank_) alphabet_size_ = std::max(alphabet_size_, r.size());
}

std::span<const EdgeId> LabelingScheme::ranking(std::span<const EdgeId> history) const {
    if (history.empty()) throw CodecError("labeling context needs at least one previous edge");
    const EdgeId last = history.back();
    if (last >= edge_head_.size()) throw CodecError("edge id " + std::to_string(last) + " outside the scheme's network");
    for (std::size_t j = std::min(order_, history.size()); j >= 2; --j) {
        const auto& level = deep_rank_[j - 2];
        auto it = level.find(history.last(j));
        if (it != level.end()) return it->second;
    }
    if (order_ >= 1 && !edge_rank_[last].empty()) return edge_rank_[last];
    return vertex_rank_[edge_head_[last]];
}

Label LabelingScheme::label_of(std::span<const EdgeId> history, EdgeId next) const {
    auto r = ranking(history);
    auto it = std::find(r.begin(), r.end(), next);
    if (it == r.end())
        throw CodecError("edge " + std::to_string(next) + " is not admissible after edge " + std::to_string(history.back()));
    return static_cast<Label>(it - r.begin());
}

EdgeId LabelingScheme::edge_of(std::span<const EdgeId> history, Label label) const {
    auto r = ranking(history);
    if (label >= r.size())
        throw CodecError("label " + std::to_string(label) + " exceeds out-degree " + std::to_string(r.size()) +
                         " after edge " + std::to_string(history.back()));
    return r[label];
}

std::vector<std::size_t> LabelingScheme::context_counts() const {
    std::vector<std::size_t> counts{vertex_rank_.size()};
    if (order_ >= 1)
        counts.push_back(static_cast<std::size_t>(
            std::count_if(edge_rank_.begin(), edge_rank_.end(), [](const Ranking& r) { return !r.empty(); })));
    for (const auto& level : deep_rank_) counts.push_back(level.size());
    return counts;
}

LabelingScheme build_mel(const RoadNetwork& net, const TrajectoryCorpus& c) {
    if (c.empty()) throw ConfigError("cannot build a labeling from an empty corpus");
    if (c.edge_count() != net.edge_count()) throw ConfigError("corpus and network disagree on the edge count");
    LabelingScheme s;
    s.kind_ = SchemeKind::mel;
    s.order_ = 0;
    s.edge_head_.resize(net.edge_count());
    for (const Edge& e : net.edges()) s.edge_head_[e.id] = e.head;
    s.vertex_rank_.resize(net.vertex_count());
    for (VertexId v = 0; v < net.vertex_count(); ++v)
        s.vertex_rank_[v] = rank_out_edges(net, v, [&](EdgeId e) { return c.edge_freq(e); });
    s.finish();
    return s;
}

LabelingScheme build_rml(const RoadNetwork& net, const TrajectoryCorpus& c) {
    LabelingScheme s = build_mel(net, c);
    s.kind_ = SchemeKind::rml;
    s.order_ = 1;
    s.edge_rank_.assign(net.edge_count(), {});
    for (const Edge& ctx : net.edges()) {
        auto out = net.out_edges(ctx.head);
        bool observed = std::any_of(out.begin(), out.end(), [&](EdgeId x) { return c.bigram_freq(ctx.id, x) > 0; });
        if (observed) s.edge_rank_[ctx.id] = rank_out_edges(net, ctx.head, [&](EdgeId x) { return c.bigram_freq(ctx.id, x); });
    }
    s.finish();
    return s;
}

LabelingScheme build_ctx(const RoadNetwork& net, const TrajectoryCorpus& c, std::size_t k) {
    if (k < 2) throw ConfigError("context labeling needs k >= 2, got " + std::to_string(k));
    LabelingScheme s = build_rml(net, c);
    s.kind_ = SchemeKind::ctx;
    s.order_ = k;
    s.deep_rank_.resize(k - 1);
    for (std::size_t j = 2; j <= k; ++j) {
        std::map<std::vector<EdgeId>, std::map<EdgeId, std::uint64_t>, SeqLess> counts;
        for (std::size_t i = 0; i < c.size(); ++i) {
            auto t = c[i];
            for (std::size_t pos = j; pos < t.size(); ++pos) {
                auto ctx = t.subspan(pos - j, j);
                auto it = counts.find(ctx);
                if (it == counts.end()) it = counts.emplace(std::vector<EdgeId>(ctx.begin(), ctx.end()), std::map<EdgeId, std::uint64_t>{}).first;
                ++it->second[t[pos]];
            }
        }
        auto& level = s.deep_rank_[j - 2];
        for (auto& [ctx, next] : counts) {
            const auto& followers = next;
            level.emplace(ctx, rank_out_edges(net, net.head(ctx.back()), [&](EdgeId x) {
                auto it = followers.find(x);
                return it == followers.end() ? std::uint64_t{0} : it->second;
            }));
        }
    }
    s.finish();
    return s;
}

SchemeSpec parse_scheme_spec(const std::string& text) {
    if (text == "mel") return {SchemeKind::mel, 0};
    if (text == "rml") return {SchemeKind::rml, 1};
    if (std::string_view(text).starts_with("ctx:")) {
        auto k = detail::parse_int(std::string_view(text).substr(4));
        if (!k || *k < 2) throw ConfigError("ctx scheme needs an integer k >= 2: " + text);
        return {SchemeKind::ctx, static_cast<std::size_t>(*k)};
    }
    throw ConfigError("unknown labeling scheme '" + text + "' (expected mel, rml or ctx:k)");
}

LabelingScheme build_scheme(const RoadNetwork& net, const TrajectoryCorpus& c, const SchemeSpec& spec) {
    switch (spec.kind) {
        case SchemeKind::mel: return build_mel(net, c);
        case SchemeKind::rml: return build_rml(net, c);
        case SchemeKind::ctx: return build_ctx(net, c, spec.order);
    }
    throw ConfigError("unknown scheme kind");
}

LabeledTrajectory encode_labels(const LabelingScheme& s, std::span<const EdgeId> t) {
    if (t.empty()) throw CodecError("cannot label an empty trajectory");
    LabeledTrajectory lt;
    lt.first_edge = t[0];
    if (t[0] >= s.edge_count()) throw CodecError("edge id " + std::to_string(t[0]) + " outside the scheme's network");
    lt.labels.reserve(t.size() - 1);
    for (std::size_t i = 1; i < t.size(); ++i) lt.labels.push_back(s.label_of(t.first(i), t[i]));
    return lt;
}

Trajectory decode_labels(const LabelingScheme& s, const LabeledTrajectory& lt) {
    if (lt.first_edge >= s.edge_count()) throw CodecError("first edge " + std::to_string(lt.first_edge) + " outside the scheme's network");
    Trajectory t;
    t.reserve(lt.labels.size() + 1);
    t.push_back(lt.first_edge);
    for (Label l : lt.labels) t.push_back(s.edge_of(t, l));
    return t;
}

std::vector<std::uint64_t> label_histogram(const LabelingScheme& s, const TrajectoryCorpus& c) {
    std::vector<std::uint64_t> hist(s.alphabet_size(), 0);
    for (std::size_t i = 0; i < c.size(); ++i) {
        auto t = c[i];
        for (std::size_t j = 1; j < t.size(); ++j) ++hist[s.label_of(t.first(j), t[j])];
    }
    return hist;
}

void LabelingScheme::save(std::ostream& out) const {
    auto write_ranking = [&](const Ranking& r) {
        out << r.size();
        for (EdgeId e : r) out << ' ' << e;
    };
    out << kSchemeMagic << ' ' << kSchemeVersion << '\n';
    out << "kind " << kind_name(kind_) << '\n';
    out << "order " << order_ << '\n';
    out << "edges " << edge_head_.size() << '\n';
    out << "heads";
    for (VertexId h : edge_head_) out << ' ' << h;
    out << '\n';
    out << "vertices " << vertex_rank_.size() << '\n';
    for (const Ranking& r : vertex_rank_) {
        write_ranking(r);
        out << '\n';
    }
    if (order_ >= 1) {
        out << "edge-contexts " << context_counts()[1] << '\n';
        for (std::size_t e = 0; e < edge_rank_.size(); ++e) {
            if (edge_rank_[e].empty()) continue;
            out << e << " : ";
            write_ranking(edge_rank_[e]);
            out << '\n';
        }
    }
    for (std::size_t j = 2; j <= order_; ++j) {
        const auto& level = deep_rank_[j - 2];
        out << "contexts " << j << ' ' << level.size() << '\n';
        for (const auto& [ctx, r] : level) {
            for (EdgeId e : ctx) out << e << ' ';
            out << ": ";
            write_ranking(r);
            out << '\n';
        }
    }
}

namespace {

class SchemeReader {
public:
    explicit SchemeReader(std::istream& in) : in_(in) {}

    std::vector<std::string_view> next_line() {
        for (;;) {
            if (!std::getline(in_, line_)) throw ParseError("truncated scheme artifact", lineno_);
            ++lineno_;
            auto fields = detail::split_fields(line_);
            if (!fields.empty()) return fields;
        }
    }
    std::uint64_t number(std::string_view f) const {
        auto v = detail::parse_int(f);
        if (!v || *v < 0) throw ParseError("expected a non-negative integer, got '" + std::string(f) + "'", lineno_);
        return static_cast<std::uint64_t>(*v);
    }
    std::uint64_t keyed(std::string_view key) {
        auto f = next_line();
        if (f.size() != 2 || f[0] != key) throw ParseError("expected '" + std::string(key) + " <n>'", lineno_);
        return number(f[1]);
    }
    std::vector<EdgeId> ranking(std::span<const std::string_view> f) const {
        if (f.empty()) throw ParseError("missing ranking", lineno_);
        std::uint64_t n = number(f[0]);
        if (f.size() != n + 1) throw ParseError("ranking length mismatch", lineno_);
        std::vector<EdgeId> r;
        for (std::size_t i = 1; i < f.size(); ++i) r.push_back(static_cast<EdgeId>(number(f[i])));
        return r;
    }
    std::size_t lineno() const { return lineno_; }

private:
    std::istream& in_;
    std::string line_;
    std::size_t lineno_ = 0;
};

}  // namespace

LabelingScheme LabelingScheme::load(std::istream& in) {
    SchemeReader rd(in);
    LabelingScheme s;
    auto header = rd.next_line();
    if (header.size() != 2 || header[0] != kSchemeMagic) throw ParseError("not a labeling scheme artifact", rd.lineno());
    if (rd.number(header[1]) != kSchemeVersion) throw ParseError("unsupported scheme version", rd.lineno());

    auto kind = rd.next_line();
    if (kind.size() != 2 || kind[0] != "kind") throw ParseError("expected 'kind <name>'", rd.lineno());
    if (kind[1] == "mel") s.kind_ = SchemeKind::mel;
    else if (kind[1] == "rml") s.kind_ = SchemeKind::rml;
    else if (kind[1] == "ctx") s.kind_ = SchemeKind::ctx;
    else throw ParseError("unknown scheme kind", rd.lineno());
    s.order_ = rd.keyed("order");

    const auto edges = rd.keyed("edges");
    auto heads = rd.next_line();
    if (heads.size() != edges + 1 || heads[0] != "heads") throw ParseError("head table length mismatch", rd.lineno());
    for (std::size_t i = 1; i < heads.size(); ++i) s.edge_head_.push_back(static_cast<VertexId>(rd.number(heads[i])));

    const auto vertices = rd.keyed("vertices");
    for (std::uint64_t v = 0; v < vertices; ++v) s.vertex_rank_.push_back(rd.ranking(rd.next_line()));
    for (VertexId h : s.edge_head_)
        if (h >= vertices) throw ParseError("edge head outside vertex range", rd.lineno());

    auto split_context = [&](const std::vector<std::string_view>& f) {
        auto colon = std::find(f.begin(), f.end(), std::string_view(":"));
        if (colon == f.end()) throw ParseError("expected 'context : ranking'", rd.lineno());
        std::vector<EdgeId> ctx;
        for (auto it = f.begin(); it != colon; ++it) ctx.push_back(static_cast<EdgeId>(rd.number(*it)));
        for (EdgeId e : ctx)
            if (e >= edges) throw ParseError("context edge outside edge range", rd.lineno());
        return std::pair{ctx, rd.ranking(std::span(colon + 1, f.end()))};
    };

    if (s.order_ >= 1) {
        s.edge_rank_.assign(edges, {});
        const auto n = rd.keyed("edge-contexts");
        for (std::uint64_t i = 0; i < n; ++i) {
            auto [ctx, r] = split_context(rd.next_line());
            if (ctx.size() != 1) throw ParseError("edge context must hold one edge", rd.lineno());
            s.edge_rank_[ctx[0]] = std::move(r);
        }
    }
    s.deep_rank_.resize(s.order_ >= 2 ? s.order_ - 1 : 0);
    for (std::size_t j = 2; j <= s.order_; ++j) {
        auto f = rd.next_line();
        if (f.size() != 3 || f[0] != "contexts" || rd.number(f[1]) != j) throw ParseError("expected 'contexts <j> <n>'", rd.lineno());
        const auto n = rd.number(f[2]);
        for (std::uint64_t i = 0; i < n; ++i) {
            auto [ctx, r] = split_context(rd.next_line());
            if (ctx.size() != j) throw ParseError("context length mismatch", rd.lineno());
            s.deep_rank_[j - 2].emplace(std::move(ctx), std::move(r));
        }
    }
    s.validate();
    s.finish();
    return s;
}

// Every edge in exactly one vertex ranking; every context ranking a
// permutation of its head vertex's ranking.
void LabelingScheme::validate() const {
    std::vector<int> seen(edge_head_.size(), 0);
    for (const Ranking& r : vertex_rank_)
        for (EdgeId e : r) {
            if (e >= seen.size() || seen[e]++) throw ValidationError("vertex rankings do not partition the edge set");
        }
    if (std::find(seen.begin(), seen.end(), 0) != seen.end()) throw ValidationError("vertex rankings do not partition the edge set");
    auto same_set = [&](const Ranking& r, EdgeId ctx_last) {
        Ranking a = r, b = vertex_rank_[edge_head_[ctx_last]];
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        if (a != b) throw ValidationError("context ranking after edge " + std::to_string(ctx_last) + " is not a permutation of its head's out-edges");
    };
    for (std::size_t e = 0; e < edge_rank_.size(); ++e)
        if (!edge_rank_[e].empty()) same_set(edge_rank_[e], static_cast<EdgeId>(e));
    for (const auto& level : deep_rank_)
        for (const auto& [ctx, r] : level) same_set(r, ctx.back());
}

}  // namespace lzpred
