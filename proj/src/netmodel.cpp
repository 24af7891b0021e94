#include "lzpred/netmodel.hpp"

#include "lzpred/error.hpp"
#include "text_util.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace lzpred {

RoadNetwork RoadNetwork::from_edges(std::size_t vertex_count, std::vector<Edge> edges) {
    RoadNetwork net;
    net.vertex_count_ = vertex_count;
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const Edge& e = edges[i];
        if (e.id != i) throw ValidationError("edge ids must be dense: expected " + std::to_string(i) + ", got " + std::to_string(e.id));
        if (e.tail >= vertex_count || e.head >= vertex_count)
            throw ValidationError("edge " + std::to_string(i) + " references a vertex outside [0, " + std::to_string(vertex_count) + ")");
        if (e.tail == e.head) throw ValidationError("edge " + std::to_string(i) + " is a self-loop");
    }
    net.edges_ = std::move(edges);
    net.external_edge_ids_.resize(net.edges_.size());
    for (std::size_t i = 0; i < net.edges_.size(); ++i) {
        net.external_edge_ids_[i] = static_cast<std::int64_t>(i);
        net.edge_lookup_.emplace(static_cast<std::int64_t>(i), static_cast<EdgeId>(i));
    }
    net.external_vertex_ids_.resize(vertex_count);
    for (std::size_t v = 0; v < vertex_count; ++v) net.external_vertex_ids_[v] = static_cast<std::int64_t>(v);
    net.build_adjacency();
    return net;
}

void RoadNetwork::build_adjacency() {
    std::vector<std::size_t> degree(vertex_count_, 0);
    for (const Edge& e : edges_) ++degree[e.tail];
    out_offsets_.assign(vertex_count_ + 1, 0);
    for (std::size_t v = 0; v < vertex_count_; ++v) out_offsets_[v + 1] = out_offsets_[v] + degree[v];
    out_targets_.assign(edges_.size(), 0);
    std::vector<std::size_t> cursor(out_offsets_.begin(), out_offsets_.end() - 1);
    // edges_ is id-ordered, so each bucket fills in ascending EdgeId
    for (const Edge& e : edges_) out_targets_[cursor[e.tail]++] = e.id;
    max_out_degree_ = degree.empty() ? 0 : *std::max_element(degree.begin(), degree.end());
}

const Edge& RoadNetwork::edge(EdgeId e) const {
    if (e >= edges_.size()) throw std::out_of_range("edge id " + std::to_string(e) + " out of range");
    return edges_[e];
}

std::span<const EdgeId> RoadNetwork::out_edges(VertexId v) const {
    if (v >= vertex_count_) throw std::out_of_range("vertex id " + std::to_string(v) + " out of range");
    return std::span<const EdgeId>(out_targets_).subspan(out_offsets_[v], out_offsets_[v + 1] - out_offsets_[v]);
}

std::int64_t RoadNetwork::external_edge_id(EdgeId e) const {
    if (e >= external_edge_ids_.size()) throw std::out_of_range("edge id out of range");
    return external_edge_ids_[e];
}

std::int64_t RoadNetwork::external_vertex_id(VertexId v) const {
    if (v >= external_vertex_ids_.size()) throw std::out_of_range("vertex id out of range");
    return external_vertex_ids_[v];
}

std::optional<EdgeId> RoadNetwork::find_edge(std::int64_t external_id) const {
    auto it = edge_lookup_.find(external_id);
    if (it == edge_lookup_.end()) return std::nullopt;
    return it->second;
}

void RoadNetwork::write_edge_list(std::ostream& out) const {
    bool identity = true;
    for (std::size_t v = 0; v < external_vertex_ids_.size(); ++v)
        identity = identity && external_vertex_ids_[v] == static_cast<std::int64_t>(v);
    out << "# edge_id tail head\n";
    if (identity) out << "vertices " << vertex_count_ << "\n";
    for (const Edge& e : edges_)
        out << external_edge_ids_[e.id] << ' ' << external_vertex_ids_[e.tail] << ' ' << external_vertex_ids_[e.head] << '\n';
}

RoadNetwork load_network(std::istream& in) {
    struct Record {
        std::int64_t id, tail, head;
        std::size_t line;
    };
    std::vector<Record> records;
    std::optional<std::int64_t> declared_vertices;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto fields = detail::split_fields(detail::strip_comment(line));
        if (fields.empty()) continue;
        if (fields[0] == "vertices") {
            if (fields.size() != 2 || !records.empty() || declared_vertices)
                throw ParseError("'vertices N' must be a single header line before any edge", lineno);
            auto n = detail::parse_int(fields[1]);
            if (!n || *n < 0) throw ParseError("invalid vertex count", lineno);
            declared_vertices = *n;
            continue;
        }
        if (fields.size() != 3) throw ParseError("expected 'edge_id tail head', got " + std::to_string(fields.size()) + " fields", lineno);
        auto id = detail::parse_int(fields[0]);
        auto tail = detail::parse_int(fields[1]);
        auto head = detail::parse_int(fields[2]);
        if (!id || !tail || !head) throw ParseError("non-integer field", lineno);
        records.push_back({*id, *tail, *head, lineno});
    }
    if (records.empty()) throw ValidationError("empty network: no edge records");

    RoadNetwork net;
    std::unordered_map<std::int64_t, VertexId> vertex_lookup;
    auto intern_vertex = [&](std::int64_t ext) {
        auto [it, inserted] = vertex_lookup.emplace(ext, static_cast<VertexId>(net.external_vertex_ids_.size()));
        if (inserted) net.external_vertex_ids_.push_back(ext);
        return it->second;
    };

    if (declared_vertices) {
        for (std::int64_t v = 0; v < *declared_vertices; ++v) intern_vertex(v);
        for (const Record& r : records) {
            for (std::int64_t v : {r.tail, r.head})
                if (v < 0 || v >= *declared_vertices)
                    throw ValidationError("line " + std::to_string(r.line) + ": dangling vertex " + std::to_string(v) +
                                          " outside declared range [0, " + std::to_string(*declared_vertices) + ")");
        }
    } else {
        // Without a header a vertex is defined by being the head of some
        // edge; a tail that is never entered is a dangling reference.
        std::unordered_map<std::int64_t, bool> entered;
        for (const Record& r : records) entered[r.head] = true;
        for (const Record& r : records)
            if (!entered.count(r.tail))
                throw ValidationError("line " + std::to_string(r.line) + ": dangling vertex " + std::to_string(r.tail) +
                                      " is never the head of an edge (declare 'vertices N' to allow sources)");
    }

    for (const Record& r : records) {
        if (r.tail == r.head) throw ValidationError("line " + std::to_string(r.line) + ": self-loop at vertex " + std::to_string(r.tail));
        auto dense = static_cast<EdgeId>(net.edges_.size());
        if (!net.edge_lookup_.emplace(r.id, dense).second)
            throw ValidationError("line " + std::to_string(r.line) + ": duplicate edge id " + std::to_string(r.id));
        VertexId t = intern_vertex(r.tail);
        VertexId h = intern_vertex(r.head);
        net.edges_.push_back({dense, t, h});
        net.external_edge_ids_.push_back(r.id);
    }
    net.vertex_count_ = net.external_vertex_ids_.size();
    net.build_adjacency();
    return net;
}

RoadNetwork load_network_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open network file: " + path);
    return load_network(in);
}

TrajectoryVerdict validate_trajectory(const RoadNetwork& net, std::span<const EdgeId> t) {
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] >= net.edge_count()) return {false, i};
        if (i > 0 && net.head(t[i - 1]) != net.tail(t[i])) return {false, i};
    }
    return {};
}

RoadNetwork make_grid_network(std::size_t width, std::size_t height) {
    if (width == 0 || height == 0) throw ConfigError("grid dimensions must be positive");
    std::vector<Edge> edges;
    auto vid = [&](std::size_t x, std::size_t y) { return static_cast<VertexId>(y * width + x); };
    auto add = [&](VertexId a, VertexId b) { edges.push_back({static_cast<EdgeId>(edges.size()), a, b}); };
    for (std::size_t y = 0; y < height; ++y) {
        for (std::size_t x = 0; x < width; ++x) {
            if (x + 1 < width) {
                add(vid(x, y), vid(x + 1, y));
                add(vid(x + 1, y), vid(x, y));
            }
            if (y + 1 < height) {
                add(vid(x, y), vid(x, y + 1));
                add(vid(x, y + 1), vid(x, y));
            }
        }
    }
    return RoadNetwork::from_edges(width * height, std::move(edges));
}

RoadNetwork make_torus_network(std::size_t width, std::size_t height) {
    if (width < 3 || height < 3) throw ConfigError("torus dimensions must be at least 3x3");
    std::vector<Edge> edges;
    auto vid = [&](std::size_t x, std::size_t y) { return static_cast<VertexId>((y % height) * width + (x % width)); };
    auto add = [&](VertexId a, VertexId b) { edges.push_back({static_cast<EdgeId>(edges.size()), a, b}); };
    for (std::size_t y = 0; y < height; ++y) {
        for (std::size_t x = 0; x < width; ++x) {
            add(vid(x, y), vid(x + 1, y));
            add(vid(x + 1, y), vid(x, y));
            add(vid(x, y), vid(x, y + 1));
            add(vid(x, y + 1), vid(x, y));
        }
    }
    return RoadNetwork::from_edges(width * height, std::move(edges));
}

RoadNetwork make_ring_network(std::size_t n) {
    if (n < 2) throw ConfigError("ring needs at least 2 vertices");
    std::vector<Edge> edges;
    for (std::size_t v = 0; v < n; ++v)
        edges.push_back({static_cast<EdgeId>(v), static_cast<VertexId>(v), static_cast<VertexId>((v + 1) % n)});
    return RoadNetwork::from_edges(n, std::move(edges));
}

namespace {

std::pair<std::size_t, std::size_t> parse_dims(std::string_view s, const std::string& spec) {
    auto x = s.find('x');
    if (x == std::string_view::npos) throw ConfigError("expected WxH in network spec: " + spec);
    auto w = detail::parse_int(s.substr(0, x));
    auto h = detail::parse_int(s.substr(x + 1));
    if (!w || !h || *w <= 0 || *h <= 0) throw ConfigError("invalid dimensions in network spec: " + spec);
    return {static_cast<std::size_t>(*w), static_cast<std::size_t>(*h)};
}

}  // namespace

RoadNetwork resolve_network(const std::string& spec) {
    constexpr std::string_view prefix = "builtin:";
    if (!std::string_view(spec).starts_with(prefix)) return load_network_file(spec);
    std::string_view rest = std::string_view(spec).substr(prefix.size());
    auto colon = rest.find(':');
    if (colon == std::string_view::npos) throw ConfigError("expected builtin:<kind>:<args>, got " + spec);
    std::string_view kind = rest.substr(0, colon), args = rest.substr(colon + 1);
    if (kind == "grid") {
        auto [w, h] = parse_dims(args, spec);
        return make_grid_network(w, h);
    }
    if (kind == "torus") {
        auto [w, h] = parse_dims(args, spec);
        return make_torus_network(w, h);
    }
    if (kind == "ring") {
        auto n = detail::parse_int(args);
        if (!n || *n < 2) throw ConfigError("invalid ring size in " + spec);
        return make_ring_network(static_cast<std::size_t>(*n));
    }
    throw ConfigError("unknown builtin network kind: " + std::string(kind));
}

}  // namespace lzpred
