#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace lzpred {

using VertexId = std::uint32_t;
using EdgeId = std::uint32_t;

struct Edge {
    EdgeId id;
    VertexId tail;
    VertexId head;
};

/*
  Immutable directed road network with dense ids and ascending-id out adjacency.

  External ids read from an edge-list file are remapped to [0, |E|) and
  [0, |V|) in order of first appearance; the mapping is kept so trajectory
  files and reports can speak in the original ids.
*/
class RoadNetwork {
public:
    RoadNetwork() = default;

    // Builds from dense edges (edge i must have id i). Throws ValidationError
    // on dangling vertices, self-loops or non-dense ids.
    static RoadNetwork from_edges(std::size_t vertex_count, std::vector<Edge> edges);

    std::size_t vertex_count() const noexcept { return vertex_count_; }
    std::size_t edge_count() const noexcept { return edges_.size(); }
    std::size_t max_out_degree() const noexcept { return max_out_degree_; }

    const Edge& edge(EdgeId e) const;
    VertexId tail(EdgeId e) const { return edge(e).tail; }
    VertexId head(EdgeId e) const { return edge(e).head; }
    std::span<const Edge> edges() const noexcept { return edges_; }

    // Ascending EdgeId. Throws std::out_of_range for v >= |V|.
    std::span<const EdgeId> out_edges(VertexId v) const;

    // External id bookkeeping. Identity mapping for networks built in memory.
    std::int64_t external_edge_id(EdgeId e) const;
    std::int64_t external_vertex_id(VertexId v) const;
    std::optional<EdgeId> find_edge(std::int64_t external_id) const;

    // Edge-list text in external ids; load_network() of the output
    // reproduces this network.
    void write_edge_list(std::ostream& out) const;

private:
    std::size_t vertex_count_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::size_t> out_offsets_;
    std::vector<EdgeId> out_targets_;
    std::size_t max_out_degree_ = 0;
    std::vector<std::int64_t> external_edge_ids_;
    std::vector<std::int64_t> external_vertex_ids_;
    std::unordered_map<std::int64_t, EdgeId> edge_lookup_;

    friend RoadNetwork load_network(std::istream& in);
    void build_adjacency();
};

// One edge per line: "edge_id tail head" (whitespace or comma separated).
// '#' starts a comment. Throws ParseError (with line number) or ValidationError.
RoadNetwork load_network(std::istream& in);
RoadNetwork load_network_file(const std::string& path);

struct TrajectoryVerdict {
    bool valid = true;
    std::size_t first_bad_index = 0;  // meaningful only when !valid

    explicit operator bool() const noexcept { return valid; }
};

// Valid iff every id is < |E| and head(e_i) == tail(e_{i+1}) for each pair.
// On failure first_bad_index is the offending id's position, or i+1 for a
// broken link between positions i and i+1.
TrajectoryVerdict validate_trajectory(const RoadNetwork& net, std::span<const EdgeId> t);

// Built-in synthetic networks.
//   grid:WxH   4-neighbour lattice, two directed edges per adjacent pair
//   torus:WxH  same with wrap-around, every vertex has out-degree 4
//   ring:N     directed cycle, every vertex has out-degree 1
RoadNetwork make_grid_network(std::size_t width, std::size_t height);
RoadNetwork make_torus_network(std::size_t width, std::size_t height);
RoadNetwork make_ring_network(std::size_t n);

// Resolves "builtin:<kind>:<args>" or a file path.
RoadNetwork resolve_network(const std::string& spec);

}  // namespace lzpred
