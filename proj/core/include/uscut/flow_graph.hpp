#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace uscut::graph {

using NodeId = std::int32_t;

/// Marker capacity for edges that must never be cut. The solver replaces it
/// with a per-graph finite sentinel (sum of finite capacities + 1).
inline constexpr double kInfinite = std::numeric_limits<double>::infinity();

struct Edge {
    NodeId from;
    NodeId to;
    double capacity;

    bool infinite() const noexcept { return capacity == kInfinite; }
};

/// Directed capacitated graph with distinguished source and sink.
/// Parallel edges are allowed.
class FlowGraph {
public:
    FlowGraph(NodeId node_count, NodeId source, NodeId sink);

    /// Returns the edge index. Throws InvalidArgument on bad ids or negative/NaN capacity.
    std::size_t add_edge(NodeId from, NodeId to, double capacity);
    void set_capacity(std::size_t edge, double capacity);

    NodeId node_count() const noexcept { return node_count_; }
    NodeId source() const noexcept { return source_; }
    NodeId sink() const noexcept { return sink_; }
    const std::vector<Edge>& edges() const noexcept { return edges_; }

    /// Sum of finite capacities.
    double finite_capacity_sum() const noexcept;

    /// Text form: `n <count>`, `s <id>`, `t <id>`, then `e <from> <to> <cap|INF>` per edge.
    void write_dump(std::ostream& out) const;
    std::string dump() const;
    static FlowGraph read_dump(std::istream& in);

private:
    static void check_capacity(double capacity);

    NodeId node_count_;
    NodeId source_;
    NodeId sink_;
    std::vector<Edge> edges_;
};

} // namespace uscut::graph
