#pragma once

#include "uscut/flow_graph.hpp"

#include <cstdint>
#include <vector>

namespace uscut::graph {

enum class Side : std::uint8_t { source, sink };

struct CutResult {
    double flow_value = 0.0;
    std::vector<Side> side;

    bool on_source_side(NodeId v) const { return side[static_cast<std::size_t>(v)] == Side::source; }
};

/// Exact maximum flow / minimum s-t cut.
///
/// Augmenting paths are found with two search trees that are reused between
/// augmentations (grow / augment / adopt). The returned partition is the set
/// of nodes reachable from the source in the final residual graph, i.e. the
/// minimum cut with the smallest source side. Deterministic for a fixed edge
/// insertion order. Throws InfeasibleCut when every separating cut crosses an
/// infinite edge.
CutResult min_st_cut(const FlowGraph& graph);

/// Total capacity of edges leaving the source side; infinite edges count as kInfinite.
double cut_capacity(const FlowGraph& graph, const std::vector<Side>& side);

} // namespace uscut::graph
