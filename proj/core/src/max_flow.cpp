#include "uscut/max_flow.hpp"

#include "uscut/error.hpp"

#include <algorithm>
#include <cfloat>
#include <deque>
#include <limits>

namespace uscut::graph {
namespace {

using ArcId = std::int32_t;

constexpr ArcId kNoParent = -1;
constexpr ArcId kTerminal = -2;

enum class Tree : std::uint8_t { free, source, sink };

// Search-tree max-flow. Each input edge becomes an arc pair (2e forward,
// 2e+1 reverse); arc a's sister is a ^ 1.
class TreeSolver {
public:
    explicit TreeSolver(const FlowGraph& g)
        : n_(static_cast<std::size_t>(g.node_count())), source_(g.source()), sink_(g.sink())
    {
        sentinel_ = g.finite_capacity_sum() + 1.0;
        eps_ = sentinel_ * 4.0 * DBL_EPSILON;

        const auto& edges = g.edges();
        head_.resize(edges.size() * 2);
        residual_.resize(edges.size() * 2);
        std::vector<std::int32_t> degree(n_ + 1, 0);
        for (std::size_t e = 0; e < edges.size(); ++e) {
            const auto& edge = edges[e];
            head_[2 * e] = edge.to;
            head_[2 * e + 1] = edge.from;
            residual_[2 * e] = edge.infinite() ? sentinel_ : edge.capacity;
            residual_[2 * e + 1] = 0.0;
            if (edge.from != edge.to) {
                ++degree[static_cast<std::size_t>(edge.from) + 1];
                ++degree[static_cast<std::size_t>(edge.to) + 1];
            }
        }
        for (std::size_t v = 0; v < n_; ++v) {
            degree[v + 1] += degree[v];
        }
        first_arc_ = degree;
        adjacency_.resize(static_cast<std::size_t>(degree[n_]));
        std::vector<std::int32_t> fill(degree.begin(), degree.end() - 1);
        for (std::size_t e = 0; e < edges.size(); ++e) {
            const auto& edge = edges[e];
            if (edge.from == edge.to) {
                continue;
            }
            adjacency_[static_cast<std::size_t>(fill[static_cast<std::size_t>(edge.from)]++)] =
                static_cast<ArcId>(2 * e);
            adjacency_[static_cast<std::size_t>(fill[static_cast<std::size_t>(edge.to)]++)] =
                static_cast<ArcId>(2 * e + 1);
        }

        tree_.assign(n_, Tree::free);
        parent_.assign(n_, kNoParent);
        dist_.assign(n_, 0);
        stamp_.assign(n_, 0);
        active_flag_.assign(n_, 0);
    }

    double solve()
    {
        tree_[idx(source_)] = Tree::source;
        parent_[idx(source_)] = kTerminal;
        tree_[idx(sink_)] = Tree::sink;
        parent_[idx(sink_)] = kTerminal;
        make_active(source_);
        make_active(sink_);

        double flow = 0.0;
        NodeId current = -1;
        for (;;) {
            if (current < 0 || tree_[idx(current)] == Tree::free) {
                current = next_active();
                if (current < 0) {
                    break;
                }
            }
            const ArcId bridge = grow(current);
            if (bridge < 0) {
                current = -1;
                continue;
            }
            ++time_;
            flow += augment(bridge);
            adopt_orphans();
            if (flow >= sentinel_ - 0.5) {
                throw InfeasibleCut("infeasible cut: every s-t cut crosses an infinite edge");
            }
        }
        return flow;
    }

    std::vector<Side> source_reachable() const
    {
        std::vector<Side> side(n_, Side::sink);
        std::vector<NodeId> stack{source_};
        side[idx(source_)] = Side::source;
        while (!stack.empty()) {
            const NodeId v = stack.back();
            stack.pop_back();
            for (auto i = first_arc_[idx(v)]; i < first_arc_[idx(v) + 1]; ++i) {
                const ArcId a = adjacency_[static_cast<std::size_t>(i)];
                const NodeId w = head_[static_cast<std::size_t>(a)];
                if (side[idx(w)] == Side::sink && residual_[static_cast<std::size_t>(a)] > eps_) {
                    side[idx(w)] = Side::source;
                    stack.push_back(w);
                }
            }
        }
        return side;
    }

private:
    static std::size_t idx(NodeId v) { return static_cast<std::size_t>(v); }
    static ArcId sister(ArcId a) { return a ^ 1; }
    double& res(ArcId a) { return residual_[static_cast<std::size_t>(a)]; }
    NodeId head(ArcId a) const { return head_[static_cast<std::size_t>(a)]; }
    NodeId tail(ArcId a) const { return head_[static_cast<std::size_t>(sister(a))]; }

    void make_active(NodeId v)
    {
        if (!active_flag_[idx(v)]) {
            active_flag_[idx(v)] = 1;
            active_.push_back(v);
        }
    }

    NodeId next_active()
    {
        while (!active_.empty()) {
            const NodeId v = active_.front();
            active_.pop_front();
            active_flag_[idx(v)] = 0;
            if (tree_[idx(v)] != Tree::free) {
                return v;
            }
        }
        return -1;
    }

    // Expands the tree of v by one layer. Returns the arc (source-tree node
    // -> sink-tree node) that connects both trees, or -1.
    ArcId grow(NodeId v)
    {
        const Tree t = tree_[idx(v)];
        for (auto i = first_arc_[idx(v)]; i < first_arc_[idx(v) + 1]; ++i) {
            const ArcId a = adjacency_[static_cast<std::size_t>(i)];
            // Source tree grows along residual v->w, sink tree along residual w->v.
            const ArcId usable = t == Tree::source ? a : sister(a);
            if (res(usable) <= eps_) {
                continue;
            }
            const NodeId w = head(a);
            const Tree tw = tree_[idx(w)];
            if (tw == Tree::free) {
                tree_[idx(w)] = t;
                parent_[idx(w)] = sister(a);
                dist_[idx(w)] = dist_[idx(v)] + 1;
                stamp_[idx(w)] = stamp_[idx(v)];
                make_active(w);
            } else if (tw != t) {
                return t == Tree::source ? a : sister(a);
            } else if (stamp_[idx(w)] <= stamp_[idx(v)] && dist_[idx(w)] > dist_[idx(v)]) {
                parent_[idx(w)] = sister(a);
                stamp_[idx(w)] = stamp_[idx(v)];
                dist_[idx(w)] = dist_[idx(v)] + 1;
            }
        }
        return -1;
    }

    // parent_[v] is always stored as the arc leaving v towards its parent.
    // Along a source-tree path flow travels parent -> v, i.e. on sister(parent_[v]);
    // along a sink-tree path flow travels v -> parent, i.e. on parent_[v].
    double augment(ArcId bridge)
    {
        double bottleneck = res(bridge);
        for (NodeId v = tail(bridge); parent_[idx(v)] != kTerminal; v = head(parent_[idx(v)])) {
            bottleneck = std::min(bottleneck, res(sister(parent_[idx(v)])));
        }
        for (NodeId v = head(bridge); parent_[idx(v)] != kTerminal; v = head(parent_[idx(v)])) {
            bottleneck = std::min(bottleneck, res(parent_[idx(v)]));
        }

        res(bridge) -= bottleneck;
        res(sister(bridge)) += bottleneck;

        for (NodeId v = tail(bridge); parent_[idx(v)] != kTerminal;) {
            const ArcId up = parent_[idx(v)];
            const NodeId p = head(up);
            res(sister(up)) -= bottleneck;
            res(up) += bottleneck;
            if (res(sister(up)) <= eps_) {
                parent_[idx(v)] = kNoParent;
                orphans_.push_back(v);
            }
            v = p;
        }
        for (NodeId v = head(bridge); parent_[idx(v)] != kTerminal;) {
            const ArcId up = parent_[idx(v)];
            const NodeId p = head(up);
            res(up) -= bottleneck;
            res(sister(up)) += bottleneck;
            if (res(up) <= eps_) {
                parent_[idx(v)] = kNoParent;
                orphans_.push_back(v);
            }
            v = p;
        }
        return bottleneck;
    }

    // Distance from v to its terminal root, or -1 when the chain reaches an orphan.
    int root_distance(NodeId v)
    {
        int d = 0;
        NodeId u = v;
        for (;;) {
            if (stamp_[idx(u)] == time_) {
                d += dist_[idx(u)];
                break;
            }
            const ArcId up = parent_[idx(u)];
            if (up == kTerminal) {
                stamp_[idx(u)] = time_;
                dist_[idx(u)] = 0;
                break;
            }
            if (up == kNoParent) {
                return -1;
            }
            ++d;
            u = head(up);
        }
        // Cache distances along the validated chain.
        int k = d;
        for (u = v; stamp_[idx(u)] != time_; u = head(parent_[idx(u)])) {
            stamp_[idx(u)] = time_;
            dist_[idx(u)] = k--;
        }
        return d;
    }

    void adopt_orphans()
    {
        while (!orphans_.empty()) {
            const NodeId v = orphans_.front();
            orphans_.pop_front();
            const Tree t = tree_[idx(v)];

            ArcId best = kNoParent;
            int best_dist = std::numeric_limits<int>::max();
            for (auto i = first_arc_[idx(v)]; i < first_arc_[idx(v) + 1]; ++i) {
                const ArcId a = adjacency_[static_cast<std::size_t>(i)];
                const NodeId w = head(a);
                if (tree_[idx(w)] != t) {
                    continue;
                }
                const ArcId usable = t == Tree::source ? sister(a) : a;
                if (res(usable) <= eps_) {
                    continue;
                }
                const int d = root_distance(w);
                if (d >= 0 && d < best_dist) {
                    best_dist = d;
                    best = a;
                }
            }

            if (best != kNoParent) {
                parent_[idx(v)] = best;
                stamp_[idx(v)] = time_;
                dist_[idx(v)] = best_dist + 1;
                continue;
            }

            tree_[idx(v)] = Tree::free;
            for (auto i = first_arc_[idx(v)]; i < first_arc_[idx(v) + 1]; ++i) {
                const ArcId a = adjacency_[static_cast<std::size_t>(i)];
                const NodeId w = head(a);
                if (tree_[idx(w)] != t) {
                    continue;
                }
                const ArcId usable = t == Tree::source ? sister(a) : a;
                if (res(usable) > eps_) {
                    make_active(w);
                }
                const ArcId wp = parent_[idx(w)];
                if (wp >= 0 && head(wp) == v) {
                    parent_[idx(w)] = kNoParent;
                    orphans_.push_back(w);
                }
            }
        }
    }

    std::size_t n_;
    NodeId source_;
    NodeId sink_;
    double sentinel_ = 1.0;
    double eps_ = 0.0;

    std::vector<NodeId> head_;
    std::vector<double> residual_;
    std::vector<std::int32_t> first_arc_;
    std::vector<ArcId> adjacency_;

    std::vector<Tree> tree_;
    std::vector<ArcId> parent_;
    std::vector<int> dist_;
    std::vector<long> stamp_;
    std::vector<std::uint8_t> active_flag_;
    std::deque<NodeId> active_;
    std::deque<NodeId> orphans_;
    long time_ = 0;
};

} // namespace

CutResult min_st_cut(const FlowGraph& graph)
{
    TreeSolver solver(graph);
    CutResult result;
    result.flow_value = solver.solve();
    result.side = solver.source_reachable();
    return result;
}

double cut_capacity(const FlowGraph& graph, const std::vector<Side>& side)
{
    double total = 0.0;
    for (const auto& e : graph.edges()) {
        if (side[static_cast<std::size_t>(e.from)] == Side::source &&
            side[static_cast<std::size_t>(e.to)] == Side::sink) {
            if (e.infinite()) {
                return kInfinite;
            }
            total += e.capacity;
        }
    }
    return total;
}

} // namespace uscut::graph
