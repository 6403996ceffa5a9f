#include "uscut/flow_graph.hpp"

#include "uscut/error.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace uscut::graph {

FlowGraph::FlowGraph(NodeId node_count, NodeId source, NodeId sink)
    : node_count_(node_count), source_(source), sink_(sink)
{
    if (node_count < 2) {
        throw InvalidArgument("flow graph needs at least the two terminals");
    }
    if (source < 0 || source >= node_count || sink < 0 || sink >= node_count) {
        throw InvalidArgument("terminal id out of range");
    }
    if (source == sink) {
        throw InvalidArgument("source and sink must differ");
    }
}

void FlowGraph::check_capacity(double capacity)
{
    if (std::isnan(capacity) || capacity < 0.0) {
        throw InvalidArgument("edge capacity must be non-negative");
    }
}

std::size_t FlowGraph::add_edge(NodeId from, NodeId to, double capacity)
{
    if (from < 0 || from >= node_count_ || to < 0 || to >= node_count_) {
        throw InvalidArgument("edge endpoint out of range");
    }
    check_capacity(capacity);
    edges_.push_back({from, to, capacity});
    return edges_.size() - 1;
}

void FlowGraph::set_capacity(std::size_t edge, double capacity)
{
    check_capacity(capacity);
    edges_.at(edge).capacity = capacity;
}

double FlowGraph::finite_capacity_sum() const noexcept
{
    double sum = 0.0;
    for (const auto& e : edges_) {
        if (!e.infinite()) {
            sum += e.capacity;
        }
    }
    return sum;
}

void FlowGraph::write_dump(std::ostream& out) const
{
    out << "n " << node_count_ << '\n' << "s " << source_ << '\n' << "t " << sink_ << '\n';
    char buf[64];
    for (const auto& e : edges_) {
        out << "e " << e.from << ' ' << e.to << ' ';
        if (e.infinite()) {
            out << "INF";
        } else {
            const auto res = std::to_chars(buf, buf + sizeof(buf), e.capacity);
            out.write(buf, res.ptr - buf);
        }
        out << '\n';
    }
}

std::string FlowGraph::dump() const
{
    std::ostringstream out;
    write_dump(out);
    return out.str();
}

FlowGraph FlowGraph::read_dump(std::istream& in)
{
    long n = -1;
    long s = -1;
    long t = -1;
    struct Pending {
        long from;
        long to;
        double cap;
    };
    std::vector<Pending> pending;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream fields(line);
        std::string tag;
        if (!(fields >> tag) || tag.front() == '#') {
            continue;
        }
        auto fail = [&] { throw IoError("malformed graph dump at line " + std::to_string(line_no)); };
        if (tag == "n") {
            if (!(fields >> n)) fail();
        } else if (tag == "s") {
            if (!(fields >> s)) fail();
        } else if (tag == "t") {
            if (!(fields >> t)) fail();
        } else if (tag == "e") {
            Pending p{};
            std::string cap;
            if (!(fields >> p.from >> p.to >> cap)) fail();
            if (cap == "INF") {
                p.cap = kInfinite;
            } else {
                const auto res = std::from_chars(cap.data(), cap.data() + cap.size(), p.cap);
                if (res.ec != std::errc{} || res.ptr != cap.data() + cap.size()) fail();
            }
            pending.push_back(p);
        } else {
            fail();
        }
    }
    if (n < 0 || s < 0 || t < 0) {
        throw IoError("graph dump is missing an n/s/t header line");
    }
    FlowGraph g(static_cast<NodeId>(n), static_cast<NodeId>(s), static_cast<NodeId>(t));
    for (const auto& p : pending) {
        g.add_edge(static_cast<NodeId>(p.from), static_cast<NodeId>(p.to), p.cap);
    }
    return g;
}

} // namespace uscut::graph
