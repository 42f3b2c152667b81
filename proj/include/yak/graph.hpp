#ifndef YAK_GRAPH_HPP
#define YAK_GRAPH_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "yak/ast.hpp"

namespace yak {

using NodeId = int;
using EdgeId = int;

inline constexpr int kNone = -1;

enum class NodeKind {
    Join,
    Fork,
    Merge,
    Mux,
    Demux,
    Arbit,
    Reg,
    Comb,
    Input,
    Output,
    Source,
    Sink,
    Blackbox,
    /// Unexpanded user component; removed by inline_components.
    Instance,
    /// Only ever created inside the analysis ring-breaking view.
    VirtualMerge,
};

inline const char* node_kind_name(NodeKind k) {
    switch (k) {
        case NodeKind::Join: return "join";
        case NodeKind::Fork: return "fork";
        case NodeKind::Merge: return "merge";
        case NodeKind::Mux: return "mux";
        case NodeKind::Demux: return "demux";
        case NodeKind::Arbit: return "arbit";
        case NodeKind::Reg: return "reg";
        case NodeKind::Comb: return "comb";
        case NodeKind::Input: return "input";
        case NodeKind::Output: return "output";
        case NodeKind::Source: return "source";
        case NodeKind::Sink: return "sink";
        case NodeKind::Blackbox: return "blackbox";
        case NodeKind::Instance: return "instance";
        case NodeKind::VirtualMerge: return "virtual_merge";
    }
    return "?";
}

struct PortRef {
    NodeId node = kNone;
    int port = 0;

    friend bool operator==(const PortRef&, const PortRef&) = default;
};

/// Input port layout: Mux = [data0, data1, select], Demux = [data, select];
/// every other kind has only linear ports.
struct Node {
    NodeId id = kNone;
    NodeKind kind = NodeKind::Join;
    /// Unique, Verilog-safe instance name such as `reg_4` or `gcd0__join_2`.
    std::string name;
    /// Inlining path prefix (`inst__`), empty at top level.
    std::string path;
    SourcePos pos;
    std::vector<EdgeId> inputs;
    std::vector<EdgeId> outputs;

    /// Input/Output/Source/Sink signal lists and Reg init values.
    std::vector<SignalSpec> signals;
    bool universal_sink = false;
    /// Input/Output port name, Blackbox module name, Instance component name.
    std::string label;
    std::vector<CombStatement> comb;
    std::vector<ChannelDecl> bb_inputs;
    std::vector<ChannelDecl> bb_outputs;

    bool has_init() const { return kind == NodeKind::Reg && !signals.empty(); }
};

inline std::optional<int> select_port(const Node& n) {
    if (n.kind == NodeKind::Mux) return 2;
    if (n.kind == NodeKind::Demux) return 1;
    return std::nullopt;
}

inline bool is_select_port(const Node& n, int port) {
    auto s = select_port(n);
    return s && *s == port;
}

/// Number of data (non-select) input ports.
inline int data_input_count(const Node& n) {
    return static_cast<int>(n.inputs.size()) - (select_port(n) ? 1 : 0);
}

inline bool is_stage(const Node& n) { return n.kind == NodeKind::Reg; }

inline bool is_merge_like(NodeKind k) {
    return k == NodeKind::Merge || k == NodeKind::Mux || k == NodeKind::Arbit || k == NodeKind::VirtualMerge;
}

struct Edge {
    EdgeId id = kNone;
    std::optional<std::string> name;
    /// Additional names aliased onto this edge by `chan a -> chan b`.
    std::vector<std::string> aliases;
    std::optional<PortRef> producer;
    std::optional<PortRef> consumer;
    std::optional<ChannelTypeSpec> declared_type;
    SourcePos pos;

    std::string display_name() const { return name ? *name : "_e" + std::to_string(id); }
};

/// Flat token flow graph. Node and edge ids equal their vector index once
/// elaboration has compacted the graph.
struct TokenFlowGraph {
    std::string top;
    std::vector<Node> nodes;
    std::vector<Edge> edges;

    const Node& node(NodeId id) const { return nodes.at(static_cast<std::size_t>(id)); }
    Node& node(NodeId id) { return nodes.at(static_cast<std::size_t>(id)); }
    const Edge& edge(EdgeId id) const { return edges.at(static_cast<std::size_t>(id)); }
    Edge& edge(EdgeId id) { return edges.at(static_cast<std::size_t>(id)); }

    std::size_t count(NodeKind k) const {
        std::size_t n = 0;
        for (const auto& nd : nodes)
            if (nd.kind == k) ++n;
        return n;
    }

    std::optional<EdgeId> find_edge(const std::string& name) const {
        for (const auto& e : edges) {
            if (e.name && *e.name == name) return e.id;
            for (const auto& a : e.aliases)
                if (a == name) return e.id;
        }
        return std::nullopt;
    }

    std::map<NodeKind, std::size_t> census() const {
        std::map<NodeKind, std::size_t> out;
        for (const auto& n : nodes) ++out[n.kind];
        return out;
    }
};

}  // namespace yak

#endif  // YAK_GRAPH_HPP
