#ifndef YAK_DOT_HPP
#define YAK_DOT_HPP

#include <sstream>
#include <string>

#include "yak/analysis.hpp"

namespace yak {

namespace detail {

inline std::string dot_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

}  // namespace detail

/// Graphviz dump. Node labels are kind plus source position; edge labels are
/// the channel name, followed by its inferred type when `types` is given.
inline std::string emit_dot(const TokenFlowGraph& g, const std::vector<ChannelType>* types = nullptr) {
    std::ostringstream os;
    os << "digraph \"" << detail::dot_escape(g.top) << "\" {\n";
    os << "  rankdir=LR;\n";
    os << "  node [shape=box];\n";
    for (const auto& n : g.nodes) {
        std::string label = node_kind_name(n.kind);
        if (!n.label.empty()) label += " " + n.label;
        label += "\\n" + std::to_string(n.pos.line) + ":" + std::to_string(n.pos.column);
        os << "  n" << n.id << " [label=\"" << detail::dot_escape(label) << "\"];\n";
    }
    for (const auto& e : g.edges) {
        if (!e.producer || !e.consumer) continue;
        std::string label = e.display_name();
        if (types && static_cast<std::size_t>(e.id) < types->size()) {
            label += " : {";
            bool first = true;
            for (const auto& [s, w] : (*types)[static_cast<std::size_t>(e.id)]) {
                label += (first ? "" : ", ") + s + ":" + std::to_string(w);
                first = false;
            }
            label += "}";
        }
        os << "  n" << e.producer->node << " -> n" << e.consumer->node << " [label=\"" << detail::dot_escape(label)
           << "\"";
        if (is_select_port(g.node(e.consumer->node), e.consumer->port)) os << ", style=dashed";
        os << "];\n";
    }
    os << "}\n";
    return os.str();
}

inline std::string emit_dot(const Analysis& a) { return emit_dot(a.graph, a.types.empty() ? nullptr : &a.types); }

}  // namespace yak

#endif  // YAK_DOT_HPP
