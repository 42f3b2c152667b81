#ifndef YAK_ELABORATE_HPP
#define YAK_ELABORATE_HPP

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "yak/ast.hpp"
#include "yak/diagnostic.hpp"
#include "yak/graph.hpp"
#include "yak/printer.hpp"

namespace yak {

/// One component body elaborated in isolation. Formal channels are ordinary
/// edges whose outside endpoint is still missing; Instance nodes stand in for
/// user components until inline_components splices them.
struct BodyGraph {
    TokenFlowGraph graph;
    std::vector<EdgeId> formal_inputs;
    std::vector<EdgeId> formal_side;
    std::vector<EdgeId> formal_outputs;
    /// Per side formal: true when the body consumes it (the instance reads it).
    std::vector<bool> side_is_input;
};

namespace detail {

struct Net {
    int parent = 0;
    std::optional<std::string> name;
    std::vector<std::string> aliases;
    std::optional<ChannelTypeSpec> type;
    SourcePos pos;
    std::vector<PortRef> producers;
    std::vector<PortRef> consumers;
};

struct Iface {
    std::vector<int> ins;
    std::vector<int> outs;
};

using BodyLookup = std::function<const BodyGraph&(const std::string&)>;

class BodyElaborator {
public:
    BodyElaborator(const AstProgram& prog, const ComponentDef& def, BodyLookup lookup)
        : prog_(prog), def_(def), lookup_(std::move(lookup)) {}

    BodyGraph run() {
        out_.graph.top = def_.name;
        for (const auto& d : def_.inputs) out_.formal_inputs.push_back(declare(d));
        for (const auto& d : def_.side) out_.formal_side.push_back(declare(d));
        for (const auto& d : def_.outputs) out_.formal_outputs.push_back(declare(d));
        if (def_.body) {
            for (const auto& st : *def_.body) collect_decls(st);
            for (const auto& st : *def_.body) chain(st);
        }
        finalize();
        return std::move(out_);
    }

private:
    // --- nets -------------------------------------------------------------
    int new_net() {
        Net n;
        n.parent = static_cast<int>(nets_.size());
        nets_.push_back(std::move(n));
        return nets_.back().parent;
    }

    int find(int x) {
        while (nets_[x].parent != x) {
            nets_[x].parent = nets_[nets_[x].parent].parent;
            x = nets_[x].parent;
        }
        return x;
    }

    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (b < a) std::swap(a, b);
        Net& keep = nets_[a];
        Net& drop = nets_[b];
        drop.parent = a;
        if (drop.name) {
            if (keep.name) keep.aliases.push_back(*drop.name);
            else keep.name = drop.name;
        }
        for (auto& al : drop.aliases) keep.aliases.push_back(al);
        if (drop.type) {
            if (!keep.type) keep.type = drop.type;
            else
                for (auto& s : drop.type->signals) keep.type->signals.push_back(s);
        }
        if (!keep.pos.valid()) keep.pos = drop.pos;
        for (auto& p : drop.producers) keep.producers.push_back(p);
        for (auto& p : drop.consumers) keep.consumers.push_back(p);
        drop.producers.clear();
        drop.consumers.clear();
    }

    int declare(const ChannelDecl& d) {
        if (scope_.count(d.name))
            throw CompileError(Diagnostic::error("E_REDECLARED", "channel '" + d.name + "' declared twice", d.pos));
        int n = new_net();
        nets_[n].name = d.name;
        nets_[n].type = d.type;
        nets_[n].pos = d.pos;
        scope_[d.name] = n;
        return n;
    }

    int lookup_channel(const std::string& name, SourcePos pos) {
        auto it = scope_.find(name);
        if (it == scope_.end())
            throw CompileError(Diagnostic::error("E_UNKNOWN_CHANNEL", "unknown channel '" + name + "'", pos));
        return it->second;
    }

    int side_net(const SideArg& a) {
        return lookup_channel(side_arg_name(a), side_arg_pos(a));
    }

    // --- pass 1: declarations ---------------------------------------------
    void collect_decls(const FlowExpr& e) {
        for (const auto& t : e.terms) {
            std::visit(overloaded{
                           [&](const ChannelDecl& d) { declare(d); },
                           [&](const Aggregate& a) {
                               for (const auto& el : a.elements) collect_decls(el);
                           },
                           [&](const BuiltinInst& b) {
                               for (const auto& s : b.side)
                                   if (auto* d = std::get_if<ChannelDecl>(&s)) declare(*d);
                           },
                           [&](const ComponentInst& c) {
                               for (const auto& s : c.side)
                                   if (auto* d = std::get_if<ChannelDecl>(&s)) declare(*d);
                           },
                           [&](const BlackboxRef& b) {
                               for (const auto& d : b.inputs) declare(d);
                               for (const auto& d : b.outputs) declare(d);
                           },
                           [](const auto&) {},
                       },
                       t);
        }
    }

    // --- pass 2: flow chains ----------------------------------------------
    NodeId add_node(NodeKind kind, SourcePos pos, int n_in, int n_out) {
        Node n;
        n.id = static_cast<NodeId>(out_.graph.nodes.size());
        n.kind = kind;
        n.pos = pos;
        n.inputs.assign(static_cast<std::size_t>(n_in), kNone);
        n.outputs.assign(static_cast<std::size_t>(n_out), kNone);
        out_.graph.nodes.push_back(std::move(n));
        in_nets_.emplace_back();
        out_nets_.emplace_back();
        for (int i = 0; i < n_in; ++i) {
            int net = new_net();
            nets_[net].consumers.push_back({out_.graph.nodes.back().id, i});
            in_nets_.back().push_back(net);
        }
        for (int i = 0; i < n_out; ++i) {
            int net = new_net();
            nets_[net].producers.push_back({out_.graph.nodes.back().id, i});
            out_nets_.back().push_back(net);
        }
        return out_.graph.nodes.back().id;
    }

    Node& node(NodeId id) { return out_.graph.nodes[static_cast<std::size_t>(id)]; }
    int in_net(NodeId id, int port) { return in_nets_[static_cast<std::size_t>(id)][static_cast<std::size_t>(port)]; }
    int out_net(NodeId id, int port) {
        return out_nets_[static_cast<std::size_t>(id)][static_cast<std::size_t>(port)];
    }

    std::size_t static_in_count(const FlowTerm& t) const {
        return std::visit(overloaded{
                              [](const ChannelDecl&) -> std::size_t { return 1; },
                              [](const ChannelRef&) -> std::size_t { return 1; },
                              [&](const Aggregate& a) -> std::size_t {
                                  std::size_t n = 0;
                                  for (const auto& el : a.elements) n += static_in_count(el.terms.front());
                                  return n;
                              },
                              [](const BuiltinInst& b) -> std::size_t {
                                  switch (b.kind) {
                                      case Builtin::Fork:
                                      case Builtin::Demux: return 1;
                                      default: return 2;
                                  }
                              },
                              [&](const ComponentInst& c) -> std::size_t {
                                  const ComponentDef* d = prog_.find(c.name);
                                  return d ? d->inputs.size() : 1;
                              },
                              [](const InputDecl&) -> std::size_t { return 0; },
                              [](const SourceDecl&) -> std::size_t { return 0; },
                              [](const BlackboxRef& b) -> std::size_t { return b.inputs.size(); },
                              [](const auto&) -> std::size_t { return 1; },
                          },
                          t);
    }

    [[noreturn]] static void arity_error(SourcePos pos, const std::string& what, std::size_t expected,
                                         std::size_t found) {
        throw CompileError(Diagnostic::error("E_ARITY_MISMATCH",
                                             what + " expects " + std::to_string(expected) + " channel(s), found " +
                                                 std::to_string(found),
                                             pos));
    }

    Iface chain(const FlowExpr& e) {
        Iface first;
        Iface prev;
        for (std::size_t i = 0; i < e.terms.size(); ++i) {
            std::optional<std::size_t> prev_out;
            if (i > 0) prev_out = prev.outs.size();
            std::optional<std::size_t> next_in;
            if (i + 1 < e.terms.size()) next_in = static_in_count(e.terms[i + 1]);
            Iface cur = term(e.terms[i], prev_out, next_in);
            if (i == 0) {
                first = cur;
            } else {
                if (prev.outs.size() != cur.ins.size())
                    arity_error(term_pos(e.terms[i]), "flow term", cur.ins.size(), prev.outs.size());
                for (std::size_t k = 0; k < cur.ins.size(); ++k) unite(prev.outs[k], cur.ins[k]);
            }
            prev = std::move(cur);
        }
        return Iface{first.ins, prev.outs};
    }

    Iface simple(NodeKind kind, SourcePos pos, int n_in, int n_out) {
        NodeId id = add_node(kind, pos, n_in, n_out);
        Iface f;
        for (int i = 0; i < n_in; ++i) f.ins.push_back(in_net(id, i));
        for (int i = 0; i < n_out; ++i) f.outs.push_back(out_net(id, i));
        return f;
    }

    // Left-leaning tree of 2-input nodes: ((x0 x1) x2) x3 ...
    Iface reduce_tree(NodeKind kind, SourcePos pos, std::size_t arity) {
        Iface f;
        NodeId prev = add_node(kind, pos, 2, 1);
        f.ins.push_back(in_net(prev, 0));
        f.ins.push_back(in_net(prev, 1));
        for (std::size_t k = 2; k < arity; ++k) {
            NodeId nxt = add_node(kind, pos, 2, 1);
            unite(out_net(prev, 0), in_net(nxt, 0));
            f.ins.push_back(in_net(nxt, 1));
            prev = nxt;
        }
        f.outs.push_back(out_net(prev, 0));
        return f;
    }

    // Mirror image for forks: the deepest fork yields outputs 0 and 1.
    Iface fork_tree(SourcePos pos, std::size_t arity) {
        Iface f;
        std::vector<NodeId> forks;
        forks.push_back(add_node(NodeKind::Fork, pos, 1, 2));
        f.ins.push_back(in_net(forks[0], 0));
        for (std::size_t k = 2; k < arity; ++k) {
            NodeId nxt = add_node(NodeKind::Fork, pos, 1, 2);
            unite(out_net(forks.back(), 0), in_net(nxt, 0));
            forks.push_back(nxt);
        }
        f.outs.push_back(out_net(forks.back(), 0));
        for (auto it = forks.rbegin(); it != forks.rend(); ++it) f.outs.push_back(out_net(*it, 1));
        return f;
    }

    Iface term(const FlowTerm& t, std::optional<std::size_t> prev_out, std::optional<std::size_t> next_in) {
        return std::visit(
            overloaded{
                [&](const ChannelDecl& d) {
                    int n = scope_.at(d.name);
                    return Iface{{n}, {n}};
                },
                [&](const ChannelRef& r) {
                    int n = lookup_channel(r.name, r.pos);
                    return Iface{{n}, {n}};
                },
                [&](const Aggregate& a) {
                    Iface f;
                    for (const auto& el : a.elements) {
                        Iface sub = chain(el);
                        f.ins.insert(f.ins.end(), sub.ins.begin(), sub.ins.end());
                        f.outs.insert(f.outs.end(), sub.outs.begin(), sub.outs.end());
                    }
                    return f;
                },
                [&](const BuiltinInst& b) {
                    switch (b.kind) {
                        case Builtin::Join:
                        case Builtin::Merge:
                        case Builtin::Arbit: {
                            NodeKind k = b.kind == Builtin::Join    ? NodeKind::Join
                                         : b.kind == Builtin::Merge ? NodeKind::Merge
                                                                    : NodeKind::Arbit;
                            std::size_t arity = prev_out.value_or(2);
                            if (arity < 2) arity_error(b.pos, builtin_name(b.kind), 2, arity);
                            return reduce_tree(k, b.pos, arity);
                        }
                        case Builtin::Fork: {
                            std::size_t arity = next_in.value_or(2);
                            if (arity < 2) arity_error(b.pos, "fork output", 2, arity);
                            return fork_tree(b.pos, arity);
                        }
                        case Builtin::Mux: {
                            NodeId id = add_node(NodeKind::Mux, b.pos, 3, 1);
                            unite(in_net(id, 2), side_net(b.side[0]));
                            return Iface{{in_net(id, 0), in_net(id, 1)}, {out_net(id, 0)}};
                        }
                        case Builtin::Demux: {
                            NodeId id = add_node(NodeKind::Demux, b.pos, 2, 2);
                            unite(in_net(id, 1), side_net(b.side[0]));
                            return Iface{{in_net(id, 0)}, {out_net(id, 0), out_net(id, 1)}};
                        }
                    }
                    return Iface{};
                },
                [&](const ComponentInst& c) { return instance(c); },
                [&](const CombBlock& c) {
                    Iface f = simple(NodeKind::Comb, c.pos, 1, 1);
                    node(static_cast<NodeId>(out_.graph.nodes.size() - 1)).comb = c.statements;
                    return f;
                },
                [&](const InputDecl& d) {
                    Iface f = simple(NodeKind::Input, d.pos, 0, 1);
                    Node& n = out_.graph.nodes.back();
                    n.label = d.port;
                    n.signals = d.signals;
                    return f;
                },
                [&](const OutputDecl& d) {
                    Iface f = simple(NodeKind::Output, d.pos, 1, 0);
                    Node& n = out_.graph.nodes.back();
                    n.label = d.port;
                    n.signals = d.signals;
                    return f;
                },
                [&](const SourceDecl& d) {
                    Iface f = simple(NodeKind::Source, d.pos, 0, 1);
                    out_.graph.nodes.back().signals = d.signals;
                    return f;
                },
                [&](const SinkDecl& d) {
                    Iface f = simple(NodeKind::Sink, d.pos, 1, 0);
                    Node& n = out_.graph.nodes.back();
                    n.universal_sink = !d.signals.has_value();
                    if (d.signals) n.signals = *d.signals;
                    return f;
                },
                [&](const RegDecl& d) {
                    Iface f = simple(NodeKind::Reg, d.pos, 1, 1);
                    out_.graph.nodes.back().signals = d.init;
                    return f;
                },
                [&](const BlackboxRef& b) {
                    NodeId id = add_node(NodeKind::Blackbox, b.pos, static_cast<int>(b.inputs.size()),
                                         static_cast<int>(b.outputs.size()));
                    Node& n = node(id);
                    n.label = b.module;
                    n.bb_inputs = b.inputs;
                    n.bb_outputs = b.outputs;
                    Iface f;
                    for (std::size_t i = 0; i < b.inputs.size(); ++i) {
                        int net = scope_.at(b.inputs[i].name);
                        unite(in_net(id, static_cast<int>(i)), net);
                        f.ins.push_back(net);
                    }
                    for (std::size_t i = 0; i < b.outputs.size(); ++i) {
                        int net = scope_.at(b.outputs[i].name);
                        unite(out_net(id, static_cast<int>(i)), net);
                        f.outs.push_back(net);
                    }
                    return f;
                },
            },
            t);
    }

    Iface instance(const ComponentInst& c) {
        const ComponentDef* def = prog_.find(c.name);
        if (!def)
            throw CompileError(Diagnostic::error("E_UNKNOWN_COMPONENT", "unknown component '" + c.name + "'", c.pos));
        if (!def->body)
            throw CompileError(Diagnostic::error("E_UNKNOWN_COMPONENT",
                                                 "component '" + c.name + "' is only a prototype and has no body",
                                                 c.pos));
        if (c.side.size() != def->side.size())
            arity_error(c.pos, "side channels of '" + c.name + "'", def->side.size(), c.side.size());
        const BodyGraph& callee = lookup_(c.name);
        int n_in = static_cast<int>(def->inputs.size());
        int n_out = static_cast<int>(def->outputs.size());
        int side_in = 0;
        int side_out = 0;
        for (bool is_in : callee.side_is_input) (is_in ? side_in : side_out)++;
        NodeId id = add_node(NodeKind::Instance, c.pos, n_in + side_in, n_out + side_out);
        node(id).label = c.name;
        int si = n_in;
        int so = n_out;
        for (std::size_t k = 0; k < c.side.size(); ++k) {
            int actual = side_net(c.side[k]);
            if (callee.side_is_input[k]) unite(in_net(id, si++), actual);
            else
                unite(out_net(id, so++), actual);
        }
        Iface f;
        for (int i = 0; i < n_in; ++i) f.ins.push_back(in_net(id, i));
        for (int i = 0; i < n_out; ++i) f.outs.push_back(out_net(id, i));
        return f;
    }

    // --- edges --------------------------------------------------------------
    void finalize() {
        Diagnostics errs;
        std::map<int, EdgeId> edge_of_root;
        for (int i = 0; i < static_cast<int>(nets_.size()); ++i) {
            int r = find(i);
            if (edge_of_root.count(r)) continue;
            const Net& n = nets_[r];
            Edge e;
            e.id = static_cast<EdgeId>(out_.graph.edges.size());
            e.name = n.name;
            e.aliases = n.aliases;
            e.declared_type = n.type;
            e.pos = n.pos;
            std::string label = n.name ? "channel '" + *n.name + "'" : "implicit channel";
            if (n.producers.size() > 1) {
                auto d = Diagnostic::error("E_MULTIPLE_PRODUCERS", label + " has multiple producers",
                                           n.pos.valid() ? n.pos : node(n.producers[1].node).pos);
                for (auto& p : n.producers) d.nodes.push_back(p.node);
                errs.push_back(std::move(d));
            }
            if (n.consumers.size() > 1) {
                auto d = Diagnostic::error("E_MULTIPLE_CONSUMERS",
                                           label + " has multiple consumers (fan-out needs an explicit fork)",
                                           n.pos.valid() ? n.pos : node(n.consumers[1].node).pos);
                for (auto& p : n.consumers) d.nodes.push_back(p.node);
                errs.push_back(std::move(d));
            }
            if (!n.producers.empty()) e.producer = n.producers.front();
            if (!n.consumers.empty()) e.consumer = n.consumers.front();
            if (!e.pos.valid()) {
                if (e.producer) e.pos = node(e.producer->node).pos;
                else if (e.consumer)
                    e.pos = node(e.consumer->node).pos;
            }
            edge_of_root[r] = e.id;
            out_.graph.edges.push_back(std::move(e));
        }
        if (!errs.empty()) throw CompileError(std::move(errs));
        for (auto& e : out_.graph.edges) {
            if (e.producer) node(e.producer->node).outputs[static_cast<std::size_t>(e.producer->port)] = e.id;
            if (e.consumer) node(e.consumer->node).inputs[static_cast<std::size_t>(e.consumer->port)] = e.id;
        }
        auto map_formal = [&](std::vector<EdgeId>& v) {
            for (auto& x : v) x = edge_of_root.at(find(x));
        };
        map_formal(out_.formal_inputs);
        map_formal(out_.formal_side);
        map_formal(out_.formal_outputs);
        for (EdgeId e : out_.formal_side) out_.side_is_input.push_back(!out_.graph.edge(e).producer.has_value());
    }

    const AstProgram& prog_;
    const ComponentDef& def_;
    BodyLookup lookup_;
    BodyGraph out_;
    std::vector<Net> nets_;
    std::map<std::string, int> scope_;
    std::vector<std::vector<int>> in_nets_;
    std::vector<std::vector<int>> out_nets_;
};

// Component instantiation must form a DAG.
inline void check_component_recursion(const AstProgram& prog) {
    std::map<std::string, std::vector<std::pair<std::string, SourcePos>>> calls;
    std::function<void(const FlowExpr&, std::vector<std::pair<std::string, SourcePos>>&)> walk =
        [&](const FlowExpr& e, std::vector<std::pair<std::string, SourcePos>>& out) {
            for (const auto& t : e.terms) {
                if (auto* c = std::get_if<ComponentInst>(&t)) out.emplace_back(c->name, c->pos);
                if (auto* a = std::get_if<Aggregate>(&t))
                    for (const auto& el : a->elements) walk(el, out);
            }
        };
    for (const auto& c : prog.components) {
        auto& v = calls[c.name];
        if (c.body)
            for (const auto& st : *c.body) walk(st, v);
    }
    enum class Mark { None, Active, Done };
    std::map<std::string, Mark> mark;
    std::vector<std::string> stack;
    std::function<void(const std::string&)> visit = [&](const std::string& name) {
        mark[name] = Mark::Active;
        stack.push_back(name);
        for (const auto& [callee, pos] : calls[name]) {
            if (!prog.find(callee)) continue;  // reported during elaboration
            if (mark[callee] == Mark::Active) {
                auto it = std::find(stack.begin(), stack.end(), callee);
                std::string cycle;
                for (; it != stack.end(); ++it) cycle += *it + " -> ";
                cycle += callee;
                throw CompileError(Diagnostic::error("E_RECURSIVE_COMPONENT", "recursive component: " + cycle, pos));
            }
            if (mark[callee] == Mark::None) visit(callee);
        }
        stack.pop_back();
        mark[name] = Mark::Done;
    };
    for (const auto& c : prog.components)
        if (mark[c.name] == Mark::None) visit(c.name);
}

/// Memoizing body elaborator shared by elaborate and inline_components.
class ElabContext {
public:
    explicit ElabContext(const AstProgram& prog) : prog_(prog) { check_component_recursion(prog); }

    const BodyGraph& body(const std::string& name) {
        auto it = bodies_.find(name);
        if (it != bodies_.end()) return *it->second;
        const ComponentDef* def = prog_.find(name);
        if (!def) throw CompileError(Diagnostic::error("E_UNKNOWN_COMPONENT", "unknown component '" + name + "'"));
        BodyElaborator el(prog_, *def, [this](const std::string& n) -> const BodyGraph& { return body(n); });
        auto bg = std::make_unique<BodyGraph>(el.run());
        return *bodies_.emplace(name, std::move(bg)).first->second;
    }

private:
    const AstProgram& prog_;
    std::map<std::string, std::unique_ptr<BodyGraph>> bodies_;
};

inline void compact_and_name(TokenFlowGraph& g, const std::set<NodeId>& dead_nodes,
                             const std::set<EdgeId>& dead_edges) {
    std::vector<NodeId> node_map(g.nodes.size(), kNone);
    std::vector<EdgeId> edge_map(g.edges.size(), kNone);
    std::vector<Node> nodes;
    std::vector<Edge> edges;
    for (auto& n : g.nodes)
        if (!dead_nodes.count(n.id)) {
            node_map[static_cast<std::size_t>(n.id)] = static_cast<NodeId>(nodes.size());
            nodes.push_back(std::move(n));
        }
    for (auto& e : g.edges)
        if (!dead_edges.count(e.id)) {
            edge_map[static_cast<std::size_t>(e.id)] = static_cast<EdgeId>(edges.size());
            edges.push_back(std::move(e));
        }
    for (auto& n : nodes) {
        n.id = node_map[static_cast<std::size_t>(n.id)];
        for (auto& e : n.inputs)
            if (e != kNone) e = edge_map[static_cast<std::size_t>(e)];
        for (auto& e : n.outputs)
            if (e != kNone) e = edge_map[static_cast<std::size_t>(e)];
        n.name = n.path + node_kind_name(n.kind) + "_" + std::to_string(n.id);
    }
    int implicit = 0;
    for (auto& e : edges) {
        e.id = edge_map[static_cast<std::size_t>(e.id)];
        if (e.producer) e.producer->node = node_map[static_cast<std::size_t>(e.producer->node)];
        if (e.consumer) e.consumer->node = node_map[static_cast<std::size_t>(e.consumer->node)];
        if (!e.name || e.name->rfind("_ch", 0) == 0) e.name = "_ch" + std::to_string(implicit++);
    }
    g.nodes = std::move(nodes);
    g.edges = std::move(edges);
}

}  // namespace detail

/// Replaces every Instance node by a fresh copy of its component body,
/// splicing actual channels onto the body's formal channels. A graph with no
/// Instance nodes is returned unchanged.
inline TokenFlowGraph inline_components(TokenFlowGraph g, const AstProgram& prog) {
    bool any = false;
    for (const auto& n : g.nodes) any = any || n.kind == NodeKind::Instance;
    if (!any) return g;

    detail::ElabContext ctx(prog);
    std::set<NodeId> dead_nodes;
    std::set<EdgeId> dead_edges;
    std::map<std::string, int> instance_counter;

    auto set_producer = [&](EdgeId e, PortRef p) {
        Edge& ed = g.edge(e);
        if (ed.producer)
            throw CompileError(Diagnostic::error("E_MULTIPLE_PRODUCERS",
                                                 "channel '" + ed.display_name() + "' has multiple producers", ed.pos));
        ed.producer = p;
        g.node(p.node).outputs[static_cast<std::size_t>(p.port)] = e;
    };
    auto set_consumer = [&](EdgeId e, PortRef p) {
        Edge& ed = g.edge(e);
        if (ed.consumer)
            throw CompileError(Diagnostic::error("E_MULTIPLE_CONSUMERS",
                                                 "channel '" + ed.display_name() + "' has multiple consumers", ed.pos));
        ed.consumer = p;
        g.node(p.node).inputs[static_cast<std::size_t>(p.port)] = e;
    };

    for (std::size_t idx = 0; idx < g.nodes.size(); ++idx) {
        if (g.nodes[idx].kind != NodeKind::Instance || dead_nodes.count(static_cast<NodeId>(idx))) continue;
        const Node inst = g.nodes[idx];
        const BodyGraph& body = ctx.body(inst.label);
        std::string path = inst.path + inst.label + std::to_string(instance_counter[inst.path + inst.label]++) + "__";

        NodeId node_base = static_cast<NodeId>(g.nodes.size());
        EdgeId edge_base = static_cast<EdgeId>(g.edges.size());
        for (const auto& bn : body.graph.nodes) {
            Node n = bn;
            n.id = node_base + bn.id;
            n.path = path + bn.path;
            for (auto& e : n.inputs)
                if (e != kNone) e += edge_base;
            for (auto& e : n.outputs)
                if (e != kNone) e += edge_base;
            g.nodes.push_back(std::move(n));
        }
        for (const auto& be : body.graph.edges) {
            Edge e = be;
            e.id = edge_base + be.id;
            if (e.name && e.name->rfind("_ch", 0) != 0) e.name = path + *e.name;
            else
                e.name.reset();
            for (auto& a : e.aliases) a = path + a;
            if (e.producer) e.producer->node += node_base;
            if (e.consumer) e.consumer->node += node_base;
            g.edges.push_back(std::move(e));
        }

        // Detach the instance from its actual channels.
        for (EdgeId a : inst.inputs)
            if (a != kNone) g.edge(a).consumer.reset();
        for (EdgeId a : inst.outputs)
            if (a != kNone) g.edge(a).producer.reset();
        dead_nodes.insert(inst.id);

        std::map<EdgeId, EdgeId> rep;
        auto resolve = [&](EdgeId e) {
            while (rep.count(e)) e = rep[e];
            return e;
        };
        // Moves every endpoint and name of `drop` onto `keep`.
        auto merge = [&](EdgeId keep, EdgeId drop) {
            keep = resolve(keep);
            drop = resolve(drop);
            if (keep == drop) return;
            Edge d = g.edge(drop);
            dead_edges.insert(drop);
            rep[drop] = keep;
            if (d.producer) {
                g.edge(drop).producer.reset();
                set_producer(keep, *d.producer);
            }
            if (d.consumer) {
                g.edge(drop).consumer.reset();
                set_consumer(keep, *d.consumer);
            }
            Edge& k = g.edge(keep);
            if (d.name) {
                if (k.name) k.aliases.push_back(*d.name);
                else
                    k.name = d.name;
            }
            for (auto& al : d.aliases) k.aliases.push_back(al);
            if (d.declared_type && !k.declared_type) k.declared_type = d.declared_type;
        };

        std::size_t n_in = body.formal_inputs.size();
        std::size_t n_out = body.formal_outputs.size();
        for (std::size_t i = 0; i < n_in; ++i) merge(inst.inputs[i], body.formal_inputs[i] + edge_base);
        for (std::size_t i = 0; i < n_out; ++i) merge(inst.outputs[i], body.formal_outputs[i] + edge_base);
        std::size_t si = n_in;
        std::size_t so = n_out;
        for (std::size_t k = 0; k < body.formal_side.size(); ++k) {
            EdgeId actual = body.side_is_input[k] ? inst.inputs[si++] : inst.outputs[so++];
            merge(actual, body.formal_side[k] + edge_base);
        }
    }
    detail::compact_and_name(g, dead_nodes, dead_edges);
    return g;
}

/// Builds the flat token flow graph of component `top`.
inline TokenFlowGraph elaborate(const AstProgram& prog, const std::string& top = kImplicitTop) {
    const ComponentDef* def = prog.find(top);
    if (!def) throw CompileError(Diagnostic::error("E_NO_TOP", "top component '" + top + "' not found"));
    if (!def->body)
        throw CompileError(Diagnostic::error("E_NO_TOP", "top component '" + top + "' is a prototype", def->pos));
    detail::ElabContext ctx(prog);
    TokenFlowGraph g = ctx.body(top).graph;
    g = inline_components(std::move(g), prog);
    detail::compact_and_name(g, {}, {});
    return g;
}

/// Structural checks on an elaborated graph. Empty iff every node port has a
/// channel with exactly one producer and one consumer.
inline Diagnostics validate_graph(const TokenFlowGraph& g) {
    Diagnostics out;
    auto port_desc = [&](const PortRef& p, bool input) {
        const Node& n = g.node(p.node);
        if (input && is_select_port(n, p.port)) return n.name + " select";
        return n.name + (input ? " input " : " output ") + std::to_string(p.port);
    };
    for (const auto& e : g.edges) {
        bool user_named = e.name && e.name->rfind("_ch", 0) != 0;
        if (!e.producer && !e.consumer) {
            auto d = Diagnostic::error("E_CHANNEL_UNUSED", "channel '" + e.display_name() + "' is never connected",
                                       e.pos);
            d.channels.push_back(e.id);
            out.push_back(std::move(d));
            continue;
        }
        if (!e.producer) {
            const Node& c = g.node(e.consumer->node);
            Diagnostic d = (user_named && !is_select_port(c, e.consumer->port))
                               ? Diagnostic::error("E_CHANNEL_UNPRODUCED",
                                                   "channel '" + *e.name + "' has no producer", e.pos)
                               : Diagnostic::error("E_DANGLING_PORT",
                                                   "dangling port: " + port_desc(*e.consumer, true) +
                                                       (user_named ? " (channel '" + *e.name + "' has no producer)"
                                                                   : " is not driven"),
                                                   c.pos);
            d.nodes.push_back(c.id);
            d.channels.push_back(e.id);
            out.push_back(std::move(d));
        }
        if (!e.consumer) {
            const Node& p = g.node(e.producer->node);
            Diagnostic d = user_named ? Diagnostic::error("E_CHANNEL_UNCONSUMED",
                                                          "channel '" + *e.name + "' has no consumer", e.pos)
                                      : Diagnostic::error("E_DANGLING_PORT",
                                                          "dangling port: " + port_desc(*e.producer, false) +
                                                              " is not consumed",
                                                          p.pos);
            d.nodes.push_back(p.id);
            d.channels.push_back(e.id);
            out.push_back(std::move(d));
        }
    }
    for (const auto& n : g.nodes) {
        if (n.kind == NodeKind::Instance)
            out.push_back(Diagnostic::error("E_UNKNOWN_COMPONENT", "component instance '" + n.label + "' not inlined",
                                            n.pos));
        for (std::size_t i = 0; i < n.inputs.size(); ++i)
            if (n.inputs[i] == kNone)
                out.push_back(Diagnostic::error("E_DANGLING_PORT",
                                                "dangling port: " + port_desc({n.id, static_cast<int>(i)}, true),
                                                n.pos));
        for (std::size_t i = 0; i < n.outputs.size(); ++i)
            if (n.outputs[i] == kNone)
                out.push_back(Diagnostic::error("E_DANGLING_PORT",
                                                "dangling port: " + port_desc({n.id, static_cast<int>(i)}, false),
                                                n.pos));
    }
    return out;
}

}  // namespace yak

#endif  // YAK_ELABORATE_HPP
