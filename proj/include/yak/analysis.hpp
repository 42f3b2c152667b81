#ifndef YAK_ANALYSIS_HPP
#define YAK_ANALYSIS_HPP

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "yak/diagnostic.hpp"
#include "yak/elaborate.hpp"
#include "yak/expr.hpp"
#include "yak/graph.hpp"
#include "yak/scc.hpp"

namespace yak {

using SignalSet = std::set<std::string>;
/// Signal name to width, iterated name-sorted.
using ChannelType = std::map<std::string, unsigned>;

struct LiveSets {
    std::vector<SignalSet> provided;
    std::vector<SignalSet> needed;
    /// Signals actually carried: needed, once needed is known to be provided.
    std::vector<SignalSet> carry;
    /// For select channels of a Mux/Demux: the signal used as the select value.
    std::vector<std::optional<std::string>> select_signal;
};

struct RingBreakRecord {
    EdgeId broken_edge = kNone;
    /// External sibling input of the same node; kNone for a lenient break.
    EdgeId constraint_peer = kNone;
    NodeId node = kNone;
};

/// Acyclic view used for typing. Original node and edge ids are preserved;
/// every initialized Reg gets a VirtualMerge and a virtual Source in front of
/// it, appended after the original nodes. Broken edges stay in `graph.edges`
/// but are flagged and ignored by traversal.
struct DagView {
    TokenFlowGraph graph;
    std::vector<RingBreakRecord> breaks;
    std::vector<bool> broken;
    std::size_t original_nodes = 0;
    std::size_t original_edges = 0;
    /// View edge id → original edge whose carry set it shares.
    std::vector<EdgeId> carry_source;
    /// Reg node → its VirtualMerge node.
    std::map<NodeId, NodeId> virtual_merge_of;

    bool is_virtual_node(NodeId n) const { return static_cast<std::size_t>(n) >= original_nodes; }

    Adjacency adjacency() const {
        Adjacency adj(graph.nodes.size());
        for (const auto& e : graph.edges)
            if (!broken[static_cast<std::size_t>(e.id)] && e.producer && e.consumer)
                adj[static_cast<std::size_t>(e.producer->node)].push_back(e.consumer->node);
        return adj;
    }

    bool is_acyclic() const { return topological_order(adjacency()).size() == graph.nodes.size(); }

    /// The view as a plain graph: broken edges detached from their consumer
    /// and initialized Regs stripped (their token now comes from the virtual
    /// source through the VirtualMerge).
    TokenFlowGraph acyclic_graph() const {
        TokenFlowGraph g = graph;
        for (auto& e : g.edges) {
            if (!broken[static_cast<std::size_t>(e.id)] || !e.consumer) continue;
            g.node(e.consumer->node).inputs[static_cast<std::size_t>(e.consumer->port)] = kNone;
            e.consumer.reset();
        }
        for (auto& [reg, vm] : virtual_merge_of) g.node(reg).signals.clear();
        return g;
    }
};

namespace detail {

inline SignalSet names_of(const std::vector<SignalSpec>& sigs) {
    SignalSet s;
    for (const auto& x : sigs) s.insert(x.name);
    return s;
}

inline SignalSet names_of(const std::optional<ChannelTypeSpec>& t) {
    return t ? names_of(t->signals) : SignalSet{};
}

inline std::string join_names(const SignalSet& s) {
    std::string out;
    for (const auto& x : s) out += (out.empty() ? "" : ", ") + x;
    return "{" + out + "}";
}

inline SignalSet set_union(const SignalSet& a, const SignalSet& b) {
    SignalSet r = a;
    r.insert(b.begin(), b.end());
    return r;
}

inline SignalSet set_intersect(const SignalSet& a, const SignalSet& b) {
    SignalSet r;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(r, r.end()));
    return r;
}

inline SignalSet set_minus(const SignalSet& a, const SignalSet& b) {
    SignalSet r;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::inserter(r, r.end()));
    return r;
}

// Provided sets form a lattice with an extra Top ("anything") element so that
// the greatest fixpoint can be reached by descending iteration around rings.
struct PSet {
    bool top = true;
    SignalSet s;
    friend bool operator==(const PSet&, const PSet&) = default;
};

inline PSet p_union(const PSet& a, const PSet& b) {
    if (a.top || b.top) return PSet{};
    return PSet{false, set_union(a.s, b.s)};
}

inline PSet p_intersect(const PSet& a, const PSet& b) {
    if (a.top) return b;
    if (b.top) return a;
    return PSet{false, set_intersect(a.s, b.s)};
}

inline PSet p_fixed(SignalSet s) { return PSet{false, std::move(s)}; }

inline std::vector<PSet> provided_fixpoint(const TokenFlowGraph& g) {
    std::vector<PSet> p(g.edges.size());
    auto in = [&](const Node& n, int k) -> PSet {
        EdgeId e = n.inputs[static_cast<std::size_t>(k)];
        return e == kNone ? p_fixed({}) : p[static_cast<std::size_t>(e)];
    };
    auto iterate = [&] {
        bool changed = true;
        while (changed) {
            changed = false;
            for (const auto& n : g.nodes) {
                std::vector<PSet> outs(n.outputs.size());
                switch (n.kind) {
                    case NodeKind::Input:
                    case NodeKind::Source: outs[0] = p_fixed(names_of(n.signals)); break;
                    case NodeKind::Blackbox:
                        for (std::size_t k = 0; k < outs.size(); ++k) outs[k] = p_fixed(names_of(n.bb_outputs[k].type));
                        break;
                    case NodeKind::Reg:
                        outs[0] = n.has_init() ? p_fixed(names_of(n.signals)) : in(n, 0);
                        break;
                    case NodeKind::Comb: {
                        PSet x = in(n, 0);
                        if (!x.top)
                            for (const auto& d : comb_declared(n.comb)) x.s.insert(d);
                        outs[0] = x;
                        break;
                    }
                    case NodeKind::Join: {
                        PSet x = p_fixed({});
                        for (int k = 0; k < static_cast<int>(n.inputs.size()); ++k) x = p_union(x, in(n, k));
                        outs[0] = x;
                        break;
                    }
                    case NodeKind::Merge:
                    case NodeKind::Mux:
                    case NodeKind::Arbit:
                    case NodeKind::VirtualMerge: {
                        PSet x;
                        for (int k = 0; k < data_input_count(n); ++k) x = p_intersect(x, in(n, k));
                        outs[0] = x;
                        break;
                    }
                    case NodeKind::Fork:
                    case NodeKind::Demux:
                        for (auto& o : outs) o = in(n, 0);
                        break;
                    default: break;
                }
                for (std::size_t k = 0; k < outs.size(); ++k) {
                    EdgeId e = n.outputs[k];
                    if (e == kNone) continue;
                    if (!(p[static_cast<std::size_t>(e)] == outs[k])) {
                        p[static_cast<std::size_t>(e)] = outs[k];
                        changed = true;
                    }
                }
            }
        }
    };
    iterate();
    // Channels still at Top sit on rings nothing enters from outside. Start
    // them from the empty set and settle again.
    bool reseed = false;
    for (auto& x : p)
        if (x.top) {
            x = p_fixed({});
            reseed = true;
        }
    if (reseed) iterate();
    return p;
}

}  // namespace detail

/// Needed/provided fixpoint over the (possibly cyclic) graph. Throws
/// CompileError carrying every scope diagnostic found.
inline LiveSets live_signal_analysis(const TokenFlowGraph& g) {
    using namespace detail;
    const std::size_t ne = g.edges.size();
    LiveSets live;
    live.provided.resize(ne);
    live.needed.resize(ne);
    live.select_signal.resize(ne);
    Diagnostics errs;

    {
        auto p = provided_fixpoint(g);
        for (std::size_t e = 0; e < ne; ++e) live.provided[e] = p[e].top ? SignalSet{} : p[e].s;
    }
    const auto& P = live.provided;

    // Select signal per Mux/Demux.
    for (const auto& n : g.nodes) {
        auto sp = select_port(n);
        if (!sp || n.inputs[static_cast<std::size_t>(*sp)] == kNone) continue;
        EdgeId se = n.inputs[static_cast<std::size_t>(*sp)];
        SignalSet cand = P[static_cast<std::size_t>(se)];
        if (cand.size() != 1) {
            SignalSet data;
            for (int k = 0; k < data_input_count(n); ++k)
                if (n.inputs[static_cast<std::size_t>(k)] != kNone)
                    data = set_union(data, P[static_cast<std::size_t>(n.inputs[static_cast<std::size_t>(k)])]);
            cand = set_minus(cand, data);
        }
        if (cand.size() != 1) {
            auto d = Diagnostic::error("E_SELECT_AMBIGUOUS",
                                       "cannot determine the select signal of " + n.name + " from channel '" +
                                           g.edge(se).display_name() + "' carrying " +
                                           join_names(P[static_cast<std::size_t>(se)]),
                                       n.pos);
            d.nodes.push_back(n.id);
            d.channels.push_back(se);
            errs.push_back(std::move(d));
            continue;
        }
        live.select_signal[static_cast<std::size_t>(se)] = *cand.begin();
    }

    // Fixed demands.
    std::vector<SignalSet> seed(ne);
    for (const auto& e : g.edges) seed[static_cast<std::size_t>(e.id)] = names_of(e.declared_type);
    for (std::size_t e = 0; e < ne; ++e)
        if (live.select_signal[e]) seed[e].insert(*live.select_signal[e]);
    for (const auto& n : g.nodes) {
        auto at = [&](int k) -> SignalSet* {
            EdgeId e = n.inputs[static_cast<std::size_t>(k)];
            return e == kNone ? nullptr : &seed[static_cast<std::size_t>(e)];
        };
        switch (n.kind) {
            case NodeKind::Output:
            case NodeKind::Sink:
                if (auto* s = at(0)) *s = set_union(*s, names_of(n.signals));
                break;
            case NodeKind::Reg:
                if (n.has_init())
                    if (auto* s = at(0)) *s = set_union(*s, names_of(n.signals));
                break;
            case NodeKind::Blackbox:
                for (std::size_t k = 0; k < n.inputs.size(); ++k)
                    if (auto* s = at(static_cast<int>(k))) *s = set_union(*s, names_of(n.bb_inputs[k].type));
                break;
            default: break;
        }
    }

    auto& N = live.needed;
    N = seed;
    bool changed = true;
    while (changed) {
        changed = false;
        auto grow = [&](EdgeId e, const SignalSet& add) {
            if (e == kNone) return;
            auto& s = N[static_cast<std::size_t>(e)];
            std::size_t before = s.size();
            s.insert(add.begin(), add.end());
            changed = changed || s.size() != before;
        };
        auto out_need = [&](const Node& n, std::size_t k) -> SignalSet {
            EdgeId e = n.outputs[k];
            return e == kNone ? SignalSet{} : N[static_cast<std::size_t>(e)];
        };
        for (auto it = g.nodes.rbegin(); it != g.nodes.rend(); ++it) {
            const Node& n = *it;
            switch (n.kind) {
                case NodeKind::Fork:
                case NodeKind::Demux: {
                    SignalSet u;
                    for (std::size_t k = 0; k < n.outputs.size(); ++k) u = set_union(u, out_need(n, k));
                    grow(n.inputs[0], u);
                    break;
                }
                case NodeKind::Reg:
                    if (!n.has_init()) grow(n.inputs[0], out_need(n, 0));
                    break;
                case NodeKind::Comb:
                    grow(n.inputs[0], set_union(comb_reads_before_def(n.comb),
                                                set_minus(out_need(n, 0), comb_defined(n.comb))));
                    break;
                case NodeKind::Join:
                    for (EdgeId e : n.inputs)
                        if (e != kNone) grow(e, set_intersect(out_need(n, 0), P[static_cast<std::size_t>(e)]));
                    break;
                case NodeKind::Merge:
                case NodeKind::Mux:
                case NodeKind::Arbit:
                case NodeKind::VirtualMerge:
                    for (int k = 0; k < data_input_count(n); ++k) grow(n.inputs[static_cast<std::size_t>(k)], out_need(n, 0));
                    break;
                default: break;
            }
        }
    }

    // Join name collisions on demanded signals.
    for (const auto& n : g.nodes) {
        if (n.kind != NodeKind::Join || n.outputs[0] == kNone) continue;
        for (const auto& sig : N[static_cast<std::size_t>(n.outputs[0])]) {
            int providers = 0;
            for (EdgeId e : n.inputs)
                if (e != kNone && P[static_cast<std::size_t>(e)].count(sig)) ++providers;
            if (providers > 1) {
                auto d = Diagnostic::error("E_NAME_COLLISION",
                                           "signal '" + sig + "' arrives on more than one input of " + n.name, n.pos);
                d.nodes.push_back(n.id);
                errs.push_back(std::move(d));
            }
        }
    }

    // Unprovided signals, reported where they first go missing.
    auto missing = [&](EdgeId e) { return set_minus(N[static_cast<std::size_t>(e)], P[static_cast<std::size_t>(e)]); };
    for (const auto& e : g.edges) {
        SignalSet miss = missing(e.id);
        if (miss.empty()) continue;
        for (const auto& sig : miss) {
            bool upstream = false;
            if (e.producer) {
                const Node& prod = g.node(e.producer->node);
                for (EdgeId in : prod.inputs)
                    if (in != kNone && missing(in).count(sig)) upstream = true;
            }
            if (upstream) continue;
            std::string where = e.producer ? g.node(e.producer->node).name : std::string("nothing");
            auto d = Diagnostic::error("E_UNPROVIDED_SIGNAL",
                                       "signal '" + sig + "' is needed on channel '" + e.display_name() +
                                           "' but not provided (channel carries " +
                                           join_names(P[static_cast<std::size_t>(e.id)]) + " from " + where + ")",
                                       e.pos);
            d.channels.push_back(e.id);
            if (e.producer) d.nodes.push_back(e.producer->node);
            errs.push_back(std::move(d));
        }
    }

    if (!errs.empty()) throw CompileError(std::move(errs));
    live.carry = N;
    return live;
}

/// Rings whose only entries synchronize (join, mux select, blackbox) and that
/// hold no initial token can never fire.
inline Diagnostics detect_deadlocked_rings(const TokenFlowGraph& g) {
    Adjacency adj(g.nodes.size());
    for (const auto& e : g.edges) {
        if (!e.producer || !e.consumer) continue;
        const Node& c = g.node(e.consumer->node);
        bool token_entry = (is_merge_like(c.kind) && !is_select_port(c, e.consumer->port)) || c.has_init();
        if (token_entry) continue;
        adj[static_cast<std::size_t>(e.producer->node)].push_back(e.consumer->node);
    }
    Diagnostics out;
    auto scc = strongly_connected_components(adj);
    for (const auto& comp : scc.components) {
        if (!is_nontrivial(comp, adj)) continue;
        std::set<int> members(comp.begin(), comp.end());
        bool entered = false;
        for (int v : comp)
            for (EdgeId e : g.node(v).inputs)
                if (e != kNone && g.edge(e).producer && !members.count(g.edge(e).producer->node)) entered = true;
        if (!entered) continue;
        std::string names;
        for (int v : comp) names += (names.empty() ? "" : ", ") + g.node(v).name;
        auto d = Diagnostic::error("E_DEADLOCK_RING",
                                   "ring without an initial token is guaranteed to deadlock: " + names,
                                   g.node(comp.front()).pos);
        d.nodes = comp;
        out.push_back(std::move(d));
    }
    return out;
}

/// Builds the acyclic typing view. With `lenient`, a ring that has no
/// merge-like entry is cut at its lowest internal edge instead of failing;
/// the cut then has no peer to check against.
inline DagView break_rings(const TokenFlowGraph& g, bool lenient = false) {
    DagView v;
    v.graph = g;
    v.original_nodes = g.nodes.size();
    v.original_edges = g.edges.size();
    for (std::size_t i = 0; i < g.edges.size(); ++i) v.carry_source.push_back(static_cast<EdgeId>(i));

    auto& G = v.graph;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        const Node& reg = g.nodes[i];
        if (!reg.has_init()) continue;
        EdgeId e_in = reg.inputs[0];
        NodeId vm = static_cast<NodeId>(G.nodes.size());
        NodeId vs = vm + 1;
        EdgeId e_virt = static_cast<EdgeId>(G.edges.size());
        EdgeId e_out = e_virt + 1;

        Node m;
        m.id = vm;
        m.kind = NodeKind::VirtualMerge;
        m.name = reg.name + "_vm";
        m.pos = reg.pos;
        m.inputs = {e_in, e_virt};
        m.outputs = {e_out};
        Node s;
        s.id = vs;
        s.kind = NodeKind::Source;
        s.name = reg.name + "_init";
        s.pos = reg.pos;
        s.label = "virtual";
        s.signals = reg.signals;
        s.outputs = {e_virt};
        G.nodes.push_back(std::move(m));
        G.nodes.push_back(std::move(s));

        Edge ev;
        ev.id = e_virt;
        ev.name = reg.name + "_init";
        ev.producer = PortRef{vs, 0};
        ev.consumer = PortRef{vm, 1};
        ev.pos = reg.pos;
        Edge eo;
        eo.id = e_out;
        eo.name = reg.name + "_vm";
        eo.producer = PortRef{vm, 0};
        eo.consumer = PortRef{reg.id, 0};
        eo.pos = reg.pos;
        G.edges.push_back(std::move(ev));
        G.edges.push_back(std::move(eo));
        v.carry_source.push_back(e_in);
        v.carry_source.push_back(e_in);

        if (e_in != kNone) G.edge(e_in).consumer = PortRef{vm, 0};
        G.node(reg.id).inputs[0] = e_out;
        v.virtual_merge_of[reg.id] = vm;
    }
    v.broken.assign(G.edges.size(), false);

    for (;;) {
        Adjacency adj = v.adjacency();
        auto scc = strongly_connected_components(adj);
        std::vector<const std::vector<int>*> rings;
        for (const auto& c : scc.components)
            if (is_nontrivial(c, adj)) rings.push_back(&c);
        if (rings.empty()) break;
        std::sort(rings.begin(), rings.end(), [](auto* a, auto* b) { return a->front() < b->front(); });

        Diagnostics errs;
        for (const auto* ring : rings) {
            std::set<int> members(ring->begin(), ring->end());
            auto inside = [&](EdgeId e) {
                return e != kNone && !v.broken[static_cast<std::size_t>(e)] && G.edge(e).producer &&
                       members.count(G.edge(e).producer->node);
            };
            std::optional<RingBreakRecord> rec;
            for (int id : *ring) {
                const Node& n = G.node(id);
                if (!is_merge_like(n.kind)) continue;
                EdgeId internal = kNone;
                EdgeId external = kNone;
                for (int k = 0; k < data_input_count(n); ++k) {
                    EdgeId e = n.inputs[static_cast<std::size_t>(k)];
                    if (e == kNone || v.broken[static_cast<std::size_t>(e)]) continue;
                    if (inside(e)) {
                        if (internal == kNone) internal = e;
                    } else if (external == kNone) {
                        external = e;
                    }
                }
                if (internal != kNone && external != kNone) {
                    rec = RingBreakRecord{internal, external, id};
                    break;
                }
            }
            if (!rec && lenient) {
                for (const auto& e : G.edges)
                    if (inside(e.id) && e.consumer && members.count(e.consumer->node) &&
                        !is_select_port(G.node(e.consumer->node), e.consumer->port)) {
                        rec = RingBreakRecord{e.id, kNone, e.consumer->node};
                        break;
                    }
            }
            if (!rec) {
                std::string names;
                for (int id : *ring) names += (names.empty() ? "" : ", ") + G.node(id).name;
                auto d = Diagnostic::error("E_UNTYPEABLE_RING",
                                           "ring has no merge or mux entry to break it at: " + names,
                                           G.node(ring->front()).pos);
                for (int id : *ring)
                    if (!v.is_virtual_node(id)) d.nodes.push_back(id);
                errs.push_back(std::move(d));
                continue;
            }
            v.broken[static_cast<std::size_t>(rec->broken_edge)] = true;
            v.breaks.push_back(*rec);
            // One break per round: the cut may already split other rings.
            break;
        }
        if (!errs.empty()) throw CompileError(std::move(errs));
    }
    return v;
}

namespace detail {

inline std::string type_str(const ChannelType& t) {
    std::string out;
    for (const auto& [k, w] : t) out += (out.empty() ? "" : ", ") + k + ":" + std::to_string(w);
    return "{" + out + "}";
}

}  // namespace detail

/// Forward type propagation over the DAG view. Returns one ChannelType per
/// view edge (original edge ids first).
inline std::vector<ChannelType> infer_types(const DagView& v, const LiveSets& live) {
    using detail::type_str;
    const auto& G = v.graph;
    std::vector<ChannelType> types(G.edges.size());
    std::vector<bool> typed(G.edges.size(), false);
    Diagnostics errs;

    auto carry = [&](EdgeId e) -> const SignalSet& {
        return live.carry[static_cast<std::size_t>(v.carry_source[static_cast<std::size_t>(e)])];
    };
    auto restrict_to = [&](const ChannelType& t, EdgeId e) {
        ChannelType r;
        for (const auto& s : carry(e)) {
            auto it = t.find(s);
            if (it != t.end()) r[s] = it->second;
        }
        return r;
    };
    auto in_type = [&](const Node& n, int k) -> const ChannelType* {
        EdgeId e = n.inputs[static_cast<std::size_t>(k)];
        if (e == kNone || v.broken[static_cast<std::size_t>(e)] || !typed[static_cast<std::size_t>(e)]) return nullptr;
        return &types[static_cast<std::size_t>(e)];
    };
    auto fixed_type = [&](const Node& n, const std::vector<SignalSpec>& sigs, const char* what) {
        ChannelType t;
        for (const auto& s : sigs) {
            if (!s.width) {
                auto d = Diagnostic::error("E_UNANNOTATED_ROOT",
                                           std::string(what) + " signal '" + s.name + "' of " + n.name +
                                               " needs an explicit type",
                                           s.pos.valid() ? s.pos : n.pos);
                d.nodes.push_back(n.id);
                errs.push_back(std::move(d));
                continue;
            }
            t[s.name] = *s.width;
        }
        return t;
    };
    auto set_out = [&](const Node& n, std::size_t k, const ChannelType& t) {
        EdgeId e = n.outputs[k];
        if (e == kNone) return;
        types[static_cast<std::size_t>(e)] = restrict_to(t, e);
        typed[static_cast<std::size_t>(e)] = true;
    };
    auto check_required = [&](const Node& n, const ChannelType* t, const std::vector<SignalSpec>& sigs, EdgeId e) {
        if (!t) return;
        for (const auto& s : sigs) {
            if (!s.width) continue;
            auto it = t->find(s.name);
            if (it != t->end() && it->second != *s.width) {
                auto d = Diagnostic::error("E_TYPE_MISMATCH",
                                           "signal '" + s.name + "' on channel '" + G.edge(e).display_name() +
                                               "' has width " + std::to_string(it->second) + " but " + n.name +
                                               " expects " + std::to_string(*s.width),
                                           s.pos.valid() ? s.pos : n.pos);
                d.nodes.push_back(n.id);
                d.channels.push_back(e);
                errs.push_back(std::move(d));
            }
        }
    };

    const auto order = topological_order(v.adjacency());
    for (int id : order) {
        const Node& n = G.node(id);
        switch (n.kind) {
            case NodeKind::Input: set_out(n, 0, fixed_type(n, n.signals, "input")); break;
            case NodeKind::Source: set_out(n, 0, fixed_type(n, n.signals, "source")); break;
            case NodeKind::Blackbox:
                for (std::size_t k = 0; k < n.outputs.size(); ++k) {
                    std::vector<SignalSpec> sigs;
                    if (n.bb_outputs[k].type) sigs = n.bb_outputs[k].type->signals;
                    set_out(n, k, fixed_type(n, sigs, "blackbox output"));
                }
                for (std::size_t k = 0; k < n.inputs.size(); ++k)
                    if (n.bb_inputs[k].type)
                        check_required(n, in_type(n, static_cast<int>(k)), n.bb_inputs[k].type->signals,
                                       n.inputs[k]);
                break;
            case NodeKind::Output:
            case NodeKind::Sink: check_required(n, in_type(n, 0), n.signals, n.inputs[0]); break;
            case NodeKind::Reg:
            case NodeKind::Fork:
            case NodeKind::Demux: {
                const ChannelType* t = in_type(n, 0);
                for (std::size_t k = 0; k < n.outputs.size(); ++k) set_out(n, k, t ? *t : ChannelType{});
                break;
            }
            case NodeKind::Comb: {
                const ChannelType* t = in_type(n, 0);
                WidthEnv env = t ? *t : ChannelType{};
                for (const auto& st : n.comb) {
                    try {
                        env[st.target] = statement_width(st, env);
                    } catch (const std::out_of_range&) {
                        // A read the scope pass already reported; keep going.
                        env[st.target] = 1;
                    }
                }
                set_out(n, 0, env);
                break;
            }
            case NodeKind::Join: {
                ChannelType u;
                for (int k = 0; k < static_cast<int>(n.inputs.size()); ++k)
                    if (auto* t = in_type(n, k)) u.insert(t->begin(), t->end());
                set_out(n, 0, u);
                break;
            }
            case NodeKind::Merge:
            case NodeKind::Mux:
            case NodeKind::Arbit:
            case NodeKind::VirtualMerge: {
                const ChannelType* first = nullptr;
                EdgeId first_edge = kNone;
                for (int k = 0; k < data_input_count(n); ++k) {
                    const ChannelType* t = in_type(n, k);
                    if (!t) continue;
                    if (!first) {
                        first = t;
                        first_edge = n.inputs[static_cast<std::size_t>(k)];
                    } else if (*t != *first) {
                        auto d = Diagnostic::error(
                            "E_MERGE_TYPE_MISMATCH",
                            "inputs of " + n.name + " differ: '" + G.edge(first_edge).display_name() + "' " +
                                type_str(*first) + " vs '" +
                                G.edge(n.inputs[static_cast<std::size_t>(k)]).display_name() + "' " + type_str(*t),
                            n.pos);
                        for (const auto& [reg, vm] : v.virtual_merge_of)
                            if (vm == n.id) d.nodes.push_back(reg);
                        if (d.nodes.empty()) d.nodes.push_back(n.id);
                        errs.push_back(std::move(d));
                    }
                }
                set_out(n, 0, first ? *first : ChannelType{});
                break;
            }
            default: break;
        }
    }

    // Declared channel annotations.
    for (std::size_t i = 0; i < v.original_edges; ++i) {
        const Edge& e = G.edges[i];
        if (!e.declared_type) continue;
        for (const auto& s : e.declared_type->signals) {
            if (!s.width) continue;
            auto it = types[i].find(s.name);
            if (it != types[i].end() && it->second != *s.width) {
                auto d = Diagnostic::error("E_TYPE_MISMATCH",
                                           "channel '" + e.display_name() + "' declares " + s.name + " : " +
                                               std::to_string(*s.width) + " bit(s) but carries " +
                                               std::to_string(it->second),
                                           s.pos.valid() ? s.pos : e.pos);
                d.channels.push_back(e.id);
                errs.push_back(std::move(d));
            }
        }
    }

    // Select channels carry exactly one width-1 signal.
    for (std::size_t i = 0; i < v.original_edges; ++i) {
        if (!live.select_signal[i]) continue;
        const auto& t = types[i];
        if (t.size() != 1 || t.begin()->second != 1) {
            auto d = Diagnostic::error("E_SELECT_TYPE",
                                       "select channel '" + G.edges[i].display_name() +
                                           "' must carry one 1-bit signal, found " + type_str(t),
                                       G.edges[i].pos);
            d.channels.push_back(static_cast<EdgeId>(i));
            errs.push_back(std::move(d));
        }
    }

    // Broken ring edges must match the sibling they were cut away from.
    for (const auto& b : v.breaks) {
        if (b.constraint_peer == kNone) continue;
        const auto& tb = types[static_cast<std::size_t>(b.broken_edge)];
        const auto& tp = types[static_cast<std::size_t>(b.constraint_peer)];
        if (tb != tp) {
            auto d = Diagnostic::error("E_MERGE_TYPE_MISMATCH",
                                       "ring channel '" + G.edge(b.broken_edge).display_name() + "' " + type_str(tb) +
                                           " does not match '" + G.edge(b.constraint_peer).display_name() + "' " +
                                           type_str(tp) + " at " + G.node(b.node).name,
                                       G.node(b.node).pos);
            d.nodes.push_back(b.node);
            d.channels = {b.broken_edge, b.constraint_peer};
            errs.push_back(std::move(d));
        }
    }

    if (!errs.empty()) throw CompileError(std::move(errs));
    return types;
}

struct AnalysisOptions {
    /// Skip the deadlock check and cut untypeable rings anywhere. Used to
    /// simulate designs that would be rejected.
    bool lenient = false;
};

/// Everything the backends and the simulator need about one design.
struct Analysis {
    TokenFlowGraph graph;
    LiveSets live;
    DagView dag;
    std::vector<ChannelType> types;
    Diagnostics diagnostics;

    bool ok() const { return !has_errors(diagnostics); }
    const ChannelType& type(EdgeId e) const { return types.at(static_cast<std::size_t>(e)); }
};

/// Runs validation, scope, deadlock, ring-breaking and typing; stops at the
/// first stage that reports errors.
inline Analysis analyze(TokenFlowGraph g, AnalysisOptions opts = {}) {
    Analysis a;
    a.graph = std::move(g);
    a.diagnostics = validate_graph(a.graph);
    if (!a.ok()) return a;
    try {
        a.live = live_signal_analysis(a.graph);
        if (!opts.lenient) {
            auto dl = detect_deadlocked_rings(a.graph);
            if (!dl.empty()) {
                a.diagnostics = std::move(dl);
                return a;
            }
        }
        a.dag = break_rings(a.graph, opts.lenient);
        a.types = infer_types(a.dag, a.live);
    } catch (const CompileError& e) {
        a.diagnostics.insert(a.diagnostics.end(), e.diagnostics().begin(), e.diagnostics().end());
    }
    return a;
}

}  // namespace yak

#endif  // YAK_ANALYSIS_HPP
