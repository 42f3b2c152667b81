#ifndef YAK_SDC_HPP
#define YAK_SDC_HPP

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "yak/analysis.hpp"
#include "yak/version.hpp"

namespace yak {

/// Per-stage constraint graph. `root` is a Reg node, or a Mux/Demux whose
/// select latch is treated as the stage.
struct StageDag {
    NodeId root = kNone;
    bool select_root = false;
    /// Flow controllers (and comb nodes) on the stage-to-stage paths.
    std::vector<NodeId> nodes;
    /// Stages launching data captured by the root.
    std::vector<NodeId> roots;
    /// Stages capturing data launched by the root.
    std::vector<NodeId> leaves;
};

enum class ClockPurpose { Root, Setup, Hold };

struct ClockDef {
    std::string name;
    ClockPurpose purpose = ClockPurpose::Root;
    std::string pin;
    /// Generated clocks only.
    std::string master;
    std::string source_pin;
    /// Stage at which a walk ended on this clock, else kNone.
    NodeId endpoint = kNone;

    bool generated() const { return purpose != ClockPurpose::Root; }
};

struct SdcConfig {
    double period = 1.0;
    double margin = 1.0;
};

namespace detail {

inline bool is_walk_terminal(const Node& n) {
    return n.kind == NodeKind::Input || n.kind == NodeKind::Output || n.kind == NodeKind::Sink ||
           n.kind == NodeKind::Source || n.kind == NodeKind::Blackbox;
}

/// Forward and backward walks shared by DAG extraction and clock generation.
class DagWalker {
public:
    DagWalker(const TokenFlowGraph& g, NodeId root, bool select_root)
        : g_(g), root_(root), select_(select_root) {}

    StageDag dag;
    std::vector<ClockDef> clocks;

    void run() {
        dag.root = root_;
        dag.select_root = select_;
        const Node& r = g_.node(root_);
        std::string anchor = r.name + (select_ ? "/sel_en" : "/en");
        std::string root_clock = "clk_" + r.name;
        clocks.push_back(ClockDef{root_clock, ClockPurpose::Root, anchor, "", "", kNone});

        std::set<NodeId> seen;
        for (std::size_t k = 0; k < r.outputs.size(); ++k) {
            std::size_t c = clock(ClockPurpose::Setup, r.name + "/o" + std::to_string(k) + "_req", 0);
            forward(r.outputs[k], c, seen);
        }
        seen.clear();
        if (select_) {
            EdgeId se = r.inputs[static_cast<std::size_t>(*select_port(r))];
            std::size_t c = clock(ClockPurpose::Hold, r.name + "/s_ack", 0);
            backward(se, c, seen);
        } else {
            for (std::size_t k = 0; k < r.inputs.size(); ++k) {
                std::size_t c = clock(ClockPurpose::Hold, r.name + "/i" + std::to_string(k) + "_ack", 0);
                backward(r.inputs[k], c, seen);
            }
        }
        // Setup clocks first, then hold, each in walk order.
        std::stable_partition(clocks.begin() + 1, clocks.end(),
                              [](const ClockDef& c) { return c.purpose == ClockPurpose::Setup; });
    }

private:
    std::size_t clock(ClockPurpose p, const std::string& pin, std::size_t master, NodeId endpoint = kNone) {
        auto key = std::make_pair(p, pin);
        auto it = by_pin_.find(key);
        if (it != by_pin_.end()) return it->second;
        int& n = p == ClockPurpose::Setup ? su_ : ho_;
        ClockDef c;
        c.name = "clk_" + g_.node(root_).name + (p == ClockPurpose::Setup ? "_su_" : "_ho_") + std::to_string(n++);
        c.purpose = p;
        c.pin = pin;
        c.master = clocks[master].name;
        c.source_pin = clocks[master].pin;
        c.endpoint = endpoint;
        clocks.push_back(c);
        by_pin_[key] = clocks.size() - 1;
        return clocks.size() - 1;
    }

    void add_node(NodeId n) {
        if (std::find(dag.nodes.begin(), dag.nodes.end(), n) == dag.nodes.end()) dag.nodes.push_back(n);
    }

    void forward(EdgeId e, std::size_t master, std::set<NodeId>& seen) {
        const Edge& ed = g_.edge(e);
        if (!ed.consumer) return;
        const Node& d = g_.node(ed.consumer->node);
        if (is_stage(d)) {
            if (std::find(dag.leaves.begin(), dag.leaves.end(), d.id) == dag.leaves.end()) dag.leaves.push_back(d.id);
            clock(ClockPurpose::Setup, d.name + "/i" + std::to_string(ed.consumer->port) + "_req", master, d.id);
            return;
        }
        if (is_walk_terminal(d)) return;
        if (d.id == root_ || !seen.insert(d.id).second) return;
        add_node(d.id);
        if (d.kind == NodeKind::Comb) {
            forward(d.outputs[0], master, seen);
            return;
        }
        for (std::size_t k = 0; k < d.outputs.size(); ++k) {
            std::size_t c = clock(ClockPurpose::Setup, d.name + "/o" + std::to_string(k) + "_req", master);
            forward(d.outputs[k], c, seen);
        }
    }

    void backward(EdgeId e, std::size_t master, std::set<NodeId>& seen) {
        const Edge& ed = g_.edge(e);
        if (!ed.producer) return;
        const Node& p = g_.node(ed.producer->node);
        if (is_stage(p)) {
            if (std::find(dag.roots.begin(), dag.roots.end(), p.id) == dag.roots.end()) dag.roots.push_back(p.id);
            clock(ClockPurpose::Hold, p.name + "/o" + std::to_string(ed.producer->port) + "_ack", master, p.id);
            return;
        }
        if (is_walk_terminal(p)) return;
        if (p.id == root_ || !seen.insert(p.id).second) return;
        add_node(p.id);
        if (p.kind == NodeKind::Comb) {
            backward(p.inputs[0], master, seen);
            return;
        }
        for (std::size_t k = 0; k < p.inputs.size(); ++k) {
            std::string pin = is_select_port(p, static_cast<int>(k)) ? p.name + "/s_ack"
                                                                     : p.name + "/i" + std::to_string(k) + "_ack";
            std::size_t c = clock(ClockPurpose::Hold, pin, master);
            backward(p.inputs[k], c, seen);
        }
    }

    const TokenFlowGraph& g_;
    NodeId root_;
    bool select_;
    int su_ = 0;
    int ho_ = 0;
    std::map<std::pair<ClockPurpose, std::string>, std::size_t> by_pin_;
};

inline std::string ns(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

}  // namespace detail

/// One DAG per Reg stage, keyed by node id.
inline std::map<NodeId, StageDag> extract_stage_dags(const TokenFlowGraph& g) {
    std::map<NodeId, StageDag> out;
    for (const auto& n : g.nodes)
        if (is_stage(n)) {
            detail::DagWalker w(g, n.id, false);
            w.run();
            out[n.id] = w.dag;
        }
    return out;
}

/// One DAG per Mux/Demux, rooted at its select latch.
inline std::map<NodeId, StageDag> extract_select_dags(const TokenFlowGraph& g) {
    std::map<NodeId, StageDag> out;
    for (const auto& n : g.nodes)
        if (n.kind == NodeKind::Mux || n.kind == NodeKind::Demux) {
            detail::DagWalker w(g, n.id, true);
            w.run();
            out[n.id] = w.dag;
        }
    return out;
}

/// Root clock, then setup clocks in forward-walk order, then hold clocks in
/// backward-walk order. Every master precedes the clocks derived from it.
inline std::vector<ClockDef> generate_clocks(const StageDag& dag, const TokenFlowGraph& g) {
    detail::DagWalker w(g, dag.root, dag.select_root);
    w.run();
    return w.clocks;
}

/// SDC text for the whole design: per-root programs concatenated in node-id
/// order.
inline std::string emit_sdc(const TokenFlowGraph& g, const std::string& top, const SdcConfig& cfg) {
    using detail::ns;
    std::ostringstream os;
    os << "# Generated by yak " << kYakVersion << "\n";
    os << "# top: " << top << "\n";
    os << "# period: " << ns(cfg.period) << " ns\n";
    os << "# margin: " << ns(cfg.margin) << "\n";

    std::map<NodeId, StageDag> dags = extract_stage_dags(g);
    for (auto& [id, d] : extract_select_dags(g)) dags[id] = d;

    for (const auto& [id, dag] : dags) {
        auto clocks = generate_clocks(dag, g);
        os << "\n# " << (dag.select_root ? "select latch " : "stage ") << g.node(id).name << "\n";
        for (const auto& c : clocks) {
            if (!c.generated()) {
                os << "create_clock -name " << c.name << " -period " << ns(cfg.period) << " [get_pins " << c.pin
                   << "]\n";
            } else {
                os << "create_generated_clock -name " << c.name << " -source [get_pins " << c.source_pin
                   << "] -master_clock " << c.master << " -add -combinational [get_pins " << c.pin << "]\n";
            }
        }
        const std::string& root_clock = clocks.front().name;
        for (const auto& c : clocks)
            if (c.purpose == ClockPurpose::Setup && c.endpoint != kNone)
                os << "set_max_delay " << ns(cfg.period) << " -from [get_clocks " << root_clock << "] -to [get_clocks "
                   << c.name << "]\n";
        for (const auto& c : clocks)
            if (c.purpose == ClockPurpose::Hold && c.endpoint != kNone)
                os << "set_min_delay " << ns(cfg.margin * cfg.period) << " -from [get_clocks " << c.name
                   << "] -to [get_clocks " << root_clock << "]\n";
    }
    return os.str();
}

}  // namespace yak

#endif  // YAK_SDC_HPP
