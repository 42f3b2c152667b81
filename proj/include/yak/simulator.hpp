#ifndef YAK_SIMULATOR_HPP
#define YAK_SIMULATOR_HPP

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "yak/analysis.hpp"
#include "yak/expr.hpp"

namespace yak {

using Token = std::map<std::string, std::uint64_t>;
using Feeds = std::map<std::string, std::vector<Token>>;

enum class SimStatus { Quiescent, Deadlock, Timeout };

inline const char* sim_status_name(SimStatus s) {
    switch (s) {
        case SimStatus::Quiescent: return "quiescent";
        case SimStatus::Deadlock: return "deadlock";
        case SimStatus::Timeout: return "timeout";
    }
    return "?";
}

struct NodeCounters {
    std::uint64_t fires = 0;
    std::uint64_t consumed = 0;
    std::uint64_t produced = 0;
};

struct SimState {
    std::vector<std::optional<Token>> channels;
    /// Pending tokens per Input node.
    std::map<NodeId, std::deque<Token>> queues;
    /// Consumed-token log per Output port.
    std::map<std::string, std::vector<Token>> outputs;
    /// Consumed-token log per Sink node.
    std::map<NodeId, std::vector<Token>> sinks;
    std::size_t step = 0;
    Diagnostics diagnostics;
    std::vector<NodeCounters> counters;
    /// Merges currently holding two tokens; a conflict is reported once per episode.
    std::vector<bool> merge_conflict;
    bool halted = false;
};

struct SimReport {
    SimStatus status = SimStatus::Quiescent;
    std::size_t steps = 0;
    std::map<std::string, std::vector<Token>> outputs;
    Diagnostics diagnostics;
    /// Channels still holding a token at the end.
    std::vector<EdgeId> occupied;
};

struct SimOptions {
    /// Treat a merge exclusivity violation as a fatal error.
    bool strict_merge = false;
};

/// Token-level interpreter over an analyzed design.
class Simulator {
public:
    explicit Simulator(const Analysis& a, SimOptions opts = {}) : a_(a), opts_(opts) {
        if (a.types.size() < a.graph.edges.size())
            throw CompileError(Diagnostic::error("E_SIM_UNSUPPORTED", "design has not been typed"));
        for (const auto& n : a.graph.nodes) {
            if (n.kind == NodeKind::Blackbox)
                throw CompileError(Diagnostic::error("E_SIM_UNSUPPORTED",
                                                     "blackbox '" + n.label + "' cannot be simulated", n.pos));
            if (n.kind == NodeKind::Instance || n.kind == NodeKind::VirtualMerge)
                throw CompileError(Diagnostic::error("E_SIM_UNSUPPORTED", "unexpected node " + n.name, n.pos));
        }
        for (std::size_t e = 0; e < a.graph.edges.size(); ++e)
            for (const auto& [s, w] : a.types[e])
                if (w > 64)
                    throw CompileError(Diagnostic::error("E_SIM_UNSUPPORTED",
                                                         "signal '" + s + "' is wider than 64 bits",
                                                         a.graph.edges[e].pos));
    }

    const TokenFlowGraph& graph() const { return a_.graph; }

    SimState init_state(const Feeds& feeds) const {
        const auto& g = a_.graph;
        SimState st;
        st.channels.assign(g.edges.size(), std::nullopt);
        st.counters.assign(g.nodes.size(), {});
        st.merge_conflict.assign(g.nodes.size(), false);
        std::map<std::string, NodeId> inputs;
        for (const auto& n : g.nodes) {
            if (n.kind == NodeKind::Input) {
                inputs[n.label] = n.id;
                st.queues[n.id];
            }
            if (n.kind == NodeKind::Output) st.outputs[n.label];
            if (n.kind == NodeKind::Sink) st.sinks[n.id];
            if (n.has_init()) {
                Token t;
                for (const auto& s : n.signals) t[s.name] = s.value.value_or(0);
                st.channels[static_cast<std::size_t>(n.outputs[0])] = restrict(t, n.outputs[0]);
            }
        }
        for (const auto& [port, toks] : feeds) {
            auto it = inputs.find(port);
            if (it == inputs.end())
                throw CompileError(Diagnostic::error("E_FEED_TYPE", "feed names unknown input port '" + port + "'"));
            const Node& n = g.node(it->second);
            for (std::size_t i = 0; i < toks.size(); ++i) {
                const Token& t = toks[i];
                for (const auto& s : n.signals) {
                    auto v = t.find(s.name);
                    std::string where = "port '" + port + "' token " + std::to_string(i) + " signal '" + s.name + "'";
                    if (v == t.end()) throw CompileError(Diagnostic::error("E_FEED_TYPE", where + " is missing"));
                    if (!fits_width(v->second, s.width.value_or(64)))
                        throw CompileError(Diagnostic::error(
                            "E_FEED_TYPE", where + " value " + std::to_string(v->second) + " does not fit in " +
                                               std::to_string(s.width.value_or(64)) + " bit(s)"));
                }
                for (const auto& [k, val] : t) {
                    bool known = false;
                    for (const auto& s : n.signals) known = known || s.name == k;
                    if (!known)
                        throw CompileError(Diagnostic::error("E_FEED_TYPE", "port '" + port + "' token " +
                                                                                std::to_string(i) +
                                                                                " has unknown signal '" + k + "'"));
                }
                st.queues[n.id].push_back(t);
            }
        }
        return st;
    }

    /// True if some node could fire in `st`.
    bool any_enabled(const SimState& st) const {
        for (const auto& n : a_.graph.nodes)
            if (enabled(n, st) >= 0) return true;
        return false;
    }

    /// One two-phase step. Returns false if nothing fired.
    bool step(SimState& st) const {
        const auto& g = a_.graph;
        std::vector<std::pair<NodeId, int>> fire;
        for (const auto& n : g.nodes) {
            if (n.kind == NodeKind::Merge) {
                int occ = 0;
                for (EdgeId e : n.inputs) occ += full(st, e);
                if (occ == 2 && !st.merge_conflict[static_cast<std::size_t>(n.id)]) {
                    auto d = opts_.strict_merge ? Diagnostic::error("E_MERGE_EXCLUSIVITY", "")
                                                : Diagnostic::warning("E_MERGE_EXCLUSIVITY", "");
                    d.message = "both inputs of " + n.name + " hold a token at step " + std::to_string(st.step);
                    d.pos = n.pos;
                    d.nodes.push_back(n.id);
                    st.diagnostics.push_back(std::move(d));
                    if (opts_.strict_merge) {
                        st.halted = true;
                        return false;
                    }
                }
                st.merge_conflict[static_cast<std::size_t>(n.id)] = occ == 2;
            }
            int choice = enabled(n, st);
            if (choice >= 0) fire.emplace_back(n.id, choice);
        }
        if (fire.empty()) return false;

        // Phase 1: take every consumed token so productions see the snapshot.
        std::vector<std::vector<Token>> taken(fire.size());
        for (std::size_t i = 0; i < fire.size(); ++i) {
            const Node& n = g.node(fire[i].first);
            for (int port : consumed_ports(n, fire[i].second, st)) {
                EdgeId e = n.inputs[static_cast<std::size_t>(port)];
                taken[i].push_back(*st.channels[static_cast<std::size_t>(e)]);
                st.channels[static_cast<std::size_t>(e)].reset();
                st.counters[static_cast<std::size_t>(n.id)].consumed++;
            }
        }
        // Phase 2: produce.
        for (std::size_t i = 0; i < fire.size(); ++i) {
            const Node& n = g.node(fire[i].first);
            st.counters[static_cast<std::size_t>(n.id)].fires++;
            commit(n, fire[i].second, taken[i], st);
        }
        st.step++;
        return true;
    }

    SimReport run(SimState st, std::size_t max_steps) const {
        SimReport r;
        bool budget_out = true;
        while (st.step < max_steps) {
            if (!step(st)) {
                budget_out = false;
                break;
            }
        }
        if (budget_out && !st.halted && !any_enabled(st)) budget_out = false;

        for (std::size_t e = 0; e < st.channels.size(); ++e)
            if (st.channels[e]) r.occupied.push_back(static_cast<EdgeId>(e));
        if (st.halted) {
            r.status = SimStatus::Deadlock;
        } else if (budget_out) {
            r.status = SimStatus::Timeout;
        } else {
            bool idle = true;
            for (const auto& [id, q] : st.queues) idle = idle && q.empty();
            for (EdgeId e : r.occupied) {
                const auto& prod = a_.graph.edge(e).producer;
                if (!prod || !a_.graph.node(prod->node).has_init()) idle = false;
            }
            r.status = idle ? SimStatus::Quiescent : SimStatus::Deadlock;
        }
        r.steps = st.step;
        r.outputs = st.outputs;
        r.diagnostics = st.diagnostics;
        return r;
    }

    SimReport run(const Feeds& feeds, std::size_t max_steps) const { return run(init_state(feeds), max_steps); }

    /// Tokens consumed and produced by one firing of `n` (fork: one per output).
    static std::pair<int, int> firing_signature(const Node& n) {
        switch (n.kind) {
            case NodeKind::Join: return {static_cast<int>(n.inputs.size()), 1};
            case NodeKind::Fork: return {1, static_cast<int>(n.outputs.size())};
            case NodeKind::Mux:
            case NodeKind::Demux: return {2, 1};
            case NodeKind::Input:
            case NodeKind::Source: return {0, 1};
            case NodeKind::Output:
            case NodeKind::Sink: return {1, 0};
            default: return {1, 1};
        }
    }

private:
    bool full(const SimState& st, EdgeId e) const {
        return e != kNone && st.channels[static_cast<std::size_t>(e)].has_value();
    }

    std::uint64_t select_value(const Node& n, const SimState& st) const {
        EdgeId se = n.inputs[static_cast<std::size_t>(*select_port(n))];
        const auto& sig = a_.live.select_signal[static_cast<std::size_t>(se)];
        const Token& t = *st.channels[static_cast<std::size_t>(se)];
        auto it = sig ? t.find(*sig) : t.end();
        return it == t.end() ? 0 : it->second;
    }

    /// -1 when disabled, else a node-specific choice (arbit/mux port, demux output).
    int enabled(const Node& n, const SimState& st) const {
        auto out_free = [&](std::size_t k) { return !full(st, n.outputs[k]); };
        switch (n.kind) {
            case NodeKind::Join: {
                for (EdgeId e : n.inputs)
                    if (!full(st, e)) return -1;
                return out_free(0) ? 0 : -1;
            }
            case NodeKind::Fork: {
                if (!full(st, n.inputs[0])) return -1;
                for (std::size_t k = 0; k < n.outputs.size(); ++k)
                    if (!out_free(k)) return -1;
                return 0;
            }
            case NodeKind::Merge: {
                bool a = full(st, n.inputs[0]);
                bool b = full(st, n.inputs[1]);
                if (a == b || !out_free(0)) return -1;
                return a ? 0 : 1;
            }
            case NodeKind::Arbit: {
                if (!out_free(0)) return -1;
                if (full(st, n.inputs[0])) return 0;
                if (full(st, n.inputs[1])) return 1;
                return -1;
            }
            case NodeKind::Mux: {
                if (!full(st, n.inputs[2]) || !out_free(0)) return -1;
                int k = select_value(n, st) ? 1 : 0;
                return full(st, n.inputs[static_cast<std::size_t>(k)]) ? k : -1;
            }
            case NodeKind::Demux: {
                if (!full(st, n.inputs[0]) || !full(st, n.inputs[1])) return -1;
                int k = select_value(n, st) ? 1 : 0;
                return out_free(static_cast<std::size_t>(k)) ? k : -1;
            }
            case NodeKind::Comb:
            case NodeKind::Reg: return full(st, n.inputs[0]) && out_free(0) ? 0 : -1;
            case NodeKind::Input: {
                auto it = st.queues.find(n.id);
                return it != st.queues.end() && !it->second.empty() && out_free(0) ? 0 : -1;
            }
            case NodeKind::Source: return out_free(0) ? 0 : -1;
            case NodeKind::Output:
            case NodeKind::Sink: return full(st, n.inputs[0]) ? 0 : -1;
            default: return -1;
        }
    }

    std::vector<int> consumed_ports(const Node& n, int choice, const SimState&) const {
        switch (n.kind) {
            case NodeKind::Join: {
                std::vector<int> v;
                for (int k = 0; k < static_cast<int>(n.inputs.size()); ++k) v.push_back(k);
                return v;
            }
            case NodeKind::Merge:
            case NodeKind::Arbit: return {choice};
            case NodeKind::Mux: return {choice, 2};
            case NodeKind::Demux: return {0, 1};
            case NodeKind::Input:
            case NodeKind::Source: return {};
            default: return {0};
        }
    }

    Token restrict(const Token& t, EdgeId e) const {
        Token r;
        for (const auto& [s, w] : a_.types[static_cast<std::size_t>(e)]) {
            auto it = t.find(s);
            r[s] = mask_to(it == t.end() ? 0 : it->second, w);
        }
        return r;
    }

    void produce(SimState& st, const Node& n, std::size_t k, const Token& t) const {
        EdgeId e = n.outputs[k];
        auto& slot = st.channels[static_cast<std::size_t>(e)];
        if (slot) throw std::logic_error("channel capacity exceeded on " + a_.graph.edge(e).display_name());
        slot = restrict(t, e);
        st.counters[static_cast<std::size_t>(n.id)].produced++;
    }

    void commit(const Node& n, int choice, const std::vector<Token>& in, SimState& st) const {
        switch (n.kind) {
            case NodeKind::Join: {
                Token u;
                for (const auto& t : in) u.insert(t.begin(), t.end());
                produce(st, n, 0, u);
                break;
            }
            case NodeKind::Fork:
                for (std::size_t k = 0; k < n.outputs.size(); ++k) produce(st, n, k, in[0]);
                break;
            case NodeKind::Merge:
            case NodeKind::Arbit:
            case NodeKind::Mux:
            case NodeKind::Reg: produce(st, n, 0, in[0]); break;
            case NodeKind::Demux: produce(st, n, static_cast<std::size_t>(choice), in[0]); break;
            case NodeKind::Comb: {
                const auto& in_type = a_.types[static_cast<std::size_t>(n.inputs[0])];
                ValueEnv vals(in[0].begin(), in[0].end());
                WidthEnv widths(in_type.begin(), in_type.end());
                auto [v, w] = eval_comb(n.comb, std::move(vals), std::move(widths));
                produce(st, n, 0, Token(v.begin(), v.end()));
                break;
            }
            case NodeKind::Input: {
                auto& q = st.queues[n.id];
                Token t = q.front();
                q.pop_front();
                produce(st, n, 0, t);
                break;
            }
            case NodeKind::Source: {
                Token t;
                for (const auto& s : n.signals) t[s.name] = s.value.value_or(0);
                produce(st, n, 0, t);
                break;
            }
            case NodeKind::Output: st.outputs[n.label].push_back(in[0]); break;
            case NodeKind::Sink: st.sinks[n.id].push_back(in[0]); break;
            default: break;
        }
    }

    const Analysis& a_;
    SimOptions opts_;
};

}  // namespace yak

#endif  // YAK_SIMULATOR_HPP
