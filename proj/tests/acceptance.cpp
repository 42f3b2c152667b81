// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include <chrono>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "support.hpp"
#include "yak/driver.hpp"
#include "yak/sdc.hpp"
#include "yak/simulator.hpp"
#include "yak/verilog.hpp"
#include "yak/verilog_check.hpp"

using namespace yak;
namespace fs = std::filesystem;

namespace {

struct Check {
    std::ostringstream why;
    bool ok = true;
    void require(bool cond, const std::string& what) {
        if (!cond && ok) why << what;
        ok = ok && cond;
    }
};

Token tok(std::initializer_list<std::pair<const std::string, std::uint64_t>> kv) { return Token(kv); }

void gcd_end_to_end(Check& c) {
    auto t0 = std::chrono::steady_clock::now();
    BuildConfig bc;
    bc.input = design_path("gcd.yak");
    std::ostringstream err;
    c.require(cmd_check(bc, err) == kExitOk && err.str().empty(), "check reported diagnostics");

    auto a = analyze_design("gcd.yak");
    c.require(a.ok() && a.diagnostics.empty(), "analysis not clean");
    if (!c.ok) return;
    Simulator sim(a);
    auto r = sim.run(Feeds{{"a", {tok({{"a", 12}})}}, {"b", {tok({{"b", 8}})}}}, 500);
    c.require(r.status == SimStatus::Quiescent, "12/8 did not quiesce within 500 steps");
    c.require(r.outputs["o"] == std::vector<Token>{tok({{"a", 4}, {"b", 4}})}, "12/8 output is not {a:4, b:4}");
    c.require(r.diagnostics.empty(), "12/8 run produced diagnostics");

    int mismatches = 0;
    for (std::uint64_t x = 1; x <= 20; ++x)
        for (std::uint64_t y = 1; y <= 20; ++y) {
            auto s = sim.run(Feeds{{"a", {tok({{"a", x}})}}, {"b", {tok({{"b", y}})}}}, 5000);
            auto g = oracle::gcd_by_subtraction(x, y);
            if (s.status != SimStatus::Quiescent || s.outputs["o"] != std::vector<Token>{tok({{"a", g}, {"b", g}})})
                ++mismatches;
        }
    c.require(mismatches == 0, std::to_string(mismatches) + " sweep mismatches");
    auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.require(secs < 5.0, "took " + std::to_string(secs) + " s");
}

void scope_resolution(Check& c) {
    auto a = analyze_design("scope.yak");
    c.require(a.ok(), "scope fixture rejected");
    if (!c.ok) return;
    auto foo = a.graph.find_edge("foo"), bar = a.graph.find_edge("bar");
    c.require(foo && bar, "channels foo/bar missing");
    if (!c.ok) return;
    auto need = oracle::needed(a.graph, oracle::provided(a.graph));
    c.require(a.live.needed[*foo] == std::set<std::string>{"b", "c"}, "needed(foo) != {b, c}");
    c.require(a.live.carry[*bar] == std::set<std::string>{"a", "b"}, "carry(bar) != {a, b}");
    c.require(need[*bar] == a.live.carry[*bar], "carry(bar) disagrees with the oracle");
}

void verilog_naming(Check& c) {
    auto a = analyze_design("passthrough.yak", "foo");
    c.require(a.ok(), "passthrough rejected");
    if (!c.ok) return;
    auto v = emit_design(a, "foo");
    std::string header = v.substr(0, v.find(");") + 2), norm;
    for (char ch : header) {
        if (std::isspace(static_cast<unsigned char>(ch))) {
            if (!norm.empty() && norm.back() != ' ') norm += ' ';
        } else {
            norm += ch;
        }
    }
    // Eight handshake and data ports; the reset input follows them.
    const std::string want = "module foo ( input req_a, output ack_a, input D_a_b, input [7:0] D_a_c, "
                             "output req_d, input ack_d, output D_d_e, output [7:0] D_d_f, input rst_n );";
    c.require(norm == want, "header was: " + norm);
    auto r = check_verilog(emit_cells() + v);
    c.require(r.ok(), "netlist does not check");
}

void ring_breaking(Check& c) {
    auto a = analyze_design("gcd.yak");
    c.require(a.ok(), "gcd rejected");
    if (!c.ok) return;
    auto flat = a.dag.acyclic_graph();
    c.require(oracle::topo(flat).size() == flat.nodes.size(), "broken graph still has a cycle");
    c.require(a.dag.breaks.size() == 2, std::to_string(a.dag.breaks.size()) + " breaks");
    std::set<NodeKind> kinds;
    for (const auto& b : a.dag.breaks) {
        kinds.insert(a.dag.graph.node(b.node).kind);
        auto broken = a.dag.carry_source[static_cast<std::size_t>(b.broken_edge)];
        auto peer = a.dag.carry_source[static_cast<std::size_t>(b.constraint_peer)];
        c.require(a.type(broken) == a.type(peer), "broken edge type differs from its peer");
    }
    c.require(kinds == std::set<NodeKind>{NodeKind::Mux, NodeKind::VirtualMerge}, "breaks are not mux + virtual merge");
}

void deadlock_rule(Check& c) {
    auto strict = analyze_design("join_ring.yak");
    c.require(!strict.ok() && has_code(strict.diagnostics, "E_DEADLOCK_RING"), "no E_DEADLOCK_RING");
    BuildConfig bc;
    bc.input = design_path("join_ring.yak");
    std::ostringstream err;
    c.require(cmd_check(bc, err) == kExitErrors, "check did not fail");
    AnalysisOptions o;
    o.lenient = true;
    auto lenient = analyze_source(read_design("join_ring.yak"), "main", o);
    c.require(lenient.ok(), "lenient analysis failed");
    if (!c.ok) return;
    auto r = Simulator(lenient).run(Feeds{{"x", {tok({{"v", 1}})}}}, 1000);
    c.require(r.status == SimStatus::Deadlock, "simulation did not deadlock");
}

void sdc_ordering(Check& c) {
    auto a = analyze_design("gcd.yak");
    c.require(a.ok(), "gcd rejected");
    if (!c.ok) return;
    auto sdc = emit_sdc(a.graph, "main", {});
    auto f = oracle::check_sdc(sdc);
    c.require(f.errors.empty(), f.errors.empty() ? "" : f.errors[0]);
    std::multiset<std::string> want, got(f.root_pins.begin(), f.root_pins.end());
    for (const auto& n : a.graph.nodes) {
        if (n.kind == NodeKind::Reg) want.insert(n.name + "/en");
        if (n.kind == NodeKind::Mux || n.kind == NodeKind::Demux) want.insert(n.name + "/sel_en");
    }
    c.require(got == want, "root clocks do not match stages and selects");
    auto v = check_verilog(emit_cells() + emit_design(a, "main"));
    c.require(v.ok(), "netlist does not check");
    if (!c.ok) return;
    const auto& m = v.modules.at("main");
    for (const auto& p : f.pins) {
        auto slash = p.find('/');
        auto inst = p.substr(0, slash), pin = slash == std::string::npos ? "" : p.substr(slash + 1);
        bool found = m.instances.count(inst) && cell_ports().count(m.instances.at(inst));
        if (found) {
            const auto& ports = cell_ports().at(m.instances.at(inst));
            found = std::find(ports.begin(), ports.end(), pin) != ports.end();
        }
        c.require(found, "pin " + p + " not in netlist");
    }
    c.require(f.generated > 0, "no generated clocks");
}

void determinism(Check& c) {
    auto d1 = scratch_dir("accept_a"), d2 = scratch_dir("accept_b");
    std::ostringstream err;
    for (const auto& d : {d1, d2}) {
        BuildConfig bc;
        bc.input = design_path("gcd.yak");
        bc.out_dir = d;
        c.require(cmd_build(bc, err) == kExitOk, "build failed");
    }
    for (auto f : {"main.v", "main.sdc", "yak_cells.v"}) {
        auto x = read_file(d1 / f), y = read_file(d2 / f);
        c.require(x && y && *x == *y, std::string(f) + " differs");
    }
}

void properties(Check& c) {
    std::mt19937 rng(2024);
    int graphs = 0;
    while (graphs < 50) {
        oracle::DesignGenOptions o;
        o.max_steps = 10;
        o.rings = o.steering = o.sources = true;
        auto d = oracle::random_design(rng, o);
        auto a = analyze_source(d.source);
        if (!a.ok() || a.graph.nodes.size() > 15) continue;
        ++graphs;
        Feeds feeds;
        for (const auto& [p, sigs] : d.inputs)
            for (int i = std::uniform_int_distribution<int>(0, 4)(rng); i > 0; --i) {
                Token t;
                for (const auto& [s, w] : sigs) t[s] = oracle::mask(rng(), w);
                feeds[p].push_back(t);
            }
        Simulator sim(a);
        auto st = sim.init_state(feeds);
        std::size_t initial = 0;
        for (const auto& ch : st.channels) initial += ch.has_value();
        try {
            for (int k = 0; k < 1000 && sim.step(st); ++k) {
            }
        } catch (const std::exception& e) {
            c.require(false, std::string("capacity violated: ") + e.what());
            return;
        }
        std::uint64_t produced = 0, consumed = 0;
        for (const auto& n : a.graph.nodes) {
            const auto& k = st.counters[static_cast<std::size_t>(n.id)];
            auto [in, out] = Simulator::firing_signature(n);
            c.require(k.consumed == k.fires * static_cast<std::uint64_t>(in) &&
                          k.produced == k.fires * static_cast<std::uint64_t>(out),
                      "firing counters off at " + n.name);
            produced += k.produced;
            consumed += k.consumed;
        }
        std::size_t resident = 0;
        for (const auto& ch : st.channels) resident += ch.has_value();
        c.require(initial + produced - consumed == resident, "token count not conserved");
    }

    std::mt19937 trng(1234);
    int typed = 0;
    for (int i = 0; i < 300; ++i) {
        oracle::DesignGenOptions o;
        o.max_steps = 6;
        o.sources = o.loose = true;
        auto d = oracle::random_design(trng, o);
        auto g = graph_of(d.source);
        if (g.nodes.size() > 12) continue;
        auto a = analyze(g);
        auto v = oracle::brute_force_types(g, 64);
        bool oracle_ok = v.scope_ok && v.solutions == 1;
        c.require(a.ok() == oracle_ok, "acceptance disagrees with brute force:\n" + d.source);
        if (!a.ok() || !oracle_ok) continue;
        ++typed;
        for (std::size_t e = 0; e < g.edges.size(); ++e)
            c.require(a.types[e] == v.types[e], "types disagree with brute force:\n" + d.source);
    }
    c.require(typed > 50, "too few typed samples");
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria = {
        {"gcd end-to-end", gcd_end_to_end},
        {"scope resolution", scope_resolution},
        {"verilog port naming", verilog_naming},
        {"ring breaking on gcd", ring_breaking},
        {"deadlock rule", deadlock_rule},
        {"sdc clock ordering", sdc_ordering},
        {"build determinism", determinism},
        {"simulation and typing properties", properties},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Check c;
        try {
            criteria[i].second(c);
        } catch (const std::exception& e) {
            c.require(false, std::string("exception: ") + e.what());
        }
        std::cout << (c.ok ? "PASS" : "FAIL") << " " << i + 1 << " " << criteria[i].first;
        if (!c.ok) std::cout << ": " << c.why.str();
        std::cout << "\n";
        failures += !c.ok;
    }
    return failures == 0 ? 0 : 1;
}
