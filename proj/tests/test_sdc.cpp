#include <gtest/gtest.h>

#include <filesystem>
#include <random>
#include <regex>

#include "oracles.hpp"
#include "support.hpp"
#include "yak/sdc.hpp"
#include "yak/verilog.hpp"
#include "yak/verilog_check.hpp"

using namespace yak;

namespace {

std::string sdc_of(const std::string& src, SdcConfig cfg = {}) {
    auto a = analyze_source(src);
    EXPECT_TRUE(a.ok()) << src;
    return emit_sdc(a.graph, "main", cfg);
}

std::vector<std::string> statements(const std::string& sdc) {
    std::vector<std::string> out;
    std::istringstream in(sdc);
    std::string line;
    while (std::getline(in, line))
        if (!line.empty() && line[0] != '#') out.push_back(line);
    return out;
}

std::size_t count_prefix(const std::vector<std::string>& lines, const std::string& p) {
    return static_cast<std::size_t>(
        std::count_if(lines.begin(), lines.end(), [&](const std::string& l) { return l.rfind(p, 0) == 0; }));
}

// Generated clock → (source pin, master, target pin); root clock → target pin.
struct ClockLine {
    std::string source, master, pin;
};

std::map<std::string, ClockLine> clock_lines(const std::string& sdc) {
    static const std::regex gen(
        R"(^create_generated_clock -name (\S+) -source \[get_pins (\S+)\] -master_clock (\S+) -add -combinational \[get_pins (\S+)\]$)");
    static const std::regex root(R"(^create_clock -name (\S+) -period [0-9.]+ \[get_pins (\S+)\]$)");
    std::map<std::string, ClockLine> out;
    for (const auto& l : statements(sdc)) {
        std::smatch m;
        if (std::regex_match(l, m, gen))
            out[m[1]] = {m[2], m[3], m[4]};
        else if (std::regex_match(l, m, root))
            out[m[1]] = {"", "", m[2]};
    }
    return out;
}

std::vector<std::string> all_designs() {
    std::vector<std::string> out;
    for (const auto& e : std::filesystem::directory_iterator(YAK_DESIGNS_DIR)) {
        auto n = e.path().filename().string();
        if (n != "join_ring.yak") out.push_back(n);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::string top_of(const AstProgram& p) { return p.find("main") ? "main" : p.components.back().name; }

// Checks ordering, clock chains, completeness and pin existence for one design.
void check_design(const std::string& src, const std::string& what, SdcConfig cfg = {}) {
    auto prog = parse_program(src);
    auto top = top_of(prog);
    auto a = analyze(elaborate(prog, top));
    ASSERT_TRUE(a.ok()) << what;
    auto sdc = emit_sdc(a.graph, top, cfg);

    auto facts = oracle::check_sdc(sdc);
    EXPECT_TRUE(facts.errors.empty()) << what << ": " << facts.errors[0];

    // Each generated clock is sourced at its master's pin.
    auto clocks = clock_lines(sdc);
    EXPECT_EQ(clocks.size(), facts.clock_line.size()) << what;
    for (const auto& [name, c] : clocks) {
        if (c.master.empty()) continue;
        ASSERT_TRUE(clocks.count(c.master)) << what << " " << name;
        EXPECT_EQ(c.source, clocks.at(c.master).pin) << what << " " << name;
    }

    // One root clock per stage and per select latch.
    std::multiset<std::string> want_roots, got_roots(facts.root_pins.begin(), facts.root_pins.end());
    for (const auto& n : a.graph.nodes) {
        if (n.kind == NodeKind::Reg) want_roots.insert(n.name + "/en");
        if (n.kind == NodeKind::Mux || n.kind == NodeKind::Demux) want_roots.insert(n.name + "/sel_en");
    }
    EXPECT_EQ(got_roots, want_roots) << what;

    // Every pin names a controller instance and one of its template ports.
    auto v = check_verilog(emit_cells() + emit_design(a, top), {"foo"});
    ASSERT_TRUE(v.ok()) << what;
    const auto& m = v.modules.at(top);
    for (const auto& p : facts.pins) {
        auto slash = p.find('/');
        ASSERT_NE(slash, std::string::npos) << p;
        auto inst = p.substr(0, slash), pin = p.substr(slash + 1);
        ASSERT_TRUE(m.instances.count(inst)) << what << " " << p;
        const auto& mod = m.instances.at(inst);
        ASSERT_TRUE(cell_ports().count(mod)) << what << " " << p;
        const auto& ports = cell_ports().at(mod);
        EXPECT_NE(std::find(ports.begin(), ports.end(), pin), ports.end()) << what << " " << p;
    }

    for (double d : facts.max_delays) EXPECT_DOUBLE_EQ(d, std::stod(detail::ns(cfg.period)));
    for (double d : facts.min_delays) EXPECT_DOUBLE_EQ(d, std::stod(detail::ns(cfg.margin * cfg.period)));
}

}  // namespace

TEST(Sdc, DesignsAreWellFormed) {
    for (const auto& d : all_designs()) check_design(read_design(d), d);
}

TEST(Sdc, RandomDesignsAreWellFormed) {
    std::mt19937 rng(404);
    for (int i = 0; i < 80; ++i) {
        oracle::DesignGenOptions o;
        o.max_steps = 10;
        o.rings = o.steering = o.sources = true;
        auto d = oracle::random_design(rng, o);
        check_design(d.source, d.source, {0.5 + (i % 4), 1.0 + 0.25 * (i % 3)});
    }
}

TEST(Sdc, EmptyDesignIsHeaderOnly) {
    auto a = analyze_source("def nop[]()[]{}", "nop");
    auto sdc = emit_sdc(a.graph, "nop", {});
    EXPECT_TRUE(statements(sdc).empty());
    EXPECT_EQ(sdc, "# Generated by yak " + std::string(kYakVersion) +
                       "\n# top: nop\n# period: 1.000 ns\n# margin: 1.000\n");
}

TEST(Sdc, MarginScalesMinDelay) {
    auto src = read_design("pipeline.yak");
    auto f = oracle::check_sdc(sdc_of(src, {1.0, 1.2}));
    ASSERT_FALSE(f.min_delays.empty());
    for (double d : f.min_delays) EXPECT_DOUBLE_EQ(d, 1.2);
    auto text = sdc_of(src, {2.5, 1.2});
    EXPECT_NE(text.find("set_min_delay 3.000 "), std::string::npos);
    EXPECT_NE(text.find("set_max_delay 2.500 "), std::string::npos);
    EXPECT_NE(text.find("create_clock -name clk_reg_1 -period 2.500 "), std::string::npos);
}

TEST(Sdc, TwoStagePipeline) {
    auto lines = statements(sdc_of(read_design("pipeline.yak")));
    std::vector<std::string> want = {
        "create_clock -name clk_reg_1 -period 1.000 [get_pins reg_1/en]",
        "create_generated_clock -name clk_reg_1_su_0 -source [get_pins reg_1/en] -master_clock clk_reg_1 -add "
        "-combinational [get_pins reg_1/o0_req]",
        "create_generated_clock -name clk_reg_1_su_1 -source [get_pins reg_1/o0_req] -master_clock clk_reg_1_su_0 "
        "-add -combinational [get_pins reg_3/i0_req]",
        "create_generated_clock -name clk_reg_1_ho_0 -source [get_pins reg_1/en] -master_clock clk_reg_1 -add "
        "-combinational [get_pins reg_1/i0_ack]",
        "set_max_delay 1.000 -from [get_clocks clk_reg_1] -to [get_clocks clk_reg_1_su_1]",
        "create_clock -name clk_reg_3 -period 1.000 [get_pins reg_3/en]",
        "create_generated_clock -name clk_reg_3_su_0 -source [get_pins reg_3/en] -master_clock clk_reg_3 -add "
        "-combinational [get_pins reg_3/o0_req]",
        "create_generated_clock -name clk_reg_3_ho_0 -source [get_pins reg_3/en] -master_clock clk_reg_3 -add "
        "-combinational [get_pins reg_3/i0_ack]",
        "create_generated_clock -name clk_reg_3_ho_1 -source [get_pins reg_3/i0_ack] -master_clock clk_reg_3_ho_0 "
        "-add -combinational [get_pins reg_1/o0_ack]",
        "set_min_delay 1.000 -from [get_clocks clk_reg_3_ho_1] -to [get_clocks clk_reg_3]",
    };
    EXPECT_EQ(lines, want);
}

TEST(Sdc, ForkSharesPrefix) {
    auto a = analyze_design("branch.yak");
    auto dags = extract_stage_dags(a.graph);
    ASSERT_EQ(dags.size(), 3u);
    NodeId first = kNone;
    for (const auto& n : a.graph.nodes)
        if (n.kind == NodeKind::Reg && first == kNone) first = n.id;
    const auto& d = dags.at(first);
    EXPECT_EQ(d.leaves.size(), 2u);
    EXPECT_TRUE(d.roots.empty());
    auto clocks = generate_clocks(d, a.graph);
    std::size_t on_stage_req = 0, setup_ends = 0;
    for (const auto& c : clocks) {
        if (c.pin == a.graph.node(first).name + "/o0_req") ++on_stage_req;
        if (c.purpose == ClockPurpose::Setup && c.endpoint != kNone) ++setup_ends;
    }
    EXPECT_EQ(on_stage_req, 1u);  // the common prefix is clocked once
    EXPECT_EQ(setup_ends, 2u);
    auto lines = statements(emit_sdc(a.graph, "main", {}));
    EXPECT_EQ(count_prefix(lines, "set_max_delay 1.000 -from [get_clocks clk_reg_1]"), 2u);
    EXPECT_EQ(count_prefix(lines, "set_min_delay"), 2u);
}

TEST(Sdc, IsolatedStageHasNoPathConstraints) {
    auto lines = statements(sdc_of("input(i, sig x : logic) -> reg() -> output(o, sig x : logic);"));
    EXPECT_EQ(count_prefix(lines, "create_clock"), 1u);
    EXPECT_EQ(count_prefix(lines, "create_generated_clock"), 2u);
    EXPECT_EQ(count_prefix(lines, "set_"), 0u);
}

TEST(Sdc, BlackboxEndsWalks) {
    auto a = analyze_design("blackbox.yak");
    auto sdc = emit_sdc(a.graph, "main", {});
    auto f = oracle::check_sdc(sdc);
    EXPECT_TRUE(f.errors.empty());
    EXPECT_TRUE(f.max_delays.empty());
    EXPECT_TRUE(f.min_delays.empty());
    for (const auto& p : f.pins) EXPECT_EQ(p.find("blackbox"), std::string::npos) << p;
    for (const auto& [id, d] : extract_stage_dags(a.graph)) {
        EXPECT_TRUE(d.roots.empty());
        EXPECT_TRUE(d.leaves.empty());
    }
}

TEST(Sdc, SelectDags) {
    EXPECT_TRUE(extract_select_dags(analyze_design("pipeline.yak").graph).empty());
    auto a = analyze_design("gcd.yak");
    auto sel = extract_select_dags(a.graph);
    EXPECT_EQ(sel.size(), 3u);
    for (const auto& [id, d] : sel) {
        EXPECT_TRUE(d.select_root);
        auto k = a.graph.node(id).kind;
        EXPECT_TRUE(k == NodeKind::Mux || k == NodeKind::Demux);
        auto clocks = generate_clocks(d, a.graph);
        ASSERT_FALSE(clocks.empty());
        EXPECT_EQ(clocks[0].pin, a.graph.node(id).name + "/sel_en");
        bool s_ack = false;
        for (const auto& c : clocks) s_ack = s_ack || c.pin == a.graph.node(id).name + "/s_ack";
        EXPECT_TRUE(s_ack);
    }
    std::size_t regs = a.graph.count(NodeKind::Reg);
    EXPECT_EQ(extract_stage_dags(a.graph).size(), regs);
}

TEST(Sdc, ClockOrderWithinDag) {
    auto a = analyze_design("gcd.yak");
    for (const auto& [id, d] : extract_stage_dags(a.graph)) {
        auto clocks = generate_clocks(d, a.graph);
        ASSERT_FALSE(clocks.empty());
        EXPECT_EQ(clocks[0].purpose, ClockPurpose::Root);
        bool hold_seen = false;
        for (std::size_t i = 1; i < clocks.size(); ++i) {
            EXPECT_NE(clocks[i].purpose, ClockPurpose::Root);
            if (clocks[i].purpose == ClockPurpose::Hold) hold_seen = true;
            if (hold_seen) EXPECT_EQ(clocks[i].purpose, ClockPurpose::Hold);
        }
        std::set<std::string> pins;
        for (const auto& c : clocks) EXPECT_TRUE(pins.insert(std::to_string(static_cast<int>(c.purpose)) + c.pin).second);
    }
}

TEST(Sdc, Deterministic) {
    for (const auto& d : all_designs()) {
        auto prog = parse_program(read_design(d));
        auto top = top_of(prog);
        auto a = analyze(elaborate(prog, top)), b = analyze(elaborate(prog, top));
        EXPECT_EQ(emit_sdc(a.graph, top, {}), emit_sdc(b.graph, top, {})) << d;
    }
}
