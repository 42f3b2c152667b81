#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "support.hpp"
#include "yak/driver.hpp"

using namespace yak;
namespace fs = std::filesystem;

namespace {

void write(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

BuildConfig build_cfg(const std::string& design, const fs::path& out) {
    BuildConfig c;
    c.input = design_path(design);
    c.out_dir = out;
    return c;
}

SimConfig sim_cfg(const std::string& design, const fs::path& feeds) {
    SimConfig c;
    c.input = design_path(design);
    c.inputs = feeds;
    return c;
}

// Runs the installed binary; returns the exit status.
int run_cli(const std::string& args, const fs::path& out_file) {
    std::string cmd = std::string(YAK_CLI_PATH) + " " + args + " > " + out_file.string() + " 2>&1";
    int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST(Check, ExitCodes) {
    std::ostringstream err;
    EXPECT_EQ(cmd_check(build_cfg("gcd.yak", "."), err), kExitOk);
    EXPECT_TRUE(err.str().empty());
    EXPECT_EQ(cmd_check(build_cfg("join_ring.yak", "."), err), kExitErrors);
    EXPECT_NE(err.str().find("E_DEADLOCK_RING"), std::string::npos);

    std::ostringstream io;
    EXPECT_EQ(cmd_check(build_cfg("no_such_file.yak", "."), io), kExitUsage);
    EXPECT_NE(io.str().find("E_IO"), std::string::npos);
}

TEST(Check, DiagnosticsCarryFileAndPosition) {
    auto dir = scratch_dir("check_pos");
    write(dir / "bad.yak", "chan a;\nchan a;\n");
    BuildConfig c;
    c.input = dir / "bad.yak";
    std::ostringstream err;
    EXPECT_EQ(cmd_check(c, err), kExitErrors);
    EXPECT_NE(err.str().find("bad.yak:2:"), std::string::npos) << err.str();
    EXPECT_NE(err.str().find("E_REDECLARED"), std::string::npos);
}

TEST(Build, WritesRequestedFiles) {
    auto dir = scratch_dir("build_all");
    auto c = build_cfg("gcd.yak", dir);
    c.emit = {"verilog", "sdc", "dot"};
    std::ostringstream err;
    ASSERT_EQ(cmd_build(c, err), kExitOk) << err.str();
    for (auto f : {"main.v", "yak_cells.v", "main.sdc", "main.dot"}) EXPECT_TRUE(fs::exists(dir / f)) << f;
    for (const auto& e : fs::directory_iterator(dir)) EXPECT_NE(e.path().extension(), ".tmp");
    auto v = *read_file(dir / "main.v");
    EXPECT_EQ(v.rfind("module main (", 0), 0u);
    auto sdc = *read_file(dir / "main.sdc");
    EXPECT_EQ(sdc.rfind("# Generated by yak", 0), 0u);
    auto dot = *read_file(dir / "main.dot");
    EXPECT_NE(dot.find("loop_val : {a:8, b:8}"), std::string::npos);
}

TEST(Build, DotOnly) {
    auto dir = scratch_dir("build_dot");
    auto c = build_cfg("pipeline.yak", dir);
    c.emit = {"dot"};
    std::ostringstream err;
    ASSERT_EQ(cmd_build(c, err), kExitOk);
    EXPECT_TRUE(fs::exists(dir / "main.dot"));
    EXPECT_FALSE(fs::exists(dir / "main.v"));
    EXPECT_FALSE(fs::exists(dir / "main.sdc"));
}

TEST(Build, UsageErrors) {
    auto dir = scratch_dir("build_usage");
    std::ostringstream err;
    auto c = build_cfg("gcd.yak", dir);
    c.margin = 0.5;
    EXPECT_EQ(cmd_build(c, err), kExitUsage);
    c = build_cfg("gcd.yak", dir);
    c.period = 0;
    EXPECT_EQ(cmd_build(c, err), kExitUsage);
    c = build_cfg("gcd.yak", dir);
    c.emit = {"bitstream"};
    EXPECT_EQ(cmd_build(c, err), kExitUsage);
    c = build_cfg("gcd.yak", dir);
    c.emit = {};
    EXPECT_EQ(cmd_build(c, err), kExitUsage);
    EXPECT_TRUE(fs::is_empty(dir));
}

TEST(Build, CompileErrorWritesNothing) {
    auto dir = scratch_dir("build_err");
    std::ostringstream err;
    EXPECT_EQ(cmd_build(build_cfg("join_ring.yak", dir), err), kExitErrors);
    EXPECT_TRUE(fs::is_empty(dir));
}

TEST(Build, TopSelectsComponent) {
    auto dir = scratch_dir("build_top");
    auto c = build_cfg("passthrough.yak", dir);
    c.top = "foo";
    std::ostringstream err;
    ASSERT_EQ(cmd_build(c, err), kExitOk) << err.str();
    EXPECT_TRUE(fs::exists(dir / "foo.v"));
    c.top = "absent";
    EXPECT_EQ(cmd_build(c, err), kExitErrors);
    EXPECT_NE(err.str().find("E_NO_TOP"), std::string::npos);
}

TEST(Feeds, Parsing) {
    auto f = parse_feeds(R"({"inputs": {"a": [{"a": 12}], "b": [{"b": 8}, {"b": 3}]}})");
    ASSERT_EQ(f.size(), 2u);
    EXPECT_EQ(f["b"].size(), 2u);
    EXPECT_EQ(f["b"][1]["b"], 3u);
    auto bare = parse_feeds(R"({"a": [{"a": 12}]})");
    EXPECT_EQ(bare["a"][0]["a"], 12u);
    EXPECT_EQ(error_codes([] { parse_feeds("{"); }), std::vector<std::string>{"E_FEED"});
    EXPECT_EQ(error_codes([] { parse_feeds("[]"); }), std::vector<std::string>{"E_FEED"});
    EXPECT_EQ(error_codes([] { parse_feeds(R"({"a": [{"a": -1}]})"); }), std::vector<std::string>{"E_FEED"});
    EXPECT_EQ(error_codes([] { parse_feeds(R"({"a": [{"a": 1.5}]})"); }), std::vector<std::string>{"E_FEED"});
    EXPECT_EQ(error_codes([] { parse_feeds(R"({"a": {"a": 1}})"); }), std::vector<std::string>{"E_FEED"});
}

TEST(Sim, GcdReport) {
    auto dir = scratch_dir("sim_gcd");
    write(dir / "in.json", R"({"inputs": {"a": [{"a": 12}], "b": [{"b": 8}]}})");
    auto c = sim_cfg("gcd.yak", dir / "in.json");
    std::ostringstream out, err;
    ASSERT_EQ(cmd_sim(c, out, err), kExitOk) << err.str();
    auto j = nlohmann::json::parse(out.str());
    EXPECT_EQ(j["status"], "quiescent");
    EXPECT_EQ(j["outputs"]["o"], nlohmann::json::parse(R"([{"a": 4, "b": 4}])"));
    EXPECT_TRUE(j["diagnostics"].empty());
    EXPECT_GT(j["steps"].get<int>(), 0);

    c.report = dir / "report.json";
    std::ostringstream out2;
    ASSERT_EQ(cmd_sim(c, out2, err), kExitOk);
    EXPECT_TRUE(out2.str().empty());
    EXPECT_EQ(nlohmann::json::parse(*read_file(dir / "report.json")), j);
}

TEST(Sim, StatusExitCodes) {
    auto dir = scratch_dir("sim_status");
    std::ostringstream out, err;
    write(dir / "empty.json", R"({"inputs": {}})");
    EXPECT_EQ(cmd_sim(sim_cfg("gcd.yak", dir / "empty.json"), out, err), kExitOk);

    write(dir / "x.json", R"({"inputs": {"x": [{"v": 1}]}})");
    auto ring = sim_cfg("join_ring.yak", dir / "x.json");
    EXPECT_EQ(cmd_sim(ring, out, err), kExitErrors);
    ring.lenient = true;
    EXPECT_EQ(cmd_sim(ring, out, err), kExitDeadlock);

    auto src = dir / "src.yak";
    write(src, "source(sig k : logic = 1) -> output(o, sig k : logic);\n");
    SimConfig t;
    t.input = src;
    t.inputs = dir / "empty.json";
    t.max_steps = 20;
    EXPECT_EQ(cmd_sim(t, out, err), kExitTimeout);

    auto merge = dir / "merge.yak";
    write(merge, "input(i, sig x : logic) -> fork() -> [chan a, chan b]; [a, b] -> merge() -> output(o, sig x : logic);\n");
    write(dir / "i.json", R"({"inputs": {"i": [{"x": 1}]}})");
    SimConfig m;
    m.input = merge;
    m.inputs = dir / "i.json";
    m.strict_merge = true;
    std::ostringstream mo;
    EXPECT_EQ(cmd_sim(m, mo, err), kExitDeadlock);
    auto j = nlohmann::json::parse(mo.str());
    EXPECT_EQ(j["diagnostics"][0]["code"], "E_MERGE_EXCLUSIVITY");
    EXPECT_EQ(j["diagnostics"][0]["severity"], "error");
}

TEST(Sim, InputErrors) {
    auto dir = scratch_dir("sim_input");
    std::ostringstream out, err;
    write(dir / "bad.json", "not json");
    EXPECT_EQ(cmd_sim(sim_cfg("gcd.yak", dir / "bad.json"), out, err), kExitUsage);
    EXPECT_EQ(cmd_sim(sim_cfg("gcd.yak", dir / "missing.json"), out, err), kExitUsage);
    write(dir / "wide.json", R"({"inputs": {"a": [{"a": 256}], "b": [{"b": 1}]}})");
    std::ostringstream e2;
    EXPECT_EQ(cmd_sim(sim_cfg("gcd.yak", dir / "wide.json"), out, e2), kExitUsage);
    EXPECT_NE(e2.str().find("E_FEED_TYPE"), std::string::npos);
    write(dir / "bb.json", R"({})");
    EXPECT_EQ(cmd_sim(sim_cfg("blackbox.yak", dir / "bb.json"), out, err), kExitErrors);
}

TEST(Binary, EndToEnd) {
    auto dir = scratch_dir("binary");
    auto log = dir / "log.txt";
    auto gcd = design_path("gcd.yak");
    EXPECT_EQ(run_cli("--version", log), 0);
    EXPECT_NE(read_file(log)->find(kYakVersion), std::string::npos);
    EXPECT_EQ(run_cli("check " + gcd, log), 0);
    EXPECT_EQ(run_cli("check " + design_path("join_ring.yak"), log), 1);
    EXPECT_EQ(run_cli("build " + gcd + " -o " + (dir / "out").string() + " --emit verilog,sdc", log), 0);
    EXPECT_TRUE(fs::exists(dir / "out" / "main.v"));
    EXPECT_TRUE(fs::exists(dir / "out" / "main.sdc"));
    EXPECT_EQ(run_cli("build " + gcd + " --margin 0.5 -o " + (dir / "m").string(), log), 2);
    EXPECT_EQ(run_cli("frobnicate", log), 2);
    EXPECT_EQ(run_cli("sim " + gcd, log), 2);  // --inputs is required

    write(dir / "in.json", R"({"inputs": {"a": [{"a": 21}], "b": [{"b": 6}]}})");
    EXPECT_EQ(run_cli("sim " + gcd + " --inputs " + (dir / "in.json").string() + " --report " +
                          (dir / "r.json").string(),
                      log),
              0);
    auto j = nlohmann::json::parse(*read_file(dir / "r.json"));
    EXPECT_EQ(j["outputs"]["o"][0]["a"], 3);
    EXPECT_EQ(run_cli("sim " + design_path("join_ring.yak") + " --no-deadlock-check --inputs " +
                          (dir / "in.json").string(),
                      log),
              2);  // the ring has no port 'a'
    write(dir / "x.json", R"({"inputs": {"x": [{"v": 1}]}})");
    EXPECT_EQ(run_cli("sim " + design_path("join_ring.yak") + " --no-deadlock-check --inputs " +
                          (dir / "x.json").string(),
                      log),
              3);
}
