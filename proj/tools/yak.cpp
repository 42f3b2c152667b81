#include <CLI11.hpp>

#include <sstream>

#include "yak/yak.hpp"

namespace {

std::set<std::string> split_emit(const std::string& s) {
    std::set<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.insert(item);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Yak dataflow compiler and token-level simulator"};
    app.set_version_flag("--version", yak::kYakVersion);
    app.require_subcommand(1);

    yak::BuildConfig check_cfg;
    auto* check = app.add_subcommand("check", "Parse, elaborate and analyze a design");
    check->add_option("file", check_cfg.input, "Yak source file")->required();
    check->add_option("--top", check_cfg.top, "Top component");

    yak::BuildConfig build_cfg;
    std::string emit = "verilog,sdc";
    auto* build = app.add_subcommand("build", "Emit Verilog, SDC and DOT");
    build->add_option("file", build_cfg.input, "Yak source file")->required();
    build->add_option("--top", build_cfg.top, "Top component");
    build->add_option("-o,--out", build_cfg.out_dir, "Output directory");
    build->add_option("--emit", emit, "Comma-separated subset of verilog,sdc,dot");
    build->add_option("--period", build_cfg.period, "Root clock period in ns");
    build->add_option("--margin", build_cfg.margin, "Min-delay margin factor (>= 1.0)");

    yak::SimConfig sim_cfg;
    auto* sim = app.add_subcommand("sim", "Run the token-level simulator");
    sim->add_option("file", sim_cfg.input, "Yak source file")->required();
    sim->add_option("--top", sim_cfg.top, "Top component");
    sim->add_option("--inputs", sim_cfg.inputs, "Feed file (JSON)")->required();
    sim->add_option("--max-steps", sim_cfg.max_steps, "Step budget");
    sim->add_option("--report", sim_cfg.report, "Write the JSON report here instead of stdout");
    sim->add_flag("--strict-merge", sim_cfg.strict_merge, "Stop on a merge exclusivity violation");
    sim->add_flag("--no-deadlock-check", sim_cfg.lenient, "Simulate designs rejected by the ring check");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : yak::kExitUsage;
    }

    if (*check) return yak::cmd_check(check_cfg);
    if (*build) {
        build_cfg.emit = split_emit(emit);
        return yak::cmd_build(build_cfg);
    }
    return yak::cmd_sim(sim_cfg);
}
