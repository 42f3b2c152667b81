#ifndef YAK_DRIVER_HPP
#define YAK_DRIVER_HPP

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "yak/analysis.hpp"
#include "yak/dot.hpp"
#include "yak/elaborate.hpp"
#include "yak/parser.hpp"
#include "yak/sdc.hpp"
#include "yak/simulator.hpp"
#include "yak/verilog.hpp"

namespace yak {

namespace fs = std::filesystem;

/// Process exit codes.
enum ExitCode : int {
    kExitOk = 0,
    kExitErrors = 1,
    kExitUsage = 2,
    kExitDeadlock = 3,
    kExitTimeout = 4,
};

struct BuildConfig {
    fs::path input;
    std::string top = "main";
    fs::path out_dir = ".";
    std::set<std::string> emit = {"verilog", "sdc"};
    double period = 1.0;
    double margin = 1.0;
    bool strict_merge = false;
};

struct SimConfig {
    fs::path input;
    std::string top = "main";
    fs::path inputs;
    std::size_t max_steps = 10000;
    std::optional<fs::path> report;
    bool strict_merge = false;
    /// Skip the deadlock check so that rejected designs can still be run.
    bool lenient = false;
};

/// Returns a usage message when the configuration is invalid.
inline std::optional<std::string> validate_config(const BuildConfig& c) {
    if (!(c.period > 0)) return "--period must be positive";
    if (!(c.margin >= 1.0)) return "--margin must be at least 1.0";
    if (c.emit.empty()) return "--emit must name at least one of verilog, sdc, dot";
    for (const auto& e : c.emit)
        if (e != "verilog" && e != "sdc" && e != "dot") return "unknown --emit target '" + e + "'";
    return std::nullopt;
}

inline bool color_enabled() {
    const char* v = std::getenv("YAK_COLOR");
    return v && std::string(v) == "1";
}

struct CompileResult {
    std::optional<Analysis> analysis;
    Diagnostics diagnostics;

    bool ok() const { return analysis && !has_errors(diagnostics); }
};

/// Frontend, elaboration and analysis in one call. Never throws CompileError.
inline CompileResult compile_source(std::string_view src, const std::string& top, AnalysisOptions opts = {}) {
    CompileResult r;
    try {
        auto prog = parse_program(src);
        auto g = elaborate(prog, top);
        Analysis a = analyze(std::move(g), opts);
        r.diagnostics = a.diagnostics;
        r.analysis = std::move(a);
    } catch (const CompileError& e) {
        r.diagnostics = e.diagnostics();
    }
    return r;
}

inline std::optional<std::string> read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) return std::nullopt;
    return ss.str();
}

/// Writes to a sibling temp file, then renames over the destination.
inline bool write_file_atomic(const fs::path& p, const std::string& text) {
    fs::path tmp = p;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) return false;
        out << text;
        out.flush();
        if (!out) {
            std::error_code ec;
            fs::remove(tmp, ec);
            return false;
        }
    }
    std::error_code ec;
    fs::rename(tmp, p, ec);
    if (ec) {
        fs::remove(tmp, ec);
        return false;
    }
    return true;
}

inline void print_diagnostics(const Diagnostics& ds, const std::string& file, std::ostream& err) {
    bool color = color_enabled();
    for (const auto& d : ds) err << format_diagnostic(d, file, color) << "\n";
}

inline void print_io_error(const std::string& what, std::ostream& err) {
    print_diagnostics({Diagnostic::error("E_IO", what)}, "yak", err);
}

/// Parses a feed file: `{"inputs": {"port": [{"sig": value, ...}, ...], ...}}`.
/// The bare port map without the "inputs" wrapper is accepted too.
inline Feeds parse_feeds(const std::string& text) {
    auto bad = [](const std::string& m) { return CompileError(Diagnostic::error("E_FEED", m)); };
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw bad(std::string("malformed feed file: ") + e.what());
    }
    if (!j.is_object()) throw bad("feed file must be a JSON object");
    if (j.size() == 1 && j.contains("inputs") && j["inputs"].is_object()) j = nlohmann::json(j["inputs"]);
    Feeds feeds;
    for (const auto& [port, list] : j.items()) {
        if (!list.is_array()) throw bad("feed for port '" + port + "' must be an array");
        auto& tokens = feeds[port];
        for (const auto& tok : list) {
            if (!tok.is_object()) throw bad("token for port '" + port + "' must be an object");
            Token t;
            for (const auto& [sig, v] : tok.items()) {
                if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
                    throw bad("value of '" + sig + "' on port '" + port + "' must be a non-negative integer");
                t[sig] = v.get<std::uint64_t>();
            }
            tokens.push_back(std::move(t));
        }
    }
    return feeds;
}

inline nlohmann::json report_json(const SimReport& r) {
    nlohmann::json j;
    j["status"] = sim_status_name(r.status);
    j["steps"] = r.steps;
    j["outputs"] = nlohmann::json::object();
    for (const auto& [port, toks] : r.outputs) {
        auto arr = nlohmann::json::array();
        for (const auto& t : toks) {
            nlohmann::json o = nlohmann::json::object();
            for (const auto& [s, v] : t) o[s] = v;
            arr.push_back(o);
        }
        j["outputs"][port] = arr;
    }
    j["diagnostics"] = nlohmann::json::array();
    for (const auto& d : r.diagnostics)
        j["diagnostics"].push_back({{"severity", d.severity == Severity::Error ? "error" : "warning"},
                                    {"code", d.code},
                                    {"message", d.message}});
    return j;
}

inline int cmd_check(const BuildConfig& c, std::ostream& err = std::cerr) {
    auto src = read_file(c.input);
    if (!src) {
        print_io_error("cannot read '" + c.input.string() + "'", err);
        return kExitUsage;
    }
    auto r = compile_source(*src, c.top);
    print_diagnostics(r.diagnostics, c.input.string(), err);
    return r.ok() ? kExitOk : kExitErrors;
}

inline int cmd_build(const BuildConfig& c, std::ostream& err = std::cerr) {
    if (auto u = validate_config(c)) {
        err << "yak: " << *u << "\n";
        return kExitUsage;
    }
    auto src = read_file(c.input);
    if (!src) {
        print_io_error("cannot read '" + c.input.string() + "'", err);
        return kExitUsage;
    }
    auto r = compile_source(*src, c.top);
    print_diagnostics(r.diagnostics, c.input.string(), err);
    if (!r.ok()) return kExitErrors;
    const Analysis& a = *r.analysis;

    std::vector<std::pair<fs::path, std::string>> files;
    try {
        if (c.emit.count("verilog")) {
            files.emplace_back(c.out_dir / (c.top + ".v"), emit_design(a, c.top));
            files.emplace_back(c.out_dir / "yak_cells.v", emit_cells());
        }
        if (c.emit.count("sdc"))
            files.emplace_back(c.out_dir / (c.top + ".sdc"), emit_sdc(a.graph, c.top, {c.period, c.margin}));
        if (c.emit.count("dot")) files.emplace_back(c.out_dir / (c.top + ".dot"), emit_dot(a));
    } catch (const CompileError& e) {
        print_diagnostics(e.diagnostics(), c.input.string(), err);
        return kExitErrors;
    }

    std::error_code ec;
    fs::create_directories(c.out_dir, ec);
    for (const auto& [path, text] : files) {
        if (!write_file_atomic(path, text)) {
            print_io_error("cannot write '" + path.string() + "'", err);
            return kExitUsage;
        }
    }
    return kExitOk;
}

inline int cmd_sim(const SimConfig& c, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    auto src = read_file(c.input);
    if (!src) {
        print_io_error("cannot read '" + c.input.string() + "'", err);
        return kExitUsage;
    }
    auto feed_text = read_file(c.inputs);
    if (!feed_text) {
        print_io_error("cannot read '" + c.inputs.string() + "'", err);
        return kExitUsage;
    }
    Feeds feeds;
    try {
        feeds = parse_feeds(*feed_text);
    } catch (const CompileError& e) {
        print_diagnostics(e.diagnostics(), c.inputs.string(), err);
        return kExitUsage;
    }

    AnalysisOptions opts;
    opts.lenient = c.lenient;
    auto r = compile_source(*src, c.top, opts);
    print_diagnostics(r.diagnostics, c.input.string(), err);
    if (!r.ok()) return kExitErrors;

    SimReport rep;
    try {
        Simulator sim(*r.analysis, SimOptions{c.strict_merge});
        rep = sim.run(sim.init_state(feeds), c.max_steps);
    } catch (const CompileError& e) {
        print_diagnostics(e.diagnostics(), c.inputs.string(), err);
        return has_code(e.diagnostics(), "E_SIM_UNSUPPORTED") ? kExitErrors : kExitUsage;
    }
    print_diagnostics(rep.diagnostics, c.input.string(), err);

    std::string text = report_json(rep).dump(2) + "\n";
    if (c.report) {
        if (!write_file_atomic(*c.report, text)) {
            print_io_error("cannot write '" + c.report->string() + "'", err);
            return kExitUsage;
        }
    } else {
        out << text;
    }
    switch (rep.status) {
        case SimStatus::Quiescent: return kExitOk;
        case SimStatus::Deadlock: return kExitDeadlock;
        case SimStatus::Timeout: return kExitTimeout;
    }
    return kExitErrors;
}

}  // namespace yak

#endif  // YAK_DRIVER_HPP
