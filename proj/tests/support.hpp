#ifndef YAK_TEST_SUPPORT_HPP
#define YAK_TEST_SUPPORT_HPP

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "yak/analysis.hpp"
#include "yak/elaborate.hpp"
#include "yak/parser.hpp"

inline std::string read_design(const std::string& name) {
    std::ifstream in(std::string(YAK_DESIGNS_DIR) + "/" + name);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string design_path(const std::string& name) { return std::string(YAK_DESIGNS_DIR) + "/" + name; }

inline yak::TokenFlowGraph graph_of(const std::string& src, const std::string& top = "main") {
    return yak::elaborate(yak::parse_program(src), top);
}

inline yak::Analysis analyze_source(const std::string& src, const std::string& top = "main",
                                    yak::AnalysisOptions opts = {}) {
    return yak::analyze(graph_of(src, top), opts);
}

inline yak::Analysis analyze_design(const std::string& name, const std::string& top = "main") {
    return analyze_source(read_design(name), top);
}

/// Error codes carried by a CompileError thrown from `fn`, empty if none.
template <class F>
std::vector<std::string> error_codes(F&& fn) {
    try {
        fn();
    } catch (const yak::CompileError& e) {
        std::vector<std::string> out;
        for (const auto& d : e.diagnostics()) out.push_back(d.code);
        return out;
    }
    return {};
}

inline std::vector<std::string> codes_of(const yak::Diagnostics& ds) {
    std::vector<std::string> out;
    for (const auto& d : ds) out.push_back(d.code);
    return out;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& tag) {
    auto p = std::filesystem::temp_directory_path() / ("yak_test_" + tag);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

#endif
