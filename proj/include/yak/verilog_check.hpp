#ifndef YAK_VERILOG_CHECK_HPP
#define YAK_VERILOG_CHECK_HPP

#include <cctype>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace yak {

/// What the checker learned about one module.
struct VerilogModuleInfo {
    std::string name;
    std::vector<std::string> ports;
    std::set<std::string> symbols;
    /// Instance name → instantiated module.
    std::map<std::string, std::string> instances;
    /// Instance name → connected pin names, in order.
    std::map<std::string, std::vector<std::string>> instance_pins;
};

struct VerilogCheckResult {
    std::vector<std::string> errors;
    std::map<std::string, VerilogModuleInfo> modules;

    bool ok() const { return errors.empty(); }
};

namespace detail {

struct VTok {
    std::string text;
    int line = 0;
    bool ident = false;
};

inline std::vector<VTok> verilog_tokens(const std::string& s) {
    std::vector<VTok> out;
    int line = 1;
    std::size_t i = 0;
    while (i < s.size()) {
        char c = s[i];
        if (c == '\n') {
            ++line;
            ++i;
        } else if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
        } else if (c == '/' && i + 1 < s.size() && s[i + 1] == '/') {
            while (i < s.size() && s[i] != '\n') ++i;
        } else if (c == '/' && i + 1 < s.size() && s[i + 1] == '*') {
            i += 2;
            while (i + 1 < s.size() && !(s[i] == '*' && s[i + 1] == '/')) {
                if (s[i] == '\n') ++line;
                ++i;
            }
            i += 2;
        } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_' || s[j] == '$')) ++j;
            out.push_back({s.substr(i, j - i), line, true});
            i = j;
        } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '\'') {
            std::size_t j = i;
            while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '\'' || s[j] == '_')) ++j;
            out.push_back({s.substr(i, j - i), line, false});
            i = j;
        } else {
            out.push_back({std::string(1, c), line, false});
            ++i;
        }
    }
    return out;
}

inline bool verilog_keyword(const std::string& t) {
    static const std::set<std::string> kw = {
        "module", "endmodule", "input", "output", "inout", "wire", "reg",      "assign",     "always", "initial",
        "begin",  "end",       "if",    "else",   "posedge", "negedge", "or", "parameter", "localparam"};
    return kw.count(t) > 0;
}

class VerilogChecker {
public:
    explicit VerilogChecker(const std::string& text) : t_(verilog_tokens(text)) {}

    VerilogCheckResult run(const std::set<std::string>& externals) {
        while (i_ < t_.size()) {
            if (!accept("module")) {
                error("expected 'module', found '" + peek() + "'");
                break;
            }
            if (!module()) break;
        }
        for (const auto& [name, m] : r_.modules) {
            for (const auto& [inst, mod] : m.instances) {
                auto it = r_.modules.find(mod);
                if (it == r_.modules.end()) {
                    if (!externals.count(mod))
                        r_.errors.push_back(name + ": instance " + inst + " of unknown module " + mod);
                    continue;
                }
                const auto& pins = m.instance_pins.at(inst);
                if (pins.size() != it->second.ports.size())
                    r_.errors.push_back(name + ": instance " + inst + " connects " + std::to_string(pins.size()) +
                                        " of " + std::to_string(it->second.ports.size()) + " ports of " + mod);
                std::set<std::string> seen;
                for (const auto& p : pins) {
                    if (!seen.insert(p).second) r_.errors.push_back(name + ": instance " + inst + " repeats pin " + p);
                    bool found = false;
                    for (const auto& q : it->second.ports) found = found || q == p;
                    if (!found) r_.errors.push_back(name + ": instance " + inst + " has no pin " + p + " on " + mod);
                }
            }
        }
        return r_;
    }

private:
    const std::string& peek(std::size_t k = 0) const {
        static const std::string eof = "<eof>";
        return i_ + k < t_.size() ? t_[i_ + k].text : eof;
    }
    bool accept(const std::string& s) {
        if (peek() == s) {
            ++i_;
            return true;
        }
        return false;
    }
    void error(const std::string& msg) {
        int line = i_ < t_.size() ? t_[i_].line : (t_.empty() ? 0 : t_.back().line);
        r_.errors.push_back("line " + std::to_string(line) + ": " + msg);
    }
    bool expect(const std::string& s) {
        if (accept(s)) return true;
        error("expected '" + s + "', found '" + peek() + "'");
        return false;
    }
    std::string ident() {
        if (i_ < t_.size() && t_[i_].ident && !verilog_keyword(t_[i_].text)) return t_[i_++].text;
        error("expected identifier, found '" + peek() + "'");
        return "";
    }

    void declare(const std::string& n) {
        if (n.empty()) return;
        if (!m_.symbols.insert(n).second) error("'" + n + "' declared twice in " + m_.name);
    }

    // Consumes tokens up to (not including) one of the stop tokens at paren
    // depth zero, recording identifier uses.
    bool expression_until(const std::set<std::string>& stop) {
        int depth = 0;
        while (i_ < t_.size()) {
            const auto& t = t_[i_];
            if (depth == 0 && stop.count(t.text)) return true;
            if (t.text == "(" || t.text == "[" || t.text == "{") ++depth;
            if (t.text == ")" || t.text == "]" || t.text == "}") {
                if (depth == 0) {
                    error("unbalanced '" + t.text + "'");
                    return false;
                }
                --depth;
            }
            if (t.text == "endmodule" || t.text == "module" || (t.text == ";" && depth > 0)) {
                error("unterminated expression");
                return false;
            }
            if (t.ident && !verilog_keyword(t.text)) uses_.push_back({t.text, t.line});
            ++i_;
        }
        error("unexpected end of file");
        return false;
    }

    void skip_range() {
        if (peek() != "[") return;
        ++i_;
        expression_until({"]"});
        expect("]");
    }

    bool statement() {
        if (accept("begin")) {
            while (peek() != "end") {
                if (i_ >= t_.size() || peek() == "endmodule") {
                    error("missing 'end'");
                    return false;
                }
                if (!statement()) return false;
            }
            ++i_;
            return true;
        }
        if (accept("if")) {
            if (!expect("(")) return false;
            if (!expression_until({")"})) return false;
            ++i_;
            if (!statement()) return false;
            if (accept("else")) return statement();
            return true;
        }
        if (!expression_until({";"})) return false;
        ++i_;
        return true;
    }

    bool declaration() {
        accept("wire");
        accept("reg");
        skip_range();
        for (;;) {
            declare(ident());
            if (accept("=")) {
                if (!expression_until({",", ";"})) return false;
            }
            if (accept(",")) continue;
            return expect(";");
        }
    }

    bool instance() {
        std::string mod = ident();
        if (accept("#")) {
            if (!expect("(")) return false;
            while (!accept(")")) {
                if (accept(",")) continue;
                if (accept(".")) {
                    ident();
                    if (!expect("(") || !expression_until({")"})) return false;
                    ++i_;
                } else if (!expression_until({",", ")"})) {
                    return false;
                }
            }
        }
        std::string inst = ident();
        declare(inst);
        m_.instances[inst] = mod;
        auto& pins = m_.instance_pins[inst];
        if (!expect("(")) return false;
        if (!accept(")")) {
            for (;;) {
                if (!expect(".")) return false;
                pins.push_back(ident());
                if (!expect("(")) return false;
                if (!expression_until({")"})) return false;
                ++i_;
                if (accept(",")) continue;
                if (!expect(")")) return false;
                break;
            }
        }
        return expect(";");
    }

    bool module() {
        m_ = VerilogModuleInfo{};
        uses_.clear();
        m_.name = ident();
        if (r_.modules.count(m_.name)) error("module " + m_.name + " defined twice");
        if (accept("#")) {
            if (!expect("(")) return false;
            while (!accept(")")) {
                if (accept("parameter") || accept(",")) continue;
                std::string p = ident();
                if (p.empty()) return false;
                declare(p);
                if (accept("=") && !expression_until({",", ")"})) return false;
            }
        }
        if (!expect("(")) return false;
        if (!accept(")")) {
            for (;;) {
                if (!(accept("input") || accept("output") || accept("inout"))) {
                    error("expected port direction, found '" + peek() + "'");
                    return false;
                }
                accept("wire");
                accept("reg");
                skip_range();
                std::string p = ident();
                declare(p);
                m_.ports.push_back(p);
                if (accept(",")) continue;
                if (!expect(")")) return false;
                break;
            }
        }
        if (!expect(";")) return false;

        while (!accept("endmodule")) {
            if (i_ >= t_.size() || peek() == "module") {
                error("missing 'endmodule' for " + m_.name);
                return false;
            }
            const std::string& t = peek();
            bool ok = true;
            if (t == "wire" || t == "reg") {
                ok = declaration();
            } else if (t == "localparam" || t == "parameter") {
                ++i_;
                ok = declaration();
            } else if (t == "assign") {
                ++i_;
                ok = expression_until({";"}) && expect(";");
            } else if (t == "always" || t == "initial") {
                ++i_;
                if (accept("@")) {
                    if (!expect("(")) return false;
                    ok = expression_until({")"}) && expect(")");
                }
                ok = ok && statement();
            } else if (i_ < t_.size() && t_[i_].ident && !verilog_keyword(t)) {
                ok = instance();
            } else {
                error("unexpected '" + t + "' in module " + m_.name);
                ok = false;
            }
            if (!ok) return false;
        }
        for (const auto& [u, line] : uses_)
            if (!m_.symbols.count(u))
                r_.errors.push_back("line " + std::to_string(line) + ": '" + u + "' is not declared in " + m_.name);
        r_.modules[m_.name] = m_;
        return true;
    }

    std::vector<VTok> t_;
    std::size_t i_ = 0;
    VerilogCheckResult r_;
    VerilogModuleInfo m_;
    std::vector<std::pair<std::string, int>> uses_;
};

}  // namespace detail

/// Minimal structural check: balanced module/endmodule and begin/end,
/// every referenced identifier declared once, and instance pin lists that
/// match the instantiated module's ports. Modules listed in `externals`
/// (blackboxes) may be instantiated without a definition.
inline VerilogCheckResult check_verilog(const std::string& text, const std::set<std::string>& externals = {}) {
    return detail::VerilogChecker(text).run(externals);
}

}  // namespace yak

#endif  // YAK_VERILOG_CHECK_HPP
