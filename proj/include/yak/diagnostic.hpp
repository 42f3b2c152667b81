#ifndef YAK_DIAGNOSTIC_HPP
#define YAK_DIAGNOSTIC_HPP

#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace yak {

struct SourcePos {
    int line = 0;
    int column = 0;

    bool valid() const { return line > 0; }
    friend bool operator==(const SourcePos&, const SourcePos&) = default;
};

enum class Severity { Error, Warning };

/// A single compiler message. `code` is a stable identifier (E_*) that tools
/// and tests match on; the message text may change between releases.
struct Diagnostic {
    Severity severity = Severity::Error;
    std::string code;
    std::string message;
    SourcePos pos;
    std::vector<int> nodes;
    std::vector<int> channels;

    static Diagnostic error(std::string code, std::string message, SourcePos pos = {}) {
        return Diagnostic{Severity::Error, std::move(code), std::move(message), pos, {}, {}};
    }
    static Diagnostic warning(std::string code, std::string message, SourcePos pos = {}) {
        return Diagnostic{Severity::Warning, std::move(code), std::move(message), pos, {}, {}};
    }
};

using Diagnostics = std::vector<Diagnostic>;

inline bool has_errors(const Diagnostics& diags) {
    for (const auto& d : diags)
        if (d.severity == Severity::Error) return true;
    return false;
}

inline bool has_code(const Diagnostics& diags, const std::string& code) {
    for (const auto& d : diags)
        if (d.code == code) return true;
    return false;
}

/// Thrown by passes that cannot continue. Carries every diagnostic gathered
/// before the failure.
class CompileError : public std::runtime_error {
public:
    explicit CompileError(Diagnostics diags)
        : std::runtime_error(summarize(diags)), diags_(std::move(diags)) {}
    explicit CompileError(Diagnostic diag) : CompileError(Diagnostics{std::move(diag)}) {}

    const Diagnostics& diagnostics() const { return diags_; }

    const std::string& code() const { return diags_.front().code; }

private:
    static std::string summarize(const Diagnostics& diags) {
        if (diags.empty()) return "compile error";
        return diags.front().code + ": " + diags.front().message;
    }
    Diagnostics diags_;
};

/// Formats `file:line:col: error: message [CODE]`.
inline std::string format_diagnostic(const Diagnostic& d, const std::string& file, bool color = false) {
    std::ostringstream os;
    if (color) os << "\x1b[1m";
    os << file;
    if (d.pos.valid()) os << ':' << d.pos.line << ':' << d.pos.column;
    os << ": ";
    if (color) os << (d.severity == Severity::Error ? "\x1b[31m" : "\x1b[35m");
    os << (d.severity == Severity::Error ? "error" : "warning");
    if (color) os << "\x1b[0m";
    os << ": " << d.message << " [" << d.code << ']';
    return os.str();
}

}  // namespace yak

#endif  // YAK_DIAGNOSTIC_HPP
