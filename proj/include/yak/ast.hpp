#ifndef YAK_AST_HPP
#define YAK_AST_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "yak/diagnostic.hpp"

namespace yak {

// ---------------------------------------------------------------------------
// Comb expressions

enum class ExprKind { Ident, Literal, Unary, Binary, Ternary };

struct Expr {
    ExprKind kind = ExprKind::Literal;
    std::string op;    // Unary/Binary operator spelling
    std::string name;  // Ident
    std::uint64_t value = 0;
    std::vector<Expr> args;
    SourcePos pos;

    static Expr ident(std::string n, SourcePos p = {}) {
        Expr e;
        e.kind = ExprKind::Ident;
        e.name = std::move(n);
        e.pos = p;
        return e;
    }
    static Expr literal(std::uint64_t v, SourcePos p = {}) {
        Expr e;
        e.kind = ExprKind::Literal;
        e.value = v;
        e.pos = p;
        return e;
    }
    static Expr unary(std::string o, Expr a, SourcePos p = {}) {
        Expr e;
        e.kind = ExprKind::Unary;
        e.op = std::move(o);
        e.args.push_back(std::move(a));
        e.pos = p;
        return e;
    }
    static Expr binary(std::string o, Expr a, Expr b, SourcePos p = {}) {
        Expr e;
        e.kind = ExprKind::Binary;
        e.op = std::move(o);
        e.args.push_back(std::move(a));
        e.args.push_back(std::move(b));
        e.pos = p;
        return e;
    }
    static Expr ternary(Expr c, Expr t, Expr f, SourcePos p = {}) {
        Expr e;
        e.kind = ExprKind::Ternary;
        e.args.push_back(std::move(c));
        e.args.push_back(std::move(t));
        e.args.push_back(std::move(f));
        e.pos = p;
        return e;
    }
};

/// `sig name [: logic[..]] = expr;` introduces a name; `name = expr;` updates one.
struct CombStatement {
    bool declares = false;
    std::string target;
    std::optional<unsigned> width;
    Expr value;
    SourcePos pos;
};

// ---------------------------------------------------------------------------
// Signals and channels

/// `sig name [: logic[N:0]] [= literal]`. `width` is absent when the type is
/// left to inference.
struct SignalSpec {
    std::string name;
    std::optional<unsigned> width;
    std::optional<std::uint64_t> value;
    SourcePos pos;
};

struct ChannelTypeSpec {
    std::vector<SignalSpec> signals;
};

struct ChannelDecl {
    std::string name;
    std::optional<ChannelTypeSpec> type;
    SourcePos pos;
};

struct ChannelRef {
    std::string name;
    SourcePos pos;
};

/// Side-channel argument: either a fresh declaration or a reference.
using SideArg = std::variant<ChannelDecl, ChannelRef>;

inline const std::string& side_arg_name(const SideArg& a) {
    return std::visit([](const auto& x) -> const std::string& { return x.name; }, a);
}
inline SourcePos side_arg_pos(const SideArg& a) {
    return std::visit([](const auto& x) { return x.pos; }, a);
}

// ---------------------------------------------------------------------------
// Flow terms

struct FlowExpr;

struct Aggregate {
    std::vector<FlowExpr> elements;
    SourcePos pos;
};

enum class Builtin { Join, Fork, Merge, Mux, Demux, Arbit };

inline const char* builtin_name(Builtin b) {
    switch (b) {
        case Builtin::Join: return "join";
        case Builtin::Fork: return "fork";
        case Builtin::Merge: return "merge";
        case Builtin::Mux: return "mux";
        case Builtin::Demux: return "demux";
        case Builtin::Arbit: return "arbit";
    }
    return "?";
}

struct BuiltinInst {
    Builtin kind = Builtin::Join;
    std::vector<SideArg> side;
    SourcePos pos;
};

struct ComponentInst {
    std::string name;
    std::vector<SideArg> side;
    SourcePos pos;
};

struct CombBlock {
    std::vector<CombStatement> statements;
    SourcePos pos;
};

struct InputDecl {
    std::string port;
    std::vector<SignalSpec> signals;
    SourcePos pos;
};

struct OutputDecl {
    std::string port;
    std::vector<SignalSpec> signals;
    SourcePos pos;
};

struct SourceDecl {
    std::vector<SignalSpec> signals;
    SourcePos pos;
};

/// `sink()` is universal (no list); `sink(sig x, ...)` requires its signals.
struct SinkDecl {
    std::optional<std::vector<SignalSpec>> signals;
    SourcePos pos;
};

/// Empty `init` means an uninitialized stage.
struct RegDecl {
    std::vector<SignalSpec> init;
    SourcePos pos;
};

struct BlackboxRef {
    std::string module;
    std::vector<ChannelDecl> inputs;
    std::vector<ChannelDecl> outputs;
    bool bracketed = false;
    SourcePos pos;
};

using FlowTerm = std::variant<ChannelDecl, ChannelRef, Aggregate, BuiltinInst, ComponentInst, CombBlock, InputDecl,
                              OutputDecl, SourceDecl, SinkDecl, RegDecl, BlackboxRef>;

/// A nonempty `->` chain.
struct FlowExpr {
    std::vector<FlowTerm> terms;
};

inline SourcePos term_pos(const FlowTerm& t) {
    return std::visit([](const auto& x) { return x.pos; }, t);
}

// ---------------------------------------------------------------------------
// Program

struct ComponentDef {
    std::string name;
    std::vector<ChannelDecl> inputs;
    std::vector<ChannelDecl> side;
    std::vector<ChannelDecl> outputs;
    /// Absent for prototypes such as `def join[chan a, chan b]()[chan c];`.
    std::optional<std::vector<FlowExpr>> body;
    bool implicit = false;
    SourcePos pos;
};

struct AstProgram {
    std::vector<ComponentDef> components;

    const ComponentDef* find(const std::string& name) const {
        for (const auto& c : components)
            if (c.name == name) return &c;
        return nullptr;
    }
};

inline constexpr const char* kImplicitTop = "main";

}  // namespace yak

#endif  // YAK_AST_HPP
