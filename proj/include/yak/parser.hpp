#ifndef YAK_PARSER_HPP
#define YAK_PARSER_HPP

#include <charconv>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "yak/ast.hpp"
#include "yak/lexer.hpp"

namespace yak {

namespace detail {

/// LL(1) recursive-descent parser over a token span. Every failure throws
/// CompileError with code E_PARSE (or E_REDECLARED inside comb blocks).
class Parser {
public:
    explicit Parser(std::span<const SourceToken> tokens) : toks_(tokens) {}

    AstProgram program() {
        AstProgram prog;
        ComponentDef top;
        top.name = kImplicitTop;
        top.implicit = true;
        top.body.emplace();
        while (!at_end()) {
            if (peek().is_keyword("def")) {
                prog.components.push_back(component());
            } else {
                if (top.body->empty()) top.pos = peek().pos();
                top.body->push_back(statement());
            }
        }
        if (!top.body->empty()) {
            for (const auto& c : prog.components)
                if (c.name == kImplicitTop)
                    throw CompileError(Diagnostic::error(
                        "E_DUPLICATE_COMPONENT",
                        "top-level statements form the implicit component 'main', which is also defined explicitly",
                        c.pos));
            prog.components.push_back(std::move(top));
        }
        std::set<std::string> names;
        for (const auto& c : prog.components)
            if (!names.insert(c.name).second)
                throw CompileError(
                    Diagnostic::error("E_DUPLICATE_COMPONENT", "component '" + c.name + "' defined twice", c.pos));
        return prog;
    }

    std::vector<CombStatement> comb_body() {
        expect_punct("{");
        std::vector<CombStatement> stmts;
        std::set<std::string> declared;
        while (!peek().is_punct("}")) {
            CombStatement st;
            st.pos = peek().pos();
            if (peek().is_keyword("sig")) {
                next();
                st.declares = true;
                st.target = expect_ident("signal name");
                if (accept_punct(":")) st.width = logic_type();
                if (!declared.insert(st.target).second)
                    throw CompileError(Diagnostic::error(
                        "E_REDECLARED", "signal '" + st.target + "' already declared in this comb block", st.pos));
            } else {
                st.target = expect_ident("signal name or 'sig'");
            }
            expect_punct("=");
            st.value = expression();
            stmts.push_back(std::move(st));
            // The trailing ';' before '}' may be omitted.
            if (!accept_punct(";") && !peek().is_punct("}")) fail("';' or '}'");
        }
        next();
        return stmts;
    }

    bool at_end() const { return pos_ >= toks_.size(); }

    const SourceToken& peek(std::size_t ahead = 0) const {
        static const SourceToken end_tok{TokenKind::End, "<eof>", 0, 0};
        if (pos_ + ahead >= toks_.size()) {
            if (!toks_.empty() && ahead == 0) {
                // Report EOF just past the last token.
                eof_tok_ = toks_.back();
                eof_tok_.kind = TokenKind::End;
                eof_tok_.column += static_cast<int>(toks_.back().text.size());
                eof_tok_.text = "<eof>";
                return eof_tok_;
            }
            return end_tok;
        }
        return toks_[pos_ + ahead];
    }

private:
    const SourceToken& next() {
        const SourceToken& t = peek();
        if (!at_end()) ++pos_;
        return t;
    }

    [[noreturn]] void fail(std::string_view expected) const {
        const SourceToken& t = peek();
        std::string found = t.kind == TokenKind::End ? std::string("end of input")
                                                     : std::string(token_kind_name(t.kind)) + " '" + t.text + "'";
        throw CompileError(Diagnostic::error("E_PARSE", "expected " + std::string(expected) + ", found " + found,
                                             t.pos()));
    }

    bool accept_punct(std::string_view p) {
        if (peek().is_punct(p)) {
            next();
            return true;
        }
        return false;
    }
    void expect_punct(std::string_view p) {
        if (!accept_punct(p)) fail("'" + std::string(p) + "'");
    }
    void expect_keyword(std::string_view k) {
        if (!peek().is_keyword(k)) fail("'" + std::string(k) + "'");
        next();
    }
    std::string expect_ident(std::string_view what) {
        if (peek().kind != TokenKind::Identifier) fail(what);
        return next().text;
    }
    std::uint64_t expect_int(std::string_view what) {
        if (peek().kind != TokenKind::Integer) fail(what);
        const auto& t = next();
        std::uint64_t v = 0;
        std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        return v;
    }

    // logic | logic[N:0]
    unsigned logic_type() {
        SourcePos p = peek().pos();
        expect_keyword("logic");
        if (!accept_punct("[")) return 1;
        std::uint64_t hi = expect_int("bit index");
        expect_punct(":");
        std::uint64_t lo = expect_int("bit index");
        expect_punct("]");
        if (lo != 0)
            throw CompileError(Diagnostic::error("E_PARSE", "logic ranges must have the form [N:0]", p));
        if (hi >= (1u << 20))
            throw CompileError(Diagnostic::error("E_PARSE", "logic width too large", p));
        return static_cast<unsigned>(hi + 1);
    }

    SignalSpec signal_spec(bool with_value) {
        SignalSpec s;
        s.pos = peek().pos();
        expect_keyword("sig");
        s.name = expect_ident("signal name");
        if (accept_punct(":")) s.width = logic_type();
        if (with_value) {
            expect_punct("=");
            s.value = expect_int("integer constant");
        }
        return s;
    }

    std::vector<SignalSpec> signal_list(bool with_value) {
        std::vector<SignalSpec> out;
        if (peek().is_punct(")")) return out;
        do {
            out.push_back(signal_spec(with_value));
        } while (accept_punct(","));
        return out;
    }

    ChannelTypeSpec channel_type() {
        ChannelTypeSpec t;
        expect_punct("{");
        if (!peek().is_punct("}")) {
            do {
                t.signals.push_back(signal_spec(false));
            } while (accept_punct(","));
        }
        expect_punct("}");
        return t;
    }

    ChannelDecl channel_decl() {
        ChannelDecl d;
        d.pos = peek().pos();
        expect_keyword("chan");
        d.name = expect_ident("channel name");
        if (accept_punct(":")) d.type = channel_type();
        return d;
    }

    std::vector<ChannelDecl> channel_list(std::string_view close) {
        std::vector<ChannelDecl> out;
        if (peek().is_punct(close)) return out;
        do {
            out.push_back(channel_decl());
        } while (accept_punct(","));
        return out;
    }

    ComponentDef component() {
        ComponentDef def;
        def.pos = peek().pos();
        expect_keyword("def");
        const auto& name = peek();
        bool builtin_name = name.kind == TokenKind::Keyword &&
                            (name.text == "join" || name.text == "fork" || name.text == "merge" ||
                             name.text == "mux" || name.text == "demux" || name.text == "arbit");
        if (name.kind != TokenKind::Identifier && !builtin_name) fail("component name");
        def.name = next().text;
        expect_punct("[");
        def.inputs = channel_list("]");
        expect_punct("]");
        expect_punct("(");
        def.side = channel_list(")");
        expect_punct(")");
        expect_punct("[");
        def.outputs = channel_list("]");
        expect_punct("]");
        if (accept_punct(";")) return def;
        expect_punct("{");
        def.body.emplace();
        while (!peek().is_punct("}")) {
            if (at_end()) fail("'}'");
            def.body->push_back(statement());
        }
        next();
        accept_punct(";");
        return def;
    }

    FlowExpr statement() {
        FlowExpr e = flow_expr();
        expect_punct(";");
        return e;
    }

    FlowExpr flow_expr() {
        FlowExpr e;
        e.terms.push_back(term());
        while (peek().is_op("->")) {
            next();
            e.terms.push_back(term());
        }
        return e;
    }

    SideArg side_arg() {
        if (peek().is_keyword("chan")) return channel_decl();
        ChannelRef r;
        r.pos = peek().pos();
        r.name = expect_ident("channel");
        return r;
    }

    std::vector<SideArg> side_args() {
        std::vector<SideArg> out;
        expect_punct("(");
        if (!peek().is_punct(")")) {
            do {
                out.push_back(side_arg());
            } while (accept_punct(","));
        }
        expect_punct(")");
        return out;
    }

    FlowTerm term() {
        const SourceToken& t = peek();
        SourcePos p = t.pos();
        if (t.is_keyword("chan")) return channel_decl();
        if (t.kind == TokenKind::Identifier) {
            std::string name = next().text;
            if (peek().is_punct("(")) return ComponentInst{name, side_args(), p};
            return ChannelRef{name, p};
        }
        if (t.is_punct("[")) {
            next();
            Aggregate agg;
            agg.pos = p;
            do {
                agg.elements.push_back(flow_expr());
            } while (accept_punct(","));
            expect_punct("]");
            return agg;
        }
        if (t.kind != TokenKind::Keyword) fail("flow term");
        const std::string kw = t.text;
        if (kw == "comb") {
            next();
            return CombBlock{comb_body(), p};
        }
        if (kw == "join" || kw == "fork" || kw == "merge" || kw == "arbit" || kw == "mux" || kw == "demux") {
            next();
            BuiltinInst b;
            b.pos = p;
            b.kind = kw == "join"    ? Builtin::Join
                     : kw == "fork"  ? Builtin::Fork
                     : kw == "merge" ? Builtin::Merge
                     : kw == "arbit" ? Builtin::Arbit
                     : kw == "mux"   ? Builtin::Mux
                                     : Builtin::Demux;
            b.side = side_args();
            bool needs_select = b.kind == Builtin::Mux || b.kind == Builtin::Demux;
            if (needs_select && b.side.size() != 1)
                throw CompileError(Diagnostic::error(
                    "E_PARSE", kw + "() requires exactly one select side-channel argument", p));
            if (!needs_select && !b.side.empty())
                throw CompileError(Diagnostic::error("E_PARSE", kw + "() takes no side-channel arguments", p));
            return b;
        }
        if (kw == "reg") {
            next();
            expect_punct("(");
            RegDecl r{signal_list(true), p};
            expect_punct(")");
            return r;
        }
        if (kw == "source") {
            next();
            expect_punct("(");
            SourceDecl s{signal_list(true), p};
            expect_punct(")");
            return s;
        }
        if (kw == "sink") {
            next();
            expect_punct("(");
            SinkDecl s;
            s.pos = p;
            if (!peek().is_punct(")")) s.signals = signal_list(false);
            expect_punct(")");
            return s;
        }
        if (kw == "input" || kw == "output") {
            next();
            expect_punct("(");
            std::string port = expect_ident("port name");
            std::vector<SignalSpec> sigs;
            while (accept_punct(",")) sigs.push_back(signal_spec(false));
            expect_punct(")");
            if (kw == "input") return InputDecl{port, std::move(sigs), p};
            return OutputDecl{port, std::move(sigs), p};
        }
        if (kw == "blackbox") {
            next();
            expect_punct("(");
            BlackboxRef bb;
            bb.pos = p;
            bb.module = expect_ident("blackbox module name");
            expect_punct(",");
            if (peek().is_punct("[")) {
                bb.bracketed = true;
                next();
                bb.inputs = channel_list("]");
                expect_punct("]");
                expect_punct(",");
                expect_punct("[");
                bb.outputs = channel_list("]");
                expect_punct("]");
            } else {
                std::vector<ChannelDecl> all;
                do {
                    all.push_back(channel_decl());
                } while (accept_punct(","));
                bb.outputs.push_back(std::move(all.back()));
                all.pop_back();
                bb.inputs = std::move(all);
            }
            expect_punct(")");
            return bb;
        }
        fail("flow term");
    }

    // Expressions, C precedence.
    Expr expression() {
        Expr cond = binary(0);
        if (peek().is_op("?")) {
            SourcePos p = next().pos();
            Expr a = expression();
            expect_punct(":");
            Expr b = expression();
            return Expr::ternary(std::move(cond), std::move(a), std::move(b), p);
        }
        return cond;
    }

    static int precedence(const SourceToken& t) {
        if (t.kind != TokenKind::Operator) return -1;
        static const std::vector<std::vector<std::string_view>> levels = {
            {"||"}, {"&&"}, {"|"}, {"^"}, {"&"}, {"==", "!="}, {"<", ">", "<=", ">="}, {"<<", ">>"}, {"+", "-"},
            {"*"},
        };
        for (std::size_t i = 0; i < levels.size(); ++i)
            for (auto op : levels[i])
                if (t.text == op) return static_cast<int>(i);
        return -1;
    }

    Expr binary(int min_prec) {
        Expr lhs = unary();
        for (;;) {
            int prec = precedence(peek());
            if (prec < min_prec) return lhs;
            const SourceToken& op = next();
            Expr rhs = binary(prec + 1);
            lhs = Expr::binary(op.text, std::move(lhs), std::move(rhs), op.pos());
        }
    }

    Expr unary() {
        const SourceToken& t = peek();
        if (t.is_op("~") || t.is_op("!") || t.is_op("-")) {
            next();
            return Expr::unary(t.text, unary(), t.pos());
        }
        return primary();
    }

    Expr primary() {
        const SourceToken& t = peek();
        if (t.kind == TokenKind::Integer) {
            SourcePos p = t.pos();
            return Expr::literal(expect_int("integer"), p);
        }
        if (t.kind == TokenKind::Identifier) {
            next();
            return Expr::ident(t.text, t.pos());
        }
        if (accept_punct("(")) {
            Expr e = expression();
            expect_punct(")");
            return e;
        }
        fail("expression");
    }

    std::span<const SourceToken> toks_;
    std::size_t pos_ = 0;
    mutable SourceToken eof_tok_;
};

}  // namespace detail

/// Parses a full token stream. Top-level statements outside any `def` are
/// gathered into an implicit component named "main".
inline AstProgram parse_program(std::span<const SourceToken> tokens) {
    detail::Parser p(tokens);
    return p.program();
}

inline AstProgram parse_program(std::string_view source) {
    auto toks = tokenize(source);
    return parse_program(std::span<const SourceToken>(toks));
}

/// Parses `{ ... }` (the tokens following the `comb` keyword).
inline std::vector<CombStatement> parse_comb_block(std::span<const SourceToken> tokens) {
    detail::Parser p(tokens);
    auto stmts = p.comb_body();
    if (!p.at_end())
        throw CompileError(Diagnostic::error("E_PARSE", "unexpected tokens after comb block", p.peek().pos()));
    return stmts;
}

/// Accepts either `comb { ... }` or just the braced body.
inline std::vector<CombStatement> parse_comb_block(std::string_view source) {
    auto toks = tokenize(source);
    std::span<const SourceToken> s(toks);
    if (!s.empty() && s.front().is_keyword("comb")) s = s.subspan(1);
    return parse_comb_block(s);
}

}  // namespace yak

#endif  // YAK_PARSER_HPP
