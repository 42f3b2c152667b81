#ifndef YAK_EXPR_HPP
#define YAK_EXPR_HPP

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>

#include "yak/ast.hpp"

namespace yak {

/// Bits needed to represent `v`, at least 1.
inline unsigned literal_width(std::uint64_t v) {
    unsigned w = 1;
    while (w < 64 && (v >> w) != 0) ++w;
    return w;
}

inline std::uint64_t mask_to(std::uint64_t v, unsigned width) {
    if (width >= 64) return v;
    return v & ((std::uint64_t{1} << width) - 1);
}

inline bool fits_width(std::uint64_t v, unsigned width) { return mask_to(v, width) == v; }

inline bool is_compare_or_logical(const std::string& op) {
    return op == "==" || op == "!=" || op == "<" || op == ">" || op == "<=" || op == ">=" || op == "&&" ||
           op == "||";
}

using WidthEnv = std::map<std::string, unsigned>;
using ValueEnv = std::map<std::string, std::uint64_t>;

/// Result width of an expression:
///   + - & | ^ << >>  max of operands
///   *                sum of operands
///   compare/logical  1
///   ?:               max of arms
///   ~ -              operand width;  !  1
/// Throws std::out_of_range for identifiers missing from `env`.
inline unsigned expr_width(const Expr& e, const WidthEnv& env) {
    switch (e.kind) {
        case ExprKind::Ident: return env.at(e.name);
        case ExprKind::Literal: return literal_width(e.value);
        case ExprKind::Unary:
            if (e.op == "!") return 1;
            return expr_width(e.args[0], env);
        case ExprKind::Binary: {
            if (is_compare_or_logical(e.op)) return 1;
            unsigned a = expr_width(e.args[0], env);
            unsigned b = expr_width(e.args[1], env);
            if (e.op == "*") return a + b;
            return std::max(a, b);
        }
        case ExprKind::Ternary: return std::max(expr_width(e.args[1], env), expr_width(e.args[2], env));
    }
    return 1;
}

/// Evaluates with every intermediate result truncated to its own width.
/// Widths above 64 bits are not supported here; callers reject them first.
inline std::uint64_t eval_expr(const Expr& e, const ValueEnv& values, const WidthEnv& widths) {
    switch (e.kind) {
        case ExprKind::Ident: return mask_to(values.at(e.name), widths.at(e.name));
        case ExprKind::Literal: return e.value;
        case ExprKind::Unary: {
            std::uint64_t a = eval_expr(e.args[0], values, widths);
            unsigned w = expr_width(e, widths);
            if (e.op == "!") return a == 0 ? 1 : 0;
            if (e.op == "~") return mask_to(~a, w);
            return mask_to(std::uint64_t{0} - a, w);
        }
        case ExprKind::Binary: {
            std::uint64_t a = eval_expr(e.args[0], values, widths);
            std::uint64_t b = eval_expr(e.args[1], values, widths);
            unsigned w = expr_width(e, widths);
            const std::string& op = e.op;
            std::uint64_t r = 0;
            if (op == "+") r = a + b;
            else if (op == "-") r = a - b;
            else if (op == "*") r = a * b;
            else if (op == "&") r = a & b;
            else if (op == "|") r = a | b;
            else if (op == "^") r = a ^ b;
            else if (op == "<<") r = b >= 64 ? 0 : a << b;
            else if (op == ">>") r = b >= 64 ? 0 : a >> b;
            else if (op == "==") r = a == b;
            else if (op == "!=") r = a != b;
            else if (op == "<") r = a < b;
            else if (op == ">") r = a > b;
            else if (op == "<=") r = a <= b;
            else if (op == ">=") r = a >= b;
            else if (op == "&&") r = (a != 0) && (b != 0);
            else if (op == "||") r = (a != 0) || (b != 0);
            return mask_to(r, w);
        }
        case ExprKind::Ternary: {
            std::uint64_t c = eval_expr(e.args[0], values, widths);
            unsigned w = expr_width(e, widths);
            return mask_to(c != 0 ? eval_expr(e.args[1], values, widths) : eval_expr(e.args[2], values, widths), w);
        }
    }
    return 0;
}

inline void collect_idents(const Expr& e, const std::function<void(const Expr&)>& fn) {
    if (e.kind == ExprKind::Ident) fn(e);
    for (const auto& a : e.args) collect_idents(a, fn);
}

/// Signals a comb block reads before defining them (its input demand).
inline std::set<std::string> comb_reads_before_def(const std::vector<CombStatement>& stmts) {
    std::set<std::string> defined;
    std::set<std::string> reads;
    for (const auto& st : stmts) {
        collect_idents(st.value, [&](const Expr& id) {
            if (!defined.count(id.name)) reads.insert(id.name);
        });
        defined.insert(st.target);
    }
    return reads;
}

/// Every name a comb block writes, declared or assigned.
inline std::set<std::string> comb_defined(const std::vector<CombStatement>& stmts) {
    std::set<std::string> out;
    for (const auto& st : stmts) out.insert(st.target);
    return out;
}

inline std::set<std::string> comb_declared(const std::vector<CombStatement>& stmts) {
    std::set<std::string> out;
    for (const auto& st : stmts)
        if (st.declares) out.insert(st.target);
    return out;
}

/// Width each statement's target takes: the declared type if given, else the
/// width of an already-known name, else the expression width.
inline unsigned statement_width(const CombStatement& st, const WidthEnv& env) {
    if (st.declares) return st.width ? *st.width : expr_width(st.value, env);
    auto it = env.find(st.target);
    if (it != env.end()) return it->second;
    return expr_width(st.value, env);
}

/// Runs a comb block over an input token. Returns the final environment
/// (inputs overwritten by assignments, plus every declared temporary).
inline std::pair<ValueEnv, WidthEnv> eval_comb(const std::vector<CombStatement>& stmts, ValueEnv values,
                                               WidthEnv widths) {
    for (const auto& st : stmts) {
        unsigned w = statement_width(st, widths);
        std::uint64_t v = eval_expr(st.value, values, widths);
        widths[st.target] = w;
        values[st.target] = mask_to(v, w);
    }
    return {std::move(values), std::move(widths)};
}

}  // namespace yak

#endif  // YAK_EXPR_HPP
