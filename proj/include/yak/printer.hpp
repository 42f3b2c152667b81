#ifndef YAK_PRINTER_HPP
#define YAK_PRINTER_HPP

#include <sstream>
#include <string>

#include "yak/ast.hpp"

namespace yak {

namespace detail {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

inline void print_logic(std::ostream& os, const std::optional<unsigned>& width) {
    if (!width) return;
    os << " : logic";
    if (*width > 1) os << '[' << (*width - 1) << ":0]";
}

inline void print_sig(std::ostream& os, const SignalSpec& s) {
    os << "sig " << s.name;
    print_logic(os, s.width);
    if (s.value) os << " = " << *s.value;
}

inline void print_sig_list(std::ostream& os, const std::vector<SignalSpec>& sigs, bool leading_comma) {
    for (std::size_t i = 0; i < sigs.size(); ++i) {
        if (i > 0 || leading_comma) os << ", ";
        print_sig(os, sigs[i]);
    }
}

inline void print_chan_decl(std::ostream& os, const ChannelDecl& d) {
    os << "chan " << d.name;
    if (d.type) {
        os << " : {";
        print_sig_list(os, d.type->signals, false);
        os << '}';
    }
}

inline void print_expr(std::ostream& os, const Expr& e) {
    switch (e.kind) {
        case ExprKind::Ident: os << e.name; break;
        case ExprKind::Literal: os << e.value; break;
        case ExprKind::Unary:
            os << e.op << '(';
            print_expr(os, e.args[0]);
            os << ')';
            break;
        case ExprKind::Binary:
            os << '(';
            print_expr(os, e.args[0]);
            os << ' ' << e.op << ' ';
            print_expr(os, e.args[1]);
            os << ')';
            break;
        case ExprKind::Ternary:
            os << '(';
            print_expr(os, e.args[0]);
            os << " ? ";
            print_expr(os, e.args[1]);
            os << " : ";
            print_expr(os, e.args[2]);
            os << ')';
            break;
    }
}

inline void print_side(std::ostream& os, const std::vector<SideArg>& side) {
    os << '(';
    for (std::size_t i = 0; i < side.size(); ++i) {
        if (i) os << ", ";
        std::visit(overloaded{[&](const ChannelDecl& d) { print_chan_decl(os, d); },
                              [&](const ChannelRef& r) { os << r.name; }},
                   side[i]);
    }
    os << ')';
}

void print_flow(std::ostream& os, const FlowExpr& e);

inline void print_term(std::ostream& os, const FlowTerm& t) {
    std::visit(overloaded{
                   [&](const ChannelDecl& d) { print_chan_decl(os, d); },
                   [&](const ChannelRef& r) { os << r.name; },
                   [&](const Aggregate& a) {
                       os << '[';
                       for (std::size_t i = 0; i < a.elements.size(); ++i) {
                           if (i) os << ", ";
                           print_flow(os, a.elements[i]);
                       }
                       os << ']';
                   },
                   [&](const BuiltinInst& b) {
                       os << builtin_name(b.kind);
                       print_side(os, b.side);
                   },
                   [&](const ComponentInst& c) {
                       os << c.name;
                       print_side(os, c.side);
                   },
                   [&](const CombBlock& c) {
                       os << "comb {";
                       for (const auto& st : c.statements) {
                           os << (st.declares ? "sig " : "") << st.target;
                           if (st.declares) print_logic(os, st.width);
                           os << " = ";
                           print_expr(os, st.value);
                           os << ';';
                       }
                       os << '}';
                   },
                   [&](const InputDecl& d) {
                       os << "input(" << d.port;
                       print_sig_list(os, d.signals, true);
                       os << ')';
                   },
                   [&](const OutputDecl& d) {
                       os << "output(" << d.port;
                       print_sig_list(os, d.signals, true);
                       os << ')';
                   },
                   [&](const SourceDecl& d) {
                       os << "source(";
                       print_sig_list(os, d.signals, false);
                       os << ')';
                   },
                   [&](const SinkDecl& d) {
                       os << "sink(";
                       if (d.signals) print_sig_list(os, *d.signals, false);
                       os << ')';
                   },
                   [&](const RegDecl& d) {
                       os << "reg(";
                       print_sig_list(os, d.init, false);
                       os << ')';
                   },
                   [&](const BlackboxRef& b) {
                       os << "blackbox(" << b.module << ", [";
                       for (std::size_t i = 0; i < b.inputs.size(); ++i) {
                           if (i) os << ", ";
                           print_chan_decl(os, b.inputs[i]);
                       }
                       os << "], [";
                       for (std::size_t i = 0; i < b.outputs.size(); ++i) {
                           if (i) os << ", ";
                           print_chan_decl(os, b.outputs[i]);
                       }
                       os << "])";
                   },
               },
               t);
}

inline void print_flow(std::ostream& os, const FlowExpr& e) {
    for (std::size_t i = 0; i < e.terms.size(); ++i) {
        if (i) os << " -> ";
        print_term(os, e.terms[i]);
    }
}

inline void print_chan_list(std::ostream& os, const std::vector<ChannelDecl>& l) {
    for (std::size_t i = 0; i < l.size(); ++i) {
        if (i) os << ", ";
        print_chan_decl(os, l[i]);
    }
}

}  // namespace detail

/// Prints Yak source that parses back to the same program. Comb expressions
/// are fully parenthesized; blackboxes always use the bracketed form.
inline std::string print_program(const AstProgram& prog) {
    std::ostringstream os;
    for (const auto& c : prog.components) {
        if (c.implicit) {
            for (const auto& st : *c.body) {
                detail::print_flow(os, st);
                os << ";\n";
            }
            continue;
        }
        os << "def " << c.name << '[';
        detail::print_chan_list(os, c.inputs);
        os << "](";
        detail::print_chan_list(os, c.side);
        os << ")[";
        detail::print_chan_list(os, c.outputs);
        os << ']';
        if (!c.body) {
            os << ";\n";
            continue;
        }
        os << " {\n";
        for (const auto& st : *c.body) {
            os << "    ";
            detail::print_flow(os, st);
            os << ";\n";
        }
        os << "}\n";
    }
    return os.str();
}

namespace detail {

inline void dump_sig(std::ostream& os, const SignalSpec& s) {
    os << "(sig " << s.name << ' ' << (s.width ? std::to_string(*s.width) : "?") << ' '
       << (s.value ? std::to_string(*s.value) : "-") << ')';
}

inline void dump_decl(std::ostream& os, const ChannelDecl& d) {
    os << "(decl " << d.name;
    if (d.type) {
        os << " {";
        for (const auto& s : d.type->signals) dump_sig(os, s);
        os << '}';
    }
    os << ')';
}

inline void dump_expr(std::ostream& os, const Expr& e) {
    switch (e.kind) {
        case ExprKind::Ident: os << "(id " << e.name << ')'; return;
        case ExprKind::Literal: os << "(lit " << e.value << ')'; return;
        default: break;
    }
    os << '(' << (e.kind == ExprKind::Ternary ? "?:" : e.op);
    for (const auto& a : e.args) {
        os << ' ';
        dump_expr(os, a);
    }
    os << ')';
}

inline void dump_flow(std::ostream& os, const FlowExpr& e);

inline void dump_term(std::ostream& os, const FlowTerm& t) {
    auto side = [&](const std::vector<SideArg>& s) {
        for (const auto& a : s)
            std::visit(overloaded{[&](const ChannelDecl& d) { dump_decl(os, d); },
                                  [&](const ChannelRef& r) { os << "(ref " << r.name << ')'; }},
                       a);
    };
    std::visit(overloaded{
                   [&](const ChannelDecl& d) { dump_decl(os, d); },
                   [&](const ChannelRef& r) { os << "(ref " << r.name << ')'; },
                   [&](const Aggregate& a) {
                       os << "(agg";
                       for (const auto& el : a.elements) {
                           os << ' ';
                           dump_flow(os, el);
                       }
                       os << ')';
                   },
                   [&](const BuiltinInst& b) {
                       os << '(' << builtin_name(b.kind);
                       side(b.side);
                       os << ')';
                   },
                   [&](const ComponentInst& c) {
                       os << "(inst " << c.name;
                       side(c.side);
                       os << ')';
                   },
                   [&](const CombBlock& c) {
                       os << "(comb";
                       for (const auto& st : c.statements) {
                           os << " (" << (st.declares ? "decl " : "set ") << st.target << ' '
                              << (st.width ? std::to_string(*st.width) : "?") << ' ';
                           dump_expr(os, st.value);
                           os << ')';
                       }
                       os << ')';
                   },
                   [&](const InputDecl& d) {
                       os << "(input " << d.port;
                       for (const auto& s : d.signals) dump_sig(os, s);
                       os << ')';
                   },
                   [&](const OutputDecl& d) {
                       os << "(output " << d.port;
                       for (const auto& s : d.signals) dump_sig(os, s);
                       os << ')';
                   },
                   [&](const SourceDecl& d) {
                       os << "(source";
                       for (const auto& s : d.signals) dump_sig(os, s);
                       os << ')';
                   },
                   [&](const SinkDecl& d) {
                       os << "(sink" << (d.signals ? "" : " *");
                       if (d.signals)
                           for (const auto& s : *d.signals) dump_sig(os, s);
                       os << ')';
                   },
                   [&](const RegDecl& d) {
                       os << "(reg";
                       for (const auto& s : d.init) dump_sig(os, s);
                       os << ')';
                   },
                   [&](const BlackboxRef& b) {
                       os << "(blackbox " << b.module << " (in";
                       for (const auto& d : b.inputs) dump_decl(os, d);
                       os << ") (out";
                       for (const auto& d : b.outputs) dump_decl(os, d);
                       os << "))";
                   },
               },
               t);
}

inline void dump_flow(std::ostream& os, const FlowExpr& e) {
    os << "(->";
    for (const auto& t : e.terms) {
        os << ' ';
        dump_term(os, t);
    }
    os << ')';
}

}  // namespace detail

/// Position-free S-expression rendering of the AST; two programs are
/// structurally identical iff their dumps are equal.
inline std::string dump_ast(const AstProgram& prog) {
    std::ostringstream os;
    for (const auto& c : prog.components) {
        os << "(def " << c.name << (c.implicit ? " implicit" : "") << " (in";
        for (const auto& d : c.inputs) detail::dump_decl(os, d);
        os << ") (side";
        for (const auto& d : c.side) detail::dump_decl(os, d);
        os << ") (out";
        for (const auto& d : c.outputs) detail::dump_decl(os, d);
        os << ')';
        if (c.body) {
            os << " (body";
            for (const auto& st : *c.body) {
                os << ' ';
                detail::dump_flow(os, st);
            }
            os << ')';
        }
        os << ")\n";
    }
    return os.str();
}

}  // namespace yak

#endif  // YAK_PRINTER_HPP
