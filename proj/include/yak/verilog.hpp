#ifndef YAK_VERILOG_HPP
#define YAK_VERILOG_HPP

#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "yak/analysis.hpp"
#include "yak/expr.hpp"
#include "yak/verilog_cells.hpp"

namespace yak {

inline std::string verilog_range(unsigned width) {
    return width > 1 ? "[" + std::to_string(width - 1) + ":0] " : "";
}

inline std::string verilog_literal(std::uint64_t v, unsigned width) {
    return std::to_string(width) + "'d" + std::to_string(v);
}

/// Emits the top module for an analyzed design.
class VerilogEmitter {
public:
    explicit VerilogEmitter(const Analysis& a) : a_(a), g_(a.graph) { assign_wire_names(); }

    /// Channel base name used in req_<c>, ack_<c>, D_<c>_<s>.
    const std::string& wire_base(EdgeId e) const { return base_.at(static_cast<std::size_t>(e)); }
    std::string req(EdgeId e) const { return "req_" + wire_base(e); }
    std::string ack(EdgeId e) const { return "ack_" + wire_base(e); }
    std::string data(EdgeId e, const std::string& s) const { return "D_" + wire_base(e) + "_" + s; }

    /// Module instances emitted, by instance name → module name.
    const std::map<std::string, std::string>& instances() const { return instances_; }
    /// Every identifier declared in the top module.
    const std::set<std::string>& symbols() const { return declared_; }

    std::string emit(const std::string& module_name) {
        declared_.clear();
        instances_.clear();
        std::ostringstream body;
        std::ostringstream decls;
        std::vector<std::string> ports;

        for (const auto& n : g_.nodes) {
            if (n.kind == NodeKind::Input) {
                ports.push_back("input " + declare("req_" + n.label));
                ports.push_back("output " + declare("ack_" + n.label));
                for (const auto& s : n.signals)
                    ports.push_back("input " + verilog_range(s.width.value_or(1)) +
                                    declare("D_" + n.label + "_" + s.name));
            } else if (n.kind == NodeKind::Output) {
                ports.push_back("output " + declare("req_" + n.label));
                ports.push_back("input " + declare("ack_" + n.label));
                for (const auto& s : n.signals)
                    ports.push_back("output " + verilog_range(s.width.value_or(1)) +
                                    declare("D_" + n.label + "_" + s.name));
            }
        }
        ports.push_back("input " + declare("rst_n"));

        // Channel wires, except those that are module ports.
        std::set<EdgeId> port_edges;
        for (const auto& n : g_.nodes)
            if (n.kind == NodeKind::Input) port_edges.insert(n.outputs[0]);
        for (const auto& e : g_.edges) {
            if (port_edges.count(e.id)) continue;
            bool latched = e.producer && g_.node(e.producer->node).kind == NodeKind::Reg;
            decls << "    wire " << declare(req(e.id)) << ";\n";
            decls << "    wire " << declare(ack(e.id)) << ";\n";
            for (const auto& [s, w] : a_.type(e.id))
                decls << "    " << (latched ? "reg " : "wire ") << verilog_range(w) << declare(data(e.id, s)) << ";\n";
        }

        for (const auto& n : g_.nodes) emit_node(n, decls, body);

        std::ostringstream os;
        os << "module " << module_name << " (\n";
        for (std::size_t i = 0; i < ports.size(); ++i) os << "    " << ports[i] << (i + 1 < ports.size() ? ",\n" : "\n");
        os << ");\n";
        std::string d = decls.str();
        std::string b = body.str();
        if (!d.empty()) os << d;
        if (!d.empty() && !b.empty()) os << "\n";
        os << b;
        os << "endmodule\n";
        return os.str();
    }

    /// Pass-through handshake plus the data computation of one comb node.
    std::string emit_comb_process(const Node& n) {
        std::ostringstream os;
        std::ostringstream decls;
        emit_comb(n, decls, os);
        return decls.str() + os.str();
    }

    /// Controller instance and latch bank of one stage.
    std::string emit_stage(const Node& n) {
        std::ostringstream os;
        std::ostringstream decls;
        emit_reg(n, decls, os);
        return decls.str() + os.str();
    }

private:
    std::string declare(const std::string& name) {
        if (!declared_.insert(name).second) throw std::logic_error("verilog: '" + name + "' declared twice");
        return name;
    }

    void assign_wire_names() {
        std::set<std::string> ports;
        for (const auto& n : g_.nodes)
            if (n.kind == NodeKind::Input || n.kind == NodeKind::Output) ports.insert(n.label);
        base_.resize(g_.edges.size());
        std::set<std::string> used;
        std::vector<bool> fixed(g_.edges.size(), false);
        for (const auto& n : g_.nodes)
            if (n.kind == NodeKind::Input) {
                base_[static_cast<std::size_t>(n.outputs[0])] = n.label;
                fixed[static_cast<std::size_t>(n.outputs[0])] = true;
                used.insert(n.label);
            }
        for (const auto& e : g_.edges) {
            if (fixed[static_cast<std::size_t>(e.id)]) continue;
            std::string b = e.display_name();
            while (used.count(b) || ports.count(b)) b += "_w";
            used.insert(b);
            base_[static_cast<std::size_t>(e.id)] = b;
        }
    }

    const ChannelType& type(EdgeId e) const { return a_.type(e); }

    std::string instance(const Node& n, const std::vector<std::pair<std::string, std::string>>& pins,
                         const std::string& params = "") {
        std::string mod = cell_module(n.kind);
        instances_[n.name] = mod;
        std::ostringstream os;
        os << "    " << mod << (params.empty() ? "" : " " + params) << " " << n.name << " (";
        for (std::size_t i = 0; i < pins.size(); ++i)
            os << (i ? ", " : "") << "." << pins[i].first << "(" << pins[i].second << ")";
        os << ");\n";
        return os.str();
    }

    std::vector<std::pair<std::string, std::string>> in_pins(const Node& n, int k, const std::string& prefix) {
        EdgeId e = n.inputs[static_cast<std::size_t>(k)];
        return {{prefix + "_req", req(e)}, {prefix + "_ack", ack(e)}};
    }
    std::vector<std::pair<std::string, std::string>> out_pins(const Node& n, int k) {
        EdgeId e = n.outputs[static_cast<std::size_t>(k)];
        std::string p = "o" + std::to_string(k);
        return {{p + "_req", req(e)}, {p + "_ack", ack(e)}};
    }

    static void append(std::vector<std::pair<std::string, std::string>>& a,
                       const std::vector<std::pair<std::string, std::string>>& b) {
        a.insert(a.end(), b.begin(), b.end());
    }

    void emit_node(const Node& n, std::ostringstream& decls, std::ostringstream& os) {
        switch (n.kind) {
            case NodeKind::Reg: emit_reg(n, decls, os); break;
            case NodeKind::Comb: emit_comb(n, decls, os); break;
            case NodeKind::Join: {
                std::vector<std::pair<std::string, std::string>> pins{{"rst_n", "rst_n"}};
                append(pins, in_pins(n, 0, "i0"));
                append(pins, in_pins(n, 1, "i1"));
                append(pins, out_pins(n, 0));
                os << instance(n, pins);
                EdgeId o = n.outputs[0];
                for (const auto& [s, w] : type(o)) {
                    EdgeId from = type(n.inputs[0]).count(s) ? n.inputs[0] : n.inputs[1];
                    os << "    assign " << data(o, s) << " = " << data(from, s) << ";\n";
                }
                break;
            }
            case NodeKind::Fork: {
                std::vector<std::pair<std::string, std::string>> pins{{"rst_n", "rst_n"}};
                append(pins, in_pins(n, 0, "i0"));
                append(pins, out_pins(n, 0));
                append(pins, out_pins(n, 1));
                os << instance(n, pins);
                for (std::size_t k = 0; k < n.outputs.size(); ++k)
                    for (const auto& [s, w] : type(n.outputs[k]))
                        os << "    assign " << data(n.outputs[k], s) << " = " << data(n.inputs[0], s) << ";\n";
                break;
            }
            case NodeKind::Merge:
            case NodeKind::Arbit:
            case NodeKind::Mux: {
                std::string sel = declare(n.name + "_sel");
                decls << "    wire " << sel << ";\n";
                std::vector<std::pair<std::string, std::string>> pins{{"rst_n", "rst_n"}};
                append(pins, in_pins(n, 0, "i0"));
                append(pins, in_pins(n, 1, "i1"));
                if (n.kind == NodeKind::Mux) append(pins, select_pins(n));
                append(pins, out_pins(n, 0));
                pins.emplace_back("sel", sel);
                if (n.kind == NodeKind::Mux) {
                    std::string en = declare(n.name + "_sel_en");
                    decls << "    wire " << en << ";\n";
                    pins.emplace_back("sel_en", en);
                }
                os << instance(n, pins);
                EdgeId o = n.outputs[0];
                for (const auto& [s, w] : type(o))
                    os << "    assign " << data(o, s) << " = " << sel << " ? " << data(n.inputs[1], s) << " : "
                       << data(n.inputs[0], s) << ";\n";
                break;
            }
            case NodeKind::Demux: {
                std::string sel = declare(n.name + "_sel");
                std::string en = declare(n.name + "_sel_en");
                decls << "    wire " << sel << ";\n";
                decls << "    wire " << en << ";\n";
                std::vector<std::pair<std::string, std::string>> pins{{"rst_n", "rst_n"}};
                append(pins, in_pins(n, 0, "i0"));
                append(pins, select_pins(n));
                append(pins, out_pins(n, 0));
                append(pins, out_pins(n, 1));
                pins.emplace_back("sel", sel);
                pins.emplace_back("sel_en", en);
                os << instance(n, pins);
                for (std::size_t k = 0; k < n.outputs.size(); ++k)
                    for (const auto& [s, w] : type(n.outputs[k]))
                        os << "    assign " << data(n.outputs[k], s) << " = " << data(n.inputs[0], s) << ";\n";
                break;
            }
            case NodeKind::Output: {
                EdgeId e = n.inputs[0];
                os << "    assign req_" << n.label << " = " << req(e) << ";\n";
                os << "    assign " << ack(e) << " = ack_" << n.label << ";\n";
                for (const auto& s : n.signals)
                    os << "    assign D_" << n.label << "_" << s.name << " = " << data(e, s.name) << ";\n";
                break;
            }
            case NodeKind::Source: {
                EdgeId e = n.outputs[0];
                os << "    assign " << req(e) << " = ~" << ack(e) << ";\n";
                for (const auto& [s, w] : type(e)) {
                    std::uint64_t v = 0;
                    for (const auto& sig : n.signals)
                        if (sig.name == s) v = sig.value.value_or(0);
                    os << "    assign " << data(e, s) << " = " << verilog_literal(v, w) << ";\n";
                }
                break;
            }
            case NodeKind::Sink: os << "    assign " << ack(n.inputs[0]) << " = " << req(n.inputs[0]) << ";\n"; break;
            case NodeKind::Blackbox: emit_blackbox(n, os); break;
            default: break;
        }
    }

    std::vector<std::pair<std::string, std::string>> select_pins(const Node& n) {
        EdgeId s = n.inputs[static_cast<std::size_t>(*select_port(n))];
        const auto& sig = a_.live.select_signal[static_cast<std::size_t>(s)];
        return {{"s_req", req(s)}, {"s_ack", ack(s)}, {"s_data", data(s, sig.value_or(""))}};
    }

    void emit_reg(const Node& n, std::ostringstream& decls, std::ostringstream& os) {
        std::string en = declare(n.name + "_en");
        decls << "    wire " << en << ";\n";
        std::vector<std::pair<std::string, std::string>> pins{{"rst_n", "rst_n"}};
        append(pins, in_pins(n, 0, "i0"));
        append(pins, out_pins(n, 0));
        pins.emplace_back("en", en);
        os << instance(n, pins, n.has_init() ? "#(.INIT_FULL(1))" : "");
        EdgeId in = n.inputs[0];
        EdgeId out = n.outputs[0];
        const auto& t = type(out);
        if (t.empty()) return;
        os << "    always @(*)\n";
        if (n.has_init()) {
            os << "        if (!rst_n) begin\n";
            for (const auto& [s, w] : t) {
                std::uint64_t v = 0;
                for (const auto& sig : n.signals)
                    if (sig.name == s) v = sig.value.value_or(0);
                os << "            " << data(out, s) << " = " << verilog_literal(v, w) << ";\n";
            }
            os << "        end else if (" << en << ") begin\n";
        } else {
            os << "        if (" << en << ") begin\n";
        }
        for (const auto& [s, w] : t) os << "            " << data(out, s) << " = " << data(in, s) << ";\n";
        os << "        end\n";
    }

    struct CombCtx {
        const Node* node;
        std::map<std::string, std::string> env;
        WidthEnv widths;
        int temps = 0;
        std::ostringstream* decls;
    };

    std::string temp(CombCtx& c, unsigned width, const std::string& value) {
        std::string name = declare(c.node->name + "_e" + std::to_string(c.temps++));
        *c.decls << "    wire " << verilog_range(width) << name << " = " << value << ";\n";
        return name;
    }

    // Every operator result below the root lives in its own sized wire so the
    // Verilog width rules cannot widen it past the Yak width.
    std::string operand(CombCtx& c, const Expr& e) {
        switch (e.kind) {
            case ExprKind::Ident: return c.env.at(e.name);
            case ExprKind::Literal: return verilog_literal(e.value, literal_width(e.value));
            default: return temp(c, expr_width(e, c.widths), render(c, e));
        }
    }

    std::string render(CombCtx& c, const Expr& e) {
        switch (e.kind) {
            case ExprKind::Ident:
            case ExprKind::Literal: return operand(c, e);
            case ExprKind::Unary: return e.op + operand(c, e.args[0]);
            case ExprKind::Binary: return "(" + operand(c, e.args[0]) + " " + e.op + " " + operand(c, e.args[1]) + ")";
            case ExprKind::Ternary:
                return "(" + operand(c, e.args[0]) + " ? " + operand(c, e.args[1]) + " : " + operand(c, e.args[2]) +
                       ")";
        }
        return "";
    }

    void emit_comb(const Node& n, std::ostringstream& decls, std::ostringstream& os) {
        EdgeId in = n.inputs[0];
        EdgeId out = n.outputs[0];
        os << "    assign " << req(out) << " = " << req(in) << ";\n";
        os << "    assign " << ack(in) << " = " << ack(out) << ";\n";
        CombCtx c{&n, {}, {}, 0, &decls};
        for (const auto& [s, w] : type(in)) {
            c.env[s] = data(in, s);
            c.widths[s] = w;
        }
        const auto& out_t = type(out);
        std::map<std::string, std::size_t> last_write;
        for (std::size_t i = 0; i < n.comb.size(); ++i) last_write[n.comb[i].target] = i;
        std::set<std::string> written;
        for (std::size_t i = 0; i < n.comb.size(); ++i) {
            const auto& st = n.comb[i];
            unsigned w = statement_width(st, c.widths);
            std::string value = render(c, st.value);
            if (w != expr_width(st.value, c.widths) && st.value.kind != ExprKind::Ident &&
                st.value.kind != ExprKind::Literal)
                value = temp(c, expr_width(st.value, c.widths), value);
            c.widths[st.target] = w;
            if (last_write[st.target] == i && out_t.count(st.target)) {
                os << "    assign " << data(out, st.target) << " = " << value << ";\n";
                c.env[st.target] = data(out, st.target);
                written.insert(st.target);
            } else {
                std::string name = declare(n.name + "_" + st.target + "_" + std::to_string(i));
                decls << "    wire " << verilog_range(w) << name << " = " << value << ";\n";
                c.env[st.target] = name;
            }
        }
        for (const auto& [s, w] : out_t)
            if (!written.count(s)) os << "    assign " << data(out, s) << " = " << c.env.at(s) << ";\n";
    }

    void emit_blackbox(const Node& n, std::ostringstream& os) {
        instances_[n.name] = n.label;
        std::vector<std::string> pins;
        for (std::size_t k = 0; k < n.inputs.size(); ++k) {
            const auto& d = n.bb_inputs[k];
            EdgeId e = n.inputs[k];
            pins.push_back(".req_" + d.name + "(" + req(e) + ")");
            pins.push_back(".ack_" + d.name + "(" + ack(e) + ")");
            if (d.type)
                for (const auto& s : d.type->signals)
                    pins.push_back(".D_" + d.name + "_" + s.name + "(" + data(e, s.name) + ")");
        }
        for (std::size_t k = 0; k < n.outputs.size(); ++k) {
            const auto& d = n.bb_outputs[k];
            EdgeId e = n.outputs[k];
            pins.push_back(".req_" + d.name + "(" + req(e) + ")");
            pins.push_back(".ack_" + d.name + "(" + ack(e) + ")");
            if (d.type)
                for (const auto& s : d.type->signals)
                    pins.push_back(".D_" + d.name + "_" + s.name + "(" +
                                   (type(e).count(s.name) ? data(e, s.name) : std::string()) + ")");
        }
        os << "    " << n.label << " " << n.name << " (";
        for (std::size_t i = 0; i < pins.size(); ++i) os << (i ? ", " : "") << pins[i];
        os << ");\n";
    }

    const Analysis& a_;
    const TokenFlowGraph& g_;
    std::vector<std::string> base_;
    std::set<std::string> declared_;
    std::map<std::string, std::string> instances_;
};

inline std::string emit_design(const Analysis& a, const std::string& top) { return VerilogEmitter(a).emit(top); }

inline std::string emit_cells() { return kCellLibrary; }

}  // namespace yak

#endif  // YAK_VERILOG_HPP
