#ifndef YAK_VERILOG_CELLS_HPP
#define YAK_VERILOG_CELLS_HPP

#include <map>
#include <string>
#include <vector>

#include "yak/graph.hpp"

namespace yak {

/// Behavioral two-phase controllers written to yak_cells.v. A channel holds a
/// token while req != ack. Each controller toggles its phase registers on the
/// rising edge of a local fire signal, click style. Pin names here are what the
/// SDC backend anchors clocks on.
inline const char* kCellLibrary = R"(// yak_cells.v: two-phase bundled-data controllers.
// A channel holds a token while req != ack.

module yak_stage #(parameter INIT_FULL = 0) (
    input  rst_n,
    input  i0_req,
    output i0_ack,
    output o0_req,
    input  o0_ack,
    output en
);
    reg ip;
    reg op;
    wire fire = (i0_req != ip) && (o0_ack == op);
    assign i0_ack = ip;
    assign o0_req = op;
    assign en = fire;
    always @(posedge fire or negedge rst_n)
        if (!rst_n) begin
            ip <= 1'b0;
            op <= INIT_FULL;
        end else begin
            ip <= ~ip;
            op <= ~op;
        end
endmodule

module yak_join (
    input  rst_n,
    input  i0_req,
    output i0_ack,
    input  i1_req,
    output i1_ack,
    output o0_req,
    input  o0_ack
);
    reg p;
    wire fire = (i0_req != p) && (i1_req != p) && (o0_ack == p);
    assign i0_ack = p;
    assign i1_ack = p;
    assign o0_req = p;
    always @(posedge fire or negedge rst_n)
        if (!rst_n) p <= 1'b0;
        else p <= ~p;
endmodule

module yak_fork (
    input  rst_n,
    input  i0_req,
    output i0_ack,
    output o0_req,
    input  o0_ack,
    output o1_req,
    input  o1_ack
);
    reg p;
    wire fire = (i0_req != p) && (o0_ack == p) && (o1_ack == p);
    assign i0_ack = p;
    assign o0_req = p;
    assign o1_req = p;
    always @(posedge fire or negedge rst_n)
        if (!rst_n) p <= 1'b0;
        else p <= ~p;
endmodule

// Assumes at most one input holds a token.
module yak_merge (
    input  rst_n,
    input  i0_req,
    output i0_ack,
    input  i1_req,
    output i1_ack,
    output o0_req,
    input  o0_ack,
    output sel
);
    reg p0;
    reg p1;
    reg s;
    wire q = p0 ^ p1;
    wire fire0 = (i0_req != p0) && (o0_ack == q);
    wire fire1 = (i1_req != p1) && (o0_ack == q);
    wire fire = fire0 || fire1;
    assign i0_ack = p0;
    assign i1_ack = p1;
    assign o0_req = q;
    assign sel = s;
    always @(posedge fire or negedge rst_n)
        if (!rst_n) begin
            p0 <= 1'b0;
            p1 <= 1'b0;
            s <= 1'b0;
        end else if (fire0) begin
            p0 <= ~p0;
            s <= 1'b0;
        end else begin
            p1 <= ~p1;
            s <= 1'b1;
        end
endmodule

// Input 0 wins when both are pending.
module yak_arbit (
    input  rst_n,
    input  i0_req,
    output i0_ack,
    input  i1_req,
    output i1_ack,
    output o0_req,
    input  o0_ack,
    output sel
);
    reg p0;
    reg p1;
    reg s;
    wire q = p0 ^ p1;
    wire req0 = (i0_req != p0);
    wire req1 = (i1_req != p1) && !req0;
    wire fire = (req0 || req1) && (o0_ack == q);
    assign i0_ack = p0;
    assign i1_ack = p1;
    assign o0_req = q;
    assign sel = s;
    always @(posedge fire or negedge rst_n)
        if (!rst_n) begin
            p0 <= 1'b0;
            p1 <= 1'b0;
            s <= 1'b0;
        end else if (req0) begin
            p0 <= ~p0;
            s <= 1'b0;
        end else begin
            p1 <= ~p1;
            s <= 1'b1;
        end
endmodule

// The select value is held in a latch that is transparent while a select
// token is pending (sel_en).
module yak_mux (
    input  rst_n,
    input  i0_req,
    output i0_ack,
    input  i1_req,
    output i1_ack,
    input  s_req,
    output s_ack,
    input  s_data,
    output o0_req,
    input  o0_ack,
    output sel,
    output sel_en
);
    reg p0;
    reg p1;
    reg sp;
    reg q;
    reg sel_q;
    assign sel_en = (s_req != sp);
    always @(*)
        if (sel_en) sel_q = s_data;
    wire data_ready = sel_q ? (i1_req != p1) : (i0_req != p0);
    wire fire = sel_en && data_ready && (o0_ack == q);
    assign i0_ack = p0;
    assign i1_ack = p1;
    assign s_ack = sp;
    assign o0_req = q;
    assign sel = sel_q;
    always @(posedge fire or negedge rst_n)
        if (!rst_n) begin
            p0 <= 1'b0;
            p1 <= 1'b0;
            sp <= 1'b0;
            q <= 1'b0;
        end else begin
            sp <= ~sp;
            q <= ~q;
            if (sel_q) p1 <= ~p1;
            else p0 <= ~p0;
        end
endmodule

module yak_demux (
    input  rst_n,
    input  i0_req,
    output i0_ack,
    input  s_req,
    output s_ack,
    input  s_data,
    output o0_req,
    input  o0_ack,
    output o1_req,
    input  o1_ack,
    output sel,
    output sel_en
);
    reg ip;
    reg sp;
    reg q0;
    reg q1;
    reg sel_q;
    assign sel_en = (s_req != sp);
    always @(*)
        if (sel_en) sel_q = s_data;
    wire out_free = sel_q ? (o1_ack == q1) : (o0_ack == q0);
    wire fire = sel_en && (i0_req != ip) && out_free;
    assign i0_ack = ip;
    assign s_ack = sp;
    assign o0_req = q0;
    assign o1_req = q1;
    assign sel = sel_q;
    always @(posedge fire or negedge rst_n)
        if (!rst_n) begin
            ip <= 1'b0;
            sp <= 1'b0;
            q0 <= 1'b0;
            q1 <= 1'b0;
        end else begin
            ip <= ~ip;
            sp <= ~sp;
            if (sel_q) q1 <= ~q1;
            else q0 <= ~q0;
        end
endmodule
)";

/// Template module for a node kind, empty when the node has no controller.
inline std::string cell_module(NodeKind k) {
    switch (k) {
        case NodeKind::Reg: return "yak_stage";
        case NodeKind::Join: return "yak_join";
        case NodeKind::Fork: return "yak_fork";
        case NodeKind::Merge: return "yak_merge";
        case NodeKind::Arbit: return "yak_arbit";
        case NodeKind::Mux: return "yak_mux";
        case NodeKind::Demux: return "yak_demux";
        default: return "";
    }
}

/// Port order of every template, as declared in kCellLibrary.
inline const std::map<std::string, std::vector<std::string>>& cell_ports() {
    static const std::map<std::string, std::vector<std::string>> ports = {
        {"yak_stage", {"rst_n", "i0_req", "i0_ack", "o0_req", "o0_ack", "en"}},
        {"yak_join", {"rst_n", "i0_req", "i0_ack", "i1_req", "i1_ack", "o0_req", "o0_ack"}},
        {"yak_fork", {"rst_n", "i0_req", "i0_ack", "o0_req", "o0_ack", "o1_req", "o1_ack"}},
        {"yak_merge", {"rst_n", "i0_req", "i0_ack", "i1_req", "i1_ack", "o0_req", "o0_ack", "sel"}},
        {"yak_arbit", {"rst_n", "i0_req", "i0_ack", "i1_req", "i1_ack", "o0_req", "o0_ack", "sel"}},
        {"yak_mux",
         {"rst_n", "i0_req", "i0_ack", "i1_req", "i1_ack", "s_req", "s_ack", "s_data", "o0_req", "o0_ack", "sel",
          "sel_en"}},
        {"yak_demux",
         {"rst_n", "i0_req", "i0_ack", "s_req", "s_ack", "s_data", "o0_req", "o0_ack", "o1_req", "o1_ack", "sel",
          "sel_en"}},
    };
    return ports;
}

}  // namespace yak

#endif  // YAK_VERILOG_CELLS_HPP
