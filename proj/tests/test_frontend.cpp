#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "oracles.hpp"
#include "support.hpp"
#include "yak/lexer.hpp"
#include "yak/parser.hpp"
#include "yak/printer.hpp"

using namespace yak;

namespace {

std::vector<std::pair<TokenKind, std::string>> kinds(std::string_view src) {
    std::vector<std::pair<TokenKind, std::string>> out;
    for (const auto& t : tokenize(src)) out.emplace_back(t.kind, t.text);
    return out;
}

const FlowExpr& only_flow(const AstProgram& p) {
    return p.components.back().body->front();
}

}  // namespace

TEST(Tokenize, Empty) { EXPECT_TRUE(tokenize("").empty()); }

TEST(Tokenize, ChannelDeclaration) {
    using K = TokenKind;
    std::vector<std::pair<TokenKind, std::string>> want = {{K::Keyword, "chan"}, {K::Identifier, "foo"},
                                                           {K::Punctuation, ";"}};
    EXPECT_EQ(kinds("chan foo;"), want);
}

TEST(Tokenize, LogicRange) {
    using K = TokenKind;
    std::vector<std::pair<TokenKind, std::string>> want = {
        {K::Keyword, "logic"}, {K::Punctuation, "["}, {K::Integer, "7"},
        {K::Punctuation, ":"}, {K::Integer, "0"},     {K::Punctuation, "]"}};
    EXPECT_EQ(kinds("logic[7:0]"), want);
}

TEST(Tokenize, CommentsAndPositions) {
    auto t = tokenize("a // gone\n  -> b");
    ASSERT_EQ(t.size(), 3u);
    EXPECT_EQ(t[1].text, "->");
    EXPECT_EQ(t[1].line, 2);
    EXPECT_EQ(t[1].column, 3);
    EXPECT_EQ(t[2].column, 6);
}

TEST(Tokenize, EveryKeywordIsKeyword) {
    for (auto kw : {"chan", "sig", "def", "comb", "logic", "join", "fork", "merge", "mux", "demux", "arbit", "reg",
                    "source", "sink", "input", "output", "blackbox"}) {
        auto t = tokenize(kw);
        ASSERT_EQ(t.size(), 1u);
        EXPECT_EQ(t[0].kind, TokenKind::Keyword) << kw;
    }
    EXPECT_EQ(tokenize("chans")[0].kind, TokenKind::Identifier);
}

TEST(Tokenize, RejectsStrayCharacter) {
    EXPECT_EQ(error_codes([] { tokenize("a $ b"); }), std::vector<std::string>{"E_LEX"});
    EXPECT_EQ(error_codes([] { tokenize("a@"); }), std::vector<std::string>{"E_LEX"});
}

TEST(Tokenize, TokensAreNonEmptyAndCoverSource) {
    std::string src = read_design("gcd_listing.yak");
    std::size_t covered = 0;
    for (const auto& t : tokenize(src)) {
        EXPECT_FALSE(t.text.empty());
        covered += t.text.size();
    }
    std::size_t significant = 0;
    bool comment = false;
    for (std::size_t i = 0; i < src.size(); ++i) {
        if (src[i] == '\n') comment = false;
        if (!comment && src[i] == '/' && i + 1 < src.size() && src[i + 1] == '/') comment = true;
        if (!comment && !std::isspace(static_cast<unsigned char>(src[i]))) ++significant;
    }
    EXPECT_EQ(covered, significant);
}

TEST(Parse, JoinAggregate) {
    auto p = parse_program("[chan in0, chan in1] -> join() -> chan c;");
    ASSERT_EQ(p.components.size(), 1u);
    EXPECT_EQ(p.components[0].name, "main");
    EXPECT_TRUE(p.components[0].implicit);
    const auto& f = only_flow(p);
    ASSERT_EQ(f.terms.size(), 3u);
    const auto& agg = std::get<Aggregate>(f.terms[0]);
    ASSERT_EQ(agg.elements.size(), 2u);
    EXPECT_EQ(std::get<ChannelDecl>(agg.elements[0].terms[0]).name, "in0");
    EXPECT_EQ(std::get<ChannelDecl>(agg.elements[1].terms[0]).name, "in1");
    EXPECT_EQ(std::get<BuiltinInst>(f.terms[1]).kind, Builtin::Join);
    EXPECT_EQ(std::get<ChannelDecl>(f.terms[2]).name, "c");
}

TEST(Parse, TypedChannel) {
    auto p = parse_program("chan baz : {sig x : logic[7:0]};");
    const auto& d = std::get<ChannelDecl>(only_flow(p).terms[0]);
    EXPECT_EQ(d.name, "baz");
    ASSERT_TRUE(d.type);
    ASSERT_EQ(d.type->signals.size(), 1u);
    EXPECT_EQ(d.type->signals[0].name, "x");
    EXPECT_EQ(d.type->signals[0].width, 8u);
}

TEST(Parse, Prototype) {
    auto p = parse_program("def join[chan a, chan b]()[chan c];");
    ASSERT_EQ(p.components.size(), 1u);
    const auto& c = p.components[0];
    EXPECT_EQ(c.name, "join");
    EXPECT_EQ(c.inputs.size(), 2u);
    EXPECT_EQ(c.side.size(), 0u);
    EXPECT_EQ(c.outputs.size(), 1u);
    EXPECT_FALSE(c.body.has_value());
}

TEST(Parse, LogicWidths) {
    auto p = parse_program("chan a : {sig x : logic, sig y : logic[0:0], sig z : logic[31:0], sig w};");
    const auto& sigs = std::get<ChannelDecl>(only_flow(p).terms[0]).type->signals;
    EXPECT_EQ(sigs[0].width, 1u);
    EXPECT_EQ(sigs[1].width, 1u);
    EXPECT_EQ(sigs[2].width, 32u);
    EXPECT_FALSE(sigs[3].width.has_value());
}

TEST(Parse, Errors) {
    EXPECT_EQ(error_codes([] { parse_program("a -> ;"); }), std::vector<std::string>{"E_PARSE"});
    EXPECT_EQ(error_codes([] { parse_program("[chan a, chan b -> join();"); }), std::vector<std::string>{"E_PARSE"});
    EXPECT_EQ(error_codes([] { parse_program("[a, b] -> mux() -> chan c;"); }),
              std::vector<std::string>{"E_PARSE"});
    EXPECT_EQ(error_codes([] { parse_program("chan a -> chan b"); }), std::vector<std::string>{"E_PARSE"});
}

TEST(ParseComb, MultiStatementBlock) {
    auto s = parse_comb_block("comb {sig s : logic = a != b;}");
    ASSERT_EQ(s.size(), 1u);
    EXPECT_TRUE(s[0].declares);
    EXPECT_EQ(s[0].target, "s");
    EXPECT_EQ(s[0].width, 1u);
    EXPECT_EQ(s[0].value.kind, ExprKind::Binary);
    EXPECT_EQ(s[0].value.op, "!=");

    auto a = parse_comb_block("comb {a = a - b;}");
    ASSERT_EQ(a.size(), 1u);
    EXPECT_FALSE(a[0].declares);
    EXPECT_EQ(a[0].target, "a");
    EXPECT_EQ(a[0].value.op, "-");

    EXPECT_TRUE(parse_comb_block("comb {}").empty());
}

TEST(ParseComb, Precedence) {
    auto s = parse_comb_block("comb {x = a + b * c == d && e | f;}");
    // ((a + (b * c)) == d) && (e | f)
    const Expr& e = s[0].value;
    EXPECT_EQ(e.op, "&&");
    EXPECT_EQ(e.args[0].op, "==");
    EXPECT_EQ(e.args[0].args[0].op, "+");
    EXPECT_EQ(e.args[0].args[0].args[1].op, "*");
    EXPECT_EQ(e.args[1].op, "|");
    auto t = parse_comb_block("comb {x = a ? b : c ? d : e;}");
    EXPECT_EQ(t[0].value.kind, ExprKind::Ternary);
    EXPECT_EQ(t[0].value.args[2].kind, ExprKind::Ternary);
}

TEST(ParseComb, RedeclarationRejected) {
    EXPECT_EQ(error_codes([] { parse_comb_block("comb {sig a = 1; sig a = 2;}"); }),
              std::vector<std::string>{"E_REDECLARED"});
}

TEST(Parse, ListingParses) { EXPECT_NO_THROW(parse_program(read_design("gcd_listing.yak"))); }

TEST(Parse, BlackboxForms) {
    auto bare = parse_program("blackbox(foo, chan a : {sig b : logic}, chan d : {sig e : logic});");
    auto br = parse_program("blackbox(foo, [chan a : {sig b : logic}], [chan d : {sig e : logic}]);");
    const auto& x = std::get<BlackboxRef>(only_flow(bare).terms[0]);
    const auto& y = std::get<BlackboxRef>(only_flow(br).terms[0]);
    ASSERT_EQ(x.inputs.size(), 1u);
    ASSERT_EQ(x.outputs.size(), 1u);
    EXPECT_EQ(x.inputs[0].name, y.inputs[0].name);
    EXPECT_EQ(x.outputs[0].name, y.outputs[0].name);
}

// Printing and re-parsing gives the same tree, positions aside.
TEST(RoundTrip, Designs) {
    for (const auto& entry : std::filesystem::directory_iterator(YAK_DESIGNS_DIR)) {
        std::string src = read_design(entry.path().filename().string());
        auto p = parse_program(src);
        auto q = parse_program(print_program(p));
        EXPECT_EQ(dump_ast(p), dump_ast(q)) << entry.path();
        EXPECT_EQ(print_program(p), print_program(q)) << entry.path();
    }
}

TEST(RoundTrip, RandomPrograms) {
    std::mt19937 rng(7);
    for (int i = 0; i < 200; ++i) {
        oracle::DesignGenOptions o;
        o.max_steps = 10;
        o.rings = o.steering = o.sources = o.loose = true;
        auto d = oracle::random_design(rng, o);
        auto p = parse_program(d.source);
        auto q = parse_program(print_program(p));
        ASSERT_EQ(dump_ast(p), dump_ast(q)) << d.source;
    }
}

TEST(Parse, Deterministic) {
    std::string src = read_design("gcd_listing.yak");
    EXPECT_EQ(dump_ast(parse_program(src)), dump_ast(parse_program(src)));
}
