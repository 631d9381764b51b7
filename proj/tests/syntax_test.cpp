#include <gtest/gtest.h>

#include <filesystem>

#include "axon/syntax.hpp"
#include "test_util.hpp"

namespace axon {
namespace {

using testing::corpus_path;
using testing::listing;
using testing::read_text;

const FnExpr& fn_of(const TopBinding& b) { return std::get<FnExpr>(b.expr->node); }

TEST(Parse, PointwiseListing) {
  Program p = parse_program(listing("pointwise.axon"));
  ASSERT_EQ(p.bindings.size(), 1u);
  EXPECT_EQ(p.bindings[0].names, std::vector<std::string>{"f"});
  const FnExpr& fn = fn_of(p.bindings[0]);
  EXPECT_EQ(fn.params.size(), 2u);
  EXPECT_EQ(fn.body.lets.size(), 2u);
  const auto* result = std::get_if<TupleExpr>(&fn.body.result->node);
  ASSERT_NE(result, nullptr);
  EXPECT_EQ(result->elements.size(), 2u);
}

TEST(Parse, Identity) {
  Program p = parse_program("fn (a) { a }");
  ASSERT_EQ(p.bindings.size(), 1u);
  EXPECT_TRUE(p.bindings[0].names.empty());
  EXPECT_EQ(p.bindings[0].display_name(), "_1");
  EXPECT_EQ(to_sexpr(p), "(binding () (fn ((a)) (var a)))\n");
}

TEST(Parse, LstmListingHasNestedTuples) {
  Program p = parse_program(listing("lstm.axon"));
  ASSERT_EQ(p.bindings.size(), 2u);
  const FnExpr& cell = fn_of(p.bindings[0]);
  ASSERT_TRUE(cell.params[0].annotation.has_value());
  EXPECT_TRUE(cell.params[0].annotation->is_tuple());
  EXPECT_EQ(cell.body.lets[0].names, (std::vector<std::string>{"h1", "c1"}));
  EXPECT_EQ(to_sexpr(*cell.body.result), "(tuple (tuple (var hnext) (var cnext)) (var cnext))");
}

TEST(Parse, EveryListing) {
  for (const auto& entry : std::filesystem::directory_iterator(AXON_LISTINGS_DIR)) {
    SCOPED_TRACE(entry.path().string());
    EXPECT_NO_THROW(parse_program(read_text(entry.path().string())));
  }
}

TEST(Parse, Annotations) {
  Program p = parse_program(listing("conv.axon"));
  const FnExpr& fn = fn_of(p.bindings[0]);
  const Annotation& x = *fn.params[0].annotation;
  EXPECT_EQ(x.element, "t");
  EXPECT_EQ(to_string(*x.shape), "i");
  EXPECT_EQ(pretty_print(*fn.result_annotation), "t [4,8,1024,256]");

  Program m = parse_program(listing("matmul.axon"));
  const Annotation& r = *fn_of(m.bindings[0]).result_annotation;
  EXPECT_FALSE(r.element.has_value());
  EXPECT_EQ(to_string(*r.shape), "r");

  Program s = parse_program(listing("max_scalar.axon"));
  const Annotation& a = *fn_of(s.bindings[0]).params[0].annotation;
  EXPECT_EQ(a.element, "f32");
  EXPECT_FALSE(a.shape.has_value());
  EXPECT_EQ(pretty_print(a), "f32");
}

TEST(Parse, OperatorsAndLiterals) {
  Program p = parse_program("f = fn (x) { reduce(+, -inf, x) - 2 * x / 0f + -3 }");
  EXPECT_EQ(to_sexpr(*std::get<FnExpr>(p.bindings[0].expr->node).body.result),
            "(+ (- (call reduce (var +) (lit -inf) (var x)) (/ (* (lit 2) (var x)) (lit 0f))) (lit -3))");
}

TEST(Parse, TrailingSemicolonsAndComments) {
  Program p = parse_program("// leading\ng = fn(a) { a; };\n f = fn(b) { g(b) } ;");
  EXPECT_EQ(p.bindings.size(), 2u);
}

TEST(Parse, SpansLieWithinInput) {
  std::string text = listing("attention.axon");
  Program p = parse_program(text);
  std::function<void(const Expr&)> check = [&](const Expr& e) {
    EXPECT_GE(e.span.line, 1);
    EXPECT_LE(e.span.offset + e.span.length, text.size());
    std::visit(
        [&](const auto& node) {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, FnExpr>) {
            for (const Let& l : node.body.lets) check(*l.value);
            check(*node.body.result);
          } else if constexpr (std::is_same_v<T, Call>) {
            for (const auto& a : node.args) check(*a);
          } else if constexpr (std::is_same_v<T, BinOp>) {
            check(*node.lhs);
            check(*node.rhs);
          } else if constexpr (std::is_same_v<T, TupleExpr>) {
            for (const auto& a : node.elements) check(*a);
          }
        },
        e.node);
  };
  for (const TopBinding& b : p.bindings) check(*b.expr);
  EXPECT_EQ(p.bindings[1].span.line, 12);
}

TEST(Parse, Errors) {
  EXPECT_THROW(parse_program("f = fn (a) { a }; f = fn (b) { b }"), SyntaxError);
  EXPECT_THROW(parse_program("f = fn (a) { _ }"), SyntaxError);
  EXPECT_THROW(parse_program("f = fn (a) { a = a; }"), SyntaxError);
  EXPECT_THROW(parse_program("f = fn (a : f32 [0]) { a }"), SyntaxError);
  EXPECT_THROW(parse_program("X1 = residual(..., LSTM1, X0);"), SyntaxError);
  try {
    parse_program("f = fn (a) {\n  a +\n}");
    FAIL();
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.span().line, 3);
    EXPECT_EQ(e.span().col, 1);
  }
}

TEST(PrettyPrint, RoundTripsListingsAndCorpus) {
  std::vector<std::string> files;
  for (const auto& entry : std::filesystem::directory_iterator(AXON_LISTINGS_DIR)) files.push_back(entry.path());
  for (const auto& entry : std::filesystem::directory_iterator(AXON_CORPUS_DIR)) {
    if (entry.path().extension() == ".axon") files.push_back(entry.path());
  }
  for (const std::string& file : files) {
    SCOPED_TRACE(file);
    Program p = parse_program(read_text(file));
    std::string printed = pretty_print(p);
    Program q = parse_program(printed);
    EXPECT_EQ(to_sexpr(p), to_sexpr(q));
    EXPECT_EQ(pretty_print(q), printed);
  }
}

TEST(PrettyPrint, TupleAnnotationSurvives) {
  Program p = parse_program(listing("lstm.axon"));
  EXPECT_NE(pretty_print(p).find("state : (t s1, t s2)"), std::string::npos);
}

TEST(PrettyPrint, ParenthesizesByPrecedence) {
  Program p = parse_program("f = fn (a, b, c) { (a + b) * c - (a - b) }");
  EXPECT_NE(pretty_print(p).find("(a + b) * c - (a - b)"), std::string::npos);
}

}  // namespace
}  // namespace axon
