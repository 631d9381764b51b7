#include <gtest/gtest.h>

#include "axon/shape.hpp"

namespace axon {
namespace {

Dim c(std::int64_t v) { return Dim::constant(v); }
Dim v(const char* n) { return Dim::var(n); }
Dim op(DimOp o, Dim a, Dim b) { return Dim::binary(o, std::move(a), std::move(b)); }
Shape sv(const char* n) { return Shape::var(n); }

TEST(ParseShape, ConcreteWithStar) {
  EXPECT_EQ(parse_shape("[10, *, 3]"), Shape::concrete({c(10), Dim::star(), c(3)}));
}

TEST(ParseShape, Scalar) {
  Shape s = parse_shape("[]");
  EXPECT_TRUE(s.is_scalar());
  EXPECT_EQ(s, Shape());
}

TEST(ParseShape, Append) {
  EXPECT_EQ(parse_shape("s @ [x, y]"), Shape::append({sv("s"), Shape::concrete({v("x"), v("y")})}));
}

TEST(ParseShape, ArithmeticDimension) {
  EXPECT_EQ(parse_shape("[(+ d 1), n]"), Shape::concrete({op(DimOp::add, v("d"), c(1)), v("n")}));
}

TEST(ParseShape, RejectsZero) { EXPECT_THROW(parse_shape("[0]"), ShapeSyntaxError); }

TEST(ParseShape, ReportsPosition) {
  try {
    parse_shape("[a, b");
    FAIL() << "expected a syntax error";
  } catch (const ShapeSyntaxError& e) {
    EXPECT_EQ(e.position(), 5u);
  }
}

TEST(ParseShape, RejectsTrailingInput) { EXPECT_THROW(parse_shape("[a] b"), ShapeSyntaxError); }

TEST(ParseShape, RejectsOverflow) { EXPECT_THROW(parse_shape("[99999999999999999999999]"), ShapeSyntaxError); }

TEST(ParseShape, PrefixParsingLeavesRest) {
  std::size_t pos = 0;
  Shape s = parse_shape_at("s@[d] , rest", pos);
  EXPECT_EQ(to_string(s), "s@[d]");
  EXPECT_EQ(pos, 5u);
}

TEST(ValidateShape, AcceptsWellFormed) {
  EXPECT_TRUE(validate_shape(Shape::concrete({c(256)})).empty());
  EXPECT_TRUE(validate_shape(Shape::append({sv("s"), Shape::concrete({v("x")})})).empty());
}

TEST(ValidateShape, SinglePartAppend) {
  auto violations = validate_shape(Shape::append({sv("s")}));
  ASSERT_EQ(violations.size(), 1u);
  EXPECT_EQ(violations[0].kind, Violation::Kind::append_arity);
}

TEST(ValidateShape, StarInArithmetic) {
  auto violations = validate_shape(Shape::concrete({op(DimOp::add, Dim::star(), c(1))}));
  ASSERT_EQ(violations.size(), 1u);
  EXPECT_EQ(violations[0].kind, Violation::Kind::star_in_arithmetic);
}

TEST(ValidateShape, NonPositiveConstant) {
  auto violations = validate_shape(Shape::concrete({c(0)}));
  ASSERT_EQ(violations.size(), 1u);
  EXPECT_EQ(violations[0].kind, Violation::Kind::non_positive_constant);
}

TEST(ValidateShape, SortConflict) {
  auto violations = validate_shape(Shape::append({sv("s"), Shape::concrete({v("s")})}));
  ASSERT_FALSE(violations.empty());
  EXPECT_EQ(violations[0].kind, Violation::Kind::sort_conflict);
}

TEST(ValidateShape, BadIdentifier) {
  auto violations = validate_shape(sv("9x"));
  ASSERT_EQ(violations.size(), 1u);
  EXPECT_EQ(violations[0].kind, Violation::Kind::bad_identifier);
}

TEST(Simp, RemovesEmptyAppendPart) {
  Term t = Shape::append({Shape(), Shape::concrete({v("n"), v("n")})});
  EXPECT_EQ(simp(t), Term(Shape::concrete({v("n"), v("n")})));
}

TEST(Simp, MovesConstantRight) {
  Term t = op(DimOp::add, c(1), op(DimOp::sub, v("h"), c(8)));
  EXPECT_EQ(simp(t), Term(op(DimOp::add, op(DimOp::sub, v("h"), c(8)), c(1))));
}

TEST(Simp, FoldsConstants) { EXPECT_EQ(simp(Term(op(DimOp::mul, c(2), c(3)))), Term(c(6))); }

TEST(Simp, MergesAdjacentConcreteParts) {
  Term t = Shape::append({Shape::concrete({v("a")}), Shape::concrete({v("b")})});
  EXPECT_EQ(simp(t), Term(Shape::concrete({v("a"), v("b")})));
}

TEST(Simp, FlattensNestedAppends) {
  Shape nested = Shape::append({sv("a"), Shape::append({sv("b"), sv("c")})});
  EXPECT_EQ(to_string(simp(nested)), "a@b@c");
}

TEST(Simp, OrdersCommutativeOperands) {
  EXPECT_EQ(to_string(simp(parse_dim("(+ 3 (+ b a))"))), "(+ (+ a b) 3)");
  EXPECT_EQ(to_string(simp(parse_dim("(* 2 (* x 3))"))), "(* x 6)");
  EXPECT_EQ(to_string(simp(parse_dim("(* x 1)"))), "x");
}

TEST(Simp, KeepsLikeTermsApart) { EXPECT_EQ(to_string(simp(parse_dim("(+ d d)"))), "(+ d d)"); }

TEST(Simp, DivisionIsFoldedOnlyWhenConstant) {
  EXPECT_EQ(simp(parse_dim("(/ 7 2)")), c(3));
  EXPECT_EQ(to_string(simp(parse_dim("(/ (* x 2) 2)"))), "(/ (* x 2) 2)");
}

TEST(Simp, NonPositiveFoldIsAnError) {
  EXPECT_THROW(simp(parse_dim("(- 3 3)")), InvalidDimensionError);
  EXPECT_THROW(simp(parse_dim("(/ 1 2)")), InvalidDimensionError);
}

TEST(Fsv, CollectsAllVariables) {
  EXPECT_EQ(fsv(Term(parse_shape("s@[d1,d2]"))), (std::set<std::string>{"s", "d1", "d2"}));
  EXPECT_TRUE(fsv(Term(parse_shape("[4,8]"))).empty());
  EXPECT_EQ(fsv(Term(parse_dim("(+ h 1)"))), (std::set<std::string>{"h"}));
}

TEST(Substitute, MatmulRewrite) {
  Binding b{{"s", Shape()}, {"d1", v("n")}, {"d3", v("n")}};
  EXPECT_EQ(substitute(Term(parse_shape("s@[d1,d3]")), b), Term(parse_shape("[n,n]")));
}

TEST(Substitute, EmptyBindingIsIdentity) {
  Term t = parse_shape("[(+ 1 a)]@s");
  EXPECT_EQ(substitute(t, {}), t);
}

TEST(Substitute, UnmentionedBindingIsIdentity) {
  Term t = parse_shape("[(+ 1 a)]@s");
  EXPECT_EQ(substitute(t, Binding{{"q", c(3)}}), t);
}

TEST(Substitute, FoldsAfterReplacement) {
  EXPECT_EQ(substitute(Term(parse_dim("(- h 8)")), Binding{{"h", c(1031)}}), Term(c(1023)));
}

TEST(Substitute, SortMismatch) {
  EXPECT_THROW(substitute(Term(parse_shape("[d]")), Binding{{"d", Shape()}}), SortError);
  EXPECT_THROW(substitute(Term(parse_shape("s")), Binding{{"s", c(2)}}), SortError);
}

TEST(MinRank, Examples) {
  EXPECT_EQ(min_rank(parse_shape("s@[d1,d2]")), (RankBound{2, true}));
  EXPECT_EQ(min_rank(parse_shape("[4,8,8,8]")), (RankBound{4, false}));
  EXPECT_EQ(min_rank(parse_shape("s")), (RankBound{0, true}));
}

TEST(MinRank, MatchesMergedLengthForConstantParts) {
  Shape s = Shape::append({parse_shape("[1,2]"), Shape(), parse_shape("[3]")});
  EXPECT_EQ(min_rank(s).known, simp(s).dims().size());
}

TEST(Print, RoundTripsThroughParser) {
  for (const char* text : {"[]", "[10,*,3]", "s@[x,y]", "[(+ d 1),n]", "a@[(/ (* x 2) 3)]@b"}) {
    EXPECT_EQ(to_string(parse_shape(text)), text);
  }
}

TEST(ReplaceSubterm, ReplacesEveryOccurrence) {
  Dim e = parse_dim("(+ a b)");
  Term t = parse_shape("[(+ a b), (* (+ a b) 2)]");
  EXPECT_TRUE(contains_subterm(t, e));
  Term r = replace_subterm(t, e, c(7));
  EXPECT_FALSE(contains_subterm(r, e));
  EXPECT_EQ(simp(r), Term(parse_shape("[7,14]")));
}

}  // namespace
}  // namespace axon
