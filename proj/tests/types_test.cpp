#include <gtest/gtest.h>

#include "axon/builtins.hpp"
#include "axon/typecheck.hpp"
#include "axon/types.hpp"

namespace axon {
namespace {

TEST(TypeNotation, RoundTrips) {
  for (const char* sig : {"(t s, t s) -> t s", "t s -> t s", "((t s -> u s2), t [d]@s) -> u [d]@s2",
                          "('st, (('st, t s) -> ('st, u s2)), t [d]@s) -> ('st, u [d]@s2)", "(f32 [], i32 [2,3])",
                          "((f32 [], f32 [])) -> f32 []"}) {
    EXPECT_EQ(to_string(parse_type(sig)), sig);
  }
}

TEST(TypeNotation, ElementNames) {
  Type t = parse_type("f32 [n]");
  EXPECT_FALSE(t.as_tensor()->elem.is_var);
  EXPECT_TRUE(parse_type("t [n]").as_tensor()->elem.is_var);
  EXPECT_THROW(parse_type("f32 [n] extra"), TypeSyntaxError);
}

TEST(Scheme, QuantifiesEverySort) {
  TypeScheme s = scheme_of("('a, t s@[d]) -> t s");
  std::vector<QuantVar> expected{{"a", VarSort::type}, {"t", VarSort::elem}, {"s", VarSort::shape}, {"d", VarSort::dim}};
  EXPECT_EQ(s.quantified, expected);
}

TEST(Builtins, DefaultTableOrderAndContents) {
  BuiltinTable table = default_table();
  for (const char* name : {"+", "-", "*", "/", "max", "exp", "matmul", "concat", "conv", "transpose", "map", "reduce",
                           "reverse", "loop", "lstmStep"}) {
    EXPECT_NE(table.find(name), nullptr) << name;
  }
  const auto& plus = *table.find("+");
  ASSERT_EQ(plus.size(), 3u);
  EXPECT_EQ(to_string(plus[0].body), "(t s, t s) -> t s");
  EXPECT_EQ(to_string(plus[1].body), "(t [d]@s, t s) -> t [d]@s");
  EXPECT_EQ(to_string(plus[2].body), "(t s, t [d]@s) -> t [d]@s");
  EXPECT_EQ(table.find("lstmStep")->front().body.as_fn()->params.size(), 15u);
}

TEST(Builtins, DuplicateRegistration) {
  BuiltinTable table = default_table();
  EXPECT_THROW(register_builtin(table, "matmul", {scheme_of("t s -> t s")}), BuiltinError);
  EXPECT_NO_THROW(register_builtin(table, "matmul", {scheme_of("t s -> t s")}, true));
}

TEST(Builtins, OpenScheme) {
  TypeScheme open{{}, parse_type("t s -> t s"), {}};
  EXPECT_THROW(register_builtin(BuiltinTable{}, "id", {open}), BuiltinError);
  EXPECT_THROW(register_builtin(BuiltinTable{}, "none", {}), BuiltinError);
}

Type tensor(const char* elem, const char* shape) {
  return Type::tensor(ElemType{elem, !is_element_type_name(elem)}, parse_shape(shape));
}

Type apply(const BuiltinTable& table, const std::string& name, const std::vector<Type>& args, InferState& state) {
  Type result = resolve_overload(name, *table.find(name), args, state);
  return state.resolve(result);
}

TEST(Builtins, MatmulGeneratesThreeConstraints) {
  InferState state;
  BuiltinTable table = default_table();
  Type sig = instantiate(table.find("matmul")->front(), state);
  const FnType& fn = *sig.as_fn();
  unify(fn.params[0], tensor("f32", "[n,n]"), state);
  unify(fn.params[1], tensor("f32", "[n,n]"), state);
  unify(*fn.result, tensor("f32", "r"), state);
  ASSERT_EQ(state.constraints.size(), 3u);
  for (const Constraint& c : state.constraints) {
    EXPECT_TRUE(std::get<Shape>(c.lhs).is_append()) << to_string(c);
  }
  EXPECT_EQ(to_string(state.constraints[0].rhs), "[n,n]");
  EXPECT_EQ(to_string(state.constraints[2].rhs), "r");
}

TEST(Builtins, ConcatSumsOuterDimension) {
  InferState state;
  Type out = apply(default_table(), "concat", {tensor("f32", "[3]@s"), tensor("f32", "[5]@s")}, state);
  EXPECT_EQ(to_string(out), "f32 [8]@s");
}

TEST(Builtins, ConcatOfEqualDimensions) {
  InferState state;
  Type out = apply(default_table(), "concat", {tensor("f32", "[d]@s"), tensor("f32", "[d]@s")}, state);
  EXPECT_EQ(to_string(out), "f32 [(+ d d)]@s");
}

TEST(Builtins, ConvForward) {
  InferState state;
  Type out = apply(default_table(), "conv", {tensor("f32", "[4,8,1031,263]"), tensor("f32", "[4,8,8,8]")}, state);
  EXPECT_EQ(to_string(out), "f32 [4,8,1024,256]");
}

TEST(Builtins, CustomRelu) {
  BuiltinTable table = register_builtin(default_table(), "relu", {scheme_of("t s -> t s")});
  Program p = parse_program("f = fn (x) { relu(x) }");
  InferResult r = infer_program(p, table);
  ASSERT_EQ(r.bindings.size(), 1u);
  EXPECT_EQ(r.bindings[0].signature, "t a -> t a");
}

TEST(Builtins, ReplacedConvChangesInferredInput) {
  // Padding of one on each side: out = h - r + 3.
  BuiltinTable padded = register_builtin(
      default_table(), "conv", {scheme_of("(t [n,c,h,w], t [k,c,r,s]) -> t [n,c,(+ 3 (- h r)),(+ 3 (- w s))]")}, true);
  Program p = parse_program("g = fn (x : t i, f : t [4,8,8,8]) : t [4,8,1024,256] { conv(x, f) }");
  EXPECT_EQ(infer_program(p, default_table()).bindings[0].signature,
            "(t [4,8,1031,263], t [4,8,8,8]) -> t [4,8,1024,256]");
  EXPECT_EQ(infer_program(p, padded).bindings[0].signature, "(t [4,8,1029,261], t [4,8,8,8]) -> t [4,8,1024,256]");
}

}  // namespace
}  // namespace axon
