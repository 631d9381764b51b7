#include <gtest/gtest.h>

#include "axon/typecheck.hpp"
#include "test_util.hpp"

namespace axon {
namespace {

using testing::corpus_path;
using testing::read_text;

InferResult infer_text(const std::string& text) { return infer_program(parse_program(text), default_table()); }

std::map<std::string, std::string> signatures(const InferResult& r) {
  std::map<std::string, std::string> out;
  for (const BindingReport& b : r.bindings) out[b.name] = b.signature;
  return out;
}

std::map<std::string, std::string> corpus(const std::string& file) {
  return signatures(infer_text(read_text(corpus_path(file))));
}

Type tensor(const char* elem, const char* shape) {
  return Type::tensor(ElemType{elem, !is_element_type_name(elem)}, parse_shape(shape));
}

TEST(Unify, TensorsAddShapeConstraint) {
  InferState state;
  unify(tensor("f32", "s1"), tensor("f32", "[2]"), state);
  ASSERT_EQ(state.constraints.size(), 1u);
  EXPECT_EQ(to_string(state.constraints[0]), "s1 = [2]");
}

TEST(Unify, SameVariableIsNoChange) {
  InferState state;
  unify(Type::var("a"), Type::var("a"), state);
  EXPECT_TRUE(state.types.empty());
  EXPECT_TRUE(state.constraints.empty());
}

TEST(Unify, OccursCheck) {
  InferState state;
  EXPECT_THROW(unify(Type::var("a"), Type::fn({Type::var("a")}, Type::var("a")), state), TypeError);
}

TEST(Unify, Mismatches) {
  InferState state;
  EXPECT_THROW(unify(Type::tuple({tensor("f32", "[]"), tensor("f32", "[]")}), tensor("f32", "[]"), state), TypeError);
  EXPECT_THROW(unify(tensor("f32", "[]"), tensor("i32", "[]"), state), TypeError);
  EXPECT_THROW(unify(Type::fn({tensor("t", "s")}, tensor("t", "s")),
                     Type::fn({tensor("t", "s"), tensor("t", "s")}, tensor("t", "s")), state),
               TypeError);
}

TEST(Unify, ElementVariables) {
  InferState state;
  unify(tensor("t", "[]"), tensor("f32", "[]"), state);
  EXPECT_EQ(state.resolve(ElemType{"t", true}), (ElemType{"f32", false}));
}

TEST(Instantiate, FreshFamiliesAreDisjoint) {
  InferState state;
  BuiltinTable table = default_table();
  const TypeScheme& matmul = table.find("matmul")->front();
  VarList first, second;
  first.add_type(instantiate(matmul, state));
  second.add_type(instantiate(matmul, state));
  ASSERT_EQ(first.vars().size(), 5u);
  for (const QuantVar& v : first.vars()) EXPECT_FALSE(second.contains(v.name)) << v.name;
}

TEST(Instantiate, MonomorphicIsUnchanged) {
  InferState state;
  Type body = tensor("f32", "[2,3]");
  EXPECT_EQ(instantiate(TypeScheme{{}, body, {}}, state), body);
  EXPECT_EQ(state.counter, 0);
}

TEST(Generalize, QuantifiesFreeVariables) {
  TypeScheme s = generalize(parse_type("f32 [a]@b -> f32 [a]@b"), {}, {});
  EXPECT_EQ(s.quantified.size(), 2u);
}

TEST(Generalize, EnvironmentPinsResidualPartners) {
  ConstraintSet residual = parse_constraints("(+ a b) = 7");
  VarList env;
  env.add("a", VarSort::dim);
  TypeScheme s = generalize(parse_type("f32 [b] -> f32 [c]"), residual, env);
  ASSERT_EQ(s.quantified.size(), 1u);
  EXPECT_EQ(s.quantified[0].name, "c");
}

TEST(Generalize, ScalarFunctionHasNoShapeVariables) {
  TypeScheme s = generalize(parse_type("(f32 [], f32 []) -> f32 []"), {}, {});
  EXPECT_TRUE(s.quantified.empty());
}

TEST(ResolveOverload, SameShapeCandidateFirst) {
  InferState state;
  Type out = resolve_overload("+", *default_table().find("+"), {tensor("f32", "[]"), tensor("f32", "[]")}, state);
  EXPECT_EQ(to_string(state.resolve(out)), "f32 []");
}

TEST(ResolveOverload, FallsBackToSuffixBroadcast) {
  InferState state;
  Type out = resolve_overload("-", *default_table().find("-"), {tensor("f32", "[a0]@b"), tensor("f32", "b")}, state);
  EXPECT_EQ(to_string(state.resolve(out)), "f32 [a0]@b");
}

TEST(ResolveOverload, ReportsEveryCandidate) {
  InferState state;
  try {
    resolve_overload("+", *default_table().find("+"), {tensor("f32", "[2]"), tensor("f32", "[3]")}, state);
    FAIL();
  } catch (const TypeError& e) {
    std::string message = e.what();
    EXPECT_NE(message.find("(t s, t [d]@s) -> t [d]@s"), std::string::npos) << message;
    EXPECT_NE(message.find("(t s, t s) -> t s"), std::string::npos) << message;
  }
}

TEST(Infer, Matmul) { EXPECT_EQ(corpus("matmul.axon")["f"], "(f32 [n,n], f32 [n,n]) -> f32 [n,n]"); }

TEST(Infer, ConvRecoversInput) {
  EXPECT_EQ(corpus("conv.axon")["g"], "(t [4,8,1031,263], t [4,8,8,8]) -> t [4,8,1024,256]");
}

TEST(Infer, ScalarMax) { EXPECT_EQ(corpus("max_scalar.axon")["h"], "(f32 [], f32 []) -> f32 []"); }

TEST(Infer, Softmax) { EXPECT_EQ(corpus("softmax.axon")["softmax"], "f32 [a]@b -> f32 [a]@b"); }

TEST(Infer, Attention) {
  auto sigs = corpus("attention.axon");
  EXPECT_EQ(sigs["softmax"], "t [m,n] -> t [m,n]");
  EXPECT_EQ(sigs["attention"], "(t [a,b], t [c,b], t [c,d]) -> t [a,d]");
}

TEST(Infer, SubgraphIsPolymorphic) {
  InferResult r = infer_text(read_text(corpus_path("subgraph.axon")) +
                             "\nk = fn (x : f32 [2], y : i32 [3,4]) { g(x, x), g(y, y) }");
  auto sigs = signatures(r);
  EXPECT_EQ(sigs["g"], "(t a, t a) -> t a");
  EXPECT_EQ(sigs["k"], "(f32 [2], i32 [3,4]) -> (f32 [2], i32 [3,4])");
}

TEST(Infer, LoopOutputFollowsStateAndInput) {
  InferResult r = infer_text(read_text(corpus_path("lstm.axon")));
  ASSERT_EQ(r.bindings.size(), 1u);
  const TypeScheme& scheme = *r.bindings[0].scheme;
  const FnType& fn = *scheme.body.as_fn();
  const TupleType& out = *fn.result->as_tuple();
  // The final state has the initial state's types; the output stacks the
  // cell's per-step output along x's outer dimension.
  EXPECT_EQ(out.items[0], Type::tuple({fn.params[0], fn.params[1]}));
  const Shape& x = fn.params[2].as_tensor()->shape;
  const Shape& y = out.items[1].as_tensor()->shape;
  ASSERT_TRUE(x.is_append() && y.is_append());
  EXPECT_EQ(x.parts()[0], y.parts()[0]);
  EXPECT_EQ(y.parts()[1], fn.params[1].as_tensor()->shape);
}

TEST(Infer, LoopOutputMatchesInputWhenCellPreservesShape) {
  InferResult r = infer_text(
      "step = fn (h, y) { n = h + y; n, n };\n"
      "run = fn (h0 : f32 [k], x : f32 [t,k]) { _, out = loop(h0, step, x); out }");
  EXPECT_EQ(signatures(r)["run"], "(f32 [k], f32 [t,k]) -> f32 [t,k]");
}

TEST(Infer, BidirectionalConcat) {
  InferResult r = infer_text(read_text(corpus_path("bidir.axon")));
  ASSERT_EQ(r.bindings.size(), 2u);
  const Type& result = *r.bindings[0].scheme->body.as_fn()->result;
  const Shape& shape = result.as_tensor()->shape;
  ASSERT_TRUE(shape.is_append());
  const Dim& outer = shape.parts()[0].dims()[0];
  ASSERT_TRUE(outer.is_op());
  EXPECT_EQ(outer.op(), DimOp::add);
  EXPECT_EQ(outer.lhs(), outer.rhs());
  EXPECT_EQ(signatures(r)["run"], signatures(r)["bidir"]);
}

TEST(Infer, AnnotationIsRespected) {
  auto sigs = signatures(infer_text("f = fn (x : f32 [2,n]) { exp(x) }"));
  EXPECT_EQ(sigs["f"], "f32 [2,n] -> f32 [2,n]");
}

TEST(Infer, MatmulMismatchNamesMatmul) {
  InferResult r = infer_text("f = fn (x : f32 [2,3], y : f32 [4,5]) {\n  matmul(x, y)\n}");
  ASSERT_EQ(r.bindings[0].status, BindingStatus::failed);
  ASSERT_EQ(r.diagnostics.size(), 1u);
  EXPECT_EQ(r.diagnostics[0].rule, Rule::basic);
  EXPECT_NE(r.diagnostics[0].message.find("matmul"), std::string::npos);
  EXPECT_NE(r.diagnostics[0].message.find("3 = 4"), std::string::npos) << r.diagnostics[0].message;
  EXPECT_EQ(r.diagnostics[0].span.line, 2);
}

TEST(Infer, ElementMismatch) {
  InferResult r = infer_text("f = fn (x : f32 [2], y : i32 [2]) { x + y }");
  EXPECT_EQ(r.bindings[0].status, BindingStatus::failed);
  EXPECT_NE(r.diagnostics[0].message.find("f32 vs i32"), std::string::npos) << r.diagnostics[0].message;
}

TEST(Infer, UnboundIdentifier) {
  InferResult r = infer_text("f = fn (x) { x + W }");
  EXPECT_EQ(r.bindings[0].status, BindingStatus::failed);
  EXPECT_NE(r.diagnostics[0].message.find("unbound identifier 'W'"), std::string::npos);
}

TEST(Infer, ArityMismatch) {
  InferResult r = infer_text("f = fn (x) { matmul(x) }");
  EXPECT_EQ(r.bindings[0].status, BindingStatus::failed);
}

TEST(Infer, RecursionIsRejected) {
  InferResult r = infer_text("f = fn (x) { f(x) }");
  EXPECT_EQ(r.bindings[0].status, BindingStatus::failed);
  EXPECT_NE(r.diagnostics[0].message.find("itself"), std::string::npos);
}

TEST(Infer, DependentsOfFailuresAreUnchecked) {
  InferResult r = infer_text("g = fn (x) { x + Z };\nf = fn (y) { g(y) };\nh = fn (z) { exp(z) }");
  ASSERT_EQ(r.bindings.size(), 3u);
  EXPECT_EQ(r.bindings[0].status, BindingStatus::failed);
  EXPECT_EQ(r.bindings[1].status, BindingStatus::unchecked);
  EXPECT_EQ(r.bindings[2].status, BindingStatus::solved);
  ASSERT_EQ(r.diagnostics.size(), 2u);
  EXPECT_EQ(r.diagnostics[1].severity, "note");
}

TEST(Infer, ResidualMakesPartialStatus) {
  BuiltinTable table = register_builtin(default_table(), "split", {scheme_of("t [(+ a b)] -> (t [a], t [b])")});
  InferResult r = infer_program(parse_program("f = fn (x : f32 [7]) { split(x) }"), table);
  ASSERT_EQ(r.bindings[0].status, BindingStatus::partial);
  ASSERT_EQ(r.bindings[0].residual.size(), 1u);
  EXPECT_EQ(r.bindings[0].residual[0], "(+ a b) = 7");
  EXPECT_EQ(r.bindings[0].signature, "f32 [7] -> (f32 [a], f32 [b])");
}

TEST(Infer, TopLevelTuplePattern) {
  InferResult r = infer_text("p, q = (1, 0f);\nf = fn (x) { x + p }");
  auto sigs = signatures(r);
  EXPECT_EQ(sigs["p, q"], "(i32 [], t [])");
  EXPECT_EQ(sigs["f"], "i32 [] -> i32 []");
}

TEST(Infer, Deterministic) {
  std::string text = read_text(corpus_path("attention.axon"));
  EXPECT_EQ(signatures(infer_text(text)), signatures(infer_text(text)));
}

TEST(Infer, TraceSeesEveryFiring) {
  int firings = 0;
  InferOptions options;
  options.trace = [&](const TraceEvent&) { ++firings; };
  infer_program(parse_program(read_text(corpus_path("matmul.axon"))), default_table(), options);
  EXPECT_GT(firings, 0);
}

}  // namespace
}  // namespace axon
