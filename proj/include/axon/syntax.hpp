#pragma once

// Surface syntax of Axon programs: AST, parser and pretty-printer.
//
//   program  := item (';'? item)* ';'?
//   item     := pattern '=' tuple | tuple
//   pattern  := name (',' name)*            names may be `_`
//   tuple    := expr (',' expr)*
//   expr     := term (('+' | '-') term)*
//   term     := primary (('*' | '/') primary)*
//   primary  := fn | name '(' args ')' | name | literal | '(' tuple ')'
//             | operator                     only directly before ',' or ')'
//   fn       := 'fn' '(' params ')' (':' annotation)? '{' body '}'
//   body     := (pattern '=' tuple ';')* tuple ';'?
//
// `//` starts a line comment.

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "axon/shape.hpp"
#include "axon/span.hpp"

namespace axon {

class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(const std::string& message, Span span) : std::runtime_error(message), span_(span) {}
  const Span& span() const { return span_; }

 private:
  Span span_;
};

bool is_element_type_name(std::string_view name);

// `f32 [n,n]`, `t i`, `f32`, `r`, `[2,3]` or `(ann, ann)`.
struct Annotation {
  std::optional<std::string> element;
  std::optional<Shape> shape;
  std::vector<Annotation> tuple;  // non-empty for tuple annotations
  Span span;

  bool is_tuple() const { return !tuple.empty(); }
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Param {
  std::string name;
  std::optional<Annotation> annotation;
  Span span;
};

struct Let {
  std::vector<std::string> names;
  ExprPtr value;
  Span span;
};

struct Body {
  std::vector<Let> lets;
  ExprPtr result;
};

struct FnExpr {
  std::vector<Param> params;
  std::optional<Annotation> result_annotation;
  Body body;
};

struct Call {
  std::string callee;
  Span callee_span;
  std::vector<ExprPtr> args;
};

struct BinOp {
  char op;  // one of + - * /
  ExprPtr lhs;
  ExprPtr rhs;
};

// A name, or an operator used as a value (`reduce(+, 0f, x)`).
struct VarRef {
  std::string name;
};

struct TupleExpr {
  std::vector<ExprPtr> elements;
};

struct Literal {
  enum class Kind { integer, floating, neg_inf };
  Kind kind;
  std::string text;
};

struct Expr {
  std::variant<FnExpr, Call, BinOp, VarRef, TupleExpr, Literal> node;
  Span span;
};

struct TopBinding {
  std::vector<std::string> names;  // empty for a bare expression
  ExprPtr expr;
  Span span;
  int index = 0;  // 1-based position in the program

  // The bound names joined by ", ", or `_<index>` for a bare expression.
  std::string display_name() const;
};

struct Program {
  std::vector<TopBinding> bindings;
};

Program parse_program(std::string_view text);

std::string pretty_print(const Program& program);
std::string pretty_print(const Expr& expr);
std::string pretty_print(const Annotation& annotation);

// Span-free structural dump, used to compare ASTs.
std::string to_sexpr(const Program& program);
std::string to_sexpr(const Expr& expr);

}  // namespace axon
