#pragma once

// Hindley-Milner inference over element types, shapes and dimensions.
//
// Unifying two tensor types unifies their element types and records an
// equation between their shapes. The shape solver runs after every call
// site, which is what lets overload resolution reject a candidate, and
// after every top-level binding before it is generalized. Local lets are
// monomorphic.

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "axon/builtins.hpp"
#include "axon/solver.hpp"
#include "axon/syntax.hpp"
#include "axon/types.hpp"

namespace axon {

class TypeError : public std::runtime_error {
 public:
  TypeError(const std::string& message, Span span, std::optional<Rule> rule = std::nullopt)
      : std::runtime_error(message), span_(span), rule_(rule) {}

  const Span& span() const { return span_; }
  // Set when the shape solver rejected a constraint.
  const std::optional<Rule>& rule() const { return rule_; }

 private:
  Span span_;
  std::optional<Rule> rule_;
};

struct InferState {
  std::map<std::string, Type> types;     // type variable bindings
  std::map<std::string, ElemType> elems;  // element variable bindings
  ConstraintSet constraints;              // last fixed point plus newer constraints
  Binding shapes;                         // solved shape and dimension variables
  ConstraintSet residual;                 // unsolved part of the last fixed point
  std::map<std::string, std::string> hints;  // variable -> user-written name
  Origin origin;                          // attached to constraints added by unify
  int counter = 0;
  SolveOptions solve_options;

  // Fresh variables start with `$`, which user identifiers cannot.
  std::string fresh(VarSort sort);

  Type resolve(const Type& t) const;
  ElemType resolve(const ElemType& e) const;
  Shape resolve(const Shape& s) const;

  void add_constraint(const Shape& lhs, const Shape& rhs);

  // Runs the solver. Throws TypeError naming the failed rule.
  void solve();
};

// `expected` is the callee or annotation side; shape equations are
// oriented `expected = actual`. Throws TypeError.
void unify(const Type& expected, const Type& actual, InferState& state);

// Fresh copy of the scheme's body. Its constraints join the state.
Type instantiate(const TypeScheme& scheme, InferState& state);

// Quantifies the variables of `type` and `residual` except those in
// `env_free` and those tied to them through a residual constraint.
TypeScheme generalize(const Type& type, const ConstraintSet& residual, const VarList& env_free);

// Applies the first candidate whose parameters unify with `args` and whose
// constraints solve; returns its result type. When every candidate fails,
// rethrows the last failure with the attempted signatures appended.
Type resolve_overload(const std::string& name, const std::vector<TypeScheme>& candidates,
                      const std::vector<Type>& args, InferState& state);

// Display names for the variables of a signature: user-written names where
// they survive, then a, b, c... for shapes and dimensions, t, u, v... for
// element types and 'a, 'b... for type variables.
class Renamer {
 public:
  explicit Renamer(const std::map<std::string, std::string>& hints = {}) : hints_(hints) {}

  void plan(const VarList& vars);

  std::string display(const Type& t);
  std::string display(const Term& t);
  std::string display(const Constraint& c);

 private:
  std::string name_for(const QuantVar& v);
  Binding shape_binding();

  std::map<std::string, std::string> hints_;
  std::map<std::string, std::string> assigned_;
  std::map<std::string, VarSort> sorts_;
  std::set<std::string> taken_[3];  // shape/dim, element, type variable
};

enum class BindingStatus { solved, partial, failed, unchecked };

std::string_view status_name(BindingStatus status);

struct Diagnostic {
  std::string severity;  // "error" or "note"
  Span span;
  std::string message;
  std::optional<Rule> rule;
};

struct BindingReport {
  std::string name;
  BindingStatus status = BindingStatus::failed;
  std::string signature;              // empty unless solved or partial
  std::vector<std::string> residual;  // renamed like the signature
  std::optional<TypeScheme> scheme;
};

struct InferResult {
  std::vector<BindingReport> bindings;
  std::vector<Diagnostic> diagnostics;
};

struct InferOptions {
  std::function<void(const TraceEvent&)> trace;
};

InferResult infer_program(const Program& program, const BuiltinTable& builtins, const InferOptions& options = {});

}  // namespace axon
