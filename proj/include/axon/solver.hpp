#pragma once

// Fixed-point rewriting of shape constraint sets.
//
// solve() repeatedly applies the first matching rewrite until nothing
// changes. Constraints are scanned in insertion order; for each constraint
// the rule groups are tried in the priority order of `kRulePriority`, and
// the scan restarts from the first constraint after every firing.

#include <array>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "axon/shape.hpp"
#include "axon/span.hpp"

namespace axon {

// Where a constraint came from: the builtin or function whose signature
// produced it (or "user annotation", or a constraint-file line) and the
// source location of the call site.
struct Origin {
  std::string source;
  Span span;
};

struct Constraint {
  Term lhs;
  Term rhs;
  Origin origin;
};

std::string to_string(const Constraint& c);

// Insertion-ordered set of constraints. A constraint whose simplified sides
// match an existing member is dropped on insertion.
class ConstraintSet {
 public:
  ConstraintSet() = default;
  ConstraintSet(std::initializer_list<Constraint> items);

  // Returns false when `c` duplicates an existing member. Throws SortError
  // when the two sides have different sorts.
  bool add(Constraint c);

  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  const Constraint& operator[](std::size_t i) const { return items_[i]; }
  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }
  const std::vector<Constraint>& items() const { return items_; }

 private:
  std::vector<Constraint> items_;
  std::set<std::string> keys_;
};

std::string to_string(const ConstraintSet& set);

enum class Rule {
  basic,
  reorder,
  unpack,
  empty_shapes,
  append_unpack,
  append_dim,
  simplify,
  arith,
  partial,
  iteration_limit,
};

std::string_view rule_name(Rule rule);

inline constexpr std::array<Rule, 9> kRulePriority = {
    Rule::basic,         Rule::reorder,  Rule::unpack, Rule::append_dim, Rule::empty_shapes,
    Rule::append_unpack, Rule::simplify, Rule::arith,  Rule::partial,
};

struct Failed {
  Constraint offender;
  Rule rule;
  std::string message;
};

struct Solved {
  // Variable bindings `a = term` with `a` not free in `term`.
  std::map<std::string, Term> substitution;
  // Everything else left at the fixed point.
  ConstraintSet residual;
  // The fixed-point set itself, bindings included, in order.
  ConstraintSet final_set;
};

using SolveOutcome = std::variant<Solved, Failed>;

struct NoChange {};
struct Changed {
  std::size_t index;
  ConstraintSet result;
};
using RuleOutcome = std::variant<NoChange, Changed, Failed>;

// One rule group at the first constraint it matches.
RuleOutcome apply_rule(Rule rule, const ConstraintSet& set);
RuleOutcome apply_rule_basic(const ConstraintSet& set);
RuleOutcome apply_rule_reorder(const ConstraintSet& set);
RuleOutcome apply_rule_unpack(const ConstraintSet& set);
RuleOutcome apply_rule_empty_shapes(const ConstraintSet& set);
RuleOutcome apply_rule_append_unpack(const ConstraintSet& set);
RuleOutcome apply_rule_append_dim(const ConstraintSet& set);
RuleOutcome apply_rule_simplify(const ConstraintSet& set);
RuleOutcome apply_rule_arith(const ConstraintSet& set);
RuleOutcome apply_rule_partial(const ConstraintSet& set);

struct Fired {
  Rule rule;
  std::size_t index;
  ConstraintSet result;
};
struct FixedPoint {};
using StepOutcome = std::variant<Fired, FixedPoint, Failed>;

StepOutcome step(const ConstraintSet& set);

struct TraceEvent {
  Rule rule;
  std::size_t index;
  Constraint before;
  const ConstraintSet& after;
};

struct SolveOptions {
  std::size_t max_firings = 100000;
  std::function<void(const TraceEvent&)> trace;
};

SolveOutcome solve(const ConstraintSet& set, const SolveOptions& options = {});

// ---- constraint files ----
//
// One `<term> = <term>` per line in shape syntax; `#` starts a comment line.
// The sort of a bare identifier comes from its other uses in the file, or
// from the other side of its constraint; otherwise it is a dimension.

class ConstraintFileError : public std::runtime_error {
 public:
  ConstraintFileError(const std::string& message, int line, int col)
      : std::runtime_error(message), line_(line), col_(col) {}
  int line() const { return line_; }
  int col() const { return col_; }

 private:
  int line_;
  int col_;
};

ConstraintSet parse_constraints(std::string_view text);

}  // namespace axon
