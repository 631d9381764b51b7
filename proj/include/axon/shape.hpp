#pragma once

// Shapes and dimension expressions.
//
// A dimension is a positive constant, the variable dimension `*`, a named
// dimension variable, or a binary arithmetic node written in prefix form
// `(+ d1 d2)`. A shape is a bracketed list of dimensions, a shape variable,
// or an append `s1 @ s2 @ ...` of at least two shapes. Every value here is
// immutable once built.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace axon {

class ShapeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ShapeSyntaxError : public ShapeError {
 public:
  ShapeSyntaxError(const std::string& message, std::size_t position)
      : ShapeError(message), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

// Raised when constant folding produces a dimension smaller than one.
class InvalidDimensionError : public ShapeError {
 public:
  using ShapeError::ShapeError;
};

// Raised when a shape is placed where a dimension is required, or the reverse.
class SortError : public ShapeError {
 public:
  using ShapeError::ShapeError;
};

enum class DimOp { add, sub, mul, div };

char dim_op_symbol(DimOp op);

class Dim {
 public:
  enum class Kind { constant, star, var, op };

  static Dim constant(std::int64_t value);
  static Dim star();
  static Dim var(std::string name);
  static Dim binary(DimOp op, Dim lhs, Dim rhs);

  Kind kind() const;
  bool is_constant() const { return kind() == Kind::constant; }
  bool is_star() const { return kind() == Kind::star; }
  bool is_var() const { return kind() == Kind::var; }
  bool is_op() const { return kind() == Kind::op; }

  // Accessors are only meaningful for the matching kind.
  std::int64_t value() const;
  const std::string& name() const;
  DimOp op() const;
  const Dim& lhs() const;
  const Dim& rhs() const;

  friend bool operator==(const Dim& a, const Dim& b);
  friend std::strong_ordering compare(const Dim& a, const Dim& b);

 private:
  struct Node;
  explicit Dim(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

// Canonical structural order: variables (by name) < `*` < arithmetic nodes
// (by operator, then operands) < constants (by value).
std::strong_ordering compare(const Dim& a, const Dim& b);

class Shape {
 public:
  enum class Kind { concrete, var, append };

  // The scalar shape `[]`.
  Shape() = default;

  static Shape concrete(std::vector<Dim> dims);
  static Shape var(std::string name);
  // Does not simplify; a single-part append is representable so that
  // validate_shape can report it.
  static Shape append(std::vector<Shape> parts);

  Kind kind() const { return kind_; }
  bool is_concrete() const { return kind_ == Kind::concrete; }
  bool is_var() const { return kind_ == Kind::var; }
  bool is_append() const { return kind_ == Kind::append; }
  bool is_scalar() const { return is_concrete() && dims_.empty(); }

  const std::vector<Dim>& dims() const { return dims_; }
  const std::string& name() const { return name_; }
  const std::vector<Shape>& parts() const { return parts_; }

  friend bool operator==(const Shape& a, const Shape& b);

 private:
  Kind kind_ = Kind::concrete;
  std::vector<Dim> dims_;
  std::string name_;
  std::vector<Shape> parts_;
};

enum class Sort { shape, dim };

// Either side of a shape constraint.
using Term = std::variant<Shape, Dim>;

inline Sort sort_of(const Term& t) {
  return std::holds_alternative<Shape>(t) ? Sort::shape : Sort::dim;
}

// ---- text form ----

std::string to_string(const Dim& d);
std::string to_string(const Shape& s);
std::string to_string(const Term& t);
std::ostream& operator<<(std::ostream& os, const Dim& d);
std::ostream& operator<<(std::ostream& os, const Shape& s);

bool is_identifier(std::string_view text);

// Parse a complete string. Whitespace between tokens is ignored.
Shape parse_shape(std::string_view text);
Dim parse_dim(std::string_view text);

// Parse a shape or dimension starting at `pos` and advance `pos` past it.
// Trailing text is left for the caller; used to embed shapes in other
// grammars.
Shape parse_shape_at(std::string_view text, std::size_t& pos);
Dim parse_dim_at(std::string_view text, std::size_t& pos);

// ---- well-formedness ----

struct Violation {
  enum class Kind {
    append_arity,
    non_positive_constant,
    star_in_arithmetic,
    bad_identifier,
    sort_conflict,
  };
  Kind kind;
  std::string node;
  std::string message;
};

std::vector<Violation> validate_shape(const Shape& shape);
std::vector<Violation> validate_dim(const Dim& dim);

// Names used as shape variables and as dimension variables.
void collect_vars(const Shape& shape, std::set<std::string>& shape_vars,
                  std::set<std::string>& dim_vars);
void collect_vars(const Dim& dim, std::set<std::string>& dim_vars);

// ---- algebra ----

// Canonical form. Throws InvalidDimensionError when folding constants yields
// a value below one.
Dim simp(const Dim& d);
Shape simp(const Shape& s);
Term simp(const Term& t);

std::set<std::string> fsv(const Term& t);
bool occurs(const std::string& name, const Term& t);

using Binding = std::map<std::string, Term>;

// Replace every variable named in `binding`, then canonicalize. Throws
// SortError when a replacement has the wrong sort for its position.
Term substitute(const Term& t, const Binding& binding);
Shape substitute(const Shape& s, const Binding& binding);
Dim substitute(const Dim& d, const Binding& binding);

// Replace every occurrence of the subterm `from` by `to`, without
// canonicalizing.
Term replace_subterm(const Term& t, const Dim& from, const Dim& to);
bool contains_subterm(const Term& t, const Dim& needle);

struct RankBound {
  std::size_t known = 0;
  bool open = false;

  friend bool operator==(const RankBound&, const RankBound&) = default;
};

RankBound min_rank(const Shape& shape);

}  // namespace axon
