#include "axon/shape.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <ostream>
#include <sstream>

namespace axon {

struct Dim::Node {
  Kind kind;
  std::int64_t value = 0;
  std::string name;
  DimOp op = DimOp::add;
  std::vector<Dim> operands;  // empty, or exactly {lhs, rhs}
};

char dim_op_symbol(DimOp op) {
  switch (op) {
    case DimOp::add:
      return '+';
    case DimOp::sub:
      return '-';
    case DimOp::mul:
      return '*';
    case DimOp::div:
      return '/';
  }
  return '?';
}

Dim Dim::constant(std::int64_t value) {
  return Dim(std::make_shared<const Node>(Node{Kind::constant, value, {}, DimOp::add, {}}));
}

Dim Dim::star() {
  static const Dim instance(std::make_shared<const Node>(Node{Kind::star, 0, {}, DimOp::add, {}}));
  return instance;
}

Dim Dim::var(std::string name) {
  return Dim(std::make_shared<const Node>(Node{Kind::var, 0, std::move(name), DimOp::add, {}}));
}

Dim Dim::binary(DimOp op, Dim lhs, Dim rhs) {
  return Dim(std::make_shared<const Node>(
      Node{Kind::op, 0, {}, op, {std::move(lhs), std::move(rhs)}}));
}

Dim::Kind Dim::kind() const { return node_->kind; }
std::int64_t Dim::value() const { return node_->value; }
const std::string& Dim::name() const { return node_->name; }
DimOp Dim::op() const { return node_->op; }
const Dim& Dim::lhs() const { return node_->operands[0]; }
const Dim& Dim::rhs() const { return node_->operands[1]; }

bool operator==(const Dim& a, const Dim& b) { return compare(a, b) == 0; }

namespace {

int kind_rank(Dim::Kind k) {
  switch (k) {
    case Dim::Kind::var:
      return 0;
    case Dim::Kind::star:
      return 1;
    case Dim::Kind::op:
      return 2;
    case Dim::Kind::constant:
      return 3;
  }
  return 4;
}

}  // namespace

std::strong_ordering compare(const Dim& a, const Dim& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  if (auto c = kind_rank(a.kind()) <=> kind_rank(b.kind()); c != 0) return c;
  switch (a.kind()) {
    case Dim::Kind::var:
      return a.name() <=> b.name();
    case Dim::Kind::star:
      return std::strong_ordering::equal;
    case Dim::Kind::constant:
      return a.value() <=> b.value();
    case Dim::Kind::op:
      if (auto c = static_cast<int>(a.op()) <=> static_cast<int>(b.op()); c != 0) return c;
      if (auto c = compare(a.lhs(), b.lhs()); c != 0) return c;
      return compare(a.rhs(), b.rhs());
  }
  return std::strong_ordering::equal;
}

Shape Shape::concrete(std::vector<Dim> dims) {
  Shape s;
  s.kind_ = Kind::concrete;
  s.dims_ = std::move(dims);
  return s;
}

Shape Shape::var(std::string name) {
  Shape s;
  s.kind_ = Kind::var;
  s.name_ = std::move(name);
  return s;
}

Shape Shape::append(std::vector<Shape> parts) {
  Shape s;
  s.kind_ = Kind::append;
  s.parts_ = std::move(parts);
  return s;
}

bool operator==(const Shape& a, const Shape& b) {
  if (a.kind_ != b.kind_) return false;
  switch (a.kind_) {
    case Shape::Kind::concrete:
      return a.dims_ == b.dims_;
    case Shape::Kind::var:
      return a.name_ == b.name_;
    case Shape::Kind::append:
      return a.parts_ == b.parts_;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Printing

namespace {

void print(std::ostream& os, const Dim& d) {
  switch (d.kind()) {
    case Dim::Kind::constant:
      os << d.value();
      break;
    case Dim::Kind::star:
      os << '*';
      break;
    case Dim::Kind::var:
      os << d.name();
      break;
    case Dim::Kind::op:
      os << '(' << dim_op_symbol(d.op()) << ' ';
      print(os, d.lhs());
      os << ' ';
      print(os, d.rhs());
      os << ')';
      break;
  }
}

void print(std::ostream& os, const Shape& s) {
  switch (s.kind()) {
    case Shape::Kind::concrete:
      os << '[';
      for (std::size_t i = 0; i < s.dims().size(); ++i) {
        if (i) os << ',';
        print(os, s.dims()[i]);
      }
      os << ']';
      break;
    case Shape::Kind::var:
      os << s.name();
      break;
    case Shape::Kind::append:
      for (std::size_t i = 0; i < s.parts().size(); ++i) {
        if (i) os << '@';
        print(os, s.parts()[i]);
      }
      break;
  }
}

}  // namespace

std::string to_string(const Dim& d) {
  std::ostringstream os;
  print(os, d);
  return os.str();
}

std::string to_string(const Shape& s) {
  std::ostringstream os;
  print(os, s);
  return os.str();
}

std::string to_string(const Term& t) {
  return std::visit([](const auto& v) { return to_string(v); }, t);
}

std::ostream& operator<<(std::ostream& os, const Dim& d) {
  print(os, d);
  return os;
}

std::ostream& operator<<(std::ostream& os, const Shape& s) {
  print(os, s);
  return os;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

class Cursor {
 public:
  Cursor(std::string_view text, std::size_t pos) : text_(text), pos_(pos) {}

  std::size_t pos() const { return pos_; }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  bool eat(char c) {
    if (peek() != c) return false;
    ++pos_;
    return true;
  }

  void expect(char c) {
    if (!eat(c)) fail(std::string("expected '") + c + "'");
  }

  bool at_end() { return peek() == '\0'; }

  [[noreturn]] void fail(const std::string& what) {
    std::ostringstream os;
    os << what << " at offset " << pos_;
    if (pos_ < text_.size()) {
      os << " near '" << text_.substr(pos_, 8) << "'";
    } else {
      os << " (end of input)";
    }
    throw ShapeSyntaxError(os.str(), pos_);
  }

  std::string identifier() {
    skip_ws();
    std::size_t start = pos_;
    if (pos_ >= text_.size() || !is_ident_start(text_[pos_])) fail("expected identifier");
    while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  std::int64_t number() {
    skip_ws();
    std::size_t start = pos_;
    std::int64_t value = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      int digit = text_[pos_] - '0';
      if (value > (std::numeric_limits<std::int64_t>::max() - digit) / 10) {
        pos_ = start;
        fail("dimension constant out of range");
      }
      value = value * 10 + digit;
      ++pos_;
    }
    if (value == 0) {
      pos_ = start;
      fail("dimension constants must be positive");
    }
    return value;
  }

  Dim dim() {
    char c = peek();
    if (std::isdigit(static_cast<unsigned char>(c))) return Dim::constant(number());
    if (c == '*') {
      ++pos_;
      return Dim::star();
    }
    if (is_ident_start(c)) return Dim::var(identifier());
    if (c == '(') {
      ++pos_;
      DimOp op;
      switch (peek()) {
        case '+':
          op = DimOp::add;
          break;
        case '-':
          op = DimOp::sub;
          break;
        case '*':
          op = DimOp::mul;
          break;
        case '/':
          op = DimOp::div;
          break;
        default:
          fail("expected arithmetic operator");
      }
      ++pos_;
      Dim lhs = dim();
      Dim rhs = dim();
      expect(')');
      return Dim::binary(op, std::move(lhs), std::move(rhs));
    }
    fail("expected dimension");
  }

  Shape shape_part() {
    char c = peek();
    if (c == '[') {
      ++pos_;
      std::vector<Dim> dims;
      if (eat(']')) return Shape::concrete({});
      dims.push_back(dim());
      while (eat(',')) dims.push_back(dim());
      expect(']');
      return Shape::concrete(std::move(dims));
    }
    if (is_ident_start(c)) return Shape::var(identifier());
    fail("expected shape");
  }

  Shape shape() {
    std::vector<Shape> parts;
    parts.push_back(shape_part());
    for (;;) {
      std::size_t before = pos_;
      if (!eat('@')) {
        pos_ = before;  // leave trailing whitespace to the caller
        break;
      }
      parts.push_back(shape_part());
    }
    if (parts.size() == 1) return std::move(parts.front());
    return Shape::append(std::move(parts));
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  std::string_view text_;
  std::size_t pos_;
};

}  // namespace

bool is_identifier(std::string_view text) {
  if (text.empty() || !is_ident_start(text.front())) return false;
  return std::all_of(text.begin(), text.end(), is_ident_char);
}

Shape parse_shape_at(std::string_view text, std::size_t& pos) {
  Cursor cur(text, pos);
  Shape s = cur.shape();
  pos = cur.pos();
  return s;
}

Dim parse_dim_at(std::string_view text, std::size_t& pos) {
  Cursor cur(text, pos);
  Dim d = cur.dim();
  pos = cur.pos();
  return d;
}

Shape parse_shape(std::string_view text) {
  Cursor cur(text, 0);
  Shape s = cur.shape();
  if (!cur.at_end()) cur.fail("unexpected trailing input");
  return s;
}

Dim parse_dim(std::string_view text) {
  Cursor cur(text, 0);
  Dim d = cur.dim();
  if (!cur.at_end()) cur.fail("unexpected trailing input");
  return d;
}

// ---------------------------------------------------------------------------
// Validation

namespace {

void validate_into(const Dim& d, bool inside_op, std::vector<Violation>& out) {
  switch (d.kind()) {
    case Dim::Kind::constant:
      if (d.value() < 1) {
        out.push_back({Violation::Kind::non_positive_constant, to_string(d),
                       "dimension constants must be positive"});
      }
      break;
    case Dim::Kind::star:
      if (inside_op) {
        out.push_back({Violation::Kind::star_in_arithmetic, to_string(d),
                       "variable dimension '*' cannot appear in arithmetic"});
      }
      break;
    case Dim::Kind::var:
      if (!is_identifier(d.name())) {
        out.push_back({Violation::Kind::bad_identifier, d.name(), "malformed identifier"});
      }
      break;
    case Dim::Kind::op:
      validate_into(d.lhs(), true, out);
      validate_into(d.rhs(), true, out);
      break;
  }
}

void validate_into(const Shape& s, std::vector<Violation>& out) {
  switch (s.kind()) {
    case Shape::Kind::concrete:
      for (const Dim& d : s.dims()) validate_into(d, false, out);
      break;
    case Shape::Kind::var:
      if (!is_identifier(s.name())) {
        out.push_back({Violation::Kind::bad_identifier, s.name(), "malformed identifier"});
      }
      break;
    case Shape::Kind::append:
      if (s.parts().size() < 2) {
        out.push_back({Violation::Kind::append_arity, to_string(s),
                       "shape append needs at least two parts"});
      }
      for (const Shape& p : s.parts()) validate_into(p, out);
      break;
  }
}

void report_sort_conflicts(const std::set<std::string>& shape_vars,
                           const std::set<std::string>& dim_vars, std::vector<Violation>& out) {
  for (const auto& name : shape_vars) {
    if (dim_vars.count(name)) {
      out.push_back({Violation::Kind::sort_conflict, name,
                     "'" + name + "' is used both as a shape and as a dimension"});
    }
  }
}

}  // namespace

std::vector<Violation> validate_shape(const Shape& shape) {
  std::vector<Violation> out;
  validate_into(shape, out);
  std::set<std::string> shape_vars, dim_vars;
  collect_vars(shape, shape_vars, dim_vars);
  report_sort_conflicts(shape_vars, dim_vars, out);
  return out;
}

std::vector<Violation> validate_dim(const Dim& dim) {
  std::vector<Violation> out;
  validate_into(dim, false, out);
  return out;
}

void collect_vars(const Dim& dim, std::set<std::string>& dim_vars) {
  switch (dim.kind()) {
    case Dim::Kind::var:
      dim_vars.insert(dim.name());
      break;
    case Dim::Kind::op:
      collect_vars(dim.lhs(), dim_vars);
      collect_vars(dim.rhs(), dim_vars);
      break;
    default:
      break;
  }
}

void collect_vars(const Shape& shape, std::set<std::string>& shape_vars,
                  std::set<std::string>& dim_vars) {
  switch (shape.kind()) {
    case Shape::Kind::concrete:
      for (const Dim& d : shape.dims()) collect_vars(d, dim_vars);
      break;
    case Shape::Kind::var:
      shape_vars.insert(shape.name());
      break;
    case Shape::Kind::append:
      for (const Shape& p : shape.parts()) collect_vars(p, shape_vars, dim_vars);
      break;
  }
}

// ---------------------------------------------------------------------------
// simp

namespace {

std::int64_t checked(bool overflow, std::int64_t value) {
  if (overflow) throw InvalidDimensionError("dimension arithmetic overflows");
  return value;
}

void chain_operands(const Dim& d, DimOp op, std::vector<Dim>& out) {
  if (d.is_op() && d.op() == op) {
    chain_operands(d.lhs(), op, out);
    chain_operands(d.rhs(), op, out);
  } else {
    out.push_back(d);
  }
}

// add and mul: flatten the chain, fold its constants into one trailing
// operand, and sort the remaining operands.
Dim simp_commutative(DimOp op, const Dim& lhs, const Dim& rhs) {
  std::vector<Dim> operands;
  chain_operands(lhs, op, operands);
  chain_operands(rhs, op, operands);

  std::vector<Dim> symbolic;
  bool have_const = false;
  std::int64_t folded = op == DimOp::add ? 0 : 1;
  for (Dim& d : operands) {
    if (d.is_constant()) {
      have_const = true;
      std::int64_t next;
      bool overflow = op == DimOp::add ? __builtin_add_overflow(folded, d.value(), &next)
                                       : __builtin_mul_overflow(folded, d.value(), &next);
      folded = checked(overflow, next);
    } else {
      symbolic.push_back(std::move(d));
    }
  }
  if (symbolic.empty()) return Dim::constant(folded);
  std::stable_sort(symbolic.begin(), symbolic.end(),
                   [](const Dim& a, const Dim& b) { return compare(a, b) < 0; });
  if (op == DimOp::mul && folded == 1) have_const = false;

  Dim result = symbolic.front();
  for (std::size_t i = 1; i < symbolic.size(); ++i) result = Dim::binary(op, result, symbolic[i]);
  if (have_const) result = Dim::binary(op, result, Dim::constant(folded));
  return result;
}

}  // namespace

Dim simp(const Dim& d) {
  if (!d.is_op()) return d;
  Dim lhs = simp(d.lhs());
  Dim rhs = simp(d.rhs());
  switch (d.op()) {
    case DimOp::add:
    case DimOp::mul:
      return simp_commutative(d.op(), lhs, rhs);
    case DimOp::sub:
      if (lhs.is_constant() && rhs.is_constant()) {
        std::int64_t v = lhs.value() - rhs.value();
        if (v < 1) {
          throw InvalidDimensionError("dimension (- " + std::to_string(lhs.value()) + " " +
                                      std::to_string(rhs.value()) + ") is not positive");
        }
        return Dim::constant(v);
      }
      break;
    case DimOp::div:
      if (lhs.is_constant() && rhs.is_constant()) {
        std::int64_t v = lhs.value() / rhs.value();
        if (v < 1) {
          throw InvalidDimensionError("dimension (/ " + std::to_string(lhs.value()) + " " +
                                      std::to_string(rhs.value()) + ") is not positive");
        }
        return Dim::constant(v);
      }
      break;
  }
  if (lhs == d.lhs() && rhs == d.rhs()) return d;
  return Dim::binary(d.op(), std::move(lhs), std::move(rhs));
}

Shape simp(const Shape& s) {
  switch (s.kind()) {
    case Shape::Kind::var:
      return s;
    case Shape::Kind::concrete: {
      std::vector<Dim> dims;
      dims.reserve(s.dims().size());
      for (const Dim& d : s.dims()) dims.push_back(simp(d));
      return Shape::concrete(std::move(dims));
    }
    case Shape::Kind::append:
      break;
  }

  std::vector<Shape> flat;
  for (const Shape& part : s.parts()) {
    Shape p = simp(part);
    if (p.is_append()) {
      flat.insert(flat.end(), p.parts().begin(), p.parts().end());
    } else {
      flat.push_back(std::move(p));
    }
  }

  std::vector<Shape> merged;
  for (Shape& p : flat) {
    if (p.is_scalar()) continue;
    if (p.is_concrete() && !merged.empty() && merged.back().is_concrete()) {
      std::vector<Dim> dims = merged.back().dims();
      dims.insert(dims.end(), p.dims().begin(), p.dims().end());
      merged.back() = Shape::concrete(std::move(dims));
    } else {
      merged.push_back(std::move(p));
    }
  }
  if (merged.empty()) return Shape();
  if (merged.size() == 1) return std::move(merged.front());
  return Shape::append(std::move(merged));
}

Term simp(const Term& t) {
  return std::visit([](const auto& v) -> Term { return simp(v); }, t);
}

// ---------------------------------------------------------------------------
// Free variables and substitution

std::set<std::string> fsv(const Term& t) {
  std::set<std::string> shape_vars, dim_vars;
  if (const auto* s = std::get_if<Shape>(&t)) {
    collect_vars(*s, shape_vars, dim_vars);
  } else {
    collect_vars(std::get<Dim>(t), dim_vars);
  }
  shape_vars.insert(dim_vars.begin(), dim_vars.end());
  return shape_vars;
}

namespace {

bool occurs_in(const std::string& name, const Dim& d) {
  switch (d.kind()) {
    case Dim::Kind::var:
      return d.name() == name;
    case Dim::Kind::op:
      return occurs_in(name, d.lhs()) || occurs_in(name, d.rhs());
    default:
      return false;
  }
}

bool occurs_in(const std::string& name, const Shape& s) {
  switch (s.kind()) {
    case Shape::Kind::var:
      return s.name() == name;
    case Shape::Kind::concrete:
      return std::any_of(s.dims().begin(), s.dims().end(),
                         [&](const Dim& d) { return occurs_in(name, d); });
    case Shape::Kind::append:
      return std::any_of(s.parts().begin(), s.parts().end(),
                         [&](const Shape& p) { return occurs_in(name, p); });
  }
  return false;
}

Dim subst_raw(const Dim& d, const Binding& binding) {
  switch (d.kind()) {
    case Dim::Kind::var: {
      auto it = binding.find(d.name());
      if (it == binding.end()) return d;
      if (const auto* dim = std::get_if<Dim>(&it->second)) return *dim;
      throw SortError("cannot place shape " + to_string(it->second) + " in dimension position '" +
                      d.name() + "'");
    }
    case Dim::Kind::op:
      return Dim::binary(d.op(), subst_raw(d.lhs(), binding), subst_raw(d.rhs(), binding));
    default:
      return d;
  }
}

Shape subst_raw(const Shape& s, const Binding& binding) {
  switch (s.kind()) {
    case Shape::Kind::var: {
      auto it = binding.find(s.name());
      if (it == binding.end()) return s;
      if (const auto* shape = std::get_if<Shape>(&it->second)) return *shape;
      throw SortError("cannot place dimension " + to_string(it->second) + " in shape position '" +
                      s.name() + "'");
    }
    case Shape::Kind::concrete: {
      std::vector<Dim> dims;
      for (const Dim& d : s.dims()) dims.push_back(subst_raw(d, binding));
      return Shape::concrete(std::move(dims));
    }
    case Shape::Kind::append: {
      std::vector<Shape> parts;
      for (const Shape& p : s.parts()) parts.push_back(subst_raw(p, binding));
      return Shape::append(std::move(parts));
    }
  }
  return s;
}

Dim replace_raw(const Dim& d, const Dim& from, const Dim& to) {
  if (d == from) return to;
  if (!d.is_op()) return d;
  return Dim::binary(d.op(), replace_raw(d.lhs(), from, to), replace_raw(d.rhs(), from, to));
}

Shape replace_raw(const Shape& s, const Dim& from, const Dim& to) {
  switch (s.kind()) {
    case Shape::Kind::var:
      return s;
    case Shape::Kind::concrete: {
      std::vector<Dim> dims;
      for (const Dim& d : s.dims()) dims.push_back(replace_raw(d, from, to));
      return Shape::concrete(std::move(dims));
    }
    case Shape::Kind::append: {
      std::vector<Shape> parts;
      for (const Shape& p : s.parts()) parts.push_back(replace_raw(p, from, to));
      return Shape::append(std::move(parts));
    }
  }
  return s;
}

bool contains_dim(const Dim& d, const Dim& needle) {
  if (d == needle) return true;
  return d.is_op() && (contains_dim(d.lhs(), needle) || contains_dim(d.rhs(), needle));
}

bool contains_dim(const Shape& s, const Dim& needle) {
  switch (s.kind()) {
    case Shape::Kind::var:
      return false;
    case Shape::Kind::concrete:
      return std::any_of(s.dims().begin(), s.dims().end(),
                         [&](const Dim& d) { return contains_dim(d, needle); });
    case Shape::Kind::append:
      return std::any_of(s.parts().begin(), s.parts().end(),
                         [&](const Shape& p) { return contains_dim(p, needle); });
  }
  return false;
}

}  // namespace

bool occurs(const std::string& name, const Term& t) {
  return std::visit([&](const auto& v) { return occurs_in(name, v); }, t);
}

namespace {

template <typename T>
bool mentions_any(const T& t, const Binding& binding) {
  return std::any_of(binding.begin(), binding.end(),
                     [&](const auto& entry) { return occurs_in(entry.first, t); });
}

}  // namespace

Shape substitute(const Shape& s, const Binding& binding) {
  if (!mentions_any(s, binding)) return s;
  return simp(subst_raw(s, binding));
}

Dim substitute(const Dim& d, const Binding& binding) {
  if (!mentions_any(d, binding)) return d;
  return simp(subst_raw(d, binding));
}

Term substitute(const Term& t, const Binding& binding) {
  return std::visit([&](const auto& v) -> Term { return substitute(v, binding); }, t);
}

Term replace_subterm(const Term& t, const Dim& from, const Dim& to) {
  return std::visit([&](const auto& v) -> Term { return replace_raw(v, from, to); }, t);
}

bool contains_subterm(const Term& t, const Dim& needle) {
  return std::visit([&](const auto& v) { return contains_dim(v, needle); }, t);
}

RankBound min_rank(const Shape& shape) {
  switch (shape.kind()) {
    case Shape::Kind::concrete:
      return {shape.dims().size(), false};
    case Shape::Kind::var:
      return {0, true};
    case Shape::Kind::append: {
      RankBound total;
      for (const Shape& p : shape.parts()) {
        RankBound b = min_rank(p);
        total.known += b.known;
        total.open = total.open || b.open;
      }
      return total;
    }
  }
  return {};
}

}  // namespace axon
