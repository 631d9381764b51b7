#include "axon/types.hpp"

#include <algorithm>
#include <cctype>

#include "axon/syntax.hpp"

namespace axon {

Type Type::var(std::string name) { return Type{TypeVar{std::move(name)}}; }
Type Type::tensor(ElemType elem, Shape shape) { return Type{TensorType{std::move(elem), std::move(shape)}}; }
Type Type::tuple(std::vector<Type> items) { return Type{TupleType{std::move(items)}}; }
Type Type::fn(std::vector<Type> params, Type result) {
  return Type{FnType{std::move(params), std::make_shared<const Type>(std::move(result))}};
}

bool operator==(const Type& a, const Type& b) {
  if (a.node.index() != b.node.index()) return false;
  if (auto* v = a.as_var()) return v->name == b.as_var()->name;
  if (auto* t = a.as_tensor()) return t->elem == b.as_tensor()->elem && t->shape == b.as_tensor()->shape;
  if (auto* t = a.as_tuple()) return t->items == b.as_tuple()->items;
  const FnType& fa = *a.as_fn();
  const FnType& fb = *b.as_fn();
  return fa.params == fb.params && *fa.result == *fb.result;
}

std::string to_string(const ElemType& e) { return e.name; }

std::string to_string(const Type& t) {
  if (auto* v = t.as_var()) return "'" + v->name;
  if (auto* tensor = t.as_tensor()) return tensor->elem.name + " " + to_string(tensor->shape);
  if (auto* tuple = t.as_tuple()) {
    std::string out = "(";
    for (std::size_t i = 0; i < tuple->items.size(); ++i) {
      if (i) out += ", ";
      out += to_string(tuple->items[i]);
    }
    return out + ")";
  }
  const FnType& fn = *t.as_fn();
  auto param = [](const Type& p) { return p.as_fn() ? "(" + to_string(p) + ")" : to_string(p); };
  std::string out;
  if (fn.params.size() == 1 && !fn.params[0].as_tuple() && !fn.params[0].as_fn()) {
    out = to_string(fn.params[0]);
  } else {
    out = "(";
    for (std::size_t i = 0; i < fn.params.size(); ++i) {
      if (i) out += ", ";
      out += param(fn.params[i]);
    }
    out += ")";
  }
  return out + " -> " + to_string(*fn.result);
}

namespace {

class TypeParser {
 public:
  explicit TypeParser(std::string_view text) : text_(text) {}

  Type parse() {
    Type t = type();
    skip_ws();
    if (pos_ != text_.size()) error("unexpected trailing input");
    return t;
  }

 private:
  [[noreturn]] void error(const std::string& message) const {
    throw TypeSyntaxError(message + " at offset " + std::to_string(pos_) + " in '" + std::string(text_) + "'");
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool eat(std::string_view token) {
    skip_ws();
    if (text_.substr(pos_, token.size()) != token) return false;
    pos_ += token.size();
    return true;
  }

  std::string ident() {
    skip_ws();
    std::size_t begin = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    if (begin == pos_) error("expected an identifier");
    return std::string(text_.substr(begin, pos_ - begin));
  }

  Type type() {
    std::vector<Type> items;
    bool parenthesized = false;
    if (eat("(")) {
      parenthesized = true;
      for (;;) {
        items.push_back(type());
        if (!eat(",")) break;
      }
      if (!eat(")")) error("expected ')'");
    } else {
      items.push_back(atom());
    }
    if (eat("->")) return Type::fn(std::move(items), type());
    if (parenthesized && items.size() > 1) return Type::tuple(std::move(items));
    return std::move(items.front());
  }

  Type atom() {
    if (eat("'")) return Type::var(ident());
    std::string elem = ident();
    skip_ws();
    try {
      Shape shape = parse_shape_at(text_, pos_);
      return Type::tensor(ElemType{elem, !is_element_type_name(elem)}, std::move(shape));
    } catch (const ShapeSyntaxError& e) {
      error(e.what());
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

void walk_dim(const Dim& d, VarList& out) {
  if (d.is_var()) {
    out.add(d.name(), VarSort::dim);
  } else if (d.is_op()) {
    walk_dim(d.lhs(), out);
    walk_dim(d.rhs(), out);
  }
}

}  // namespace

Type parse_type(std::string_view text) { return TypeParser(text).parse(); }

bool VarList::contains(const std::string& name) const {
  return std::any_of(vars_.begin(), vars_.end(), [&](const QuantVar& v) { return v.name == name; });
}

void VarList::add(const std::string& name, VarSort sort) {
  if (!contains(name)) vars_.push_back(QuantVar{name, sort});
}

void VarList::add_dim(const Dim& d) { walk_dim(d, *this); }

void VarList::add_shape(const Shape& s) {
  switch (s.kind()) {
    case Shape::Kind::var:
      add(s.name(), VarSort::shape);
      break;
    case Shape::Kind::concrete:
      for (const Dim& d : s.dims()) add_dim(d);
      break;
    case Shape::Kind::append:
      for (const Shape& p : s.parts()) add_shape(p);
      break;
  }
}

void VarList::add_term(const Term& t) {
  if (const auto* s = std::get_if<Shape>(&t)) {
    add_shape(*s);
  } else {
    add_dim(std::get<Dim>(t));
  }
}

void VarList::add_type(const Type& t) {
  if (auto* v = t.as_var()) {
    add(v->name, VarSort::type);
  } else if (auto* tensor = t.as_tensor()) {
    if (tensor->elem.is_var) add(tensor->elem.name, VarSort::elem);
    add_shape(tensor->shape);
  } else if (auto* tuple = t.as_tuple()) {
    for (const Type& item : tuple->items) add_type(item);
  } else {
    const FnType& fn = *t.as_fn();
    for (const Type& p : fn.params) add_type(p);
    add_type(*fn.result);
  }
}

TypeScheme scheme_of(std::string_view signature) {
  Type body = parse_type(signature);
  VarList vars;
  vars.add_type(body);
  return TypeScheme{vars.vars(), std::move(body), {}};
}

std::string to_string(const TypeScheme& scheme) {
  std::string out = to_string(scheme.body);
  if (!scheme.constraints.empty()) out += " where " + to_string(scheme.constraints);
  return out;
}

Type map_type(const Type& t, const TypeMapper& mapper) {
  if (auto* v = t.as_var()) return mapper.var ? mapper.var(*v) : t;
  if (auto* tensor = t.as_tensor()) {
    return Type::tensor(mapper.elem ? mapper.elem(tensor->elem) : tensor->elem,
                        mapper.shape ? mapper.shape(tensor->shape) : tensor->shape);
  }
  if (auto* tuple = t.as_tuple()) {
    std::vector<Type> items;
    for (const Type& item : tuple->items) items.push_back(map_type(item, mapper));
    return Type::tuple(std::move(items));
  }
  const FnType& fn = *t.as_fn();
  std::vector<Type> params;
  for (const Type& p : fn.params) params.push_back(map_type(p, mapper));
  return Type::fn(std::move(params), map_type(*fn.result, mapper));
}

}  // namespace axon
