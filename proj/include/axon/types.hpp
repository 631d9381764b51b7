#pragma once

// Types and type schemes.
//
// Signature notation, used for builtin schemes and for printing:
//   'a                  type variable
//   f32 [n,n]  t s@[d]  tensor: element type (concrete name or variable) and shape
//   (A, B)              tuple
//   (A, B) -> R         function; a single parameter may drop the parentheses

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "axon/shape.hpp"
#include "axon/solver.hpp"

namespace axon {

struct ElemType {
  std::string name;
  bool is_var = false;

  friend bool operator==(const ElemType&, const ElemType&) = default;
};

struct Type;

struct TypeVar {
  std::string name;
};

struct TensorType {
  ElemType elem;
  Shape shape;
};

struct TupleType {
  std::vector<Type> items;
};

struct FnType {
  std::vector<Type> params;
  std::shared_ptr<const Type> result;
};

struct Type {
  std::variant<TypeVar, TensorType, TupleType, FnType> node;

  static Type var(std::string name);
  static Type tensor(ElemType elem, Shape shape);
  static Type tuple(std::vector<Type> items);
  static Type fn(std::vector<Type> params, Type result);

  const TypeVar* as_var() const { return std::get_if<TypeVar>(&node); }
  const TensorType* as_tensor() const { return std::get_if<TensorType>(&node); }
  const TupleType* as_tuple() const { return std::get_if<TupleType>(&node); }
  const FnType* as_fn() const { return std::get_if<FnType>(&node); }
};

bool operator==(const Type& a, const Type& b);

std::string to_string(const ElemType& e);
std::string to_string(const Type& t);

class TypeSyntaxError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Type parse_type(std::string_view text);

enum class VarSort { type, elem, shape, dim };

struct QuantVar {
  std::string name;
  VarSort sort;

  friend bool operator==(const QuantVar&, const QuantVar&) = default;
};

// Free variables in order of first occurrence, each listed once.
class VarList {
 public:
  void add(const std::string& name, VarSort sort);
  void add_type(const Type& t);
  void add_shape(const Shape& s);
  void add_dim(const Dim& d);
  void add_term(const Term& t);

  const std::vector<QuantVar>& vars() const { return vars_; }
  bool contains(const std::string& name) const;

 private:
  std::vector<QuantVar> vars_;
};

struct TypeScheme {
  std::vector<QuantVar> quantified;
  Type body;
  // Shape constraints the body's variables must still satisfy.
  ConstraintSet constraints;
};

// Quantifies every free variable of the signature.
TypeScheme scheme_of(std::string_view signature);

std::string to_string(const TypeScheme& scheme);

// Rebuilds `t` bottom-up, applying the callbacks at type variables, element
// types and shapes.
struct TypeMapper {
  std::function<Type(const TypeVar&)> var;
  std::function<ElemType(const ElemType&)> elem;
  std::function<Shape(const Shape&)> shape;
};

Type map_type(const Type& t, const TypeMapper& mapper);

}  // namespace axon
