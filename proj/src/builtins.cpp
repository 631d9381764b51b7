#include "axon/builtins.hpp"

#include <algorithm>

namespace axon {

const std::vector<TypeScheme>* BuiltinTable::find(const std::string& name) const {
  auto it = entries_.find(name);
  return it == entries_.end() ? nullptr : &it->second;
}

BuiltinTable register_builtin(BuiltinTable table, const std::string& name, std::vector<TypeScheme> schemes,
                              bool replace) {
  if (schemes.empty()) throw BuiltinError("builtin '" + name + "' has no signatures");
  if (!replace && table.entries_.count(name)) throw BuiltinError("builtin '" + name + "' is already registered");
  for (const TypeScheme& scheme : schemes) {
    VarList free;
    free.add_type(scheme.body);
    for (const Constraint& c : scheme.constraints) {
      free.add_term(c.lhs);
      free.add_term(c.rhs);
    }
    for (const QuantVar& v : free.vars()) {
      bool bound = std::find(scheme.quantified.begin(), scheme.quantified.end(), v) != scheme.quantified.end();
      if (!bound) {
        throw BuiltinError("signature of '" + name + "' leaves '" + v.name + "' unquantified: " + to_string(scheme));
      }
    }
  }
  table.entries_[name] = std::move(schemes);
  return table;
}

namespace {

std::vector<TypeScheme> schemes(std::initializer_list<std::string_view> signatures) {
  std::vector<TypeScheme> out;
  for (std::string_view sig : signatures) out.push_back(scheme_of(sig));
  return out;
}

}  // namespace

BuiltinTable default_table() {
  BuiltinTable table;
  // Same shape first, then a lower-rank operand matching the other's suffix.
  for (const char* op : {"+", "-", "*", "/", "max"}) {
    table = register_builtin(std::move(table), op,
                             schemes({"(t s, t s) -> t s", "(t [d]@s, t s) -> t [d]@s", "(t s, t [d]@s) -> t [d]@s"}));
  }
  table = register_builtin(std::move(table), "exp", schemes({"t s -> t s"}));
  table = register_builtin(std::move(table), "matmul", schemes({"(t s@[d1,d2], t s@[d2,d3]) -> t s@[d1,d3]"}));
  table = register_builtin(std::move(table), "concat", schemes({"(t [d1]@s, t [d2]@s) -> t [(+ d1 d2)]@s"}));
  table = register_builtin(std::move(table), "conv",
                           schemes({"(t [n,c,h,w], t [k,c,r,s]) -> t [n,c,(+ 1 (- h r)),(+ 1 (- w s))]"}));
  table = register_builtin(std::move(table), "transpose", schemes({"t s@[d1,d2] -> t s@[d2,d1]"}));
  table = register_builtin(std::move(table), "map", schemes({"((t s -> u s2), t [d]@s) -> u [d]@s2"}));
  // Reduces over the outermost dimension with a scalar initial value.
  table = register_builtin(std::move(table), "reduce", schemes({"((t [], t []) -> t [], t [], t [d]@s) -> t s"}));
  table = register_builtin(std::move(table), "reverse", schemes({"t [d]@s -> t [d]@s"}));
  table = register_builtin(std::move(table), "loop",
                           schemes({"('st, ('st, t s) -> ('st, u s2), t [d]@s) -> ('st, u [d]@s2)"}));
  // Input, hidden and cell state, then 12 weights; nothing relates them.
  table = register_builtin(std::move(table), "lstmStep",
                           schemes({"('x, 'h, 'c, 'wi, 'wf, 'wo, 'wc, 'ri, 'rf, 'ro, 'rc, 'bi, 'bf, 'bo, 'bc)"
                                    " -> (t s1, u s2)"}));
  return table;
}

}  // namespace axon
