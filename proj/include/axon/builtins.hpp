#pragma once

// Builtin operator signatures. Each name maps to an ordered list of
// overload candidates; inference commits to the first one that type checks
// and whose shape constraints solve.

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "axon/types.hpp"

namespace axon {

class BuiltinError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class BuiltinTable {
 public:
  // nullptr when `name` is not registered.
  const std::vector<TypeScheme>* find(const std::string& name) const;
  const std::map<std::string, std::vector<TypeScheme>>& entries() const { return entries_; }

  friend BuiltinTable register_builtin(BuiltinTable table, const std::string& name,
                                       std::vector<TypeScheme> schemes, bool replace);

 private:
  std::map<std::string, std::vector<TypeScheme>> entries_;
};

// Throws BuiltinError for a duplicate name (unless `replace`), an empty
// candidate list, or a scheme with unquantified variables.
BuiltinTable register_builtin(BuiltinTable table, const std::string& name, std::vector<TypeScheme> schemes,
                              bool replace = false);

BuiltinTable default_table();

}  // namespace axon
