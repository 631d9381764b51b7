#pragma once

#include <cstddef>

namespace axon {

// Location of a syntax node within its source text. Lines and columns are
// 1-based; a default-constructed span (line 0) means "no location".
struct Span {
  std::size_t offset = 0;
  std::size_t length = 0;
  int line = 0;
  int col = 0;

  bool valid() const { return line > 0; }
};

}  // namespace axon
