#pragma once

// The `check` and `solve` commands, independent of argument parsing.

#include <iosfwd>
#include <string>
#include <vector>

namespace axon {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitParseError = 2,
  kExitIoError = 3,
};

struct CheckOptions {
  bool json = false;
  bool trace = false;
};

// Parses and infers each file. With several files the most severe exit
// code wins. Trace output goes to `err` in JSON mode and `out` otherwise.
int check_files(const std::vector<std::string>& paths, const CheckOptions& options, std::ostream& out,
                std::ostream& err);

int solve_file(const std::string& path, bool trace, std::ostream& out, std::ostream& err);

}  // namespace axon
