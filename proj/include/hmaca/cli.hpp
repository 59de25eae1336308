#pragma once

// Command line front end: train, predict, evaluate and inspect-ca.

#include <iosfwd>
#include <string>
#include <vector>

namespace hmaca::cli {

/// Process exit codes; stderr carries the diagnostic.
enum ExitCode : int {
  kOk = 0,
  kInputError = 1,
  kConfigError = 2,
  kTrainingFailure = 3,
  kModelMismatch = 4,
  kLabelFormatError = 5,
};

/// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hmaca::cli
