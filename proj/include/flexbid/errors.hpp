#pragma once

#include <stdexcept>
#include <string>

namespace flexbid {

// Exit codes used by the command-line front end. Library code throws the
// matching exception type; the CLI maps each to its numeric code.
enum class ExitCode : int {
  ok = 0,
  usage = 1,      // bad flags, malformed config, out-of-range parameters
  data = 2,       // unreadable/ill-formed input files, schema violations
  numerical = 3,  // fits or solvers that cannot produce a finite answer
};

struct UsageError : std::runtime_error {
  explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

struct DataError : std::runtime_error {
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace flexbid
