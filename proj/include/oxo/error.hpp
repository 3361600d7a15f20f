#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace oxo {

enum class ErrorCategory {
  invalid_input,
  domain,
  degenerate,
  convergence,
  resource,
  io,
  internal,
};

const char* to_string(ErrorCategory cat);

// Exit code reported by the CLI for this category (nonzero, stable).
int exit_code(ErrorCategory cat);

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory cat, const std::string& msg)
      : std::runtime_error(msg), cat_(cat) {}
  ErrorCategory category() const noexcept { return cat_; }

 private:
  ErrorCategory cat_;
};

// Iterative solvers throw this with the best iterate found so far attached.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& msg, std::vector<double> best)
      : Error(ErrorCategory::convergence, msg), best_(std::move(best)) {}
  const std::vector<double>& best_iterate() const noexcept { return best_; }

 private:
  std::vector<double> best_;
};

[[noreturn]] inline void fail(ErrorCategory cat, const std::string& msg) {
  throw Error(cat, msg);
}

}  // namespace oxo
