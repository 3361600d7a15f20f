#include "oxo/error.hpp"

namespace oxo {

const char* to_string(ErrorCategory cat) {
  switch (cat) {
    case ErrorCategory::invalid_input: return "invalid_input";
    case ErrorCategory::domain: return "domain";
    case ErrorCategory::degenerate: return "degenerate";
    case ErrorCategory::convergence: return "convergence";
    case ErrorCategory::resource: return "resource";
    case ErrorCategory::io: return "io";
    case ErrorCategory::internal: return "internal";
  }
  return "unknown";
}

int exit_code(ErrorCategory cat) {
  switch (cat) {
    case ErrorCategory::invalid_input: return 2;
    case ErrorCategory::domain: return 3;
    case ErrorCategory::degenerate: return 4;
    case ErrorCategory::convergence: return 5;
    case ErrorCategory::resource: return 6;
    case ErrorCategory::io: return 7;
    case ErrorCategory::internal: return 8;
  }
  return 9;
}

}  // namespace oxo
