#pragma once

#include <stdexcept>
#include <string>

namespace acmtm {

struct InvalidParameter : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Every candidate weight was zero; the caller decides how to recover.
struct NoSelectableCandidate : std::runtime_error {
  NoSelectableCandidate() : std::runtime_error("no selectable candidate: all log-weights are -inf") {}
};

struct InsufficientData : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Autocorrelation time of a constant series.
struct UndefinedAct : std::domain_error {
  using std::domain_error::domain_error;
};

/// Bad experiment configuration. `line` is 1-based, 0 when unknown.
struct ConfigError : std::runtime_error {
  ConfigError(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line(line) {}
  int line;
};

}  // namespace acmtm
