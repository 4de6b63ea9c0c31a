#pragma once

#include <stdexcept>
#include <string>

namespace kpod {

/// Invalid user input: bad hyperparameters, malformed data, label misuse.
struct input_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed dataset text; message carries the 1-based line number.
struct parse_error : input_error {
  parse_error(std::size_t line, const std::string& what)
      : input_error("line " + std::to_string(line) + ": " + what), line_number(line) {}
  std::size_t line_number;
};

/// A class subset whose spectrum is entirely zero cannot span a subspace.
struct degenerate_error : input_error {
  using input_error::input_error;
};

/// Numerical breakdown: non-PSD Gram, broken mode normalization.
struct numerical_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace kpod
