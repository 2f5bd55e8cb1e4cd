#ifndef LWA_ERROR_HPP
#define LWA_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lwa {

/// Bad argument or precondition violation (dimension mismatch, c outside (0, 0.5), ...).
class InvalidInput : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// File could not be opened, read or written.
class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed dataset or model file. Carries the location when one is known.
class ParseError : public std::runtime_error {
public:
  explicit ParseError(const std::string& what, std::size_t row = 0, std::size_t column = 0,
                      std::string field = {})
      : std::runtime_error(what), row_(row), column_(column), field_(std::move(field)) {}

  /// 1-based row, 0 when not applicable.
  std::size_t row() const noexcept { return row_; }
  /// 1-based column, 0 when not applicable.
  std::size_t column() const noexcept { return column_; }
  const std::string& field() const noexcept { return field_; }

private:
  std::size_t row_;
  std::size_t column_;
  std::string field_;
};

class UnsupportedVersion : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Requested operation exists but not for this input (e.g. oracle above 2 dims).
class Unsupported : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace lwa

#endif  // LWA_ERROR_HPP
