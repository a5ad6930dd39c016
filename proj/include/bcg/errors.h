// Exception types shared by every module.
#ifndef BCG_ERRORS_H_
#define BCG_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bcg {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed rule or fact text. Line and column are 1-based; column 0 means
// the whole line.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column = 0);

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  // The diagnostic without the position prefix.
  const std::string& message() const { return message_; }

 private:
  std::string message_;
  std::size_t line_;
  std::size_t column_;
};

// A serialized artifact (GMN file, checkpoint, score table) is unreadable:
// unknown version tag or a malformed record.
class FormatError : public Error {
 public:
  using Error::Error;
};

// A count does not fit in 64 bits.
class OverflowError : public Error {
 public:
  using Error::Error;
};

// Refusal to materialize something larger than the configured budget.
class BudgetError : public Error {
 public:
  BudgetError(const std::string& what, double requested, double budget)
      : Error(what), requested_(requested), budget_(budget) {}

  double requested() const { return requested_; }
  double budget() const { return budget_; }

 private:
  double requested_;
  double budget_;
};

// Non-finite loss, out-of-range score and similar numeric failures.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace bcg

#endif  // BCG_ERRORS_H_
