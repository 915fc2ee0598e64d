#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dynq {

/// Malformed input text. Carries a 1-based line/column position.
class parse_error : public std::runtime_error
{
  public:
    parse_error(const std::string &message, std::size_t line, std::size_t column)
        : std::runtime_error(message + " at " + std::to_string(line) + ":" + std::to_string(column))
        , message_(message)
        , line_(line)
        , column_(column)
    { }

    /// The message without the position suffix.
    const std::string &message() const { return message_; }
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

  private:
    std::string message_;
    std::size_t line_;
    std::size_t column_;
};

/// Input that is well formed but does not fit the schema (unknown relation, arity mismatch, ...).
class schema_error : public std::runtime_error
{
    using std::runtime_error::runtime_error;
};

/// A search exhausted its node budget before reaching an answer.
class budget_exceeded : public std::runtime_error
{
    using std::runtime_error::runtime_error;
};

/// An operation was invoked outside its documented precondition.
class precondition_error : public std::logic_error
{
    using std::logic_error::logic_error;
};

/// An engine was asked for a routine its query class does not support.
class unsupported_routine : public std::runtime_error
{
    using std::runtime_error::runtime_error;
};

/// An update would leave the database violating an integrity constraint.
class constraint_violation : public std::runtime_error
{
    using std::runtime_error::runtime_error;
};

/// A skip structure changed while an enumeration over it was in flight.
class concurrent_modification : public std::logic_error
{
    using std::logic_error::logic_error;
};

}
