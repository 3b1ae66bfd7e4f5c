#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace tsir {

enum class Errc {
  DomainEmpty,
  InvalidEndpoint,
  AccumulationPoint,
  NotInDomain,
  InvalidArgument,
  Nonregressive,
  Overflow,
  WrongDomain,
  InvalidInitial,
  DegenerateState,
  ConservationViolated,
  Parse,
  Semantic,
  Io,
};

const char* to_string(Errc code);

/// Base error for the library. `witness()` carries the offending time when one exists.
class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& what, std::optional<double> witness = std::nullopt)
      : std::runtime_error(what), code_(code), witness_(witness) {}

  Errc code() const noexcept { return code_; }
  std::optional<double> witness() const noexcept { return witness_; }

private:
  Errc code_;
  std::optional<double> witness_;
};

class ParseError : public Error {
public:
  ParseError(int line, int column, const std::string& what)
      : Error(Errc::Parse, "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line),
        column_(column),
        message_(what) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }
  /// Message without the position prefix.
  const std::string& message() const noexcept { return message_; }

private:
  int line_;
  int column_;
  std::string message_;
};

class SemanticError : public Error {
public:
  SemanticError(std::string field, const std::string& what)
      : Error(Errc::Semantic, field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

private:
  std::string field_;
};

/// Process exit code for an error: 1 parse, 2 math/regressivity, 3 I/O.
int exit_code(Errc code);

}  // namespace tsir
