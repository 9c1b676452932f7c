#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wfshacl {

enum class ErrorKind {
  Parse,
  UndefinedShape,
  DuplicateHead,
  IncompatibleGraph,
  BudgetExceeded,
  UnboundVariable,
  FreeVariable,
  TranslationBudget,
  NotTotal,
  EngineInvariant,
  InvalidArgument,
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::Parse: return "ParseError";
    case ErrorKind::UndefinedShape: return "UndefinedShape";
    case ErrorKind::DuplicateHead: return "DuplicateHead";
    case ErrorKind::IncompatibleGraph: return "IncompatibleGraph";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::UnboundVariable: return "UnboundVariable";
    case ErrorKind::FreeVariable: return "FreeVariable";
    case ErrorKind::TranslationBudget: return "TranslationBudget";
    case ErrorKind::NotTotal: return "NotTotal";
    case ErrorKind::EngineInvariant: return "EngineInvariant";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Error";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what)
      : Error(ErrorKind::Parse, std::to_string(line) + ":" + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace wfshacl
