#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sparsereg {

enum class ErrorKind {
  DimensionMismatch,
  DomainError,
  IllPosed,
  CombinatorialBudgetExceeded,
  NonNormalizedDiagonal,
  MissingQuantity,
  ZeroColumnScale,
  CertificateNotFound,
  EmptyFold,
  ParseError,
  EmptyDataset,
  IoError,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::IllPosed: return "IllPosed";
    case ErrorKind::CombinatorialBudgetExceeded: return "CombinatorialBudgetExceeded";
    case ErrorKind::NonNormalizedDiagonal: return "NonNormalizedDiagonal";
    case ErrorKind::MissingQuantity: return "MissingQuantity";
    case ErrorKind::ZeroColumnScale: return "ZeroColumnScale";
    case ErrorKind::CertificateNotFound: return "CertificateNotFound";
    case ErrorKind::EmptyFold: return "EmptyFold";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::EmptyDataset: return "EmptyDataset";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

namespace detail {

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

inline void require(bool condition, ErrorKind kind, const std::string& message) {
  if (!condition) fail(kind, message);
}

}  // namespace detail
}  // namespace sparsereg
