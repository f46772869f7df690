#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lexdiff {

/// Base of every error raised by the library. `kind()` is a stable
/// machine-readable tag; `what()` carries the human-readable detail.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define LEXDIFF_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                        \
   public:                                                           \
    explicit Name(const std::string& message) : Error(#Name, message) {} \
  };

// formal-model / ec-graph
LEXDIFF_DEFINE_ERROR(SchemaError)
LEXDIFF_DEFINE_ERROR(PartitionError)
LEXDIFF_DEFINE_ERROR(DuplicateTreeInEC)
LEXDIFF_DEFINE_ERROR(CycleError)
LEXDIFF_DEFINE_ERROR(UnknownTree)
LEXDIFF_DEFINE_ERROR(EmptyInput)

// interface / satkit / edgecase
LEXDIFF_DEFINE_ERROR(InternalError)
LEXDIFF_DEFINE_ERROR(UnboundVariable)
LEXDIFF_DEFINE_ERROR(ResourceLimit)
LEXDIFF_DEFINE_ERROR(TooManyVariables)

// metrics
LEXDIFF_DEFINE_ERROR(BadEdges)
LEXDIFF_DEFINE_ERROR(LengthMismatch)

// llm-gateway
LEXDIFF_DEFINE_ERROR(RenderError)
LEXDIFF_DEFINE_ERROR(ConfigError)
LEXDIFF_DEFINE_ERROR(TransportError)

#undef LEXDIFF_DEFINE_ERROR

/// Raised when a formalization violates one or more tree invariants.
/// The individual violations are kept so callers can report all of them.
class StructureError : public Error {
 public:
  explicit StructureError(std::vector<std::string> violations)
      : Error("StructureError", join(violations)), violations_(std::move(violations)) {}

  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (const auto& item : items) {
      if (!out.empty()) out += "; ";
      out += item;
    }
    return out;
  }

  std::vector<std::string> violations_;
};

/// Every attempt of a structured request failed validation.
class ValidationExhausted : public Error {
 public:
  ValidationExhausted(const std::string& message, int attempts)
      : Error("ValidationExhausted", message), attempts_(attempts) {}

  int attempts() const noexcept { return attempts_; }

 private:
  int attempts_;
};

}  // namespace lexdiff
