#pragma once

#include <stdexcept>
#include <string>

namespace refnorm {

enum class ErrorKind {
  UnsupportedKeyword,
  UnresolvableRef,
  MalformedSchema,
  UnsupportedRegexFeature,
  UnsupportedFeature,
  BudgetExceeded,
  UniverseTooLarge,
};

const char* error_kind_name(ErrorKind k);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + detail), kind_(kind), detail_(detail) {}
  ErrorKind kind() const { return kind_; }
  const std::string& detail() const { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

}  // namespace refnorm
