#include "refnorm/errors.hpp"

namespace refnorm {

const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::UnsupportedKeyword: return "UnsupportedKeyword";
    case ErrorKind::UnresolvableRef: return "UnresolvableRef";
    case ErrorKind::MalformedSchema: return "MalformedSchema";
    case ErrorKind::UnsupportedRegexFeature: return "UnsupportedRegexFeature";
    case ErrorKind::UnsupportedFeature: return "UnsupportedFeature";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::UniverseTooLarge: return "UniverseTooLarge";
  }
  return "Error";
}

}  // namespace refnorm
