#include "effridge/errors.hpp"

namespace effridge {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_input: return "invalid input";
    case ErrorKind::singular_gram: return "singular gram";
    case ErrorKind::numeric: return "numeric failure";
    case ErrorKind::at_threshold: return "at threshold";
    case ErrorKind::infeasible_target: return "infeasible target";
    case ErrorKind::parse: return "parse error";
    case ErrorKind::io: return "i/o error";
  }
  return "unknown";
}

void rethrow_with_context(const Error& e, const std::string& prefix) {
  const std::string msg = prefix + e.what();
  switch (e.kind()) {
    case ErrorKind::invalid_input: throw InvalidInput(msg);
    case ErrorKind::singular_gram: throw SingularGram(msg);
    case ErrorKind::numeric: throw NumericError(msg);
    case ErrorKind::at_threshold: throw AtThreshold(msg);
    case ErrorKind::infeasible_target: throw InfeasibleTarget(msg);
    case ErrorKind::parse: throw ParseError(msg, static_cast<const ParseError&>(e).line());
    case ErrorKind::io: throw IoError(msg);
  }
  throw Error(e.kind(), msg);
}

}  // namespace effridge
