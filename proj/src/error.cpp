#include "plancheck/error.hpp"

namespace plancheck {

ParseError::ParseError(const std::string& message, SourcePos pos)
    : Error(std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": " + message),
      pos_(pos),
      detail_(message) {}

SchemaError::SchemaError(const std::string& field, const std::string& message)
    : Error(field.empty() ? message : field + ": " + message), field_(field) {}

}  // namespace plancheck
