#pragma once

#include <string>

#include "refnorm/json_value.hpp"
#include "refnorm/schema.hpp"

namespace refnorm {

struct ParseOptions {
  // prepended to every definition uri, keeps two documents apart
  std::string uri_prefix;
  bool check_well_formed = true;
};

// Draft-06 document -> algebra. Throws Error on unsupported or bad input.
Document parse_schema(const JsonValue& doc, const ParseOptions& opts = {});

// Algebra -> Draft-06. Definitions go under "definitions".
JsonValue serialize(const Document& doc);
JsonValue serialize_schema(const Schema& s);

// Anchored ECMA regex for the language of e (state elimination fallback).
std::string pattern_to_regex(Pattern e);

void not_complete(Document& doc);

// Renames every "oneOf" keyword in schema position to "anyOf"; property
// names and instance data (const, enum, defaults) are left alone.
JsonValue one_of_to_any_of(const JsonValue& schema);

// JSON nodes inside schema positions, the yardstick for the size bound
std::size_t json_schema_size(const JsonValue& doc);

}  // namespace refnorm
