#pragma once

#include <optional>
#include <string>
#include <vector>

#include "refnorm/json_value.hpp"

namespace refnorm {

enum class SynthFamily { SelfIncl, OneofFan, RecDepth };
bool synth_family_from_name(const std::string& name, SynthFamily& out);
const char* synth_family_name(SynthFamily f);

struct SynthPair {
  std::string name;  // file stem
  JsonValue left, right;
  bool left_in_right = true;
  bool right_in_left = true;
};

// Deterministic in (family, n, m); m is ignored except by SelfIncl.
//  SelfIncl: anyOf of n object disjuncts, each with m properties bound to
//            distinct definitions, paired with itself.
//  OneofFan: oneOf of n pairwise disjoint branches vs. the anyOf rename.
//  RecDepth: n mutually recursive guarded list definitions with integral
//            heads vs. the same lists with any-number heads.
SynthPair synthesize(SynthFamily family, int n, int m);

}  // namespace refnorm
