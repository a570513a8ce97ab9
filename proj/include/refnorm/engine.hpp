#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "refnorm/compat.hpp"
#include "refnorm/errors.hpp"
#include "refnorm/normalize.hpp"

namespace refnorm {

bool satisfies(const JsonValue& j, const Schema& s, const Env& env);
bool satisfies(const JsonValue& j, const Document& doc);
// canonical forms, with c-refs read against the prepared environment
bool satisfies(const JsonValue& j, const Conj& c, const Env& env);
bool satisfies(const JsonValue& j, const Dnf& d, const Env& env);

// Two documents sharing one environment, kept apart by uri prefixes.
struct SchemaPair {
  Env env;
  Schema left, right;
};
SchemaPair combine(const JsonValue& left, const JsonValue& right);

enum class Verdict { Included, NotIncluded, Error };
const char* verdict_name(Verdict v);

struct InclusionResult {
  Verdict verdict = Verdict::Error;
  std::optional<JsonValue> witness;
  Stats stats;
  bool generation_invoked = false;
  double elapsed_ms = 0;
  std::optional<ErrorKind> error_kind;  // unset for internal failures
  std::string error;
};

// s1 <: s2. Never throws for bad input or exhausted budgets; see error fields.
InclusionResult check_inclusion(const Env& env, const Schema& s1, const Schema& s2, const Budget& budget = {});
InclusionResult check_inclusion(const JsonValue& left, const JsonValue& right, const Budget& budget = {});

enum class Equivalence { Equivalent, LeftNotInRight, RightNotInLeft, Incomparable, Error };
const char* equivalence_name(Equivalence e);

struct EquivalenceResult {
  Equivalence verdict = Equivalence::Error;
  InclusionResult left_in_right, right_in_left;
};
EquivalenceResult check_equivalence(const Env& env, const Schema& s1, const Schema& s2, const Budget& budget = {});
EquivalenceResult check_equivalence(const JsonValue& left, const JsonValue& right, const Budget& budget = {});

struct UniverseParams {
  int max_depth = 2;           // scalars are depth 0
  std::size_t max_width = 2;   // array length bound
  std::vector<std::string> keys;
  // interchangeable names; only multisets of their values are enumerated,
  // so no schema in play may tell them apart
  std::vector<std::string> filler_keys;
  std::size_t max_props = SIZE_MAX;  // object size bound
  std::vector<std::string> strings;
  std::vector<Decimal> numbers;
  std::size_t cap = 2'000'000;  // UniverseTooLarge beyond this
  // let the oracle keep one child per satisfaction profile (exact unless
  // uniqueItems is in play, where it is switched off automatically)
  bool quotient = true;
};

// Every value within the bounds, shallower first, deterministic order.
std::vector<JsonValue> enumerate_universe(const UniverseParams& u);

// Walks the universe keeping one child per satisfaction profile over every
// node of `roots` and of the environments' bodies. Any property decided by
// those nodes holds on the whole universe iff it holds on the walk. `fn`
// returns false to stop.
void for_each_profile_value(const UniverseParams& u, const std::vector<Schema>& roots,
                            const std::vector<const Env*>& envs, const std::function<bool(const JsonValue&)>& fn);

struct OracleResult {
  bool included = true;
  std::optional<JsonValue> counterexample;
};
OracleResult oracle_included(const Schema& s1, const Schema& s2, const Env& env, const UniverseParams& u);

// Strings the patterns in play can tell apart.
std::vector<std::string> probe_strings(const std::vector<Schema>& roots, const Env& env);

// Runs fn on a thread with a large stack; exceptions are rethrown here.
void run_with_stack(const std::function<void()>& fn, std::size_t bytes = std::size_t(1) << 29);

}  // namespace refnorm
