#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "refnorm/normalize.hpp"

namespace refnorm {

// Smallest-magnitude number meeting the constraints. `incomplete` is set when
// the search gave up rather than proving there is none.
std::optional<JsonValue> gen_number(const NumberConj& n, bool* incomplete = nullptr);

enum class GenStatus : std::uint8_t { Open, Witness, Unsat };

struct GenStats {
  std::uint64_t rounds = 0;
  std::uint64_t crefs = 0;
};

// Bottom-up least fixpoint over the c-refs reachable from a root Dnf.
class Generator {
 public:
  explicit Generator(NormContext& ctx) : ctx_(ctx) {}

  // A value of the root, or nullopt when there is none. Throws
  // UnsupportedFeature when the answer hinges on uniqueItems, and
  // BudgetExceeded when a search bound was hit.
  std::optional<JsonValue> generate(const Dnf& root);

  GenStatus status(const CRef& x) const;
  const JsonValue* witness(const CRef& x) const;
  const GenStats& stats() const { return stats_; }

 private:
  struct Slot {
    GenStatus status = GenStatus::Open;
    JsonValue value;
  };

  NormContext& ctx_;
  std::unordered_map<CRef, Slot, CRefHash> slots_;
  std::vector<CRef> order_;
  GenStats stats_;
  bool discovered_ = false;
  bool unique_blocked_ = false;
  bool incomplete_ = false;

  const JsonValue* lookup(const CRef& x);
  std::optional<JsonValue> solve(const Conj& c);
  std::optional<JsonValue> solve_array(const ArrayConj& a);
  std::optional<JsonValue> solve_object(const ObjectConj& o);
  // witnessed join of a group of refs, or null
  const JsonValue* group_witness(const std::vector<CRef>& refs);
};

}  // namespace refnorm
