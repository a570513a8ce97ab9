#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "refnorm/canonical.hpp"

namespace refnorm {

struct Budget {
  std::uint64_t max_steps = 50'000'000;
  double timeout_s = 600.0;
};

struct Stats {
  std::uint64_t steps = 0;
  std::uint64_t fast_path_hits = 0;
  std::uint64_t fast_path_misses = 0;
  std::uint64_t crefs_created = 0;
};

// flat name -> counter view, in declaration order
std::vector<std::pair<std::string, std::uint64_t>> stats_map(const Stats& s);

struct MemoEntry {
  bool done = false;
  Dnf dnf;
};

class NormContext {
 public:
  NormContext(Env& env, Budget budget = {});

  Env& env() { return env_; }
  Stats& stats() { return stats_; }
  const CRef& x_false() const { return x_false_; }
  bool is_false(const CRef& c) const { return c == x_false_; }

  Dnf all_ds(const Dnf& d, const Schema& s);
  Dnf all_cs(const Conj& c, const Schema& s);
  // dFalse, or throws the internal fast-fail signal
  Dnf fast_check(const Conj& c, const std::vector<Schema>& ss);
  Dnf fast_fail_all_cs(const Conj& c, const Schema& s);
  Dnf all_ck(const Conj& c, const Schema& k);
  CRef all_xx(const CRef& x, const CRef& y);

  // alternatives for one fragment meeting pProp(p, X)
  std::vector<std::vector<Fragment>> merge_frag_prop(const Fragment& f, Pattern p, const CRef& x);

  // normalized body of a c-ref, memoized
  const Dnf& dnf_of(const CRef& x);
  bool memo_done(const CRef& x) const;
  const std::unordered_map<CRef, MemoEntry, CRefHash>& memo() const { return memo_; }

  void tick();

 private:
  Env& env_;
  Budget budget_;
  Stats stats_;
  CRef x_false_;
  std::chrono::steady_clock::time_point start_;
  std::unordered_map<CRef, MemoEntry, CRefHash> memo_;

  Dnf cs(const Conj& c, const Schema& s, bool fast);
  Dnf ck_typeset(const TypeSetConj& c, const Schema& k);
  Dnf ck_number(NumberConj n, const Schema& k);
  Dnf ck_string(StringConj n, const Schema& k);
  Dnf ck_bool(BoolConj n, const Schema& k);
  Dnf ck_array(const ArrayConj& a, const Schema& k);
  Dnf ck_object(const ObjectConj& o, const Schema& k);
  Dnf obj_pprop(const ObjectConj& o, Pattern p, const CRef& x);
  Dnf obj_preq(const ObjectConj& o, Pattern p, const CRef& y);
  std::vector<ArrayConj> grow(const ArrayConj& a, std::uint64_t m);
  bool array_ok(ArrayConj& a);
  bool object_ok(const ObjectConj& o) const;
};

// Generic JSON type of an analytical keyword.
JsonType keyword_type(Op op);
bool is_typed_keyword(Op op);

}  // namespace refnorm
