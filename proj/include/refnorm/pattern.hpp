#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace refnorm {

inline constexpr char32_t kMaxCodePoint = 0x10FFFF;
// minLength/maxLength above this are refused
inline constexpr std::uint64_t kMaxLengthBound = 4096;

// Complete DFA over code point intervals. State 0 is the start state; every
// state's edges are sorted and cover [0, kMaxCodePoint] without gaps.
struct Dfa {
  struct Edge {
    char32_t lo, hi;
    std::uint32_t to;
  };
  std::vector<std::vector<Edge>> out;
  std::vector<bool> accept;

  std::size_t size() const { return out.size(); }
  std::uint32_t step(std::uint32_t s, char32_t c) const;
  bool accepts(std::u32string_view s) const;
  bool empty() const;
  // byte encoding of the canonical numbering; equal iff same language
  std::string fingerprint() const;
};

// Concrete DFA constructions, exposed for testing.
Dfa dfa_from_regex(std::string_view ecma_source);  // search semantics
Dfa dfa_key(std::u32string_view key);
Dfa dfa_min_len(std::uint64_t n);
Dfa dfa_max_len(std::uint64_t n);
Dfa dfa_complement(const Dfa& d);
Dfa dfa_product(const Dfa& a, const Dfa& b, bool conj);
Dfa dfa_minimize(const Dfa& d);

enum class PatternKind : std::uint8_t { Regex, Key, MinLen, MaxLen, Not, All, Any };

class PatternNode;
// Interned: pointer equality is structural equality. Nodes live forever.
using Pattern = const PatternNode*;

class PatternNode {
 public:
  PatternKind kind;
  std::string text;  // regex source or key (utf-8)
  std::uint64_t n = 0;
  std::vector<Pattern> kids;
  std::uint64_t id = 0;

  // finite / cofinite when cheaply known; 0 unknown, 1 yes, 2 no
  std::uint8_t finite_hint = 0;
  std::uint8_t cofinite_hint = 0;

  mutable std::atomic<const Dfa*> dfa_cache{nullptr};
  mutable std::atomic<const std::string*> fp_cache{nullptr};
};

Pattern p_regex(std::string_view ecma_source);  // validates, may throw
Pattern p_key(std::string_view key);
Pattern p_min_len(std::uint64_t n);
Pattern p_max_len(std::uint64_t n);
Pattern p_not(Pattern e);
Pattern p_all(std::vector<Pattern> es);
Pattern p_any(std::vector<Pattern> es);
Pattern p_true();
Pattern p_false();
Pattern p_minus(Pattern a, Pattern b);

const Dfa& p_dfa(Pattern e);
bool p_is_empty(Pattern e);
bool p_subset(Pattern a, Pattern b);
bool p_disjoint(Pattern a, Pattern b);
bool p_equal(Pattern a, Pattern b);
bool p_contains(Pattern e, std::u32string_view s);
bool p_contains(Pattern e, std::string_view utf8);
bool p_is_finite(Pattern e);
// min(|L(e)|, k)
std::size_t p_count_upto(Pattern e, std::size_t k);
const std::string& p_fingerprint(Pattern e);

// Shortest member, ties broken by the code point ranking.
std::optional<std::string> p_example(Pattern e);
// Up to k members in shortlex order under the same ranking.
std::vector<std::string> p_enumerate(Pattern e, std::size_t k);

// Ranking: a-z, A-Z, 0-9, other printable ASCII, everything else by value.
int cp_rank_class(char32_t c);

enum class Relation { Disjoint, Included, Divided };
// how L(e) sits relative to L(p); uses cheap paths for keys
Relation p_relate(Pattern e, Pattern p);

std::string to_string(Pattern e);

}  // namespace refnorm
