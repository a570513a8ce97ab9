#include <regex>
#include <string>
#include <vector>

#include "doctest.h"
#include "refnorm/errors.hpp"
#include "refnorm/pattern.hpp"

using namespace refnorm;

namespace {

// all strings over alpha up to length n
std::vector<std::string> words(const std::string& alpha, int n) {
  std::vector<std::string> out{""};
  std::size_t from = 0;
  for (int len = 1; len <= n; ++len) {
    std::size_t to = out.size();
    for (std::size_t i = from; i < to; ++i)
      for (char c : alpha) out.push_back(out[i] + c);
    from = to;
  }
  return out;
}

// std::regex with the ECMAScript grammar is the reference for search semantics
bool oracle(const std::string& re, const std::string& s) { return std::regex_search(s, std::regex(re, std::regex::ECMAScript)); }

}  // namespace

TEST_CASE("regex membership matches std::regex on small strings") {
  const std::vector<std::string> res = {
      "a",       "^a",        "a$",        "^a$",       "^a*$",      "^(a|b)+$", "ab|ba",   "^a{2}$", "^a{1,2}b?$",
      "^[ab]c*$", "^[^a]",    "^.$",       "b{2,}",     "^(ab)*$",   "^$",       "(^a|b$)", "c+a",    "^(?:a|bc)*c$",
      "[a-c]{3}", "^a?b?c?$", "^\\w\\d?$", "\\s",       "^[^abc]*$", "^a|b$",    "x*",      "^(a*)*$"};
  auto ws = words("abc", 5);
  ws.push_back("a1");
  ws.push_back(" b");
  for (auto& re : res) {
    Pattern p = p_regex(re);
    for (auto& w : ws) {
      INFO(re << " on '" << w << "'");
      CHECK(p_contains(p, std::string_view(w)) == oracle(re, w));
    }
  }
}

TEST_CASE("boolean algebra agrees with pointwise membership") {
  Pattern a = p_regex("^a");
  Pattern b = p_regex("b$");
  Pattern k = p_key("ab");
  std::vector<Pattern> es = {p_all({a, b}), p_any({a, k}), p_not(a), p_minus(a, b), p_all({p_min_len(2), p_max_len(3)}),
                             p_not(p_any({k, b}))};
  auto ws = words("ab", 5);
  for (auto& w : ws) {
    bool ia = oracle("^a", w), ib = oracle("b$", w), ik = w == "ab";
    std::vector<bool> want = {ia && ib, ia || ik, !ia, ia && !ib, w.size() >= 2 && w.size() <= 3, !(ik || ib)};
    for (std::size_t i = 0; i < es.size(); ++i) {
      INFO(to_string(es[i]) << " on '" << w << "'");
      // DFA path and direct evaluation both
      CHECK(p_dfa(es[i]).accepts(std::u32string(w.begin(), w.end())) == want[i]);
      CHECK(p_contains(es[i], std::string_view(w)) == want[i]);
    }
  }
}

TEST_CASE("decision procedures") {
  CHECK(p_subset(p_key("a"), p_regex("a|b")));
  CHECK(!p_subset(p_regex("a|b"), p_key("a")));
  CHECK(p_is_empty(p_all({p_regex("^a+$"), p_key("b")})));
  CHECK(p_equal(p_regex("^(a|b)*$"), p_regex("^(b|a)*$")));
  CHECK(p_equal(p_regex("^a*$"), p_not(p_regex("[^a]"))));
  CHECK(!p_equal(p_regex("^a*$"), p_regex("^a+$")));
  CHECK(p_disjoint(p_regex("^a"), p_regex("^b")));
  CHECK(p_is_empty(p_all({p_min_len(3), p_max_len(2)})));
  CHECK(p_is_finite(p_regex("^(a|bc)$")));
  CHECK(!p_is_finite(p_regex("^a")));
  CHECK(p_count_upto(p_regex("^(a|b|c)$"), 10) == 3);
}

TEST_CASE("examples are shortest and ranked") {
  CHECK(p_example(p_regex("pizza$")) == std::optional<std::string>("pizza"));
  CHECK(p_example(p_true()) == std::optional<std::string>(""));
  CHECK(p_example(p_min_len(2)) == std::optional<std::string>("aa"));
  CHECK(p_example(p_regex("^[0-9A]$")) == std::optional<std::string>("A"));
  CHECK(p_example(p_all({p_regex("^margherita"), p_regex("pizza$")})) == std::optional<std::string>("margheritapizza"));
  CHECK(!p_example(p_all({p_regex("^a"), p_regex("^b")})).has_value());
  auto some = p_enumerate(p_regex("^[ab]{1,2}$"), 10);
  CHECK(some == std::vector<std::string>{"a", "b", "aa", "ab", "ba", "bb"});
  auto firsts = p_enumerate(p_not(p_key("a")), 3);
  CHECK(firsts == std::vector<std::string>{"", "b", "c"});
}

TEST_CASE("relate uses key shortcuts correctly") {
  Pattern any = p_true();
  CHECK(p_relate(any, p_key("a")) == Relation::Divided);
  CHECK(p_relate(p_key("a"), p_key("a")) == Relation::Included);
  CHECK(p_relate(p_key("a"), p_key("b")) == Relation::Disjoint);
  CHECK(p_relate(p_regex("^a$"), p_key("a")) == Relation::Included);
  CHECK(p_relate(p_regex("^x"), p_regex("^xy")) == Relation::Divided);
  CHECK(p_relate(p_regex("^xy"), p_regex("^x")) == Relation::Included);
}

TEST_CASE("unsupported regex features are rejected") {
  auto kind = [](const char* re) {
    try {
      p_regex(re);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::UniverseTooLarge;  // sentinel: no error
  };
  CHECK(kind("(a)\\1") == ErrorKind::UnsupportedRegexFeature);
  CHECK(kind("a(?=b)") == ErrorKind::UnsupportedRegexFeature);
  CHECK(kind("(?<!a)b") == ErrorKind::UnsupportedRegexFeature);
  CHECK(kind("\\bx") == ErrorKind::UnsupportedRegexFeature);
  CHECK(kind("(a") == ErrorKind::MalformedSchema);
  CHECK(kind("[b-a]") == ErrorKind::MalformedSchema);
  CHECK_THROWS_AS(p_min_len(5000), Error);
}

TEST_CASE("fingerprints identify languages") {
  CHECK(p_fingerprint(p_regex("^(aa)*$")) == p_fingerprint(p_regex("^(?:aa)*$")));
  CHECK(p_fingerprint(p_key("a")) == p_fingerprint(p_regex("^a$")));
  CHECK(p_fingerprint(p_key("a")) != p_fingerprint(p_regex("^a")));
}
