// ECMA-262 regex subset -> Thompson NFA -> subset DFA (search semantics).

#include <algorithm>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "refnorm/errors.hpp"
#include "refnorm/json_value.hpp"
#include "refnorm/pattern.hpp"

namespace refnorm {

namespace {

using Ranges = std::vector<std::pair<char32_t, char32_t>>;

constexpr std::size_t kMaxNfaStates = 60000;
constexpr std::size_t kMaxDfaStates = 20000;

Ranges normalize(Ranges r) {
  std::sort(r.begin(), r.end());
  Ranges out;
  for (auto& [lo, hi] : r) {
    if (!out.empty() && lo <= out.back().second + 1) {
      out.back().second = std::max(out.back().second, hi);
    } else {
      out.emplace_back(lo, hi);
    }
  }
  return out;
}

Ranges negate(const Ranges& r) {
  Ranges out;
  char32_t next = 0;
  for (auto& [lo, hi] : r) {
    if (lo > next) out.emplace_back(next, lo - 1);
    next = hi + 1;
  }
  if (next <= kMaxCodePoint) out.emplace_back(next, kMaxCodePoint);
  return out;
}

Ranges digit_ranges() { return {{'0', '9'}}; }
Ranges word_ranges() { return normalize({{'0', '9'}, {'A', 'Z'}, {'_', '_'}, {'a', 'z'}}); }
Ranges space_ranges() {
  return normalize({{'\t', '\r'}, {' ', ' '}, {0xA0, 0xA0}, {0x1680, 0x1680}, {0x2000, 0x200A},
                    {0x2028, 0x2029}, {0x202F, 0x202F}, {0x205F, 0x205F}, {0x3000, 0x3000}, {0xFEFF, 0xFEFF}});
}
// '.' excludes line terminators
Ranges dot_ranges() { return negate(normalize({{'\n', '\n'}, {'\r', '\r'}, {0x2028, 0x2029}})); }

struct Node {
  enum Kind { Empty, Chars, Concat, Alt, Repeat, Bol, Eol } kind;
  Ranges chars;
  std::vector<std::unique_ptr<Node>> kids;
  std::uint64_t min = 0, max = 0;  // max == kInf for unbounded
};
constexpr std::uint64_t kInf = ~0ULL;

using NodeP = std::unique_ptr<Node>;

NodeP mk(Node::Kind k) {
  auto n = std::make_unique<Node>();
  n->kind = k;
  return n;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {
    try {
      s_ = utf8_decode(src);
    } catch (const std::invalid_argument&) {
      throw Error(ErrorKind::MalformedSchema, "pattern is not valid utf-8");
    }
  }

  NodeP parse() {
    NodeP n = alternation();
    if (i_ != s_.size()) fail("unbalanced ')'");
    return n;
  }

 private:
  std::string src_;
  std::u32string s_;
  std::size_t i_ = 0;

  [[noreturn]] void fail(const std::string& why) const {
    throw Error(ErrorKind::MalformedSchema, "bad pattern '" + src_ + "': " + why);
  }
  [[noreturn]] void unsupported(const std::string& what) const {
    throw Error(ErrorKind::UnsupportedRegexFeature, what + " in pattern '" + src_ + "'");
  }

  bool eof() const { return i_ >= s_.size(); }
  char32_t peek(std::size_t k = 0) const { return i_ + k < s_.size() ? s_[i_ + k] : 0; }

  NodeP alternation() {
    NodeP first = concatenation();
    if (eof() || peek() != '|') return first;
    NodeP alt = mk(Node::Alt);
    alt->kids.push_back(std::move(first));
    while (!eof() && peek() == '|') {
      ++i_;
      alt->kids.push_back(concatenation());
    }
    return alt;
  }

  NodeP concatenation() {
    NodeP cat = mk(Node::Concat);
    while (!eof() && peek() != '|' && peek() != ')') cat->kids.push_back(quantified());
    if (cat->kids.size() == 1) return std::move(cat->kids[0]);
    if (cat->kids.empty()) return mk(Node::Empty);
    return cat;
  }

  bool read_int(std::uint64_t& v) {
    std::size_t start = i_;
    v = 0;
    while (!eof() && peek() >= '0' && peek() <= '9') {
      v = v * 10 + (peek() - '0');
      if (v > 100000) unsupported("repetition bound too large");
      ++i_;
    }
    return i_ > start;
  }

  // {n}, {n,}, {n,m}; anything else leaves '{' as a literal
  bool try_brace(std::uint64_t& lo, std::uint64_t& hi) {
    std::size_t save = i_;
    ++i_;
    if (!read_int(lo)) {
      i_ = save;
      return false;
    }
    hi = lo;
    if (!eof() && peek() == ',') {
      ++i_;
      if (!read_int(hi)) hi = kInf;
    }
    if (eof() || peek() != '}') {
      i_ = save;
      return false;
    }
    ++i_;
    if (hi != kInf && hi < lo) fail("numbers out of order in {} quantifier");
    return true;
  }

  NodeP quantified() {
    NodeP a = atom();
    for (;;) {
      if (eof()) return a;
      std::uint64_t lo, hi;
      char32_t c = peek();
      if (c == '*') {
        lo = 0, hi = kInf, ++i_;
      } else if (c == '+') {
        lo = 1, hi = kInf, ++i_;
      } else if (c == '?') {
        lo = 0, hi = 1, ++i_;
      } else if (c == '{' && try_brace(lo, hi)) {
      } else {
        return a;
      }
      if (a->kind == Node::Bol || a->kind == Node::Eol) fail("nothing to repeat");
      if (!eof() && peek() == '?') ++i_;  // lazy, same language
      NodeP r = mk(Node::Repeat);
      r->min = lo;
      r->max = hi;
      r->kids.push_back(std::move(a));
      a = std::move(r);
    }
  }

  NodeP chars(Ranges r) {
    NodeP n = mk(Node::Chars);
    n->chars = normalize(std::move(r));
    return n;
  }

  NodeP atom() {
    char32_t c = peek();
    switch (c) {
      case '^': ++i_; return mk(Node::Bol);
      case '$': ++i_; return mk(Node::Eol);
      case '.': ++i_; return chars(dot_ranges());
      case '[': return char_class();
      case '(': {
        ++i_;
        if (peek() == '?') {
          if (peek(1) == ':') {
            i_ += 2;
          } else if (peek(1) == '=' || peek(1) == '!' || peek(1) == '<') {
            unsupported("lookaround");
          } else {
            fail("invalid group");
          }
        }
        NodeP inner = alternation();
        if (eof() || peek() != ')') fail("missing ')'");
        ++i_;
        return inner;
      }
      case ')': fail("unbalanced ')'");
      case '*':
      case '+':
      case '?': fail("nothing to repeat");
      case '\\': {
        ++i_;
        return escape_atom();
      }
      default:
        ++i_;
        return chars({{c, c}});
    }
  }

  std::uint32_t hex(int digits) {
    std::uint32_t v = 0;
    for (int k = 0; k < digits; ++k) {
      char32_t h = peek();
      int d = (h >= '0' && h <= '9') ? h - '0' : (h >= 'a' && h <= 'f') ? h - 'a' + 10 : (h >= 'A' && h <= 'F') ? h - 'A' + 10 : -1;
      if (d < 0) fail("bad hex escape");
      v = v * 16 + static_cast<std::uint32_t>(d);
      ++i_;
    }
    return v;
  }

  // Escape after the backslash; returns ranges. in_class tweaks \b.
  Ranges escape_ranges(bool in_class) {
    if (eof()) fail("trailing backslash");
    char32_t c = peek();
    ++i_;
    switch (c) {
      case 'd': return digit_ranges();
      case 'D': return negate(digit_ranges());
      case 'w': return word_ranges();
      case 'W': return negate(word_ranges());
      case 's': return space_ranges();
      case 'S': return negate(space_ranges());
      case 't': return {{'\t', '\t'}};
      case 'n': return {{'\n', '\n'}};
      case 'r': return {{'\r', '\r'}};
      case 'v': return {{'\v', '\v'}};
      case 'f': return {{'\f', '\f'}};
      case '0':
        if (peek() >= '0' && peek() <= '9') unsupported("octal escape");
        return {{0, 0}};
      case 'x': {
        char32_t v = hex(2);
        return {{v, v}};
      }
      case 'u': {
        char32_t v;
        if (peek() == '{') {
          ++i_;
          v = 0;
          int nd = 0;
          while (!eof() && peek() != '}') {
            v = v * 16 + hex(1);
            if (++nd > 6 || v > kMaxCodePoint) fail("bad \\u{} escape");
          }
          if (eof()) fail("bad \\u{} escape");
          ++i_;
        } else {
          v = hex(4);
          // surrogate pair written as two escapes
          if (v >= 0xD800 && v <= 0xDBFF && peek() == '\\' && peek(1) == 'u') {
            std::size_t save = i_;
            i_ += 2;
            char32_t lo = hex(4);
            if (lo >= 0xDC00 && lo <= 0xDFFF) {
              v = 0x10000 + ((v - 0xD800) << 10) + (lo - 0xDC00);
            } else {
              i_ = save;
            }
          }
        }
        return {{v, v}};
      }
      case 'c': {
        char32_t l = peek();
        if ((l >= 'a' && l <= 'z') || (l >= 'A' && l <= 'Z')) {
          ++i_;
          return {{l % 32, l % 32}};
        }
        fail("bad \\c escape");
      }
      case 'b':
        if (in_class) return {{'\b', '\b'}};
        unsupported("word boundary assertion");
      case 'B': unsupported("word boundary assertion");
      case 'k': unsupported("named backreference");
      case 'p':
      case 'P': unsupported("unicode property escape");
      default:
        if (c >= '1' && c <= '9') unsupported("backreference");
        if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z')) fail("unknown escape");
        return {{c, c}};
    }
  }

  NodeP escape_atom() { return chars(escape_ranges(false)); }

  NodeP char_class() {
    ++i_;  // '['
    bool neg = false;
    if (peek() == '^') {
      neg = true;
      ++i_;
    }
    Ranges acc;
    for (;;) {
      if (eof()) fail("unterminated character class");
      if (peek() == ']') break;
      Ranges lhs = class_atom();
      if (peek() == '-' && peek(1) != ']' && i_ + 1 < s_.size()) {
        ++i_;
        Ranges rhs = class_atom();
        if (lhs.size() != 1 || rhs.size() != 1 || lhs[0].first != lhs[0].second || rhs[0].first != rhs[0].second) {
          // Annex B: class escape in a range means literal '-'
          acc.insert(acc.end(), lhs.begin(), lhs.end());
          acc.emplace_back('-', '-');
          acc.insert(acc.end(), rhs.begin(), rhs.end());
          continue;
        }
        if (lhs[0].first > rhs[0].first) fail("range out of order in character class");
        acc.emplace_back(lhs[0].first, rhs[0].first);
      } else {
        acc.insert(acc.end(), lhs.begin(), lhs.end());
      }
    }
    ++i_;  // ']'
    Ranges r = normalize(acc);
    return chars(neg ? negate(r) : r);
  }

  Ranges class_atom() {
    char32_t c = peek();
    ++i_;
    if (c == '\\') return escape_ranges(true);
    return {{c, c}};
  }
};

// Thompson NFA. Bol/Eol edges are assertions on position.
struct Nfa {
  enum Kind : std::uint8_t { Eps, Bol, Eol, Chars };
  struct Edge {
    Kind kind;
    std::uint32_t set;
    std::uint32_t to;
  };
  std::vector<std::vector<Edge>> out;
  std::vector<Ranges> sets;

  std::uint32_t add() {
    if (out.size() >= kMaxNfaStates) throw Error(ErrorKind::UnsupportedRegexFeature, "regex too large");
    out.emplace_back();
    return static_cast<std::uint32_t>(out.size() - 1);
  }
  void edge(std::uint32_t a, Kind k, std::uint32_t b, std::uint32_t set = 0) { out[a].push_back({k, set, b}); }
  std::uint32_t set(Ranges r) {
    sets.push_back(std::move(r));
    return static_cast<std::uint32_t>(sets.size() - 1);
  }
};

struct Frag {
  std::uint32_t in, out;
};

Frag build(Nfa& nfa, const Node& n) {
  switch (n.kind) {
    case Node::Empty: {
      auto s = nfa.add();
      return {s, s};
    }
    case Node::Bol:
    case Node::Eol: {
      auto a = nfa.add(), b = nfa.add();
      nfa.edge(a, n.kind == Node::Bol ? Nfa::Bol : Nfa::Eol, b);
      return {a, b};
    }
    case Node::Chars: {
      auto a = nfa.add(), b = nfa.add();
      nfa.edge(a, Nfa::Chars, b, nfa.set(n.chars));
      return {a, b};
    }
    case Node::Concat: {
      Frag f = build(nfa, *n.kids[0]);
      for (std::size_t k = 1; k < n.kids.size(); ++k) {
        Frag g = build(nfa, *n.kids[k]);
        nfa.edge(f.out, Nfa::Eps, g.in);
        f.out = g.out;
      }
      return f;
    }
    case Node::Alt: {
      auto a = nfa.add(), b = nfa.add();
      for (auto& k : n.kids) {
        Frag g = build(nfa, *k);
        nfa.edge(a, Nfa::Eps, g.in);
        nfa.edge(g.out, Nfa::Eps, b);
      }
      return {a, b};
    }
    case Node::Repeat: {
      auto a = nfa.add();
      std::uint32_t cur = a;
      for (std::uint64_t k = 0; k < n.min; ++k) {
        Frag g = build(nfa, *n.kids[0]);
        nfa.edge(cur, Nfa::Eps, g.in);
        cur = g.out;
      }
      if (n.max == kInf) {
        Frag g = build(nfa, *n.kids[0]);
        auto b = nfa.add();
        nfa.edge(cur, Nfa::Eps, g.in);
        nfa.edge(g.out, Nfa::Eps, g.in);
        nfa.edge(cur, Nfa::Eps, b);
        nfa.edge(g.out, Nfa::Eps, b);
        return {a, b};
      }
      auto b = nfa.add();
      nfa.edge(cur, Nfa::Eps, b);
      for (std::uint64_t k = n.min; k < n.max; ++k) {
        Frag g = build(nfa, *n.kids[0]);
        nfa.edge(cur, Nfa::Eps, g.in);
        nfa.edge(g.out, Nfa::Eps, b);
        cur = g.out;
      }
      return {a, b};
    }
  }
  return {0, 0};
}

class Subset {
 public:
  Subset(const Nfa& nfa, std::uint32_t start, std::uint32_t fin) : nfa_(nfa), fin_(fin) {
    mark_.assign(nfa.out.size(), 0);
    intern(closure({start}, true), true);
  }

  Dfa run() {
    for (std::size_t q = 0; q < keys_.size(); ++q) expand(static_cast<std::uint32_t>(q));
    return std::move(dfa_);
  }

 private:
  const Nfa& nfa_;
  std::uint32_t fin_;
  std::vector<std::uint32_t> mark_;
  std::uint32_t stamp_ = 0;
  std::map<std::pair<std::vector<std::uint32_t>, bool>, std::uint32_t> ids_;
  std::vector<std::pair<std::vector<std::uint32_t>, bool>> keys_;
  Dfa dfa_;

  std::vector<std::uint32_t> closure(std::vector<std::uint32_t> seed, bool initial, bool at_end = false) {
    ++stamp_;
    std::vector<std::uint32_t> stack = seed, res;
    for (auto s : seed) mark_[s] = stamp_;
    while (!stack.empty()) {
      auto s = stack.back();
      stack.pop_back();
      res.push_back(s);
      for (auto& e : nfa_.out[s]) {
        bool ok = e.kind == Nfa::Eps || (e.kind == Nfa::Bol && initial) || (e.kind == Nfa::Eol && at_end);
        if (ok && mark_[e.to] != stamp_) {
          mark_[e.to] = stamp_;
          stack.push_back(e.to);
        }
      }
    }
    std::sort(res.begin(), res.end());
    return res;
  }

  std::uint32_t intern(std::vector<std::uint32_t> set, bool initial) {
    auto key = std::make_pair(std::move(set), initial);
    auto it = ids_.find(key);
    if (it != ids_.end()) return it->second;
    if (keys_.size() >= kMaxDfaStates) throw Error(ErrorKind::UnsupportedRegexFeature, "regex too complex");
    auto id = static_cast<std::uint32_t>(keys_.size());
    ids_.emplace(key, id);
    auto fin = closure(key.first, initial, true);
    dfa_.accept.push_back(std::binary_search(fin.begin(), fin.end(), fin_));
    dfa_.out.emplace_back();
    keys_.push_back(std::move(key));
    return id;
  }

  void expand(std::uint32_t q) {
    std::vector<const Nfa::Edge*> edges;
    for (auto s : keys_[q].first)
      for (auto& e : nfa_.out[s])
        if (e.kind == Nfa::Chars) edges.push_back(&e);
    std::vector<char32_t> bounds{0};
    for (auto* e : edges)
      for (auto& [lo, hi] : nfa_.sets[e->set]) {
        bounds.push_back(lo);
        if (hi < kMaxCodePoint) bounds.push_back(hi + 1);
      }
    std::sort(bounds.begin(), bounds.end());
    bounds.erase(std::unique(bounds.begin(), bounds.end()), bounds.end());
    std::vector<std::vector<std::uint32_t>> targets(bounds.size());
    for (auto* e : edges)
      for (auto& [lo, hi] : nfa_.sets[e->set]) {
        auto a = std::lower_bound(bounds.begin(), bounds.end(), lo) - bounds.begin();
        for (auto k = static_cast<std::size_t>(a); k < bounds.size() && bounds[k] <= hi; ++k) targets[k].push_back(e->to);
      }
    std::vector<Dfa::Edge> out;
    for (std::size_t k = 0; k < bounds.size(); ++k) {
      auto& t = targets[k];
      std::sort(t.begin(), t.end());
      t.erase(std::unique(t.begin(), t.end()), t.end());
      auto to = intern(closure(t, false), false);
      char32_t hi = k + 1 < bounds.size() ? bounds[k + 1] - 1 : kMaxCodePoint;
      if (!out.empty() && out.back().to == to) {
        out.back().hi = hi;
      } else {
        out.push_back({bounds[k], hi, to});
      }
    }
    dfa_.out[q] = std::move(out);
  }
};

}  // namespace

void validate_regex(std::string_view src) { Parser(src).parse(); }

Dfa dfa_from_regex(std::string_view src) {
  NodeP ast = Parser(src).parse();
  Nfa nfa;
  Ranges any{{0, kMaxCodePoint}};
  std::uint32_t any_set = nfa.set(any);
  auto start = nfa.add();
  nfa.edge(start, Nfa::Chars, start, any_set);
  Frag f = build(nfa, *ast);
  nfa.edge(start, Nfa::Eps, f.in);
  auto fin = nfa.add();
  nfa.edge(f.out, Nfa::Eps, fin);
  nfa.edge(fin, Nfa::Chars, fin, any_set);
  return dfa_minimize(Subset(nfa, start, fin).run());
}

}  // namespace refnorm
