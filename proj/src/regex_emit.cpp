// Pattern -> anchored ECMA regex by state elimination over the minimal DFA.

#include <cstdio>
#include <map>
#include <optional>
#include <string>

#include "refnorm/compat.hpp"
#include "refnorm/json_value.hpp"

namespace refnorm {

namespace {

struct Re {
  std::string text;
  int prec = 2;  // 0 alternation, 1 concatenation, 2 atom
  bool eps = false;
};

Re epsilon() { return {"", 2, true}; }

std::string wrap(const Re& r, int need) { return r.prec < need ? "(?:" + r.text + ")" : r.text; }

Re cat(const Re& a, const Re& b) {
  if (a.eps) return b;
  if (b.eps) return a;
  return {wrap(a, 1) + wrap(b, 1), 1, false};
}

Re alt(const std::optional<Re>& a, const Re& b) {
  if (!a) return b;
  if (a->text == b.text && a->eps == b.eps) return b;
  if (a->eps) return {wrap(b, 2) + "?", 2, false};
  if (b.eps) return {wrap(*a, 2) + "?", 2, false};
  return {a->text + "|" + b.text, 0, false};
}

Re star(const std::optional<Re>& a) {
  if (!a || a->eps) return epsilon();
  return {wrap(*a, 2) + "*", 2, false};
}

void put_cp(std::string& out, char32_t c, bool in_class) {
  const char* special = in_class ? "\\]^-[" : "\\^$.|?*+()[]{}/";
  if (c >= 0x20 && c < 0x7F) {
    if (std::string(special).find(static_cast<char>(c)) != std::string::npos) out.push_back('\\');
    out.push_back(static_cast<char>(c));
  } else if (c < 0x10000) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "\\u%04X", static_cast<unsigned>(c));
    out += buf;
  } else {
    utf8_append(out, c);
  }
}

Re char_class(const std::vector<std::pair<char32_t, char32_t>>& rs) {
  if (rs.size() == 1 && rs[0].first == 0 && rs[0].second == kMaxCodePoint) return {"[\\s\\S]", 2, false};
  if (rs.size() == 1 && rs[0].first == rs[0].second) {
    std::string s;
    put_cp(s, rs[0].first, false);
    return {s, 2, false};
  }
  std::string s = "[";
  for (auto& [lo, hi] : rs) {
    put_cp(s, lo, true);
    if (hi != lo) {
      if (hi > lo + 1) s.push_back('-');
      put_cp(s, hi, true);
    }
  }
  return {s + "]", 2, false};
}

}  // namespace

std::string pattern_to_regex(Pattern e) {
  const Dfa& d = p_dfa(e);
  const std::size_t n = d.size();
  std::vector<std::vector<std::uint32_t>> rev(n);
  for (std::uint32_t q = 0; q < n; ++q)
    for (auto& ed : d.out[q]) rev[ed.to].push_back(q);
  std::vector<bool> live(n, false);
  std::vector<std::uint32_t> st;
  for (std::uint32_t q = 0; q < n; ++q)
    if (d.accept[q]) live[q] = true, st.push_back(q);
  while (!st.empty()) {
    auto q = st.back();
    st.pop_back();
    for (auto p : rev[q])
      if (!live[p]) live[p] = true, st.push_back(p);
  }
  if (!live[0]) return "[^\\s\\S]";
  // GNFA: node n is the new start, n+1 the new final
  const std::size_t S = n, F = n + 1;
  std::vector<std::map<std::size_t, Re>> R(n + 2);
  R[S][0] = epsilon();
  for (std::uint32_t q = 0; q < n; ++q) {
    if (!live[q]) continue;
    std::map<std::uint32_t, std::vector<std::pair<char32_t, char32_t>>> by_target;
    for (auto& ed : d.out[q])
      if (live[ed.to]) by_target[ed.to].emplace_back(ed.lo, ed.hi);
    for (auto& [t, rs] : by_target) R[q][t] = char_class(rs);
    if (d.accept[q]) R[q][F] = epsilon();
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (!live[k]) continue;
    std::optional<Re> self;
    if (auto it = R[k].find(k); it != R[k].end()) self = it->second;
    Re loop = star(self);
    std::vector<std::pair<std::size_t, Re>> outs;
    for (auto& [j, r] : R[k])
      if (j != k) outs.emplace_back(j, r);
    for (std::size_t i = 0; i < n + 2; ++i) {
      if (i == k) continue;
      auto it = R[i].find(k);
      if (it == R[i].end()) continue;
      Re in = it->second;
      R[i].erase(it);
      for (auto& [j, r] : outs) {
        Re path = cat(cat(in, loop), r);
        auto jt = R[i].find(j);
        std::optional<Re> prev;
        if (jt != R[i].end()) prev = jt->second;
        R[i][j] = alt(prev, path);
      }
    }
    R[k].clear();
  }
  auto it = R[S].find(F);
  Re all = it == R[S].end() ? Re{"[^\\s\\S]", 2, false} : it->second;
  return "^" + wrap(all, 1) + "$";
}

}  // namespace refnorm
