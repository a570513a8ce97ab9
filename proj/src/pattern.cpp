#include "refnorm/pattern.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <mutex>

#include "refnorm/errors.hpp"
#include "refnorm/json_value.hpp"

namespace refnorm {

void validate_regex(std::string_view src);  // regex.cpp

namespace {

std::mutex g_pool_mu;
std::map<std::string, PatternNode*>& pool() {
  static std::map<std::string, PatternNode*> p;
  return p;
}
std::uint64_t g_next_id = 1;

Pattern intern(PatternKind kind, std::string text, std::uint64_t n, std::vector<Pattern> kids) {
  std::string key;
  key.push_back(static_cast<char>(kind));
  key += std::to_string(n);
  key.push_back('|');
  for (auto k : kids) key += std::to_string(k->id) + ",";
  key.push_back('|');
  key += text;
  std::lock_guard<std::mutex> lock(g_pool_mu);
  auto& p = pool();
  auto it = p.find(key);
  if (it != p.end()) return it->second;
  auto* node = new PatternNode();
  node->kind = kind;
  node->text = std::move(text);
  node->n = n;
  node->kids = std::move(kids);
  node->id = g_next_id++;
  auto all_kids = [&](auto pred) { return std::all_of(node->kids.begin(), node->kids.end(), pred); };
  auto any_kid = [&](auto pred) { return std::any_of(node->kids.begin(), node->kids.end(), pred); };
  auto fin = [](Pattern k) { return k->finite_hint == 1; };
  auto cof = [](Pattern k) { return k->cofinite_hint == 1; };
  switch (kind) {
    case PatternKind::Key: node->finite_hint = 1; node->cofinite_hint = 2; break;
    case PatternKind::MinLen: node->finite_hint = 2; node->cofinite_hint = 1; break;
    case PatternKind::MaxLen: node->finite_hint = 1; node->cofinite_hint = 2; break;
    case PatternKind::Regex: break;
    case PatternKind::Not:
      if (fin(node->kids[0])) node->cofinite_hint = 1, node->finite_hint = 2;
      if (cof(node->kids[0])) node->finite_hint = 1, node->cofinite_hint = 2;
      break;
    case PatternKind::All:
      if (any_kid(fin)) node->finite_hint = 1;
      if (all_kids(cof)) node->cofinite_hint = 1, node->finite_hint = 2;
      break;
    case PatternKind::Any:
      if (all_kids(fin)) node->finite_hint = 1;
      if (any_kid(cof)) node->cofinite_hint = 1, node->finite_hint = 2;
      break;
  }
  p.emplace(std::move(key), node);
  return node;
}

Pattern assoc(PatternKind kind, std::vector<Pattern> es) {
  // kind is All or Any; unit is the empty node of the same kind
  const PatternKind dual = kind == PatternKind::All ? PatternKind::Any : PatternKind::All;
  std::vector<Pattern> flat;
  for (auto e : es) {
    if (e->kind == kind) {
      flat.insert(flat.end(), e->kids.begin(), e->kids.end());
    } else if (e->kind == dual && e->kids.empty()) {
      return e;  // absorbing element
    } else {
      flat.push_back(e);
    }
  }
  std::sort(flat.begin(), flat.end(), [](Pattern a, Pattern b) { return a->id < b->id; });
  flat.erase(std::unique(flat.begin(), flat.end()), flat.end());
  if (flat.size() == 1) return flat[0];
  return intern(kind, "", 0, std::move(flat));
}

const Dfa* build(Pattern e) {
  switch (e->kind) {
    case PatternKind::Regex: return new Dfa(dfa_from_regex(e->text));
    case PatternKind::Key: return new Dfa(dfa_key(utf8_decode(e->text)));
    case PatternKind::MinLen: return new Dfa(dfa_min_len(e->n));
    case PatternKind::MaxLen: return new Dfa(dfa_max_len(e->n));
    case PatternKind::Not: return new Dfa(dfa_complement(p_dfa(e->kids[0])));
    case PatternKind::All:
    case PatternKind::Any: {
      bool conj = e->kind == PatternKind::All;
      if (e->kids.empty()) return new Dfa(conj ? dfa_min_len(0) : dfa_complement(dfa_min_len(0)));
      Dfa acc = p_dfa(e->kids[0]);
      for (std::size_t k = 1; k < e->kids.size(); ++k) acc = dfa_product(acc, p_dfa(e->kids[k]), conj);
      return new Dfa(std::move(acc));
    }
  }
  return nullptr;
}

struct RankRange {
  char32_t lo, hi;
};
constexpr RankRange kRanked[] = {{'a', 'z'},   {'A', 'Z'},   {'0', '9'},   {0x20, 0x2F}, {0x3A, 0x40},
                                 {0x5B, 0x60}, {0x7B, 0x7E}, {0x00, 0x1F}, {0x7F, kMaxCodePoint}};

// Code points leaving state q towards good targets, in ranking order.
template <class Good, class Visit>
void ranked_moves(const Dfa& d, std::uint32_t q, Good good, Visit visit) {
  for (auto& r : kRanked) {
    std::vector<Dfa::Edge> hits;
    for (auto& e : d.out[q]) {
      if (!good(e.to) || e.hi < r.lo || e.lo > r.hi) continue;
      hits.push_back({std::max(e.lo, r.lo), std::min(e.hi, r.hi), e.to});
    }
    for (auto& h : hits)
      for (char32_t c = h.lo;; ++c) {
        if (!visit(c, h.to)) return;
        if (c == h.hi) break;
      }
  }
}

}  // namespace

int cp_rank_class(char32_t c) {
  int k = 0;
  for (auto& r : kRanked) {
    if (c >= r.lo && c <= r.hi) return k;
    ++k;
  }
  return k;
}

Pattern p_regex(std::string_view src) {
  validate_regex(src);
  return intern(PatternKind::Regex, std::string(src), 0, {});
}
Pattern p_key(std::string_view key) { return intern(PatternKind::Key, std::string(key), 0, {}); }

Pattern p_min_len(std::uint64_t n) {
  if (n > kMaxLengthBound) throw Error(ErrorKind::UnsupportedFeature, "minLength above " + std::to_string(kMaxLengthBound));
  if (n == 0) return p_true();
  return intern(PatternKind::MinLen, "", n, {});
}
Pattern p_max_len(std::uint64_t n) {
  if (n > kMaxLengthBound) throw Error(ErrorKind::UnsupportedFeature, "maxLength above " + std::to_string(kMaxLengthBound));
  return intern(PatternKind::MaxLen, "", n, {});
}
Pattern p_not(Pattern e) {
  if (e->kind == PatternKind::Not) return e->kids[0];
  if (e->kind == PatternKind::All && e->kids.empty()) return p_false();
  if (e->kind == PatternKind::Any && e->kids.empty()) return p_true();
  return intern(PatternKind::Not, "", 0, {e});
}
Pattern p_all(std::vector<Pattern> es) { return assoc(PatternKind::All, std::move(es)); }
Pattern p_any(std::vector<Pattern> es) { return assoc(PatternKind::Any, std::move(es)); }
Pattern p_true() { return intern(PatternKind::All, "", 0, {}); }
Pattern p_false() { return intern(PatternKind::Any, "", 0, {}); }
Pattern p_minus(Pattern a, Pattern b) { return p_all({a, p_not(b)}); }

const Dfa& p_dfa(Pattern e) {
  const Dfa* d = e->dfa_cache.load(std::memory_order_acquire);
  if (d) return *d;
  const Dfa* fresh = build(e);
  const Dfa* expected = nullptr;
  if (!e->dfa_cache.compare_exchange_strong(expected, fresh, std::memory_order_acq_rel)) {
    delete fresh;
    return *expected;
  }
  return *fresh;
}

const std::string& p_fingerprint(Pattern e) {
  const std::string* f = e->fp_cache.load(std::memory_order_acquire);
  if (f) return *f;
  auto* fresh = new std::string(p_dfa(e).fingerprint());
  const std::string* expected = nullptr;
  if (!e->fp_cache.compare_exchange_strong(expected, fresh, std::memory_order_acq_rel)) {
    delete fresh;
    return *expected;
  }
  return *fresh;
}

bool p_is_empty(Pattern e) {
  if (e->kind == PatternKind::Key || e->cofinite_hint == 1) return false;
  return p_dfa(e).empty();
}
bool p_subset(Pattern a, Pattern b) { return a == b || p_is_empty(p_minus(a, b)); }
bool p_disjoint(Pattern a, Pattern b) { return p_is_empty(p_all({a, b})); }
bool p_equal(Pattern a, Pattern b) { return a == b || p_fingerprint(a) == p_fingerprint(b); }

bool p_contains(Pattern e, std::u32string_view s) {
  switch (e->kind) {
    case PatternKind::Regex: return p_dfa(e).accepts(s);
    case PatternKind::Key: return utf8_encode(s) == e->text;
    case PatternKind::MinLen: return s.size() >= e->n;
    case PatternKind::MaxLen: return s.size() <= e->n;
    case PatternKind::Not: return !p_contains(e->kids[0], s);
    case PatternKind::All:
      for (auto k : e->kids)
        if (!p_contains(k, s)) return false;
      return true;
    case PatternKind::Any:
      for (auto k : e->kids)
        if (p_contains(k, s)) return true;
      return false;
  }
  return false;
}

bool p_contains(Pattern e, std::string_view utf8) {
  if (e->kind == PatternKind::Key) return utf8 == e->text;
  return p_contains(e, std::u32string_view(utf8_decode(utf8)));
}

bool p_is_finite(Pattern e) {
  if (e->finite_hint) return e->finite_hint == 1;
  const Dfa& d = p_dfa(e);
  // live = reachable (always) and co-reachable
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
  // a live state with a live self loop or a wide edge means infinite too,
  // but a cycle check covers everything
  std::vector<int> color(n, 0);
  std::vector<std::pair<std::uint32_t, std::size_t>> dfs;
  for (std::uint32_t r = 0; r < n; ++r) {
    if (!live[r] || color[r]) continue;
    dfs.emplace_back(r, 0);
    color[r] = 1;
    while (!dfs.empty()) {
      auto& [q, i] = dfs.back();
      if (i < d.out[q].size()) {
        auto to = d.out[q][i++].to;
        if (!live[to]) continue;
        if (color[to] == 1) return false;
        if (color[to] == 0) {
          color[to] = 1;
          dfs.emplace_back(to, 0);
        }
      } else {
        color[q] = 2;
        dfs.pop_back();
      }
    }
  }
  return true;
}

std::optional<std::string> p_example(Pattern e) {
  if (e->kind == PatternKind::Key) return e->text;
  const Dfa& d = p_dfa(e);
  const std::size_t n = d.size();
  std::vector<std::vector<std::uint32_t>> rev(n);
  for (std::uint32_t q = 0; q < n; ++q)
    for (auto& ed : d.out[q]) rev[ed.to].push_back(q);
  std::vector<std::int64_t> dist(n, -1);
  std::deque<std::uint32_t> bfs;
  for (std::uint32_t q = 0; q < n; ++q)
    if (d.accept[q]) dist[q] = 0, bfs.push_back(q);
  while (!bfs.empty()) {
    auto q = bfs.front();
    bfs.pop_front();
    for (auto p : rev[q])
      if (dist[p] < 0) dist[p] = dist[q] + 1, bfs.push_back(p);
  }
  if (dist[0] < 0) return std::nullopt;
  std::u32string out;
  std::uint32_t q = 0;
  while (dist[q] > 0) {
    auto want = dist[q] - 1;
    bool moved = false;
    ranked_moves(d, q, [&](std::uint32_t t) { return dist[t] == want; }, [&](char32_t c, std::uint32_t t) {
      out.push_back(c);
      q = t;
      moved = true;
      return false;
    });
    if (!moved) break;
  }
  return utf8_encode(out);
}

std::vector<std::string> p_enumerate(Pattern e, std::size_t k) {
  std::vector<std::string> res;
  if (k == 0) return res;
  if (e->kind == PatternKind::Key) return {e->text};
  const Dfa& d = p_dfa(e);
  const std::size_t n = d.size();
  const bool finite = p_is_finite(e);
  if (d.empty()) return res;
  // exact[r][q]: q reaches acceptance in exactly r steps
  std::vector<std::vector<char>> exact;
  exact.emplace_back(n);
  for (std::uint32_t q = 0; q < n; ++q) exact[0][q] = d.accept[q];
  std::u32string cur;
  // DFS over strings of length L in ranked lexicographic order
  auto walk = [&](auto& self, std::uint32_t q, std::size_t rem) -> void {
    if (res.size() >= k) return;
    if (rem == 0) {
      res.push_back(utf8_encode(cur));
      return;
    }
    ranked_moves(d, q, [&](std::uint32_t t) { return exact[rem - 1][t] != 0; }, [&](char32_t c, std::uint32_t t) {
      cur.push_back(c);
      self(self, t, rem - 1);
      cur.pop_back();
      return res.size() < k;
    });
  };
  for (std::size_t L = 0; res.size() < k; ++L) {
    if (finite && L > n) break;
    if (L > kMaxLengthBound + n) break;
    while (exact.size() <= L) {
      std::vector<char> nx(n, 0);
      auto& pr = exact.back();
      for (std::uint32_t q = 0; q < n; ++q)
        for (auto& ed : d.out[q])
          if (pr[ed.to]) {
            nx[q] = 1;
            break;
          }
      exact.push_back(std::move(nx));
    }
    if (exact[L][0]) walk(walk, 0, L);
  }
  return res;
}

std::size_t p_count_upto(Pattern e, std::size_t k) {
  if (e->cofinite_hint == 1) return k;
  return p_enumerate(e, k).size();
}

Relation p_relate(Pattern e, Pattern p) {
  if (e == p) return Relation::Included;
  if (p->kind == PatternKind::Key) {
    if (!p_contains(e, std::string_view(p->text))) return Relation::Disjoint;
    if (e->kind == PatternKind::Key) return Relation::Included;
    return p_count_upto(e, 2) >= 2 ? Relation::Divided : Relation::Included;
  }
  if (e->kind == PatternKind::Key) return p_contains(p, std::string_view(e->text)) ? Relation::Included : Relation::Disjoint;
  if (p_disjoint(e, p)) return Relation::Disjoint;
  if (p_subset(e, p)) return Relation::Included;
  return Relation::Divided;
}

std::string to_string(Pattern e) {
  auto list = [&](const char* name) {
    std::string s = name;
    s += "[";
    for (std::size_t i = 0; i < e->kids.size(); ++i) s += (i ? ", " : "") + to_string(e->kids[i]);
    return s + "]";
  };
  switch (e->kind) {
    case PatternKind::Regex: return "/" + e->text + "/";
    case PatternKind::Key: return "'" + e->text + "'";
    case PatternKind::MinLen: return "minLen(" + std::to_string(e->n) + ")";
    case PatternKind::MaxLen: return "maxLen(" + std::to_string(e->n) + ")";
    case PatternKind::Not: return "not(" + to_string(e->kids[0]) + ")";
    case PatternKind::All: return e->kids.empty() ? "any-string" : list("all");
    case PatternKind::Any: return e->kids.empty() ? "no-string" : list("any");
  }
  return "?";
}

}  // namespace refnorm
