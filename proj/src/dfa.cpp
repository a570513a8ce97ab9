#include <algorithm>
#include <deque>
#include <unordered_map>

#include "refnorm/pattern.hpp"

namespace refnorm {

std::uint32_t Dfa::step(std::uint32_t s, char32_t c) const {
  auto& es = out[s];
  auto it = std::lower_bound(es.begin(), es.end(), c, [](const Edge& e, char32_t v) { return e.hi < v; });
  return it->to;
}

bool Dfa::accepts(std::u32string_view s) const {
  std::uint32_t q = 0;
  for (char32_t c : s) q = step(q, c);
  return accept[q];
}

bool Dfa::empty() const {
  std::vector<bool> seen(size());
  std::vector<std::uint32_t> st{0};
  seen[0] = true;
  while (!st.empty()) {
    auto q = st.back();
    st.pop_back();
    if (accept[q]) return false;
    for (auto& e : out[q])
      if (!seen[e.to]) {
        seen[e.to] = true;
        st.push_back(e.to);
      }
  }
  return true;
}

std::string Dfa::fingerprint() const {
  std::string fp;
  auto put = [&fp](std::uint32_t v) {
    for (int k = 0; k < 4; ++k) fp.push_back(static_cast<char>((v >> (8 * k)) & 0xFF));
  };
  put(static_cast<std::uint32_t>(size()));
  for (std::size_t q = 0; q < size(); ++q) {
    fp.push_back(accept[q] ? 1 : 0);
    put(static_cast<std::uint32_t>(out[q].size()));
    for (auto& e : out[q]) {
      put(e.lo);
      put(e.to);
    }
  }
  return fp;
}

namespace {

// BFS renumbering; drops unreachable states
Dfa canonical(const Dfa& d) {
  std::vector<std::int64_t> id(d.size(), -1);
  std::vector<std::uint32_t> order{0};
  id[0] = 0;
  for (std::size_t k = 0; k < order.size(); ++k)
    for (auto& e : d.out[order[k]])
      if (id[e.to] < 0) {
        id[e.to] = static_cast<std::int64_t>(order.size());
        order.push_back(e.to);
      }
  Dfa r;
  r.out.resize(order.size());
  r.accept.resize(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    r.accept[k] = d.accept[order[k]];
    for (auto& e : d.out[order[k]]) {
      auto to = static_cast<std::uint32_t>(id[e.to]);
      if (!r.out[k].empty() && r.out[k].back().to == to) {
        r.out[k].back().hi = e.hi;
      } else {
        r.out[k].push_back({e.lo, e.hi, to});
      }
    }
  }
  return r;
}

}  // namespace

Dfa dfa_minimize(const Dfa& d0) {
  Dfa d = canonical(d0);
  const std::size_t n = d.size();
  std::vector<char32_t> bounds;
  for (auto& es : d.out)
    for (auto& e : es) bounds.push_back(e.lo);
  std::sort(bounds.begin(), bounds.end());
  bounds.erase(std::unique(bounds.begin(), bounds.end()), bounds.end());
  const std::size_t K = bounds.size();
  std::vector<std::uint32_t> delta(n * K);
  for (std::size_t q = 0; q < n; ++q) {
    std::size_t e = 0;
    for (std::size_t k = 0; k < K; ++k) {
      while (d.out[q][e].hi < bounds[k]) ++e;
      delta[q * K + k] = d.out[q][e].to;
    }
  }
  // predecessor lists in CSR form, per symbol class
  std::vector<std::uint32_t> off(K * n + 1, 0), pred(n * K);
  for (std::size_t q = 0; q < n; ++q)
    for (std::size_t k = 0; k < K; ++k) ++off[k * n + delta[q * K + k] + 1];
  for (std::size_t i = 1; i < off.size(); ++i) off[i] += off[i - 1];
  {
    std::vector<std::uint32_t> fill(off.begin(), off.end() - 1);
    for (std::size_t q = 0; q < n; ++q)
      for (std::size_t k = 0; k < K; ++k) pred[fill[k * n + delta[q * K + k]]++] = static_cast<std::uint32_t>(q);
  }

  std::vector<std::vector<std::uint32_t>> blocks(2);
  std::vector<std::uint32_t> block(n);
  for (std::size_t q = 0; q < n; ++q) {
    block[q] = d.accept[q] ? 0 : 1;
    blocks[block[q]].push_back(static_cast<std::uint32_t>(q));
  }
  if (blocks[1].empty()) blocks.pop_back();
  if (blocks[0].empty()) {
    blocks.erase(blocks.begin());
    for (auto& b : block) b = 0;
  }
  std::deque<std::pair<std::uint32_t, std::uint32_t>> work;
  std::vector<std::vector<char>> in_work(blocks.size(), std::vector<char>(K, 0));
  {
    std::uint32_t smallest = 0;
    if (blocks.size() == 2 && blocks[1].size() < blocks[0].size()) smallest = 1;
    for (std::uint32_t k = 0; k < K; ++k) {
      work.emplace_back(smallest, k);
      in_work[smallest][k] = 1;
    }
  }
  std::vector<std::uint32_t> mark(n, 0), hits;
  std::vector<std::uint32_t> count;
  std::uint32_t stamp = 0;
  while (!work.empty()) {
    auto [A, c] = work.front();
    work.pop_front();
    in_work[A][c] = 0;
    ++stamp;
    std::vector<std::uint32_t> X;
    for (auto t : blocks[A])
      for (auto i = off[c * n + t]; i < off[c * n + t + 1]; ++i) {
        auto s = pred[i];
        if (mark[s] != stamp) {
          mark[s] = stamp;
          X.push_back(s);
        }
      }
    count.assign(blocks.size(), 0);
    hits.clear();
    for (auto s : X)
      if (count[block[s]]++ == 0) hits.push_back(block[s]);
    for (auto Y : hits) {
      if (count[Y] == blocks[Y].size()) continue;
      auto nb = static_cast<std::uint32_t>(blocks.size());
      std::vector<std::uint32_t> keep, moved;
      for (auto s : blocks[Y]) (mark[s] == stamp ? moved : keep).push_back(s);
      blocks[Y] = std::move(keep);
      for (auto s : moved) block[s] = nb;
      blocks.push_back(std::move(moved));
      in_work.emplace_back(K, 0);
      for (std::uint32_t k = 0; k < K; ++k) {
        std::uint32_t pick;
        if (in_work[Y][k]) {
          pick = nb;
        } else {
          pick = blocks[nb].size() < blocks[Y].size() ? nb : Y;
        }
        if (!in_work[pick][k]) {
          in_work[pick][k] = 1;
          work.emplace_back(pick, k);
        }
      }
    }
  }
  Dfa q;
  q.out.resize(blocks.size());
  q.accept.resize(blocks.size());
  // block of state 0 must become state 0; canonical() takes care of order
  std::vector<std::uint32_t> remap(blocks.size());
  remap[block[0]] = 0;
  std::uint32_t next = 1;
  for (std::uint32_t b = 0; b < blocks.size(); ++b)
    if (b != block[0]) remap[b] = next++;
  for (std::uint32_t b = 0; b < blocks.size(); ++b) {
    auto rep = blocks[b][0];
    auto nb = remap[b];
    q.accept[nb] = d.accept[rep];
    for (auto& e : d.out[rep]) {
      auto to = remap[block[e.to]];
      if (!q.out[nb].empty() && q.out[nb].back().to == to) {
        q.out[nb].back().hi = e.hi;
      } else {
        q.out[nb].push_back({e.lo, e.hi, to});
      }
    }
  }
  return canonical(q);
}

Dfa dfa_key(std::u32string_view key) {
  // states 0..len along the key, len+1 is the sink
  Dfa d;
  const auto len = static_cast<std::uint32_t>(key.size());
  const std::uint32_t sink = len + 1;
  d.out.resize(len + 2);
  d.accept.assign(len + 2, false);
  d.accept[len] = true;
  for (std::uint32_t i = 0; i < len; ++i) {
    char32_t c = key[i];
    if (c > 0) d.out[i].push_back({0, c - 1, sink});
    d.out[i].push_back({c, c, i + 1});
    if (c < kMaxCodePoint) d.out[i].push_back({c + 1, kMaxCodePoint, sink});
  }
  d.out[len].push_back({0, kMaxCodePoint, sink});
  d.out[sink].push_back({0, kMaxCodePoint, sink});
  return dfa_minimize(d);
}

Dfa dfa_min_len(std::uint64_t n) {
  Dfa d;
  d.out.resize(n + 1);
  d.accept.assign(n + 1, false);
  d.accept[n] = true;
  for (std::uint32_t i = 0; i <= n; ++i)
    d.out[i].push_back({0, kMaxCodePoint, static_cast<std::uint32_t>(std::min<std::uint64_t>(i + 1, n))});
  return dfa_minimize(d);
}

Dfa dfa_max_len(std::uint64_t n) {
  Dfa d;
  d.out.resize(n + 2);
  d.accept.assign(n + 2, true);
  d.accept[n + 1] = false;
  for (std::uint32_t i = 0; i <= n + 1; ++i)
    d.out[i].push_back({0, kMaxCodePoint, static_cast<std::uint32_t>(std::min<std::uint64_t>(i + 1, n + 1))});
  return dfa_minimize(d);
}

Dfa dfa_complement(const Dfa& d) {
  Dfa r = d;
  r.accept.flip();
  return r;
}

Dfa dfa_product(const Dfa& a, const Dfa& b, bool conj) {
  Dfa r;
  std::unordered_map<std::uint64_t, std::uint32_t> ids;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> todo;
  auto intern = [&](std::uint32_t x, std::uint32_t y) {
    std::uint64_t key = (static_cast<std::uint64_t>(x) << 32) | y;
    auto [it, fresh] = ids.emplace(key, static_cast<std::uint32_t>(todo.size()));
    if (fresh) {
      todo.emplace_back(x, y);
      r.out.emplace_back();
      r.accept.push_back(conj ? (a.accept[x] && b.accept[y]) : (a.accept[x] || b.accept[y]));
    }
    return it->second;
  };
  intern(0, 0);
  for (std::size_t k = 0; k < todo.size(); ++k) {
    auto [x, y] = todo[k];
    std::vector<Dfa::Edge> es;
    std::size_t i = 0, j = 0;
    const auto& ea = a.out[x];
    const auto& eb = b.out[y];
    char32_t lo = 0;
    while (i < ea.size() && j < eb.size()) {
      char32_t hi = std::min(ea[i].hi, eb[j].hi);
      auto to = intern(ea[i].to, eb[j].to);
      if (!es.empty() && es.back().to == to) {
        es.back().hi = hi;
      } else {
        es.push_back({lo, hi, to});
      }
      if (ea[i].hi == hi) ++i;
      if (eb[j].hi == hi) ++j;
      lo = hi + 1;
    }
    r.out[k] = std::move(es);
  }
  return dfa_minimize(r);
}

}  // namespace refnorm
