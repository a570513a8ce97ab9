#include "refnorm/witness.hpp"

#include <algorithm>
#include <map>

#include "refnorm/errors.hpp"

namespace refnorm {

namespace {

constexpr std::size_t kMaxPartitionItems = 8;
constexpr long kNearAttempts = 64;
constexpr long kExhaustiveRange = 1'000'000;

mpz_class floor_q(const mpq_class& q) {
  mpz_class r;
  mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}
mpz_class ceil_q(const mpq_class& q) {
  mpz_class r;
  mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

// Multiples k*g inside the bounds, avoiding every value in `nots`.
// Returns nullopt with *exhausted=true when provably none on this grid.
std::optional<Decimal> search_grid(const NumberConj& n, const Decimal& g, bool* exhausted) {
  *exhausted = false;
  const mpq_class& gq = g.raw();
  std::optional<mpz_class> kmin, kmax;
  if (n.lo) {
    mpq_class r = n.lo->v.raw() / gq;
    kmin = n.lo->strict ? mpz_class(floor_q(r) + 1) : ceil_q(r);
  }
  if (n.hi) {
    mpq_class r = n.hi->v.raw() / gq;
    kmax = n.hi->strict ? mpz_class(ceil_q(r) - 1) : floor_q(r);
  }
  if (kmin && kmax && *kmin > *kmax) {
    *exhausted = true;
    return std::nullopt;
  }
  // k*g is a multiple of nm iff b divides k, where g/nm = a/b reduced
  std::vector<mpz_class> dens;
  mpz_class period = 1;
  for (auto& nm : n.not_mult) {
    mpq_class r = gq / nm.raw();
    r.canonicalize();
    if (r.get_den() == 1) {
      *exhausted = true;
      return std::nullopt;
    }
    dens.push_back(r.get_den());
    mpz_lcm(period.get_mpz_t(), period.get_mpz_t(), r.get_den_mpz_t());
  }
  auto ok = [&](const mpz_class& k) {
    for (auto& b : dens)
      if (mpz_divisible_p(k.get_mpz_t(), b.get_mpz_t())) return false;
    return true;
  };
  auto inside = [&](const mpz_class& k) { return (!kmin || k >= *kmin) && (!kmax || k <= *kmax); };
  auto value = [&](const mpz_class& k) { return Decimal(mpq_class(mpq_class(k) * gq)); };

  mpz_class k0 = 0;
  if (kmin && k0 < *kmin) k0 = *kmin;
  if (kmax && k0 > *kmax) k0 = *kmax;
  for (long i = 0; i < kNearAttempts; ++i) {
    mpz_class d = (i + 1) / 2;
    mpz_class k = (i % 2 == 1) ? mpz_class(k0 + d) : mpz_class(k0 - d);
    if (i == 0) k = k0;
    if (inside(k) && ok(k)) return value(k);
  }
  // k = 1 mod period avoids every b; take the one nearest k0
  mpz_class rem;
  mpz_fdiv_r(rem.get_mpz_t(), mpz_class(k0 - 1).get_mpz_t(), period.get_mpz_t());
  mpz_class below = k0 - rem, above = below + period;
  std::optional<mpz_class> best;
  for (auto& k : {below, above})
    if (inside(k)) {
      mpz_class dk = abs(k - k0), db = best ? mpz_class(abs(*best - k0)) : mpz_class(0);
      if (!best || dk < db) best = k;
    }
  if (best) return value(*best);
  // the range is shorter than one period: scan it when small
  if (kmin && kmax && mpz_class(*kmax - *kmin) < kExhaustiveRange) {
    for (mpz_class k = *kmin; k <= *kmax; ++k)
      if (ok(k)) return value(k);
    *exhausted = true;
  }
  return std::nullopt;
}

JsonValue minimal_of(JsonType t) {
  switch (t) {
    case JsonType::Null: return nullptr;
    case JsonType::Boolean: return false;
    case JsonType::Number: return 0;
    case JsonType::String: return "";
    case JsonType::Array: return JsonValue::Array{};
    case JsonType::Object: return JsonValue::Object{};
  }
  return nullptr;
}

// set partitions of {0..m-1} as block-index vectors, fewest blocks first
const std::vector<std::vector<int>>& partitions(std::size_t m) {
  static std::map<std::size_t, std::vector<std::vector<int>>> cache;
  auto it = cache.find(m);
  if (it != cache.end()) return it->second;
  std::vector<std::vector<int>> all;
  std::vector<int> rgs(m, 0);
  auto rec = [&](auto& self, std::size_t i, int blocks) -> void {
    if (i == m) {
      all.push_back(rgs);
      return;
    }
    for (int b = 0; b <= blocks; ++b) {
      rgs[i] = b;
      self(self, i + 1, std::max(blocks, b + 1));
    }
  };
  if (m == 0) {
    all.push_back({});
  } else {
    rec(rec, 0, 0);
  }
  auto blocks = [](const std::vector<int>& v) { return v.empty() ? 0 : *std::max_element(v.begin(), v.end()) + 1; };
  std::stable_sort(all.begin(), all.end(), [&](auto& a, auto& b) { return blocks(a) < blocks(b); });
  return cache.emplace(m, std::move(all)).first->second;
}

// distinct member names, p_example first, then shortlex order
std::vector<std::string> names_in(Pattern e, std::size_t k) {
  std::vector<std::string> out;
  if (k == 0) return out;
  if (auto ex = p_example(e)) out.push_back(*ex);
  for (auto& s : p_enumerate(e, k + 1)) {
    if (out.size() >= k) break;
    if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
  }
  return out;
}

bool has_duplicates(const JsonValue::Array& a) {
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j)
      if (a[i] == a[j]) return true;
  return false;
}

}  // namespace

std::optional<JsonValue> gen_number(const NumberConj& n, bool* incomplete) {
  if (n.lo && n.hi && n.lo->v == n.hi->v) {
    if (n.lo->strict || n.hi->strict) return std::nullopt;
    const Decimal& q = n.lo->v;
    if (n.mult && !q.is_multiple_of(*n.mult)) return std::nullopt;
    for (auto& nm : n.not_mult)
      if (q.is_multiple_of(nm)) return std::nullopt;
    return JsonValue(q);
  }
  if (n.lo && n.hi && n.lo->v > n.hi->v) return std::nullopt;
  bool exhausted = false;
  if (n.mult) {
    if (auto v = search_grid(n, *n.mult, &exhausted)) return JsonValue(*v);
    if (!exhausted && incomplete) *incomplete = true;
    return std::nullopt;
  }
  // integers first, then finer decimal grids
  Decimal g = 1;
  for (int d = 0; d <= 60; ++d) {
    if (auto v = search_grid(n, g, &exhausted)) return JsonValue(*v);
    g = g / Decimal(10);
  }
  if (incomplete) *incomplete = true;
  return std::nullopt;
}

GenStatus Generator::status(const CRef& x) const {
  if (ctx_.is_false(x)) return GenStatus::Unsat;
  auto it = slots_.find(x);
  return it == slots_.end() ? GenStatus::Open : it->second.status;
}

const JsonValue* Generator::witness(const CRef& x) const {
  auto it = slots_.find(x);
  return it != slots_.end() && it->second.status == GenStatus::Witness ? &it->second.value : nullptr;
}

const JsonValue* Generator::lookup(const CRef& x) {
  if (ctx_.is_false(x)) return nullptr;
  auto [it, fresh] = slots_.try_emplace(x);
  if (fresh) {
    order_.push_back(x);
    discovered_ = true;
    ++stats_.crefs;
  }
  return it->second.status == GenStatus::Witness ? &it->second.value : nullptr;
}

const JsonValue* Generator::group_witness(const std::vector<CRef>& refs) {
  CRef z;
  for (auto& r : refs) {
    z = ctx_.all_xx(z, r);
    if (ctx_.is_false(z)) return nullptr;
  }
  return lookup(z);
}

std::optional<JsonValue> Generator::solve(const Conj& c) {
  ctx_.tick();
  return std::visit(
      [&](const auto& d) -> std::optional<JsonValue> {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, TypeSetConj>) {
          auto ms = d.types.members();
          if (ms.empty()) return std::nullopt;
          return minimal_of(ms.front());
        } else if constexpr (std::is_same_v<T, NullConj>) {
          return JsonValue(nullptr);
        } else if constexpr (std::is_same_v<T, BoolConj>) {
          return JsonValue(d.value.value_or(false));
        } else if constexpr (std::is_same_v<T, NumberConj>) {
          return gen_number(d, &incomplete_);
        } else if constexpr (std::is_same_v<T, StringConj>) {
          auto s = p_example(d.pattern);
          if (!s) return std::nullopt;
          return JsonValue(*s);
        } else if constexpr (std::is_same_v<T, ArrayConj>) {
          return solve_array(d);
        } else {
          return solve_object(d);
        }
      },
      c.data);
}

std::optional<JsonValue> Generator::solve_array(const ArrayConj& a) {
  const std::size_t na = a.items.size();
  std::uint64_t cap = a.max_its ? *a.max_its : UINT64_MAX;
  std::vector<const JsonValue*> item_w(na, nullptr);
  for (std::size_t p = 0; p < na; ++p) {
    item_w[p] = lookup(a.items[p]);
    if (!item_w[p]) {
      cap = std::min<std::uint64_t>(cap, p);
      break;
    }
  }
  const JsonValue* add_w = nullptr;
  if (cap > na) {
    add_w = lookup(a.additional);
    if (!add_w) cap = na;
  }
  if (cap < a.min_its) return std::nullopt;

  // contains entries grouped by a partition; each group sits at one position
  const std::size_t m = a.contains.size();
  if (m > kMaxPartitionItems) {
    incomplete_ = true;
    return std::nullopt;
  }
  for (auto& part : partitions(m)) {
    ctx_.tick();
    int blocks = part.empty() ? 0 : *std::max_element(part.begin(), part.end()) + 1;
    std::vector<std::vector<CRef>> refs(blocks);
    std::vector<std::uint64_t> from(blocks, 0);
    for (std::size_t i = 0; i < m; ++i) {
      refs[part[i]].push_back(a.contains[i].second);
      from[part[i]] = std::max(from[part[i]], a.contains[i].first);
    }
    std::vector<std::pair<std::uint64_t, const JsonValue*>> groups;
    bool ok = true;
    for (int b = 0; b < blocks && ok; ++b) {
      const JsonValue* w = refs[b].size() == 1 ? lookup(refs[b][0]) : group_witness(refs[b]);
      if (!w) ok = false;
      groups.emplace_back(from[b], w);
    }
    if (!ok) continue;
    std::stable_sort(groups.begin(), groups.end(), [](auto& x, auto& y) { return x.first < y.first; });
    std::map<std::uint64_t, const JsonValue*> at;
    std::uint64_t next = na;
    for (auto& [j, w] : groups) {
      std::uint64_t p = std::max(j, next);
      at[p] = w;
      next = p + 1;
    }
    std::uint64_t len = std::max<std::uint64_t>(a.min_its, groups.empty() ? 0 : next);
    if (len > cap) continue;
    JsonValue::Array out;
    out.reserve(len);
    for (std::uint64_t p = 0; p < len; ++p) {
      if (p < na) {
        out.push_back(*item_w[p]);
      } else if (auto f = at.find(p); f != at.end()) {
        out.push_back(*f->second);
      } else {
        out.push_back(*add_w);
      }
    }
    if ((a.unique && has_duplicates(out)) || (a.not_unique && !has_duplicates(out))) {
      unique_blocked_ = true;
      continue;
    }
    return JsonValue(std::move(out));
  }
  return std::nullopt;
}

std::optional<JsonValue> Generator::solve_object(const ObjectConj& o) {
  const std::size_t nf = o.frags.size();
  std::vector<std::vector<std::pair<std::string, const JsonValue*>>> fields(nf);
  std::uint64_t count = 0;
  for (std::size_t i = 0; i < nf; ++i) {
    const Fragment& f = o.frags[i];
    const std::size_t m = f.reqs.size();
    if (m == 0) continue;
    if (m > kMaxPartitionItems) {
      incomplete_ = true;
      return std::nullopt;
    }
    const std::size_t avail = p_count_upto(f.pattern, m);
    bool placed = false;
    for (auto& part : partitions(m)) {
      ctx_.tick();
      std::size_t blocks = static_cast<std::size_t>(*std::max_element(part.begin(), part.end()) + 1);
      if (blocks > avail) continue;
      std::vector<std::vector<CRef>> refs(blocks);
      for (std::size_t r = 0; r < m; ++r) refs[part[r]].push_back(f.reqs[r]);
      std::vector<const JsonValue*> ws;
      for (auto& g : refs) {
        const JsonValue* w = g.size() == 1 ? lookup(g[0]) : group_witness(g);
        if (!w) break;
        ws.push_back(w);
      }
      if (ws.size() != blocks) continue;
      auto names = names_in(f.pattern, blocks);
      if (names.size() < blocks) continue;
      for (std::size_t b = 0; b < blocks; ++b) fields[i].emplace_back(names[b], ws[b]);
      placed = true;
      break;
    }
    if (!placed) return std::nullopt;
    count += fields[i].size();
  }
  if (o.max_props && count > *o.max_props) return std::nullopt;
  for (std::size_t i = 0; i < nf && count < o.min_props; ++i) {
    const Fragment& f = o.frags[i];
    const JsonValue* w = lookup(f.pref);
    if (!w) continue;
    std::size_t want = fields[i].size() + (o.min_props - count);
    auto names = names_in(f.pattern, want);
    for (auto& nm : names) {
      if (count >= o.min_props) break;
      bool used = std::any_of(fields[i].begin(), fields[i].end(), [&](auto& p) { return p.first == nm; });
      if (used) continue;
      fields[i].emplace_back(nm, w);
      ++count;
    }
  }
  if (count < o.min_props) return std::nullopt;
  JsonValue::Object out;
  for (auto& fs : fields)
    for (auto& [k, w] : fs) out.emplace(k, *w);
  return JsonValue(std::move(out));
}

std::optional<JsonValue> Generator::generate(const Dnf& root) {
  for (;;) {
    ++stats_.rounds;
    discovered_ = false;
    for (auto& c : root)
      if (auto w = solve(c)) return w;
    bool progress = false;
    for (std::size_t i = 0; i < order_.size(); ++i) {
      CRef x = order_[i];
      if (slots_[x].status != GenStatus::Open) continue;
      const Dnf& d = ctx_.dnf_of(x);
      if (d.empty()) {
        slots_[x].status = GenStatus::Unsat;
        progress = true;
        continue;
      }
      for (auto& c : d) {
        if (auto w = solve(c)) {
          Slot& s = slots_[x];
          s.status = GenStatus::Witness;
          s.value = std::move(*w);
          progress = true;
          break;
        }
      }
    }
    if (!progress && !discovered_) break;
  }
  // anything still open would need an infinitely deep value
  for (auto& x : order_)
    if (slots_[x].status == GenStatus::Open) slots_[x].status = GenStatus::Unsat;
  if (unique_blocked_)
    throw Error(ErrorKind::UnsupportedFeature, "verdict depends on uniqueItems, which generation does not reason about");
  if (incomplete_) throw Error(ErrorKind::BudgetExceeded, "witness search bound reached");
  return std::nullopt;
}

}  // namespace refnorm
