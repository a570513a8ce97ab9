#include "refnorm/normalize.hpp"

#include <algorithm>
#include <stdexcept>

#include "refnorm/errors.hpp"

namespace refnorm {

namespace {

// raised by fast mode when a conjunction is not refuted outright
struct FastFail {};

constexpr std::size_t kMaxSplitReqs = 16;

void tighten_lo(NumberConj& n, const Decimal& v, bool strict) {
  if (!n.lo || v > n.lo->v || (v == n.lo->v && strict && !n.lo->strict)) n.lo = NumBound{v, strict};
}
void tighten_hi(NumberConj& n, const Decimal& v, bool strict) {
  if (!n.hi || v < n.hi->v || (v == n.hi->v && strict && !n.hi->strict)) n.hi = NumBound{v, strict};
}

bool number_ok(const NumberConj& n) {
  if (n.lo && n.hi) {
    if (n.lo->v > n.hi->v) return false;
    if (n.lo->v == n.hi->v && (n.lo->strict || n.hi->strict)) return false;
  }
  if (n.mult) {
    for (auto& nm : n.not_mult)
      if (n.mult->is_multiple_of(nm)) return false;
    if (n.lo && n.hi) {
      Decimal x = (n.lo->v / *n.mult).ceil() * *n.mult;
      if (n.lo->strict && x == n.lo->v) x = x + *n.mult;
      if (x > n.hi->v || (x == n.hi->v && n.hi->strict)) return false;
    }
  }
  if (n.lo && n.hi && n.lo->v == n.hi->v) {
    const Decimal& q = n.lo->v;
    if (n.mult && !q.is_multiple_of(*n.mult)) return false;
    for (auto& nm : n.not_mult)
      if (q.is_multiple_of(nm)) return false;
  }
  return true;
}

bool includes(const CRef& big, const CRef& small) {
  return std::includes(big.members().begin(), big.members().end(), small.members().begin(), small.members().end());
}

// keeps the list free of requirements implied by another one
void add_req(std::vector<CRef>& reqs, const CRef& r) {
  for (auto& e : reqs)
    if (includes(e, r)) return;
  reqs.erase(std::remove_if(reqs.begin(), reqs.end(), [&](const CRef& e) { return includes(r, e); }), reqs.end());
  reqs.push_back(r);
}

const CRef& child_ref(const Schema& s) {
  if (s->kids[0]->op != Op::Ref) throw std::logic_error("unstratified structural child: " + to_string(s));
  return s->kids[0]->ref;
}

}  // namespace

JsonType keyword_type(Op op) {
  switch (op) {
    case Op::PProp:
    case Op::PReq:
    case Op::MinProps:
    case Op::MaxProps: return JsonType::Object;
    case Op::Item:
    case Op::AdditionalItems:
    case Op::ContainsAfter:
    case Op::MinIts:
    case Op::MaxIts:
    case Op::UniqueIts:
    case Op::NotUniqueIts: return JsonType::Array;
    case Op::Minimum:
    case Op::ExMin:
    case Op::Maximum:
    case Op::ExMax:
    case Op::MultipleOf:
    case Op::NotMultipleOf: return JsonType::Number;
    case Op::Pattern: return JsonType::String;
    default: throw std::logic_error("not a typed keyword");
  }
}

bool is_typed_keyword(Op op) {
  switch (op) {
    case Op::Type:
    case Op::Const:
    case Op::NotConst:
    case Op::Ref:
    case Op::True:
    case Op::False:
    case Op::AllOf:
    case Op::AnyOf:
    case Op::OneOf:
    case Op::Not: return false;
    default: return true;
  }
}

std::vector<std::pair<std::string, std::uint64_t>> stats_map(const Stats& s) {
  return {{"steps", s.steps},
          {"fast_path_hits", s.fast_path_hits},
          {"fast_path_misses", s.fast_path_misses},
          {"crefs_created", s.crefs_created}};
}

NormContext::NormContext(Env& env, Budget budget)
    : env_(env), budget_(budget), x_false_(env.x_false()), start_(std::chrono::steady_clock::now()) {}

void NormContext::tick() {
  if (++stats_.steps > budget_.max_steps)
    throw Error(ErrorKind::BudgetExceeded, "step budget of " + std::to_string(budget_.max_steps) + " exhausted");
  if ((stats_.steps & 1023) == 0) {
    std::chrono::duration<double> el = std::chrono::steady_clock::now() - start_;
    if (el.count() > budget_.timeout_s) throw Error(ErrorKind::BudgetExceeded, "timeout");
  }
}

Dnf NormContext::all_ds(const Dnf& d, const Schema& s) {
  tick();
  Dnf out;
  for (auto& c : d) out = any_dd(std::move(out), cs(c, s, false));
  return out;
}

Dnf NormContext::all_cs(const Conj& c, const Schema& s) { return cs(c, s, false); }
Dnf NormContext::fast_fail_all_cs(const Conj& c, const Schema& s) { return cs(c, s, true); }

Dnf NormContext::fast_check(const Conj& c, const std::vector<Schema>& ss) {
  for (auto& s : ss) {
    try {
      if (cs(c, s, true).empty()) return d_false();
    } catch (const FastFail&) {
    }
  }
  throw FastFail{};
}

Dnf NormContext::cs(const Conj& c, const Schema& s, bool fast) {
  tick();
  switch (s->op) {
    case Op::Ref:
      if (is_false(s->ref)) return d_false();
      return cs(c, env_.body_of(s->ref), fast);
    case Op::Not: return cs(c, not_push(s->kids[0], env_), fast);
    case Op::False: return d_false();
    case Op::True: return {c};
    case Op::AnyOf: {
      Dnf out;
      for (auto& k : s->kids) out = any_dd(std::move(out), cs(c, k, fast));
      return out;
    }
    case Op::OneOf: return cs(c, expand_oneof(s), fast);
    case Op::AllOf: {
      if (s->kids.empty()) return {c};
      if (s->kids.size() == 1) return cs(c, s->kids[0], fast);
      if (fast) return fast_check(c, s->kids);
      try {
        fast_check(c, s->kids);
        ++stats_.fast_path_hits;
        return d_false();
      } catch (const FastFail&) {
        ++stats_.fast_path_misses;
      }
      Dnf r = cs(c, s->kids[0], false);
      for (std::size_t i = 1; i < s->kids.size() && !r.empty(); ++i) r = all_ds(r, s->kids[i]);
      return r;
    }
    default: return all_ck(c, s);
  }
}

Dnf NormContext::all_ck(const Conj& c, const Schema& k) {
  tick();
  if (auto* ts = std::get_if<TypeSetConj>(&c.data)) return ck_typeset(*ts, k);
  const JsonType u = c.type();
  switch (k->op) {
    case Op::Type: return k->types.has(u) ? Dnf{c} : d_false();
    case Op::Const:
      if (k->value.type() != u) return d_false();
      break;
    case Op::NotConst:
      if (k->value.type() != u) return {c};
      break;
    default:
      if (keyword_type(k->op) != u) return {c};
  }
  switch (u) {
    case JsonType::Boolean: return ck_bool(std::get<BoolConj>(c.data), k);
    case JsonType::Number: return ck_number(std::get<NumberConj>(c.data), k);
    case JsonType::String: return ck_string(std::get<StringConj>(c.data), k);
    case JsonType::Array: return ck_array(std::get<ArrayConj>(c.data), k);
    case JsonType::Object: return ck_object(std::get<ObjectConj>(c.data), k);
    case JsonType::Null: return {c};
  }
  return {c};
}

Dnf NormContext::ck_typeset(const TypeSetConj& c, const Schema& k) {
  if (k->op == Op::Type) {
    TypeSet t = c.types & k->types;
    if (t.empty()) return d_false();
    return {Conj{TypeSetConj{t}}};
  }
  JsonType u = (k->op == Op::Const || k->op == Op::NotConst) ? k->value.type() : keyword_type(k->op);
  if (!c.types.has(u)) return k->op == Op::Const ? d_false() : Dnf{Conj{c}};
  Dnf out = all_ck(c_fresh(u), k);
  if (k->op == Op::Const) return out;
  TypeSet rest = c.types;
  rest.remove(u);
  if (!rest.empty()) out.push_back(Conj{TypeSetConj{rest}});
  return out;
}

Dnf NormContext::ck_bool(BoolConj b, const Schema& k) {
  bool v = k->value.as_bool();
  if (k->op == Op::NotConst) v = !v;
  if (b.value && *b.value != v) return d_false();
  b.value = v;
  return {Conj{b}};
}

Dnf NormContext::ck_number(NumberConj n, const Schema& k) {
  switch (k->op) {
    case Op::Const: {
      const Decimal& q = k->value.as_number();
      tighten_lo(n, q, false);
      tighten_hi(n, q, false);
      break;
    }
    case Op::NotConst: {
      const Decimal& q = k->value.as_number();
      NumberConj below = n, above = n;
      tighten_hi(below, q, true);
      tighten_lo(above, q, true);
      Dnf out;
      if (number_ok(below)) out.push_back(Conj{below});
      if (number_ok(above)) out.push_back(Conj{above});
      return out;
    }
    case Op::Minimum: tighten_lo(n, k->q, false); break;
    case Op::ExMin: tighten_lo(n, k->q, true); break;
    case Op::Maximum: tighten_hi(n, k->q, false); break;
    case Op::ExMax: tighten_hi(n, k->q, true); break;
    case Op::MultipleOf: n.mult = n.mult ? Decimal::lcm(*n.mult, k->q) : k->q; break;
    case Op::NotMultipleOf:
      if (std::find(n.not_mult.begin(), n.not_mult.end(), k->q) == n.not_mult.end()) n.not_mult.push_back(k->q);
      break;
    default: throw std::logic_error("bad number keyword");
  }
  if (!number_ok(n)) return d_false();
  return {Conj{n}};
}

Dnf NormContext::ck_string(StringConj s, const Schema& k) {
  s.pattern = p_all({s.pattern, k->pattern});
  if (p_is_empty(s.pattern)) return d_false();
  return {Conj{s}};
}

bool NormContext::array_ok(ArrayConj& a) {
  for (std::size_t p = 0; p < a.items.size(); ++p)
    if (is_false(a.items[p])) {
      if (!a.max_its || *a.max_its > p) a.max_its = p;
      break;
    }
  if (is_false(a.additional) && (!a.max_its || *a.max_its > a.items.size())) a.max_its = a.items.size();
  for (auto& [j, y] : a.contains) {
    if (is_false(y)) return false;
    a.min_its = std::max<std::uint64_t>(a.min_its, j + 1);
  }
  if (a.not_unique) a.min_its = std::max<std::uint64_t>(a.min_its, 2);
  if (a.unique && a.not_unique) return false;
  if (a.max_its && *a.max_its < a.min_its) return false;
  return true;
}

std::vector<ArrayConj> NormContext::grow(const ArrayConj& a, std::uint64_t m) {
  if (m <= a.items.size()) return {a};
  ArrayConj b = a;
  const std::uint64_t old = b.items.size();
  b.items.resize(m, b.additional);
  std::vector<std::pair<std::uint64_t, CRef>> pending;
  pending.swap(b.contains);
  std::vector<ArrayConj> alts{b};
  for (auto& [j, y] : pending) {
    std::vector<ArrayConj> next;
    for (auto& alt : alts) {
      if (j >= m) {
        alt.contains.emplace_back(j, y);
        next.push_back(alt);
        continue;
      }
      // j was in [old, m): witness lands at some now explicit position, or later
      for (std::uint64_t p = std::max(j, old); p < m; ++p) {
        ArrayConj c = alt;
        c.items[p] = all_xx(c.items[p], y);
        if (is_false(c.items[p])) continue;
        c.min_its = std::max<std::uint64_t>(c.min_its, p + 1);
        next.push_back(std::move(c));
      }
      ArrayConj c = alt;
      c.contains.emplace_back(m, y);
      next.push_back(std::move(c));
    }
    alts.swap(next);
  }
  std::vector<ArrayConj> out;
  for (auto& alt : alts)
    if (array_ok(alt)) out.push_back(std::move(alt));
  return out;
}

Dnf NormContext::ck_array(const ArrayConj& a0, const Schema& k) {
  Dnf out;
  auto emit = [&](ArrayConj& a) {
    if (array_ok(a)) out.push_back(Conj{std::move(a)});
  };
  switch (k->op) {
    case Op::Item: {
      const CRef& x = child_ref(k);
      for (auto& a : grow(a0, std::max<std::uint64_t>(k->n + 1, a0.items.size()))) {
        a.items[k->n] = all_xx(a.items[k->n], x);
        emit(a);
      }
      return out;
    }
    case Op::AdditionalItems: {
      const CRef& x = child_ref(k);
      for (auto& a : grow(a0, std::max<std::uint64_t>(k->n, a0.items.size()))) {
        for (std::size_t p = k->n; p < a.items.size(); ++p) a.items[p] = all_xx(a.items[p], x);
        a.additional = all_xx(a.additional, x);
        for (auto& [j, y] : a.contains) y = all_xx(y, x);
        emit(a);
      }
      return out;
    }
    case Op::ContainsAfter: {
      const CRef& y = child_ref(k);
      const std::uint64_t na = a0.items.size();
      for (std::uint64_t p = k->n; p < na; ++p) {
        ArrayConj a = a0;
        a.items[p] = all_xx(a.items[p], y);
        if (is_false(a.items[p])) continue;
        a.min_its = std::max<std::uint64_t>(a.min_its, p + 1);
        emit(a);
      }
      ArrayConj a = a0;
      CRef yy = all_xx(a.additional, y);
      if (is_false(yy)) return out;
      const std::uint64_t at = std::max(k->n, na);
      bool implied = false;
      for (auto& [j, e] : a.contains)
        if (j >= at && includes(e, yy)) implied = true;
      if (!implied) a.contains.emplace_back(at, yy);
      emit(a);
      return out;
    }
    case Op::MinIts: {
      ArrayConj a = a0;
      a.min_its = std::max(a.min_its, k->n);
      emit(a);
      return out;
    }
    case Op::MaxIts: {
      ArrayConj a = a0;
      if (!a.max_its || *a.max_its > k->n) a.max_its = k->n;
      emit(a);
      return out;
    }
    case Op::UniqueIts:
    case Op::NotUniqueIts: {
      ArrayConj a = a0;
      (k->op == Op::UniqueIts ? a.unique : a.not_unique) = true;
      emit(a);
      return out;
    }
    default: throw std::logic_error("bad array keyword");
  }
}

bool NormContext::object_ok(const ObjectConj& o) const {
  if (o.max_props && *o.max_props < o.min_props) return false;
  std::uint64_t needed = 0;
  std::uint64_t capacity = 0;
  bool bounded = true;
  for (auto& f : o.frags) {
    if (!f.reqs.empty()) ++needed;
    if (is_false(f.pref)) continue;
    if (f.pattern->kind == PatternKind::Key) {
      ++capacity;
    } else {
      bounded = false;
    }
  }
  if (o.max_props && needed > *o.max_props) return false;
  if (bounded && capacity < o.min_props) return false;
  return true;
}

std::vector<std::vector<Fragment>> NormContext::merge_frag_prop(const Fragment& f, Pattern p, const CRef& x) {
  tick();
  Relation rel = p_relate(f.pattern, p);
  if (rel == Relation::Disjoint) return {{f}};
  CRef pin = all_xx(f.pref, x);
  if (rel == Relation::Included) {
    Fragment g{f.pattern, pin, {}};
    for (auto& r : f.reqs) {
      CRef rr = all_xx(r, x);
      if (is_false(rr)) return {};
      add_req(g.reqs, rr);
    }
    return {{g}};
  }
  Pattern inter = p_all({f.pattern, p});
  Pattern diff = p_minus(f.pattern, p);
  if (f.reqs.empty()) return {{Fragment{inter, pin, {}}, Fragment{diff, f.pref, {}}}};
  const std::size_t m = f.reqs.size();
  if (m > kMaxSplitReqs)
    throw Error(ErrorKind::BudgetExceeded, "fragment split over " + std::to_string(m) + " requirements");
  std::vector<CRef> refined(m);
  for (std::size_t i = 0; i < m; ++i) refined[i] = all_xx(f.reqs[i], x);
  std::vector<std::vector<Fragment>> alts;
  for (std::uint64_t mask = 0; mask < (1ULL << m); ++mask) {
    Fragment in{inter, pin, {}}, out{diff, f.pref, {}};
    bool dead = false;
    for (std::size_t i = 0; i < m; ++i) {
      if (mask & (1ULL << i)) {
        if (is_false(refined[i])) {
          dead = true;
          break;
        }
        add_req(in.reqs, refined[i]);
      } else {
        add_req(out.reqs, f.reqs[i]);
      }
    }
    if (!dead) alts.push_back({std::move(in), std::move(out)});
  }
  return alts;
}

namespace {

// index of the fragment holding key k, if p is a key; -1 otherwise
long key_home(const ObjectConj& o, Pattern p) {
  if (p->kind != PatternKind::Key) return -1;
  for (std::size_t i = 0; i < o.frags.size(); ++i)
    if (o.frags[i].pattern == p) return static_cast<long>(i);
  for (std::size_t i = 0; i < o.frags.size(); ++i) {
    Pattern e = o.frags[i].pattern;
    if (e->kind == PatternKind::Key) continue;  // a different key: disjoint
    if (p_contains(e, std::string_view(p->text))) return static_cast<long>(i);
  }
  return -1;
}

}  // namespace

Dnf NormContext::obj_pprop(const ObjectConj& o, Pattern p, const CRef& x) {
  if (x.is_true()) return {Conj{o}};
  std::vector<std::size_t> touched;
  long home = key_home(o, p);
  if (p->kind == PatternKind::Key) {
    if (home < 0) return {Conj{o}};
    touched.push_back(static_cast<std::size_t>(home));
  } else {
    for (std::size_t i = 0; i < o.frags.size(); ++i) touched.push_back(i);
  }
  // per touched fragment, its alternatives; product over them
  std::vector<ObjectConj> alts{o};
  for (auto& a : alts) a.frags.clear();
  std::size_t t = 0;
  for (std::size_t i = 0; i < o.frags.size(); ++i) {
    if (t >= touched.size() || touched[t] != i) {
      for (auto& a : alts) a.frags.push_back(o.frags[i]);
      continue;
    }
    ++t;
    auto choices = merge_frag_prop(o.frags[i], p, x);
    if (choices.empty()) return d_false();
    std::vector<ObjectConj> next;
    for (auto& a : alts)
      for (auto& ch : choices) {
        ObjectConj b = a;
        b.frags.insert(b.frags.end(), ch.begin(), ch.end());
        next.push_back(std::move(b));
      }
    alts.swap(next);
  }
  Dnf out;
  for (auto& a : alts)
    if (object_ok(a)) out.push_back(Conj{std::move(a)});
  return out;
}

Dnf NormContext::obj_preq(const ObjectConj& o, Pattern p, const CRef& y) {
  std::vector<std::size_t> cands;
  long home = key_home(o, p);
  if (p->kind == PatternKind::Key) {
    if (home < 0) return d_false();
    cands.push_back(static_cast<std::size_t>(home));
  } else {
    for (std::size_t i = 0; i < o.frags.size(); ++i) cands.push_back(i);
  }
  Dnf out;
  for (auto i : cands) {
    tick();
    const Fragment& f = o.frags[i];
    Relation rel = p_relate(f.pattern, p);
    if (rel == Relation::Disjoint) continue;
    CRef yy = all_xx(f.pref, y);
    if (is_false(yy)) continue;
    auto place = [&](std::vector<Fragment> repl) {
      ObjectConj b;
      b.min_props = o.min_props;
      b.max_props = o.max_props;
      b.frags.clear();
      for (std::size_t j = 0; j < o.frags.size(); ++j) {
        if (j == i) {
          b.frags.insert(b.frags.end(), repl.begin(), repl.end());
        } else {
          b.frags.push_back(o.frags[j]);
        }
      }
      if (object_ok(b)) out.push_back(Conj{std::move(b)});
    };
    if (rel == Relation::Included) {
      Fragment g = f;
      add_req(g.reqs, yy);
      place({g});
      continue;
    }
    const std::size_t m = f.reqs.size();
    if (m > kMaxSplitReqs)
      throw Error(ErrorKind::BudgetExceeded, "fragment split over " + std::to_string(m) + " requirements");
    Pattern inter = p_all({f.pattern, p});
    Pattern diff = p_minus(f.pattern, p);
    for (std::uint64_t mask = 0; mask < (1ULL << m); ++mask) {
      Fragment in{inter, f.pref, {}}, rest{diff, f.pref, {}};
      for (std::size_t r = 0; r < m; ++r) add_req((mask & (1ULL << r)) ? in.reqs : rest.reqs, f.reqs[r]);
      add_req(in.reqs, yy);
      place({in, rest});
    }
  }
  return out;
}

Dnf NormContext::ck_object(const ObjectConj& o, const Schema& k) {
  switch (k->op) {
    case Op::PProp: return obj_pprop(o, k->pattern, child_ref(k));
    case Op::PReq: return obj_preq(o, k->pattern, child_ref(k));
    case Op::MinProps: {
      ObjectConj b = o;
      b.min_props = std::max(b.min_props, k->n);
      if (!object_ok(b)) return d_false();
      return {Conj{std::move(b)}};
    }
    case Op::MaxProps: {
      ObjectConj b = o;
      if (!b.max_props || *b.max_props > k->n) b.max_props = k->n;
      if (!object_ok(b)) return d_false();
      return {Conj{std::move(b)}};
    }
    default: throw std::logic_error("bad object keyword");
  }
}

CRef NormContext::all_xx(const CRef& x, const CRef& y) {
  tick();
  if (is_false(x) || is_false(y)) return x_false_;
  CRef u = x.join(y);
  if (u.is_true()) return u;
  if (u.has_complementary_pair()) return x_false_;
  auto it = memo_.find(u);
  if (it != memo_.end()) {
    if (!it->second.done) return u;  // being computed further up
    return it->second.dnf.empty() ? x_false_ : u;
  }
  return dnf_of(u).empty() ? x_false_ : u;
}

bool NormContext::memo_done(const CRef& x) const {
  auto it = memo_.find(x);
  return it != memo_.end() && it->second.done;
}

const Dnf& NormContext::dnf_of(const CRef& x) {
  auto it = memo_.find(x);
  if (it != memo_.end()) {
    if (!it->second.done) throw std::logic_error("dnf_of on a c-ref still in progress");
    return it->second.dnf;
  }
  MemoEntry& e = memo_[x];
  ++stats_.crefs_created;
  try {
    Dnf d = x.is_true() ? Dnf{c_true()} : cs(c_true(), env_.body_of(x), false);
    e.dnf = std::move(d);
    e.done = true;
  } catch (...) {
    memo_.erase(x);
    throw;
  }
  return e.dnf;
}

}  // namespace refnorm
