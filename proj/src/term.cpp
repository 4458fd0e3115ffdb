#include "hitt/term.hpp"

#include <sstream>

namespace hitt {

namespace {

TermPtr make(Tag tag, std::vector<TermPtr> kids, std::vector<int> arities) {
  auto t = std::make_shared<Term>();
  t->tag = tag;
  t->kids = std::move(kids);
  t->arities = std::move(arities);
  return t;
}

}  // namespace

TermPtr var(int i) {
  if (i < 0) fail(ErrKind::NegativeIndex, "variable index below zero");
  auto t = std::make_shared<Term>();
  t->tag = Tag::Var;
  t->index = i;
  return t;
}

TermPtr pi(TermPtr dom, TermPtr cod) {
  return make(Tag::Pi, {std::move(dom), std::move(cod)}, {0, 1});
}
TermPtr lam(TermPtr body) { return make(Tag::Lam, {std::move(body)}, {1}); }
TermPtr app(TermPtr fn, TermPtr arg) {
  return make(Tag::App, {std::move(fn), std::move(arg)}, {0, 0});
}
TermPtr app_spine(TermPtr fn, const std::vector<TermPtr>& args) {
  TermPtr acc = std::move(fn);
  for (const auto& a : args) acc = app(acc, a);
  return acc;
}
TermPtr sigma(TermPtr first, TermPtr second) {
  return make(Tag::Sigma, {std::move(first), std::move(second)}, {0, 1});
}
TermPtr pair(TermPtr a, TermPtr b) {
  return make(Tag::Pair, {std::move(a), std::move(b)}, {0, 0});
}
TermPtr proj1(TermPtr p) { return make(Tag::Proj1, {std::move(p)}, {0}); }
TermPtr proj2(TermPtr p) { return make(Tag::Proj2, {std::move(p)}, {0}); }
TermPtr unit() { return make(Tag::Unit, {}, {}); }
TermPtr star() { return make(Tag::Star, {}, {}); }
TermPtr sum(TermPtr l, TermPtr r) {
  return make(Tag::Sum, {std::move(l), std::move(r)}, {0, 0});
}
TermPtr inl(TermPtr t) { return make(Tag::Inl, {std::move(t)}, {0}); }
TermPtr inr(TermPtr t) { return make(Tag::Inr, {std::move(t)}, {0}); }
TermPtr sum_elim(TermPtr motive, TermPtr lcase, TermPtr rcase, TermPtr scrut) {
  return make(Tag::SumElim,
              {std::move(motive), std::move(lcase), std::move(rcase),
               std::move(scrut)},
              {1, 1, 1, 0});
}
TermPtr id(TermPtr type, TermPtr lhs, TermPtr rhs) {
  return make(Tag::Id, {std::move(type), std::move(lhs), std::move(rhs)},
              {0, 0, 0});
}
TermPtr refl(TermPtr point) { return make(Tag::Refl, {std::move(point)}, {0}); }
TermPtr j(TermPtr motive, TermPtr base, TermPtr a1, TermPtr a2, TermPtr path) {
  return make(Tag::J,
              {std::move(motive), std::move(base), std::move(a1), std::move(a2),
               std::move(path)},
              {3, 1, 0, 0, 0});
}
TermPtr id_over(TermPtr family, TermPtr base_path, TermPtr u, TermPtr v) {
  return make(Tag::IdOver,
              {std::move(family), std::move(base_path), std::move(u),
               std::move(v)},
              {1, 0, 0, 0});
}
TermPtr refl_over(TermPtr point) {
  return make(Tag::ReflOver, {std::move(point)}, {0});
}
TermPtr j_over(TermPtr motive, TermPtr base, TermPtr a1, TermPtr a2,
               TermPtr path, TermPtr b1, TermPtr b2, TermPtr path_over) {
  return make(Tag::JOver,
              {std::move(motive), std::move(base), std::move(a1), std::move(a2),
               std::move(path), std::move(b1), std::move(b2),
               std::move(path_over)},
              {6, 2, 0, 0, 0, 0, 0, 0});
}
TermPtr ap(TermPtr fn_body, TermPtr a1, TermPtr a2, TermPtr path) {
  return make(Tag::Ap,
              {std::move(fn_body), std::move(a1), std::move(a2),
               std::move(path)},
              {1, 0, 0, 0});
}
TermPtr nat() { return make(Tag::Nat, {}, {}); }
TermPtr zero() { return make(Tag::Zero, {}, {}); }
TermPtr succ(TermPtr n) { return make(Tag::Succ, {std::move(n)}, {0}); }
TermPtr numeral(int n) {
  TermPtr t = zero();
  for (int i = 0; i < n; i++) t = succ(t);
  return t;
}
TermPtr nat_elim(TermPtr motive, TermPtr zcase, TermPtr scase, TermPtr scrut) {
  return make(Tag::NatElim,
              {std::move(motive), std::move(zcase), std::move(scase),
               std::move(scrut)},
              {1, 0, 2, 0});
}

TermPtr schema_type(const std::string& name, std::vector<TermPtr> params) {
  auto t = std::make_shared<Term>();
  t->tag = Tag::SchemaType;
  t->head = name;
  t->nparams = static_cast<int>(params.size());
  t->kids = std::move(params);
  t->arities.assign(t->kids.size(), 0);
  return t;
}

TermPtr schema_ctor(const std::string& name, std::vector<TermPtr> params,
                    int cell, std::vector<TermPtr> args) {
  auto t = std::make_shared<Term>();
  t->tag = Tag::SchemaCtor;
  t->head = name;
  t->index = cell;
  t->nparams = static_cast<int>(params.size());
  t->kids = std::move(params);
  for (auto& a : args) t->kids.push_back(std::move(a));
  t->arities.assign(t->kids.size(), 0);
  return t;
}

TermPtr schema_elim(const std::string& name, std::vector<TermPtr> params,
                    TermPtr motive, const std::vector<BoundTerm>& methods,
                    TermPtr scrut) {
  auto t = std::make_shared<Term>();
  t->tag = Tag::SchemaElim;
  t->head = name;
  t->nparams = static_cast<int>(params.size());
  t->nmethods = static_cast<int>(methods.size());
  t->kids = std::move(params);
  t->arities.assign(t->kids.size(), 0);
  t->kids.push_back(std::move(motive));
  t->arities.push_back(1);
  for (const auto& m : methods) {
    t->kids.push_back(m.body);
    t->arities.push_back(m.binders);
  }
  t->kids.push_back(std::move(scrut));
  t->arities.push_back(0);
  return t;
}

TermPtr schema_path_comp(const std::string& name, std::vector<TermPtr> params,
                         int cell, TermPtr motive,
                         const std::vector<BoundTerm>& methods,
                         std::vector<TermPtr> cell_args) {
  auto t = std::make_shared<Term>();
  t->tag = Tag::SchemaPathComp;
  t->head = name;
  t->index = cell;
  t->nparams = static_cast<int>(params.size());
  t->nmethods = static_cast<int>(methods.size());
  t->kids = std::move(params);
  t->arities.assign(t->kids.size(), 0);
  t->kids.push_back(std::move(motive));
  t->arities.push_back(1);
  for (const auto& m : methods) {
    t->kids.push_back(m.body);
    t->arities.push_back(m.binders);
  }
  for (auto& a : cell_args) {
    t->kids.push_back(std::move(a));
    t->arities.push_back(0);
  }
  return t;
}

TermPtr finset_lit(std::vector<std::string> elems) {
  auto t = std::make_shared<Term>();
  t->tag = Tag::FinSetLit;
  t->atoms = std::move(elems);
  return t;
}

TermPtr finmap_lit(std::vector<std::pair<std::string, TermPtr>> entries) {
  auto t = std::make_shared<Term>();
  t->tag = Tag::FinMapLit;
  t->table = std::move(entries);
  return t;
}

TermPtr elem_lit(const std::string& name) {
  auto t = std::make_shared<Term>();
  t->tag = Tag::ElemLit;
  t->head = name;
  return t;
}

std::vector<TermPtr> schema_params(const TermPtr& t) {
  return {t->kids.begin(), t->kids.begin() + t->nparams};
}
TermPtr elim_motive(const TermPtr& t) { return t->kids[t->nparams]; }
std::vector<BoundTerm> elim_methods(const TermPtr& t) {
  std::vector<BoundTerm> out;
  for (int i = 0; i < t->nmethods; i++) {
    int k = t->nparams + 1 + i;
    out.push_back({t->kids[k], t->arities[k]});
  }
  return out;
}
TermPtr elim_scrut(const TermPtr& t) { return t->kids.back(); }
std::vector<TermPtr> ctor_args(const TermPtr& t) {
  int from = t->nparams;
  if (t->tag == Tag::SchemaPathComp) from += 1 + t->nmethods;
  return {t->kids.begin() + from, t->kids.end()};
}

namespace {

// rebuild a node with new kids, preserving all non-kid payload
TermPtr rebuild(const TermPtr& t, std::vector<TermPtr> kids,
                std::vector<std::pair<std::string, TermPtr>> table) {
  auto u = std::make_shared<Term>(*t);
  u->kids = std::move(kids);
  u->table = std::move(table);
  return u;
}

template <typename F>
TermPtr map_term(const TermPtr& t, int depth, const F& f) {
  if (t->tag == Tag::Var) return f(t, depth);
  bool changed = false;
  std::vector<TermPtr> kids;
  kids.reserve(t->kids.size());
  for (size_t i = 0; i < t->kids.size(); i++) {
    TermPtr k = map_term(t->kids[i], depth + t->arities[i], f);
    changed = changed || k != t->kids[i];
    kids.push_back(std::move(k));
  }
  std::vector<std::pair<std::string, TermPtr>> table;
  table.reserve(t->table.size());
  for (const auto& [key, val] : t->table) {
    TermPtr v = map_term(val, depth, f);
    changed = changed || v != val;
    table.emplace_back(key, std::move(v));
  }
  if (!changed) return t;
  return rebuild(t, std::move(kids), std::move(table));
}

}  // namespace

TermPtr shift(const TermPtr& t, int cutoff, int amount) {
  if (amount == 0) return t;
  return map_term(t, cutoff, [amount](const TermPtr& v, int cut) -> TermPtr {
    if (v->index < cut) return v;
    int moved = v->index + amount;
    if (moved < cut)
      fail(ErrKind::NegativeIndex, "shift drove a variable below its cutoff");
    return var(moved);
  });
}

TermPtr substitute(const TermPtr& t, int idx, const TermPtr& value) {
  return map_term(t, 0, [idx, &value](const TermPtr& v, int depth) -> TermPtr {
    if (v->index == idx + depth) return shift(value, 0, depth);
    if (v->index > idx + depth) return var(v->index - 1);
    return v;
  });
}

Subst Subst::single(const TermPtr& value) {
  Subst s;
  s.map = {value};
  s.offset = 0;
  return s;
}

TermPtr subst_apply(const Subst& s, const TermPtr& t) {
  int n = static_cast<int>(s.map.size());
  return map_term(t, 0, [&](const TermPtr& v, int depth) -> TermPtr {
    if (v->index < depth) return v;
    int m = v->index - depth;
    if (m < n) return shift(s.map[m], 0, depth);
    int out = m - n + s.offset + depth;
    if (out < depth)
      fail(ErrKind::NegativeIndex, "substitution offset went negative");
    return var(out);
  });
}

TermPtr instantiate(const TermPtr& body, const std::vector<TermPtr>& args) {
  if (args.empty()) return body;
  Subst s;
  s.map.assign(args.rbegin(), args.rend());  // innermost binder first
  return subst_apply(s, body);
}

bool alpha_equal(const TermPtr& a, const TermPtr& b) {
  if (a == b) return true;
  if (a->tag != b->tag || a->index != b->index || a->nparams != b->nparams ||
      a->nmethods != b->nmethods || a->head != b->head ||
      a->atoms != b->atoms || a->kids.size() != b->kids.size() ||
      a->table.size() != b->table.size())
    return false;
  if (a->arities != b->arities) return false;
  for (size_t i = 0; i < a->kids.size(); i++)
    if (!alpha_equal(a->kids[i], b->kids[i])) return false;
  for (size_t i = 0; i < a->table.size(); i++) {
    if (a->table[i].first != b->table[i].first) return false;
    if (!alpha_equal(a->table[i].second, b->table[i].second)) return false;
  }
  return true;
}

bool occurs_free(const TermPtr& t, int idx) {
  bool found = false;
  map_term(t, 0, [idx, &found](const TermPtr& v, int depth) -> TermPtr {
    if (v->index == idx + depth) found = true;
    return v;
  });
  return found;
}

namespace {

const char* tag_word(Tag t) {
  switch (t) {
    case Tag::Var: return "var";
    case Tag::Pi: return "pi";
    case Tag::Lam: return "lam";
    case Tag::App: return "app";
    case Tag::Sigma: return "sigma";
    case Tag::Pair: return "pair";
    case Tag::Proj1: return "fst";
    case Tag::Proj2: return "snd";
    case Tag::Unit: return "Unit";
    case Tag::Star: return "star";
    case Tag::Sum: return "sum";
    case Tag::Inl: return "inl";
    case Tag::Inr: return "inr";
    case Tag::SumElim: return "sumelim";
    case Tag::Id: return "Id";
    case Tag::Refl: return "refl";
    case Tag::J: return "J";
    case Tag::IdOver: return "IdOver";
    case Tag::ReflOver: return "reflover";
    case Tag::JOver: return "Jover";
    case Tag::Ap: return "ap";
    case Tag::Nat: return "Nat";
    case Tag::Zero: return "zero";
    case Tag::Succ: return "succ";
    case Tag::NatElim: return "natelim";
    case Tag::SchemaType: return "schema";
    case Tag::SchemaCtor: return "ctor";
    case Tag::SchemaElim: return "elim";
    case Tag::SchemaPathComp: return "comp";
    case Tag::FinSetLit: return "finset";
    case Tag::FinMapLit: return "finmap";
    case Tag::ElemLit: return "elem";
  }
  return "?";
}

void raw_into(const TermPtr& t, std::ostringstream& out) {
  switch (t->tag) {
    case Tag::Var:
      out << "#" << t->index;
      return;
    case Tag::Unit:
    case Tag::Star:
    case Tag::Nat:
    case Tag::Zero:
      out << tag_word(t->tag);
      return;
    case Tag::ElemLit:
      out << "'" << t->head;
      return;
    case Tag::FinSetLit: {
      out << "finset{";
      for (size_t i = 0; i < t->atoms.size(); i++)
        out << (i ? ", " : "") << t->atoms[i];
      out << "}";
      return;
    }
    case Tag::FinMapLit: {
      out << "finmap{";
      for (size_t i = 0; i < t->table.size(); i++) {
        out << (i ? ", " : "") << t->table[i].first << " -> ";
        raw_into(t->table[i].second, out);
      }
      out << "}";
      return;
    }
    default:
      break;
  }
  out << "(" << tag_word(t->tag);
  if (!t->head.empty()) out << " " << t->head;
  if (t->tag == Tag::SchemaCtor || t->tag == Tag::SchemaPathComp)
    out << " @" << t->index;
  for (size_t i = 0; i < t->kids.size(); i++) {
    out << " ";
    if (t->arities[i] > 0) out << "[" << t->arities[i] << "]";
    raw_into(t->kids[i], out);
  }
  out << ")";
}

}  // namespace

std::string raw_string(const TermPtr& t) {
  std::ostringstream out;
  raw_into(t, out);
  return out.str();
}

TypingContext TypingContext::extended(TermPtr type) const {
  TypingContext c = *this;
  CtxEntry e;
  e.type = std::move(type);
  c.entries.push_back(std::move(e));
  return c;
}

TypingContext TypingContext::extended_type_var(
    std::vector<TermPtr> telescope) const {
  TypingContext c = *this;
  CtxEntry e;
  e.is_type = true;
  e.telescope = std::move(telescope);
  c.entries.push_back(std::move(e));
  return c;
}

const CtxEntry& TypingContext::entry_for(int i) const {
  if (i < 0 || i >= size())
    fail(ErrKind::UnboundVariable,
         "variable #" + std::to_string(i) + " not in context of size " +
             std::to_string(size()));
  return entries[entries.size() - 1 - static_cast<size_t>(i)];
}

TermPtr TypingContext::var_type(int i) const {
  const CtxEntry& e = entry_for(i);
  if (e.is_type)
    fail(ErrKind::NotAType,
         "variable #" + std::to_string(i) + " is a type variable, not a term");
  return shift(e.type, 0, i + 1);
}

}  // namespace hitt
