#include "hitt/finset.hpp"

#include <algorithm>
#include <sstream>

#include "hitt/typecheck.hpp"

namespace hitt {

// ---- values ------------------------------------------------------------------

namespace {

ValuePtr mk(Value v) { return std::make_shared<const Value>(std::move(v)); }

const Sem& env_at(const Env& env, int i) {
  if (i < 0 || i >= static_cast<int>(env.size()))
    fail(ErrKind::UnboundParam, "unbound variable during evaluation");
  return env[env.size() - 1 - static_cast<size_t>(i)];
}

bool set_contains(const FinSet& s, const ValuePtr& v) {
  for (const ValuePtr& e : s)
    if (value_eq(e, v)) return true;
  return false;
}

void sort_values(FinSet& s) {
  std::sort(s.begin(), s.end(), [](const ValuePtr& a, const ValuePtr& b) {
    return value_cmp(a, b) < 0;
  });
}

}  // namespace

ValuePtr vstar() {
  static const ValuePtr v = mk(Value{});
  return v;
}

ValuePtr vatom(const std::string& name) {
  Value v;
  v.k = Value::K::Atom;
  v.name = name;
  return mk(std::move(v));
}

ValuePtr vnum(long long n) {
  Value v;
  v.k = Value::K::Num;
  v.num = n;
  return mk(std::move(v));
}

ValuePtr vpair(ValuePtr a, ValuePtr b) {
  Value v;
  v.k = Value::K::Pair;
  v.fst = std::move(a);
  v.snd = std::move(b);
  return mk(std::move(v));
}

ValuePtr vinl(ValuePtr a) {
  Value v;
  v.k = Value::K::Inl;
  v.fst = std::move(a);
  return mk(std::move(v));
}

ValuePtr vinr(ValuePtr a) {
  Value v;
  v.k = Value::K::Inr;
  v.fst = std::move(a);
  return mk(std::move(v));
}

ValuePtr vfun(std::vector<std::pair<ValuePtr, ValuePtr>> table) {
  Value v;
  v.k = Value::K::Fun;
  v.table = std::move(table);
  return mk(std::move(v));
}

ValuePtr vcls(int tree) {
  Value v;
  v.k = Value::K::Cls;
  v.cls = tree;
  return mk(std::move(v));
}

ValuePtr vclosure(TermPtr body, Env captured) {
  Value v;
  v.k = Value::K::Closure;
  v.body = std::move(body);
  v.captured = std::make_shared<const Env>(std::move(captured));
  return mk(std::move(v));
}

int value_cmp(const ValuePtr& a, const ValuePtr& b) {
  if (a.get() == b.get()) return 0;
  if (a->k != b->k) return a->k < b->k ? -1 : 1;
  switch (a->k) {
    case Value::K::Star: return 0;
    case Value::K::Atom: {
      int c = a->name.compare(b->name);
      return c < 0 ? -1 : (c > 0 ? 1 : 0);
    }
    case Value::K::Num:
      return a->num < b->num ? -1 : (a->num > b->num ? 1 : 0);
    case Value::K::Pair: {
      int c = value_cmp(a->fst, b->fst);
      return c != 0 ? c : value_cmp(a->snd, b->snd);
    }
    case Value::K::Inl:
    case Value::K::Inr:
      return value_cmp(a->fst, b->fst);
    case Value::K::Fun: {
      size_t n = std::min(a->table.size(), b->table.size());
      for (size_t i = 0; i < n; i++) {
        int c = value_cmp(a->table[i].first, b->table[i].first);
        if (c != 0) return c;
        c = value_cmp(a->table[i].second, b->table[i].second);
        if (c != 0) return c;
      }
      if (a->table.size() != b->table.size())
        return a->table.size() < b->table.size() ? -1 : 1;
      return 0;
    }
    case Value::K::Cls:
      return a->cls < b->cls ? -1 : (a->cls > b->cls ? 1 : 0);
    case Value::K::Closure:
      fail(ErrKind::NonCanonical,
           "cannot compare function values without their type");
  }
  return 0;
}

bool value_eq(const ValuePtr& a, const ValuePtr& b) {
  return value_cmp(a, b) == 0;
}

std::string value_string(const ValuePtr& v) {
  switch (v->k) {
    case Value::K::Star: return "star";
    case Value::K::Atom: return v->name;
    case Value::K::Num: return std::to_string(v->num);
    case Value::K::Pair:
      return "(" + value_string(v->fst) + ", " + value_string(v->snd) + ")";
    case Value::K::Inl: return "inl " + value_string(v->fst);
    case Value::K::Inr: return "inr " + value_string(v->fst);
    case Value::K::Fun: {
      std::string out = "{";
      for (size_t i = 0; i < v->table.size(); i++) {
        if (i) out += ", ";
        out += value_string(v->table[i].first) + " |-> " +
               value_string(v->table[i].second);
      }
      return out + "}";
    }
    case Value::K::Cls: return "#" + std::to_string(v->cls);
    case Value::K::Closure: return "<fun>";
  }
  return "?";
}

bool ValueVecLess::operator()(const std::vector<ValuePtr>& a,
                              const std::vector<ValuePtr>& b) const {
  size_t n = std::min(a.size(), b.size());
  for (size_t i = 0; i < n; i++) {
    int c = value_cmp(a[i], b[i]);
    if (c != 0) return c < 0;
  }
  return a.size() < b.size();
}

Sem sem_val(ValuePtr v) {
  Sem s;
  s.k = Sem::K::Val;
  s.val = std::move(v);
  return s;
}

Sem sem_set(FinSet set) {
  Sem s;
  s.k = Sem::K::Set;
  s.set = std::move(set);
  return s;
}

Sem sem_fam(TypeFam f) {
  Sem s;
  s.k = Sem::K::Fam;
  s.fam = std::move(f);
  return s;
}

// ---- carrier bookkeeping -------------------------------------------------------

int Carrier::find(int i) const {
  while (parent[i] != i) {
    parent[i] = parent[parent[i]];
    i = parent[i];
  }
  return i;
}

int Carrier::canon(int i) const { return least[find(i)]; }

ValuePtr Carrier::canon_value(const ValuePtr& v) const {
  switch (v->k) {
    case Value::K::Cls: {
      int c = canon(v->cls);
      return c == v->cls ? v : vcls(c);
    }
    case Value::K::Pair: {
      ValuePtr a = canon_value(v->fst), b = canon_value(v->snd);
      return (a == v->fst && b == v->snd) ? v : vpair(a, b);
    }
    case Value::K::Inl: {
      ValuePtr a = canon_value(v->fst);
      return a == v->fst ? v : vinl(a);
    }
    case Value::K::Inr: {
      ValuePtr a = canon_value(v->fst);
      return a == v->fst ? v : vinr(a);
    }
    case Value::K::Fun: {
      bool dirty = false;
      std::vector<std::pair<ValuePtr, ValuePtr>> tab;
      tab.reserve(v->table.size());
      for (const auto& kv : v->table) {
        ValuePtr k = canon_value(kv.first), w = canon_value(kv.second);
        dirty = dirty || k != kv.first || w != kv.second;
        tab.push_back({k, w});
      }
      return dirty ? vfun(std::move(tab)) : v;
    }
    default: return v;
  }
}

std::vector<int> Carrier::class_reps() const {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(trees.size()); i++)
    if (canon(i) == i) out.push_back(i);
  return out;
}

int Carrier::class_count() const {
  return static_cast<int>(class_reps().size());
}

FinSet Carrier::class_values() const {
  FinSet out;
  for (int r : class_reps()) out.push_back(vcls(r));
  return out;
}

// ---- evaluation ----------------------------------------------------------------

namespace {

Env eval_params_in(const Evaluator& ev, const Env& ambient, const Schema& s,
                   const std::vector<TermPtr>& args);

// membership plus totality check of a value against a (possibly Pi) type
ValuePtr calibrate(const Evaluator& ev, const Env& tyEnv, const TermPtr& type,
                   const ValuePtr& v, const std::string& what) {
  if (type->tag == Tag::Pi) {
    FinSet dom = ev.eval_type(tyEnv, type->kids[0]);
    if (v->k == Value::K::Fun && v->table.size() != dom.size())
      fail(ErrKind::Mismatch, what + " is not total on its domain");
    std::vector<std::pair<ValuePtr, ValuePtr>> tab;
    for (const ValuePtr& d : dom) {
      Env e2 = tyEnv;
      e2.push_back(sem_val(d));
      tab.push_back({d, calibrate(ev, e2, type->kids[1], ev.apply(v, d), what)});
    }
    return vfun(std::move(tab));
  }
  if (v->k == Value::K::Closure)
    fail(ErrKind::NonCanonical, what + " is a function at a non-function type");
  FinSet ty = ev.eval_type(tyEnv, type);
  if (!set_contains(ty, v))
    fail(ErrKind::Mismatch, what + " takes the value " + value_string(v) +
                                " outside its type");
  return v;
}

Env eval_params_in(const Evaluator& ev, const Env& ambient, const Schema& s,
                   const std::vector<TermPtr>& args) {
  if (args.size() != s.params.size())
    fail(ErrKind::ArityMismatch,
         "schema '" + s.name + "' expects " +
             std::to_string(s.params.size()) + " parameters, got " +
             std::to_string(args.size()));
  Env out;
  for (size_t i = 0; i < args.size(); i++) {
    const ParamEntry& p = s.params[i];
    const TermPtr& a = args[i];
    if (p.is_type && p.ext.empty()) {
      out.push_back(sem_set(ev.eval_type(ambient, a)));
    } else if (p.is_type) {
      // a set-valued family; the argument is a nested finite-map literal (or
      // a family variable of the ambient environment)
      if (a->tag == Tag::Var) {
        const Sem& sm = env_at(ambient, a->index);
        if (sm.k == Sem::K::Fam &&
            sm.fam.arity == static_cast<int>(p.ext.size())) {
          out.push_back(sm);
          continue;
        }
        fail(ErrKind::Mismatch,
             "parameter '" + p.name + "' needs a type family");
      }
      TypeFam fam;
      fam.arity = static_cast<int>(p.ext.size());
      std::function<void(size_t, Env&, std::vector<ValuePtr>&, const TermPtr&)>
          walk = [&](size_t j, Env& binders, std::vector<ValuePtr>& key,
                     const TermPtr& node) {
            if (j == p.ext.size()) {
              fam.table[key] = ev.eval_type(ambient, node);
              return;
            }
            FinSet dom = ev.eval_type(binders, p.ext[j]);
            if (node->tag != Tag::FinMapLit)
              fail(ErrKind::Mismatch, "parameter '" + p.name +
                                          "' needs a finite map of types");
            std::map<std::string, TermPtr> byName;
            for (const auto& kv : node->table) {
              if (!byName.emplace(kv.first, kv.second).second)
                fail(ErrKind::Mismatch,
                     "duplicate key '" + kv.first + "' in a finite map");
            }
            if (byName.size() != dom.size())
              fail(ErrKind::Mismatch,
                   "parameter '" + p.name + "' is not total on its domain");
            for (const ValuePtr& d : dom) {
              if (d->k != Value::K::Atom)
                fail(ErrKind::Mismatch,
                     "finite map keys must be element names");
              auto it = byName.find(d->name);
              if (it == byName.end())
                fail(ErrKind::Mismatch, "parameter '" + p.name +
                                            "' misses the key '" + d->name +
                                            "'");
              binders.push_back(sem_val(d));
              key.push_back(d);
              walk(j + 1, binders, key, it->second);
              key.pop_back();
              binders.pop_back();
            }
          };
      Env binders = out;
      std::vector<ValuePtr> key;
      walk(0, binders, key, a);
      out.push_back(sem_fam(std::move(fam)));
    } else {
      // term parameter: evaluate, then force it into shape against the
      // Pi-closure of its extension
      ValuePtr v = ev.eval_term(ambient, a);
      TermPtr closure = param_pi_closure(p);
      Env tyEnv = out;
      out.push_back(sem_val(
          calibrate(ev, tyEnv, closure, v, "parameter '" + p.name + "'")));
    }
  }
  return out;
}

// tuple enumeration over a cell telescope; recursive entries range over
// ev.selfCarrier, function-shaped ones over every table into it.  env must
// hold [params, carrier]; visit sees it extended by the tuple.
void enumerate_tele(const Evaluator& ev, const CellSpec& cell, Env& env,
                    std::vector<ValuePtr>& vals, size_t i,
                    const std::function<void(Env&, std::vector<ValuePtr>&)>& visit) {
  if (i == cell.tele.size()) {
    visit(env, vals);
    return;
  }
  const TeleEntry& e = cell.tele[i];
  auto with = [&](const ValuePtr& v) {
    env.push_back(sem_val(v));
    vals.push_back(v);
    enumerate_tele(ev, cell, env, vals, i + 1, visit);
    vals.pop_back();
    env.pop_back();
  };
  if (!e.recursive) {
    for (const ValuePtr& v : ev.eval_type(env, e.type)) with(v);
  } else if (!e.type) {
    for (const ValuePtr& v : ev.selfCarrier) with(v);
  } else {
    FinSet dom = ev.eval_type(env, e.type);
    size_t m = ev.selfCarrier.size();
    if (dom.empty()) {
      with(vfun({}));
    } else if (m > 0) {
      std::vector<size_t> ix(dom.size(), 0);
      while (true) {
        std::vector<std::pair<ValuePtr, ValuePtr>> tab;
        tab.reserve(dom.size());
        for (size_t d = 0; d < dom.size(); d++)
          tab.push_back({dom[d], ev.selfCarrier[ix[d]]});
        with(vfun(std::move(tab)));
        size_t d = dom.size();
        while (d > 0 && ++ix[d - 1] == m) ix[--d] = 0;
        if (d == 0) break;
      }
    }
  }
}

}  // namespace

FinSet Evaluator::eval_type(const Env& env, const TermPtr& a) const {
  switch (a->tag) {
    case Tag::Unit: return {vstar()};
    case Tag::Nat:
      fail(ErrKind::InfiniteType, "Nat has no finite evaluation");
    case Tag::Var: {
      const Sem& s = env_at(env, a->index);
      if (s.k == Sem::K::Set) return s.set;
      fail(ErrKind::Mismatch, "variable used as a type is not one");
    }
    case Tag::App: {
      std::vector<TermPtr> spine;
      TermPtr h = a;
      while (h->tag == Tag::App) {
        spine.push_back(h->kids[1]);
        h = h->kids[0];
      }
      std::reverse(spine.begin(), spine.end());
      if (h->tag != Tag::Var)
        fail(ErrKind::NotAType, "no finite evaluation for " + raw_string(a));
      const Sem& s = env_at(env, h->index);
      if (s.k != Sem::K::Fam)
        fail(ErrKind::Mismatch, "application head is not a type family");
      if (static_cast<int>(spine.size()) != s.fam.arity)
        fail(ErrKind::ArityMismatch, "type family applied at the wrong arity");
      std::vector<ValuePtr> key;
      for (const TermPtr& t : spine) key.push_back(eval_term(env, t));
      auto it = s.fam.table.find(key);
      if (it == s.fam.table.end())
        fail(ErrKind::Mismatch, "type family applied outside its domain");
      return it->second;
    }
    case Tag::Pi: {
      FinSet dom = eval_type(env, a->kids[0]);
      std::vector<FinSet> cods;
      cods.reserve(dom.size());
      for (const ValuePtr& d : dom) {
        Env e2 = env;
        e2.push_back(sem_val(d));
        cods.push_back(eval_type(e2, a->kids[1]));
      }
      std::vector<std::vector<std::pair<ValuePtr, ValuePtr>>> acc = {{}};
      for (size_t i = 0; i < dom.size(); i++) {
        std::vector<std::vector<std::pair<ValuePtr, ValuePtr>>> next;
        for (const auto& partial : acc)
          for (const ValuePtr& w : cods[i]) {
            auto t = partial;
            t.push_back({dom[i], w});
            next.push_back(std::move(t));
          }
        acc = std::move(next);
      }
      FinSet out;
      out.reserve(acc.size());
      for (auto& tab : acc) out.push_back(vfun(std::move(tab)));
      sort_values(out);
      return out;
    }
    case Tag::Sigma: {
      FinSet dom = eval_type(env, a->kids[0]);
      FinSet out;
      for (const ValuePtr& d : dom) {
        Env e2 = env;
        e2.push_back(sem_val(d));
        for (const ValuePtr& w : eval_type(e2, a->kids[1]))
          out.push_back(vpair(d, w));
      }
      sort_values(out);
      return out;
    }
    case Tag::Sum: {
      FinSet out;
      for (const ValuePtr& v : eval_type(env, a->kids[0]))
        out.push_back(vinl(v));
      for (const ValuePtr& v : eval_type(env, a->kids[1]))
        out.push_back(vinr(v));
      sort_values(out);
      return out;
    }
    case Tag::Id: {
      ValuePtr l = reify(env, a->kids[0], eval_term(env, a->kids[1]));
      ValuePtr r = reify(env, a->kids[0], eval_term(env, a->kids[2]));
      if (value_eq(l, r)) return {vstar()};
      return {};
    }
    case Tag::IdOver: {
      // the diagonal again: inhabited exactly when the fiber points agree
      ValuePtr u = eval_term(env, a->kids[2]);
      ValuePtr v = eval_term(env, a->kids[3]);
      if (value_eq(u, v)) return {vstar()};
      return {};
    }
    case Tag::SchemaType: {
      if (self && a->head == self->name) return selfCarrier;
      const Schema* s = reg->find(a->head);
      if (!s) fail(ErrKind::UnboundSchema, "unknown schema '" + a->head + "'");
      Env ps = eval_params_in(*this, env, *s, schema_params(a));
      Carrier car = saturate(*reg, *s, ps, fuel);
      if (car.status != SatStatus::Converged)
        fail(ErrKind::InfiniteType,
             "schema instance '" + a->head + "' did not converge");
      return car.class_values();
    }
    case Tag::FinSetLit: {
      FinSet out;
      for (const std::string& n : a->atoms) out.push_back(vatom(n));
      sort_values(out);
      for (size_t i = 1; i < out.size(); i++)
        if (value_eq(out[i - 1], out[i]))
          fail(ErrKind::Mismatch,
               "duplicate element '" + out[i]->name + "' in a finite set");
      return out;
    }
    default:
      fail(ErrKind::NotAType, "no finite evaluation for " + raw_string(a));
  }
}

ValuePtr Evaluator::apply(const ValuePtr& f, const ValuePtr& a) const {
  if (f->k == Value::K::Closure) {
    Env e2 = *f->captured;
    e2.push_back(sem_val(a));
    return eval_term(e2, f->body);
  }
  if (f->k == Value::K::Fun) {
    for (const auto& kv : f->table)
      if (value_eq(kv.first, a)) return kv.second;
    fail(ErrKind::Mismatch, "function applied outside its domain");
  }
  fail(ErrKind::NonCanonical, "application of a non-function value");
}

ValuePtr Evaluator::reify(const Env& env, const TermPtr& type,
                          const ValuePtr& v) const {
  switch (type->tag) {
    case Tag::Pi: {
      FinSet dom = eval_type(env, type->kids[0]);
      std::vector<std::pair<ValuePtr, ValuePtr>> tab;
      tab.reserve(dom.size());
      for (const ValuePtr& d : dom) {
        Env e2 = env;
        e2.push_back(sem_val(d));
        tab.push_back({d, reify(e2, type->kids[1], apply(v, d))});
      }
      return vfun(std::move(tab));
    }
    case Tag::Sigma: {
      if (v->k != Value::K::Pair) return v;
      ValuePtr a = reify(env, type->kids[0], v->fst);
      Env e2 = env;
      e2.push_back(sem_val(a));
      return vpair(a, reify(e2, type->kids[1], v->snd));
    }
    case Tag::Sum: {
      if (v->k == Value::K::Inl) return vinl(reify(env, type->kids[0], v->fst));
      if (v->k == Value::K::Inr) return vinr(reify(env, type->kids[1], v->fst));
      return v;
    }
    default: return v;
  }
}

ValuePtr Evaluator::eval_term(const Env& env, const TermPtr& t) const {
  switch (t->tag) {
    case Tag::Var: {
      const Sem& s = env_at(env, t->index);
      if (s.k != Sem::K::Val)
        fail(ErrKind::Mismatch, "a type parameter used as a term");
      return s.val;
    }
    case Tag::Star: return vstar();
    case Tag::Lam: return vclosure(t->kids[0], env);
    case Tag::App:
      return apply(eval_term(env, t->kids[0]), eval_term(env, t->kids[1]));
    case Tag::Pair:
      return vpair(eval_term(env, t->kids[0]), eval_term(env, t->kids[1]));
    case Tag::Proj1: {
      ValuePtr v = eval_term(env, t->kids[0]);
      if (v->k != Value::K::Pair)
        fail(ErrKind::NonCanonical, "projection from a non-pair value");
      return v->fst;
    }
    case Tag::Proj2: {
      ValuePtr v = eval_term(env, t->kids[0]);
      if (v->k != Value::K::Pair)
        fail(ErrKind::NonCanonical, "projection from a non-pair value");
      return v->snd;
    }
    case Tag::Inl: return vinl(eval_term(env, t->kids[0]));
    case Tag::Inr: return vinr(eval_term(env, t->kids[0]));
    case Tag::SumElim: {
      ValuePtr v = eval_term(env, t->kids[3]);
      if (v->k != Value::K::Inl && v->k != Value::K::Inr)
        fail(ErrKind::NonCanonical, "case split on a non-injection value");
      Env e2 = env;
      e2.push_back(sem_val(v->fst));
      return eval_term(e2, v->k == Value::K::Inl ? t->kids[1] : t->kids[2]);
    }
    case Tag::Zero: return vnum(0);
    case Tag::Succ: {
      ValuePtr v = eval_term(env, t->kids[0]);
      if (v->k != Value::K::Num)
        fail(ErrKind::NonCanonical, "succ of a non-numeral value");
      return vnum(v->num + 1);
    }
    case Tag::NatElim: {
      ValuePtr v = eval_term(env, t->kids[3]);
      if (v->k != Value::K::Num)
        fail(ErrKind::NonCanonical, "recursion on a non-literal number");
      ValuePtr acc = eval_term(env, t->kids[1]);
      for (long long k = 0; k < v->num; k++) {
        Env e2 = env;
        e2.push_back(sem_val(vnum(k)));
        e2.push_back(sem_val(acc));
        acc = eval_term(e2, t->kids[2]);
      }
      return acc;
    }
    case Tag::Refl:
    case Tag::ReflOver:
    case Tag::Ap:
    case Tag::SchemaPathComp:
      return vstar();  // paths are diagonals; their witnesses carry no data
    case Tag::J: {
      eval_term(env, t->kids[4]);
      Env e2 = env;
      e2.push_back(sem_val(eval_term(env, t->kids[2])));
      return eval_term(e2, t->kids[1]);
    }
    case Tag::JOver: {
      eval_term(env, t->kids[4]);
      eval_term(env, t->kids[7]);
      Env e2 = env;
      e2.push_back(sem_val(eval_term(env, t->kids[2])));
      e2.push_back(sem_val(eval_term(env, t->kids[5])));
      return eval_term(e2, t->kids[1]);
    }
    case Tag::ElemLit: return vatom(t->head);
    case Tag::FinMapLit: {
      std::vector<std::pair<ValuePtr, ValuePtr>> tab;
      for (const auto& kv : t->table)
        tab.push_back({vatom(kv.first), eval_term(env, kv.second)});
      std::sort(tab.begin(), tab.end(), [](const auto& x, const auto& y) {
        return value_cmp(x.first, y.first) < 0;
      });
      for (size_t i = 1; i < tab.size(); i++)
        if (value_eq(tab[i - 1].first, tab[i].first))
          fail(ErrKind::Mismatch, "duplicate key '" + tab[i].first->name +
                                      "' in a finite map");
      return vfun(std::move(tab));
    }
    case Tag::SchemaCtor: {
      const CellSpec* cell = nullptr;
      if (self && t->head == self->name) {
        cell = &self->cells[t->index];
        if (cell->dim != CellDim::Point) return vstar();
        std::vector<TermPtr> args = ctor_args(t);
        Env teleEnv = *selfParams;
        teleEnv.push_back(sem_set(selfCarrier));
        std::vector<ValuePtr> vals;
        for (size_t i = 0; i < args.size(); i++) {
          const TeleEntry& e = cell->tele[i];
          ValuePtr raw = eval_term(env, args[i]);
          ValuePtr v;
          if (!e.recursive) {
            v = reify(teleEnv, e.type, raw);
          } else if (!e.type) {
            v = raw;
          } else if (raw->k == Value::K::Closure) {
            std::vector<std::pair<ValuePtr, ValuePtr>> tab;
            for (const ValuePtr& d : eval_type(teleEnv, e.type))
              tab.push_back({d, apply(raw, d)});
            v = vfun(std::move(tab));
          } else {
            v = raw;
          }
          vals.push_back(v);
          teleEnv.push_back(sem_val(v));
        }
        return selfApply(t->index, std::move(vals));
      }
      // a constructor of some other, separately saturated instance; the
      // deterministic loop makes the class indices reproducible
      const Schema* s = reg->find(t->head);
      if (!s) fail(ErrKind::UnboundSchema, "unknown schema '" + t->head + "'");
      if (s->cells[t->index].dim != CellDim::Point) return vstar();
      Env ps = eval_params_in(*this, env, *s, schema_params(t));
      Carrier car = saturate(*reg, *s, ps, fuel);
      if (car.status != SatStatus::Converged)
        fail(ErrKind::InfiniteType,
             "schema instance '" + t->head + "' did not converge");
      Evaluator sub = *this;
      sub.self = s;
      sub.selfParams = &car.params;
      sub.selfCarrier = car.class_values();
      sub.selfApply = [&car](int cell2, std::vector<ValuePtr> vals) {
        for (ValuePtr& v : vals) v = car.canon_value(v);
        auto it = car.ops[cell2].find(vals);
        if (it == car.ops[cell2].end())
          fail(ErrKind::NonCanonical,
               "constructor tuple missing from a converged carrier");
        return vcls(car.canon(it->second));
      };
      return sub.eval_term(env, t);
    }
    case Tag::SchemaElim: {
      const Schema* s = reg->find(t->head);
      if (!s) fail(ErrKind::UnboundSchema, "unknown schema '" + t->head + "'");
      Env ps = eval_params_in(*this, env, *s, schema_params(t));
      Carrier car = saturate(*reg, *s, ps, fuel);
      if (car.status != SatStatus::Converged)
        fail(ErrKind::InfiniteType,
             "eliminator over an unconverged carrier of '" + t->head + "'");
      TermPtr motive = elim_motive(t);
      std::vector<BoundTerm> ms = elim_methods(t);
      ElimSpec spec;
      spec.methods.resize(s->cells.size());
      for (int rep : car.class_reps()) {
        Env e2 = env;
        e2.push_back(sem_val(vcls(rep)));
        spec.motive[rep] = eval_type(e2, motive);
      }
      for (size_t j = 0; j < s->cells.size(); j++) {
        if (s->cells[j].dim != CellDim::Point) continue;
        TermPtr body = ms[j].body;
        Evaluator evc = *this;
        Env base = env;
        spec.methods[j] = [evc, base, body](const std::vector<ValuePtr>& argv) {
          Env e2 = base;
          for (const ValuePtr& v : argv) e2.push_back(sem_val(v));
          return evc.eval_term(e2, body);
        };
      }
      std::map<int, ValuePtr> section = eliminate(*reg, car, spec);
      ValuePtr sv = eval_term(env, elim_scrut(t));
      if (sv->k != Value::K::Cls)
        fail(ErrKind::NonCanonical, "eliminator scrutinee is not a carrier element");
      return section.at(car.canon(sv->cls));
    }
    case Tag::FinSetLit:
      fail(ErrKind::NonCanonical, "a finite-set literal is not a term");
    default:
      fail(ErrKind::Mismatch, "expected a term, found " + raw_string(t));
  }
}

// ---- saturation ----------------------------------------------------------------

namespace {

struct Sat {
  const Registry& reg;
  const Schema& s;
  Carrier c;
  Evaluator ev;
  bool changed = false;

  Sat(const Registry& r, const Schema& sc, Env params, int fuel)
      : reg(r), s(sc) {
    c.schema = &sc;
    c.params = std::move(params);
    c.ops.resize(sc.cells.size());
    ev.reg = &r;
    ev.fuel = fuel;
    ev.self = &sc;
    ev.selfParams = &c.params;
    ev.selfApply = [this](int cell, std::vector<ValuePtr> args) {
      return ctor_apply(cell, std::move(args));
    };
  }

  bool raw_union(int a, int b) {
    int ra = c.find(a), rb = c.find(b);
    if (ra == rb) return false;
    if (c.rnk[ra] < c.rnk[rb]) std::swap(ra, rb);
    c.parent[rb] = ra;
    if (c.rnk[ra] == c.rnk[rb]) c.rnk[ra]++;
    c.least[ra] = std::min(c.least[ra], c.least[rb]);
    return true;
  }

  void unite(int a, int b) {
    if (!raw_union(a, b)) return;
    changed = true;
    congruence();
  }

  // identified arguments must give identified results; rebuild the operation
  // tables after every union until nothing moves
  void congruence() {
    bool again = true;
    while (again) {
      again = false;
      for (auto& table : c.ops) {
        std::map<std::vector<ValuePtr>, int, ValueVecLess> next;
        for (const auto& kv : table) {
          std::vector<ValuePtr> key;
          key.reserve(kv.first.size());
          for (const ValuePtr& v : kv.first) key.push_back(c.canon_value(v));
          auto it = next.find(key);
          if (it == next.end()) {
            next.emplace(std::move(key), kv.second);
          } else if (raw_union(it->second, kv.second)) {
            changed = true;
            again = true;
          }
        }
        table = std::move(next);
      }
    }
  }

  ValuePtr ctor_apply(int cell, std::vector<ValuePtr> args) {
    for (ValuePtr& a : args) a = c.canon_value(a);
    auto& table = c.ops[cell];
    auto it = table.find(args);
    if (it != table.end()) return vcls(c.canon(it->second));
    int idx = static_cast<int>(c.trees.size());
    c.trees.push_back({cell, args});
    c.parent.push_back(idx);
    c.rnk.push_back(0);
    c.least.push_back(idx);
    table.emplace(std::move(args), idx);
    changed = true;
    return vcls(idx);
  }

  void round() {
    for (size_t ci = 0; ci < s.cells.size(); ci++) {
      const CellSpec& cell = s.cells[ci];
      if (cell.dim == CellDim::Globe2 || cell.dim == CellDim::SquareBoundary)
        continue;  // nothing above dimension one identifies anything here
      ev.selfCarrier = c.class_values();
      Env env = c.params;
      env.push_back(sem_set(ev.selfCarrier));
      std::vector<ValuePtr> vals;
      enumerate_tele(ev, cell, env, vals, 0,
                     [&](Env& e2, std::vector<ValuePtr>& tuple) {
                       if (cell.dim == CellDim::Point) {
                         ctor_apply(static_cast<int>(ci), tuple);
                         return;
                       }
                       ValuePtr a = ev.eval_term(e2, cell.src);
                       ValuePtr b = ev.eval_term(e2, cell.tgt);
                       if (a->k != Value::K::Cls || b->k != Value::K::Cls)
                         fail(ErrKind::SchemaError,
                              "path boundary did not evaluate to the carrier");
                       unite(a->cls, b->cls);
                     });
    }
  }

  Carrier run(int fuelLimit) {
    int r = 0;
    while (r < fuelLimit) {
      changed = false;
      r++;
      round();
      if (!changed) {
        c.status = SatStatus::Converged;
        c.fuelUsed = r;
        return std::move(c);
      }
    }
    c.status = SatStatus::FuelExhausted;
    c.fuelUsed = fuelLimit;
    return std::move(c);
  }
};

}  // namespace

Env eval_schema_params(const Registry& reg, const Schema& s,
                       const std::vector<TermPtr>& args, int fuel) {
  Evaluator ev;
  ev.reg = &reg;
  ev.fuel = fuel;
  Env ambient;
  return eval_params_in(ev, ambient, s, args);
}

Carrier saturate(const Registry& reg, const Schema& s, const Env& params,
                 int fuel) {
  Sat sat(reg, s, params, fuel);
  return sat.run(fuel);
}

bool convergence_holds(const Registry& reg, const Carrier& c) {
  if (c.status != SatStatus::Converged) return false;
  Evaluator ev;
  ev.reg = &reg;
  ev.self = c.schema;
  ev.selfParams = &c.params;
  ev.selfCarrier = c.class_values();
  bool ok = true;
  ev.selfApply = [&](int cell, std::vector<ValuePtr> args) -> ValuePtr {
    for (ValuePtr& v : args) v = c.canon_value(v);
    auto it = c.ops[cell].find(args);
    if (it == c.ops[cell].end()) {
      ok = false;
      return vcls(0);
    }
    return vcls(c.canon(it->second));
  };
  for (size_t ci = 0; ci < c.schema->cells.size() && ok; ci++) {
    const CellSpec& cell = c.schema->cells[ci];
    if (cell.dim != CellDim::Path) continue;
    Env env = c.params;
    env.push_back(sem_set(ev.selfCarrier));
    std::vector<ValuePtr> vals;
    enumerate_tele(ev, cell, env, vals, 0,
                   [&](Env& e2, std::vector<ValuePtr>&) {
                     if (!ok) return;
                     ValuePtr a = ev.eval_term(e2, cell.src);
                     ValuePtr b = ev.eval_term(e2, cell.tgt);
                     if (a->k != Value::K::Cls || b->k != Value::K::Cls ||
                         c.canon(a->cls) != c.canon(b->cls))
                       ok = false;
                   });
  }
  return ok;
}

std::string tree_string(const Carrier& c, int tree) {
  const Tree& t = c.trees[tree];
  std::function<std::string(const ValuePtr&)> show = [&](const ValuePtr& v) {
    switch (v->k) {
      case Value::K::Cls: return tree_string(c, c.canon(v->cls));
      case Value::K::Pair:
        return "(" + show(v->fst) + ", " + show(v->snd) + ")";
      case Value::K::Inl: return "inl " + show(v->fst);
      case Value::K::Inr: return "inr " + show(v->fst);
      case Value::K::Fun: {
        std::string out = "{";
        for (size_t i = 0; i < v->table.size(); i++) {
          if (i) out += ", ";
          out += show(v->table[i].first) + " |-> " + show(v->table[i].second);
        }
        return out + "}";
      }
      default: return value_string(v);
    }
  };
  std::string out = c.schema->cells[t.cell].name;
  if (!t.args.empty()) {
    out += "(";
    for (size_t i = 0; i < t.args.size(); i++) {
      if (i) out += ", ";
      out += show(c.canon_value(t.args[i]));
    }
    out += ")";
  }
  return out;
}

// ---- the algebra section -------------------------------------------------------

namespace {

std::vector<ValuePtr> section_args(const Carrier& c, const Tree& t,
                                   const std::function<ValuePtr(int)>& at) {
  const CellSpec& cell = c.schema->cells[t.cell];
  std::vector<ValuePtr> argv;
  argv.reserve(t.args.size() + cell.rec_count());
  for (const ValuePtr& a : t.args) argv.push_back(c.canon_value(a));
  for (size_t i = 0; i < cell.tele.size(); i++) {
    const TeleEntry& e = cell.tele[i];
    if (!e.recursive) continue;
    const ValuePtr& a = argv[i];
    if (!e.type) {
      argv.push_back(at(c.canon(a->cls)));
    } else {
      std::vector<std::pair<ValuePtr, ValuePtr>> tab;
      for (const auto& kv : a->table)
        tab.push_back({kv.first, at(c.canon(kv.second->cls))});
      argv.push_back(vfun(std::move(tab)));
    }
  }
  return argv;
}

}  // namespace

std::map<int, ValuePtr> eliminate(const Registry&, const Carrier& c,
                                  const ElimSpec& spec) {
  if (c.status != SatStatus::Converged)
    fail(ErrKind::InfiniteType, "cannot eliminate from an unconverged carrier");
  if (spec.methods.size() != c.schema->cells.size())
    fail(ErrKind::ArityMismatch, "one method per cell is required");
  std::map<int, ValuePtr> out;
  std::function<ValuePtr(int)> at = [&](int rep) -> ValuePtr {
    auto it = out.find(rep);
    if (it != out.end()) return it->second;
    const Tree& t = c.trees[rep];
    if (!spec.methods[t.cell])
      fail(ErrKind::SchemaError, "missing method for cell '" +
                                     c.schema->cells[t.cell].name + "'");
    ValuePtr v = spec.methods[t.cell](section_args(c, t, at));
    out[rep] = v;
    return v;
  };
  for (int rep : c.class_reps()) {
    ValuePtr v = at(rep);
    auto mt = spec.motive.find(rep);
    if (mt == spec.motive.end())
      fail(ErrKind::CoherenceError, "no motive set for class #" +
                                        std::to_string(rep));
    if (!set_contains(mt->second, v))
      fail(ErrKind::CoherenceError,
           "method value " + value_string(v) + " escapes the motive on " +
               tree_string(c, rep));
  }
  // the section must be well defined on every identification the loop made
  for (int i = 0; i < static_cast<int>(c.trees.size()); i++) {
    const Tree& t = c.trees[i];
    if (!spec.methods[t.cell])
      fail(ErrKind::SchemaError, "missing method for cell '" +
                                     c.schema->cells[t.cell].name + "'");
    ValuePtr v = spec.methods[t.cell](section_args(c, t, at));
    if (!value_eq(v, out.at(c.canon(i))))
      fail(ErrKind::CoherenceError,
           "methods disagree on identified constructions: " +
               tree_string(c, i));
  }
  return out;
}

// ---- initiality ----------------------------------------------------------------

namespace {

struct AlgebraOps {
  std::vector<std::map<std::vector<ValuePtr>, ValuePtr, ValueVecLess>> tables;
};

}  // namespace

InitialityReport check_universal_property(const Registry& reg,
                                          const Carrier& c, int bound) {
  if (c.status != SatStatus::Converged)
    fail(ErrKind::InfiniteType,
         "initiality is only checked for converged carriers");
  const Schema& s = *c.schema;
  InitialityReport report{bound, 0, true};
  std::vector<int> reps = c.class_reps();

  for (int n = 0; n <= bound; n++) {
    FinSet X;
    for (int k = 0; k < n; k++) X.push_back(vatom("x" + std::to_string(k)));
    Evaluator ev;
    ev.reg = &reg;
    ev.self = &s;
    ev.selfParams = &c.params;
    ev.selfCarrier = X;

    // domains of every point operation over this carrier size
    std::vector<std::vector<std::vector<ValuePtr>>> domains(s.cells.size());
    bool impossible = false;
    for (size_t ci = 0; ci < s.cells.size(); ci++) {
      if (s.cells[ci].dim != CellDim::Point) continue;
      Env env = c.params;
      env.push_back(sem_set(X));
      std::vector<ValuePtr> vals;
      enumerate_tele(ev, s.cells[ci], env, vals, 0,
                     [&](Env&, std::vector<ValuePtr>& tuple) {
                       domains[ci].push_back(tuple);
                     });
      if (!domains[ci].empty() && n == 0) impossible = true;
    }
    if (impossible) continue;

    size_t slots = 0;
    for (const auto& d : domains) slots += d.size();
    std::vector<int> pick(slots, 0);
    bool more = true;
    while (more) {
      AlgebraOps alg;
      alg.tables.resize(s.cells.size());
      size_t off = 0;
      for (size_t ci = 0; ci < s.cells.size(); ci++)
        for (const auto& key : domains[ci])
          alg.tables[ci].emplace(key, X[pick[off++]]);

      ev.selfApply = [&alg](int cell, std::vector<ValuePtr> args) {
        auto it = alg.tables[cell].find(args);
        if (it == alg.tables[cell].end())
          fail(ErrKind::NonCanonical, "operation applied outside the algebra");
        return it->second;
      };
      bool lawful = true;
      for (size_t ci = 0; ci < s.cells.size() && lawful; ci++) {
        const CellSpec& cell = s.cells[ci];
        if (cell.dim != CellDim::Path) continue;
        Env env = c.params;
        env.push_back(sem_set(X));
        std::vector<ValuePtr> vals;
        enumerate_tele(ev, cell, env, vals, 0,
                       [&](Env& e2, std::vector<ValuePtr>&) {
                         if (!lawful) return;
                         if (!value_eq(ev.eval_term(e2, cell.src),
                                       ev.eval_term(e2, cell.tgt)))
                           lawful = false;
                       });
      }
      if (lawful) {
        report.algebras++;
        // morphisms: assignments classes -> X preserving every operation
        int hits = 0;
        std::vector<int> h(reps.size(), 0);
        // with no elements downstairs a nonempty carrier has nowhere to go
        bool hmore = !(n == 0 && !reps.empty());
        while (hmore) {
          auto mapped = [&](const ValuePtr& v) -> ValuePtr {
            std::function<ValuePtr(const ValuePtr&)> go =
                [&](const ValuePtr& w) -> ValuePtr {
              if (w->k == Value::K::Cls) {
                int rep = c.canon(w->cls);
                size_t slot = std::lower_bound(reps.begin(), reps.end(), rep) -
                              reps.begin();
                return X[h[slot]];
              }
              if (w->k == Value::K::Fun) {
                std::vector<std::pair<ValuePtr, ValuePtr>> tab;
                for (const auto& kv : w->table)
                  tab.push_back({go(kv.first), go(kv.second)});
                return vfun(std::move(tab));
              }
              if (w->k == Value::K::Pair) return vpair(go(w->fst), go(w->snd));
              if (w->k == Value::K::Inl) return vinl(go(w->fst));
              if (w->k == Value::K::Inr) return vinr(go(w->fst));
              return w;
            };
            return go(v);
          };
          bool preserves = true;
          for (size_t ci = 0; ci < s.cells.size() && preserves; ci++) {
            for (const auto& kv : c.ops[ci]) {
              std::vector<ValuePtr> key;
              key.reserve(kv.first.size());
              for (const ValuePtr& v : kv.first) key.push_back(mapped(v));
              auto it = alg.tables[ci].find(key);
              if (it == alg.tables[ci].end())
                fail(ErrKind::SchemaError,
                     "carrier operation missing from the candidate algebra");
              if (!value_eq(it->second, mapped(vcls(c.canon(kv.second))))) {
                preserves = false;
                break;
              }
            }
          }
          if (preserves) hits++;
          size_t d = h.size();
          while (d > 0 && ++h[d - 1] == n) h[--d] = 0;
          if (d == 0) hmore = false;
        }
        if (hits != 1) {
          std::string witness;
          for (size_t ci = 0; ci < s.cells.size(); ci++) {
            if (alg.tables[ci].empty()) continue;
            if (!witness.empty()) witness += "; ";
            witness += s.cells[ci].name + " = {";
            bool first = true;
            for (const auto& kv : alg.tables[ci]) {
              if (!first) witness += ", ";
              first = false;
              std::string key;
              for (const ValuePtr& v : kv.first)
                key += (key.empty() ? "" : ",") + value_string(v);
              witness += "(" + key + ") |-> " + value_string(kv.second);
            }
            witness += "}";
          }
          fail(ErrKind::NotInitial,
               "algebra on " + std::to_string(n) + " elements admits " +
                   std::to_string(hits) + " morphisms from the carrier" +
                   (witness.empty() ? "" : " (" + witness + ")"));
        }
      }
      size_t d = slots;
      while (d > 0 && ++pick[d - 1] == n) pick[--d] = 0;
      if (d == 0) more = false;
    }
  }
  return report;
}

Carrier eval_request(const Registry& reg, const TermPtr& target, int fuel) {
  TermPtr t = target;
  if (t->tag != Tag::SchemaType) {
    Checker ck;
    ck.reg = &reg;
    t = ck.normalize(t);
  }
  if (t->tag == Tag::Nat)
    fail(ErrKind::InfiniteType, "Nat has no finite carrier");
  if (t->tag != Tag::SchemaType)
    fail(ErrKind::Mismatch, "eval target must be a schema instance");
  const Schema* s = reg.find(t->head);
  if (!s) fail(ErrKind::UnboundSchema, "unknown schema '" + t->head + "'");
  Env ps = eval_schema_params(reg, *s, schema_params(t), fuel);
  return saturate(reg, *s, ps, fuel);
}

}  // namespace hitt
