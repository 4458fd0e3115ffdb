#include "hitt/schema.hpp"

#include <algorithm>
#include <set>

#include "hitt/typecheck.hpp"

namespace hitt {

int Schema::cell_index(const std::string& cellName) const {
  for (size_t i = 0; i < cells.size(); i++)
    if (cells[i].name == cellName) return static_cast<int>(i);
  return -1;
}

// ---- clause comparison ------------------------------------------------------

namespace {

bool term_opt_equal(const TermPtr& a, const TermPtr& b) {
  if (!a || !b) return !a && !b;
  return alpha_equal(a, b);
}

bool entry_equal(const CtxEntry& a, const CtxEntry& b) {
  if (a.is_type != b.is_type) return false;
  if (!term_opt_equal(a.type, b.type)) return false;
  if (a.telescope.size() != b.telescope.size()) return false;
  for (size_t i = 0; i < a.telescope.size(); i++)
    if (!alpha_equal(a.telescope[i], b.telescope[i])) return false;
  return true;
}

bool ctx_equal(const TypingContext& a, const TypingContext& b) {
  if (a.entries.size() != b.entries.size()) return false;
  for (size_t i = 0; i < a.entries.size(); i++)
    if (!entry_equal(a.entries[i], b.entries[i])) return false;
  return true;
}

}  // namespace

bool clause_equal(const TypingClause& a, const TypingClause& b) {
  return ctx_equal(a.ctx, b.ctx) && term_opt_equal(a.subject, b.subject) &&
         term_opt_equal(a.type, b.type);
}

bool ruleset_equal(const RuleSet& a, const RuleSet& b) {
  if (a.schema != b.schema) return false;
  if (!clause_equal(a.formation, b.formation)) return false;
  if (a.intros.size() != b.intros.size()) return false;
  for (size_t i = 0; i < a.intros.size(); i++)
    if (!clause_equal(a.intros[i], b.intros[i])) return false;
  if (!clause_equal(a.elim, b.elim)) return false;
  if (a.beta.size() != b.beta.size()) return false;
  for (size_t i = 0; i < a.beta.size(); i++) {
    if (!ctx_equal(a.beta[i].ctx, b.beta[i].ctx)) return false;
    if (!alpha_equal(a.beta[i].lhs, b.beta[i].lhs)) return false;
    if (!alpha_equal(a.beta[i].rhs, b.beta[i].rhs)) return false;
  }
  if (a.path_comp.size() != b.path_comp.size()) return false;
  for (size_t i = 0; i < a.path_comp.size(); i++)
    if (!clause_equal(a.path_comp[i], b.path_comp[i])) return false;
  return true;
}

// ---- opening stored terms ----------------------------------------------------

TermPtr open_with(const TermPtr& stored, int inner,
                  const std::vector<TermPtr>& outerValues) {
  int n = static_cast<int>(outerValues.size());
  Subst su;
  su.map.resize(inner + n);
  for (int k = 0; k < inner; k++) su.map[k] = var(k);
  for (int t = 0; t < n; t++)
    su.map[inner + t] = shift(outerValues[n - 1 - t], 0, inner);
  return subst_apply(su, stored);
}

namespace {

// give bare same-schema constructor references their parameter arguments,
// shifted under whatever binders sit above them
TermPtr insert_ctor_params(const Schema& s, const TermPtr& t,
                           const std::vector<TermPtr>& values, int depth) {
  std::vector<TermPtr> kids;
  kids.reserve(t->kids.size());
  bool changed = false;
  for (size_t i = 0; i < t->kids.size(); i++) {
    TermPtr k =
        insert_ctor_params(s, t->kids[i], values, depth + t->arities[i]);
    changed = changed || k != t->kids[i];
    kids.push_back(std::move(k));
  }
  if (t->tag == Tag::SchemaCtor && t->head == s.name && t->nparams == 0 &&
      !values.empty()) {
    std::vector<TermPtr> ps;
    ps.reserve(values.size());
    for (const TermPtr& v : values) ps.push_back(shift(v, 0, depth));
    return schema_ctor(s.name, std::move(ps), t->index, std::move(kids));
  }
  if (!changed) return t;
  auto u = std::make_shared<Term>(*t);
  u->kids = std::move(kids);
  return u;
}

}  // namespace

TermPtr rebase_cell_term(const Schema& s, const TermPtr& stored, int inner,
                         const TermPtr& carrier,
                         const std::vector<TermPtr>& paramValues) {
  int n = static_cast<int>(paramValues.size());
  Subst su;
  su.map.resize(inner + 1 + n);
  for (int k = 0; k < inner; k++) su.map[k] = var(k);
  su.map[inner] = shift(carrier, 0, inner);
  for (int t = 0; t < n; t++)
    su.map[inner + 1 + t] = shift(paramValues[n - 1 - t], 0, inner);
  TermPtr out = subst_apply(su, stored);
  return insert_ctor_params(s, out, paramValues, inner);
}

TermPtr tele_binder_type(const TeleEntry& e, const TermPtr& rebasedDomain,
                         const TermPtr& carrierAtEntry) {
  if (!e.recursive) return rebasedDomain;
  if (!e.type) return carrierAtEntry;
  return pi(rebasedDomain, shift(carrierAtEntry, 0, 1));
}

// ---- parameter block ---------------------------------------------------------

std::vector<TermPtr> param_refs(const Schema& s, int depth) {
  int n = static_cast<int>(s.params.size());
  std::vector<TermPtr> out;
  out.reserve(n);
  for (int i = 0; i < n; i++) {
    int base = depth + (n - 1 - i);
    const ParamEntry& p = s.params[i];
    int k = p.is_type ? static_cast<int>(p.ext.size()) : 0;
    if (k == 0) {
      out.push_back(var(base));
      continue;
    }
    std::vector<TermPtr> spine;
    for (int a = k - 1; a >= 0; a--) spine.push_back(var(a));
    TermPtr body = app_spine(var(base + k), spine);
    for (int a = 0; a < k; a++) body = lam(body);
    out.push_back(body);
  }
  return out;
}

TermPtr param_pi_closure(const ParamEntry& e) {
  TermPtr t = e.type;
  for (int j = static_cast<int>(e.ext.size()) - 1; j >= 0; j--)
    t = pi(e.ext[j], t);
  return t;
}

TypingContext param_context(const Schema& s) {
  TypingContext ctx;
  for (const ParamEntry& p : s.params) {
    if (p.is_type)
      ctx = ctx.extended_type_var(p.ext);
    else
      ctx = ctx.extended(param_pi_closure(p));
  }
  return ctx;
}

// ---- path pairing ------------------------------------------------------------

TermPtr pair_path(const TermPtr& A, const TermPtr& l, const TermPtr& r,
                  const TermPtr& c00, const TermPtr& c01, const TermPtr& c10,
                  const TermPtr& c11) {
  auto sh = [](const TermPtr& t, int n) { return shift(t, 0, n); };
  TermPtr P = sigma(A, sh(A, 1));
  // slide the first coordinate along l, the second pinned at c10
  TermPtr m1 =
      id(sh(P, 3), pair(var(2), sh(c10, 3)), pair(var(1), sh(c10, 3)));
  TermPtr b1 = refl(pair(var(0), sh(c10, 1)));
  TermPtr j1 = j(m1, b1, c00, c01, l);
  // then the second coordinate along r, the first pinned at c01
  TermPtr m2 =
      id(sh(P, 3), pair(sh(c01, 3), var(2)), pair(sh(c01, 3), var(1)));
  TermPtr b2 = refl(pair(sh(c01, 1), var(0)));
  TermPtr j2 = j(m2, b2, c10, c11, r);
  // concatenate by transporting the first leg along the second
  TermPtr w = pair(c00, c10);
  TermPtr mc =
      pi(id(sh(P, 3), sh(w, 3), var(2)), id(sh(P, 4), sh(w, 4), var(2)));
  TermPtr cat = j(mc, lam(var(0)), pair(c01, c10), pair(c01, c11), j2);
  return app(cat, j1);
}

// ---- eliminator data ---------------------------------------------------------

ElimData shift_elim(const ElimData& d, int amount) {
  ElimData out;
  out.schema = d.schema;
  out.pargs.reserve(d.pargs.size());
  for (const TermPtr& p : d.pargs) out.pargs.push_back(shift(p, 0, amount));
  out.motive = d.motive ? shift(d.motive, 1, amount) : nullptr;
  out.methods.reserve(d.methods.size());
  for (const BoundTerm& m : d.methods)
    out.methods.push_back(
        m.body ? BoundTerm{shift(m.body, m.binders, amount), m.binders} : m);
  return out;
}

TermPtr carrier_type(const ElimData& d) {
  return schema_type(d.schema->name, d.pargs);
}

TermPtr elim_call(const ElimData& d, const TermPtr& scrut) {
  return schema_elim(d.schema->name, d.pargs, d.motive, d.methods, scrut);
}

// keeps generated terms beta-normal when a boundary applies a literal lambda
static TermPtr apply_folded(const TermPtr& f, const TermPtr& a) {
  if (f->tag == Tag::Lam) return instantiate(f->kids[0], {a});
  return app(f, a);
}

TermPtr method_value(const ElimData& d, int cell,
                     const std::vector<TermPtr>& args) {
  const CellSpec& c = d.schema->cells[cell];
  const BoundTerm& mb = d.methods[cell];
  if (!mb.body)
    fail(ErrKind::SchemaError,
         "no method available for cell '" + c.name + "'");
  if (args.size() != c.tele.size())
    fail(ErrKind::ArityMismatch,
         "cell '" + c.name + "' applied to a wrong argument count");
  std::vector<TermPtr> vals = args;
  for (size_t i = 0; i < c.tele.size(); i++) {
    const TeleEntry& e = c.tele[i];
    if (!e.recursive) continue;
    if (!e.type) {
      vals.push_back(elim_call(d, args[i]));
    } else {
      ElimData d1 = shift_elim(d, 1);
      vals.push_back(
          lam(elim_call(d1, apply_folded(shift(args[i], 0, 1), var(0)))));
    }
  }
  if (static_cast<int>(vals.size()) != mb.binders)
    fail(ErrKind::ArityMismatch,
         "method for cell '" + c.name + "' has a wrong binder count");
  return instantiate(mb.body, vals);
}

// ---- boundary lifting --------------------------------------------------------

namespace {

// interprets carrier-valued boundary terms inside the method telescope of a
// cell: recursive binders map to their induction hypotheses, constructor
// heads to instantiated methods of earlier cells
struct Lifter {
  const Schema& s;
  const ElimData& dL;  // shifted to the full binder depth already
  int q = 0;           // telescope binders
  int L = 0;           // telescope + induction hypotheses
  std::vector<int> ihPos;  // telescope position -> hypothesis position

  int binder_pos(int v, int dd) const {
    if (v < dd) return -1;
    int rel = v - dd;
    if (rel >= L) return -1;
    return L - 1 - rel;
  }

  TermPtr ih_var(int pos, int dd) const {
    return var((L - 1 - ihPos[pos]) + dd);
  }

  TermPtr point(const TermPtr& t, int dd) const {
    switch (t->tag) {
      case Tag::Var: {
        int pos = binder_pos(t->index, dd);
        if (pos >= 0 && pos < q && s_tele(pos).recursive && !s_tele(pos).type)
          return ih_var(pos, dd);
        break;
      }
      case Tag::App: {
        const TermPtr& h = t->kids[0];
        if (h->tag == Tag::Var) {
          int pos = binder_pos(h->index, dd);
          if (pos >= 0 && pos < q && s_tele(pos).recursive &&
              s_tele(pos).type)
            return app(ih_var(pos, dd), t->kids[1]);
        }
        break;
      }
      case Tag::SchemaCtor:
        if (t->head == s.name) return ctor_value(t, dd);
        break;
      default: break;
    }
    fail(ErrKind::SchemaError,
         "boundary shape too complex to lift: " + raw_string(t));
  }

  TermPtr path(const TermPtr& t, int dd) const {
    if (t->tag == Tag::Refl) return refl_over(point(t->kids[0], dd));
    if (t->tag == Tag::SchemaCtor && t->head == s.name)
      return ctor_value(t, dd);
    fail(ErrKind::SchemaError,
         "boundary path too complex to lift: " + raw_string(t));
  }

  TermPtr ctor_value(const TermPtr& t, int dd) const {
    int idx = t->index;
    const CellSpec& c = s.cells[idx];
    const BoundTerm& mb = dL.methods[idx];
    if (!mb.body)
      fail(ErrKind::SchemaError,
           "cell '" + c.name + "' referenced before its method exists");
    std::vector<TermPtr> vals = ctor_args(t);
    if (vals.size() != c.tele.size())
      fail(ErrKind::ArityMismatch, "constructor argument count mismatch");
    std::vector<TermPtr> args = vals;
    for (size_t i = 0; i < c.tele.size(); i++) {
      const TeleEntry& e = c.tele[i];
      if (!e.recursive) continue;
      const TermPtr& a = args[i];
      if (!e.type) {
        vals.push_back(point(a, dd));
      } else if (a->tag == Tag::Lam) {
        vals.push_back(lam(point(a->kids[0], dd + 1)));
      } else if (a->tag == Tag::Var) {
        int pos = binder_pos(a->index, dd);
        if (pos < 0 || pos >= q || !s_tele(pos).recursive ||
            !s_tele(pos).type)
          fail(ErrKind::SchemaError,
               "recursive function argument too complex to lift");
        vals.push_back(ih_var(pos, dd));
      } else {
        fail(ErrKind::SchemaError,
             "recursive argument too complex to lift: " + raw_string(a));
      }
    }
    if (static_cast<int>(vals.size()) != mb.binders)
      fail(ErrKind::ArityMismatch, "method binder count mismatch");
    return instantiate(shift(mb.body, mb.binders, dd), vals);
  }

  const TeleEntry& s_tele(int pos) const { return cell->tele[pos]; }

  const CellSpec* cell = nullptr;
};

Lifter make_lifter(const ElimData& dL, const CellSpec& c) {
  Lifter lf{*dL.schema, dL};
  lf.cell = &c;
  lf.q = static_cast<int>(c.tele.size());
  lf.ihPos.assign(lf.q, -1);
  int r = 0;
  for (int i = 0; i < lf.q; i++)
    if (c.tele[i].recursive) lf.ihPos[i] = lf.q + r++;
  lf.L = lf.q + r;
  return lf;
}

// endpoints of a path-shaped boundary term, read off syntactically
std::pair<TermPtr, TermPtr> side_endpoints(const Schema& s, const TermPtr& p) {
  if (p->tag == Tag::Refl) return {p->kids[0], p->kids[0]};
  if (p->tag == Tag::SchemaCtor && p->head == s.name) {
    const CellSpec& c = s.cells[p->index];
    if (c.dim == CellDim::Path) {
      std::vector<TermPtr> pargs = schema_params(p);
      TermPtr carrier = schema_type(s.name, pargs);
      int inner = static_cast<int>(c.tele.size());
      std::vector<TermPtr> args = ctor_args(p);
      return {instantiate(rebase_cell_term(s, c.src, inner, carrier, pargs),
                          args),
              instantiate(rebase_cell_term(s, c.tgt, inner, carrier, pargs),
                          args)};
    }
  }
  fail(ErrKind::SchemaError,
       "cannot read the endpoints of boundary path " + raw_string(p));
}

}  // namespace

MethodParts elim_method_parts(const ElimData& d, int cell) {
  const Schema& s = *d.schema;
  const CellSpec& c = s.cells[cell];
  int q = static_cast<int>(c.tele.size());
  int R = c.rec_count();
  int L = q + R;
  MethodParts out;
  out.binders.reserve(L);

  // rebase_cell_term wants the carrier and parameter values from below the
  // inner binders; when the opened term must sit deeper, shift its ambient
  // part up before pointing the inner variables at the binders
  TermPtr carrier0 = carrier_type(d);
  for (int i = 0; i < q; i++) {
    const TeleEntry& e = c.tele[i];
    TermPtr dom =
        e.type ? rebase_cell_term(s, e.type, i, carrier0, d.pargs) : nullptr;
    out.binders.push_back(tele_binder_type(e, dom, shift(carrier0, 0, i)));
  }

  int r = 0;
  for (int i = 0; i < q; i++) {
    const TeleEntry& e = c.tele[i];
    if (!e.recursive) continue;
    int depth = q + r;
    ElimData dd = shift_elim(d, depth);
    int gi = depth - 1 - i;  // the binder this hypothesis is about
    if (!e.type) {
      out.binders.push_back(instantiate(dd.motive, {var(gi)}));
    } else {
      std::vector<TermPtr> innerVals;
      for (int k = 0; k < i; k++) innerVals.push_back(var(depth - 1 - k));
      TermPtr dom = instantiate(
          shift(rebase_cell_term(s, e.type, i, carrier0, d.pargs), i, depth),
          innerVals);
      ElimData d1 = shift_elim(d, depth + 1);
      TermPtr body = instantiate(d1.motive, {app(var(gi + 1), var(0))});
      out.binders.push_back(pi(dom, body));
    }
    r++;
  }

  ElimData dL = shift_elim(d, L);
  std::vector<TermPtr> teleVars;
  for (int i = 0; i < q; i++) teleVars.push_back(var(L - 1 - i));
  TermPtr ctorTerm = schema_ctor(s.name, dL.pargs, cell, teleVars);
  auto openB = [&](const TermPtr& b) {
    return instantiate(
        shift(rebase_cell_term(s, b, q, carrier0, d.pargs), q, L), teleVars);
  };

  switch (c.dim) {
    case CellDim::Point:
      out.body_type = instantiate(dL.motive, {ctorTerm});
      break;
    case CellDim::Path: {
      Lifter lf = make_lifter(dL, c);
      out.body_type = id_over(dL.motive, ctorTerm, lf.point(openB(c.src), 0),
                              lf.point(openB(c.tgt), 0));
      break;
    }
    case CellDim::Globe2: {
      Lifter lf = make_lifter(dL, c);
      TermPtr lR = openB(c.lhs), rR = openB(c.rhs);
      auto ends = side_endpoints(s, lR);
      TermPtr liftA = lf.point(ends.first, 0);
      TermPtr liftB = lf.point(ends.second, 0);
      TermPtr fam = id_over(shift(dL.motive, 1, 1), var(0),
                            shift(liftA, 0, 1), shift(liftB, 0, 1));
      out.body_type =
          id_over(fam, ctorTerm, lf.path(lR, 0), lf.path(rR, 0));
      break;
    }
    case CellDim::SquareBoundary:
      out.body_type = unit();
      break;
  }
  return out;
}

TermPtr lift_boundary(const ElimData& d, const TermPtr& t) {
  if (t->tag == Tag::SchemaCtor && t->head == d.schema->name &&
      t->index >= 0 && t->index < static_cast<int>(d.schema->cells.size()) &&
      d.schema->cells[t->index].dim == CellDim::Point)
    return method_value(d, t->index, ctor_args(t));
  return elim_call(d, t);
}

// ---- validation --------------------------------------------------------------

namespace {

void scan_banned(const TermPtr& t, const std::string& cellName, int ordinal) {
  switch (t->tag) {
    case Tag::J:
    case Tag::JOver:
    case Tag::Ap:
    case Tag::NatElim:
    case Tag::SumElim:
    case Tag::SchemaElim:
    case Tag::SchemaPathComp:
      fail(ErrKind::FibrantStructureError,
           "constructor (" + std::to_string(ordinal) + ") '" + cellName +
               "' uses an eliminator; cell declarations must be built from "
               "constructors and variables only");
    case Tag::FinSetLit:
    case Tag::FinMapLit:
    case Tag::ElemLit:
      fail(ErrKind::SchemaError,
           "cell '" + cellName + "' contains an evaluation literal");
    default: break;
  }
  for (const TermPtr& k : t->kids) scan_banned(k, cellName, ordinal);
}

// any syntactic reference to the schema itself (nested occurrences are what
// the positivity check is after; a plain Var is checked separately)
bool contains_self_ref(const TermPtr& t, const std::string& name) {
  if ((t->tag == Tag::SchemaCtor || t->tag == Tag::SchemaType ||
       t->tag == Tag::SchemaElim || t->tag == Tag::SchemaPathComp) &&
      t->head == name)
    return true;
  for (const TermPtr& k : t->kids)
    if (contains_self_ref(k, name)) return true;
  return false;
}

void check_earlier_refs(const Schema& s, const TermPtr& t, int cell) {
  if (t->tag == Tag::SchemaCtor && t->head == s.name) {
    if (t->nparams != 0)
      fail(ErrKind::SchemaError,
           "cell '" + s.cells[cell].name +
               "' instantiates the schema's own parameters");
    if (t->index < 0 || t->index >= static_cast<int>(s.cells.size()))
      fail(ErrKind::UnboundSchema, "constructor index out of range");
    if (t->index >= cell)
      fail(ErrKind::SchemaError,
           "cell '" + s.cells[cell].name + "' refers to cell '" +
               s.cells[t->index].name + "' which is not declared before it");
  }
  for (const TermPtr& k : t->kids) check_earlier_refs(s, k, cell);
}

// globe and square sides must be reflexivities or applications of earlier
// path constructors; anything else defeats the method-type construction
void check_side_shape(const Schema& s, const TermPtr& t,
                      const std::string& cellName) {
  if (t->tag == Tag::Refl) return;
  if (t->tag == Tag::SchemaCtor && t->head == s.name && t->index >= 0 &&
      t->index < static_cast<int>(s.cells.size()) &&
      s.cells[t->index].dim == CellDim::Path)
    return;
  fail(ErrKind::BoundaryMismatch,
       "side of cell '" + cellName +
           "' must be a reflexivity or an application of an earlier path "
           "constructor");
}

std::vector<const TermPtr*> cell_terms(const CellSpec& c) {
  std::vector<const TermPtr*> out;
  for (const TeleEntry& e : c.tele)
    if (e.type) out.push_back(&e.type);
  switch (c.dim) {
    case CellDim::Point: break;
    case CellDim::Path:
      out.push_back(&c.src);
      out.push_back(&c.tgt);
      break;
    case CellDim::Globe2:
      out.push_back(&c.lhs);
      out.push_back(&c.rhs);
      break;
    case CellDim::SquareBoundary:
      out.push_back(&c.bottom);
      out.push_back(&c.right);
      out.push_back(&c.top);
      out.push_back(&c.left);
      break;
  }
  return out;
}

}  // namespace

void validate_param_scheme(const Registry& reg, const Schema& s) {
  if (s.name.empty()) fail(ErrKind::SchemaError, "schema without a name");
  std::set<std::string> seen;
  Checker ck;
  ck.reg = &reg;
  TypingContext ctx;
  for (const ParamEntry& p : s.params) {
    if (p.name.empty() || !seen.insert(p.name).second)
      fail(ErrKind::SchemaError,
           "schema '" + s.name + "' has a duplicate or unnamed parameter");
    TypingContext c2 = ctx;
    for (const TermPtr& e : p.ext) {
      ck.check_type(c2, e);
      c2 = c2.extended(e);
    }
    if (p.is_type) {
      if (p.type)
        fail(ErrKind::SchemaError,
             "type parameter '" + p.name + "' carries a type annotation");
      ctx = ctx.extended_type_var(p.ext);
    } else {
      if (!p.type)
        fail(ErrKind::SchemaError,
             "term parameter '" + p.name + "' lacks a type");
      ck.check_type(c2, p.type);
      ctx = ctx.extended(param_pi_closure(p));
    }
  }
}

void validate_cells(const Registry& reg, const Schema& s) {
  // any eliminator anywhere in a declaration disqualifies the schema before
  // more precise diagnostics run
  for (size_t j = 0; j < s.cells.size(); j++)
    for (const TermPtr* t : cell_terms(s.cells[j]))
      scan_banned(*t, s.cells[j].name, static_cast<int>(j) + 1);

  std::set<std::string> names;
  Checker ck;
  ck.reg = &reg;
  ck.frame = Checker::Frame{&s, static_cast<int>(s.params.size())};
  TypingContext base = param_context(s).extended_type_var({});

  for (size_t j = 0; j < s.cells.size(); j++) {
    const CellSpec& c = s.cells[j];
    if (c.name.empty() || !names.insert(c.name).second)
      fail(ErrKind::SchemaError,
           "schema '" + s.name + "' has a duplicate or unnamed cell");
    for (const TermPtr* t : cell_terms(c))
      check_earlier_refs(s, *t, static_cast<int>(j));

    TypingContext ctx = base;
    std::set<std::string> argNames;
    for (size_t i = 0; i < c.tele.size(); i++) {
      const TeleEntry& e = c.tele[i];
      if (e.name.empty() || !argNames.insert(e.name).second)
        fail(ErrKind::SchemaError,
             "cell '" + c.name + "' has a duplicate or unnamed argument");
      if (!e.recursive) {
        if (!e.type)
          fail(ErrKind::SchemaError,
               "argument '" + e.name + "' of cell '" + c.name +
                   "' lacks a type");
        if (occurs_free(e.type, static_cast<int>(i)) ||
            contains_self_ref(e.type, s.name))
          fail(ErrKind::PositivityError,
               "argument '" + e.name + "' of cell '" + c.name +
                   "' mentions the carrier outside a recursive position");
        ck.check_type(ctx, e.type);
        ctx = ctx.extended(e.type);
      } else if (!e.type) {
        ctx = ctx.extended(var(static_cast<int>(i)));
      } else {
        if (occurs_free(e.type, static_cast<int>(i)) ||
            contains_self_ref(e.type, s.name))
          fail(ErrKind::PositivityError,
               "recursive argument '" + e.name + "' of cell '" + c.name +
                   "' mentions the carrier in its domain");
        ck.check_type(ctx, e.type);
        ctx = ctx.extended(pi(e.type, var(static_cast<int>(i) + 1)));
      }
    }

    int k = static_cast<int>(c.tele.size());
    TermPtr X = var(k);
    switch (c.dim) {
      case CellDim::Point: break;
      case CellDim::Path:
        ck.check(ctx, c.src, X);
        ck.check(ctx, c.tgt, X);
        break;
      case CellDim::Globe2: {
        check_side_shape(s, c.lhs, c.name);
        check_side_shape(s, c.rhs, c.name);
        TermPtr tl = ck.whnf(ck.infer(ctx, c.lhs));
        TermPtr tr = ck.whnf(ck.infer(ctx, c.rhs));
        if (tl->tag != Tag::Id || tr->tag != Tag::Id)
          fail(ErrKind::BoundaryMismatch,
               "sides of cell '" + c.name + "' are not paths");
        if (!ck.def_equal(tl->kids[0], X))
          fail(ErrKind::BoundaryMismatch,
               "sides of cell '" + c.name + "' are not paths in the carrier");
        if (!ck.def_equal(tl, tr))
          fail(ErrKind::BoundaryMismatch,
               "sides of cell '" + c.name + "' are not parallel");
        break;
      }
      case CellDim::SquareBoundary: {
        for (const TermPtr* t : {&c.bottom, &c.right, &c.top, &c.left})
          check_side_shape(s, *t, c.name);
        TermPtr tb = ck.whnf(ck.infer(ctx, c.bottom));
        TermPtr trr = ck.whnf(ck.infer(ctx, c.right));
        TermPtr tt = ck.whnf(ck.infer(ctx, c.top));
        TermPtr tlf = ck.whnf(ck.infer(ctx, c.left));
        for (const TermPtr& t : {tb, trr, tt, tlf}) {
          if (t->tag != Tag::Id || !ck.def_equal(t->kids[0], X))
            fail(ErrKind::BoundaryMismatch,
                 "sides of cell '" + c.name +
                     "' are not paths in the carrier");
        }
        bool corners = ck.def_equal(tb->kids[1], tlf->kids[1]) &&
                       ck.def_equal(tb->kids[2], trr->kids[1]) &&
                       ck.def_equal(tlf->kids[2], tt->kids[1]) &&
                       ck.def_equal(trr->kids[2], tt->kids[2]);
        if (!corners)
          fail(ErrKind::BoundaryMismatch,
               "corners of cell '" + c.name + "' do not close up");
        break;
      }
    }
  }
}

// ---- rule generation ---------------------------------------------------------

namespace {

// eliminator pieces referencing the canonical context: the motive entry sits
// directly above the parameter block, then one method entry per cell;
// depthAbove counts every entry above the parameters
ElimData eta_elim_data(const Schema& s, int depthAbove, int methodsAvail) {
  ElimData d;
  d.schema = &s;
  d.pargs = param_refs(s, depthAbove);
  d.motive = app(var(depthAbove), var(0));  // depthAbove-1 shifted under a binder
  for (size_t k = 0; k < s.cells.size(); k++) {
    if (static_cast<int>(k) >= methodsAvail) {
      d.methods.push_back({nullptr, 0});
      continue;
    }
    const CellSpec& c = s.cells[k];
    int b = static_cast<int>(c.tele.size()) + c.rec_count();
    int mIdx = depthAbove - 2 - static_cast<int>(k);
    std::vector<TermPtr> spine;
    for (int v = b - 1; v >= 0; v--) spine.push_back(var(v));
    d.methods.push_back({app_spine(var(mIdx + b), spine), b});
  }
  return d;
}

TermPtr pi_close(const MethodParts& p) {
  TermPtr t = p.body_type;
  for (auto it = p.binders.rbegin(); it != p.binders.rend(); ++it)
    t = pi(*it, t);
  return t;
}

}  // namespace

RuleSet generate_rules(const Registry& reg, const Schema& s) {
  RuleSet rs;
  rs.schema = s.name;
  int M = static_cast<int>(s.cells.size());
  Checker ck;
  ck.reg = &reg;

  TypingContext gp = param_context(s);
  rs.formation = {gp, schema_type(s.name, param_refs(s, 0)), nullptr};

  for (int jx = 0; jx < M; jx++) {
    const CellSpec& c = s.cells[jx];
    TypingContext ctx = gp;
    std::vector<TermPtr> refs0 = param_refs(s, 0);
    TermPtr carrier0 = schema_type(s.name, refs0);
    for (size_t i = 0; i < c.tele.size(); i++) {
      const TeleEntry& e = c.tele[i];
      TermPtr dom =
          e.type ? rebase_cell_term(s, e.type, static_cast<int>(i), carrier0,
                                    refs0)
                 : nullptr;
      ctx = ctx.extended(tele_binder_type(
          e, dom, shift(carrier0, 0, static_cast<int>(i))));
    }
    int k = static_cast<int>(c.tele.size());
    std::vector<TermPtr> bvars;
    for (int i = 0; i < k; i++) bvars.push_back(var(k - 1 - i));
    TermPtr subject = schema_ctor(s.name, param_refs(s, k), jx, bvars);
    rs.intros.push_back({ctx, subject, ck.infer(ctx, subject)});
  }

  // the eliminator context: motive family, one method per cell, the scrutinee
  TypingContext ectx =
      gp.extended_type_var({schema_type(s.name, param_refs(s, 0))});
  std::vector<TermPtr> methodTypes;
  for (int jx = 0; jx < M; jx++) {
    ElimData dj = eta_elim_data(s, 1 + jx, jx);
    TermPtr T = pi_close(elim_method_parts(dj, jx));
    methodTypes.push_back(T);
    ectx = ectx.extended(T);
  }
  TypingContext mctx = ectx;  // reused for beta and path computation
  ectx = ectx.extended(schema_type(s.name, param_refs(s, 1 + M)));
  {
    ElimData d = eta_elim_data(s, M + 2, M);
    TermPtr subject = elim_call(d, var(0));
    rs.elim = {ectx, subject, ck.infer(ectx, subject)};
  }

  for (int jx = 0; jx < M; jx++) {
    const CellSpec& c = s.cells[jx];
    if (c.dim == CellDim::Globe2 || c.dim == CellDim::SquareBoundary)
      continue;
    TypingContext ctx = mctx;
    std::vector<TermPtr> refsM = param_refs(s, 1 + M);
    TermPtr carrierM = schema_type(s.name, refsM);
    for (size_t i = 0; i < c.tele.size(); i++) {
      const TeleEntry& e = c.tele[i];
      TermPtr dom =
          e.type ? rebase_cell_term(s, e.type, static_cast<int>(i), carrierM,
                                    refsM)
                 : nullptr;
      ctx = ctx.extended(tele_binder_type(
          e, dom, shift(carrierM, 0, static_cast<int>(i))));
    }
    int k = static_cast<int>(c.tele.size());
    ElimData d = eta_elim_data(s, 1 + M + k, M);
    std::vector<TermPtr> bvars;
    for (int i = 0; i < k; i++) bvars.push_back(var(k - 1 - i));
    if (c.dim == CellDim::Point) {
      TermPtr ctorTerm = schema_ctor(s.name, d.pargs, jx, bvars);
      rs.beta.push_back(
          {ctx, elim_call(d, ctorTerm), method_value(d, jx, bvars)});
    } else {
      TermPtr subject =
          schema_path_comp(s.name, d.pargs, jx, d.motive, d.methods, bvars);
      rs.path_comp.push_back({ctx, subject, ck.infer(ctx, subject)});
    }
  }
  return rs;
}

void register_schema(Registry& reg, const Schema& s) {
  if (reg.find(s.name))
    fail(ErrKind::SchemaError, "schema '" + s.name + "' is already defined");
  validate_param_scheme(reg, s);
  validate_cells(reg, s);
  reg.schemas.emplace(s.name, s);
  try {
    reg.rules.emplace(s.name, generate_rules(reg, s));
  } catch (...) {
    reg.schemas.erase(s.name);
    throw;
  }
}

}  // namespace hitt
