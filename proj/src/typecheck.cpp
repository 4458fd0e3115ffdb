#include "hitt/typecheck.hpp"

#include <algorithm>

namespace hitt {

namespace {

TermPtr with_kid(const TermPtr& t, size_t i, TermPtr kid) {
  auto u = std::make_shared<Term>(*t);
  u->kids[i] = std::move(kid);
  return u;
}

std::string show(const TermPtr& t) { return raw_string(t); }

}  // namespace

const Schema& Checker::lookup(const std::string& name) const {
  if (frame && frame->schema->name == name) return *frame->schema;
  if (reg) {
    if (const Schema* s = reg->find(name)) return *s;
  }
  fail(ErrKind::UnboundSchema, "schema '" + name + "' is not registered");
}

int Checker::carrier_index(const TypingContext& ctx) const {
  return ctx.size() - 1 - frame->base;
}

// ---- reduction -------------------------------------------------------------

std::optional<TermPtr> Checker::contract(const TermPtr& t) const {
  switch (t->tag) {
    case Tag::App:
      if (t->kids[0]->tag == Tag::Lam)
        return instantiate(t->kids[0]->kids[0], {t->kids[1]});
      return std::nullopt;
    case Tag::Proj1:
      if (t->kids[0]->tag == Tag::Pair) return t->kids[0]->kids[0];
      return std::nullopt;
    case Tag::Proj2:
      if (t->kids[0]->tag == Tag::Pair) return t->kids[0]->kids[1];
      return std::nullopt;
    case Tag::SumElim: {
      const TermPtr& s = t->kids[3];
      if (s->tag == Tag::Inl) return instantiate(t->kids[1], {s->kids[0]});
      if (s->tag == Tag::Inr) return instantiate(t->kids[2], {s->kids[0]});
      return std::nullopt;
    }
    case Tag::J: {
      const TermPtr& p = t->kids[4];
      if (p->tag == Tag::Refl) return instantiate(t->kids[1], {p->kids[0]});
      return std::nullopt;
    }
    case Tag::JOver: {
      const TermPtr& p = t->kids[4];
      const TermPtr& q = t->kids[7];
      if (p->tag == Tag::Refl && q->tag == Tag::ReflOver)
        return instantiate(t->kids[1], {p->kids[0], q->kids[0]});
      return std::nullopt;
    }
    case Tag::Ap: {
      const TermPtr& p = t->kids[3];
      if (p->tag == Tag::Refl)
        return refl_over(instantiate(t->kids[0], {p->kids[0]}));
      return std::nullopt;
    }
    case Tag::NatElim: {
      const TermPtr& n = t->kids[3];
      if (n->tag == Tag::Zero) return t->kids[1];
      if (n->tag == Tag::Succ) {
        TermPtr pred = n->kids[0];
        TermPtr rec = nat_elim(t->kids[0], t->kids[1], t->kids[2], pred);
        return instantiate(t->kids[2], {pred, rec});
      }
      return std::nullopt;
    }
    case Tag::SchemaElim: {
      const TermPtr& s = t->kids.back();
      if (s->tag != Tag::SchemaCtor || s->head != t->head) return std::nullopt;
      if (!reg) return std::nullopt;
      const Schema* sch = reg->find(t->head);
      if (!sch || s->index < 0 || s->index >= (int)sch->cells.size())
        return std::nullopt;
      if (sch->cells[s->index].dim != CellDim::Point) return std::nullopt;
      ElimData d{sch, schema_params(t), elim_motive(t), elim_methods(t)};
      return method_value(d, s->index, ctor_args(s));
    }
    default:
      return std::nullopt;
  }
}

std::optional<TermPtr> Checker::reduce_step(const TermPtr& t) const {
  if (auto r = contract(t)) return r;
  for (size_t i = 0; i < t->kids.size(); i++) {
    if (auto r = reduce_step(t->kids[i])) return with_kid(t, i, *r);
  }
  for (size_t i = 0; i < t->table.size(); i++) {
    if (auto r = reduce_step(t->table[i].second)) {
      auto u = std::make_shared<Term>(*t);
      u->table[i].second = *r;
      return TermPtr(u);
    }
  }
  return std::nullopt;
}

TermPtr Checker::whnf_fueled(TermPtr t, int& steps) const {
  for (;;) {
    if (auto r = contract(t)) {
      if (--steps < 0)
        fail(ErrKind::FuelExhausted, "normalization ran out of fuel");
      t = *r;
      continue;
    }
    // drive the kids whose head shape gates a redex, then retry
    int focuses[2] = {-1, -1};
    switch (t->tag) {
      case Tag::App:
      case Tag::Proj1:
      case Tag::Proj2: focuses[0] = 0; break;
      case Tag::SumElim:
      case Tag::NatElim:
      case Tag::Ap: focuses[0] = 3; break;
      case Tag::J: focuses[0] = 4; break;
      case Tag::JOver:
        focuses[0] = 4;
        focuses[1] = 7;
        break;
      case Tag::SchemaElim:
        focuses[0] = static_cast<int>(t->kids.size()) - 1;
        break;
      default: return t;
    }
    bool changed = false;
    for (int f : focuses) {
      if (f < 0) continue;
      TermPtr w = whnf_fueled(t->kids[f], steps);
      if (w != t->kids[f]) {
        t = with_kid(t, f, w);
        changed = true;
      }
    }
    if (!changed) return t;
  }
}

TermPtr Checker::whnf(const TermPtr& t) const {
  int steps = fuel;
  return whnf_fueled(t, steps);
}

TermPtr Checker::normalize(const TermPtr& t) const {
  TermPtr cur = t;
  for (int steps = fuel;; steps--) {
    auto r = reduce_step(cur);
    if (!r) return cur;
    if (steps <= 0)
      fail(ErrKind::FuelExhausted, "normalization ran out of fuel");
    cur = *r;
  }
}

bool Checker::def_equal(const TermPtr& a, const TermPtr& b) const {
  if (alpha_equal(a, b)) return true;
  return alpha_equal(normalize(a), normalize(b));
}

// ---- types ----------------------------------------------------------------

void Checker::check_type(const TypingContext& ctx, const TermPtr& t) const {
  switch (t->tag) {
    case Tag::Unit:
    case Tag::Nat: return;
    case Tag::Var: {
      const CtxEntry& e = ctx.entry_for(t->index);
      if (e.is_type && e.telescope.empty()) return;
      if (e.is_type)
        fail(ErrKind::ArityMismatch,
             "type family used without its " +
                 std::to_string(e.telescope.size()) + " arguments");
      fail(ErrKind::NotAType, "term variable used as a type");
    }
    case Tag::App: {
      // a family applied through a spine
      std::vector<TermPtr> spine;
      TermPtr h = t;
      while (h->tag == Tag::App) {
        spine.push_back(h->kids[1]);
        h = h->kids[0];
      }
      std::reverse(spine.begin(), spine.end());
      if (h->tag == Tag::Var) {
        const CtxEntry& e = ctx.entry_for(h->index);
        if (e.is_type) {
          if (e.telescope.size() != spine.size())
            fail(ErrKind::ArityMismatch, "type family applied to " +
                                             std::to_string(spine.size()) +
                                             " of " +
                                             std::to_string(e.telescope.size()) +
                                             " arguments");
          std::vector<TermPtr> sofar;
          for (size_t j = 0; j < spine.size(); j++) {
            TermPtr expected = instantiate(
                shift(e.telescope[j], static_cast<int>(j), h->index + 1),
                sofar);
            check(ctx, spine[j], expected);
            sofar.push_back(spine[j]);
          }
          return;
        }
      }
      fail(ErrKind::NotAType, "application is not a type: " + show(t));
    }
    case Tag::Pi:
    case Tag::Sigma:
      check_type(ctx, t->kids[0]);
      check_type(ctx.extended(t->kids[0]), t->kids[1]);
      return;
    case Tag::Sum:
      check_type(ctx, t->kids[0]);
      check_type(ctx, t->kids[1]);
      return;
    case Tag::Id:
      check_type(ctx, t->kids[0]);
      check(ctx, t->kids[1], t->kids[0]);
      check(ctx, t->kids[2], t->kids[0]);
      return;
    case Tag::IdOver: {
      TermPtr tp = whnf(infer(ctx, t->kids[1]));
      if (tp->tag != Tag::Id)
        fail(ErrKind::Mismatch,
             "base of a dependent identity must be an identity, got " +
                 show(tp));
      const TermPtr& A = tp->kids[0];
      check_type(ctx.extended(A), t->kids[0]);
      check(ctx, t->kids[2], instantiate(t->kids[0], {tp->kids[1]}));
      check(ctx, t->kids[3], instantiate(t->kids[0], {tp->kids[2]}));
      return;
    }
    case Tag::SchemaType: {
      const Schema& s = lookup(t->head);
      check_param_args(ctx, s, schema_params(t));
      return;
    }
    default:
      fail(ErrKind::NotAType, "not a type: " + show(t));
  }
}

void Checker::check_param_args(const TypingContext& ctx, const Schema& s,
                               const std::vector<TermPtr>& args) const {
  if (args.size() != s.params.size())
    fail(ErrKind::ArityMismatch,
         "schema '" + s.name + "' takes " + std::to_string(s.params.size()) +
             " parameters, got " + std::to_string(args.size()));
  std::vector<TermPtr> prior;
  for (size_t i = 0; i < args.size(); i++) {
    const ParamEntry& p = s.params[i];
    if (p.is_type) {
      int k = static_cast<int>(p.ext.size());
      if (k == 0) {
        check_type(ctx, args[i]);
      } else {
        // family instantiations are literal lambdas over the extension
        TermPtr body = args[i];
        TypingContext c2 = ctx;
        for (int jx = 0; jx < k; jx++) {
          if (body->tag != Tag::Lam)
            fail(ErrKind::ArityMismatch,
                 "parameter '" + p.name + "' expects a family of " +
                     std::to_string(k) + " arguments");
          c2 = c2.extended(open_with(p.ext[jx], jx, prior));
          body = body->kids[0];
        }
        check_type(c2, body);
      }
    } else {
      check(ctx, args[i], open_with(param_pi_closure(p), 0, prior));
    }
    prior.push_back(args[i]);
  }
}

// ---- constructors ----------------------------------------------------------

TermPtr Checker::infer_ctor(const TypingContext& ctx, const TermPtr& t) const {
  bool abstract = frame && t->nparams == 0 && frame->schema->name == t->head;
  const Schema& s = abstract ? *frame->schema : lookup(t->head);
  if (t->index < 0 || t->index >= static_cast<int>(s.cells.size()))
    fail(ErrKind::UnboundSchema,
         "schema '" + s.name + "' has no cell #" + std::to_string(t->index));
  const CellSpec& c = s.cells[t->index];
  std::vector<TermPtr> pargs = schema_params(t);
  std::vector<TermPtr> args = ctor_args(t);
  if (args.size() != c.tele.size())
    fail(ErrKind::ArityMismatch,
         "constructor '" + c.name + "' takes " +
             std::to_string(c.tele.size()) + " arguments, got " +
             std::to_string(args.size()));

  TermPtr carrier;  // expressed at the ambient context
  int extra = 0;    // abstract mode: entries above [params, X]
  if (abstract) {
    if (!pargs.empty())
      fail(ErrKind::SchemaError, "constructor of the schema under validation "
                                 "cannot take explicit parameters");
    extra = ctx.size() - frame->base - 1;
    carrier = var(carrier_index(ctx));
  } else {
    check_param_args(ctx, s, pargs);
    carrier = schema_type(s.name, pargs);
  }

  auto open = [&](const TermPtr& stored, int inner,
                  const std::vector<TermPtr>& sofar) {
    if (abstract)
      return instantiate(shift(stored, inner, extra), sofar);
    return instantiate(rebase_cell_term(s, stored, inner, carrier, pargs),
                       sofar);
  };

  std::vector<TermPtr> sofar;
  for (size_t i = 0; i < c.tele.size(); i++) {
    const TeleEntry& e = c.tele[i];
    TermPtr expected;
    if (!e.recursive)
      expected = open(e.type, static_cast<int>(i), sofar);
    else if (!e.type)
      expected = carrier;
    else
      expected = pi(open(e.type, static_cast<int>(i), sofar),
                    shift(carrier, 0, 1));
    check(ctx, args[i], expected);
    sofar.push_back(args[i]);
  }

  int inner = static_cast<int>(c.tele.size());
  switch (c.dim) {
    case CellDim::Point: return carrier;
    case CellDim::Path:
      return id(carrier, open(c.src, inner, args), open(c.tgt, inner, args));
    case CellDim::Globe2: {
      TermPtr l = open(c.lhs, inner, args), r = open(c.rhs, inner, args);
      TermPtr tl = whnf(infer(ctx, l));
      if (tl->tag != Tag::Id)
        fail(ErrKind::BoundaryMismatch, "globe side is not a path");
      return id(tl, l, r);
    }
    case CellDim::SquareBoundary: {
      TermPtr b = open(c.bottom, inner, args), rr = open(c.right, inner, args);
      TermPtr tp = open(c.top, inner, args), lf = open(c.left, inner, args);
      TermPtr tb = whnf(infer(ctx, b));
      TermPtr tlf = whnf(infer(ctx, lf));
      TermPtr trr = whnf(infer(ctx, rr));
      if (tb->tag != Tag::Id || tlf->tag != Tag::Id || trr->tag != Tag::Id)
        fail(ErrKind::BoundaryMismatch, "square side is not a path");
      TermPtr c00 = tb->kids[1], c10 = tb->kids[2];
      TermPtr c01 = tlf->kids[2], c11 = trr->kids[2];
      TermPtr family = id(shift(carrier, 0, 1), proj1(var(0)), proj2(var(0)));
      TermPtr base = pair_path(carrier, lf, rr, c00, c01, c10, c11);
      return id_over(family, base, b, tp);
    }
  }
  fail(ErrKind::SchemaError, "unreachable cell dimension");
}

// ---- eliminator ------------------------------------------------------------

void Checker::check_elim_frame(const TypingContext&, const TermPtr& t) const {
  if (frame && t->nparams == 0 && frame->schema->name == t->head)
    fail(ErrKind::FibrantStructureError,
         "eliminator of the schema under validation used in a boundary");
}

TermPtr Checker::infer_elim(const TypingContext& ctx, const TermPtr& t) const {
  check_elim_frame(ctx, t);
  const Schema& s = lookup(t->head);
  std::vector<TermPtr> pargs = schema_params(t);
  check_param_args(ctx, s, pargs);
  ElimData d{&s, pargs, elim_motive(t), elim_methods(t)};
  TermPtr H = carrier_type(d);
  check_type(ctx.extended(H), d.motive);
  if (d.methods.size() != s.cells.size())
    fail(ErrKind::ArityMismatch,
         "eliminator of '" + s.name + "' needs " +
             std::to_string(s.cells.size()) + " methods, got " +
             std::to_string(d.methods.size()));
  for (size_t j = 0; j < s.cells.size(); j++) {
    MethodParts parts = elim_method_parts(d, static_cast<int>(j));
    if (d.methods[j].binders != static_cast<int>(parts.binders.size()))
      fail(ErrKind::ArityMismatch,
           "method for cell '" + s.cells[j].name + "' binds " +
               std::to_string(d.methods[j].binders) + " variables, expected " +
               std::to_string(parts.binders.size()));
    TypingContext c2 = ctx;
    for (const TermPtr& b : parts.binders) c2 = c2.extended(b);
    check(c2, d.methods[j].body, parts.body_type);
  }
  TermPtr scrut = elim_scrut(t);
  check(ctx, scrut, H);
  return instantiate(d.motive, {scrut});
}

TermPtr Checker::infer_path_comp(const TypingContext& ctx,
                                 const TermPtr& t) const {
  check_elim_frame(ctx, t);
  const Schema& s = lookup(t->head);
  if (t->index < 0 || t->index >= static_cast<int>(s.cells.size()) ||
      s.cells[t->index].dim != CellDim::Path)
    fail(ErrKind::SchemaError,
         "path computation witness requires a path cell of '" + s.name + "'");
  const CellSpec& c = s.cells[t->index];
  std::vector<TermPtr> pargs = schema_params(t);
  check_param_args(ctx, s, pargs);
  ElimData d{&s, pargs, elim_motive(t), elim_methods(t)};
  TermPtr H = carrier_type(d);
  check_type(ctx.extended(H), d.motive);
  if (d.methods.size() != s.cells.size())
    fail(ErrKind::ArityMismatch, "witness needs one method per cell");
  for (size_t j = 0; j < s.cells.size(); j++) {
    MethodParts parts = elim_method_parts(d, static_cast<int>(j));
    if (d.methods[j].binders != static_cast<int>(parts.binders.size()))
      fail(ErrKind::ArityMismatch, "method arity mismatch in witness");
    TypingContext c2 = ctx;
    for (const TermPtr& b : parts.binders) c2 = c2.extended(b);
    check(c2, d.methods[j].body, parts.body_type);
  }
  std::vector<TermPtr> args = ctor_args(t);
  if (args.size() != c.tele.size())
    fail(ErrKind::ArityMismatch, "witness cell argument count mismatch");
  std::vector<TermPtr> sofar;
  for (size_t i = 0; i < c.tele.size(); i++) {
    const TeleEntry& e = c.tele[i];
    TermPtr expected;
    if (!e.recursive)
      expected = instantiate(
          rebase_cell_term(s, e.type, static_cast<int>(i), H, pargs), sofar);
    else if (!e.type)
      expected = H;
    else
      expected = pi(instantiate(rebase_cell_term(s, e.type,
                                                 static_cast<int>(i), H,
                                                 pargs),
                                sofar),
                    shift(H, 0, 1));
    check(ctx, args[i], expected);
    sofar.push_back(args[i]);
  }
  int inner = static_cast<int>(c.tele.size());
  TermPtr srcR =
      instantiate(rebase_cell_term(s, c.src, inner, H, pargs), args);
  TermPtr tgtR =
      instantiate(rebase_cell_term(s, c.tgt, inner, H, pargs), args);
  TermPtr ctorTerm = schema_ctor(s.name, pargs, t->index, args);
  TermPtr ity = id_over(d.motive, ctorTerm, lift_boundary(d, srcR),
                        lift_boundary(d, tgtR));
  ElimData d1 = shift_elim(d, 1);
  TermPtr apSide = ap(elim_call(d1, var(0)), srcR, tgtR, ctorTerm);
  return id(ity, apSide, method_value(d, t->index, args));
}

// ---- terms ----------------------------------------------------------------

TermPtr Checker::infer(const TypingContext& ctx, const TermPtr& t) const {
  switch (t->tag) {
    case Tag::Var: return ctx.var_type(t->index);
    case Tag::Star: return unit();
    case Tag::Zero: return nat();
    case Tag::Succ:
      check(ctx, t->kids[0], nat());
      return nat();
    case Tag::App: {
      TermPtr ft = whnf(infer(ctx, t->kids[0]));
      if (ft->tag != Tag::Pi)
        fail(ErrKind::NotAFunction,
             "application head has type " + show(ft));
      check(ctx, t->kids[1], ft->kids[0]);
      return instantiate(ft->kids[1], {t->kids[1]});
    }
    case Tag::Proj1: {
      TermPtr pt = whnf(infer(ctx, t->kids[0]));
      if (pt->tag != Tag::Sigma)
        fail(ErrKind::NotAPair, "projection from type " + show(pt));
      return pt->kids[0];
    }
    case Tag::Proj2: {
      TermPtr pt = whnf(infer(ctx, t->kids[0]));
      if (pt->tag != Tag::Sigma)
        fail(ErrKind::NotAPair, "projection from type " + show(pt));
      return instantiate(pt->kids[1], {proj1(t->kids[0])});
    }
    case Tag::SumElim: {
      TermPtr st = whnf(infer(ctx, t->kids[3]));
      if (st->tag != Tag::Sum)
        fail(ErrKind::Mismatch, "case split on non-sum type " + show(st));
      const TermPtr& m = t->kids[0];
      check_type(ctx.extended(st), m);
      TermPtr mshift = shift(m, 1, 1);
      check(ctx.extended(st->kids[0]), t->kids[1],
            instantiate(mshift, {inl(var(0))}));
      check(ctx.extended(st->kids[1]), t->kids[2],
            instantiate(mshift, {inr(var(0))}));
      return instantiate(m, {t->kids[3]});
    }
    case Tag::Refl: {
      TermPtr a = infer(ctx, t->kids[0]);
      return id(a, t->kids[0], t->kids[0]);
    }
    case Tag::J: {
      TermPtr pt = whnf(infer(ctx, t->kids[4]));
      if (pt->tag != Tag::Id)
        fail(ErrKind::Mismatch, "J eliminates a non-path of type " + show(pt));
      const TermPtr& A = pt->kids[0];
      check(ctx, t->kids[2], A);
      check(ctx, t->kids[3], A);
      if (!def_equal(pt->kids[1], t->kids[2]) ||
          !def_equal(pt->kids[2], t->kids[3]))
        fail(ErrKind::Mismatch, "J endpoints do not match the path");
      const TermPtr& m = t->kids[0];
      TypingContext cm = ctx.extended(A).extended(shift(A, 0, 1));
      cm = cm.extended(id(shift(A, 0, 2), var(1), var(0)));
      if (!m) fail(ErrKind::IllTypedMotive, "missing motive");
      check_type(cm, m);
      // base: x:A |- c : C[x,x,refl x]
      TypingContext cb = ctx.extended(A);
      TermPtr expected =
          instantiate(shift(m, 3, 1), {var(0), var(0), refl(var(0))});
      check(cb, t->kids[1], expected);
      return instantiate(m, {t->kids[2], t->kids[3], t->kids[4]});
    }
    case Tag::JOver: {
      TermPtr pt = whnf(infer(ctx, t->kids[4]));
      if (pt->tag != Tag::Id)
        fail(ErrKind::Mismatch, "dependent J over a non-path");
      const TermPtr& A = pt->kids[0];
      check(ctx, t->kids[2], A);
      check(ctx, t->kids[3], A);
      if (!def_equal(pt->kids[1], t->kids[2]) ||
          !def_equal(pt->kids[2], t->kids[3]))
        fail(ErrKind::Mismatch, "dependent J endpoints do not match");
      TermPtr qt = whnf(infer(ctx, t->kids[7]));
      if (qt->tag != Tag::IdOver)
        fail(ErrKind::Mismatch, "dependent J needs a dependent path");
      const TermPtr& B = qt->kids[0];  // binding 1 over A
      if (!def_equal(qt->kids[1], t->kids[4]))
        fail(ErrKind::Mismatch, "dependent path lies over a different base");
      check(ctx, t->kids[5], instantiate(B, {t->kids[2]}));
      check(ctx, t->kids[6], instantiate(B, {t->kids[3]}));
      if (!def_equal(qt->kids[2], t->kids[5]) ||
          !def_equal(qt->kids[3], t->kids[6]))
        fail(ErrKind::Mismatch, "dependent J fiber endpoints do not match");
      // motive context: x y : A, e : Id A x y, u : B x, v : B y,
      //                 d : IdOver B e u v
      TypingContext cm = ctx.extended(A).extended(shift(A, 0, 1));
      cm = cm.extended(id(shift(A, 0, 2), var(1), var(0)));
      cm = cm.extended(instantiate(shift(B, 1, 3), {var(2)}));
      cm = cm.extended(instantiate(shift(B, 1, 4), {var(2)}));
      cm = cm.extended(
          id_over(shift(B, 1, 5), var(2), var(1), var(0)));
      check_type(cm, t->kids[0]);
      // base: x : A, u : B x |- c : C[x,x,refl x,u,u,reflover u]
      TypingContext cb = ctx.extended(A);
      cb = cb.extended(instantiate(shift(B, 1, 1), {var(0)}));
      TermPtr expected = instantiate(
          shift(t->kids[0], 6, 2),
          {var(1), var(1), refl(var(1)), var(0), var(0), refl_over(var(0))});
      check(cb, t->kids[1], expected);
      return instantiate(t->kids[0], {t->kids[2], t->kids[3], t->kids[4],
                                      t->kids[5], t->kids[6], t->kids[7]});
    }
    case Tag::Ap: {
      TermPtr pt = whnf(infer(ctx, t->kids[3]));
      if (pt->tag != Tag::Id)
        fail(ErrKind::Mismatch, "ap over a non-path of type " + show(pt));
      const TermPtr& A = pt->kids[0];
      check(ctx, t->kids[1], A);
      check(ctx, t->kids[2], A);
      if (!def_equal(pt->kids[1], t->kids[1]) ||
          !def_equal(pt->kids[2], t->kids[2]))
        fail(ErrKind::Mismatch, "ap endpoints do not match the path");
      TermPtr B = infer(ctx.extended(A), t->kids[0]);
      return id_over(B, t->kids[3], instantiate(t->kids[0], {t->kids[1]}),
                     instantiate(t->kids[0], {t->kids[2]}));
    }
    case Tag::NatElim: {
      check(ctx, t->kids[3], nat());
      const TermPtr& m = t->kids[0];
      check_type(ctx.extended(nat()), m);
      check(ctx, t->kids[1], instantiate(m, {zero()}));
      TypingContext cs = ctx.extended(nat());
      cs = cs.extended(instantiate(shift(m, 1, 1), {var(0)}));
      check(cs, t->kids[2], instantiate(shift(m, 1, 2), {succ(var(1))}));
      return instantiate(m, {t->kids[3]});
    }
    case Tag::SchemaCtor: return infer_ctor(ctx, t);
    case Tag::SchemaElim: return infer_elim(ctx, t);
    case Tag::SchemaPathComp: return infer_path_comp(ctx, t);
    case Tag::Lam:
    case Tag::Pair:
    case Tag::Inl:
    case Tag::Inr:
    case Tag::ReflOver:
      fail(ErrKind::Mismatch,
           "cannot infer a type for " + show(t) + "; a type is needed");
    case Tag::FinSetLit:
    case Tag::FinMapLit:
    case Tag::ElemLit:
      fail(ErrKind::NonCanonical,
           "finite-set literals are only legal inside eval requests");
    default:
      fail(ErrKind::NotAType,
           "expected a term, found the type " + show(t));
  }
}

void Checker::check(const TypingContext& ctx, const TermPtr& t,
                    const TermPtr& type) const {
  switch (t->tag) {
    case Tag::Lam: {
      TermPtr w = whnf(type);
      if (w->tag != Tag::Pi)
        fail(ErrKind::Mismatch,
             "lambda checked against non-function type " + show(w));
      check(ctx.extended(w->kids[0]), t->kids[0], w->kids[1]);
      return;
    }
    case Tag::Pair: {
      TermPtr w = whnf(type);
      if (w->tag != Tag::Sigma)
        fail(ErrKind::Mismatch,
             "pair checked against non-pair type " + show(w));
      check(ctx, t->kids[0], w->kids[0]);
      check(ctx, t->kids[1], instantiate(w->kids[1], {t->kids[0]}));
      return;
    }
    case Tag::Inl: {
      TermPtr w = whnf(type);
      if (w->tag != Tag::Sum)
        fail(ErrKind::Mismatch, "inl checked against " + show(w));
      check(ctx, t->kids[0], w->kids[0]);
      return;
    }
    case Tag::Inr: {
      TermPtr w = whnf(type);
      if (w->tag != Tag::Sum)
        fail(ErrKind::Mismatch, "inr checked against " + show(w));
      check(ctx, t->kids[0], w->kids[1]);
      return;
    }
    case Tag::Refl: {
      TermPtr w = whnf(type);
      if (w->tag != Tag::Id)
        fail(ErrKind::Mismatch, "refl checked against " + show(w));
      check(ctx, t->kids[0], w->kids[0]);
      if (!def_equal(w->kids[1], t->kids[0]) ||
          !def_equal(w->kids[2], t->kids[0]))
        fail(ErrKind::Mismatch, "refl endpoints disagree");
      return;
    }
    case Tag::ReflOver: {
      TermPtr w = whnf(type);
      if (w->tag != Tag::IdOver)
        fail(ErrKind::Mismatch, "reflover checked against " + show(w));
      TermPtr base = normalize(w->kids[1]);
      if (base->tag != Tag::Refl)
        fail(ErrKind::Mismatch,
             "reflover requires a reflexivity base path, got " + show(base));
      check(ctx, t->kids[0], instantiate(w->kids[0], {base->kids[0]}));
      if (!def_equal(w->kids[2], t->kids[0]) ||
          !def_equal(w->kids[3], t->kids[0]))
        fail(ErrKind::Mismatch, "reflover endpoints disagree");
      return;
    }
    default: {
      TermPtr got = infer(ctx, t);
      if (!def_equal(got, type))
        fail(ErrKind::Mismatch, "type mismatch: term " + show(t) +
                                    " has type " + show(got) +
                                    ", expected " + show(type));
    }
  }
}

}  // namespace hitt
