#pragma once

// randomized property suites, shared between the unit tests and the
// acceptance runner; each suite returns a counted Result so callers can
// either assert or print

#include <string>
#include <vector>

#include "gen.hpp"
#include "hitt/finset.hpp"
#include "hitt/parser.hpp"
#include "hitt/prelude.hpp"
#include "hitt/term.hpp"
#include "hitt/typecheck.hpp"

namespace props {

struct Result {
  int cases = 0;
  int failures = 0;
  std::string first_failure;
};

namespace detail {

using namespace hitt;

inline void note(Result& r, const std::string& what) {
  r.failures++;
  if (r.first_failure.empty()) r.first_failure = what;
}

// numeral recursion with a constant motive routes any checkable term
// through an inferable head and reduces straight back to it; the motive
// sits under the scrutinee binder, hence the shift
inline TermPtr route(const TermPtr& t, const TermPtr& type) {
  return nat_elim(shift(type, 0, 1), t, var(0), zero());
}

// mirror of the checker's synthesis discipline: these are the heads whose
// types can be read off without an annotation
inline bool inferable(const TermPtr& t) {
  switch (t->tag) {
    case Tag::Var:
    case Tag::Star:
    case Tag::Zero:
    case Tag::Succ:
    case Tag::NatElim:
      return true;
    case Tag::App:
    case Tag::Proj1:
    case Tag::Proj2:
    case Tag::Refl:
      return inferable(t->kids[0]);
    case Tag::SumElim:
      return inferable(t->kids[3]);
    case Tag::J:
      return inferable(t->kids[4]);
    default:
      return false;
  }
}

inline TermPtr ensure_inferable(const TermPtr& t, const TermPtr& type) {
  return inferable(t) ? t : route(t, type);
}

inline TermPtr canon_inhabitant(const TermPtr& type) {
  switch (type->tag) {
    case Tag::Unit:
      return star();
    case Tag::Nat:
      return zero();
    case Tag::Sum:
      return inl(canon_inhabitant(type->kids[0]));
    case Tag::Sigma:
      return pair(canon_inhabitant(type->kids[0]),
                  canon_inhabitant(type->kids[1]));
    case Tag::Pi:
      return lam(canon_inhabitant(type->kids[1]));
    case Tag::Id:
      return refl(type->kids[1]);
    default:
      return star();
  }
}

// closed inhabited types; binders are constant families so every component
// stays closed. finite mode keeps Nat out so the evaluator can enumerate.
inline TermPtr rand_type(testgen::Rng& rng, int depth, bool finite) {
  if (depth <= 0) return !finite && rng.coin() ? nat() : unit();
  switch (rng.pick(6)) {
    case 0:
      return unit();
    case 1:
      return finite ? sum(unit(), unit()) : nat();
    case 2:
      return sum(rand_type(rng, depth - 1, finite),
                 rand_type(rng, depth - 1, finite));
    case 3:
      return sigma(rand_type(rng, depth - 1, finite),
                   rand_type(rng, depth - 1, finite));
    case 4:
      return pi(rand_type(rng, depth - 1, finite),
                rand_type(rng, depth - 1, finite));
    default: {
      TermPtr a = rand_type(rng, depth - 1, finite);
      TermPtr c = canon_inhabitant(a);
      return id(a, c, c);
    }
  }
}

TermPtr rand_term(testgen::Rng& rng, std::vector<TermPtr>& ctx,
                  const TermPtr& want, int depth, bool finite);

inline TermPtr intro_term(testgen::Rng& rng, std::vector<TermPtr>& ctx,
                          const TermPtr& want, int depth, bool finite) {
  switch (want->tag) {
    case Tag::Nat:
      return numeral(rng.pick(5));
    case Tag::Sum:
      if (rng.coin()) return inl(rand_term(rng, ctx, want->kids[0], depth, finite));
      return inr(rand_term(rng, ctx, want->kids[1], depth, finite));
    case Tag::Sigma: {
      TermPtr a = rand_term(rng, ctx, want->kids[0], depth, finite);
      return pair(a, rand_term(rng, ctx, want->kids[1], depth, finite));
    }
    case Tag::Pi: {
      ctx.push_back(want->kids[0]);
      TermPtr body = rand_term(rng, ctx, want->kids[1], depth, finite);
      ctx.pop_back();
      return lam(body);
    }
    case Tag::Id:
      return refl(want->kids[1]);
    default:
      return star();
  }
}

// ctx is outermost-first, so var(0) refers to the back; every stored type
// is closed, which spares us the usual shift bookkeeping
inline std::vector<int> var_hits(const std::vector<TermPtr>& ctx,
                                 const TermPtr& want) {
  std::vector<int> hits;
  int n = static_cast<int>(ctx.size());
  for (int i = 0; i < n; i++)
    if (alpha_equal(ctx[n - 1 - i], want)) hits.push_back(i);
  return hits;
}

inline TermPtr rand_term(testgen::Rng& rng, std::vector<TermPtr>& ctx,
                         const TermPtr& want, int depth, bool finite) {
  std::vector<int> hits = var_hits(ctx, want);
  if (depth <= 0) {
    if (!hits.empty() && rng.coin())
      return var(hits[rng.pick(static_cast<int>(hits.size()))]);
    return intro_term(rng, ctx, want, 0, finite);
  }
  switch (rng.pick(8)) {
    case 0:
      if (!hits.empty()) return var(hits[rng.pick(static_cast<int>(hits.size()))]);
      [[fallthrough]];
    case 1:
      return intro_term(rng, ctx, want, depth - 1, finite);
    case 2:
      return route(rand_term(rng, ctx, want, depth - 1, finite), want);
    case 3: {
      TermPtr a = rand_type(rng, 1, finite);
      TermPtr fty = pi(a, want);
      TermPtr f = ensure_inferable(rand_term(rng, ctx, fty, depth - 1, finite),
                                   fty);
      return app(f, rand_term(rng, ctx, a, depth - 1, finite));
    }
    case 4: {
      TermPtr other = rand_type(rng, 1, finite);
      if (rng.coin()) {
        TermPtr s = sigma(want, other);
        return proj1(
            ensure_inferable(rand_term(rng, ctx, s, depth - 1, finite), s));
      }
      TermPtr s = sigma(other, want);
      return proj2(
          ensure_inferable(rand_term(rng, ctx, s, depth - 1, finite), s));
    }
    case 5: {
      TermPtr a = rand_type(rng, 1, finite);
      TermPtr b = rand_type(rng, 1, finite);
      TermPtr s = sum(a, b);
      TermPtr scrut =
          ensure_inferable(rand_term(rng, ctx, s, depth - 1, finite), s);
      ctx.push_back(a);
      TermPtr l = rand_term(rng, ctx, want, depth - 1, finite);
      ctx.pop_back();
      ctx.push_back(b);
      TermPtr r = rand_term(rng, ctx, want, depth - 1, finite);
      ctx.pop_back();
      return sum_elim(want, l, r, scrut);
    }
    case 6: {
      TermPtr z = rand_term(rng, ctx, want, depth - 1, finite);
      ctx.push_back(nat());
      ctx.push_back(want);
      TermPtr s = rand_term(rng, ctx, want, depth - 1, finite);
      ctx.pop_back();
      ctx.pop_back();
      return nat_elim(want, z, s, numeral(rng.pick(3)));
    }
    default: {
      TermPtr a = rand_type(rng, 1, finite);
      TermPtr pt = rand_term(rng, ctx, a, depth - 1, finite);
      TermPtr path = route(refl(pt), id(a, pt, pt));
      ctx.push_back(a);
      TermPtr base = rand_term(rng, ctx, want, depth - 1, finite);
      ctx.pop_back();
      return j(want, base, pt, pt, path);
    }
  }
}

}  // namespace detail

inline Result shift_subst_cancellation(uint64_t seed, int n) {
  using namespace hitt;
  Result r;
  testgen::Rng rng{seed};
  for (int i = 0; i < n; i++) {
    r.cases++;
    TermPtr t = testgen::random_term(rng, 3, 6);
    TermPtr v = testgen::random_term(rng, 3, 4);
    if (!alpha_equal(substitute(shift(t, 0, 1), 0, v), t))
      detail::note(r, raw_string(t));
  }
  return r;
}

inline Result parse_print_roundtrip(uint64_t seed, int n) {
  using namespace hitt;
  Result r;
  testgen::Rng rng{seed};
  for (int i = 0; i < n; i++) {
    r.cases++;
    int scope = rng.pick(4);
    std::vector<std::string> names;
    for (int k = 0; k < scope; k++) names.push_back("v" + std::to_string(k));
    TermPtr t = testgen::random_term(rng, scope, 2 + rng.pick(5));
    try {
      std::string text = pretty_print(t, names);
      TermPtr back = parse_expr(text, names);
      if (!alpha_equal(t, back)) detail::note(r, text);
    } catch (const std::exception& e) {
      detail::note(r, std::string(e.what()));
    }
  }
  return r;
}

inline Result subject_reduction(uint64_t seed, int n) {
  using namespace hitt;
  Result r;
  testgen::Rng rng{seed};
  Checker ck;
  for (int i = 0; i < n; i++) {
    r.cases++;
    TermPtr ty = detail::rand_type(rng, 2, false);
    std::vector<TermPtr> ctx;
    TermPtr t = detail::rand_term(rng, ctx, ty, 3, false);
    try {
      ck.check(TypingContext{}, t, ty);
      ck.check(TypingContext{}, ck.normalize(t), ty);
    } catch (const KernelError& e) {
      detail::note(r, raw_string(t) + " : " + raw_string(ty) + " | " +
                          e.what());
    }
  }
  return r;
}

inline Result substitution_typing(uint64_t seed, int n) {
  using namespace hitt;
  Result r;
  testgen::Rng rng{seed};
  Checker ck;
  for (int i = 0; i < n; i++) {
    r.cases++;
    TermPtr a = detail::rand_type(rng, 2, false);
    TermPtr ty = detail::rand_type(rng, 2, false);
    std::vector<TermPtr> ctx{a};
    TermPtr t = detail::rand_term(rng, ctx, ty, 3, false);
    std::vector<TermPtr> closed;
    TermPtr v = detail::ensure_inferable(
        detail::rand_term(rng, closed, a, 3, false), a);
    try {
      ck.check(TypingContext{}.extended(a), t, ty);
      ck.check(TypingContext{}, v, a);
      ck.check(TypingContext{}, instantiate(t, {v}), ty);
    } catch (const KernelError& e) {
      detail::note(r, raw_string(t) + " [" + raw_string(v) + "] : " +
                          raw_string(ty) + " | " + e.what());
    }
  }
  return r;
}

inline Result def_equal_congruence(uint64_t seed, int n) {
  using namespace hitt;
  Result r;
  testgen::Rng rng{seed};
  Checker ck;
  for (int i = 0; i < n; i++) {
    r.cases++;
    TermPtr ty = detail::rand_type(rng, 2, false);
    std::vector<TermPtr> ctx;
    TermPtr t = detail::rand_term(rng, ctx, ty, 3, false);
    TermPtr u = detail::route(t, ty);
    if (!ck.def_equal(t, u)) {
      detail::note(r, "detour not equal: " + raw_string(t));
      continue;
    }
    TermPtr a = t;
    TermPtr b = u;
    int layers = 1 + rng.pick(3);
    for (int k = 0; k < layers; k++) {
      switch (rng.pick(6)) {
        case 0:
          a = pair(a, star());
          b = pair(b, star());
          break;
        case 1:
          a = inl(a);
          b = inl(b);
          break;
        case 2:
          a = lam(shift(a, 0, 1));
          b = lam(shift(b, 0, 1));
          break;
        case 3:
          a = proj1(pair(a, star()));
          b = proj1(pair(b, star()));
          break;
        case 4:
          a = refl(a);
          b = refl(b);
          break;
        default:
          a = detail::route(a, ty);
          b = detail::route(b, ty);
          break;
      }
    }
    if (!ck.def_equal(a, b))
      detail::note(r, raw_string(a) + " vs " + raw_string(b));
  }
  return r;
}

inline Result eval_respects_def_equal(uint64_t seed, int n) {
  using namespace hitt;
  Result r;
  testgen::Rng rng{seed};
  Checker ck;
  Evaluator ev;
  static Registry reg = builtin_registry();
  ev.reg = &reg;
  for (int i = 0; i < n; i++) {
    r.cases++;
    TermPtr ty = detail::rand_type(rng, 2, true);
    std::vector<TermPtr> ctx;
    TermPtr t = detail::rand_term(rng, ctx, ty, 3, true);
    try {
      ck.check(TypingContext{}, t, ty);
      Env env;
      ValuePtr v1 = ev.reify(env, ty, ev.eval_term(env, t));
      ValuePtr v2 = ev.reify(env, ty, ev.eval_term(env, ck.normalize(t)));
      if (!value_eq(v1, v2))
        detail::note(r, raw_string(t) + " | " + value_string(v1) + " vs " +
                            value_string(v2));
    } catch (const KernelError& e) {
      detail::note(r, raw_string(t) + " | " + e.what());
    }
  }
  return r;
}

}  // namespace props
