#include <doctest.h>

#include <functional>

#include "hitt/typecheck.hpp"

using namespace hitt;

namespace {

Checker mk() { return Checker{}; }

TypingContext ctx_of(std::initializer_list<TermPtr> types) {
  TypingContext c;
  for (const TermPtr& t : types) c = c.extended(t);
  return c;
}

bool fails_with(ErrKind k, const std::function<void()>& f) {
  try {
    f();
  } catch (const KernelError& e) {
    return e.kind == k;
  }
  return false;
}

}  // namespace

TEST_CASE("beta, projection and case reductions") {
  Checker ck = mk();
  CHECK(alpha_equal(ck.normalize(app(lam(var(0)), zero())), zero()));
  CHECK(alpha_equal(ck.normalize(proj1(pair(zero(), star()))), zero()));
  CHECK(alpha_equal(ck.normalize(proj2(pair(zero(), star()))), star()));
  CHECK(alpha_equal(
      ck.normalize(sum_elim(nat(), succ(var(0)), var(0), inl(zero()))),
      succ(zero())));
  CHECK(alpha_equal(
      ck.normalize(sum_elim(nat(), succ(var(0)), var(0), inr(numeral(3)))),
      numeral(3)));
}

TEST_CASE("path eliminators compute on reflexivity") {
  Checker ck = mk();
  // J (x y e. C) (x. c) a a (refl a)  ~>  c[a]
  TermPtr t = j(id(nat(), var(1), var(2)), refl(var(0)), zero(), zero(),
                refl(zero()));
  CHECK(alpha_equal(ck.normalize(t), refl(zero())));

  // the dependent J fires on a refl base with a reflover fiber
  TermPtr d = j_over(unit(), pair(var(1), var(0)), zero(), zero(),
                     refl(zero()), star(), star(), refl_over(star()));
  CHECK(alpha_equal(ck.normalize(d), pair(zero(), star())));

  // ap on refl gives the reflover of the instantiated body
  TermPtr a = ap(succ(var(0)), zero(), zero(), refl(zero()));
  CHECK(alpha_equal(ck.normalize(a), refl_over(succ(zero()))));
}

TEST_CASE("numeric recursion computes") {
  Checker ck = mk();
  auto add = [](TermPtr m, TermPtr n) {
    return nat_elim(nat(), std::move(m), succ(var(0)), std::move(n));
  };
  CHECK(alpha_equal(ck.normalize(add(numeral(2), numeral(2))), numeral(4)));
  CHECK(alpha_equal(ck.normalize(add(numeral(5), zero())), numeral(5)));
  CHECK(ck.def_equal(succ(add(numeral(1), numeral(1))), numeral(3)));
}

TEST_CASE("recursor typing in context") {
  Checker ck = mk();
  TermPtr t = nat_elim(nat(), zero(), var(0), zero());
  CHECK_NOTHROW(ck.check(TypingContext{}, t, nat()));
  CHECK(alpha_equal(ck.infer(TypingContext{}, t), nat()));

  // the successor branch sees the predecessor and the recursive value
  TypingContext c = ctx_of({nat()});
  TermPtr dbl = nat_elim(nat(), zero(), succ(succ(var(0))), var(0));
  CHECK(alpha_equal(ck.infer(c, dbl), nat()));
}

TEST_CASE("identity application infers a dependent path type") {
  Checker ck = mk();
  TermPtr t = ap(succ(var(0)), zero(), zero(), refl(zero()));
  TermPtr got = ck.infer(TypingContext{}, t);
  CHECK(alpha_equal(
      got, id_over(nat(), refl(zero()), succ(zero()), succ(zero()))));
}

TEST_CASE("J types symmetry") {
  // x y : Nat, p : Id Nat x y  |-  J (x y e. Id Nat y x) (x. refl) : Id Nat y x
  Checker ck = mk();
  TypingContext c = ctx_of({nat(), nat(), id(nat(), var(1), var(0))});
  TermPtr sym = j(id(nat(), var(1), var(2)), refl(var(0)), var(2), var(1),
                  var(0));
  CHECK(alpha_equal(ck.infer(c, sym), id(nat(), var(1), var(2))));
}

TEST_CASE("checking against dependent function and pair types") {
  Checker ck = mk();
  CHECK_NOTHROW(ck.check(TypingContext{}, lam(var(0)), pi(nat(), nat())));
  CHECK_NOTHROW(ck.check(TypingContext{}, pair(zero(), refl(zero())),
                         sigma(nat(), id(nat(), var(0), var(0)))));
  CHECK_NOTHROW(
      ck.check(TypingContext{}, inl(star()), sum(unit(), nat())));
  // a type that computes: (fun x => Nat) 0
  CHECK_NOTHROW(ck.check(TypingContext{}, lam(var(0)),
                         pi(app(lam(nat()), zero()), nat())));
}

TEST_CASE("reflover needs a reflexive base") {
  Checker ck = mk();
  TermPtr ok = id_over(nat(), refl(zero()), zero(), zero());
  CHECK_NOTHROW(ck.check(TypingContext{}, refl_over(zero()), ok));
  // the base may reduce to a reflexivity
  TermPtr comp =
      id_over(nat(), app(lam(refl(zero())), star()), zero(), zero());
  CHECK_NOTHROW(ck.check(TypingContext{}, refl_over(zero()), comp));
  // a variable base does not normalize to refl
  TypingContext c =
      ctx_of({nat(), nat(), id(nat(), var(1), var(0)), nat(), nat()});
  TermPtr bad = id_over(nat(), var(2), var(1), var(0));
  CHECK(fails_with(ErrKind::Mismatch,
                   [&] { ck.check(c, refl_over(var(1)), bad); }));
}

TEST_CASE("type formation judgments") {
  Checker ck = mk();
  CHECK_NOTHROW(ck.check_type(TypingContext{}, nat()));
  CHECK_NOTHROW(
      ck.check_type(TypingContext{}, pi(nat(), id(nat(), var(0), zero()))));
  CHECK_NOTHROW(ck.check_type(
      TypingContext{},
      id_over(nat(), refl(zero()), zero(), zero())));
  CHECK(fails_with(ErrKind::Mismatch, [&] {
    ck.check_type(TypingContext{}, id(nat(), star(), zero()));
  }));
  CHECK(fails_with(ErrKind::NotAType, [&] {
    ck.check_type(ctx_of({nat()}), var(0));
  }));
}

TEST_CASE("abstract type variables form types and families") {
  Checker ck = mk();
  TypingContext c = TypingContext{}.extended_type_var({});
  CHECK_NOTHROW(ck.check_type(c, var(0)));
  CHECK_NOTHROW(ck.check_type(c, pi(var(0), var(1))));
  // a family over Nat must be fully applied
  TypingContext f = TypingContext{}.extended_type_var({nat()});
  CHECK_NOTHROW(ck.check_type(f, app(var(0), zero())));
  CHECK(fails_with(ErrKind::ArityMismatch, [&] { ck.check_type(f, var(0)); }));
  CHECK(fails_with(ErrKind::Mismatch,
                   [&] { ck.check_type(f, app(var(0), star())); }));
}

TEST_CASE("head reduction stops at the head") {
  Checker ck = mk();
  CHECK(alpha_equal(ck.whnf(app(lam(zero()), numeral(7))), zero()));
  // pairs are values; whnf leaves the redex inside alone
  TermPtr t = pair(app(lam(var(0)), zero()), zero());
  CHECK(alpha_equal(ck.whnf(t), t));
}

TEST_CASE("normalization fuel runs out on loops") {
  Checker ck = mk();
  ck.fuel = 200;
  TermPtr omega = app(lam(app(var(0), var(0))), lam(app(var(0), var(0))));
  CHECK(fails_with(ErrKind::FuelExhausted, [&] { ck.normalize(omega); }));
}

TEST_CASE("ill-typed terms are rejected with the right kinds") {
  Checker ck = mk();
  CHECK(fails_with(ErrKind::NotAFunction, [&] {
    ck.infer(TypingContext{}, app(zero(), zero()));
  }));
  CHECK(fails_with(ErrKind::NotAPair,
                   [&] { ck.infer(TypingContext{}, proj1(zero())); }));
  CHECK(fails_with(ErrKind::UnboundVariable,
                   [&] { ck.infer(TypingContext{}, var(3)); }));
  CHECK(fails_with(ErrKind::Mismatch, [&] {
    ck.check(TypingContext{}, lam(var(0)), nat());
  }));
  CHECK(fails_with(ErrKind::Mismatch, [&] {
    ck.check(TypingContext{}, succ(star()), nat());
  }));
  // J endpoints must match the path
  TypingContext c = ctx_of({nat(), nat(), id(nat(), var(1), var(0))});
  CHECK(fails_with(ErrKind::Mismatch, [&] {
    ck.infer(c, j(id(nat(), var(1), var(2)), refl(var(0)), var(1), var(1),
                  var(0)));
  }));
}

TEST_CASE("each reduction step preserves the type") {
  Checker ck = mk();
  TermPtr t = nat_elim(nat(), zero(), succ(succ(var(0))), numeral(3));
  int guard = 0;
  while (true) {
    CHECK(alpha_equal(ck.infer(TypingContext{}, t), nat()));
    auto r = ck.reduce_step(t);
    if (!r) break;
    t = *r;
    REQUIRE(++guard < 200);
  }
  CHECK(alpha_equal(t, numeral(6)));
}
