#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hitt/schema.hpp"
#include "hitt/term.hpp"

namespace hitt {

// bidirectional checker over the shared term syntax.  infer covers every
// node except Lam, Pair, Inl, Inr and ReflOver, which only check against a
// given type.  definitional equality is normalize-and-compare under a step
// budget; there are no eta rules.
struct Checker {
  const Registry* reg = nullptr;
  int fuel = 10000;  // normalization step budget

  // set while validating a schema: its cells type against an abstract
  // carrier sitting at context position `base` (entries before it)
  struct Frame {
    const Schema* schema;
    int base;
  };
  std::optional<Frame> frame;

  const Schema& lookup(const std::string& name) const;

  void check_type(const TypingContext& ctx, const TermPtr& t) const;
  TermPtr infer(const TypingContext& ctx, const TermPtr& t) const;
  void check(const TypingContext& ctx, const TermPtr& t,
             const TermPtr& type) const;

  // one leftmost-outermost step over purely syntactic redex patterns
  std::optional<TermPtr> reduce_step(const TermPtr& t) const;
  // head normal form: drives only the kids that gate a head redex
  TermPtr whnf(const TermPtr& t) const;
  TermPtr normalize(const TermPtr& t) const;
  bool def_equal(const TermPtr& a, const TermPtr& b) const;

  // parameter instantiations checked against a schema's parameter scheme
  void check_param_args(const TypingContext& ctx, const Schema& s,
                        const std::vector<TermPtr>& args) const;

 private:
  std::optional<TermPtr> contract(const TermPtr& t) const;
  TermPtr whnf_fueled(TermPtr t, int& steps) const;
  TermPtr infer_ctor(const TypingContext& ctx, const TermPtr& t) const;
  TermPtr infer_elim(const TypingContext& ctx, const TermPtr& t) const;
  TermPtr infer_path_comp(const TypingContext& ctx, const TermPtr& t) const;
  void check_elim_frame(const TypingContext& ctx, const TermPtr& t) const;
  int carrier_index(const TypingContext& ctx) const;
};

}  // namespace hitt
