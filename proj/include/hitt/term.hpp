#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "hitt/error.hpp"

namespace hitt {

// Terms and types share one syntax tree over de Bruijn indices (Var 0 is the
// innermost binder).  Every node records, per child, how many binders that
// child sits under; shift/substitute/alpha walk the tree generically off that
// table instead of switching on tags.
enum class Tag : unsigned char {
  Var,
  Pi,
  Lam,
  App,
  Sigma,
  Pair,
  Proj1,
  Proj2,
  Unit,
  Star,
  Sum,
  Inl,
  Inr,
  SumElim,
  Id,
  Refl,
  J,
  IdOver,
  ReflOver,
  JOver,
  Ap,
  Nat,
  Zero,
  Succ,
  NatElim,
  SchemaType,      // schema name applied to parameter instantiations
  SchemaCtor,      // cell constructor of a registered schema
  SchemaElim,      // the generated eliminator
  SchemaPathComp,  // propositional computation witness for a path cell
  FinSetLit,       // finite-set literal; legal only inside eval requests
  FinMapLit,
  ElemLit,
};

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
  Tag tag;
  int index = 0;      // Var: de Bruijn index; SchemaCtor/SchemaPathComp: cell index
  int nparams = 0;    // schema nodes: how many leading kids are parameter args
  int nmethods = 0;   // SchemaElim/SchemaPathComp: method count after the motive
  std::string head;   // schema name, or ElemLit atom
  std::vector<TermPtr> kids;
  std::vector<int> arities;  // binder count per kid, same length as kids
  std::vector<std::string> atoms;  // FinSetLit members
  std::vector<std::pair<std::string, TermPtr>> table;  // FinMapLit entries
};

// method arguments to eliminators carry their binder count explicitly since
// it depends on the schema, not the tag
struct BoundTerm {
  TermPtr body;
  int binders = 0;
};

TermPtr var(int i);
TermPtr pi(TermPtr dom, TermPtr cod);
TermPtr lam(TermPtr body);
TermPtr app(TermPtr fn, TermPtr arg);
TermPtr app_spine(TermPtr fn, const std::vector<TermPtr>& args);
TermPtr sigma(TermPtr first, TermPtr second);
TermPtr pair(TermPtr a, TermPtr b);
TermPtr proj1(TermPtr p);
TermPtr proj2(TermPtr p);
TermPtr unit();
TermPtr star();
TermPtr sum(TermPtr l, TermPtr r);
TermPtr inl(TermPtr t);
TermPtr inr(TermPtr t);
TermPtr sum_elim(TermPtr motive, TermPtr lcase, TermPtr rcase, TermPtr scrut);
TermPtr id(TermPtr type, TermPtr lhs, TermPtr rhs);
TermPtr refl(TermPtr point);
TermPtr j(TermPtr motive, TermPtr base, TermPtr a1, TermPtr a2, TermPtr path);
TermPtr id_over(TermPtr family, TermPtr base_path, TermPtr u, TermPtr v);
TermPtr refl_over(TermPtr point);
TermPtr j_over(TermPtr motive, TermPtr base, TermPtr a1, TermPtr a2,
               TermPtr path, TermPtr b1, TermPtr b2, TermPtr path_over);
TermPtr ap(TermPtr fn_body, TermPtr a1, TermPtr a2, TermPtr path);
TermPtr nat();
TermPtr zero();
TermPtr succ(TermPtr n);
TermPtr numeral(int n);
TermPtr nat_elim(TermPtr motive, TermPtr zcase, TermPtr scase, TermPtr scrut);
TermPtr schema_type(const std::string& name, std::vector<TermPtr> params);
TermPtr schema_ctor(const std::string& name, std::vector<TermPtr> params,
                    int cell, std::vector<TermPtr> args);
TermPtr schema_elim(const std::string& name, std::vector<TermPtr> params,
                    TermPtr motive, const std::vector<BoundTerm>& methods,
                    TermPtr scrut);
TermPtr schema_path_comp(const std::string& name, std::vector<TermPtr> params,
                         int cell, TermPtr motive,
                         const std::vector<BoundTerm>& methods,
                         std::vector<TermPtr> cell_args);
TermPtr finset_lit(std::vector<std::string> elems);
TermPtr finmap_lit(std::vector<std::pair<std::string, TermPtr>> entries);
TermPtr elem_lit(const std::string& name);

// schema node accessors; they slice the kid vector by the stored counts
std::vector<TermPtr> schema_params(const TermPtr& t);
TermPtr elim_motive(const TermPtr& t);
std::vector<BoundTerm> elim_methods(const TermPtr& t);
TermPtr elim_scrut(const TermPtr& t);          // SchemaElim only
std::vector<TermPtr> ctor_args(const TermPtr& t);  // SchemaCtor / SchemaPathComp tail

// free variables >= cutoff move by amount; going below zero is NegativeIndex
TermPtr shift(const TermPtr& t, int cutoff, int amount);

// replace Var idx by value, decrementing the indices above it
TermPtr substitute(const TermPtr& t, int idx, const TermPtr& value);

// parallel substitution: Var i -> map[i] when i < map.size(),
// Var i -> Var(i - map.size() + shift) otherwise
struct Subst {
  std::vector<TermPtr> map;
  int offset = 0;
  static Subst single(const TermPtr& value);  // value for Var 0, rest shift down
};
TermPtr subst_apply(const Subst& s, const TermPtr& t);

// open a body under args.size() binders with the arguments given
// outermost-binder first
TermPtr instantiate(const TermPtr& body, const std::vector<TermPtr>& args);

bool alpha_equal(const TermPtr& a, const TermPtr& b);

// does Var idx occur free in t
bool occurs_free(const TermPtr& t, int idx);

// plain de Bruijn rendering for error messages and debugging
std::string raw_string(const TermPtr& t);

// typing contexts: a telescope where each entry is either a term variable
// with a type, or an abstract type variable (possibly a family over its own
// telescope).  entry types are expressed in the prefix before them.
struct CtxEntry {
  TermPtr type;                    // null for type variables
  std::vector<TermPtr> telescope;  // family arguments for type variables
  bool is_type = false;
};

struct TypingContext {
  std::vector<CtxEntry> entries;  // entries[0] outermost

  int size() const { return static_cast<int>(entries.size()); }
  TypingContext extended(TermPtr type) const;
  TypingContext extended_type_var(std::vector<TermPtr> telescope = {}) const;
  // entry for Var i, with no shifting applied
  const CtxEntry& entry_for(int i) const;
  // type of Var i shifted into the full context; throws on type variables
  TermPtr var_type(int i) const;
};

}  // namespace hitt
