#pragma once
// finite-set semantics: the model where identity types are diagonals, so every
// path constructor becomes a plain quotient.  closed types evaluate to finite
// sets of values; schema instances evaluate to initial algebras computed by a
// fueled saturation loop with congruence closure.

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "hitt/schema.hpp"
#include "hitt/term.hpp"

namespace hitt {

struct Value;
using ValuePtr = std::shared_ptr<const Value>;

// sorted by value_cmp, no duplicates
using FinSet = std::vector<ValuePtr>;

struct Sem;
using Env = std::vector<Sem>;  // de Bruijn: var(0) is the back

struct Value {
  enum class K { Star, Atom, Num, Pair, Inl, Inr, Fun, Cls, Closure };
  K k = K::Star;
  std::string name;   // Atom
  long long num = 0;  // Num
  ValuePtr fst, snd;  // Pair; Inl and Inr keep their payload in fst
  std::vector<std::pair<ValuePtr, ValuePtr>> table;  // Fun, keys ascending
  int cls = -1;      // Cls: canonical tree index in its carrier
  TermPtr body;      // Closure: lambda body, one binder
  std::shared_ptr<const Env> captured;  // Closure
};

ValuePtr vstar();
ValuePtr vatom(const std::string& name);
ValuePtr vnum(long long n);
ValuePtr vpair(ValuePtr a, ValuePtr b);
ValuePtr vinl(ValuePtr a);
ValuePtr vinr(ValuePtr a);
ValuePtr vfun(std::vector<std::pair<ValuePtr, ValuePtr>> table);
ValuePtr vcls(int tree);
ValuePtr vclosure(TermPtr body, Env captured);

// total order used for canonical enumeration; refuses to order closures
int value_cmp(const ValuePtr& a, const ValuePtr& b);
bool value_eq(const ValuePtr& a, const ValuePtr& b);
std::string value_string(const ValuePtr& v);

struct ValueVecLess {
  bool operator()(const std::vector<ValuePtr>& a,
                  const std::vector<ValuePtr>& b) const;
};

// a set-valued family, one finite set per index tuple
struct TypeFam {
  int arity = 0;
  std::map<std::vector<ValuePtr>, FinSet, ValueVecLess> table;
};

struct Sem {
  enum class K { Val, Set, Fam };
  K k = K::Val;
  ValuePtr val;
  FinSet set;
  TypeFam fam;
};

Sem sem_val(ValuePtr v);
Sem sem_set(FinSet s);
Sem sem_fam(TypeFam f);

// one constructor application; recursive argument slots hold Cls values (or
// Fun tables into Cls values for function-shaped recursion)
struct Tree {
  int cell = -1;
  std::vector<ValuePtr> args;
};

enum class SatStatus { Converged, FuelExhausted };

struct Carrier {
  const Schema* schema = nullptr;
  Env params;
  std::vector<Tree> trees;
  mutable std::vector<int> parent;  // union-find over tree indices
  std::vector<int> rnk;
  std::vector<int> least;  // per root: least index, the canonical rep
  std::vector<std::map<std::vector<ValuePtr>, int, ValueVecLess>> ops;
  SatStatus status = SatStatus::FuelExhausted;
  int fuelUsed = 0;

  int find(int i) const;
  int canon(int i) const;  // least tree index of i's class
  ValuePtr canon_value(const ValuePtr& v) const;
  std::vector<int> class_reps() const;  // ascending
  int class_count() const;
  FinSet class_values() const;
};

struct Evaluator {
  const Registry* reg = nullptr;
  int fuel = 8;

  // interpretation of the surrounding schema's own constructors, installed
  // while a carrier is being saturated or a candidate algebra is probed
  const Schema* self = nullptr;
  const Env* selfParams = nullptr;
  FinSet selfCarrier;
  std::function<ValuePtr(int cell, std::vector<ValuePtr> args)> selfApply;

  FinSet eval_type(const Env& env, const TermPtr& a) const;
  ValuePtr eval_term(const Env& env, const TermPtr& t) const;
  ValuePtr apply(const ValuePtr& f, const ValuePtr& a) const;
  // forces closures into tables using the type; other values pass through
  ValuePtr reify(const Env& env, const TermPtr& type, const ValuePtr& v) const;
};

// parameter bindings for a schema instance, from syntactic (literal) arguments
Env eval_schema_params(const Registry& reg, const Schema& s,
                       const std::vector<TermPtr>& args, int fuel);

Carrier saturate(const Registry& reg, const Schema& s, const Env& params,
                 int fuel);

// independent post-hoc assertion: every path equation holds classwise
bool convergence_holds(const Registry& reg, const Carrier& c);

std::string tree_string(const Carrier& c, int tree);

struct ElimSpec {
  std::map<int, FinSet> motive;  // canonical class -> allowed values
  // per cell, point cells only: tele values then one value per recursive entry
  std::vector<std::function<ValuePtr(const std::vector<ValuePtr>&)>> methods;
};

// the unique algebra section: one value per canonical class, verified coherent
// across every identification the carrier records
std::map<int, ValuePtr> eliminate(const Registry& reg, const Carrier& c,
                                  const ElimSpec& spec);

struct InitialityReport {
  int bound = 0;
  int algebras = 0;
  bool unique = false;
};

// enumerates every algebra on sets of size <= bound satisfying the path
// equations and demands exactly one morphism from the carrier to each
InitialityReport check_universal_property(const Registry& reg,
                                          const Carrier& c, int bound);

// driver entry: target must normalize to a schema instance
Carrier eval_request(const Registry& reg, const TermPtr& target, int fuel);

}  // namespace hitt
