#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hitt/term.hpp"

namespace hitt {

struct Registry;

// ---- schema declarations -------------------------------------------------
//
// terms stored inside a schema use a fixed context discipline:
//   parameter entry i:        [param_0 .. param_{i-1}] ++ (its own ext prefix)
//   telescope entry i:        [params, X, tele_0 .. tele_{i-1}]
//   boundary terms:           [params, X, full telescope]
// where X is the abstract carrier.  type parameters act as type variables
// (families over their ext), term parameters as variables of the Pi-closure
// of their ext and type.  constructors of earlier cells appear in boundary
// terms as SchemaCtor nodes with an empty parameter list; the parameters are
// supplied when rules are instantiated.

struct ParamEntry {
  std::string name;
  bool is_type = false;
  std::vector<TermPtr> ext;  // context extension telescope
  TermPtr type;              // term parameters only: type over the extension
};

struct TeleEntry {
  std::string name;
  bool recursive = false;
  TermPtr type;  // non-recursive: its type; recursive: arity domain, or null for a bare occurrence
};

enum class CellDim { Point, Path, SquareBoundary, Globe2 };

struct CellSpec {
  std::string name;
  CellDim dim = CellDim::Point;
  std::vector<TeleEntry> tele;
  // Path: src/tgt at the carrier.  Globe2: lhs/rhs parallel paths.
  // SquareBoundary: bottom/right/top/left edges, corners shared.
  TermPtr src, tgt;
  TermPtr lhs, rhs;
  TermPtr bottom, right, top, left;

  int rec_count() const {
    int n = 0;
    for (const auto& e : tele) n += e.recursive ? 1 : 0;
    return n;
  }
};

struct Schema {
  std::string name;
  std::vector<ParamEntry> params;
  std::vector<CellSpec> cells;

  int cell_index(const std::string& cellName) const;  // -1 when absent
};

// ---- generated rules -------------------------------------------------------
//
// a rule set presents the schema's typing clauses as judgments in canonical
// contexts (parameters as abstract entries, then rule-specific variables).
// the formation clause has a null type: its subject is the type.

struct TypingClause {
  TypingContext ctx;
  TermPtr subject;
  TermPtr type;  // null for formation
};

struct RewriteRule {
  TypingContext ctx;
  TermPtr lhs, rhs;
};

struct RuleSet {
  std::string schema;
  TypingClause formation;
  std::vector<TypingClause> intros;
  TypingClause elim;
  std::vector<RewriteRule> beta;        // point-cell computation, oriented
  std::vector<TypingClause> path_comp;  // typed witnesses, one per path cell
};

bool clause_equal(const TypingClause& a, const TypingClause& b);
bool ruleset_equal(const RuleSet& a, const RuleSet& b);

struct Registry {
  std::map<std::string, Schema> schemas;
  std::map<std::string, RuleSet> rules;

  const Schema* find(const std::string& name) const {
    auto it = schemas.find(name);
    return it == schemas.end() ? nullptr : &it->second;
  }
  const RuleSet* rules_for(const std::string& name) const {
    auto it = rules.find(name);
    return it == rules.end() ? nullptr : &it->second;
  }
};

// ---- validation and generation --------------------------------------------

// parameter scheme alone; throws SchemaError (or the underlying type error)
void validate_param_scheme(const Registry& reg, const Schema& s);

// positivity, boundary typing, fibrant-structure ban, boundary closedness;
// throws PositivityError / FibrantStructureError / BoundaryMismatch / SchemaError
void validate_cells(const Registry& reg, const Schema& s);

RuleSet generate_rules(const Registry& reg, const Schema& s);

// validate, generate and insert; the usual entry point
void register_schema(Registry& reg, const Schema& s);

// ---- instantiation helpers shared by the checker and the generator --------

// open a stored term over [outer_0..outer_{n-1}, v_0..v_{inner-1}] in an
// ambient context, giving the outer entries the listed values (outermost
// first); the inner vars stay Var 0..inner-1
TermPtr open_with(const TermPtr& stored, int inner,
                  const std::vector<TermPtr>& outerValues);

// move a stored cell term over [params, X, inner vars] into a context
// `base ++ [inner vars]`: X becomes `carrier`, param references become
// `paramValues` (both over `base`), and bare constructor references of the
// schema receive the same values as explicit parameter arguments.
TermPtr rebase_cell_term(const Schema& s, const TermPtr& stored, int inner,
                         const TermPtr& carrier,
                         const std::vector<TermPtr>& paramValues);

// an eliminator's pieces, all expressed at one ambient context
struct ElimData {
  const Schema* schema;
  std::vector<TermPtr> pargs;
  TermPtr motive;  // binding 1
  std::vector<BoundTerm> methods;
};

ElimData shift_elim(const ElimData& d, int amount);
TermPtr carrier_type(const ElimData& d);
TermPtr elim_call(const ElimData& d, const TermPtr& scrut);

// method for `cell` applied to the cell's arguments, induction hypotheses
// filled with eliminator calls; the right-hand side of the beta rule
TermPtr method_value(const ElimData& d, int cell,
                     const std::vector<TermPtr>& args);

// binder telescope and expected body type of the method for `cell`
// (binders: the cell telescope, then one induction hypothesis per recursive
// position; each type at its own depth)
struct MethodParts {
  std::vector<TermPtr> binders;
  TermPtr body_type;
};
MethodParts elim_method_parts(const ElimData& d, int cell);

// method interpretation of a carrier-valued boundary term already rebased
// into the ambient context: constructor heads become method values, anything
// else an eliminator call
TermPtr lift_boundary(const ElimData& d, const TermPtr& t);

// full binder type of a telescope entry at its own depth, given the carrier
// expressed at that depth
TermPtr tele_binder_type(const TeleEntry& e, const TermPtr& rebasedDomain,
                         const TermPtr& carrierAtEntry);

// reference values for the parameters of `s` seen from a context that has the
// canonical parameter block at its base and `depth` entries on top of it
// (type families come back eta-expanded as lambda values)
std::vector<TermPtr> param_refs(const Schema& s, int depth);

// Pi-closure of a term parameter's ext and type (used for canonical contexts)
TermPtr param_pi_closure(const ParamEntry& e);

// canonical context holding just the parameter block of `s`
TypingContext param_context(const Schema& s);

// path pairing: given l : Id(A,c00,c01) and r : Id(A,c10,c11), a closed
// J-built path in Sigma(A,A) from (c00,c10) to (c01,c11); used to type
// square-boundary cell constructors
TermPtr pair_path(const TermPtr& A, const TermPtr& l, const TermPtr& r,
                  const TermPtr& c00, const TermPtr& c01, const TermPtr& c10,
                  const TermPtr& c11);

}  // namespace hitt
