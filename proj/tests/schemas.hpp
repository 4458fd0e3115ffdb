#pragma once

// hand-built schema fixtures and helpers shared across test binaries

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hitt/schema.hpp"
#include "hitt/typecheck.hpp"

namespace fixtures {

using namespace hitt;

inline bool fails_with(ErrKind k, const std::function<void()>& f) {
  try {
    f();
  } catch (const KernelError& e) {
    return e.kind == k;
  }
  return false;
}

inline TeleEntry arg(std::string name, TermPtr type) {
  return TeleEntry{std::move(name), false, std::move(type)};
}
inline TeleEntry rec(std::string name) {
  return TeleEntry{std::move(name), true, nullptr};
}
inline TeleEntry rec_fun(std::string name, TermPtr dom) {
  return TeleEntry{std::move(name), true, std::move(dom)};
}

inline CellSpec point_cell(std::string name, std::vector<TeleEntry> tele) {
  CellSpec c;
  c.name = std::move(name);
  c.dim = CellDim::Point;
  c.tele = std::move(tele);
  return c;
}

inline CellSpec path_cell(std::string name, std::vector<TeleEntry> tele,
                          TermPtr src, TermPtr tgt) {
  CellSpec c;
  c.name = std::move(name);
  c.dim = CellDim::Path;
  c.tele = std::move(tele);
  c.src = std::move(src);
  c.tgt = std::move(tgt);
  return c;
}

inline CellSpec globe_cell(std::string name, std::vector<TeleEntry> tele,
                           TermPtr lhs, TermPtr rhs) {
  CellSpec c;
  c.name = std::move(name);
  c.dim = CellDim::Globe2;
  c.tele = std::move(tele);
  c.lhs = std::move(lhs);
  c.rhs = std::move(rhs);
  return c;
}

inline CellSpec square_cell(std::string name, TermPtr bottom, TermPtr right,
                            TermPtr top, TermPtr left) {
  CellSpec c;
  c.name = std::move(name);
  c.dim = CellDim::SquareBoundary;
  c.bottom = std::move(bottom);
  c.right = std::move(right);
  c.top = std::move(top);
  c.left = std::move(left);
  return c;
}

inline ParamEntry type_param(std::string name, std::vector<TermPtr> ext = {}) {
  ParamEntry p;
  p.name = std::move(name);
  p.is_type = true;
  p.ext = std::move(ext);
  return p;
}

inline ParamEntry term_param(std::string name, TermPtr type,
                             std::vector<TermPtr> ext = {}) {
  ParamEntry p;
  p.name = std::move(name);
  p.type = std::move(type);
  p.ext = std::move(ext);
  return p;
}

inline TermPtr own(const std::string& schema, int cell,
                   std::vector<TermPtr> args) {
  return schema_ctor(schema, {}, cell, std::move(args));
}

inline Schema nat_like() {
  Schema s;
  s.name = "NatS";
  s.cells = {point_cell("zeroS", {}), point_cell("succS", {rec("n")})};
  return s;
}

inline Schema coprod_like() {
  Schema s;
  s.name = "Coprod";
  s.params = {type_param("A"), type_param("B")};
  s.cells = {point_cell("in1", {arg("a", var(2))}),
             point_cell("in2", {arg("b", var(1))})};
  return s;
}

inline Schema tree_like() {
  // carrier of well-founded trees: sup (a : A) (f : B a -> W)
  Schema s;
  s.name = "W";
  s.params = {type_param("A"), type_param("B", {var(0)})};
  s.cells = {point_cell(
      "sup", {arg("a", var(2)), rec_fun("f", app(var(2), var(0)))})};
  return s;
}

inline Schema james_like() {
  Schema s;
  s.name = "James";
  s.params = {type_param("A"), term_param("pt", var(0))};
  s.cells = {
      point_cell("nil", {}),
      point_cell("cons", {arg("a", var(2)), rec("x")}),
      path_cell("shift", {rec("x")}, var(0),
                own("James", 1, {var(2), var(0)})),
  };
  return s;
}

inline Schema pushout_like() {
  Schema s;
  s.name = "Push";
  s.params = {type_param("A"), type_param("B1"), type_param("B2"),
              term_param("f1", var(2), {var(2)}),
              term_param("f2", var(2), {var(3)})};
  s.cells = {
      point_cell("nu1", {arg("b", var(4))}),
      point_cell("nu2", {arg("b", var(3))}),
      path_cell("glue", {arg("a", var(5))},
                own("Push", 0, {app(var(3), var(0))}),
                own("Push", 1, {app(var(2), var(0))})),
  };
  return s;
}

inline Schema trunc_like() {
  Schema s;
  s.name = "Trunc";
  s.params = {type_param("A")};
  s.cells = {point_cell("tr", {arg("a", var(1))}),
             path_cell("treq", {rec("x"), rec("y")}, var(1), var(0))};
  return s;
}

inline Schema circle_like() {
  Schema s;
  s.name = "Circle";
  s.cells = {point_cell("base", {}),
             path_cell("loop", {}, own("Circle", 0, {}),
                       own("Circle", 0, {}))};
  return s;
}

inline Schema sphere_like() {
  Schema s;
  s.name = "Sphere";
  s.cells = {point_cell("base2", {}),
             globe_cell("surf", {}, refl(own("Sphere", 0, {})),
                        refl(own("Sphere", 0, {})))};
  return s;
}

inline Schema torus_like() {
  Schema s;
  s.name = "Torus";
  TermPtr base = own("Torus", 0, {});
  s.cells = {point_cell("baseT", {}), path_cell("lp", {}, base, base),
             path_cell("rp", {}, base, base),
             square_cell("sq", own("Torus", 1, {}), own("Torus", 2, {}),
                         own("Torus", 1, {}), own("Torus", 2, {}))};
  return s;
}

inline Schema loc_like() {
  // localization at h : S -> T; inclusion plus extension/uniqueness pairs
  Schema s;
  s.name = "Loc";
  s.params = {type_param("S"), type_param("T"),
              term_param("h", var(1), {var(1)}), type_param("A")};
  s.cells = {
      point_cell("inc", {arg("a", var(1))}),
      point_cell("ext", {rec_fun("g", var(4)), arg("t", var(4))}),
      point_cell("ext'", {rec_fun("g", var(4)), arg("t", var(4))}),
      path_cell("rtr", {rec_fun("g", var(4)), arg("s", var(5))},
                own("Loc", 1, {var(1), app(var(4), var(0))}),
                app(var(1), var(0))),
      path_cell("rtr'", {rec_fun("g", var(3)), arg("t", var(4))},
                own("Loc", 2,
                    {lam(app(var(2), app(var(5), var(0)))), var(0)}),
                app(var(1), var(0))),
  };
  return s;
}

// structural comparison: binder names are ignored, schema and cell names are
// not (qualified references depend on them)
inline bool tele_equal(const std::vector<TeleEntry>& a,
                       const std::vector<TeleEntry>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); i++) {
    if (a[i].recursive != b[i].recursive) return false;
    if ((a[i].type == nullptr) != (b[i].type == nullptr)) return false;
    if (a[i].type && !alpha_equal(a[i].type, b[i].type)) return false;
  }
  return true;
}

inline bool opt_equal(const TermPtr& a, const TermPtr& b) {
  if ((a == nullptr) != (b == nullptr)) return false;
  return !a || alpha_equal(a, b);
}

inline bool schema_equal(const Schema& a, const Schema& b) {
  if (a.name != b.name || a.params.size() != b.params.size() ||
      a.cells.size() != b.cells.size())
    return false;
  for (size_t i = 0; i < a.params.size(); i++) {
    const ParamEntry& p = a.params[i];
    const ParamEntry& q = b.params[i];
    if (p.is_type != q.is_type || p.ext.size() != q.ext.size()) return false;
    for (size_t k = 0; k < p.ext.size(); k++)
      if (!alpha_equal(p.ext[k], q.ext[k])) return false;
    if (!p.is_type && !alpha_equal(p.type, q.type)) return false;
  }
  for (size_t i = 0; i < a.cells.size(); i++) {
    const CellSpec& c = a.cells[i];
    const CellSpec& d = b.cells[i];
    if (c.name != d.name || c.dim != d.dim) return false;
    if (!tele_equal(c.tele, d.tele)) return false;
    if (!opt_equal(c.src, d.src) || !opt_equal(c.tgt, d.tgt)) return false;
    if (!opt_equal(c.lhs, d.lhs) || !opt_equal(c.rhs, d.rhs)) return false;
    if (!opt_equal(c.bottom, d.bottom) || !opt_equal(c.right, d.right) ||
        !opt_equal(c.top, d.top) || !opt_equal(c.left, d.left))
      return false;
  }
  return true;
}

// re-derives every generated clause through a fresh checker; throws on the
// first judgment that does not hold
inline void assert_rules_well_typed(const Registry& reg,
                                    const std::string& name) {
  const RuleSet* rs = reg.rules_for(name);
  if (!rs) throw std::runtime_error("no rules registered for " + name);
  Checker ck;
  ck.reg = &reg;
  ck.check_type(rs->formation.ctx, rs->formation.subject);
  auto clause = [&](const TypingClause& cl) {
    ck.check_type(cl.ctx, cl.type);
    ck.check(cl.ctx, cl.subject, cl.type);
  };
  for (const TypingClause& cl : rs->intros) clause(cl);
  clause(rs->elim);
  for (const TypingClause& cl : rs->path_comp) clause(cl);
  for (const RewriteRule& r : rs->beta) {
    TermPtr lt = ck.infer(r.ctx, r.lhs);
    TermPtr rt = ck.infer(r.ctx, r.rhs);
    if (!ck.def_equal(lt, rt))
      throw std::runtime_error(name + ": beta rule sides typed differently");
    if (!alpha_equal(ck.normalize(r.lhs), ck.normalize(r.rhs)))
      throw std::runtime_error(name + ": beta rule does not reduce");
  }
}

}  // namespace fixtures
