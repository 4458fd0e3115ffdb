#include "hitt/driver.hpp"

#include <json.hpp>

#include <fstream>
#include <future>
#include <ostream>
#include <sstream>

#include "hitt/prelude.hpp"
#include "hitt/typecheck.hpp"

namespace hitt {

namespace {

enum class Mode { Check, Eval, Lint };

SourceSpan whole_file(const std::string& path) {
  return SourceSpan{path, 1, 1, 1, 1};
}

Diagnostic make_diag(const SourceSpan& sp, ErrKind kind,
                     const std::string& msg) {
  Diagnostic d;
  d.span = sp;
  d.kind = kind;
  d.message = msg;
  return d;
}

// syntax, scope, I/O and usage trouble beats semantic failure in the exit code
bool hard_kind(ErrKind k) {
  return k == ErrKind::SyntaxError || k == ErrKind::ScopeError ||
         k == ErrKind::IOError || k == ErrKind::Usage;
}

int exit_for(const Report& r) {
  bool hard = false;
  bool soft = false;
  for (const Diagnostic& d : r.diagnostics)
    (hard_kind(d.kind) ? hard : soft) = true;
  return hard ? 2 : soft ? 1 : 0;
}

struct FileOut {
  Report rep;
  bool sawRequest = false;
};

FileOut process_file(Mode mode, const std::string& path,
                     const Registry& prelude, const Options& opts) {
  FileOut fo;
  Report& rep = fo.rep;
  std::ifstream in(path);
  if (!in) {
    rep.ok = false;
    rep.diagnostics.push_back(make_diag(whole_file(path), ErrKind::IOError,
                                        "cannot open '" + path + "'"));
    return fo;
  }
  std::stringstream buf;
  buf << in.rdbuf();

  Registry reg = prelude;
  Module mod;
  try {
    mod = parse_module(buf.str(), path, &reg);
  } catch (const ParseError& e) {
    rep.ok = false;
    rep.diagnostics.push_back(make_diag(e.span, e.kind, e.what()));
    return fo;
  }

  Checker ck;
  ck.reg = &reg;
  for (const Item& it : mod.items) {
    try {
      switch (it.kind) {
        case Item::Kind::SchemaDecl:
          // lint stops at validation; check and eval need the rules too,
          // and register_schema does both.  a declaration in the file
          // shadows a library schema of the same name
          reg.schemas.erase(it.schema.name);
          reg.rules.erase(it.schema.name);
          register_schema(reg, it.schema);
          break;
        case Item::Kind::Definition:
          if (mode == Mode::Lint) break;
          ck.check_type(TypingContext{}, it.type);
          ck.check(TypingContext{}, it.body, it.type);
          break;
        case Item::Kind::Eval: {
          if (mode != Mode::Eval) break;
          if (!opts.request.empty() && it.name != opts.request) break;
          fo.sawRequest = true;
          int fuel = opts.fuel > 0 ? opts.fuel : it.fuel;
          Carrier c = eval_request(reg, it.target, fuel);
          Evaluation ev;
          ev.name = it.name;
          ev.converged = c.status == SatStatus::Converged;
          ev.classes = c.class_count();
          ev.fuelUsed = c.fuelUsed;
          for (int t : c.class_reps()) ev.reps.push_back(tree_string(c, t));
          // fuel exhaustion is reported, not fatal, so it must not turn an
          // initiality request into an error; the check needs a finished
          // carrier anyway
          if (opts.initialityBound > 0 && ev.converged)
            ev.initiality =
                check_universal_property(reg, c, opts.initialityBound);
          rep.evaluations.push_back(std::move(ev));
          break;
        }
      }
    } catch (const KernelError& e) {
      rep.ok = false;
      rep.diagnostics.push_back(make_diag(it.span, e.kind, e.what()));
    }
  }
  return fo;
}

// a replacement library is read as an ordinary module; only its schema
// declarations matter
bool load_prelude(const Options& opts, Registry& reg, Report& rep) {
  if (opts.preludePath.empty()) {
    reg = builtin_registry();
    return true;
  }
  std::ifstream in(opts.preludePath);
  if (!in) {
    rep.ok = false;
    rep.diagnostics.push_back(
        make_diag(whole_file(opts.preludePath), ErrKind::IOError,
                  "cannot open '" + opts.preludePath + "'"));
    return false;
  }
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    Module mod = parse_module(buf.str(), opts.preludePath);
    for (const Item& it : mod.items)
      if (it.kind == Item::Kind::SchemaDecl) register_schema(reg, it.schema);
  } catch (const ParseError& e) {
    rep.ok = false;
    rep.diagnostics.push_back(make_diag(e.span, e.kind, e.what()));
    return false;
  } catch (const KernelError& e) {
    rep.ok = false;
    rep.diagnostics.push_back(
        make_diag(whole_file(opts.preludePath), e.kind, e.what()));
    return false;
  }
  return true;
}

void print_human(std::ostream& out, const Report& r) {
  for (const Diagnostic& d : r.diagnostics)
    out << d.span.file << ":" << d.span.startLine << ":" << d.span.startCol
        << ": " << d.severity << ": " << d.message << " ["
        << err_kind_name(d.kind) << "]\n";
  for (const Evaluation& e : r.evaluations) {
    out << e.name << ": " << (e.converged ? "converged" : "fuel exhausted")
        << ", " << e.classes << (e.classes == 1 ? " class" : " classes")
        << " (fuel used " << e.fuelUsed << ")\n";
    for (const std::string& t : e.reps) out << "  " << t << "\n";
    if (e.initiality)
      out << "  initiality: bound " << e.initiality->bound << ", "
          << e.initiality->algebras
          << (e.initiality->algebras == 1 ? " algebra" : " algebras")
          << (e.initiality->unique ? ", morphisms unique" : "") << "\n";
  }
}

int run(Mode mode, const std::vector<std::string>& paths, const Options& opts,
        std::ostream& out) {
  Report merged;
  Registry prelude;
  if (load_prelude(opts, prelude, merged)) {
    if (paths.empty()) {
      merged.ok = false;
      merged.diagnostics.push_back(
          make_diag(whole_file("<cli>"), ErrKind::Usage, "no input files"));
    }
    std::vector<std::future<FileOut>> work;
    work.reserve(paths.size());
    for (const std::string& p : paths)
      work.push_back(std::async(std::launch::async, process_file, mode, p,
                                std::cref(prelude), std::cref(opts)));
    bool sawRequest = false;
    for (auto& f : work) {
      FileOut fo = f.get();
      merged.ok = merged.ok && fo.rep.ok;
      sawRequest = sawRequest || fo.sawRequest;
      for (Diagnostic& d : fo.rep.diagnostics)
        merged.diagnostics.push_back(std::move(d));
      for (Evaluation& e : fo.rep.evaluations)
        merged.evaluations.push_back(std::move(e));
    }
    if (mode == Mode::Eval && !opts.request.empty() && !sawRequest &&
        !paths.empty()) {
      merged.ok = false;
      merged.diagnostics.push_back(
          make_diag(whole_file("<cli>"), ErrKind::Usage,
                    "no eval request named '" + opts.request + "'"));
    }
  }
  if (opts.json)
    out << report_json(merged) << "\n";
  else
    print_human(out, merged);
  return exit_for(merged);
}

}  // namespace

std::string report_json(const Report& r) {
  nlohmann::ordered_json j;
  j["status"] = r.ok ? "ok" : "failed";
  j["diagnostics"] = nlohmann::ordered_json::array();
  for (const Diagnostic& d : r.diagnostics) {
    nlohmann::ordered_json o;
    o["severity"] = d.severity;
    o["file"] = d.span.file;
    o["startLine"] = d.span.startLine;
    o["startCol"] = d.span.startCol;
    o["endLine"] = d.span.endLine;
    o["endCol"] = d.span.endCol;
    o["kind"] = err_kind_name(d.kind);
    o["message"] = d.message;
    j["diagnostics"].push_back(std::move(o));
  }
  j["evaluations"] = nlohmann::ordered_json::array();
  for (const Evaluation& e : r.evaluations) {
    nlohmann::ordered_json o;
    o["name"] = e.name;
    o["status"] = e.converged ? "converged" : "fuel_exhausted";
    o["classes"] = e.classes;
    o["fuel_used"] = e.fuelUsed;
    if (e.initiality) {
      nlohmann::ordered_json ir;
      ir["bound"] = e.initiality->bound;
      ir["algebras"] = e.initiality->algebras;
      ir["unique"] = e.initiality->unique;
      o["initiality"] = std::move(ir);
    } else {
      o["initiality"] = nullptr;
    }
    j["evaluations"].push_back(std::move(o));
  }
  return j.dump(2);
}

int run_check(const std::vector<std::string>& paths, const Options& opts,
              std::ostream& out) {
  return run(Mode::Check, paths, opts, out);
}

int run_eval(const std::vector<std::string>& paths, const Options& opts,
             std::ostream& out) {
  return run(Mode::Eval, paths, opts, out);
}

int run_lint(const std::vector<std::string>& paths, const Options& opts,
             std::ostream& out) {
  return run(Mode::Lint, paths, opts, out);
}

}  // namespace hitt
