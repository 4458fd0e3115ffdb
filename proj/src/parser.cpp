#include "hitt/parser.hpp"

#include <cctype>
#include <deque>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace hitt {

namespace {

enum class Tok {
  Ident,
  Number,
  LParen,
  RParen,
  LBrace,
  RBrace,
  LBracket,
  RBracket,
  Colon,
  ColonEq,
  Arrow,
  FatArrow,
  Asterisk,
  Plus,
  Comma,
  Dot,
  Eq,
  MapsTo,
  End,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int line = 1, col = 1, endLine = 1, endCol = 1;
};

bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

const std::set<std::string>& reserved() {
  static const std::set<std::string> words = {
      "def",  "schema", "eval",   "point", "path", "cell",  "square",
      "fuel", "fun",    "Type",   "Nat",   "Unit", "star",  "zero",
      "succ", "natrec", "fst",    "snd",   "inl",  "inr",   "case",
      "Id",   "refl",   "IdOver", "refl'", "J",    "J'",    "ap",
      "finset", "finmap", "elem", "elim",  "comp"};
  return words;
}

// keywords that can never begin an expression atom; application chains and
// edge lists stop when one of these comes up
bool structural_kw(const std::string& w) {
  static const std::set<std::string> words = {
      "def", "schema", "eval", "point", "path",
      "cell", "square", "fuel", "fun",  "Type"};
  return words.count(w) != 0;
}

struct Lexer {
  const std::string& src;
  std::string file;
  size_t i = 0;
  int line = 1, col = 1;

  Lexer(const std::string& s, std::string f) : src(s), file(std::move(f)) {}

  [[noreturn]] void err(const std::string& msg) {
    SourceSpan sp{file, line, col, line, col + 1};
    throw ParseError(ErrKind::SyntaxError, sp, msg);
  }

  void bump() {
    if (src[i] == '\n') {
      line++;
      col = 1;
    } else {
      col++;
    }
    i++;
  }

  std::vector<Token> run() {
    std::vector<Token> out;
    while (i < src.size()) {
      char c = src[i];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        bump();
        continue;
      }
      if (c == '-' && i + 1 < src.size() && src[i + 1] == '-') {
        while (i < src.size() && src[i] != '\n') bump();
        continue;
      }
      Token t;
      t.line = line;
      t.col = col;
      auto close = [&](Tok k) {
        t.kind = k;
        t.endLine = line;
        t.endCol = col;
        out.push_back(t);
      };
      if (ident_start(c)) {
        while (i < src.size() && ident_char(src[i])) {
          t.text += src[i];
          bump();
        }
        close(Tok::Ident);
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c))) {
        while (i < src.size() &&
               std::isdigit(static_cast<unsigned char>(src[i]))) {
          t.text += src[i];
          bump();
        }
        close(Tok::Number);
        continue;
      }
      switch (c) {
        case '(': bump(); close(Tok::LParen); break;
        case ')': bump(); close(Tok::RParen); break;
        case '{': bump(); close(Tok::LBrace); break;
        case '}': bump(); close(Tok::RBrace); break;
        case '[': bump(); close(Tok::LBracket); break;
        case ']': bump(); close(Tok::RBracket); break;
        case '*': bump(); close(Tok::Asterisk); break;
        case '+': bump(); close(Tok::Plus); break;
        case ',': bump(); close(Tok::Comma); break;
        case '.': bump(); close(Tok::Dot); break;
        case ':':
          bump();
          if (i < src.size() && src[i] == '=') {
            bump();
            close(Tok::ColonEq);
          } else {
            close(Tok::Colon);
          }
          break;
        case '=':
          bump();
          if (i < src.size() && src[i] == '>') {
            bump();
            close(Tok::FatArrow);
          } else {
            close(Tok::Eq);
          }
          break;
        case '-':
          bump();
          if (i < src.size() && src[i] == '>') {
            bump();
            close(Tok::Arrow);
          } else {
            err("stray '-'; expected '->' or a '--' comment");
          }
          break;
        case '|':
          bump();
          if (i + 1 < src.size() && src[i] == '-' && src[i + 1] == '>') {
            bump();
            bump();
            close(Tok::MapsTo);
          } else {
            err("stray '|'; expected '|->'");
          }
          break;
        default:
          // U+21A6 as a synonym for |->
          if (i + 2 < src.size() &&
              static_cast<unsigned char>(src[i]) == 0xE2 &&
              static_cast<unsigned char>(src[i + 1]) == 0x86 &&
              static_cast<unsigned char>(src[i + 2]) == 0xA6) {
            bump();
            bump();
            bump();
            close(Tok::MapsTo);
            break;
          }
          err("unexpected character");
      }
    }
    Token end;
    end.kind = Tok::End;
    end.line = line;
    end.col = col;
    end.endLine = line;
    end.endCol = col;
    out.push_back(end);
    return out;
  }
};

struct Parser {
  std::vector<Token> toks;
  std::string file;
  size_t pos = 0;
  bool allowLits = false;

  std::vector<std::string> bound;             // binder names, innermost last
  std::map<std::string, TermPtr> defBodies;   // closed, inlined at use
  std::map<std::string, const Schema*> schemaTab;
  std::deque<Schema> parsedSchemas;
  std::set<std::string> itemNames;
  bool defHead = false;    // the atom just parsed was a definition name
  Schema* self = nullptr;  // schema currently being declared, if any

  const Token& peek(int k = 0) const {
    size_t j = pos + k;
    return toks[j < toks.size() ? j : toks.size() - 1];
  }
  bool at(Tok k) const { return peek().kind == k; }
  bool at_kw(const char* w) const {
    return at(Tok::Ident) && peek().text == w;
  }

  SourceSpan span_of(const Token& t) const {
    return {file, t.line, t.col, t.endLine, t.endCol};
  }
  [[noreturn]] void err_at(const Token& t, ErrKind k,
                           const std::string& msg) const {
    throw ParseError(k, span_of(t), msg);
  }
  [[noreturn]] void err(const std::string& msg) const {
    err_at(peek(), ErrKind::SyntaxError, msg);
  }

  Token eat(Tok k, const char* what) {
    if (!at(k)) err(std::string("expected ") + what);
    return toks[pos++];
  }
  bool accept(Tok k) {
    if (!at(k)) return false;
    pos++;
    return true;
  }
  bool accept_kw(const char* w) {
    if (!at_kw(w)) return false;
    pos++;
    return true;
  }
  std::string eat_name(const char* what) {
    Token t = eat(Tok::Ident, what);
    if (reserved().count(t.text))
      err_at(t, ErrKind::SyntaxError,
             "'" + t.text + "' is a reserved word");
    return t.text;
  }

  void push(const std::string& n) { bound.push_back(n); }
  void pop(size_t n) { bound.resize(bound.size() - n); }

  // ---- expressions ---------------------------------------------------------

  bool binder_group_ahead() const {
    if (!at(Tok::LParen)) return false;
    size_t k = pos + 1;
    bool any = false;
    while (toks[k].kind == Tok::Ident && !reserved().count(toks[k].text)) {
      k++;
      any = true;
    }
    return any && toks[k].kind == Tok::Colon;
  }

  bool atom_ahead() const {
    if (at(Tok::LParen)) return true;
    return at(Tok::Ident) && !structural_kw(peek().text);
  }

  TermPtr parse_expr_level() {
    if (accept_kw("fun")) {
      std::vector<std::string> names;
      while (at(Tok::Ident)) names.push_back(eat_name("a binder name"));
      if (names.empty()) err("expected binder names after 'fun'");
      eat(Tok::FatArrow, "'=>'");
      for (const auto& n : names) push(n);
      TermPtr body = parse_expr_level();
      pop(names.size());
      for (size_t k = names.size(); k-- > 0;) body = lam(body);
      return body;
    }
    if (binder_group_ahead()) {
      // (x y : A) (z : B) -> C   or with '*' for iterated pairs
      std::vector<std::pair<std::vector<std::string>, TermPtr>> groups;
      size_t pushed = 0;
      while (binder_group_ahead()) {
        eat(Tok::LParen, "'('");
        std::vector<std::string> names;
        while (at(Tok::Ident)) names.push_back(eat_name("a binder name"));
        eat(Tok::Colon, "':'");
        TermPtr dom = parse_expr_level();
        eat(Tok::RParen, "')'");
        groups.push_back({names, dom});
        for (const auto& n : names) {
          push(n);
          pushed++;
        }
      }
      bool isPi;
      if (accept(Tok::Arrow)) {
        isPi = true;
      } else if (accept(Tok::Asterisk)) {
        isPi = false;
      } else {
        err("expected '->' or '*' after binder group");
      }
      TermPtr body = parse_expr_level();
      pop(pushed);
      for (size_t g = groups.size(); g-- > 0;) {
        const auto& [names, dom] = groups[g];
        for (size_t k = names.size(); k-- > 0;) {
          TermPtr d = shift(dom, 0, static_cast<int>(k));
          body = isPi ? pi(d, body) : sigma(d, body);
        }
      }
      return body;
    }
    TermPtr t = parse_sum();
    if (accept(Tok::Arrow)) {
      push("_");
      TermPtr cod = parse_expr_level();
      pop(1);
      return pi(t, cod);
    }
    return t;
  }

  TermPtr parse_sum() {
    TermPtr t = parse_prod();
    while (accept(Tok::Plus)) t = sum(t, parse_prod());
    return t;
  }

  TermPtr parse_prod() {
    TermPtr t = parse_app();
    while (accept(Tok::Asterisk)) t = sigma(t, shift(parse_app(), 0, 1));
    return t;
  }

  // applications headed by an inlined definition are beta-folded on the
  // spot so the checker never meets a lambda in inferring position; raw
  // lambda redexes are kept verbatim
  TermPtr parse_app() {
    defHead = false;
    TermPtr t = parse_atom();
    bool folding = defHead;
    while (atom_ahead()) {
      TermPtr a = parse_atom();
      if (folding && t->tag == Tag::Lam)
        t = instantiate(t->kids[0], {a});
      else
        t = app(t, a);
    }
    defHead = false;
    return t;
  }

  std::vector<TermPtr> parse_n_atoms(size_t n) {
    std::vector<TermPtr> out;
    for (size_t k = 0; k < n; k++) out.push_back(parse_atom());
    return out;
  }

  TermPtr parse_bracket(int n) {
    eat(Tok::LBracket, "'['");
    std::vector<std::string> names;
    for (int k = 0; k < n; k++) names.push_back(eat_name("a binder name"));
    eat(Tok::Dot, "'.'");
    for (const auto& nm : names) push(nm);
    TermPtr body = parse_expr_level();
    pop(names.size());
    eat(Tok::RBracket, "']'");
    return body;
  }

  BoundTerm parse_bound_atom(int n) {
    if (n == 0) return BoundTerm{parse_atom(), 0};
    eat(Tok::LParen, "'('");
    std::vector<std::string> names;
    for (int k = 0; k < n; k++) names.push_back(eat_name("a binder name"));
    eat(Tok::Dot, "'.'");
    for (const auto& nm : names) push(nm);
    TermPtr body = parse_expr_level();
    pop(names.size());
    eat(Tok::RParen, "')'");
    return BoundTerm{body, n};
  }

  void require_lits(const Token& t) {
    if (!allowLits)
      err_at(t, ErrKind::SyntaxError,
             "finite-set literals are only allowed in eval requests");
  }

  TermPtr parse_lit_value() {
    if (at_kw("finset") || at_kw("finmap") || at_kw("elem")) return parse_atom();
    Token e = eat(Tok::Ident, "an element name");
    return elem_lit(e.text);
  }

  TermPtr parse_atom() {
    Token t = peek();
    if (accept(Tok::LParen)) {
      TermPtr a = parse_expr_level();
      if (accept(Tok::Comma)) {
        TermPtr b = parse_expr_level();
        eat(Tok::RParen, "')'");
        return pair(a, b);
      }
      eat(Tok::RParen, "')'");
      return a;
    }
    if (!at(Tok::Ident)) err("expected an expression");
    pos++;
    const std::string& w = t.text;
    if (w == "Nat") return nat();
    if (w == "Unit") return unit();
    if (w == "star") return star();
    if (w == "zero") return zero();
    if (w == "succ") return succ(parse_atom());
    if (w == "fst") return proj1(parse_atom());
    if (w == "snd") return proj2(parse_atom());
    if (w == "inl") return inl(parse_atom());
    if (w == "inr") return inr(parse_atom());
    if (w == "refl") return refl(parse_atom());
    if (w == "refl'") return refl_over(parse_atom());
    if (w == "Id") {
      TermPtr a = parse_atom();
      TermPtr l = parse_atom();
      TermPtr r = parse_atom();
      return id(a, l, r);
    }
    if (w == "IdOver") {
      TermPtr fam = parse_bracket(1);
      TermPtr p = parse_atom();
      TermPtr u = parse_atom();
      TermPtr v = parse_atom();
      return id_over(fam, p, u, v);
    }
    if (w == "J") {
      TermPtr motive = parse_bracket(3);
      BoundTerm base = parse_bound_atom(1);
      TermPtr a = parse_atom();
      TermPtr b = parse_atom();
      TermPtr p = parse_atom();
      return j(motive, base.body, a, b, p);
    }
    if (w == "J'") {
      TermPtr motive = parse_bracket(6);
      BoundTerm base = parse_bound_atom(2);
      TermPtr a1 = parse_atom();
      TermPtr a2 = parse_atom();
      TermPtr p = parse_atom();
      TermPtr b1 = parse_atom();
      TermPtr b2 = parse_atom();
      TermPtr q = parse_atom();
      return j_over(motive, base.body, a1, a2, p, b1, b2, q);
    }
    if (w == "ap") {
      TermPtr fn = parse_bracket(1);
      TermPtr a = parse_atom();
      TermPtr b = parse_atom();
      TermPtr p = parse_atom();
      return ap(fn, a, b, p);
    }
    if (w == "natrec") {
      TermPtr motive = parse_bracket(1);
      TermPtr z = parse_atom();
      BoundTerm s = parse_bound_atom(2);
      TermPtr n = parse_atom();
      return nat_elim(motive, z, s.body, n);
    }
    if (w == "case") {
      TermPtr motive = parse_bracket(1);
      TermPtr scrut = parse_atom();
      BoundTerm l = parse_bound_atom(1);
      BoundTerm r = parse_bound_atom(1);
      return sum_elim(motive, l.body, r.body, scrut);
    }
    if (w == "finset") {
      require_lits(t);
      eat(Tok::LBrace, "'{'");
      std::vector<std::string> elems;
      if (!at(Tok::RBrace)) {
        do {
          elems.push_back(eat(Tok::Ident, "an element name").text);
        } while (accept(Tok::Comma));
      }
      eat(Tok::RBrace, "'}'");
      return finset_lit(elems);
    }
    if (w == "finmap") {
      require_lits(t);
      eat(Tok::LBrace, "'{'");
      std::vector<std::pair<std::string, TermPtr>> entries;
      if (!at(Tok::RBrace)) {
        do {
          std::string key = eat(Tok::Ident, "an element name").text;
          eat(Tok::MapsTo, "'|->'");
          entries.push_back({key, parse_lit_value()});
        } while (accept(Tok::Comma));
      }
      eat(Tok::RBrace, "'}'");
      return finmap_lit(entries);
    }
    if (w == "elem") {
      require_lits(t);
      Token e = eat(Tok::Ident, "an element name");
      return elem_lit(e.text);
    }
    if (w == "Type")
      err_at(t, ErrKind::SyntaxError,
             "'Type' is only allowed in parameter declarations");
    return parse_ident_atom(t);
  }

  TermPtr parse_ident_atom(const Token& name) {
    for (int k = static_cast<int>(bound.size()) - 1; k >= 0; k--)
      if (bound[k] == name.text)
        return var(static_cast<int>(bound.size()) - 1 - k);
    if (self) {
      int ci = self->cell_index(name.text);
      if (ci >= 0) {
        std::vector<TermPtr> args =
            parse_n_atoms(self->cells[ci].tele.size());
        return schema_ctor(self->name, {}, ci, args);
      }
    }
    auto d = defBodies.find(name.text);
    if (d != defBodies.end()) {
      defHead = true;
      return d->second;
    }
    auto s = schemaTab.find(name.text);
    if (s != schemaTab.end()) return parse_schema_form(*s->second);
    err_at(name, ErrKind::ScopeError, "unbound name '" + name.text + "'");
  }

  TermPtr parse_schema_form(const Schema& s) {
    if (!accept(Tok::Dot))
      return schema_type(s.name, parse_n_atoms(s.params.size()));
    Token sel = eat(Tok::Ident, "a cell name or 'elim'");
    if (sel.text == "elim") {
      std::vector<TermPtr> ps = parse_n_atoms(s.params.size());
      TermPtr motive = parse_bracket(1);
      std::vector<BoundTerm> ms;
      for (const CellSpec& c : s.cells)
        ms.push_back(parse_bound_atom(
            static_cast<int>(c.tele.size()) + c.rec_count()));
      TermPtr scrut = parse_atom();
      return schema_elim(s.name, ps, motive, ms, scrut);
    }
    int ci = s.cell_index(sel.text);
    if (ci < 0)
      err_at(sel, ErrKind::ScopeError,
             "schema '" + s.name + "' has no cell '" + sel.text + "'");
    if (accept(Tok::Dot)) {
      Token c = eat(Tok::Ident, "'comp'");
      if (c.text != "comp")
        err_at(c, ErrKind::SyntaxError, "expected 'comp'");
      if (s.cells[ci].dim != CellDim::Path)
        err_at(c, ErrKind::SyntaxError,
               "'.comp' is only defined for path cells");
      std::vector<TermPtr> ps = parse_n_atoms(s.params.size());
      TermPtr motive = parse_bracket(1);
      std::vector<BoundTerm> ms;
      for (const CellSpec& cc : s.cells)
        ms.push_back(parse_bound_atom(
            static_cast<int>(cc.tele.size()) + cc.rec_count()));
      std::vector<TermPtr> args = parse_n_atoms(s.cells[ci].tele.size());
      return schema_path_comp(s.name, ps, ci, motive, ms, args);
    }
    std::vector<TermPtr> ps = parse_n_atoms(s.params.size());
    std::vector<TermPtr> args = parse_n_atoms(s.cells[ci].tele.size());
    return schema_ctor(s.name, ps, ci, args);
  }

  // ---- items ----------------------------------------------------------------

  void check_fresh(const Token& name) {
    if (reserved().count(name.text))
      err_at(name, ErrKind::SyntaxError,
             "'" + name.text + "' is a reserved word");
    // only names from this file collide; a declaration here may shadow a
    // preloaded library schema
    if (itemNames.count(name.text))
      err_at(name, ErrKind::SyntaxError,
             "the name '" + name.text + "' is already in use");
  }

  void parse_param_type(ParamEntry& pe) {
    size_t pushed = 0;
    for (;;) {
      if (at_kw("Type")) {
        pos++;
        pe.is_type = true;
        pe.type = nullptr;
        break;
      }
      if (binder_group_ahead()) {
        eat(Tok::LParen, "'('");
        std::vector<std::string> names;
        while (at(Tok::Ident)) names.push_back(eat_name("a binder name"));
        eat(Tok::Colon, "':'");
        TermPtr dom = parse_expr_level();
        eat(Tok::RParen, "')'");
        eat(Tok::Arrow, "'->' after a parameter binder");
        for (size_t k = 0; k < names.size(); k++) {
          pe.ext.push_back(shift(dom, 0, static_cast<int>(k)));
          push(names[k]);
          pushed++;
        }
        continue;
      }
      TermPtr s = parse_sum();
      if (accept(Tok::Arrow)) {
        pe.ext.push_back(s);
        push("_");
        pushed++;
        continue;
      }
      pe.type = s;
      break;
    }
    pop(pushed);
  }

  std::vector<TeleEntry> parse_telescope() {
    std::vector<TeleEntry> tele;
    while (at(Tok::LParen)) {
      eat(Tok::LParen, "'('");
      TeleEntry e;
      e.name = eat_name("an argument name");
      eat(Tok::Colon, "':'");
      TermPtr ty = parse_expr_level();
      eat(Tok::RParen, "')'");
      // the carrier sits right below the telescope entries parsed so far
      int carrier = static_cast<int>(tele.size());
      if (alpha_equal(ty, var(carrier))) {
        e.recursive = true;
        e.type = nullptr;
      } else if (ty->tag == Tag::Pi &&
                 alpha_equal(ty->kids[1], var(carrier + 1)) &&
                 !occurs_free(ty->kids[0], carrier)) {
        e.recursive = true;
        e.type = ty->kids[0];
      } else {
        e.recursive = false;
        e.type = ty;
      }
      push(e.name);
      tele.push_back(e);
    }
    return tele;
  }

  void parse_cell(Schema& s, CellDim dim) {
    Token name = eat(Tok::Ident, "a cell name");
    if (reserved().count(name.text))
      err_at(name, ErrKind::SyntaxError,
             "'" + name.text + "' is a reserved word");
    if (s.cell_index(name.text) >= 0 || name.text == s.name)
      err_at(name, ErrKind::SyntaxError,
             "the cell name '" + name.text + "' is already in use");
    for (const ParamEntry& pe : s.params)
      if (pe.name == name.text)
        err_at(name, ErrKind::SyntaxError,
               "the cell name '" + name.text + "' shadows a parameter");
    CellSpec c;
    c.name = name.text;
    c.dim = dim;
    c.tele = parse_telescope();
    if (dim == CellDim::Path) {
      eat(Tok::Colon, "':'");
      c.src = parse_expr_level();
      eat(Tok::Eq, "'='");
      c.tgt = parse_expr_level();
    } else if (dim != CellDim::Point) {
      eat(Tok::Colon, "':'");
      if (accept_kw("square")) {
        c.dim = CellDim::SquareBoundary;
        c.bottom = parse_atom();
        c.right = parse_atom();
        c.top = parse_atom();
        c.left = parse_atom();
      } else {
        c.dim = CellDim::Globe2;
        c.lhs = parse_expr_level();
        eat(Tok::Eq, "'='");
        c.rhs = parse_expr_level();
      }
    }
    pop(c.tele.size());
    s.cells.push_back(c);
  }

  void parse_schema_item(Module& m, size_t startTok) {
    Token name = eat(Tok::Ident, "a schema name");
    check_fresh(name);
    parsedSchemas.emplace_back();
    Schema& s = parsedSchemas.back();
    s.name = name.text;
    while (at(Tok::LParen)) {
      eat(Tok::LParen, "'('");
      ParamEntry pe;
      pe.name = eat_name("a parameter name");
      eat(Tok::Colon, "':'");
      parse_param_type(pe);
      eat(Tok::RParen, "')'");
      s.params.push_back(pe);
      push(pe.name);
    }
    eat(Tok::LBrace, "'{'");
    push(s.name);  // the carrier goes by the schema's own name
    self = &s;
    while (!at(Tok::RBrace)) {
      if (accept_kw("point")) {
        parse_cell(s, CellDim::Point);
      } else if (accept_kw("path")) {
        parse_cell(s, CellDim::Path);
      } else if (accept_kw("cell")) {
        parse_cell(s, CellDim::Globe2);
      } else {
        err("expected 'point', 'path', 'cell', or '}'");
      }
    }
    self = nullptr;
    eat(Tok::RBrace, "'}'");
    pop(s.params.size() + 1);
    schemaTab[s.name] = &s;
    itemNames.insert(s.name);

    Item it;
    it.kind = Item::Kind::SchemaDecl;
    it.name = s.name;
    it.schema = s;
    it.span = item_span(startTok);
    m.items.push_back(it);
  }

  SourceSpan item_span(size_t startTok) const {
    const Token& a = toks[startTok];
    const Token& b = toks[pos > startTok ? pos - 1 : startTok];
    return {file, a.line, a.col, b.endLine, b.endCol};
  }

  Module parse_module_body() {
    Module m;
    while (!at(Tok::End)) {
      size_t startTok = pos;
      if (accept_kw("def")) {
        Token name = eat(Tok::Ident, "a definition name");
        check_fresh(name);
        Item it;
        it.kind = Item::Kind::Definition;
        it.name = name.text;
        eat(Tok::Colon, "':'");
        it.type = parse_expr_level();
        eat(Tok::ColonEq, "':='");
        it.body = parse_expr_level();
        it.span = item_span(startTok);
        defBodies[it.name] = it.body;
        itemNames.insert(it.name);
        m.items.push_back(it);
      } else if (accept_kw("schema")) {
        parse_schema_item(m, startTok);
      } else if (accept_kw("eval")) {
        Token name = eat(Tok::Ident, "an eval request name");
        check_fresh(name);
        Item it;
        it.kind = Item::Kind::Eval;
        it.name = name.text;
        allowLits = true;
        it.target = parse_expr_level();
        allowLits = false;
        if (accept_kw("fuel")) {
          Token n = eat(Tok::Number, "a fuel amount");
          it.fuel = std::stoi(n.text);
        }
        it.span = item_span(startTok);
        itemNames.insert(it.name);
        m.items.push_back(it);
      } else {
        err("expected 'def', 'schema', or 'eval'");
      }
    }
    return m;
  }
};

Parser make_parser(const std::string& text, const std::string& file,
                   const Registry* preloaded) {
  Lexer lx(text, file);
  Parser p;
  p.toks = lx.run();
  p.file = file;
  if (preloaded)
    for (const auto& [name, schema] : preloaded->schemas)
      p.schemaTab[name] = &schema;
  return p;
}

// ---- pretty printing ---------------------------------------------------------

enum Prec { ARROW = 0, SUM = 1, PROD = 2, APP = 3, ATOM = 4 };

struct Printer {
  const Registry* reg;
  std::vector<std::string> names;
  std::set<std::string> used;
  int counter = 0;

  std::string fresh() {
    for (;;) {
      std::string n = "x" + std::to_string(counter++);
      if (!used.count(n)) {
        used.insert(n);
        return n;
      }
    }
  }

  std::string cell_name(const TermPtr& t) {
    if (reg) {
      const Schema* s = reg->find(t->head);
      if (s && t->index >= 0 &&
          t->index < static_cast<int>(s->cells.size()))
        return s->cells[t->index].name;
    }
    // unresolvable; emit something that will not silently reparse
    return "?cell" + std::to_string(t->index);
  }

  std::string wrap(int have, int want, const std::string& s) {
    return have < want ? "(" + s + ")" : s;
  }

  std::string binders(int n, std::vector<std::string>& out) {
    std::string text;
    for (int k = 0; k < n; k++) {
      std::string nm = fresh();
      out.push_back(nm);
      if (k) text += " ";
      text += nm;
    }
    return text;
  }

  std::string bracket(const TermPtr& body, int n) {
    std::vector<std::string> ns;
    std::string head = binders(n, ns);
    for (const auto& nm : ns) names.push_back(nm);
    std::string s = "[" + head + ". " + go(body, ARROW) + "]";
    names.resize(names.size() - n);
    return s;
  }

  std::string bound_atom(const BoundTerm& b) {
    if (b.binders == 0) return go(b.body, ATOM);
    std::vector<std::string> ns;
    std::string head = binders(b.binders, ns);
    for (const auto& nm : ns) names.push_back(nm);
    std::string s = "(" + head + ". " + go(b.body, ARROW) + ")";
    names.resize(names.size() - b.binders);
    return s;
  }

  std::string go(const TermPtr& t, int prec) {
    switch (t->tag) {
      case Tag::Var: {
        int i = t->index;
        if (i < 0 || i >= static_cast<int>(names.size()))
          return "?v" + std::to_string(i);
        return names[names.size() - 1 - i];
      }
      case Tag::Pi: {
        std::string s;
        if (occurs_free(t->kids[1], 0)) {
          std::string nm = fresh();
          std::string dom = go(t->kids[0], ARROW);
          names.push_back(nm);
          s = "(" + nm + " : " + dom + ") -> " + go(t->kids[1], ARROW);
        } else {
          std::string dom = go(t->kids[0], SUM);
          names.push_back(fresh());
          s = dom + " -> " + go(t->kids[1], ARROW);
        }
        names.pop_back();
        return wrap(ARROW, prec, s);
      }
      case Tag::Sigma: {
        std::string s;
        if (occurs_free(t->kids[1], 0)) {
          std::string nm = fresh();
          std::string dom = go(t->kids[0], ARROW);
          names.push_back(nm);
          s = "(" + nm + " : " + dom + ") * " + go(t->kids[1], ARROW);
          names.pop_back();
          return wrap(ARROW, prec, s);
        }
        std::string dom = go(t->kids[0], PROD);
        names.push_back(fresh());
        s = dom + " * " + go(t->kids[1], APP);
        names.pop_back();
        return wrap(PROD, prec, s);
      }
      case Tag::Lam: {
        std::vector<std::string> ns;
        TermPtr body = t;
        while (body->tag == Tag::Lam) {
          ns.push_back(fresh());
          names.push_back(ns.back());
          body = body->kids[0];
        }
        std::string s = "fun";
        for (const auto& nm : ns) s += " " + nm;
        s += " => " + go(body, ARROW);
        names.resize(names.size() - ns.size());
        return wrap(ARROW, prec, s);
      }
      case Tag::App:
        return wrap(APP, prec,
                    go(t->kids[0], APP) + " " + go(t->kids[1], ATOM));
      case Tag::Pair:
        return "(" + go(t->kids[0], ARROW) + ", " + go(t->kids[1], ARROW) +
               ")";
      case Tag::Proj1:
        return wrap(APP, prec, "fst " + go(t->kids[0], ATOM));
      case Tag::Proj2:
        return wrap(APP, prec, "snd " + go(t->kids[0], ATOM));
      case Tag::Unit:
        return "Unit";
      case Tag::Star:
        return "star";
      case Tag::Sum:
        return wrap(SUM, prec,
                    go(t->kids[0], SUM) + " + " + go(t->kids[1], PROD));
      case Tag::Inl:
        return wrap(APP, prec, "inl " + go(t->kids[0], ATOM));
      case Tag::Inr:
        return wrap(APP, prec, "inr " + go(t->kids[0], ATOM));
      case Tag::SumElim:
        return wrap(APP, prec,
                    "case" + bracket(t->kids[0], 1) + " " +
                        go(t->kids[3], ATOM) + " " +
                        bound_atom({t->kids[1], 1}) + " " +
                        bound_atom({t->kids[2], 1}));
      case Tag::Id:
        return wrap(APP, prec, "Id " + go(t->kids[0], ATOM) + " " +
                                   go(t->kids[1], ATOM) + " " +
                                   go(t->kids[2], ATOM));
      case Tag::Refl:
        return wrap(APP, prec, "refl " + go(t->kids[0], ATOM));
      case Tag::J:
        return wrap(APP, prec,
                    "J" + bracket(t->kids[0], 3) + " " +
                        bound_atom({t->kids[1], 1}) + " " +
                        go(t->kids[2], ATOM) + " " + go(t->kids[3], ATOM) +
                        " " + go(t->kids[4], ATOM));
      case Tag::IdOver:
        return wrap(APP, prec,
                    "IdOver" + bracket(t->kids[0], 1) + " " +
                        go(t->kids[1], ATOM) + " " + go(t->kids[2], ATOM) +
                        " " + go(t->kids[3], ATOM));
      case Tag::ReflOver:
        return wrap(APP, prec, "refl' " + go(t->kids[0], ATOM));
      case Tag::JOver:
        return wrap(APP, prec,
                    "J'" + bracket(t->kids[0], 6) + " " +
                        bound_atom({t->kids[1], 2}) + " " +
                        go(t->kids[2], ATOM) + " " + go(t->kids[3], ATOM) +
                        " " + go(t->kids[4], ATOM) + " " +
                        go(t->kids[5], ATOM) + " " + go(t->kids[6], ATOM) +
                        " " + go(t->kids[7], ATOM));
      case Tag::Ap:
        return wrap(APP, prec,
                    "ap" + bracket(t->kids[0], 1) + " " +
                        go(t->kids[1], ATOM) + " " + go(t->kids[2], ATOM) +
                        " " + go(t->kids[3], ATOM));
      case Tag::Nat:
        return "Nat";
      case Tag::Zero:
        return "zero";
      case Tag::Succ:
        return wrap(APP, prec, "succ " + go(t->kids[0], ATOM));
      case Tag::NatElim:
        return wrap(APP, prec,
                    "natrec" + bracket(t->kids[0], 1) + " " +
                        go(t->kids[1], ATOM) + " " +
                        bound_atom({t->kids[2], 2}) + " " +
                        go(t->kids[3], ATOM));
      case Tag::SchemaType: {
        std::string s = t->head;
        for (const TermPtr& k : t->kids) s += " " + go(k, ATOM);
        return t->kids.empty() ? s : wrap(APP, prec, s);
      }
      case Tag::SchemaCtor: {
        std::string s = t->head + "." + cell_name(t);
        for (const TermPtr& k : t->kids) s += " " + go(k, ATOM);
        return t->kids.empty() ? s : wrap(APP, prec, s);
      }
      case Tag::SchemaElim: {
        std::string s = t->head + ".elim";
        std::vector<TermPtr> ps = schema_params(t);
        for (const TermPtr& k : ps) s += " " + go(k, ATOM);
        s += " " + bracket(elim_motive(t), 1);
        for (const BoundTerm& b : elim_methods(t)) s += " " + bound_atom(b);
        s += " " + go(elim_scrut(t), ATOM);
        return wrap(APP, prec, s);
      }
      case Tag::SchemaPathComp: {
        std::string s = t->head + "." + cell_name(t) + ".comp";
        std::vector<TermPtr> ps = schema_params(t);
        for (const TermPtr& k : ps) s += " " + go(k, ATOM);
        s += " " + bracket(elim_motive(t), 1);
        for (const BoundTerm& b : elim_methods(t)) s += " " + bound_atom(b);
        for (const TermPtr& a : ctor_args(t)) s += " " + go(a, ATOM);
        return wrap(APP, prec, s);
      }
      case Tag::FinSetLit: {
        std::string s = "finset {";
        for (size_t k = 0; k < t->atoms.size(); k++) {
          if (k) s += ", ";
          s += t->atoms[k];
        }
        return s + "}";
      }
      case Tag::FinMapLit: {
        std::string s = "finmap {";
        for (size_t k = 0; k < t->table.size(); k++) {
          if (k) s += ", ";
          const TermPtr& v = t->table[k].second;
          s += t->table[k].first + " |-> " +
               (v->tag == Tag::ElemLit ? v->head : go(v, ATOM));
        }
        return s + "}";
      }
      case Tag::ElemLit:
        return wrap(APP, prec, "elem " + t->head);
    }
    return "?";
  }
};

}  // namespace

Module parse_module(const std::string& text, const std::string& file,
                    const Registry* preloaded) {
  Parser p = make_parser(text, file, preloaded);
  return p.parse_module_body();
}

TermPtr parse_expr(const std::string& text,
                   const std::vector<std::string>& names,
                   const Registry* preloaded) {
  Parser p = make_parser(text, "<expr>", preloaded);
  p.bound = names;
  p.allowLits = true;
  TermPtr t = p.parse_expr_level();
  if (!p.at(Tok::End)) p.err("unexpected trailing input");
  return t;
}

std::string pretty_print(const TermPtr& t,
                         const std::vector<std::string>& names,
                         const Registry* reg) {
  Printer pr;
  pr.reg = reg;
  pr.names = names;
  pr.used.insert(names.begin(), names.end());
  return pr.go(t, ARROW);
}

}  // namespace hitt
