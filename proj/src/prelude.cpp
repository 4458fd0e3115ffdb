#include "hitt/prelude.hpp"

#include "hitt/parser.hpp"

namespace hitt {

const std::string& prelude_text() {
  static const std::string text = R"PRELUDE(-- builtin schema library, loaded ahead of every input file unless
-- --prelude points somewhere else

schema Coprod (A : Type) (B : Type) {
  point in1 (a : A)
  point in2 (b : B)
}

schema NatS {
  point zeroS
  point succS (n : NatS)
}

schema W (A : Type) (B : A -> Type) {
  point sup (a : A) (f : B a -> W)
}

schema Push (A : Type) (B1 : Type) (B2 : Type) (f1 : A -> B1) (f2 : A -> B2) {
  point nu1 (b : B1)
  point nu2 (b : B2)
  path glue (a : A) : nu1 (f1 a) = nu2 (f2 a)
}

schema Circle {
  point base
  path loop : base = base
}

schema Sphere {
  point base2
  cell surf : refl base2 = refl base2
}

schema Torus {
  point baseT
  path lp : baseT = baseT
  path rp : baseT = baseT
  cell sq : square lp rp lp rp
}

schema Trunc (A : Type) {
  point tr (a : A)
  path treq (x : Trunc) (y : Trunc) : x = y
}

schema James (A : Type) (pt : A) {
  point nil
  point cons (a : A) (x : James)
  path shift (x : James) : x = cons pt x
}

schema Loc (S : Type) (T : Type) (h : S -> T) (A : Type) {
  point inc (a : A)
  point ext (g : S -> Loc) (t : T)
  point ext' (g : S -> Loc) (t : T)
  path rtr (g : S -> Loc) (s : S) : ext g (h s) = g s
  path rtr' (g : T -> Loc) (t : T) : ext' (fun s => g (h s)) t = g t
}
)PRELUDE";
  return text;
}

Registry builtin_registry() {
  Registry reg;
  Module m = parse_module(prelude_text(), "<prelude>");
  for (const Item& it : m.items)
    if (it.kind == Item::Kind::SchemaDecl) register_schema(reg, it.schema);
  return reg;
}

}  // namespace hitt
