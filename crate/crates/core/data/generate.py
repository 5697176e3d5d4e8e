"""Regenerates the bundled fixture files in this directory."""
import json, itertools, os, random
from xml.sax.saxutils import escape as esc

ATOM, POW, FUNC, TIMES, NEG, PLUS, REL = 100, 90, 80, 70, 60, 50, 10
IT = "⁢"; AF = "⁡"; DD = "ⅆ"

def tag(t, s): return f"<{t}>{esc(s)}</{t}>"
def mrow(items): return items[0] if len(items) == 1 else "<mrow>" + "".join(items) + "</mrow>"
def apply(head, *args): return "<apply>" + head + "".join(a for a in args) + "</apply>"
def paren(e): return mrow([tag("mo", "("), e.p(), tag("mo", ")")])

class E:
    prec = ATOM
    def p(self): return mrow(self.row())
    def atom(self): return self.p() if self.prec >= ATOM else paren(self)
    def child(self, prec): return [paren(self)] if self.prec < prec else self.row()

class Var(E):
    def __init__(s, n): s.n = n
    def row(s): return [tag("mi", s.n)]
    def c(s): return tag("ci", s.n)
class Num(E):
    def __init__(s, n): s.n = str(n)
    def row(s): return [tag("mn", s.n)]
    def c(s): return tag("cn", s.n)
class Sym(E):
    def __init__(s, p, c): s.pt, s.ct = p, c
    def row(s): return [tag("mi", s.pt)]
    def c(s): return f"<{s.ct}/>"
PI = Sym("π", "pi"); INF = Sym("∞", "infinity"); EE = Sym("ⅇ", "exponentiale")
NAT = Sym("ℕ", "naturalnumbers"); INTS = Sym("ℤ", "integers")

OPS = {"+": ("plus", PLUS), "-": ("minus", PLUS), IT: ("times", TIMES), "=": ("eq", REL),
       "∈": ("in", REL), "→": ("tendsto", REL)}
class Nary(E):
    def __init__(s, op, *args): s.op, s.args = op, args; s.prec = OPS[op][1]
    def row(s):
        out = []
        for i, a in enumerate(s.args):
            if i: out.append(tag("mo", s.op))
            need = s.prec + (1 if (i > 0 and s.op == "-") else 0)
            out += a.child(need)
        return out
    def c(s): return apply(f"<{OPS[s.op][0]}/>", *[a.c() for a in s.args])
def add(*a): return Nary("+", *a)
def sub(*a): return Nary("-", *a)
def mul(*a): return Nary(IT, *a)

class Neg(E):
    prec = NEG
    def __init__(s, a): s.a = a
    def row(s): return [tag("mo", "-")] + s.a.child(NEG + 1)
    def c(s): return apply("<minus/>", s.a.c())
class Pow(E):
    prec = POW
    def __init__(s, a, b): s.a, s.b = a, b
    def row(s): return [f"<msup>{s.a.atom()}{s.b.p()}</msup>"]
    def c(s): return apply("<power/>", s.a.c(), s.b.c())
class Frac(E):
    def __init__(s, a, b): s.a, s.b = a, b
    def row(s): return [f"<mfrac>{s.a.p()}{s.b.p()}</mfrac>"]
    def c(s): return apply("<divide/>", s.a.c(), s.b.c())
class Sqrt(E):
    def __init__(s, a): s.a = a
    def row(s): return [f"<msqrt>{s.a.p()}</msqrt>"]
    def c(s): return apply("<root/>", s.a.c())
class Fn(E):
    prec = FUNC
    def __init__(s, name, a, parens=True, af=True): s.name, s.a, s.parens, s.af = name, a, parens, af
    def row(s):
        arg = paren(s.a) if s.parens else s.a.p()
        return [tag("mi", s.name)] + ([tag("mo", AF)] if s.af else []) + [arg]
    def c(s): return apply(f"<{s.name}/>", s.a.c())
class SinInv(E):
    prec = FUNC
    def __init__(s, a): s.a = a
    def row(s): return ["<msup><mi>sin</mi><mrow><mo>-</mo><mn>1</mn></mrow></msup>", tag("mo", AF), paren(s.a)]
    def c(s): return apply("<arcsin/>", s.a.c())
class Int(E):
    prec = FUNC
    def __init__(s, body, var, lo=None, hi=None): s.body, s.var, s.lo, s.hi = body, var, lo, hi
    def row(s):
        if s.lo is None: head = tag("mo", "∫")
        else: head = f"<msubsup><mo>∫</mo>{s.lo.p()}{s.hi.p()}</msubsup>"
        return [head] + s.body.child(TIMES) + [mrow([tag("mo", DD), tag("mi", s.var)])]
    def c(s):
        parts = [f"<bvar><ci>{s.var}</ci></bvar>"]
        if s.lo is not None:
            parts += [f"<lowlimit>{s.lo.c()}</lowlimit>", f"<uplimit>{s.hi.c()}</uplimit>"]
        return apply("<int/>", *parts, s.body.c())
class Lim(E):
    prec = FUNC
    def __init__(s, var, to, body): s.var, s.to, s.body = var, to, body
    def row(s):
        cond = mrow([tag("mi", s.var), tag("mo", "→")] + s.to.row())
        return [f"<munder><mo>lim</mo>{cond}</munder>"] + s.body.child(TIMES)
    def c(s):
        return apply("<limit/>", f"<bvar><ci>{s.var}</ci></bvar>",
                     f"<condition>{apply('<tendsto/>', tag('ci', s.var), s.to.c())}</condition>", s.body.c())
class Special(E):
    """Named special function: head presentation given, content csymbol."""
    prec = FUNC
    def __init__(s, phead, csym, hargs, args): s.phead, s.csym, s.hargs, s.args = phead, csym, hargs, args
    def row(s):
        r = [s.phead]
        if s.args:
            inner = []
            for i, a in enumerate(s.args):
                if i: inner.append(tag("mo", ","))
                inner += a.row()
            r += [tag("mo", AF), mrow([tag("mo", "(")] + [mrow(inner)] + [tag("mo", ")")])]
        return r
    def c(s): return apply(tag("csymbol", s.csym), *[a.c() for a in s.hargs + s.args])
class Raw(E):
    def __init__(s, prow, c, prec=ATOM): s.prow, s.cc, s.prec = prow, c, prec
    def row(s): return s.prow
    def c(s): return s.cc

def math(e): return "<math>" + e.p() + "</math>"
def cmath(e): return "<math>" + e.c() + "</math>"

x, y, z, a, b, d, k, n, t, e = map(Var, "xyzabdknte")
nu, mu, al = Var("ν"), Var("μ"), Var("α")

def Hn(idx, arg): return Special(f"<msub><mi>H</mi>{idx.p()}</msub>", "HermiteH", [idx], [arg])
def Ln(idx, arg): return Special(f"<msub><mi>L</mi>{idx.p()}</msub>", "LaguerreL", [idx], [arg])
def Psi(order, arg):
    if order is None: return Special("<mi>ψ</mi>", "PolyGamma", [], [arg])
    return Special(f"<msup><mi>Ψ</mi>{order.p()}</msup>", "PolyGamma", [order], [arg])
def Gamma(arg): return Special("<mi>Γ</mi>", "Gamma", [], [arg])
def Lucas(idx): return Raw([f"<msub><mi>L</mi>{idx.p()}</msub>"], apply(tag("csymbol", "LucasL"), idx.c()))
def Fib(idx): return Raw([f"<msub><mi>F</mi>{idx.p()}</msub>"], apply(tag("csymbol", "Fibonacci"), idx.c()))
def Residue(f, var, at):
    prow = [f"<msub><mi>ℛ</mi>{var.p()}</msub>", tag("mo", IT)] + f.row() + [tag("mo", ",")] + at.row()
    return Raw(prow, apply(tag("csymbol", "Residue"), f.c(), f"<list>{var.c()}{at.c()}</list>"))
CINF = Raw(["<mover><mi>∞</mi><mo>~</mo></mover>"], tag("csymbol", "ComplexInfinity"))
def Branch(var, fn):
    prow = ["<mi>ℬ</mi>", tag("mo", IT), f"<msub><mi>\U0001d4ab</mi>{var.p()}</msub>", tag("mo", IT)] + fn.row()
    return Raw(prow, apply(tag("csymbol", "BranchPoints"), fn.c(), var.c()))
def LegB(nu_, mu_, arg, head="\U0001d505", csym="LegendreQ"):
    return Special(f"<msubsup><mi>{head}</mi>{nu_.p()}{mu_.p()}</msubsup>", csym, [nu_, mu_], [arg])
def cosh(v): return Fn("cosh", v, parens=False)
def sinh(v): return Fn("sinh", v, parens=False)

QUERIES = [
    ("q1", Int(x, "x", Num(0), INF)),
    ("q2", add(Pow(x, Num(2)), Pow(y, Num(2)))),
    ("q3", Int(Pow(EE, Neg(Pow(x, Num(2)))), "x", Num(0), INF)),
    ("q4", Fn("arcsin", x)),
    ("q5", Pow(k, Num(2))),
    ("q6", Frac(add(cosh(mul(e, z)), sinh(mul(e, z))), e)),
    ("q7", Residue(Psi(nu, z), z, CINF)),
    ("q8", Int(Frac(Pow(a, add(d, mul(b, z))), z), "z")),
    ("q9", Lim("ν", INF, Frac(Lucas(add(al, nu)), Lucas(nu)))),
    ("q10", Branch(z, LegB(nu, mu, z))),
    ("q11", Nary("∈", nu, NAT)),
    ("q12", Psi(nu, z)),
    ("q13", Fn("log", add(z, Num(1)))),
    ("q14", Hn(n, z)),
    ("q15", mul(Frac(Num(1), PI), Int(sub(Fn("cos", mul(t, n), parens=False, af=False), mul(z, Fn("sin", t, parens=False, af=False))), "t", Num(0), PI))),
    ("a1", SinInv(x)),
]
NOTES = {"q4": "ambiguity: arcsin written by name", "a1": "ambiguity: same function written as sin to the power -1"}

# (key, expr, {query: grade})
DOCS = [
    ("int-x", Int(x, "x", Num(0), INF), {"q1": 1}),
    ("int-y", Int(y, "y", Num(0), INF), {"q1": 1}),
    ("int-x-01", Int(x, "x", Num(0), Num(1)), {"q1": 0.5}),
    ("int-x2", Int(Pow(x, Num(2)), "x", Num(0), INF), {"q1": 0.5}),
    ("bare-x", x, {"q1": 0}),
    ("x2y2", add(Pow(x, Num(2)), Pow(y, Num(2))), {"q2": 1}),
    ("a2b2", add(Pow(a, Num(2)), Pow(b, Num(2))), {"q2": 1}),
    ("x2-y2", sub(Pow(x, Num(2)), Pow(y, Num(2))), {"q2": 0.5}),
    ("x2y2z2", add(Pow(x, Num(2)), Pow(y, Num(2)), Pow(z, Num(2))), {"q2": 0.5}),
    ("xy-sq", Pow(add(x, y), Num(2)), {"q2": 0}),
    ("gauss", Int(Pow(EE, Neg(Pow(x, Num(2)))), "x", Num(0), INF), {"q3": 1}),
    ("gauss-full", Int(Pow(EE, Neg(Pow(x, Num(2)))), "x", Neg(INF), INF), {"q3": 1}),
    ("gauss-fn", Pow(EE, Neg(Pow(x, Num(2)))), {"q3": 0.5}),
    ("exp-int", Int(Pow(EE, Neg(x)), "x", Num(0), INF), {"q3": 0.5, "q1": 0}),
    ("arcsin-x", Fn("arcsin", x), {"q4": 1, "a1": 1}),
    ("sininv-x", SinInv(x), {"q4": 1, "a1": 1}),
    ("arcsin-y", Fn("arcsin", y), {"q4": 0.5, "a1": 0.5}),
    ("sininv-z", SinInv(z), {"q4": 0.5, "a1": 0.5}),
    ("arcsin-x2", Fn("arcsin", Pow(x, Num(2))), {"q4": 0.5, "a1": 0.5}),
    ("arccos-x", Fn("arccos", x), {"q4": 0, "a1": 0}),
    ("arctan-x", Fn("arctan", x), {"q4": 0, "a1": 0}),
    ("sin-x", Fn("sin", x), {"q4": 0, "a1": 0}),
    ("sin-sq", Pow(Fn("sin", x), Num(2)), {"q4": 0, "a1": 0}),
    ("k2", Pow(k, Num(2)), {"q5": 1}),
    ("k3", Pow(k, Num(3)), {"q5": 0.5}),
    ("n2", Pow(n, Num(2)), {"q5": 0.5}),
    ("bare-k", k, {"q5": 0}),
    ("cosh-sinh", Frac(add(cosh(mul(e, z)), sinh(mul(e, z))), e), {"q6": 1}),
    ("cosh-sinh-num", add(cosh(mul(e, z)), sinh(mul(e, z))), {"q6": 0.5}),
    ("cosh-sinh-z", add(cosh(z), sinh(z)), {"q6": 0.5}),
    ("cosh-minus", Frac(sub(cosh(mul(e, z)), sinh(mul(e, z))), e), {"q6": 0.5}),
    ("res-psi-nu", Residue(Psi(nu, z), z, CINF), {"q7": 1}),
    ("res-psi", Residue(Psi(None, z), z, CINF), {"q7": 0.5}),
    ("res-gamma", Residue(Gamma(z), z, Num(0)), {"q7": 0}),
    ("int-adbz", Int(Frac(Pow(a, add(d, mul(b, z))), z), "z"), {"q8": 1}),
    ("int-abz", Int(Frac(Pow(a, mul(b, z)), z), "z"), {"q8": 0.5}),
    ("int-az", Int(Pow(a, z), "z"), {"q8": 0}),
    ("frac-adbz", Frac(Pow(a, add(d, mul(b, z))), z), {"q8": 0.5}),
    ("lim-lucas", Lim("ν", INF, Frac(Lucas(add(al, nu)), Lucas(nu))), {"q9": 1}),
    ("lim-lucas-n", Lim("n", INF, Frac(Lucas(add(n, Num(1))), Lucas(n))), {"q9": 1}),
    ("lim-fib", Lim("ν", INF, Frac(Fib(add(al, nu)), Fib(nu))), {"q9": 0.5}),
    ("lim-x", Lim("x", INF, Frac(Num(1), x)), {"q9": 0}),
    ("branch-q", Branch(z, LegB(nu, mu, z)), {"q10": 1}),
    ("branch-p", Branch(z, LegB(nu, mu, z, "P", "LegendreP")), {"q10": 0.5}),
    ("leg-q", LegB(nu, mu, z), {"q10": 0.5}),
    ("nu-nat", Nary("∈", nu, NAT), {"q11": 1}),
    ("n-nat", Nary("∈", n, NAT), {"q11": 1}),
    ("nu-int", Nary("∈", nu, INTS), {"q11": 0.5}),
    ("x-eq-y", Nary("=", x, y), {"q11": 0}),
    ("psi-nu", Psi(nu, z), {"q12": 1, "q7": 0}),
    ("psi-mu", Psi(mu, z), {"q12": 1}),
    ("psi", Psi(None, z), {"q12": 0.5}),
    ("psi-nu-z1", Psi(nu, add(z, Num(1))), {"q12": 0.5}),
    ("log-z1", Fn("log", add(z, Num(1))), {"q13": 1}),
    ("log-1z", Fn("log", add(Num(1), z)), {"q13": 1}),
    ("log-z", Fn("log", z), {"q13": 0.5}),
    ("log-diff", sub(Fn("log", add(z, Num(1))), Fn("log", z)), {"q13": 0.5}),
    ("exp-z1", Fn("exp", add(z, Num(1))), {"q13": 0}),
    ("herm-nz", Hn(n, z), {"q14": 1}),
    ("herm-nx", Hn(n, x), {"q14": 1}),
    ("lag-nz", Ln(n, z), {"q14": 0.5}),
    ("herm-n1", Hn(add(n, Num(1)), z), {"q14": 0.5}),
    ("bessel-int", mul(Frac(Num(1), PI), Int(sub(Fn("cos", mul(t, n), parens=False, af=False), mul(z, Fn("sin", t, parens=False, af=False))), "t", Num(0), PI)), {"q15": 1}),
    ("bessel-cos", mul(Frac(Num(1), PI), Int(Fn("cos", sub(mul(t, n), mul(z, Fn("sin", t, parens=False, af=False)))), "t", Num(0), PI)), {"q15": 1}),
    ("cos-int", Int(Fn("cos", mul(t, n), parens=False, af=False), "t", Num(0), PI), {"q15": 0.5}),
    ("inv-pi", Frac(Num(1), PI), {"q15": 0}),
    ("sqrt-x", Sqrt(add(Pow(x, Num(2)), Num(1))), {}),
    ("quad", add(Pow(x, Num(2)), mul(b, x), Num(1)), {}),
]

# parallel corpus: small alphabet, heavy repetition
V = [x, y, z, a, b, n]
N = [Num(1), Num(2), Num(3)]
F = ["sin", "cos", "log", "exp"]
fcycle = itertools.cycle(F)
rng = random.Random(7)
def rv(): return rng.choice(V)
def rn(): return rng.choice(N)
TEMPLATES = [
    lambda: Pow(rv(), rn()),
    lambda: Pow(rv(), rv()),
    lambda: Frac(rv(), rv()),
    lambda: Frac(rn(), rv()),
    lambda: add(rv(), rv()),
    lambda: add(rv(), rn()),
    lambda: sub(rv(), rv()),
    lambda: Fn(next(fcycle), rv()),
    lambda: Fn("arcsin", rv()),
    lambda: SinInv(rv()),
    lambda: (lambda v: Raw([tag("mi", "arcsin"), tag("mo", "("), v.p(), tag("mo", ")")], apply("<arcsin/>", v.c())))(rv()),
    lambda: Sqrt(rv()),
    lambda: mul(rv(), rv()),
    lambda: mul(rn(), rv()),
    lambda: Pow(add(rv(), rv()), rn()),
    lambda: add(rv(), mul(rv(), rv())),
    lambda: Frac(add(rv(), rv()), rv()),
    lambda: add(Pow(rv(), rn()), rv()),
    lambda: Fn(next(fcycle), add(rv(), rn())),
]
pairs, seen = [], set()
while len(pairs) < 90:
    for tpl in TEMPLATES:
        e_ = tpl()
        key = math(e_)
        if key in seen: continue
        seen.add(key)
        pairs.append(e_)
        if len(pairs) >= 90: break

out = os.path.dirname(os.path.abspath(__file__)) + "/"
with open(out + "parallel.jsonl", "w") as f:
    for i, e_ in enumerate(pairs, 1):
        f.write(json.dumps({"id": f"p{i:03d}", "pmathml": math(e_), "cmathml": cmath(e_)}, ensure_ascii=False) + "\n")
with open(out + "queries.jsonl", "w") as f:
    for qid, e_ in QUERIES:
        rec = {"id": qid, "pmathml": math(e_), "cmathml": cmath(e_)}
        if qid in NOTES: rec["note"] = NOTES[qid]
        f.write(json.dumps(rec, ensure_ascii=False) + "\n")
ids = {}
with open(out + "minicorpus.jsonl", "w") as f:
    for i, (key, e_, _) in enumerate(DOCS, 1):
        ids[key] = f"d{i:03d}"
        f.write(json.dumps({"id": ids[key], "pmathml": math(e_), "cmathml": cmath(e_), "uri": f"fixture:{key}"}, ensure_ascii=False) + "\n")
with open(out + "qrels.tsv", "w") as f:
    f.write("# query_id\tdoc_id\tgrade\n")
    rows = sorted((q, ids[key], g) for key, _, js in DOCS for q, g in js.items())
    for q, did, g in rows:
        f.write(f"{q}\t{did}\t{g if g != 1 else 1}\n".replace("\t0.0\n", "\t0\n"))
print(len(pairs), len(DOCS))
