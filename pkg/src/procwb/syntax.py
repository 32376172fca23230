"""Surface syntax: parsers and printers for the three calculi and for
recursive-function definitions.

ASCII conventions (the paper's overbars and angle brackets are not
ASCII-stable):

* output ``a!b.P`` (pi) / ``a!Q.P`` (higher-order, Q a term),
* input ``a(x).P`` / ``a(X).P``,
* restriction ``(new c d) P``,
* abstraction ``<x,y> P``, application ``P<a,b>``,
* replication ``!a(x).P`` (pi, guarded) and ``!P`` (higher-order),
* computation calculus: ``a!(3,5)``, ``Omega``, ``F[a->b](f)``,
* CCS-style sugar ``a.P`` for an input whose binder is unused,
* ``//`` line comments; a trailing ``.0`` may be dropped.

Prefixes bind tighter than ``|`` and ``.`` is right-associative, so
``a(x).P | Q`` reads as ``(a(x).P) | Q``.

Names starting with the reserved ``#`` prefix are accepted only where bound
(the workbench's own canonical binders round-trip); a free ``#`` name is a
syntax error.
"""

from __future__ import annotations

import re

from . import recfun as rf
from .terms import (
    C_NIL, C_OMEGA, H_NIL, PI_NIL, RESERVED_PREFIX,
    CBox, COut, CPar, CStuck, CTerm, HAbs, HApp, HBang, HIn, HOut, HPar,
    HRes, HVar, HopiTerm, Name, PBangIn, PBangOut, PIn, POut, PPar, PRes,
    PiTerm, Term, const, fresh_pvar, fresh_var, nvar,
)


class ParseError(Exception):
    """Positioned syntax diagnostic."""

    def __init__(self, message: str, line: int, col: int, expected=None):
        self.message = message
        self.line = line
        self.col = col
        self.expected = tuple(expected or ())
        where = f"{line}:{col}"
        exp = f" (expected {', '.join(self.expected)})" if self.expected else ""
        super().__init__(f"{where}: {message}{exp}")


_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>//[^\n]*)
  | (?P<num>\d+)
  | (?P<ident>\#?[A-Za-z_][A-Za-z0-9_']*|\#\d+[A-Za-z0-9_']*)
  | (?P<arrow>->)
  | (?P<punct>[()<>,.|!=\[\]])
""", re.VERBOSE)


def tokenize(text: str):
    toks = []
    line, linestart = 1, 0
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}",
                             line, pos - linestart + 1)
        kind = m.lastgroup
        val = m.group()
        if kind == "ws":
            line += val.count("\n")
            if "\n" in val:
                linestart = m.start() + val.rindex("\n") + 1
        elif kind != "comment":
            toks.append((kind, val, line, m.start() - linestart + 1))
        pos = m.end()
    toks.append(("eof", "", line, len(text) - linestart + 1))
    return toks


class _P:
    """Token-stream cursor shared by the four grammars."""

    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def next(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def at(self, val):
        k, v, _, _ = self.peek()
        return v == val and k in ("punct", "arrow")

    def at_ident(self, val=None):
        k, v, _, _ = self.peek()
        return k == "ident" and (val is None or v == val)

    def expect(self, val):
        k, v, ln, col = self.peek()
        if (k in ("punct", "arrow") and v == val) or (k == "ident" and v == val):
            self.i += 1
            return v
        raise ParseError(f"found {v!r}" if v else "found end of input",
                         ln, col, expected=[repr(val)])

    def err(self, msg, expected=None):
        _, v, ln, col = self.peek()
        raise ParseError(msg, ln, col, expected=expected)

    def ident(self, what="identifier"):
        k, v, ln, col = self.peek()
        if k != "ident":
            raise ParseError(f"found {v!r}" if v else "found end of input",
                             ln, col, expected=[what])
        self.i += 1
        return v

    def eof(self):
        k, v, ln, col = self.peek()
        if k != "eof":
            raise ParseError(f"trailing input {v!r}", ln, col)


def _check_reserved(p: _P, ident: str, bound_env) -> None:
    if ident.startswith(RESERVED_PREFIX) and ident not in bound_env:
        p.err(f"name {ident!r} uses the reserved '#' prefix and is not bound here")


# ---------------------------------------------------------------------------
# pi


def parse_pi(text: str) -> PiTerm:
    p = _P(text)
    t = _pi_par(p, {})
    p.eof()
    return t


def _pi_par(p, env):
    t = _pi_unit(p, env)
    while p.at("|"):
        p.next()
        t = PPar(t, _pi_unit(p, env))
    return t


def _pi_name(p, env) -> Name:
    ln, col = p.peek()[2], p.peek()[3]
    ident = p.ident("name")
    if ident in ("new", "Omega"):
        raise ParseError(f"{ident!r} is a keyword", ln, col)
    _check_reserved(p, ident, env)
    return env.get(ident, const(ident))


def _pi_unit(p, env):
    if p.at_ident("0") or (p.peek()[0] == "num" and p.peek()[1] == "0"):
        p.next()
        return PI_NIL
    if p.at("("):
        # grouping or restriction
        if p.toks[p.i + 1][0] == "ident" and p.toks[p.i + 1][1] == "new":
            p.next()
            p.next()
            binders = []
            while not p.at(")"):
                nm = p.ident("name")
                if nm in ("new",):
                    p.err("bad binder")
                binders.append(nm)
            p.expect(")")
            env2 = dict(env)
            names = []
            for b in binders:
                n = const(b)
                env2[b] = n
                names.append(n)
            body = _pi_unit(p, env2)
            for n in reversed(names):
                body = PRes(n, body)
            return body
        p.next()
        t = _pi_par(p, env)
        p.expect(")")
        return t
    if p.at("!"):
        p.next()
        t = _pi_unit(p, env)
        if isinstance(t, PIn):
            return PBangIn(t.subj, t.var, t.body)
        if isinstance(t, POut):
            return PBangOut(t.subj, t.obj, t.body)
        p.err("replication in pi must guard an input or output prefix")
    if p.at_ident():
        subj = _pi_name(p, env)
        if p.at("("):
            p.next()
            ln, col = p.peek()[2], p.peek()[3]
            b = p.ident("binder")
            p.expect(")")
            v = nvar(b)
            env2 = dict(env)
            env2[b] = v
            body = _pi_cont(p, env2)
            return PIn(subj, v, body)
        if p.at("!"):
            p.next()
            obj = _pi_name(p, env)
            body = _pi_cont(p, env)
            return POut(subj, obj, body)
        # CCS-style input with unused binder
        body = _pi_cont(p, env)
        return PIn(subj, fresh_var("w"), body)
    p.err("expected a process", expected=["0", "(", "!", "name"])


def _pi_cont(p, env):
    if p.at("."):
        p.next()
        return _pi_unit(p, env)
    return PI_NIL


# ---------------------------------------------------------------------------
# higher-order pi


def parse_hopi(text: str) -> HopiTerm:
    p = _P(text)
    t = _h_par(p, {})
    p.eof()
    return t


def _h_par(p, env):
    t = _h_unit(p, env)
    while p.at("|"):
        p.next()
        t = HPar(t, _h_unit(p, env))
    return t


def _h_name(p, env) -> Name:
    ln, col = p.peek()[2], p.peek()[3]
    ident = p.ident("name")
    if ident in ("new", "Omega"):
        raise ParseError(f"{ident!r} is a keyword", ln, col)
    _check_reserved(p, ident, env)
    got = env.get(("n", ident))
    return got if got is not None else const(ident)


def _h_app_postfix(p, env, t):
    while p.at("<"):
        p.next()
        args = [_h_name(p, env)]
        while p.at(","):
            p.next()
            args.append(_h_name(p, env))
        p.expect(">")
        t = HApp(t, tuple(args))
    return t


def _h_unit(p, env):
    if p.at_ident("0") or (p.peek()[0] == "num" and p.peek()[1] == "0"):
        p.next()
        return H_NIL
    if p.at("("):
        if p.toks[p.i + 1][0] == "ident" and p.toks[p.i + 1][1] == "new":
            p.next()
            p.next()
            binders = []
            while not p.at(")"):
                binders.append(p.ident("name"))
            p.expect(")")
            env2 = dict(env)
            names = []
            for b in binders:
                n = const(b)
                env2[("n", b)] = n
                names.append(n)
            body = _h_unit(p, env2)
            for n in reversed(names):
                body = HRes(n, body)
            return body
        p.next()
        t = _h_par(p, env)
        p.expect(")")
        return _h_app_postfix(p, env, t)
    if p.at("!"):
        p.next()
        return HBang(_h_unit(p, env))
    if p.at("<"):
        p.next()
        params = []
        env2 = dict(env)
        while True:
            b = p.ident("parameter")
            v = nvar(b)
            params.append(v)
            env2[("n", b)] = v
            if p.at(","):
                p.next()
                continue
            break
        p.expect(">")
        body = _h_unit(p, env2)
        return HAbs(tuple(params), body)
    if p.at_ident():
        ln, col = p.peek()[2], p.peek()[3]
        ident = p.peek()[1]
        nxt = p.toks[p.i + 1]
        if nxt[0] == "punct" and nxt[1] == "(":
            subj = _h_name(p, env)
            p.next()
            pv = p.ident("process variable")
            p.expect(")")
            env2 = dict(env)
            env2[("p", pv)] = pv
            body = _h_cont(p, env2)
            return HIn(subj, pv, body)
        if nxt[0] == "punct" and nxt[1] == "!":
            subj = _h_name(p, env)
            p.next()
            payload = _h_payload(p, env)
            body = _h_cont(p, env)
            return HOut(subj, payload, body)
        if nxt[0] == "punct" and nxt[1] == ".":
            subj = _h_name(p, env)
            body = _h_cont(p, env)
            return HIn(subj, fresh_pvar("W"), body)
        # bare identifier: process variable reference (may be applied)
        p.next()
        if ident.startswith(RESERVED_PREFIX) and ("p", ident) not in env:
            raise ParseError(
                f"process variable {ident!r} uses the reserved '#' prefix and is not bound here",
                ln, col)
        return _h_app_postfix(p, env, HVar(ident))
    p.err("expected a process", expected=["0", "(", "!", "<", "name"])


def _h_payload(p, env):
    if p.at_ident("0") or (p.peek()[0] == "num" and p.peek()[1] == "0"):
        p.next()
        return H_NIL
    if p.at("("):
        p.next()
        t = _h_par(p, env)
        p.expect(")")
        return _h_app_postfix(p, env, t)
    if p.at_ident():
        ln, col = p.peek()[2], p.peek()[3]
        ident = p.ident("payload")
        if ident.startswith(RESERVED_PREFIX) and ("p", ident) not in env:
            raise ParseError(
                f"process variable {ident!r} uses the reserved '#' prefix and is not bound here",
                ln, col)
        return _h_app_postfix(p, env, HVar(ident))
    p.err("expected a payload", expected=["0", "(", "process variable"])


def _h_cont(p, env):
    if p.at("."):
        p.next()
        return _h_unit(p, env)
    return H_NIL


# ---------------------------------------------------------------------------
# computation calculus


def parse_c(text: str, registry: dict | None = None) -> CTerm:
    """Parse a computation-calculus term; function boxes resolve by name
    against ``registry`` (name -> RecFun)."""
    p = _P(text)
    t = _c_par(p, registry or {})
    p.eof()
    return t


def _c_par(p, reg):
    t = _c_unit(p, reg)
    while p.at("|"):
        p.next()
        t = CPar(t, _c_unit(p, reg))
    return t


def _c_unit(p, reg):
    if p.at_ident("0") or (p.peek()[0] == "num" and p.peek()[1] == "0"):
        p.next()
        return C_NIL
    if p.at_ident("Omega"):
        p.next()
        return C_OMEGA
    if p.at_ident("Stuck"):
        p.next()
        return CStuck()
    if p.at("("):
        p.next()
        t = _c_par(p, reg)
        p.expect(")")
        return t
    if p.at_ident("F"):
        p.next()
        p.expect("[")
        a = _c_name(p)
        p.expect("->")
        b = _c_name(p)
        p.expect("]")
        p.expect("(")
        ln, col = p.peek()[2], p.peek()[3]
        fname = p.ident("function name")
        p.expect(")")
        fn = reg.get(fname) or rf.LIBRARY.get(fname)
        if fn is None:
            raise ParseError(f"unknown function {fname!r}", ln, col)
        return CBox(a, b, fname, fn)
    if p.at_ident():
        subj = _c_name(p)
        p.expect("!")
        p.expect("(")
        vals = [_c_num(p)]
        while p.at(","):
            p.next()
            vals.append(_c_num(p))
        p.expect(")")
        return COut(subj, tuple(vals))
    p.err("expected a process", expected=["0", "Omega", "F", "(", "name"])


def _c_name(p) -> Name:
    ln, col = p.peek()[2], p.peek()[3]
    ident = p.ident("name")
    if ident.startswith(RESERVED_PREFIX):
        raise ParseError(f"name {ident!r} uses the reserved '#' prefix", ln, col)
    return const(ident)


def _c_num(p) -> int:
    k, v, ln, col = p.peek()
    if k != "num":
        raise ParseError(f"found {v!r}", ln, col, expected=["natural number"])
    p.next()
    return int(v)


# ---------------------------------------------------------------------------
# recursive function definitions (.rf)


def parse_rf(text: str) -> dict:
    """Parse named definitions ``name = expr``; returns name -> RecFun.

    Earlier definitions and the shipped library are usable by reference.
    """
    p = _P(text)
    defs: dict = {}
    while p.peek()[0] != "eof":
        name = p.ident("definition name")
        p.expect("=")
        defs[name] = _rf_expr(p, defs)
    return defs


def parse_rf_expr(text: str, defs: dict | None = None):
    p = _P(text)
    e = _rf_expr(p, dict(defs or {}))
    p.eof()
    return e


def _rf_expr(p, defs):
    ln, col = p.peek()[2], p.peek()[3]
    head = p.ident("function expression")
    if head == "succ":
        return rf.RSucc()
    if head == "zero":
        p.expect("(")
        n = _c_num(p)
        p.expect(")")
        return rf.RZero(n)
    if head == "proj":
        p.expect("(")
        i = _c_num(p)
        p.expect(",")
        n = _c_num(p)
        p.expect(")")
        return rf.RProj(i, n)
    if head == "comp":
        p.expect("(")
        outer = _rf_expr(p, defs)
        inners = []
        while p.at(","):
            p.next()
            inners.append(_rf_expr(p, defs))
        p.expect(")")
        if not inners:
            raise ParseError("comp needs at least one inner function", ln, col)
        return rf.RComp(outer, tuple(inners))
    if head == "primrec":
        p.expect("(")
        base = _rf_expr(p, defs)
        p.expect(",")
        step = _rf_expr(p, defs)
        p.expect(")")
        return rf.RPrimRec(base, step)
    if head == "mu":
        p.expect("(")
        body = _rf_expr(p, defs)
        p.expect(")")
        return rf.RMu(body)
    got = defs.get(head) or rf.LIBRARY.get(head)
    if got is None:
        raise ParseError(f"unknown function {head!r}", ln, col)
    return got


# ---------------------------------------------------------------------------
# printers


def _is_par(t):
    return type(t) in (PPar, HPar, CPar)


def print_pi(t: PiTerm) -> str:
    return _ppi(t, False)


def _ppi(t, atom):
    cls = type(t)
    if cls.__name__ == "PNil":
        return "0"
    if cls is PPar:
        s = f"{_ppi(t.left, True)} | {_ppi(t.right, True)}"
        return f"({s})" if atom else s
    if cls is PRes:
        binders = []
        body = t
        while type(body) is PRes:
            binders.append(body.name.id)
            body = body.body
        return f"(new {' '.join(binders)}) {_ppi(body, True)}"
    if cls in (PIn, PBangIn):
        bang = "!" if cls is PBangIn else ""
        if t.var not in t.body.fnv:
            head = f"{bang}{t.subj.id}"
        else:
            head = f"{bang}{t.subj.id}({t.var.id})"
        return head + _ppi_cont(t.body)
    if cls in (POut, PBangOut):
        bang = "!" if cls is PBangOut else ""
        return f"{bang}{t.subj.id}!{t.obj.id}" + _ppi_cont(t.body)
    raise TypeError(f"print_pi: not a pi term: {cls.__name__}")


def _ppi_cont(body):
    if type(body).__name__ == "PNil":
        return ""
    return f".{_ppi(body, True)}"


def print_hopi(t: HopiTerm) -> str:
    return _ph(t, False)


def _ph(t, atom):
    cls = type(t)
    if cls.__name__ == "HNil":
        return "0"
    if cls is HVar:
        return t.pvar
    if cls is HPar:
        s = f"{_ph(t.left, True)} | {_ph(t.right, True)}"
        return f"({s})" if atom else s
    if cls is HRes:
        binders = []
        body = t
        while type(body) is HRes:
            binders.append(body.name.id)
            body = body.body
        return f"(new {' '.join(binders)}) {_ph(body, True)}"
    if cls is HIn:
        if t.pvar not in t.body.fpv:
            # keep an explicit .0 so the sugar never reads as a process variable
            if type(t.body).__name__ == "HNil":
                return f"{t.subj.id}.0"
            return t.subj.id + _ph_cont(t.body)
        return f"{t.subj.id}({t.pvar})" + _ph_cont(t.body)
    if cls is HOut:
        return f"{t.subj.id}!{_ph_payload(t.payload)}" + _ph_cont(t.body)
    if cls is HAbs:
        return f"<{','.join(p.id for p in t.params)}> {_ph(t.body, True)}"
    if cls is HApp:
        fun = _ph(t.fun, True) if type(t.fun) is HVar else f"({_ph(t.fun, False)})"
        return f"{fun}<{','.join(a.id for a in t.args)}>"
    if cls is HBang:
        return f"!{_ph(t.body, True)}"
    raise TypeError(f"print_hopi: not a higher-order term: {cls.__name__}")


def _ph_payload(t):
    cls = type(t)
    if cls.__name__ == "HNil":
        return "0"
    if cls is HVar:
        return t.pvar
    if cls is HApp and type(t.fun) is HVar:
        return _ph(t, True)
    return f"({_ph(t, False)})"


def _ph_cont(body):
    if type(body).__name__ == "HNil":
        return ""
    return f".{_ph(body, True)}"


def print_c(t: CTerm) -> str:
    return _pc(t, False)


def _pc(t, atom):
    cls = type(t)
    if cls.__name__ == "CNil":
        return "0"
    if cls.__name__ == "COmega":
        return "Omega"
    if cls is CStuck:
        return "Stuck"
    if cls is CPar:
        s = f"{_pc(t.left, True)} | {_pc(t.right, True)}"
        return f"({s})" if atom else s
    if cls is COut:
        return f"{t.subj.id}!({','.join(str(v) for v in t.values)})"
    if cls is CBox:
        return f"F[{t.inc.id}->{t.outc.id}]({t.fname})"
    raise TypeError(f"print_c: not a computation-calculus term: {cls.__name__}")


def print_recfun(f) -> str:
    cls = type(f).__name__
    if cls == "RZero":
        return f"zero({f.arity})"
    if cls == "RSucc":
        return "succ"
    if cls == "RProj":
        return f"proj({f.index},{f.arity})"
    if cls == "RComp":
        return f"comp({print_recfun(f.outer)}, {', '.join(print_recfun(g) for g in f.inners)})"
    if cls == "RPrimRec":
        return f"primrec({print_recfun(f.base)}, {print_recfun(f.step)})"
    if cls == "RMu":
        return f"mu({print_recfun(f.body)})"
    raise TypeError(f"print_recfun: unknown node {cls}")


def pp(t: Term) -> str:
    """Print any term of the three calculi."""
    if isinstance(t, PiTerm):
        return print_pi(t)
    if isinstance(t, HopiTerm):
        return print_hopi(t)
    if isinstance(t, CTerm):
        return print_c(t)
    raise TypeError(f"pp: unknown term {type(t).__name__}")


CALCULI = ("pi", "hopi", "c", "recfun")


def parse(text: str, calculus: str, registry: dict | None = None):
    if calculus == "pi":
        return parse_pi(text)
    if calculus == "hopi":
        return parse_hopi(text)
    if calculus == "c":
        return parse_c(text, registry)
    if calculus in ("recfun", "rf"):
        return parse_rf(text)
    raise ValueError(f"unknown calculus {calculus!r}")
