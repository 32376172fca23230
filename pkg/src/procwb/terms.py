"""Term algebra for the three calculi: abstract syntax, binding, substitution,
structural congruence.

Terms are immutable; every node caches its free-name sets, size and hash at
construction time so the hot operations (normalization, state dedup) stay
cheap.  Three node families live here:

* ``P*``  -- first-order pi: nil, input, output, restriction, parallel,
  replicated input/output prefixes.
* ``H*``  -- higher-order pi with name parameterization: process variables,
  higher-order input/output, abstraction ``<x,y> P`` and application
  ``P<a,b>``, plus a first-class replication node (see HBang).
* ``C*``  -- the computation calculus: numeric outputs, the divergent Omega,
  and function boxes wrapping recursive-function expressions.

Names come in two disjoint kinds, constants and variables.  Workbench-made
fresh names use the reserved "#" prefix; the parser refuses user terms with
free "#" names.
"""

from __future__ import annotations

import itertools

RESERVED_PREFIX = "#"

_fresh = itertools.count()


def reset_fresh(start: int = 0) -> None:
    """Reset the global fresh-name counter (CLI seeds this per invocation)."""
    global _fresh
    _fresh = itertools.count(start)


class Name:
    """A channel identifier: a constant or a name variable."""

    __slots__ = ("id", "is_var", "_h")

    def __init__(self, id: str, is_var: bool):
        self.id = id
        self.is_var = is_var
        self._h = hash((id, is_var))

    def __eq__(self, other):
        return (
            self is other
            or (isinstance(other, Name) and self.is_var == other.is_var and self.id == other.id)
        )

    def __hash__(self):
        return self._h

    def __repr__(self):
        return f"{'var' if self.is_var else 'const'}:{self.id}"


def const(id: str) -> Name:
    return Name(id, False)


def nvar(id: str) -> Name:
    return Name(id, True)


def fresh_const(stem: str = "") -> Name:
    return Name(f"{RESERVED_PREFIX}{stem}{next(_fresh)}", False)


def fresh_var(stem: str = "") -> Name:
    return Name(f"{RESERVED_PREFIX}{stem}{next(_fresh)}", True)


def fresh_pvar(stem: str = "P") -> str:
    return f"{RESERVED_PREFIX}{stem}{next(_fresh)}"


EMPTY: frozenset = frozenset()


class Term:
    """Base of all AST nodes.  Subclasses declare FIELDS and call _seal."""

    __slots__ = ("fnc", "fnv", "fpv", "size", "_h")
    FIELDS: tuple = ()

    def _seal(self, fnc, fnv, fpv, size):
        self.fnc = fnc  # free constants
        self.fnv = fnv  # free name variables
        self.fpv = fpv  # free process variables
        self.size = size
        self._h = hash((type(self).__name__,) + tuple(
            getattr(self, f) for f in type(self).FIELDS))

    def __eq__(self, other):
        if self is other:
            return True
        if type(self) is not type(other) or self._h != other._h:
            return False
        return all(getattr(self, f) == getattr(other, f) for f in type(self).FIELDS)

    def __hash__(self):
        return self._h

    def __repr__(self):
        inner = ", ".join(repr(getattr(self, f)) for f in type(self).FIELDS)
        return f"{type(self).__name__}({inner})"


class WellFormedError(ValueError):
    pass


class ArityMismatch(WellFormedError):
    pass


class NotAnAbstraction(WellFormedError):
    pass


# ---------------------------------------------------------------------------
# first-order pi


class PiTerm(Term):
    __slots__ = ()


class PNil(PiTerm):
    __slots__ = ()

    def __init__(self):
        self._seal(EMPTY, EMPTY, EMPTY, 1)


class PIn(PiTerm):
    """Input prefix m(x).P; binds the name variable x in the body."""

    __slots__ = ("subj", "var", "body")
    FIELDS = ("subj", "var", "body")

    def __init__(self, subj: Name, var: Name, body: PiTerm):
        if not var.is_var:
            raise WellFormedError("input binds a name variable")
        self.subj, self.var, self.body = subj, var, body
        fnc = body.fnc | ({subj} if not subj.is_var else EMPTY)
        fnv = (body.fnv - {var}) | ({subj} if subj.is_var else EMPTY)
        self._seal(frozenset(fnc), frozenset(fnv), EMPTY, body.size + 1)


class POut(PiTerm):
    """Output prefix m!n.P."""

    __slots__ = ("subj", "obj", "body")
    FIELDS = ("subj", "obj", "body")

    def __init__(self, subj: Name, obj: Name, body: PiTerm):
        self.subj, self.obj, self.body = subj, obj, body
        fnc = set(body.fnc)
        fnv = set(body.fnv)
        for n in (subj, obj):
            (fnv if n.is_var else fnc).add(n)
        self._seal(frozenset(fnc), frozenset(fnv), EMPTY, body.size + 1)


class PRes(PiTerm):
    """Restriction (new c) P; binds the constant c."""

    __slots__ = ("name", "body")
    FIELDS = ("name", "body")

    def __init__(self, name: Name, body: PiTerm):
        if name.is_var:
            raise WellFormedError("restriction binds a constant")
        self.name, self.body = name, body
        self._seal(body.fnc - {name}, body.fnv, EMPTY, body.size + 1)


class PPar(PiTerm):
    __slots__ = ("left", "right")
    FIELDS = ("left", "right")

    def __init__(self, left: PiTerm, right: PiTerm):
        self.left, self.right = left, right
        self._seal(left.fnc | right.fnc, left.fnv | right.fnv, EMPTY,
                   left.size + right.size + 1)


class PBangIn(PiTerm):
    """Replicated input !m(x).P (guarded replication)."""

    __slots__ = ("subj", "var", "body")
    FIELDS = ("subj", "var", "body")

    def __init__(self, subj: Name, var: Name, body: PiTerm):
        if not var.is_var:
            raise WellFormedError("input binds a name variable")
        self.subj, self.var, self.body = subj, var, body
        fnc = body.fnc | ({subj} if not subj.is_var else EMPTY)
        fnv = (body.fnv - {var}) | ({subj} if subj.is_var else EMPTY)
        self._seal(frozenset(fnc), frozenset(fnv), EMPTY, body.size + 1)


class PBangOut(PiTerm):
    """Replicated output !m!n.P (guarded replication)."""

    __slots__ = ("subj", "obj", "body")
    FIELDS = ("subj", "obj", "body")

    def __init__(self, subj: Name, obj: Name, body: PiTerm):
        self.subj, self.obj, self.body = subj, obj, body
        fnc = set(body.fnc)
        fnv = set(body.fnv)
        for n in (subj, obj):
            (fnv if n.is_var else fnc).add(n)
        self._seal(frozenset(fnc), frozenset(fnv), EMPTY, body.size + 1)


# ---------------------------------------------------------------------------
# higher-order pi with name parameterization


class HopiTerm(Term):
    __slots__ = ()


class HNil(HopiTerm):
    __slots__ = ()

    def __init__(self):
        self._seal(EMPTY, EMPTY, EMPTY, 1)


class HVar(HopiTerm):
    """Process variable occurrence."""

    __slots__ = ("pvar",)
    FIELDS = ("pvar",)

    def __init__(self, pvar: str):
        self.pvar = pvar
        self._seal(EMPTY, EMPTY, frozenset((pvar,)), 1)


class HIn(HopiTerm):
    """Higher-order input a(X).E; binds the process variable X."""

    __slots__ = ("subj", "pvar", "body")
    FIELDS = ("subj", "pvar", "body")

    def __init__(self, subj: Name, pvar: str, body: HopiTerm):
        self.subj, self.pvar, self.body = subj, pvar, body
        fnc = body.fnc | ({subj} if not subj.is_var else EMPTY)
        fnv = body.fnv | ({subj} if subj.is_var else EMPTY)
        self._seal(frozenset(fnc), frozenset(fnv), body.fpv - {pvar},
                   body.size + 1)


class HOut(HopiTerm):
    """Higher-order output a!Q.E sending process Q."""

    __slots__ = ("subj", "payload", "body")
    FIELDS = ("subj", "payload", "body")

    def __init__(self, subj: Name, payload: HopiTerm, body: HopiTerm):
        self.subj, self.payload, self.body = subj, payload, body
        fnc = payload.fnc | body.fnc | ({subj} if not subj.is_var else EMPTY)
        fnv = payload.fnv | body.fnv | ({subj} if subj.is_var else EMPTY)
        self._seal(frozenset(fnc), frozenset(fnv), payload.fpv | body.fpv,
                   payload.size + body.size + 1)


class HPar(HopiTerm):
    __slots__ = ("left", "right")
    FIELDS = ("left", "right")

    def __init__(self, left: HopiTerm, right: HopiTerm):
        self.left, self.right = left, right
        self._seal(left.fnc | right.fnc, left.fnv | right.fnv,
                   left.fpv | right.fpv, left.size + right.size + 1)


class HRes(HopiTerm):
    __slots__ = ("name", "body")
    FIELDS = ("name", "body")

    def __init__(self, name: Name, body: HopiTerm):
        if name.is_var:
            raise WellFormedError("restriction binds a constant")
        self.name, self.body = name, body
        self._seal(body.fnc - {name}, body.fnv, body.fpv, body.size + 1)


class HAbs(HopiTerm):
    """Name abstraction <x1,...,xn> E with pairwise-distinct parameters."""

    __slots__ = ("params", "body")
    FIELDS = ("params", "body")

    def __init__(self, params: tuple, body: HopiTerm):
        params = tuple(params)
        if not params:
            raise WellFormedError("abstraction needs at least one parameter")
        if any(not p.is_var for p in params):
            raise WellFormedError("abstraction parameters are name variables")
        if len(set(params)) != len(params):
            raise WellFormedError("abstraction parameters must be distinct")
        self.params, self.body = params, body
        self._seal(body.fnc, body.fnv - set(params), body.fpv, body.size + 1)


class HApp(HopiTerm):
    """Application E<m1,...,mn> instantiating an abstraction's parameters."""

    __slots__ = ("fun", "args")
    FIELDS = ("fun", "args")

    def __init__(self, fun: HopiTerm, args: tuple):
        args = tuple(args)
        if not args:
            raise WellFormedError("application needs at least one argument")
        if isinstance(fun, HAbs) and len(fun.params) != len(args):
            raise ArityMismatch(
                f"abstraction of arity {len(fun.params)} applied to {len(args)} names")
        self.fun, self.args = fun, args
        fnc = set(fun.fnc)
        fnv = set(fun.fnv)
        for n in args:
            (fnv if n.is_var else fnc).add(n)
        self._seal(frozenset(fnc), frozenset(fnv), fun.fpv, fun.size + 1)


class HBang(HopiTerm):
    """Replication !E, unfolded one copy per demanded action.

    The derived form (c)(c(X).(X|E|c!X.0) | c!(c(X).(X|E|c!X.0)).0) spins a
    bookkeeping tau for every copy, which would make every replicated term
    divergent; keeping replication as a node gives the intended on-demand
    behavior and finite tau-graphs.
    """

    __slots__ = ("body",)
    FIELDS = ("body",)

    def __init__(self, body: HopiTerm):
        self.body = body
        self._seal(body.fnc, body.fnv, body.fpv, body.size + 1)


# ---------------------------------------------------------------------------
# computation calculus


class CTerm(Term):
    __slots__ = ()


class CNil(CTerm):
    __slots__ = ()

    def __init__(self):
        self._seal(EMPTY, EMPTY, EMPTY, 1)


class COmega(CTerm):
    __slots__ = ()

    def __init__(self):
        self._seal(EMPTY, EMPTY, EMPTY, 1)


class COut(CTerm):
    """Output a!(i1,...,ik) of a nonempty tuple of naturals."""

    __slots__ = ("subj", "values")
    FIELDS = ("subj", "values")

    def __init__(self, subj: Name, values: tuple):
        values = tuple(values)
        if subj.is_var:
            raise WellFormedError("all names in the computation calculus are constants")
        if not values or any(v < 0 for v in values):
            raise WellFormedError("output carries a nonempty tuple of naturals")
        self.subj, self.values = subj, values
        self._seal(frozenset((subj,)), EMPTY, EMPTY, 1 + len(values))


class CBox(CTerm):
    """Function box F[a->b](f): consumes a tuple on a, delivers f's value on b."""

    __slots__ = ("inc", "outc", "fname", "fn")
    FIELDS = ("inc", "outc", "fname", "fn")

    def __init__(self, inc: Name, outc: Name, fname: str, fn):
        if inc.is_var or outc.is_var:
            raise WellFormedError("all names in the computation calculus are constants")
        self.inc, self.outc, self.fname, self.fn = inc, outc, fname, fn
        self._seal(frozenset((inc, outc)), EMPTY, EMPTY, 2)


class CPar(CTerm):
    __slots__ = ("left", "right")
    FIELDS = ("left", "right")

    def __init__(self, left: CTerm, right: CTerm):
        self.left, self.right = left, right
        self._seal(left.fnc | right.fnc, EMPTY, EMPTY,
                   left.size + right.size + 1)


class CStuck(CTerm):
    """Distinguished stuck state raised when a function box runs out of fuel."""

    __slots__ = ("reason",)
    FIELDS = ("reason",)

    def __init__(self, reason: str = "OutOfFuel"):
        self.reason = reason
        self._seal(EMPTY, EMPTY, EMPTY, 1)


PI_NIL = PNil()
H_NIL = HNil()
C_NIL = CNil()
C_OMEGA = COmega()


def free_names(t: Term):
    """The three disjoint free sets: constants, name variables, process variables."""
    return t.fnc, t.fnv, t.fpv


def is_closed(t: Term) -> bool:
    return not t.fnv and not t.fpv


# ---------------------------------------------------------------------------
# substitution


class Subst:
    """Simultaneous capture-avoiding substitution.

    ``names`` maps names to names (assignment of variables, renaming of
    constants); ``procs`` maps process variables to higher-order terms.
    """

    __slots__ = ("names", "procs")

    def __init__(self, names: dict | None = None, procs: dict | None = None):
        self.names = dict(names or {})
        self.procs = dict(procs or {})

    def lookup(self, n: Name) -> Name:
        return self.names.get(n, n)

    def restrict(self, binder) -> "Subst":
        names = {k: v for k, v in self.names.items() if k != binder}
        return Subst(names, self.procs) if len(names) != len(self.names) else self

    def range_names(self):
        out = set(self.names.values())
        for t in self.procs.values():
            out |= t.fnc | t.fnv
        return out

    def is_empty(self):
        return not self.names and not self.procs


def _avoid(binder: Name, s: Subst, body: Term):
    """Rename binder away when it would capture a name in the map's range."""
    s = s.restrict(binder)
    if s.is_empty():
        return binder, body, s
    relevant = False
    if any(k in body.fnc or k in body.fnv for k in s.names):
        relevant = True
    if any(k in body.fpv for k in s.procs):
        relevant = True
    if not relevant:
        return binder, body, Subst()
    if binder in s.range_names():
        fresh = fresh_var() if binder.is_var else fresh_const()
        body = substitute(body, Subst({binder: fresh}))
        return fresh, body, s
    return binder, body, s


def substitute(t: Term, s: Subst) -> Term:
    """Apply a simultaneous substitution, renaming bound names as needed."""
    if s.is_empty():
        return t
    return _sub(t, s)


def _sub(t: Term, s: Subst) -> Term:
    cls = type(t)
    if cls in (PNil, HNil, CNil, COmega, CStuck):
        return t
    if cls is PIn or cls is PBangIn:
        v, body, s2 = _avoid(t.var, s, t.body)
        return cls(s.lookup(t.subj), v, _sub(body, s2) if not s2.is_empty() else body)
    if cls is POut or cls is PBangOut:
        return cls(s.lookup(t.subj), s.lookup(t.obj), _sub(t.body, s))
    if cls is PRes or cls is HRes:
        n, body, s2 = _avoid(t.name, s, t.body)
        return cls(n, _sub(body, s2) if not s2.is_empty() else body)
    if cls is PPar or cls is HPar or cls is CPar:
        return cls(_sub(t.left, s), _sub(t.right, s))
    if cls is HVar:
        return s.procs.get(t.pvar, t)
    if cls is HIn:
        pv = t.pvar
        procs = {k: v for k, v in s.procs.items() if k != pv}
        body = t.body
        s2 = Subst(s.names, procs)
        # freshen the bound process variable if some substituted image uses it
        if any(pv in img.fpv for img in procs.values()) and pv in body.fpv:
            npv = fresh_pvar()
            body = substitute(body, Subst(procs={pv: HVar(npv)}))
            pv = npv
        return HIn(s.lookup(t.subj), pv, _sub(body, s2))
    if cls is HOut:
        return HOut(s.lookup(t.subj), _sub(t.payload, s), _sub(t.body, s))
    if cls is HAbs:
        params = list(t.params)
        body = t.body
        s2 = s
        for i, p in enumerate(params):
            p2, body, s2 = _avoid(p, s2, body)
            params[i] = p2
        return HAbs(tuple(params), _sub(body, s2) if not s2.is_empty() else body)
    if cls is HBang:
        return HBang(_sub(t.body, s))
    if cls is HApp:
        fun = _sub(t.fun, s)
        args = tuple(s.lookup(a) for a in t.args)
        return HApp(fun, args)  # constructor raises ArityMismatch on bad images
    if cls is COut:
        return COut(s.lookup(t.subj), t.values)
    if cls is CBox:
        return CBox(s.lookup(t.inc), s.lookup(t.outc), t.fname, t.fn)
    raise TypeError(f"substitute: unknown node {cls.__name__}")


def apply_abstraction(fun: HopiTerm, args) -> HopiTerm:
    """Fire (<x~>E)<m~> -> E{m~/x~}; the fun is normalized first."""
    args = tuple(args)
    f = normalize(fun)
    if not isinstance(f, HAbs):
        raise NotAnAbstraction(f"cannot apply non-abstraction {type(f).__name__}")
    if len(f.params) != len(args):
        raise ArityMismatch(
            f"abstraction of arity {len(f.params)} applied to {len(args)} names")
    return substitute(f.body, Subst(dict(zip(f.params, args))))


# ---------------------------------------------------------------------------
# alpha equivalence


def alpha_eq(t1: Term, t2: Term) -> bool:
    return _aeq(t1, t2, {}, {}, 0)


def _name_eq(n1, n2, e1, e2):
    d1, d2 = e1.get(n1), e2.get(n2)
    if d1 is not None or d2 is not None:
        return d1 == d2
    return n1 == n2


def _aeq(t1, t2, e1, e2, d):
    cls = type(t1)
    if cls is not type(t2):
        return False
    if cls in (PNil, HNil, CNil, COmega):
        return True
    if cls is CStuck:
        return t1.reason == t2.reason
    if cls in (PIn, PBangIn):
        if not _name_eq(t1.subj, t2.subj, e1, e2):
            return False
        return _aeq(t1.body, t2.body, {**e1, t1.var: d}, {**e2, t2.var: d}, d + 1)
    if cls in (POut, PBangOut):
        return (_name_eq(t1.subj, t2.subj, e1, e2)
                and _name_eq(t1.obj, t2.obj, e1, e2)
                and _aeq(t1.body, t2.body, e1, e2, d))
    if cls in (PRes, HRes):
        return _aeq(t1.body, t2.body, {**e1, t1.name: d}, {**e2, t2.name: d}, d + 1)
    if cls in (PPar, HPar, CPar):
        return (_aeq(t1.left, t2.left, e1, e2, d)
                and _aeq(t1.right, t2.right, e1, e2, d))
    if cls is HVar:
        return _name_eq(t1.pvar, t2.pvar, e1, e2)
    if cls is HIn:
        if not _name_eq(t1.subj, t2.subj, e1, e2):
            return False
        return _aeq(t1.body, t2.body, {**e1, t1.pvar: d}, {**e2, t2.pvar: d}, d + 1)
    if cls is HOut:
        return (_name_eq(t1.subj, t2.subj, e1, e2)
                and _aeq(t1.payload, t2.payload, e1, e2, d)
                and _aeq(t1.body, t2.body, e1, e2, d))
    if cls is HAbs:
        if len(t1.params) != len(t2.params):
            return False
        f1, f2 = dict(e1), dict(e2)
        for p1, p2 in zip(t1.params, t2.params):
            f1[p1], f2[p2] = d, d
            d += 1
        return _aeq(t1.body, t2.body, f1, f2, d)
    if cls is HApp:
        if len(t1.args) != len(t2.args):
            return False
        if not all(_name_eq(a1, a2, e1, e2) for a1, a2 in zip(t1.args, t2.args)):
            return False
        return _aeq(t1.fun, t2.fun, e1, e2, d)
    if cls is HBang:
        return _aeq(t1.body, t2.body, e1, e2, d)
    if cls is COut:
        return t1.subj == t2.subj and t1.values == t2.values
    if cls is CBox:
        return (t1.inc == t2.inc and t1.outc == t2.outc and t1.fn == t2.fn
                and t1.fname == t2.fname)
    raise TypeError(f"alpha_eq: unknown node {cls.__name__}")


# ---------------------------------------------------------------------------
# structural congruence via canonical forms
#
# The canonical representative flattens parallel composition, drops nils,
# fires applications, pushes restrictions inward across parallel components,
# collapses duplicate Omegas (computation calculus), orders components by an
# alpha-invariant key, and finally renumbers binders canonically.  Deciding
# congruence by normal-form equality is sound; it is complete for the
# monoid/commutation/extrusion fragment actually exercised here (restriction
# grouping order can in principle distinguish entangled multi-binder splits).


def _mk_par(cls_par, comps):
    if not comps:
        return {PPar: PI_NIL, HPar: H_NIL, CPar: C_NIL}[cls_par]
    out = comps[-1]
    for c in reversed(comps[:-1]):
        out = cls_par(c, out)
    return out


def _split_par(t):
    cls = type(t)
    if cls in (PPar, HPar, CPar):
        return _split_par(t.left) + _split_par(t.right)
    if cls in (PNil, HNil, CNil):
        return []
    return [t]


def akey(t: Term, env: dict | None = None) -> str:
    """Alpha-invariant serialization: bound names render as binder indices."""
    parts: list[str] = []
    _ak(t, dict(env or {}), [0], parts)
    return "".join(parts)


def _akn(n: Name, env) -> str:
    i = env.get(n)
    if i is not None:
        return f"<{i}>"
    return ("$" if n.is_var else "") + n.id


def _ak(t, env, ctr, out):
    cls = type(t)
    nm = cls.__name__
    if cls in (PNil, HNil, CNil, COmega):
        out.append(nm)
        return
    if cls is CStuck:
        out.append(f"Stuck({t.reason})")
        return
    if cls in (PIn, PBangIn, HIn):
        binder = t.var if cls is not HIn else t.pvar
        out.append(f"{nm}({_akn(t.subj, env)},")
        env = dict(env)
        env[binder] = ctr[0]
        ctr[0] += 1
        _ak(t.body, env, ctr, out)
        out.append(")")
        return
    if cls in (POut, PBangOut):
        out.append(f"{nm}({_akn(t.subj, env)},{_akn(t.obj, env)},")
        _ak(t.body, env, ctr, out)
        out.append(")")
        return
    if cls in (PRes, HRes):
        out.append(f"{nm}(")
        env = dict(env)
        env[t.name] = ctr[0]
        ctr[0] += 1
        _ak(t.body, env, ctr, out)
        out.append(")")
        return
    if cls in (PPar, HPar, CPar):
        out.append("Par(")
        _ak(t.left, env, ctr, out)
        out.append(",")
        _ak(t.right, env, ctr, out)
        out.append(")")
        return
    if cls is HVar:
        out.append(f"V[{_akn(t.pvar, env) if t.pvar in env else t.pvar}]")
        return
    if cls is HOut:
        out.append(f"HOut({_akn(t.subj, env)},")
        _ak(t.payload, env, ctr, out)
        out.append(",")
        _ak(t.body, env, ctr, out)
        out.append(")")
        return
    if cls is HAbs:
        out.append("Abs(")
        env = dict(env)
        for p in t.params:
            env[p] = ctr[0]
            ctr[0] += 1
        _ak(t.body, env, ctr, out)
        out.append(")")
        return
    if cls is HApp:
        out.append("App(")
        _ak(t.fun, env, ctr, out)
        out.append("," + ",".join(_akn(a, env) for a in t.args) + ")")
        return
    if cls is HBang:
        out.append("Bang(")
        _ak(t.body, env, ctr, out)
        out.append(")")
        return
    if cls is COut:
        out.append(f"COut({_akn(t.subj, env)},{t.values})")
        return
    if cls is CBox:
        out.append(f"Box({_akn(t.inc, env)},{_akn(t.outc, env)},{t.fname},{t.fn!r})")
        return
    raise TypeError(f"akey: unknown node {cls.__name__}")


def _norm(t: Term, env: dict, memo: dict) -> Term:
    # memo is valid only per (node, env) pair: a shared subterm may normalize
    # differently under different binder contexts; pin both so ids stay live
    key = (id(t), id(env))
    hit = memo.get(key)
    if hit is not None:
        return hit[0]
    cls = type(t)
    if cls in (PNil, HNil, CNil, COmega, HVar, COut, CBox, CStuck):
        res = t
    elif cls in (PIn, PBangIn):
        env2 = dict(env)
        env2[t.var] = len(env2)
        res = cls(t.subj, t.var, _norm(t.body, env2, memo))
    elif cls in (POut, PBangOut):
        res = cls(t.subj, t.obj, _norm(t.body, env, memo))
    elif cls is HIn:
        env2 = dict(env)
        env2[t.pvar] = len(env2)
        res = HIn(t.subj, t.pvar, _norm(t.body, env2, memo))
    elif cls is HOut:
        res = HOut(t.subj, _norm(t.payload, env, memo), _norm(t.body, env, memo))
    elif cls is HAbs:
        env2 = dict(env)
        for p in t.params:
            env2[p] = len(env2)
        res = HAbs(t.params, _norm(t.body, env2, memo))
    elif cls is HBang:
        res = HBang(_norm(t.body, env, memo))
    elif cls is HApp:
        fun = _norm(t.fun, env, memo)
        if isinstance(fun, HAbs):
            if len(fun.params) != len(t.args):
                raise ArityMismatch(
                    f"abstraction of arity {len(fun.params)} applied to {len(t.args)} names")
            fired = substitute(fun.body, Subst(dict(zip(fun.params, t.args))))
            res = _norm(fired, env, memo)
        else:
            res = HApp(fun, t.args)
    elif cls in (PPar, HPar, CPar):
        comps = []
        for c in _split_par(t):
            cn = _norm(c, env, memo)
            comps.extend(_split_par(cn))
        res = _rebuild_par(cls, comps, env)
    elif cls in (PRes, HRes):
        binders = []
        body = t
        while type(body) is cls:
            binders.append(body.name)
            body = body.body
        env2 = dict(env)
        for b in binders:
            env2[b] = len(env2)
        nb = _norm(body, env2, memo)
        res = _push_restrictions(cls, binders, nb, env)
    else:
        raise TypeError(f"normalize: unknown node {cls.__name__}")
    memo[key] = (res, t, env)
    return res


def _rebuild_par(cls_par, comps, env):
    comps = [c for c in comps if type(c) not in (PNil, HNil, CNil)]
    if cls_par is CPar:
        omegas = [c for c in comps if type(c) is COmega]
        if omegas:
            comps = [c for c in comps if type(c) is not COmega]
            comps.append(C_OMEGA)
    if not comps:
        return {PPar: PI_NIL, HPar: H_NIL, CPar: C_NIL}[cls_par]
    if len(comps) == 1:
        return comps[0]
    comps.sort(key=lambda c: akey(c, env))
    return _mk_par(cls_par, comps)


def _push_restrictions(cls_res, binders, body, env):
    """Push each restriction into the least parallel group that uses it.

    All alpha-sensitive comparisons render the cluster's own binders through
    stable "R<i>" tokens (i = syntactic position in the cluster), so the
    result does not depend on the binders' spellings.
    """
    par_cls = PPar if cls_res is PRes else HPar
    comps = _split_par(body) if type(body) in (PPar, HPar) else [body]
    if not comps:
        return body  # body was nil: useless restrictions dropped
    env_sort = dict(env)
    for i, b in enumerate(binders):
        env_sort[b] = f"R{i}"
    pending = [b for b in binders if b in body.fnc]  # drop unused binders
    pending.sort(key=lambda b: (sum(1 for c in comps if b in c.fnc), env_sort[b]))
    outer = []
    while pending:
        b = pending.pop(0)
        users = [c for c in comps if b in c.fnc]
        if len(users) == len(comps):
            outer.append(b)
            continue
        non_users = [c for c in comps if b not in c.fnc]
        grouped = cls_res(b, users[0] if len(users) == 1 else _mk_par(par_cls, users))
        # pending binders used only inside the group move in with it
        inner = [p for p in pending
                 if p in grouped.fnc and not any(p in c.fnc for c in non_users)]
        for p in inner:
            pending.remove(p)
            grouped = cls_res(p, grouped)
        grouped = _norm_res_chain(cls_res, grouped, env)
        comps = non_users + [grouped]
    comps.sort(key=lambda c: akey(c, env_sort))
    out = _mk_par(par_cls, comps) if len(comps) > 1 else comps[0]
    # order the stay-outer binders by first use in the canonical body
    if outer:
        order = []
        for b in outer:
            marked = akey(out, {**env_sort, b: "*"})
            order.append((marked.find("<*>"), env_sort[b], b))
        order.sort(key=lambda p: (p[0], p[1]))
        for _, _, b in reversed(order):
            out = cls_res(b, out)
    return out


def _norm_res_chain(cls_res, t, env):
    binders = []
    body = t
    while type(body) is cls_res:
        binders.append(body.name)
        body = body.body
    env2 = dict(env)
    for b in binders:
        env2[b] = len(env2)
    body = _norm(body, env2, {})
    return _push_restrictions(cls_res, binders, body, env)


def _renumber(t: Term):
    """Assign canonical #-names to every binder, pre-order."""
    ctr = itertools.count()

    def nm(kind):
        return f"{RESERVED_PREFIX}{kind}{next(ctr)}"

    def go(t, env):
        cls = type(t)
        if cls in (PNil, HNil, CNil, COmega, COut, CBox, CStuck):
            return t
        if cls in (PIn, PBangIn):
            v = Name(nm("x"), True)
            env2 = {**env, t.var: v}
            return cls(env.get(t.subj, t.subj), v, go(t.body, env2))
        if cls in (POut, PBangOut):
            return cls(env.get(t.subj, t.subj), env.get(t.obj, t.obj), go(t.body, env))
        if cls in (PRes, HRes):
            c = Name(nm("a"), False)
            env2 = {**env, t.name: c}
            return cls(c, go(t.body, env2))
        if cls in (PPar, HPar, CPar):
            return cls(go(t.left, env), go(t.right, env))
        if cls is HVar:
            return HVar(env.get(("pv", t.pvar), t.pvar))
        if cls is HIn:
            pv = nm("X")
            env2 = {**env, ("pv", t.pvar): pv}
            return HIn(env.get(t.subj, t.subj), pv, go(t.body, env2))
        if cls is HOut:
            return HOut(env.get(t.subj, t.subj), go(t.payload, env), go(t.body, env))
        if cls is HAbs:
            ps = tuple(Name(nm("x"), True) for _ in t.params)
            env2 = dict(env)
            for old, new in zip(t.params, ps):
                env2[old] = new
            return HAbs(ps, go(t.body, env2))
        if cls is HApp:
            return HApp(go(t.fun, env), tuple(env.get(a, a) for a in t.args))
        if cls is HBang:
            return HBang(go(t.body, env))
        raise TypeError(f"renumber: unknown node {cls.__name__}")

    return go(t, {})


def normalize(t: Term) -> Term:
    """Canonical representative under the implemented congruence fragment."""
    return _renumber(_norm(t, {}, {}))


def struct_congruent(t1: Term, t2: Term) -> bool:
    """Normalization-based congruence test: sound, partial in general."""
    return normalize(t1) == normalize(t2)


def canon_key(t: Term) -> str:
    """Stable state key for explored transition graphs."""
    return akey(normalize(t))
