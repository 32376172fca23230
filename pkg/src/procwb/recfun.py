"""Mu-recursive function expressions and a direct fueled evaluator.

These serve as the computation calculus' built-in functions and as the
independent arithmetic oracle for the encoding tests.  Definedness is
undecidable, so evaluation carries a step budget: one fuel unit per
constructor unfolding, with an explicit OutOfFuel verdict instead of a guess.
Minimization search never certifies undefinedness (no finite certificate
exists), so a non-terminating search always surfaces as OutOfFuel.
"""

from __future__ import annotations

from dataclasses import dataclass


class RecFunError(ValueError):
    pass


class ArityError(RecFunError):
    pass


@dataclass(frozen=True)
class RZero:
    """n-ary constant zero function."""
    arity: int


@dataclass(frozen=True)
class RSucc:
    """Unary successor."""


@dataclass(frozen=True)
class RProj:
    """Projection of the index-th argument (1-based) out of arity many."""
    index: int
    arity: int


@dataclass(frozen=True)
class RComp:
    """Composition outer(inner_1(args), ..., inner_k(args))."""
    outer: "RecFun"
    inners: tuple


@dataclass(frozen=True)
class RPrimRec:
    """Primitive recursion: h(x~,0)=base(x~); h(x~,n+1)=step(h(x~,n),x~,n)."""
    base: "RecFun"
    step: "RecFun"


@dataclass(frozen=True)
class RMu:
    """Minimization: least y with body(x~,y)=0, searching upward from 0."""
    body: "RecFun"


RecFun = RZero | RSucc | RProj | RComp | RPrimRec | RMu


@dataclass(frozen=True)
class Defined:
    value: int


@dataclass(frozen=True)
class Undefined:
    pass


@dataclass(frozen=True)
class OutOfFuel:
    steps: int


EvalResult = Defined | Undefined | OutOfFuel


def arity_check(f: RecFun) -> int:
    """Return the arity, or raise ArityError naming the offending node."""
    if isinstance(f, RZero):
        if f.arity < 0:
            raise ArityError(f"zero function with negative arity: {f}")
        return f.arity
    if isinstance(f, RSucc):
        return 1
    if isinstance(f, RProj):
        if not (1 <= f.index <= f.arity):
            raise ArityError(f"projection index out of range: {f}")
        return f.arity
    if isinstance(f, RComp):
        k = arity_check(f.outer)
        if len(f.inners) != k:
            raise ArityError(
                f"composition outer is {k}-ary but has {len(f.inners)} inner functions")
        ns = {arity_check(g) for g in f.inners}
        if len(ns) != 1:
            raise ArityError(f"composition inner functions disagree on arity: {sorted(ns)}")
        return ns.pop()
    if isinstance(f, RPrimRec):
        n = arity_check(f.base)
        m = arity_check(f.step)
        if m != n + 2:
            raise ArityError(
                f"primitive recursion needs an ({n + 2})-ary step, got {m}-ary")
        return n + 1
    if isinstance(f, RMu):
        m = arity_check(f.body)
        if m < 1:
            raise ArityError("minimization body must take at least one argument")
        return m - 1
    raise ArityError(f"not a recursive-function node: {f!r}")


class _Fuel:
    __slots__ = ("left", "used")

    def __init__(self, budget: int):
        self.left = budget
        self.used = 0

    def tick(self):
        if self.left <= 0:
            raise _Out()
        self.left -= 1
        self.used += 1


class _Out(Exception):
    pass


def eval(f: RecFun, args, fuel: int = 100_000) -> EvalResult:
    """Evaluate f on a tuple of naturals within a step budget."""
    args = tuple(args)
    n = arity_check(f)
    if len(args) != n:
        raise ArityError(f"{n}-ary function applied to {len(args)} arguments")
    gas = _Fuel(fuel)
    try:
        return Defined(_ev(f, args, gas))
    except _Out:
        return OutOfFuel(gas.used)


def _ev(f, args, gas) -> int:
    gas.tick()
    if isinstance(f, RZero):
        return 0
    if isinstance(f, RSucc):
        return args[0] + 1
    if isinstance(f, RProj):
        return args[f.index - 1]
    if isinstance(f, RComp):
        vals = tuple(_ev(g, args, gas) for g in f.inners)
        return _ev(f.outer, vals, gas)
    if isinstance(f, RPrimRec):
        *xs, n = args
        xs = tuple(xs)
        acc = _ev(f.base, xs, gas)
        for i in range(n):
            acc = _ev(f.step, (acc,) + xs + (i,), gas)
        return acc
    if isinstance(f, RMu):
        y = 0
        while True:
            if _ev(f.body, args + (y,), gas) == 0:
                return y
            y += 1
    raise RecFunError(f"not a recursive-function node: {f!r}")


# ---------------------------------------------------------------------------
# shipped library

ADD = RPrimRec(RProj(1, 1), RComp(RSucc(), (RProj(1, 3),)))
MULT = RPrimRec(RZero(1), RComp(ADD, (RProj(1, 3), RProj(2, 3))))
PRED = RPrimRec(RZero(0), RProj(2, 2))
MONUS = RPrimRec(RProj(1, 1), RComp(PRED, (RProj(1, 3),)))
SUCC = RSucc()
# floor(n/2): half(0)=0, half(n+1) = n - half(n)  (i.e. monus(n, half(n)))
EVEN_HALF = RPrimRec(RZero(0), RComp(MONUS, (RProj(2, 2), RProj(1, 2))))

LIBRARY: dict[str, RecFun] = {
    "succ": SUCC,
    "zero": RZero(1),
    "add": ADD,
    "mult": MULT,
    "pred": PRED,
    "monus": MONUS,
    "half": EVEN_HALF,
}
