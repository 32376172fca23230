"""Seeded random term generators shared by the property suites."""

from __future__ import annotations

import random

from procwb import recfun as rf
from procwb.terms import (
    C_NIL, C_OMEGA, H_NIL, PI_NIL, CBox, COut, CPar, CTerm, HAbs, HApp,
    HBang, HIn, HOut, HPar, HRes, HVar, HopiTerm, Name, PBangIn, PBangOut,
    PIn, POut, PPar, PRes, PiTerm, const, nvar,
)

CONSTS = [const(c) for c in "abcde"]


def gen_pi(rng: random.Random, size: int, scope=None, allow_repl=True,
           allow_repl_out=True) -> PiTerm:
    """A well-formed pi term with no free name variables."""
    scope = list(scope or CONSTS)
    if size <= 1:
        return PI_NIL

    def name():
        return rng.choice(scope)

    kind = rng.choice(
        ["in", "out", "par", "res", "nil"]
        + (["bangin"] if allow_repl else [])
        + (["bangout"] if allow_repl and allow_repl_out else []))
    if kind == "nil":
        return PI_NIL
    if kind == "in" or kind == "bangin":
        v = nvar(f"x{rng.randrange(3)}")
        body = gen_pi(rng, size - 1, scope + [v], allow_repl, allow_repl_out)
        return (PBangIn if kind == "bangin" else PIn)(name(), v, body)
    if kind == "out" or kind == "bangout":
        body = gen_pi(rng, size - 1, scope, allow_repl, allow_repl_out)
        return (PBangOut if kind == "bangout" else POut)(name(), name(), body)
    if kind == "par":
        ls = rng.randrange(1, size)
        left = gen_pi(rng, ls, scope, allow_repl, allow_repl_out)
        right = gen_pi(rng, size - ls, scope, allow_repl, allow_repl_out)
        return PPar(left, right)
    c = const(f"r{rng.randrange(3)}")
    return PRes(c, gen_pi(rng, size - 1, scope + [c], allow_repl, allow_repl_out))


def gen_hopi(rng: random.Random, size: int, consts=None, pvars=(),
             nvars=(), allow_bang=True) -> HopiTerm:
    """A well-formed higher-order term with no free name variables; free
    process variables only from `pvars`."""
    consts = list(consts or CONSTS)
    pvars = list(pvars)
    nvars = list(nvars)
    if size <= 1:
        if pvars and rng.random() < 0.3:
            return HVar(rng.choice(pvars))
        return H_NIL

    def name():
        return rng.choice(consts + nvars)

    kinds = ["in", "out", "par", "res", "abs", "nil"]
    if pvars:
        kinds += ["var", "app"]
    if allow_bang:
        kinds += ["bang"]
    kind = rng.choice(kinds)
    if kind == "nil":
        return H_NIL
    if kind == "var":
        return HVar(rng.choice(pvars))
    if kind == "app":
        k = rng.randrange(1, 3)
        return HApp(HVar(rng.choice(pvars)), tuple(name() for _ in range(k)))
    if kind == "in":
        x = f"X{rng.randrange(3)}"
        body = gen_hopi(rng, size - 1, consts, pvars + [x], nvars, allow_bang)
        return HIn(name(), x, body)
    if kind == "out":
        ps = rng.randrange(1, size)
        payload = gen_hopi(rng, ps, consts, pvars, nvars, allow_bang)
        body = gen_hopi(rng, size - ps, consts, pvars, nvars, allow_bang)
        return HOut(name(), payload, body)
    if kind == "par":
        ls = rng.randrange(1, size)
        return HPar(gen_hopi(rng, ls, consts, pvars, nvars, allow_bang),
                    gen_hopi(rng, size - ls, consts, pvars, nvars, allow_bang))
    if kind == "res":
        c = const(f"r{rng.randrange(3)}")
        return HRes(c, gen_hopi(rng, size - 1, consts + [c], pvars, nvars, allow_bang))
    if kind == "bang":
        return HBang(gen_hopi(rng, size - 1, consts, pvars, nvars, allow_bang))
    k = rng.randrange(1, 3)
    params = tuple(nvar(f"p{i}{rng.randrange(3)}") for i in range(k))
    while len(set(params)) != len(params):
        params = tuple(nvar(f"p{i}{rng.randrange(3)}") for i in range(k))
    body = gen_hopi(rng, size - 1, consts, pvars, nvars + list(params), allow_bang)
    return HAbs(params, body)


C_FNS = [("succ", rf.SUCC), ("add", rf.ADD), ("pred", rf.PRED)]


def gen_c(rng: random.Random, size: int, subjects="ab", maxval=3,
          allow_omega=True) -> CTerm:
    atoms: list[CTerm] = []
    n = max(1, size)
    for _ in range(n):
        kind = rng.choice(["nil", "out", "box"] + (["omega"] if allow_omega else []))
        if kind == "nil":
            atoms.append(C_NIL)
        elif kind == "omega":
            atoms.append(C_OMEGA)
        elif kind == "out":
            width = 1 if rng.random() < 0.8 else 2
            atoms.append(COut(const(rng.choice(subjects)),
                              tuple(rng.randrange(maxval + 1) for _ in range(width))))
        else:
            fname, fn = rng.choice(C_FNS)
            atoms.append(CBox(const(rng.choice(subjects)),
                              const(rng.choice(subjects)), fname, fn))
    out = atoms[0]
    for a in atoms[1:]:
        out = CPar(out, a) if rng.random() < 0.5 else CPar(a, out)
    return out


def shuffle_congruent(rng: random.Random, t: CTerm) -> CTerm:
    """A term structurally congruent to t: monoid/commutativity/Omega shuffles."""
    from procwb.terms import CNil, COmega

    def comps(u):
        if isinstance(u, CPar):
            return comps(u.left) + comps(u.right)
        return [u]

    cs = comps(t)
    rng.shuffle(cs)
    # inject units and duplicate one Omega sometimes
    if rng.random() < 0.6:
        cs.insert(rng.randrange(len(cs) + 1), C_NIL)
    if any(isinstance(c, COmega) for c in cs) and rng.random() < 0.6:
        cs.insert(rng.randrange(len(cs) + 1), C_OMEGA)
    out = cs[0]
    for c in cs[1:]:
        out = CPar(out, c) if rng.random() < 0.5 else CPar(c, out)
    return out


def injective_renaming(rng: random.Random, names, avoid=()):
    """Random injective map on constants, into fresh user-style names."""
    pool = [const(f"q{i}") for i in range(len(list(names)) + 5)]
    pool = [p for p in pool if p not in avoid]
    rng.shuffle(pool)
    return {n: pool[i] for i, n in enumerate(sorted(names, key=lambda m: m.id))}
