"""Labelled transitions for the three calculi, bounded graph exploration,
divergence probing, and reduction utilities.

Conventions:

* step functions normalize their input, so binders inside states carry
  canonical reserved names (#a/#x/#X) and can never capture the name universe
  (#u...), extruded names (#e...) or user names.
* pi input objects are enumerated over a finite universe: the free constants
  of the explored term plus one designated fresh constant (callers checking
  equivalence pass the union universe of both roots).
* higher-order input is infinitely branching, so input transitions are
  emitted once per payload in an explicit menu; closed-system tau exploration
  needs no menu.
* function-box inputs fire against tuples offered by parallel components, or
  against menu tuples; an out-of-fuel evaluation moves to the distinguished
  Stuck state rather than guessing.
* internal tau edges remember the communication subject (Action.via) for
  diagnosis; via is ignored by label equality.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from . import recfun as rf
from .syntax import pp, print_hopi
from .terms import (
    C_NIL, H_NIL, PI_NIL, CBox, CNil, COmega, COut, CPar, CStuck, CTerm,
    HAbs, HApp, HBang, HIn, HNil, HOut, HPar, HRes, HVar, HopiTerm, Name,
    PBangIn, PBangOut, PIn, PNil, POut, PPar, PRes, PiTerm, Subst, Term,
    canon_key, const, normalize, substitute,
)


class OpenTermError(ValueError):
    pass


# ---------------------------------------------------------------------------
# actions


class Action:
    __slots__ = ()

    def is_tau(self):
        return isinstance(self, Tau)


class Tau(Action):
    """Internal move; ``via`` records the communication subject (diagnostic
    only, excluded from equality)."""

    __slots__ = ("via",)

    def __init__(self, via: Name | None = None):
        self.via = via

    def __eq__(self, other):
        return isinstance(other, Tau)

    def __hash__(self):
        return hash("tau")

    def __repr__(self):
        return f"Tau(via={self.via!r})" if self.via else "Tau()"


@dataclass(frozen=True)
class PiInAct(Action):
    subj: Name
    obj: Name


@dataclass(frozen=True)
class PiOutAct(Action):
    subj: Name
    obj: Name


@dataclass(frozen=True)
class PiBoundOutAct(Action):
    subj: Name
    name: Name


@dataclass(frozen=True)
class HoInAct(Action):
    subj: Name
    payload: HopiTerm


@dataclass(frozen=True)
class HoOutAct(Action):
    subj: Name
    extruded: tuple
    payload: HopiTerm


@dataclass(frozen=True)
class CInAct(Action):
    subj: Name
    values: tuple


@dataclass(frozen=True)
class COutAct(Action):
    subj: Name
    values: tuple


def label_str(a: Action) -> str:
    if isinstance(a, Tau):
        return "tau"
    if isinstance(a, PiInAct):
        return f"{a.subj.id}({a.obj.id})"
    if isinstance(a, PiOutAct):
        return f"{a.subj.id}!{a.obj.id}"
    if isinstance(a, PiBoundOutAct):
        return f"{a.subj.id}!({a.name.id})"
    if isinstance(a, HoInAct):
        return f"{a.subj.id}({print_hopi(a.payload)})"
    if isinstance(a, HoOutAct):
        ext = f"(new {' '.join(n.id for n in a.extruded)})" if a.extruded else ""
        return f"{ext}{a.subj.id}![{print_hopi(a.payload)}]"
    if isinstance(a, CInAct):
        return f"{a.subj.id}({','.join(str(v) for v in a.values)})"
    if isinstance(a, COutAct):
        return f"{a.subj.id}!({','.join(str(v) for v in a.values)})"
    raise TypeError(f"label_str: unknown action {a!r}")


def subject(a: Action) -> Name | None:
    return None if isinstance(a, Tau) else a.subj


def polarity(a: Action) -> str | None:
    if isinstance(a, (PiInAct, HoInAct, CInAct)):
        return "input"
    if isinstance(a, (PiOutAct, PiBoundOutAct, HoOutAct, COutAct)):
        return "output"
    return None


# ---------------------------------------------------------------------------
# canonical fresh names used inside explored graphs


def designated_fresh(universe) -> Name:
    k = 0
    while True:
        n = const(f"#u{k}")
        if n not in universe:
            return n
        k += 1


def _canonical_extrusion(avoid, count=1):
    out = []
    k = 0
    while len(out) < count:
        n = const(f"#e{k}")
        if n not in avoid:
            out.append(n)
        k += 1
    return out


# ---------------------------------------------------------------------------
# pi transitions
#
# Structural pass: inputs stay symbolic (subject/binder/body) so that
# communication and closing can instantiate them directly, and the finite
# enumeration over the name universe happens once at the top.


def _pi_trans(p):
    cls = type(p)
    if cls is PNil:
        return [], [], [], []
    if cls is PIn:
        return [(p.subj, p.var, p.body)], [], [], []
    if cls is PBangIn:
        return [(p.subj, p.var, PPar(p.body, p))], [], [], []
    if cls is POut:
        return [], [(p.subj, p.obj, p.body)], [], []
    if cls is PBangOut:
        return [], [(p.subj, p.obj, PPar(p.body, p))], [], []
    if cls is PPar:
        li, lo, lb, lt = _pi_trans(p.left)
        ri, ro, rb, rt = _pi_trans(p.right)
        ins = [(s, v, PPar(b, p.right)) for (s, v, b) in li]
        ins += [(s, v, PPar(p.left, b)) for (s, v, b) in ri]
        outs = [(s, o, PPar(b, p.right)) for (s, o, b) in lo]
        outs += [(s, o, PPar(p.left, b)) for (s, o, b) in ro]
        bouts = []
        for (s, c, b) in lb:
            c, b = _freshen_bout(c, b, p.right)
            bouts.append((s, c, PPar(b, p.right)))
        for (s, c, b) in rb:
            c, b = _freshen_bout(c, b, p.left)
            bouts.append((s, c, PPar(p.left, b)))
        taus = [(v, PPar(b, p.right)) for (v, b) in lt]
        taus += [(v, PPar(p.left, b)) for (v, b) in rt]
        # communication
        for (s, o, b1) in lo:
            for (s2, v, b2) in ri:
                if s == s2:
                    taus.append((s, PPar(b1, substitute(b2, Subst({v: o})))))
        for (s, o, b1) in ro:
            for (s2, v, b2) in li:
                if s == s2:
                    taus.append((s, PPar(substitute(b2, Subst({v: o})), b1)))
        # closing: bound output meets input
        for (s, c, b1) in lb:
            for (s2, v, b2) in ri:
                if s == s2:
                    c2, b1r = _freshen_bout(c, b1, p.right)
                    taus.append((s, PRes(c2, PPar(b1r, substitute(b2, Subst({v: c2}))))))
        for (s, c, b1) in rb:
            for (s2, v, b2) in li:
                if s == s2:
                    c2, b1r = _freshen_bout(c, b1, p.left)
                    taus.append((s, PRes(c2, PPar(substitute(b2, Subst({v: c2})), b1r))))
        return ins, outs, bouts, taus
    if cls is PRes:
        n = p.name
        bi, bo, bb, bt = _pi_trans(p.body)
        ins = [(s, v, PRes(n, b)) for (s, v, b) in bi if s != n]
        outs, bouts = [], []
        for (s, o, b) in bo:
            if s == n:
                continue
            if o == n:
                bouts.append((s, n, b))  # open: the restriction is consumed
            else:
                outs.append((s, o, PRes(n, b)))
        for (s, c, b) in bb:
            if s != n:
                bouts.append((s, c, PRes(n, b)))
        taus = [(v, PRes(n, b)) for (v, b) in bt]
        return ins, outs, bouts, taus
    raise OpenTermError(f"pi transitions: unexpected node {cls.__name__}")


def _freshen_bout(c, body, other):
    """bn(lambda) must avoid fn of a passive parallel component."""
    if c in other.fnc:
        from .terms import fresh_const
        c2 = fresh_const("b")
        return c2, substitute(body, Subst({c: c2}))
    return c, body


def step_pi(p: PiTerm, universe=None) -> list:
    """All transitions of a closed pi term; inputs enumerated over
    fn(p) | universe | {designated fresh}."""
    if p.fnv or p.fpv:
        raise OpenTermError("step_pi needs a closed term")
    p = normalize(p)
    base = set(universe or ()) | set(p.fnc)
    base.add(designated_fresh(base))
    objs = sorted(base, key=lambda n: n.id)
    ins, outs, bouts, taus = _pi_trans(p)
    res: list = []
    for (s, v, b) in ins:
        for o in objs:
            res.append((PiInAct(s, o), substitute(b, Subst({v: o}))))
    for (s, o, b) in outs:
        res.append((PiOutAct(s, o), b))
    for (s, c, b) in bouts:
        c2 = _canonical_extrusion(b.fnc | {s}, 1)[0]
        res.append((PiBoundOutAct(s, c2), substitute(b, Subst({c: c2}))))
    for (via, b) in taus:
        res.append((Tau(via), b))
    return res


# ---------------------------------------------------------------------------
# higher-order pi transitions


def _rename_extruded(ext, payload, cont, avoid):
    """Jointly alpha-rename extruded names clashing with `avoid`."""
    clash = [c for c in ext if c in avoid]
    if not clash:
        return ext, payload, cont
    from .terms import fresh_const
    ren = {c: fresh_const("b") for c in clash}
    sub = Subst(ren)
    ext = tuple(ren.get(c, c) for c in ext)
    return ext, substitute(payload, sub), substitute(cont, sub)


def _h_trans(e):
    """Returns (ins, outs, taus); ins are symbolic (subj, pvar, body),
    outs are (subj, extruded tuple, payload, cont)."""
    cls = type(e)
    if cls is HNil or cls is HAbs:
        return [], [], []
    if cls is HIn:
        return [(e.subj, e.pvar, e.body)], [], []
    if cls is HOut:
        return [], [(e.subj, (), e.payload, e.body)], []
    if cls is HBang:
        bi, bo, bt = _h_trans(e.body)
        ins = [(s, v, HPar(b, e)) for (s, v, b) in bi]
        outs = []
        for (s, ext, pl, b) in bo:
            ext, pl, b = _rename_extruded(ext, pl, b, e.fnc)
            outs.append((s, ext, pl, HPar(b, e)))
        taus = [(v, HPar(b, e)) for (v, b) in bt]
        return ins, outs, taus
    if cls is HPar:
        li, lo, lt = _h_trans(e.left)
        ri, ro, rt = _h_trans(e.right)
        ins = [(s, v, HPar(b, e.right)) for (s, v, b) in li]
        ins += [(s, v, HPar(e.left, b)) for (s, v, b) in ri]
        outs = []
        for (s, ext, pl, b) in lo:
            ext, pl, b = _rename_extruded(ext, pl, b, e.right.fnc)
            outs.append((s, ext, pl, HPar(b, e.right)))
        for (s, ext, pl, b) in ro:
            ext, pl, b = _rename_extruded(ext, pl, b, e.left.fnc)
            outs.append((s, ext, pl, HPar(e.left, b)))
        taus = [(v, HPar(b, e.right)) for (v, b) in lt]
        taus += [(v, HPar(e.left, b)) for (v, b) in rt]
        # communication: (c~)(sender' | receiver{payload/X}), extruded names
        # alpha-renamed fresh for the receiving side before recomposition
        for (s, ext, pl, b1) in lo:
            for (s2, v, b2) in ri:
                if s != s2:
                    continue
                ext2, pl2, b1r = _rename_extruded(ext, pl, b1, b2.fnc)
                inner = HPar(b1r, substitute(b2, Subst(procs={v: pl2})))
                for c in reversed(ext2):
                    inner = HRes(c, inner)
                taus.append((s, inner))
        for (s, ext, pl, b1) in ro:
            for (s2, v, b2) in li:
                if s != s2:
                    continue
                ext2, pl2, b1r = _rename_extruded(ext, pl, b1, b2.fnc)
                inner = HPar(substitute(b2, Subst(procs={v: pl2})), b1r)
                for c in reversed(ext2):
                    inner = HRes(c, inner)
                taus.append((s, inner))
        return ins, outs, taus
    if cls is HRes:
        n = e.name
        bi, bo, bt = _h_trans(e.body)
        ins = [(s, v, HRes(n, b)) for (s, v, b) in bi if s != n]
        outs = []
        for (s, ext, pl, b) in bo:
            if s == n:
                continue
            if n in pl.fnc and n not in ext:
                outs.append((s, (n,) + ext, pl, b))  # open
            else:
                outs.append((s, ext, pl, HRes(n, b)))
        taus = [(v, HRes(n, b)) for (v, b) in bt]
        return ins, outs, taus
    if cls in (HVar, HApp):
        raise OpenTermError(
            f"higher-order transitions: stuck {cls.__name__} at process position")
    raise OpenTermError(f"higher-order transitions: unexpected node {cls.__name__}")


def step_hopi(e: HopiTerm, menu=()) -> list:
    """Transitions of a closed higher-order term.  Output and tau transitions
    are exhaustive; input transitions are emitted once per menu payload."""
    if e.fnv or e.fpv:
        raise OpenTermError("step_hopi needs a closed term")
    e = normalize(e)
    if isinstance(e, HAbs):
        return []  # parameterized processes have no transitions
    ins, outs, taus = _h_trans(e)
    res: list = []
    for (s, v, b) in ins:
        for payload in menu:
            res.append((HoInAct(s, normalize(payload)),
                        substitute(b, Subst(procs={v: payload}))))
    for (s, ext, pl, b) in outs:
        avoid = b.fnc | pl.fnc | {s}
        canon = _canonical_extrusion(avoid, len(ext))
        ren = Subst(dict(zip(ext, canon)))
        res.append((HoOutAct(s, tuple(canon), normalize(substitute(pl, ren))),
                    substitute(b, ren)))
    for (via, b) in taus:
        res.append((Tau(via), b))
    return res


# ---------------------------------------------------------------------------
# computation calculus transitions


def box_fire(box: CBox, values, fuel: int) -> CTerm:
    """Successor of a function box consuming a tuple."""
    try:
        arity = rf.arity_check(box.fn)
    except rf.ArityError:
        return CStuck("IllFormed")
    if len(values) != arity:
        return CStuck("ArityMismatch")
    got = rf.eval(box.fn, values, fuel)
    if isinstance(got, rf.Defined):
        return COut(box.outc, (got.value,))
    if isinstance(got, rf.Undefined):
        return COmega()
    return CStuck("OutOfFuel")


def _c_collect(p, fuel):
    """(ins, outs, taus) where ins/outs/taus carry full successor contexts."""
    cls = type(p)
    if cls is CNil or cls is CStuck:
        return [], [], []
    if cls is COmega:
        return [], [], [(None, p)]
    if cls is COut:
        return [], [(p.subj, p.values, C_NIL)], []
    if cls is CBox:
        return [(p.inc, p, None)], [], []
    if cls is CPar:
        li, lo, lt = _c_collect(p.left, fuel)
        ri, ro, rt = _c_collect(p.right, fuel)
        wrapl = lambda b: CPar(b, p.right)
        wrapr = lambda b: CPar(p.left, b)
        ins = [(s, box, _chain(w, wrapl)) for (s, box, w) in li]
        ins += [(s, box, _chain(w, wrapr)) for (s, box, w) in ri]
        outs = [(s, vs, wrapl(b)) for (s, vs, b) in lo]
        outs += [(s, vs, wrapr(b)) for (s, vs, b) in ro]
        taus = [(v, wrapl(b)) for (v, b) in lt]
        taus += [(v, wrapr(b)) for (v, b) in rt]
        for (s, vs, b1) in lo:
            for (s2, box, w) in ri:
                if s == s2:
                    succ = box_fire(box, vs, fuel)
                    taus.append((s, CPar(b1, w(succ) if w else succ)))
        for (s, vs, b1) in ro:
            for (s2, box, w) in li:
                if s == s2:
                    succ = box_fire(box, vs, fuel)
                    taus.append((s, CPar(w(succ) if w else succ, b1)))
        return ins, outs, taus
    raise OpenTermError(f"computation transitions: unexpected node {cls.__name__}")


def _chain(inner, outer):
    if inner is None:
        return outer
    return lambda b: outer(inner(b))


def step_c(p: CTerm, menu=(), fuel: int = 100_000) -> list:
    """Transitions of a computation-calculus term: closed-system taus plus
    box inputs fired for each menu tuple of matching arity."""
    p = normalize(p)
    ins, outs, taus = _c_collect(p, fuel)
    res: list = []
    for (s, box, wrap) in ins:
        for values in menu:
            values = tuple(values)
            try:
                if rf.arity_check(box.fn) != len(values):
                    continue
            except rf.ArityError:
                continue
            succ = box_fire(box, values, fuel)
            res.append((CInAct(s, values), wrap(succ) if wrap else succ))
    for (s, vs, b) in outs:
        res.append((COutAct(s, vs), b))
    for (via, b) in taus:
        res.append((Tau(via), b))
    return res


# ---------------------------------------------------------------------------
# generic stepping and exploration


def step(t: Term, menu=(), universe=None, fuel: int = 100_000) -> list:
    if isinstance(t, PiTerm):
        return step_pi(t, universe)
    if isinstance(t, HopiTerm):
        return step_hopi(t, menu)
    if isinstance(t, CTerm):
        return step_c(t, menu, fuel)
    raise TypeError(f"step: unknown term {type(t).__name__}")


@dataclass
class Budget:
    max_states: int = 20_000
    max_depth: int = 200
    fuel: int = 100_000


@dataclass
class Lts:
    """Explored fragment of a transition graph over normalized states."""

    root: str
    states: dict
    edges: list
    exhausted: bool
    truncated: set
    depth: dict
    menu: tuple = ()
    calculus: str = ""
    _adj: dict | None = field(default=None, repr=False)

    def adjacency(self) -> dict:
        if self._adj is None:
            adj: dict = {k: [] for k in self.states}
            for (src, act, dst) in self.edges:
                adj[src].append((act, dst))
            self._adj = adj
        return self._adj

    def to_dot(self) -> str:
        idx = {k: i for i, k in enumerate(self.states)}
        lines = ["digraph lts {", '  rankdir=LR;']
        for k, i in idx.items():
            shape = "doublecircle" if k == self.root else "circle"
            label = k.replace("\\", "\\\\").replace('"', '\\"')
            lines.append(f'  n{i} [shape={shape}, label="{label}"];')
        for (src, act, dst) in self.edges:
            lab = label_str(act).replace("\\", "\\\\").replace('"', '\\"')
            lines.append(f'  n{idx[src]} -> n{idx[dst]} [label="{lab}"];')
        lines.append("}")
        return "\n".join(lines)

    def to_jsonl(self) -> str:
        out = [json.dumps({"root": self.root, "states": len(self.states),
                           "exhausted": self.exhausted})]
        for (src, act, dst) in self.edges:
            out.append(json.dumps({"src": src, "action": label_str(act), "dst": dst}))
        return "\n".join(out) + "\n"


def _calculus_of(t: Term) -> str:
    if isinstance(t, PiTerm):
        return "pi"
    if isinstance(t, HopiTerm):
        return "hopi"
    return "c"


def state_key(t: Term) -> str:
    return pp(normalize(t))


def explore(t: Term, budget: Budget | None = None, menu=(), universe=None) -> Lts:
    """Breadth-first exploration with states deduplicated by canonical form."""
    budget = budget or Budget()
    t0 = normalize(t)
    root = pp(t0)
    states = {root: t0}
    depth = {root: 0}
    edges: list = []
    seen_edges = set()
    frontier = [root]
    truncated: set = set()
    overflow = False
    base_universe = None
    if isinstance(t0, PiTerm):
        base_universe = frozenset(set(universe or ()) | set(t0.fnc))
    while frontier:
        nxt: list = []
        for key in frontier:
            d = depth[key]
            if d >= budget.max_depth:
                truncated.add(key)
                continue
            term = states[key]
            for (act, succ) in step(term, menu=menu, universe=base_universe,
                                     fuel=budget.fuel):
                s = normalize(succ)
                skey = pp(s)
                if skey not in states:
                    if len(states) >= budget.max_states:
                        overflow = True
                        truncated.add(key)
                        continue
                    states[skey] = s
                    depth[skey] = d + 1
                    nxt.append(skey)
                ekey = (key, label_str(act), skey)
                if ekey not in seen_edges:
                    seen_edges.add(ekey)
                    edges.append((key, act, skey))
        frontier = nxt
    exhausted = not truncated and not overflow
    return Lts(root=root, states=states, edges=edges, exhausted=exhausted,
               truncated=truncated, depth=depth, menu=tuple(menu),
               calculus=_calculus_of(t0))


# ---------------------------------------------------------------------------
# divergence


@dataclass
class Divergence:
    verdict: str  # "Divergent" | "NoDivergenceWithinBudget" | "BudgetExhausted"
    kind: str | None = None  # for Divergent: "cycle" | "growth"
    witness: list | None = None  # cycle keys or growing path keys
    states: int = 0


def detect_divergence(t: Term, budget: Budget | None = None, menu=(),
                      fuel: int | None = None) -> Divergence:
    """Probe for an infinite tau computation.

    A repeated canonical state on the current tau path is a genuine
    divergence certificate; a simple tau path longer than the depth budget
    whose endpoint grew is reported as heuristic "growth" divergence.
    """
    budget = budget or Budget()
    fuel = fuel if fuel is not None else budget.fuel
    t0 = normalize(t)
    k0 = pp(t0)
    # iterative DFS over tau edges
    path = [k0]
    onpath = {k0: 0}
    sizes = [t0.size]
    visited = {k0}
    exhausted_clean = True

    def taus(term):
        return [s for (a, s) in step(term, menu=menu, fuel=fuel) if a.is_tau()]

    frames = [(t0, taus(t0), 0)]
    while frames:
        term, succs, idx = frames[-1]
        if idx >= len(succs):
            frames.pop()
            onpath.pop(path.pop())
            sizes.pop()
            continue
        frames[-1] = (term, succs, idx + 1)
        s = normalize(succs[idx])
        skey = pp(s)
        if skey in onpath:
            start = onpath[skey]
            return Divergence("Divergent", kind="cycle",
                              witness=path[start:] + [skey], states=len(visited))
        if len(path) >= budget.max_depth:
            if s.size > sizes[0]:
                return Divergence("Divergent", kind="growth",
                                  witness=path[-8:] + [skey], states=len(visited))
            exhausted_clean = False
            continue
        if skey in visited:
            continue  # already searched below this state on another path
        if len(visited) >= budget.max_states:
            return Divergence("BudgetExhausted", states=len(visited))
        visited.add(skey)
        onpath[skey] = len(path)
        path.append(skey)
        sizes.append(s.size)
        frames.append((s, taus(s), 0))
    if exhausted_clean:
        return Divergence("NoDivergenceWithinBudget", states=len(visited))
    return Divergence("BudgetExhausted", states=len(visited))


# ---------------------------------------------------------------------------
# greedy tau running (for confluent encoded systems)


def reduce_apps(t: HopiTerm) -> HopiTerm:
    """Fire fireable applications and flatten nils without full
    canonicalization; linear-time, used by the greedy runner."""
    cls = type(t)
    if cls in (HIn,):
        return HIn(t.subj, t.pvar, reduce_apps(t.body))
    if cls is HOut:
        return HOut(t.subj, reduce_apps(t.payload), reduce_apps(t.body))
    if cls is HPar:
        l = reduce_apps(t.left)
        r = reduce_apps(t.right)
        if type(l) is HNil:
            return r
        if type(r) is HNil:
            return l
        return HPar(l, r)
    if cls is HRes:
        b = reduce_apps(t.body)
        if t.name not in b.fnc:
            return b
        return HRes(t.name, b)
    if cls is HAbs:
        return HAbs(t.params, reduce_apps(t.body))
    if cls is HBang:
        return HBang(reduce_apps(t.body))
    if cls is HApp:
        fun = reduce_apps(t.fun)
        if isinstance(fun, HAbs):
            from .terms import apply_abstraction
            return reduce_apps(apply_abstraction(fun, t.args))
        return HApp(fun, t.args)
    return t


@dataclass
class RunResult:
    status: str  # "output" | "quiescent" | "depth"
    steps: int
    payload: HopiTerm | None = None
    action: Action | None = None
    final: HopiTerm | None = None


def tau_run(t: HopiTerm, watch_subject: Name | None = None,
            max_steps: int = 10_000) -> RunResult:
    """Follow one deterministic tau path (first enabled move each step).

    Encoded recursive-function systems are confluent by construction, so any
    maximal path reaches the result; stops early when a visible output on
    ``watch_subject`` becomes enabled.
    """
    state = reduce_apps(t)
    for i in range(max_steps):
        ins, outs, taus = _h_trans(state)
        if watch_subject is not None:
            for (s, ext, pl, b) in outs:
                if s == watch_subject:
                    return RunResult("output", i, payload=normalize(pl),
                                     action=HoOutAct(s, tuple(ext), normalize(pl)),
                                     final=state)
        if not taus:
            return RunResult("quiescent", i, final=state)
        state = reduce_apps(taus[0][1])
    return RunResult("depth", max_steps, final=state)


# ---------------------------------------------------------------------------
# dead-component pruning (sound for weak equivalence, not for congruence)


def _count_occurrences(t, name, acc):
    """acc gets ('in_subj'|'out_subj'|'other') counts of a constant."""
    cls = type(t)
    if cls in (PIn, PBangIn, HIn):
        if t.subj == name:
            acc["in_subj"] += 1
        _count_occurrences(t.body, name, acc)
        return
    if cls in (POut, PBangOut):
        if t.subj == name:
            acc["out_subj"] += 1
        if t.obj == name:
            acc["other"] += 1
        _count_occurrences(t.body, name, acc)
        return
    if cls is HOut:
        if t.subj == name:
            acc["out_subj"] += 1
        _count_occurrences(t.payload, name, acc)
        _count_occurrences(t.body, name, acc)
        return
    if cls in (PRes, HRes):
        _count_occurrences(t.body, name, acc)
        return
    if cls in (PPar, HPar):
        _count_occurrences(t.left, name, acc)
        _count_occurrences(t.right, name, acc)
        return
    if cls is HAbs or cls is HBang:
        _count_occurrences(t.body, name, acc)
        return
    if cls is HApp:
        if name in t.args:
            acc["other"] += len([a for a in t.args if a == name])
        _count_occurrences(t.fun, name, acc)
        return
    # nil / vars / computation leaves
    return


def _guard_subject(c):
    """Head subject and polarity of a prefix-guarded component, if any."""
    cls = type(c)
    if cls in (PIn, PBangIn, HIn):
        return c.subj, "in"
    if cls in (POut, PBangOut, HOut):
        return c.subj, "out"
    if cls is HBang:
        return _guard_subject(c.body)
    return None, None


def _split(t):
    cls = type(t)
    if cls in (PPar, HPar):
        return _split(t.left) + _split(t.right)
    return [t]


def prune_dead(t: Term) -> Term:
    """Remove permanently stuck components guarded on restricted names that
    the rest of the scope can never complement.  Sound for weak equivalence;
    used when replaying the correspondence lemmas, never inside normalize."""
    res_cls = PRes if isinstance(t, PiTerm) else HRes
    par_cls = PPar if isinstance(t, PiTerm) else HPar

    def scope_prune(binders, comps):
        changed = True
        while changed:
            changed = False
            body = comps[0] if len(comps) == 1 else _mkpar(comps)
            for b in binders:
                acc = {"in_subj": 0, "out_subj": 0, "other": 0}
                _count_occurrences(body, b, acc)
                if acc["other"]:
                    continue
                kill_pol = None
                if acc["in_subj"] and not acc["out_subj"]:
                    kill_pol = "in"
                elif acc["out_subj"] and not acc["in_subj"]:
                    kill_pol = "out"
                if kill_pol is None:
                    continue
                keep = []
                for c in comps:
                    subj, pol = _guard_subject(c)
                    if subj == b and pol == kill_pol:
                        changed = True
                    else:
                        keep.append(c)
                comps = keep
                if changed:
                    break
        return comps

    def _mkpar(comps):
        if not comps:
            return PI_NIL if par_cls is PPar else H_NIL
        out = comps[-1]
        for c in reversed(comps[:-1]):
            out = par_cls(c, out)
        return out

    def go(t):
        cls = type(t)
        if cls is res_cls:
            binders = []
            body = t
            while type(body) is res_cls:
                binders.append(body.name)
                body = body.body
            comps = [go(c) for c in _split(body)]
            comps = [c for c in comps if type(c) is not PNil and type(c) is not HNil]
            comps = scope_prune(binders, comps)
            out = _mkpar(comps)
            for b in reversed(binders):
                if b in out.fnc:
                    out = res_cls(b, out)
            return out
        if cls is par_cls:
            return par_cls(go(t.left), go(t.right))
        if cls in (PIn, PBangIn):
            return cls(t.subj, t.var, go(t.body))
        if cls in (POut, PBangOut):
            return cls(t.subj, t.obj, go(t.body))
        if cls is HIn:
            return HIn(t.subj, t.pvar, go(t.body))
        if cls is HOut:
            return HOut(t.subj, go(t.payload), go(t.body))
        if cls is HAbs:
            return HAbs(t.params, go(t.body))
        if cls is HBang:
            return HBang(go(t.body))
        return t

    prev = None
    cur = normalize(t)
    while prev != cur:
        prev = cur
        cur = normalize(go(cur))
    return cur


# ---------------------------------------------------------------------------
# weak barbs


def weak_barbs(t: Term, budget: Budget | None = None, menu=()) -> set:
    """All (subject, polarity) pairs of visible actions reachable via tau*
    within the exploration budget."""
    budget = budget or Budget()
    t0 = normalize(t)
    seen = {pp(t0)}
    frontier = [t0]
    barbs: set = set()
    depth = 0
    while frontier and depth <= budget.max_depth:
        nxt = []
        for term in frontier:
            if isinstance(term, HopiTerm):
                ins, outs, _ = _h_trans(term) if not isinstance(term, HAbs) else ([], [], [])
                for (s, _v, _b) in ins:
                    barbs.add((s, "input"))
                for (s, _e, _p, _b) in outs:
                    barbs.add((s, "output"))
                succs = [b for (a, b) in step_hopi(term, menu=()) if a.is_tau()]
            elif isinstance(term, PiTerm):
                ins, outs, bouts, _ = _pi_trans(term)
                for (s, _v, _b) in ins:
                    barbs.add((s, "input"))
                for (s, _o, _b) in outs:
                    barbs.add((s, "output"))
                for (s, _c, _b) in bouts:
                    barbs.add((s, "output"))
                succs = [b for (a, b) in step_pi(term) if a.is_tau()]
            else:
                ins, outs, _ = _c_collect(term, budget.fuel)
                for (s, _box, _w) in ins:
                    barbs.add((s, "input"))
                for (s, _vs, _b) in outs:
                    barbs.add((s, "output"))
                succs = [b for (a, b) in step_c(term, fuel=budget.fuel) if a.is_tau()]
            for s in succs:
                sn = normalize(s)
                k = pp(sn)
                if k not in seen and len(seen) < budget.max_states:
                    seen.add(k)
                    nxt.append(sn)
        frontier = nxt
        depth += 1
    return barbs
