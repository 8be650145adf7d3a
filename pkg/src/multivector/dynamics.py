"""Solutions, invariant parts, isolated invariant sets and index pairs.

Solutions of a field are infinite walks in its dynamics graph.  Whether a
cell carries a forward, backward or full solution inside a set is decided by
reachability to and from cells lying on directed cycles of the graph
restricted to that set; no infinite object is ever built.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import networkx as nx

from .complex import Report
from .errors import InternalConsistencyError, PathError, PreconditionError
from .homology import Polynomial, poincare
from .mvf import MultivectorField

# graph helpers


def cycle_cells(field: MultivectorField, W: Iterable[int]) -> frozenset:
    """Cells of ``W`` lying on a directed cycle (loops included) inside ``W``."""
    g = field.graph
    W = frozenset(W)
    out = set()
    for comp in nx.strongly_connected_components(g.nx.subgraph(W)):
        if len(comp) > 1:
            out.update(comp)
        else:
            (x,) = comp
            if x in g.succ[x]:
                out.add(x)
    return frozenset(out)


def reach_forward(field: MultivectorField, sources: Iterable[int], W: Iterable[int] | None = None) -> frozenset:
    """Cells reachable from ``sources`` by paths inside ``W`` (sources included)."""
    return _reach(field.graph.succ, sources, W)


def reach_backward(field: MultivectorField, targets: Iterable[int], W: Iterable[int] | None = None) -> frozenset:
    """Cells from which ``targets`` can be reached inside ``W`` (targets included)."""
    return _reach(field.graph.pred, targets, W)


def _reach(adj, start, W) -> frozenset:
    if W is not None:
        W = frozenset(W)
        start = [x for x in start if x in W]
    seen = set(start)
    stack = list(seen)
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if y not in seen and (W is None or y in W):
                seen.add(y)
                stack.append(y)
    return frozenset(seen)


# compatibility hulls and invariant parts


def compat_hull_inner(field: MultivectorField, A: Iterable[int]) -> frozenset:
    """The largest union of multivectors contained in ``A``."""
    A = frozenset(A)
    return frozenset(x for x in A if field.mv(x) <= A)


def compat_hull_outer(field: MultivectorField, A: Iterable[int]) -> frozenset:
    """The smallest union of multivectors containing ``A``."""
    out = set()
    for x in A:
        out |= field.mv(x)
    return frozenset(out)


def is_compatible(field: MultivectorField, A: Iterable[int]) -> bool:
    A = frozenset(A)
    return all(field.mv(x) <= A for x in A)


def _by_dominant(field, W, good) -> frozenset:
    return frozenset(x for x in W if field.theta[x] in good)


def inv_plus(field: MultivectorField, A: Iterable[int]) -> frozenset:
    """Cells of ``A`` whose dominant cell starts a forward solution inside ``[A]^-``."""
    W = compat_hull_inner(field, A)
    return _by_dominant(field, W, reach_backward(field, cycle_cells(field, W), W))


def inv_minus(field: MultivectorField, A: Iterable[int]) -> frozenset:
    """Cells of ``A`` whose dominant cell ends a backward solution inside ``[A]^-``."""
    W = compat_hull_inner(field, A)
    return _by_dominant(field, W, reach_forward(field, cycle_cells(field, W), W))


def invariant_part(field: MultivectorField, A: Iterable[int]) -> frozenset:
    """Cells of ``A`` whose dominant cell lies on a full solution inside ``[A]^-``."""
    W = compat_hull_inner(field, A)
    C = cycle_cells(field, W)
    good = reach_backward(field, C, W) & reach_forward(field, C, W)
    return _by_dominant(field, W, good)


def is_invariant(field: MultivectorField, A: Iterable[int]) -> bool:
    A = frozenset(A)
    return invariant_part(field, A) == A


def is_isolated_invariant(field: MultivectorField, S: Iterable[int]) -> bool:
    S = frozenset(S)
    return is_invariant(field, S) and field.complex.is_proper(S)


def internal_tangency_witness(field: MultivectorField, S: Iterable[int]) -> list[int] | None:
    """A shortest path in ``cl S`` from ``S`` to ``S`` through the mouth of ``S``.

    Returns ``None`` when there is no such path.
    """
    S = frozenset(S)
    clS = field.complex.closure(S)
    mouth = clS - S
    g = field.graph
    parent: dict[tuple[int, bool], tuple[int, bool] | None] = {}
    frontier = []
    for s in sorted(S):
        parent[s, False] = None
        frontier.append((s, False))
    while frontier:
        nxt = []
        for state in frontier:
            x, through = state
            for y in sorted(g.succ[x]):
                if y not in clS:
                    continue
                new = (y, through or y in mouth)
                if new in parent:
                    continue
                parent[new] = state
                if new[1] and y in S:
                    path = []
                    cur = new
                    while cur is not None:
                        path.append(cur[0])
                        cur = parent[cur]
                    return path[::-1]
                nxt.append(new)
        frontier = nxt
    return None


# paths and lasso solutions


def is_path(field: MultivectorField, p: Sequence[int]) -> bool:
    g = field.graph
    return all(x in g.succ for x in p) and all(g.has_arrow(a, b) for a, b in zip(p, p[1:]))


def concat(field: MultivectorField, p: Sequence[int], q: Sequence[int]) -> tuple[int, ...]:
    """Join two paths; the last cell of ``p`` must have an arrow to the first of ``q``."""
    p, q = tuple(p), tuple(q)
    if p and q and not field.graph.has_arrow(p[-1], q[0]):
        raise PathError(f"no arrow from {p[-1]} to {q[0]}")
    return p + q


def nu(field: MultivectorField, x: int) -> tuple[int, ...]:
    """The path from ``x`` to its dominant cell."""
    d = field.theta[x]
    return (x,) if d == x else (x, d)


def nu_minus(field: MultivectorField, x: int) -> tuple[int, ...]:
    """``nu(x)`` without its final dominant cell."""
    return nu(field, x)[:-1]


@dataclass(frozen=True)
class LassoSolution:
    """An eventually periodic solution ``back^inf . stem . cycle^inf``.

    ``cycle`` repeats forever forward.  ``back``, when given, repeats forever
    backward; when empty the backward behaviour is taken to be ``cycle``.
    """

    stem: tuple[int, ...]
    cycle: tuple[int, ...]
    back: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "stem", tuple(self.stem))
        object.__setattr__(self, "cycle", tuple(self.cycle))
        object.__setattr__(self, "back", tuple(self.back))
        if not self.cycle:
            raise PathError("a lasso needs a nonempty cycle")

    def validate(self, field: MultivectorField) -> None:
        g = field.graph
        body = self.stem + self.cycle
        if not is_path(field, body) or not g.has_arrow(self.cycle[-1], self.cycle[0]):
            raise PathError("stem and cycle do not form a lasso")
        if self.back:
            if not is_path(field, self.back) or not g.has_arrow(self.back[-1], self.back[0]):
                raise PathError("backward part is not a cycle")
            if not g.has_arrow(self.back[-1], body[0]):
                raise PathError("backward cycle does not lead into the stem")

    def image(self) -> frozenset:
        return frozenset(self.back + self.stem + self.cycle)

    def shift(self) -> "LassoSolution":
        """Drop the first forward cell."""
        if self.stem:
            return LassoSolution(self.stem[1:], self.cycle, self.back)
        return LassoSolution((), self.cycle[1:] + self.cycle[:1], self.back)

    def normalized(self) -> "LassoSolution":
        """Canonical representative: shortest stem, primitive cycle, minimal rotation."""
        stem, cycle = list(self.stem), _primitive(self.cycle)
        while stem and stem[-1] == cycle[-1]:
            cycle = [stem.pop()] + cycle[:-1]
        if not stem:
            cycle = _min_rotation(cycle)
        back = _min_rotation(_primitive(self.back)) if self.back else []
        return LassoSolution(tuple(stem), tuple(cycle), tuple(back))


def _primitive(seq) -> list:
    seq = list(seq)
    n = len(seq)
    for p in range(1, n + 1):
        if n % p == 0 and seq == seq[:p] * (n // p):
            return seq[:p]
    return seq


def _min_rotation(seq) -> list:
    if not seq:
        return []
    k = min(range(len(seq)), key=lambda i: seq[i:] + seq[:i])
    return seq[k:] + seq[:k]


# index pairs


@dataclass(frozen=True)
class IndexPair:
    p1: frozenset
    p2: frozenset

    def __post_init__(self):
        object.__setattr__(self, "p1", frozenset(self.p1))
        object.__setattr__(self, "p2", frozenset(self.p2))

    @property
    def difference(self) -> frozenset:
        return self.p1 - self.p2


def validate_index_pair(field: MultivectorField, P: IndexPair, S: Iterable[int]) -> Report:
    """Check closedness, nesting and the three index pair conditions."""
    S = frozenset(S)
    cx, g = field.complex, field.graph
    report = Report()
    if not cx.is_closed(P.p1):
        report.add("p1 not closed", *sorted(cx.mouth(P.p1)))
    if not cx.is_closed(P.p2):
        report.add("p2 not closed", *sorted(cx.mouth(P.p2)))
    if not P.p2 <= P.p1:
        report.add("not nested", *sorted(P.p2 - P.p1))
    bad = (P.p1 & g.image(P.p2)) - P.p2
    if bad:
        report.add("ip1", *sorted(bad))
    exiting = frozenset(x for x in P.p1 if not g.succ[x] <= P.p1)
    if exiting - P.p2:
        report.add("ip2", *sorted(exiting - P.p2))
    inv = invariant_part(field, P.p1 - P.p2)
    if inv != S:
        report.add("ip3", *sorted(inv ^ S))
    return report


def exit_set(field: MultivectorField, P: IndexPair) -> frozenset:
    """Cells of ``P1`` all of whose forward solutions meet ``P2``."""
    g = field.graph
    if (P.p1 & g.image(P.p2)) - P.p2 or any(
        not g.succ[x] <= P.p1 for x in P.p1 - P.p2
    ):
        raise PreconditionError("exit set needs a pair satisfying the first two index pair conditions")
    W = frozenset(field.complex.cells) - P.p2
    escaping = reach_backward(field, cycle_cells(field, W), W)
    return P.p1 - escaping


def saturate(field: MultivectorField, P: IndexPair, S: Iterable[int]) -> IndexPair:
    """The saturated pair ``(S u E_P, E_P)`` built from an index pair for ``S``."""
    S = frozenset(S)
    report = validate_index_pair(field, P, S)
    if not report.ok:
        raise PreconditionError(f"not an index pair: {report.violations}")
    E = exit_set(field, P)
    Q = IndexPair(S | E, E)
    check = validate_index_pair(field, Q, S)
    if not check.ok or Q.difference != S:
        raise InternalConsistencyError(f"saturated pair failed validation: {check.violations}")
    return Q


def canonical_pair(field: MultivectorField, S: Iterable[int]) -> IndexPair:
    S = frozenset(S)
    return IndexPair(field.complex.closure(S), field.complex.mouth(S))


def conley_index(field: MultivectorField, S: Iterable[int]) -> Polynomial:
    """Conley polynomial of an isolated invariant set."""
    S = frozenset(S)
    if not is_isolated_invariant(field, S):
        raise PreconditionError("Conley index needs an isolated invariant set")
    return poincare(field.complex, S)


def decomposes_into(field: MultivectorField, S, S1, S2) -> bool:
    """Whether every full solution in ``S`` stays in ``S1`` or in ``S2``.

    When it does, the Conley polynomials are checked to add up.
    """
    S, S1, S2 = frozenset(S), frozenset(S1), frozenset(S2)
    for T in (S, S1, S2):
        if not is_isolated_invariant(field, T):
            raise PreconditionError("decomposition needs isolated invariant sets")
    if not (S1 | S2) <= S or S1 & S2:
        raise PreconditionError("S1 and S2 must be disjoint subsets of S")
    if S1 | S2 != S:
        return False
    if reach_forward(field, S1, S) & S2 or reach_forward(field, S2, S) & S1:
        return False
    total = poincare(field.complex, S1) + poincare(field.complex, S2)
    if total != poincare(field.complex, S):
        raise InternalConsistencyError("Conley index is not additive over a decomposition")
    return True


def connections(field: MultivectorField, S1: Iterable[int], S2: Iterable[int]) -> frozenset:
    """Cells whose dominant cell lies on a path from ``S1`` to ``S2``.

    For invariant ``S1`` and ``S2`` these are exactly the cells on full
    solutions whose backward limit lies in ``S1`` and forward limit in ``S2``.
    """
    good = reach_forward(field, S1) & reach_backward(field, S2)
    return frozenset(x for x in field.complex.cells if field.theta[x] in good)
