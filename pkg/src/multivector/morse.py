"""Recurrence, attractors, Morse decompositions and the Morse equation.

Morse sets are indexed ``0 .. n-1``.  The admissible order is stored as the
set of strict pairs ``(r, s)`` meaning ``r < s``: solutions may flow from
``M_s`` down to ``M_r`` but never back.  Lower sets of indices therefore
generate attractors and upper sets generate repellers.

When the complex is not invariant the decomposition lives in its invariant
part, which is itself a proper union of multivectors; index pairs are built
inside it.
"""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass, field as dc_field
from typing import Iterable, Sequence

import networkx as nx

from .complex import Report
from .dynamics import (
    IndexPair,
    LassoSolution,
    compat_hull_outer,
    connections,
    cycle_cells,
    invariant_part,
    is_invariant,
    is_isolated_invariant,
    reach_backward,
    reach_forward,
)
from .errors import InternalConsistencyError, PreconditionError
from .homology import ONE_PLUS_T, Polynomial, poincare
from .mvf import MultivectorField


def _transitive_closure(pairs: Iterable[tuple[int, int]], n: int) -> frozenset:
    g = nx.DiGraph()
    g.add_nodes_from(range(n))
    g.add_edges_from(pairs)
    return frozenset((r, s) for r in range(n) for s in nx.descendants(g, r))


@dataclass(frozen=True)
class MorseDecomposition:
    """Indexed Morse sets with an admissible order given by strict pairs ``r < s``."""

    sets: tuple[frozenset, ...]
    below: frozenset = dc_field(default_factory=frozenset)

    def __post_init__(self):
        sets = tuple(frozenset(s) for s in self.sets)
        object.__setattr__(self, "sets", sets)
        object.__setattr__(self, "below", _transitive_closure(self.below, len(sets)))

    def __len__(self):
        return len(self.sets)

    @property
    def indices(self) -> range:
        return range(len(self.sets))

    def less(self, r: int, s: int) -> bool:
        return (r, s) in self.below

    def leq(self, r: int, s: int) -> bool:
        return r == s or (r, s) in self.below

    def is_partial_order(self) -> bool:
        return all((s, r) not in self.below for r, s in self.below) and all(
            (r, r) not in self.below for r in self.indices
        )

    def is_lower(self, I: Iterable[int]) -> bool:
        I = set(I)
        return all(r in I for r, s in self.below if s in I)

    def is_upper(self, I: Iterable[int]) -> bool:
        I = set(I)
        return all(s in I for r, s in self.below if r in I)

    def is_convex(self, I: Iterable[int]) -> bool:
        I = set(I)
        return all(
            t in I for t in self.indices if any(self.leq(a, t) and self.leq(t, b) for a in I for b in I)
        )

    def lower_hull(self, I: Iterable[int]) -> frozenset:
        """Indices below some member of ``I`` (``I`` included)."""
        I = set(I)
        return frozenset(r for r in self.indices if any(self.leq(r, a) for a in I))

    def strict_hull(self, I: Iterable[int]) -> frozenset:
        """The lower hull of ``I`` without ``I`` itself."""
        return self.lower_hull(I) - frozenset(I)

    def convex_hull(self, I: Iterable[int]) -> frozenset:
        I = set(I)
        return frozenset(
            t for t in self.indices if any(self.leq(a, t) and self.leq(t, b) for a in I for b in I)
        )

    def hasse(self) -> list[tuple[int, int]]:
        """Covering pairs ``(s, r)`` with ``r < s``, oriented along the flow."""
        out = []
        for r, s in sorted(self.below):
            if not any((r, m) in self.below and (m, s) in self.below for m in self.indices):
                out.append((s, r))
        return sorted(out)

    def linear_extension(self) -> list[int]:
        """Topological order from the bottom, ties broken by smallest cell id."""
        key = [min(s) if s else -1 for s in self.sets]
        indeg = {r: 0 for r in self.indices}
        for r, s in self.below:
            indeg[s] += 1
        heap = [(key[r], r) for r in self.indices if indeg[r] == 0]
        heapq.heapify(heap)
        out = []
        while heap:
            _, r = heapq.heappop(heap)
            out.append(r)
            for a, s in self.below:
                if a == r:
                    indeg[s] -= 1
                    if indeg[s] == 0:
                        heapq.heappush(heap, (key[s], s))
        if len(out) != len(self.sets):
            raise PreconditionError("order is not a partial order")
        return out


# recurrence


def _recurrent_components(field: MultivectorField) -> list[frozenset]:
    g = field.graph
    comps = []
    for comp in nx.strongly_connected_components(g.nx):
        if len(comp) > 1 or next(iter(comp)) in g.succ[next(iter(comp))]:
            comps.append(frozenset(comp))
    return comps


def chain_recurrent_set(field: MultivectorField) -> frozenset:
    """Cells whose dominant cell returns to itself along a nontrivial path."""
    cyc = cycle_cells(field, field.complex.cells)
    return frozenset(x for x in field.complex.cells if field.theta[x] in cyc)


def reach_order(field: MultivectorField, sets: Sequence[Iterable[int]]) -> frozenset:
    """Strict pairs ``(r, s)`` such that some path runs from ``M_s`` into ``M_r``."""
    sets = [frozenset(s) for s in sets]
    owner = {x: r for r, s in enumerate(sets) for x in s}
    pairs = set()
    for s, M in enumerate(sets):
        for x in reach_forward(field, M):
            r = owner.get(x)
            if r is not None and r != s:
                pairs.add((r, s))
    return frozenset(pairs)


def basic_sets(field: MultivectorField) -> MorseDecomposition:
    """The finest Morse decomposition: classes of mutually recurrent cells."""
    classes = []
    for comp in _recurrent_components(field):
        classes.append(frozenset(x for x in field.complex.cells if field.theta[x] in comp))
    classes.sort(key=min)
    return MorseDecomposition(tuple(classes), reach_order(field, classes))


def decomposition_from_sets(field: MultivectorField, sets: Sequence[Iterable[int]]) -> MorseDecomposition:
    """Wrap candidate Morse sets with the order induced by reachability."""
    sets = [frozenset(s) for s in sets]
    return MorseDecomposition(tuple(sets), reach_order(field, sets))


def validate_decomposition(field: MultivectorField, sets: Sequence[Iterable[int]], order=None) -> Report:
    """Check the Morse decomposition axioms for a candidate family.

    ``order`` is an optional collection of strict pairs ``(r, s)`` meaning
    ``r < s``; when omitted the order induced by reachability is used.
    """
    sets = [frozenset(s) for s in sets]
    report = Report()
    seen: dict[int, int] = {}
    for r, M in enumerate(sets):
        for x in M:
            if x in seen:
                report.add("not disjoint", x)
            seen[x] = r
        if not is_isolated_invariant(field, M):
            report.add("not isolated invariant", r)
    for B in basic_sets(field).sets:
        owners = {seen.get(x) for x in B}
        if None in owners:
            report.add("(ii) recurrence not covered", *sorted(B))
        elif len(owners) > 1:
            report.add("(ii) recurrent class split", *sorted(B))
    reach = reach_order(field, sets)
    for r, s in reach:
        if (s, r) in reach and r < s:
            report.add("(ii) mutual connection", r, s)
    if order is not None:
        given = _transitive_closure(order, len(sets))
        if any((s, r) in given for r, s in given) or any((r, r) in given for r in range(len(sets))):
            report.add("order not a partial order")
        for r, s in sorted(reach - given):
            report.add("(ii) order misses connection", r, s)
    for r, M in enumerate(sets):
        outside = (reach_forward(field, M) & reach_backward(field, M)) - M
        if outside:
            report.add("(iii) return through outside cells", r, *sorted(outside))
    return report


def finest_check(field: MultivectorField, dec: MorseDecomposition) -> bool:
    """Every recurrent class lies inside a single Morse set."""
    return all(any(B <= M for M in dec.sets) for B in basic_sets(field).sets)


# limit sets, attractors and repellers


def limit_sets(field: MultivectorField, sol: LassoSolution) -> tuple[frozenset, frozenset]:
    """Backward and forward limit sets of an eventually periodic solution."""
    sol.validate(field)
    omega = None
    tail = sol
    for _ in range(len(sol.stem) + 1):
        part = invariant_part(field, compat_hull_outer(field, tail.stem + tail.cycle))
        omega = part if omega is None else omega & part
        tail = tail.shift()
    back = sol.back or sol.cycle
    alpha = invariant_part(field, compat_hull_outer(field, back))
    return alpha, omega


def is_attractor(field: MultivectorField, S: Iterable[int]) -> bool:
    S = frozenset(S)
    cx = field.complex
    result = is_invariant(field, S) and cx.is_closed(S)
    trapping = is_isolated_invariant(field, S) and cx.is_closed(S) and field.graph.image(S) <= S
    if result != trapping:
        raise InternalConsistencyError("attractor characterizations disagree")
    return result


def is_repeller(field: MultivectorField, S: Iterable[int]) -> bool:
    S = frozenset(S)
    cx = field.complex
    result = is_invariant(field, S) and cx.is_open(S)
    trapping = is_isolated_invariant(field, S) and cx.is_open(S) and field.graph.preimage(S) <= S
    if result != trapping:
        raise InternalConsistencyError("repeller characterizations disagree")
    return result


def is_trapping_region(field: MultivectorField, N: Iterable[int]) -> bool:
    N = frozenset(N)
    return all(field.mv(x) <= N for x in N) and field.graph.image(N) <= N


def is_backward_trapping_region(field: MultivectorField, N: Iterable[int]) -> bool:
    N = frozenset(N)
    return all(field.mv(x) <= N for x in N) and field.graph.preimage(N) <= N


def dual_repeller(field: MultivectorField, A: Iterable[int]) -> frozenset:
    return invariant_part(field, frozenset(field.complex.cells) - frozenset(A))


def dual_attractor(field: MultivectorField, R: Iterable[int]) -> frozenset:
    return invariant_part(field, frozenset(field.complex.cells) - frozenset(R))


def validate_ar_pair(field: MultivectorField, A: Iterable[int], R: Iterable[int]) -> bool:
    """Whether ``(A, R)`` is an attractor-repeller pair."""
    A, R = frozenset(A), frozenset(R)
    if A & R or not is_attractor(field, A) or not is_repeller(field, R):
        return False
    X = frozenset(field.complex.cells)
    S = invariant_part(field, X)
    for c in cycle_cells(field, X):
        if c not in R and not (reach_forward(field, [c]) & S) <= A:
            return False
        if c not in A and not (reach_backward(field, [c]) & S) <= R:
            return False
    if S == X and (dual_repeller(field, A) != R or dual_attractor(field, R) != A):
        raise InternalConsistencyError("attractor-repeller pair is not a dual pair")
    return True


# Morse sets and index pairs


def morse_set(field: MultivectorField, dec: MorseDecomposition, I: Iterable[int]) -> frozenset:
    """Union of all connections between the Morse sets indexed by ``I``."""
    U = frozenset().union(*(dec.sets[r] for r in I))
    return connections(field, U, U)


def invariant_ambient(field: MultivectorField) -> MultivectorField:
    """The field itself if the complex is invariant, else its restriction to the invariant part."""
    X = frozenset(field.complex.cells)
    S = invariant_part(field, X)
    return field if S == X else field.restrict(S)


def morse_index_pair(field: MultivectorField, dec: MorseDecomposition, I: Iterable[int]) -> IndexPair:
    """The pair ``(N(lower hull of I), N(strict lower hull of I))`` for convex ``I``.

    ``N(J)`` is the complement of the dual repeller of ``M(J)``, taken inside
    the invariant part of the complex.
    """
    I = frozenset(I)
    if not dec.is_convex(I):
        raise PreconditionError("index pairs of Morse sets need a convex index set")
    amb = invariant_ambient(field)
    S = frozenset(amb.complex.cells)

    def N(J):
        return S - invariant_part(amb, S - morse_set(field, dec, J))

    return IndexPair(N(dec.lower_hull(I)), N(dec.strict_hull(I)))


# Morse equation and inequalities


@dataclass
class MorseEquationReport:
    order: list[int]
    morse_polys: list[Polynomial]
    attractor_polys: list[Polynomial]
    q: list[Polynomial]
    p_invariant: Polynomial
    p_complex: Polynomial
    q_exterior: Polynomial
    forced: list[int]

    @property
    def q_total(self) -> Polynomial:
        """Quotient relating the Morse sets to the whole complex."""
        return sum(self.q, Polynomial()) + self.q_exterior

    @property
    def lhs(self) -> Polynomial:
        return sum(self.morse_polys, Polynomial())

    @property
    def residual(self) -> Polynomial:
        return self.lhs - self.p_complex - ONE_PLUS_T * self.q_total

    def equation(self) -> str:
        if not self.q_total:
            return f"{self.lhs} = {self.p_complex}"
        return f"{self.lhs} = {self.p_complex} + (1 + t)({self.q_total})"

    def to_json(self) -> dict:
        return {
            "order": self.order,
            "morse_sets": [str(p) for p in self.morse_polys],
            "attractors": [str(p) for p in self.attractor_polys],
            "q_steps": [str(p) for p in self.q],
            "q_exterior": str(self.q_exterior),
            "p_invariant": str(self.p_invariant),
            "p_X": str(self.p_complex),
            "q": str(self.q_total),
            "residual": str(self.residual),
            "forced_connections": self.forced,
            "equation": self.equation(),
        }


def morse_equation(
    field: MultivectorField, dec: MorseDecomposition | None = None, order: Sequence[int] | None = None
) -> MorseEquationReport:
    """Verify the Morse equation along a linear extension of the order.

    With ``A_i`` the Morse set of the first ``i`` indices, each step quotient
    ``q_i = (p(M_i) + p(A_{i-1}) - p(A_i)) / (1 + t)`` must be exact and
    nonnegative.  A final quotient relates the invariant part to the whole
    complex through the index pair (complex, empty set).
    """
    if dec is None:
        dec = basic_sets(field)
    if order is None:
        order = dec.linear_extension()
    order = list(order)
    if sorted(order) != list(dec.indices):
        raise PreconditionError("order must list every index once")
    pos = {r: i for i, r in enumerate(order)}
    if any(pos[r] > pos[s] for r, s in dec.below):
        raise PreconditionError("order is not a linear extension")
    cx = field.complex
    morse_polys, attractor_polys, qs, forced = [], [], [], []
    prev, p_prev = frozenset(), Polynomial()
    for i, r in enumerate(order):
        A = morse_set(field, dec, order[: i + 1])
        pM, pA = poincare(cx, dec.sets[r]), poincare(cx, A)
        q = _exact_quotient(pM + p_prev - pA, f"step {i}")
        if q and not connections(field, dec.sets[r], prev):
            raise InternalConsistencyError(f"step {i} forces a connection that does not exist")
        if q:
            forced.append(r)
        morse_polys.append(pM)
        attractor_polys.append(pA)
        qs.append(q)
        prev, p_prev = A, pA
    p_inv = poincare(cx, invariant_part(field, cx.cells))
    p_cx = poincare(cx)
    q0 = _exact_quotient(p_inv - p_cx, "invariant part")
    rep = MorseEquationReport(order, morse_polys, attractor_polys, qs, p_inv, p_cx, q0, forced)
    if rep.residual:
        raise InternalConsistencyError(f"Morse equation residual {rep.residual}")
    return rep


def _exact_quotient(p: Polynomial, where: str) -> Polynomial:
    q, r = p.divmod_one_plus_t()
    if r or not q.is_nonnegative():
        raise InternalConsistencyError(f"{where}: {p} is not (1 + t) times a nonnegative polynomial")
    return q


@dataclass
class MorseInequalityReport:
    m: list[int]
    c: list[int]
    strong: list[bool]
    weak: list[bool]

    @property
    def ok(self) -> bool:
        return all(self.strong) and all(self.weak)


def morse_inequalities(field: MultivectorField, dec: MorseDecomposition | None = None) -> MorseInequalityReport:
    """Compare ``m_k``, summed over the Morse sets, with the Betti numbers ``c_k`` of the complex."""
    if dec is None:
        dec = basic_sets(field)
    cx = field.complex
    total = sum((poincare(cx, M) for M in dec.sets), Polynomial())
    px = poincare(cx)
    top = max(total.degree, px.degree, cx.max_dim, 0)
    m = [total[k] for k in range(top + 1)]
    c = [px[k] for k in range(top + 1)]
    strong, weak = [], []
    for k in range(top + 1):
        lhs = sum((-1) ** (k - j) * m[j] for j in range(k + 1))
        rhs = sum((-1) ** (k - j) * c[j] for j in range(k + 1))
        strong.append(lhs >= rhs)
        weak.append(m[k] >= c[k])
    rep = MorseInequalityReport(m, c, strong, weak)
    if not rep.ok:
        raise InternalConsistencyError("Morse inequalities fail")
    return rep


# Conley-Morse graph


@dataclass
class ConleyMorseGraph:
    nodes: dict[int, Polynomial]
    edges: list[tuple[int, int]]
    sets: tuple[frozenset, ...] = ()

    def to_dot(self) -> str:
        lines = ["digraph conley_morse {"]
        for r in sorted(self.nodes):
            lines.append(f'  M{r} [label="M{r}: {self.nodes[r]}"];')
        for a, b in self.edges:
            lines.append(f"  M{a} -> M{b};")
        lines.append("}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {
            "nodes": [{"id": r, "poincare": str(self.nodes[r])} for r in sorted(self.nodes)],
            "edges": [list(e) for e in self.edges],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, sort_keys=True) + "\n"

    def label_edges(self) -> set[tuple[str, str]]:
        return {(str(self.nodes[a]), str(self.nodes[b])) for a, b in self.edges}


def conley_morse_graph(field: MultivectorField, dec: MorseDecomposition | None = None) -> ConleyMorseGraph:
    """Hasse diagram of the reachability order, labelled by Conley polynomials."""
    if dec is None:
        dec = basic_sets(field)
    minimal = MorseDecomposition(dec.sets, reach_order(field, dec.sets))
    nodes = {r: poincare(field.complex, M) for r, M in enumerate(dec.sets)}
    return ConleyMorseGraph(nodes, minimal.hasse(), dec.sets)
