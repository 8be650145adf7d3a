"""Multivector fields, their theta maps and the dynamics graph.

A multivector field is stored as its theta map, sending every cell to the
dominant (unique maximal) cell of its multivector.  The dynamics graph has an
arrow from every non-dominant cell to its dominant cell, arrows from every
dominant cell into the mouth of its multivector, and a loop at the dominant
cell of each critical multivector.
"""

from __future__ import annotations

from functools import cached_property
from typing import Iterable, Mapping

import networkx as nx

from .complex import LefschetzComplex, key_to_str
from .errors import InvalidFieldError, PreconditionError
from .homology import is_zero_space, poincare


class DynGraph:
    """Successor sets of the multivalued map of a field, with arrow kinds."""

    def __init__(self, field: "MultivectorField"):
        cx = field.complex
        succ: dict[int, frozenset] = {}
        kinds: dict[tuple[int, int], str] = {}
        for x in cx.cells:
            d = field.theta[x]
            if d != x:
                succ[x] = frozenset((d,))
                kinds[x, d] = "up"
                continue
            mv = field.multivectors[x]
            targets = set(cx.cl(x) - mv)
            for y in targets:
                kinds[x, y] = "down"
            if field.critical[x]:
                targets.add(x)
                kinds[x, x] = "loop"
            succ[x] = frozenset(targets)
        pred: dict[int, set] = {x: set() for x in cx.cells}
        for x, ys in succ.items():
            for y in ys:
                pred[y].add(x)
        self.succ = succ
        self.pred = {x: frozenset(p) for x, p in pred.items()}
        self.kinds = kinds

    def successors(self, x: int) -> frozenset:
        return self.succ[x]

    def predecessors(self, x: int) -> frozenset:
        return self.pred[x]

    def image(self, A: Iterable[int]) -> frozenset:
        return frozenset(y for x in A for y in self.succ[x])

    def preimage(self, A: Iterable[int]) -> frozenset:
        return frozenset(y for x in A for y in self.pred[x])

    def has_arrow(self, x: int, y: int) -> bool:
        return y in self.succ.get(x, ())

    @cached_property
    def nx(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(self.succ)
        g.add_edges_from((x, y) for x, ys in self.succ.items() for y in ys)
        return g


class MultivectorField:
    """A partition of a complex into multivectors, represented by theta.

    Use :meth:`from_theta` or :meth:`from_partition`; both validate their input
    and raise :class:`InvalidFieldError` listing every violation.
    """

    def __init__(self, complex: LefschetzComplex, theta: Mapping[int, int]):
        violations = theta_violations(complex, theta)
        if violations:
            raise InvalidFieldError(
                "theta does not define a multivector field: "
                + ", ".join(sorted({k for k, _ in violations})),
                violations,
            )
        self.complex = complex
        self.theta = {x: theta[x] for x in complex.cells}
        fibers: dict[int, set] = {}
        for x, d in self.theta.items():
            fibers.setdefault(d, set()).add(x)
        self.multivectors = {d: frozenset(cells) for d, cells in fibers.items()}
        self.critical = {
            d: not is_zero_space(complex, cells) for d, cells in self.multivectors.items()
        }

    @classmethod
    def from_theta(cls, complex: LefschetzComplex, theta: Mapping[int, int]) -> "MultivectorField":
        return cls(complex, theta)

    @classmethod
    def from_partition(cls, complex: LefschetzComplex, parts: Iterable[Iterable[int]]) -> "MultivectorField":
        parts = [frozenset(p) for p in parts]
        violations = []
        seen: dict[int, int] = {}
        for i, part in enumerate(parts):
            for x in part:
                if x not in complex:
                    violations.append(("unknown cell", (x,)))
                elif x in seen:
                    violations.append(("overlap", (x,)))
                else:
                    seen[x] = i
        missing = [x for x in complex.cells if x not in seen]
        if missing:
            violations.append(("not covered", tuple(missing)))
        theta = {}
        for part in parts:
            part = frozenset(x for x in part if x in complex)
            if not part:
                violations.append(("empty part", ()))
                continue
            if not complex.is_proper(part):
                violations.append(("not proper", tuple(sorted(part))))
            maxima = [x for x in part if not any(x in complex.cl(y) for y in part if y != x)]
            if len(maxima) != 1:
                violations.append(("several maxima", tuple(sorted(maxima))))
                continue
            for x in part:
                theta[x] = maxima[0]
        if violations:
            raise InvalidFieldError(
                "partition does not define a multivector field: "
                + ", ".join(sorted({k for k, _ in violations})),
                violations,
            )
        return cls(complex, theta)

    @classmethod
    def singletons(cls, complex: LefschetzComplex) -> "MultivectorField":
        return cls(complex, {x: x for x in complex.cells})

    def __repr__(self):
        return f"MultivectorField({len(self.multivectors)} multivectors on {len(self.complex)} cells)"

    # views

    def dominant(self, x: int) -> int:
        return self.theta[x]

    def mv(self, x: int) -> frozenset:
        """The multivector containing ``x``."""
        return self.multivectors[self.theta[x]]

    def is_critical(self, x: int) -> bool:
        """Whether the multivector of ``x`` is critical."""
        return self.critical[self.theta[x]]

    def partition(self) -> list[frozenset]:
        return [self.multivectors[d] for d in sorted(self.multivectors)]

    def critical_multivectors(self) -> list[frozenset]:
        return [self.multivectors[d] for d in sorted(self.multivectors) if self.critical[d]]

    def strict_multivectors(self) -> list[frozenset]:
        return [mv for mv in self.partition() if len(mv) > 2]

    @cached_property
    def graph(self) -> DynGraph:
        return DynGraph(self)

    def restrict(self, A: Iterable[int]) -> "MultivectorField":
        """The field induced on a proper union of multivectors."""
        A = frozenset(A)
        if any(self.theta[x] not in A for x in A):
            raise PreconditionError("restriction needs a union of whole multivectors")
        sub = self.complex.restrict(A)
        return MultivectorField(sub, {x: self.theta[x] for x in A})

    # serialization

    def to_json(self) -> dict:
        key = self.complex.key
        return {"theta": {key_to_str(key(x)): key_to_str(key(self.theta[x])) for x in self.complex.cells}}

    @classmethod
    def from_json(cls, complex: LefschetzComplex, data: Mapping) -> "MultivectorField":
        """Accept ``{"theta": {...}}`` or ``{"partition": [[...], ...]}``."""
        if not isinstance(data, Mapping):
            raise ValueError("field JSON must be an object")
        if "theta" in data:
            theta = {}
            for a, b in data["theta"].items():
                theta[complex.id_of(a)] = complex.id_of(b)
            return cls.from_theta(complex, theta)
        if "partition" in data:
            return cls.from_partition(complex, [[complex.id_of(a) for a in part] for part in data["partition"]])
        raise ValueError("field JSON needs a 'theta' or a 'partition' entry")


def theta_violations(complex: LefschetzComplex, theta: Mapping[int, int]) -> list:
    """Check the three conditions on a theta map, one entry per violation.

    (i) ``x`` is a face of ``theta(x)``; (ii) ``theta`` is idempotent;
    (iii) cells in the open star of ``x`` and below ``theta(x)`` share its image.
    """
    out = []
    missing = [x for x in complex.cells if x not in theta]
    if missing:
        out.append(("not total", tuple(missing)))
    extra = [x for x in theta if x not in complex]
    if extra:
        out.append(("unknown cell", tuple(extra)))
    bad_image = [x for x in complex.cells if x in theta and theta[x] not in complex]
    if bad_image:
        out.append(("unknown cell", tuple(bad_image)))
    if out:
        return out
    for x in complex.cells:
        y = theta[x]
        if x not in complex.cl(y):
            out.append(("condition (i)", (x, y)))
        if theta[y] != y:
            out.append(("condition (ii)", (x, y)))
        for z in complex.opn(x) & complex.cl(y):
            if theta[z] != y:
                out.append(("condition (iii)", (x, z)))
    return out


def is_vector_field(field: MultivectorField) -> bool:
    return all(len(mv) <= 2 for mv in field.multivectors.values())


def _same_complex(a: MultivectorField, b: MultivectorField):
    if a.complex is not b.complex and a.complex.cells != b.complex.cells:
        raise PreconditionError("fields live on different complexes")


def is_refinement(coarse: MultivectorField, fine: MultivectorField) -> bool:
    """Every multivector of ``coarse`` is a union of multivectors of ``fine``."""
    _same_complex(coarse, fine)
    return all(fine.mv(x) <= coarse.mv(x) for x in coarse.complex.cells)


def is_forman_refinement(coarse: MultivectorField, fine: MultivectorField) -> bool:
    """A refinement by a vector field that adds no dynamics inside regular multivectors.

    Each regular coarse multivector must have empty invariant part for the
    fine field, and no coarse multivector may contain two critical fine
    vectors.
    """
    from .dynamics import invariant_part

    if not is_refinement(coarse, fine) or not is_vector_field(fine):
        return False
    for d, mv in coarse.multivectors.items():
        crit = sum(1 for e in fine.multivectors if e in mv and fine.critical[e])
        if crit > 1:
            return False
        if not coarse.critical[d] and invariant_part(fine, mv):
            return False
    return True


def is_acyclic(field: MultivectorField) -> bool:
    """True iff the dynamics graph has no loops and no cycles through two cells."""
    g = field.graph
    if any(x in ys for x, ys in g.succ.items()):
        return False
    return nx.is_directed_acyclic_graph(g.nx)


def zero_space_check_acyclic(field: MultivectorField) -> bool:
    """For an acyclic field of regular multivectors, confirm the complex has no homology."""
    if any(field.critical.values()) or not is_acyclic(field):
        raise PreconditionError("needs an acyclic field without critical multivectors")
    return not poincare(field.complex)
