"""Lefschetz complexes over a field and the finite topology of their cells.

A complex is a finite set of graded cells together with incidence
coefficients ``kappa(x, y)``.  Cells are addressed by integer ids; every cell
also carries a hashable key (a lattice coordinate for cubical grids, a sorted
vertex tuple for simplicial complexes, a string for complexes read from
JSON).  Restricting a complex to a proper subset keeps the original ids, so
sets computed on a restriction can be compared with sets of the parent.
"""

from __future__ import annotations

import itertools
import json
import os
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Hashable, Iterable, Mapping

from .errors import NotProperError, PreconditionError, UnknownCellError

CellSet = frozenset

DEBUG_CHECKS = bool(os.environ.get("MULTIVECTOR_DEBUG"))


@dataclass(frozen=True)
class Field:
    """Coefficient field: integers mod 2 or the rationals."""

    name: str

    def coerce(self, value):
        if self.name == "mod2":
            if isinstance(value, Fraction):
                if value.denominator % 2 == 0:
                    raise ValueError(f"{value} has no image in GF(2)")
                value = value.numerator
            return int(value) % 2
        return Fraction(value)

    def __str__(self):
        return self.name


MOD2 = Field("mod2")
RATIONAL = Field("rational")
FIELDS = {"mod2": MOD2, "rational": RATIONAL}


def get_field(spec) -> Field:
    if isinstance(spec, Field):
        return spec
    try:
        return FIELDS[spec]
    except KeyError:
        raise ValueError(f"unknown coefficient field {spec!r}; use 'mod2' or 'rational'") from None


@dataclass
class Report:
    """Outcome of a validation: empty ``violations`` means success."""

    violations: list = dc_field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok

    def add(self, kind: str, *cells):
        self.violations.append((kind, tuple(cells)))

    def kinds(self) -> set:
        return {kind for kind, _ in self.violations}


def key_to_str(key) -> str:
    if isinstance(key, str):
        return key
    if isinstance(key, tuple):
        return ",".join(str(k) for k in key)
    return str(key)


class LefschetzComplex:
    """A finite graded cell set with incidence coefficients in a field.

    :param dims: mapping cell id -> dimension
    :param kappa: mapping ``(x, y)`` -> coefficient; zero entries are dropped
    :param field: ``"mod2"`` (default) or ``"rational"``
    :param keys: optional mapping cell id -> hashable key (defaults to the id)

    Construction does not check the grading or the ``kappa`` condition; call
    :meth:`validate` for that.
    """

    def __init__(
        self,
        dims: Mapping[int, int],
        kappa: Mapping[tuple[int, int], object] = (),
        field="mod2",
        keys: Mapping[int, Hashable] | None = None,
    ):
        self.field = get_field(field)
        self._dims = {int(x): int(d) for x, d in dims.items()}
        self.cells: tuple[int, ...] = tuple(sorted(self._dims))
        self._boundary: dict[int, dict[int, object]] = {x: {} for x in self.cells}
        self._coboundary: dict[int, dict[int, object]] = {x: {} for x in self.cells}
        items = kappa.items() if isinstance(kappa, Mapping) else kappa
        for (x, y), c in items:
            if x not in self._dims:
                raise UnknownCellError(x)
            if y not in self._dims:
                raise UnknownCellError(y)
            c = self.field.coerce(c)
            if c:
                self._boundary[x][y] = c
                self._coboundary[y][x] = c
        if keys is None:
            self._keys = {x: x for x in self.cells}
        else:
            self._keys = {x: keys[x] for x in self.cells}
        self._by_key = {k: x for x, k in self._keys.items()}
        self._by_str = {key_to_str(k): x for x, k in self._keys.items()}
        self._cl_cache: dict[int, frozenset] = {}
        self._opn_cache: dict[int, frozenset] = {}

    @classmethod
    def from_keys(cls, cells: Mapping[Hashable, int], kappa: Mapping = (), field="mod2"):
        """Build a complex whose cells are given by key; ids are assigned in order."""
        keys = {}
        ids = {}
        for i, k in enumerate(cells):
            keys[i] = k
            ids[k] = i
        items = kappa.items() if isinstance(kappa, Mapping) else kappa
        try:
            kap = {(ids[a], ids[b]): c for (a, b), c in items}
        except KeyError as exc:
            raise UnknownCellError(exc.args[0]) from None
        return cls({ids[k]: d for k, d in cells.items()}, kap, field, keys)

    # basic access

    def __len__(self):
        return len(self.cells)

    def __iter__(self):
        return iter(self.cells)

    def __contains__(self, x):
        return x in self._dims

    def __repr__(self):
        return f"LefschetzComplex({len(self)} cells, field={self.field})"

    def dim(self, x: int) -> int:
        try:
            return self._dims[x]
        except KeyError:
            raise UnknownCellError(x) from None

    @property
    def max_dim(self) -> int:
        return max(self._dims.values(), default=-1)

    def cells_of_dim(self, q: int) -> tuple[int, ...]:
        return tuple(x for x in self.cells if self._dims[x] == q)

    def kappa(self, x: int, y: int):
        self._check(x)
        self._check(y)
        return self._boundary[x].get(y, self.field.coerce(0))

    def boundary(self, x: int) -> dict[int, object]:
        """Nonzero ``kappa(x, .)`` entries as a mapping facet -> coefficient."""
        self._check(x)
        return self._boundary[x]

    def facets(self, x: int):
        self._check(x)
        return self._boundary[x].keys()

    def cofacets(self, x: int):
        self._check(x)
        return self._coboundary[x].keys()

    def key(self, x: int):
        self._check(x)
        return self._keys[x]

    def id_of(self, key) -> int:
        """Cell id for a key, or for the string rendering of a key."""
        if key in self._by_key:
            return self._by_key[key]
        name = key_to_str(key)
        if name in self._by_str:
            return self._by_str[name]
        raise UnknownCellError(key)

    def ids(self, keys: Iterable) -> frozenset:
        return frozenset(self.id_of(k) for k in keys)

    def keys_of(self, cells: Iterable[int]) -> list:
        return [self._keys[x] for x in sorted(cells)]

    def _check(self, x):
        if x not in self._dims:
            raise UnknownCellError(x)

    def _checked_set(self, A: Iterable[int]) -> frozenset:
        A = frozenset(A)
        for x in A:
            self._check(x)
        return A

    # validation

    def validate(self) -> Report:
        """Check the grading rule and that ``sum_y kappa(x,y) kappa(y,z)`` vanishes."""
        report = Report()
        for x in self.cells:
            for y in self._boundary[x]:
                if self._dims[x] != self._dims[y] + 1:
                    report.add("grading", x, y)
        for x in self.cells:
            sums: dict[int, object] = {}
            for y, a in self._boundary[x].items():
                for z, b in self._boundary[y].items():
                    sums[z] = self.field.coerce(sums.get(z, 0) + a * b)
            for z in sorted(sums):
                if sums[z]:
                    report.add("kappa", x, z)
        return report

    # topology

    def cl(self, x: int) -> frozenset:
        """All faces of ``x``, including ``x`` itself."""
        cached = self._cl_cache.get(x)
        if cached is None:
            self._check(x)
            cached = frozenset(_traverse([x], self._boundary))
            self._cl_cache[x] = cached
        return cached

    def opn(self, x: int) -> frozenset:
        """The smallest open set containing ``x``: all cells having ``x`` as a face."""
        cached = self._opn_cache.get(x)
        if cached is None:
            self._check(x)
            cached = frozenset(_traverse([x], self._coboundary))
            self._opn_cache[x] = cached
        return cached

    def closure(self, A: Iterable[int]) -> frozenset:
        A = self._checked_set(A)
        return frozenset(_traverse(A, self._boundary))

    def open_hull(self, A: Iterable[int]) -> frozenset:
        A = self._checked_set(A)
        return frozenset(_traverse(A, self._coboundary))

    def mouth(self, A: Iterable[int]) -> frozenset:
        A = self._checked_set(A)
        return self.closure(A) - A

    def is_closed(self, A: Iterable[int]) -> bool:
        A = self._checked_set(A)
        return all(y in A for x in A for y in self._boundary[x])

    def is_open(self, A: Iterable[int]) -> bool:
        A = self._checked_set(A)
        return all(y in A for x in A for y in self._coboundary[x])

    def is_proper(self, A: Iterable[int]) -> bool:
        """True iff the mouth of ``A`` is closed."""
        A = self._checked_set(A)
        result = self.is_closed(self.closure(A) - A)
        if DEBUG_CHECKS:
            assert result == self.is_convex(A), "properness characterizations disagree"
        return result

    def is_convex(self, A: Iterable[int]) -> bool:
        """True iff no cell outside ``A`` lies between two cells of ``A`` in the face order."""
        A = self._checked_set(A)
        for z in A:
            for y in self.cl(z):
                if y not in A and not self.cl(y).isdisjoint(A):
                    return False
        return True

    def restrict(self, A: Iterable[int]) -> "LefschetzComplex":
        """The subcomplex on a proper subset, keeping cell ids and keys."""
        A = self._checked_set(A)
        if not self.is_proper(A):
            raise NotProperError("subset is not proper")
        dims = {x: self._dims[x] for x in A}
        kappa = {(x, y): c for x in A for y, c in self._boundary[x].items() if y in A}
        return LefschetzComplex(dims, kappa, self.field, {x: self._keys[x] for x in A})

    def with_field(self, field) -> "LefschetzComplex":
        """The same cells and incidences read in another coefficient field."""
        kappa = {(x, y): c for x in self.cells for y, c in self._boundary[x].items()}
        return LefschetzComplex(self._dims, kappa, field, self._keys)

    # serialization

    def to_json(self) -> dict:
        cells = [{"id": key_to_str(self._keys[x]), "dim": self._dims[x]} for x in self.cells]
        kappa = []
        for x in self.cells:
            for y in sorted(self._boundary[x]):
                c = self._boundary[x][y]
                if isinstance(c, Fraction):
                    if c.denominator != 1:
                        raise ValueError("non-integer coefficients cannot be written")
                    c = c.numerator
                kappa.append([key_to_str(self._keys[x]), key_to_str(self._keys[y]), int(c)])
        return {"cells": cells, "kappa": kappa}

    @classmethod
    def from_json(cls, data: Mapping, field="mod2") -> "LefschetzComplex":
        """Parse ``{"cells": [{"id", "dim"}], "kappa": [[x, y, c]]}``."""
        if not isinstance(data, Mapping) or "cells" not in data:
            raise ValueError("complex JSON must be an object with a 'cells' list")
        cells = {}
        for entry in data["cells"]:
            try:
                name, dim = str(entry["id"]), entry["dim"]
            except (KeyError, TypeError):
                raise ValueError(f"cell entry {entry!r} needs 'id' and 'dim'") from None
            if not isinstance(dim, int) or dim < 0:
                raise ValueError(f"bad dimension for cell {name!r}")
            if name in cells:
                raise ValueError(f"duplicate cell id {name!r}")
            cells[name] = dim
        kappa = {}
        for entry in data.get("kappa", []):
            try:
                x, y, c = entry
            except (TypeError, ValueError):
                raise ValueError(f"kappa entry {entry!r} must be [x, y, coeff]") from None
            if not isinstance(c, int):
                raise ValueError("incidence coefficients must be integers")
            kappa[(str(x), str(y))] = c
        return cls.from_keys(cells, kappa, field)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, sort_keys=True) + "\n"


def _traverse(start: Iterable[int], adjacency: Mapping[int, Mapping]) -> set:
    seen = set(start)
    stack = list(seen)
    while stack:
        x = stack.pop()
        for y in adjacency[x]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return seen


def build_cubical_grid(n: int, field="mod2") -> LefschetzComplex:
    """The cubical complex of the square ``[0, 2n]^2``.

    Cells are keyed by their center of mass ``(i, j)``: vertices have two even
    coordinates, squares two odd ones and edges one of each.  Over the
    rationals the usual oriented cubical incidences are used.
    """
    if n < 1:
        raise PreconditionError("grid size must be at least 1")
    field = get_field(field)
    cells = {}
    for j in range(2 * n + 1):
        for i in range(2 * n + 1):
            cells[(i, j)] = (i % 2) + (j % 2)
    kappa = {}
    for (i, j), d in cells.items():
        if d == 1 and i % 2:
            kappa[(i, j), (i + 1, j)] = 1
            kappa[(i, j), (i - 1, j)] = -1
        elif d == 1:
            kappa[(i, j), (i, j + 1)] = 1
            kappa[(i, j), (i, j - 1)] = -1
        elif d == 2:
            kappa[(i, j), (i, j - 1)] = 1
            kappa[(i, j), (i + 1, j)] = 1
            kappa[(i, j), (i, j + 1)] = -1
            kappa[(i, j), (i - 1, j)] = -1
    order = sorted(cells, key=lambda k: (cells[k], k[1], k[0]))
    return LefschetzComplex.from_keys({k: cells[k] for k in order}, kappa, field)


def build_simplicial(facets: Iterable[Iterable[Hashable]], field="mod2") -> LefschetzComplex:
    """All faces of the given simplices with alternating-sign incidences.

    Cells are keyed by sorted vertex tuples.
    """
    simplices = set()
    for facet in facets:
        verts = list(facet)
        if not verts or len(set(verts)) != len(verts):
            raise ValueError(f"malformed facet {facet!r}")
        verts = tuple(sorted(verts))
        for r in range(1, len(verts) + 1):
            simplices.update(itertools.combinations(verts, r))
    ordered = sorted(simplices, key=lambda s: (len(s), s))
    kappa = {}
    for s in ordered:
        if len(s) > 1:
            for k in range(len(s)):
                kappa[s, s[:k] + s[k + 1:]] = (-1) ** k
    return LefschetzComplex.from_keys({s: len(s) - 1 for s in ordered}, kappa, field)
