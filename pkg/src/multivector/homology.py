"""Homology of proper subsets of a Lefschetz complex over a field.

Betti numbers come from ranks of the boundary matrices restricted to the
subset.  Over GF(2) columns are packed into Python integers and reduced with
xor; over the rationals columns are sparse dicts of fractions.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Sequence

from .complex import LefschetzComplex
from .errors import NotProperError, PreconditionError


class Polynomial:
    """Integer polynomial in ``t``, stored as coefficients by degree."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[int] = ()):
        c = [int(a) for a in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.coeffs = tuple(c)

    @classmethod
    def parse(cls, text: str) -> "Polynomial":
        """Inverse of ``str``: accepts terms like ``2``, ``t``, ``3*t^2``."""
        text = text.replace(" ", "")
        if text == "0":
            return cls()
        coeffs: dict[int, int] = {}
        for sign, body in re.findall(r"([+-]?)([^+-]+)", text):
            m = re.fullmatch(r"(\d+)?(?:\*?(t)(?:\^(\d+))?)?", body)
            if not m or not body:
                raise ValueError(f"cannot parse polynomial {text!r}")
            num, var, exp = m.groups()
            a = int(num) if num else 1
            deg = (int(exp) if exp else 1) if var else 0
            coeffs[deg] = coeffs.get(deg, 0) + (-a if sign == "-" else a)
        top = max(coeffs, default=-1)
        return cls(coeffs.get(k, 0) for k in range(top + 1))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, k: int) -> int:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0

    def __len__(self):
        return len(self.coeffs)

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, int):
            other = Polynomial([other])
        return isinstance(other, Polynomial) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other):
        other = _as_poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return Polynomial(self[k] + other[k] for k in range(n))

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(-a for a in self.coeffs)

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        other = _as_poly(other)
        if not self or not other:
            return Polynomial()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Polynomial(out)

    __rmul__ = __mul__

    def divmod_one_plus_t(self) -> tuple["Polynomial", int]:
        """Return ``(q, r)`` with ``self = (1 + t) q + r`` and ``r`` constant."""
        a = list(self.coeffs)
        if len(a) <= 1:
            return Polynomial(), (a[0] if a else 0)
        q = [0] * (len(a) - 1)
        q[-1] = a[-1]
        for k in range(len(a) - 2, 0, -1):
            q[k - 1] = a[k] - q[k]
        return Polynomial(q), a[0] - q[0]

    def div_one_plus_t(self) -> "Polynomial":
        """Exact division by ``1 + t``; raises ``ArithmeticError`` if not exact."""
        q, r = self.divmod_one_plus_t()
        if r:
            raise ArithmeticError(f"{self} is not divisible by 1 + t")
        return q

    def is_nonnegative(self) -> bool:
        return all(a >= 0 for a in self.coeffs)

    def __call__(self, t):
        return sum(a * t**k for k, a in enumerate(self.coeffs))

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for k, a in enumerate(self.coeffs):
            if a == 0:
                continue
            mag = abs(a)
            if k == 0:
                term = str(mag)
            else:
                var = "t" if k == 1 else f"t^{k}"
                term = var if mag == 1 else f"{mag}*{var}"
            if not parts:
                parts.append(term if a > 0 else "-" + term)
            else:
                parts.append(("+ " if a > 0 else "- ") + term)
        return " ".join(parts)

    def __repr__(self):
        return f"Polynomial({list(self.coeffs)})"


def _as_poly(x) -> Polynomial:
    return x if isinstance(x, Polynomial) else Polynomial([x])


ONE_PLUS_T = Polynomial([1, 1])


def rank(columns: Sequence[dict], field: str = "mod2") -> int:
    """Rank of a sparse matrix given as a list of ``{row: coeff}`` columns."""
    if field == "mod2" or getattr(field, "name", None) == "mod2":
        packed = []
        for col in columns:
            bits = 0
            for row, c in col.items():
                if int(c) % 2:
                    bits |= 1 << row
            packed.append(bits)
        return _rank_mod2(packed)
    return _rank_rational(columns)


def _rank_mod2(columns: Iterable[int]) -> int:
    pivots: dict[int, int] = {}
    for col in columns:
        while col:
            low = col.bit_length() - 1
            other = pivots.get(low)
            if other is None:
                pivots[low] = col
                break
            col ^= other
    return len(pivots)


def _rank_rational(columns: Iterable[dict]) -> int:
    pivots: dict[int, dict] = {}
    for col in columns:
        col = {r: Fraction(c) for r, c in col.items() if c}
        while col:
            low = max(col)
            other = pivots.get(low)
            if other is None:
                pivots[low] = col
                break
            factor = col[low] / other[low]
            for r, c in other.items():
                v = col.get(r, 0) - factor * c
                if v:
                    col[r] = v
                else:
                    col.pop(r, None)
    return len(pivots)


def _graded(complex: LefschetzComplex, A: Iterable[int]) -> dict[int, list[int]]:
    graded: dict[int, list[int]] = {}
    for x in sorted(A):
        graded.setdefault(complex.dim(x), []).append(x)
    return graded


def boundary_ranks(complex: LefschetzComplex, A: Iterable[int]) -> dict[int, int]:
    """Rank of the boundary map from degree ``q`` to ``q - 1`` on the subset, per ``q``."""
    A = frozenset(A)
    graded = _graded(complex, A)
    ranks = {}
    for q, cells in graded.items():
        rows = {y: i for i, y in enumerate(graded.get(q - 1, ()))}
        columns = [
            {rows[y]: c for y, c in complex.boundary(x).items() if y in rows} for x in cells
        ]
        ranks[q] = rank(columns, complex.field) if rows else 0
    return ranks


def betti(complex: LefschetzComplex, A: Iterable[int] | None = None) -> list[int]:
    """Betti numbers of the proper subset ``A`` (the whole complex by default).

    The list runs from degree 0 up to the largest cell dimension in ``A``.
    """
    A = frozenset(complex.cells) if A is None else frozenset(A)
    if not complex.is_proper(A):
        raise NotProperError("homology is defined only for proper subsets")
    graded = _graded(complex, A)
    if not graded:
        return []
    ranks = boundary_ranks(complex, A)
    top = max(graded)
    return [
        len(graded.get(q, ())) - ranks.get(q, 0) - ranks.get(q + 1, 0) for q in range(top + 1)
    ]


def poincare(complex: LefschetzComplex, A: Iterable[int] | None = None) -> Polynomial:
    return Polynomial(betti(complex, A))


def is_zero_space(complex: LefschetzComplex, A: Iterable[int] | None = None) -> bool:
    return not any(betti(complex, A))


def relative_poincare(
    complex: LefschetzComplex, B: Iterable[int], A: Iterable[int]
) -> Polynomial:
    """Poincare polynomial of the quotient of the chains on ``B`` by those on ``A``.

    Both sets must be closed with ``A`` inside ``B``.  The computation uses the
    full boundary matrices of ``B``: relative cycles are chains whose
    boundary lies in ``A``, relative boundaries are boundaries plus chains on
    ``A``.  It therefore does not go through the subset ``B \\ A`` and serves
    as an independent check of ``poincare(complex, B - A)``.
    """
    B, A = frozenset(B), frozenset(A)
    if not (complex.is_closed(B) and complex.is_closed(A)):
        raise PreconditionError("relative homology needs closed sets")
    if not A <= B:
        raise PreconditionError("relative homology needs A inside B")
    graded = _graded(complex, B)
    if not graded:
        return Polynomial()
    top = max(graded)
    index = {q: {x: i for i, x in enumerate(cells)} for q, cells in graded.items()}
    field = complex.field
    out = []
    for q in range(top + 1):
        cells = graded.get(q, [])
        rel_rows = {x: i for x, i in index.get(q - 1, {}).items() if x not in A}
        # boundaries projected away from A; its kernel is the relative cycle space
        proj = [{rel_rows[y]: c for y, c in complex.boundary(x).items() if y in rel_rows} for x in cells]
        cycles = len(cells) - (rank(proj, field) if rel_rows else 0)
        rows = index.get(q, {})
        image = [
            {rows[y]: c for y, c in complex.boundary(x).items() if y in rows}
            for x in graded.get(q + 1, [])
        ]
        image += [{rows[x]: 1} for x in cells if x in A]
        out.append(cycles - rank(image, field))
    return Polynomial(out)
