"""Multivector fields on a planar cubical grid from sampled vectors.

A vector cloud assigns a planar vector to each vertex ``(i, j)`` of the grid
``{0, 2, ..., 2n}^2``.  Vectors are first snapped to one of nine directions
(zero, four axis directions, four diagonals).  Edges whose endpoint vectors
agree across the edge are paired with the square they point into; vertices
are then paired with the edge or grouped with the square they point to.

Two details are fixed here: an edge is paired with the square on the side
given by the endpoint vectors' component perpendicular to the edge, and any
assignment whose target cell would lie outside the grid is skipped.
"""

from __future__ import annotations

import csv
import io
import math
from typing import Iterable, Mapping

import numpy as np

from .complex import LefschetzComplex, build_cubical_grid
from .errors import PreconditionError
from .mvf import MultivectorField

Vertex = tuple[int, int]
VectorCloud = dict  # {(i, j): (v1, v2)} with i, j even


def arg(x1: float, x2: float) -> float:
    """Angle of a nonzero planar vector, in ``[-pi, pi)``."""
    r = math.hypot(x1, x2)
    if r == 0:
        raise ValueError("the angle of the zero vector is undefined")
    c = min(1.0, max(-1.0, x1 / r))
    a = math.acos(c) if x2 >= 0 else -math.acos(c)
    return -math.pi if a == math.pi else a


def _sgn(a: float) -> int:
    return (a > 0) - (a < 0)


def normalize(x: tuple[float, float], mu: float, eps: float) -> tuple[int, int]:
    """Snap a vector to the zero vector, an axis direction or a diagonal.

    Vectors of length at most ``eps`` map to zero; vectors within angle ``mu``
    of an axis map to that axis direction; the rest map to a diagonal.
    """
    x1, x2 = float(x[0]), float(x[1])
    if x1 * x1 + x2 * x2 <= eps * eps:
        return (0, 0)
    a = arg(x1, x2)
    if abs(a) <= mu or abs(a) >= math.pi - mu:
        return (_sgn(x1), 0)
    if abs(a - math.pi / 2) <= mu or abs(a + math.pi / 2) <= mu:
        return (0, _sgn(x2))
    return (_sgn(x1), _sgn(x2))


def grid_size(cloud: Mapping[Vertex, tuple]) -> int:
    """The ``n`` of the grid a cloud lives on; raises on a malformed cloud."""
    if not cloud:
        raise ValueError("empty vector cloud")
    top = max(max(k) for k in cloud)
    if top % 2 or top < 2:
        raise ValueError("cloud coordinates must span {0, 2, ..., 2n} with n >= 1")
    n = top // 2
    expected = {(i, j) for i in range(0, 2 * n + 1, 2) for j in range(0, 2 * n + 1, 2)}
    if set(cloud) != expected:
        raise ValueError("cloud must give exactly one vector at every grid vertex")
    for v in cloud.values():
        if len(v) != 2 or not all(math.isfinite(float(a)) for a in v):
            raise ValueError("cloud vectors must be finite pairs")
    return n


def default_eps(cloud: Mapping[Vertex, tuple]) -> float:
    return 1e-6 * max((math.hypot(*map(float, v)) for v in cloud.values()), default=0.0)


def cmvf_theta(cloud: Mapping[Vertex, tuple], mu: float = math.pi / 8, eps: float | None = None) -> dict:
    """The theta map of the grid construction, on lattice keys."""
    n = grid_size(cloud)
    if eps is None:
        eps = default_eps(cloud)
    if mu < 0:
        raise PreconditionError("mu must be nonnegative")
    size = 2 * n
    inside = lambda c: 0 <= c[0] <= size and 0 <= c[1] <= size  # noqa: E731
    vbar = {z: normalize(v, mu, eps) for z, v in cloud.items()}
    keys = [(i, j) for j in range(size + 1) for i in range(size + 1)]
    theta = {c: c for c in keys}

    for e in keys:
        i, j = e
        if (i + j) % 2 == 0:
            continue
        if i % 2:  # horizontal edge: endpoints differ in the first coordinate
            lo, hi, axis = (i - 1, j), (i + 1, j), 1
        else:
            lo, hi, axis = (i, j - 1), (i, j + 1), 0
        s_lo, s_hi = vbar[lo], vbar[hi]
        if s_lo[axis] * s_hi[axis] > 0:
            step = [0, 0]
            step[axis] = s_lo[axis]
            target = (i + step[0], j + step[1])
            if inside(target):
                theta[e] = target

    for x in keys:
        if x[0] % 2 or x[1] % 2:
            continue
        s1, s2 = vbar[x]
        if s1 == 0 and s2 == 0:
            continue
        target = (x[0] + s1, x[1] + s2)
        if not inside(target):
            continue
        if s1 * s2 == 0:
            theta[x] = target
            continue
        x1 = (x[0] + s1, x[1])
        x2 = (x[0], x[1] + s2)
        t1 = theta[x1] == x1
        t2 = theta[x2] == x2
        c1 = t1 and vbar[(x1[0] + s1, x1[1])][0] * s1 < 0
        c2 = t2 and vbar[(x2[0], x2[1] + s2)][1] * s2 < 0
        if c1 and c2:
            continue
        if not c1 and not c2:
            theta[x1] = theta[x2] = theta[x] = target
        else:
            if c1 and t2:
                theta[x] = x1
            if c2 and t1:
                theta[x] = x2
    return theta


def cmvf(
    cloud: Mapping[Vertex, tuple],
    mu: float = math.pi / 8,
    eps: float | None = None,
    complex: LefschetzComplex | None = None,
) -> MultivectorField:
    """Build the multivector field of a vector cloud on its cubical grid."""
    theta = cmvf_theta(cloud, mu, eps)
    if complex is None:
        complex = build_cubical_grid(grid_size(cloud))
    ids = {c: complex.id_of(c) for c in theta}
    return MultivectorField.from_theta(complex, {ids[a]: ids[b] for a, b in theta.items()})


def lattice_points(n: int, lo: float = -3.0, hi: float = 3.0) -> dict[Vertex, tuple[float, float]]:
    """Affine map from grid vertices ``{0, ..., 2n}^2`` onto ``[lo, hi]^2``."""
    scale = (hi - lo) / (2 * n)
    return {
        (i, j): (lo + i * scale, lo + j * scale)
        for j in range(0, 2 * n + 1, 2)
        for i in range(0, 2 * n + 1, 2)
    }


def two_circles(x1: float, x2: float) -> tuple[float, float]:
    """Planar field with a repelling origin, an attracting unit circle and a repelling circle of radius 2."""
    f = (x1 * x1 + x2 * x2 - 4) * (x1 * x1 + x2 * x2 - 1)
    return (-x2 + x1 * f, x1 + x2 * f)


def sample_ode_two_circles(n: int, lo: float = -3.0, hi: float = 3.0) -> VectorCloud:
    if n < 1:
        raise PreconditionError("grid size must be at least 1")
    return {z: two_circles(*p) for z, p in lattice_points(n, lo, hi).items()}


def random_cloud_inward_boundary(n: int, seed: int) -> VectorCloud:
    """Unit vectors with uniform random directions; boundary vectors point inward.

    Boundary vertices get the inward normal of their side, corners the inward
    diagonal.
    """
    if n < 1:
        raise PreconditionError("grid size must be at least 1")
    rng = np.random.default_rng(seed)
    size = 2 * n
    cloud = {}
    for j in range(0, size + 1, 2):
        for i in range(0, size + 1, 2):
            a = rng.uniform(0.0, 2 * math.pi)
            v = [math.cos(a), math.sin(a)]
            for axis, c in enumerate((i, j)):
                if c == 0:
                    v[axis] = 1.0
                elif c == size:
                    v[axis] = -1.0
                elif (i in (0, size)) or (j in (0, size)):
                    v[axis] = 0.0
            cloud[(i, j)] = (v[0], v[1])
    return cloud


def read_cloud(text: str) -> VectorCloud:
    """Parse CSV lines ``i,j,vx,vy``; blank lines and ``#`` comments are ignored."""
    cloud = {}
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), 1):
        if not row or not "".join(row).strip() or row[0].lstrip().startswith("#"):
            continue
        if len(row) != 4:
            raise ValueError(f"line {lineno}: expected i,j,vx,vy")
        try:
            i, j = int(row[0]), int(row[1])
            v = (float(row[2]), float(row[3]))
        except ValueError:
            raise ValueError(f"line {lineno}: cannot parse {row!r}") from None
        if i % 2 or j % 2 or i < 0 or j < 0:
            raise ValueError(f"line {lineno}: lattice coordinates must be even and nonnegative")
        if (i, j) in cloud:
            raise ValueError(f"line {lineno}: duplicate vertex ({i}, {j})")
        cloud[(i, j)] = v
    grid_size(cloud)
    return cloud


def write_cloud(cloud: Mapping[Vertex, tuple]) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    for (i, j) in sorted(cloud, key=lambda k: (k[1], k[0])):
        vx, vy = cloud[(i, j)]
        w.writerow([i, j, repr(float(vx)), repr(float(vy))])
    return out.getvalue()


def strict_structure(field: MultivectorField) -> list[tuple[int, int, int]]:
    """Counts of (vertices, edges, squares) in each strict multivector."""
    out = []
    for mv in field.strict_multivectors():
        dims = [field.complex.dim(x) for x in mv]
        out.append((dims.count(0), dims.count(1), dims.count(2)))
    return out


def iter_grid_vertices(n: int) -> Iterable[Vertex]:
    return ((i, j) for j in range(0, 2 * n + 1, 2) for i in range(0, 2 * n + 1, 2))
