import math
import random
import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings, strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from multivector import MultivectorField, build_cubical_grid, build_simplicial  # noqa: E402
from multivector.construct import cmvf, random_cloud_inward_boundary  # noqa: E402

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture
def square():
    return build_cubical_grid(1)


@pytest.fixture
def segment():
    cx = build_simplicial([("a", "b")])
    a, b, ab = cx.id_of(("a",)), cx.id_of(("b",)), cx.id_of(("a", "b"))
    field = MultivectorField.from_theta(cx, {a: ab, ab: ab, b: b})
    return cx, field, a, b, ab


def random_vector_field(cx, rng, tries=None):
    """Random Forman field: greedily pair cells with random cofacets."""
    theta = {x: x for x in cx.cells}
    used = set()
    cells = list(cx.cells)
    rng.shuffle(cells)
    for x in cells[: tries or len(cells)]:
        if x in used:
            continue
        ups = [y for y in cx.cofacets(x) if y not in used]
        if ups and rng.random() < 0.7:
            y = rng.choice(sorted(ups))
            theta[x] = y
            used |= {x, y}
    return MultivectorField.from_theta(cx, theta)


def random_cmvf_field(rng, n_range=(2, 6)):
    n = rng.randint(*n_range)
    cloud = random_cloud_inward_boundary(n, rng.randrange(2**32))
    mu = rng.uniform(0.05, math.pi / 4 - 0.01)
    return cmvf(cloud, mu)


SMALL_COMPLEXES = [
    [("a", "b")],
    [("a", "b", "c")],
    [("a", "b"), ("b", "c"), ("a", "c")],
    [("a", "b", "c"), ("c", "d")],
    [("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")],
    [("a", "b", "c"), ("b", "d")],
]


@st.composite
def small_simplicial(draw):
    return build_simplicial(draw(st.sampled_from(SMALL_COMPLEXES)))


@st.composite
def grid_and_subset(draw, max_n=3):
    n = draw(st.integers(1, max_n))
    cx = build_cubical_grid(n)
    cells = sorted(cx.cells)
    A = draw(st.sets(st.sampled_from(cells)))
    return cx, frozenset(A)


@st.composite
def field_on_grid(draw, max_n=3):
    n = draw(st.integers(1, max_n))
    seed = draw(st.integers(0, 2**32 - 1))
    mu = draw(st.floats(0.05, math.pi / 4 - 0.01))
    return cmvf(random_cloud_inward_boundary(n, seed), mu)


@st.composite
def random_forman(draw):
    cx = draw(small_simplicial()) if draw(st.booleans()) else build_cubical_grid(draw(st.integers(1, 2)))
    return random_vector_field(cx, random.Random(draw(st.integers(0, 10**6))))
