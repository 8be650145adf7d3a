"""Combinatorial multivector fields on Lefschetz complexes and their Conley theory."""

from .complex import (
    Field,
    LefschetzComplex,
    Report,
    build_cubical_grid,
    build_simplicial,
)
from .construct import cmvf, normalize, random_cloud_inward_boundary, sample_ode_two_circles
from .dynamics import (
    IndexPair,
    LassoSolution,
    canonical_pair,
    compat_hull_inner,
    compat_hull_outer,
    conley_index,
    connections,
    exit_set,
    invariant_part,
    is_invariant,
    is_isolated_invariant,
    saturate,
    validate_index_pair,
)
from .errors import (
    InternalConsistencyError,
    InvalidFieldError,
    MultivectorError,
    NotProperError,
    PreconditionError,
    UnknownCellError,
)
from .homology import Polynomial, betti, is_zero_space, poincare
from .morse import (
    ConleyMorseGraph,
    MorseDecomposition,
    basic_sets,
    conley_morse_graph,
    morse_equation,
    morse_index_pair,
    morse_set,
    validate_decomposition,
)
from .mvf import DynGraph, MultivectorField

__all__ = [name for name in dir() if not name.startswith("_")]
