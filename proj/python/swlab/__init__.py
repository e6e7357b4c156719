"""Python access to the swlab C++ core."""

from fractions import Fraction

from . import _swlab
from ._swlab import (
    chern_weil,
    count_spinc_lifts,
    divisors,
    gamma,
    gamma_two,
    identities,
    preset_names,
    solve,
    surface,
)


def spinor_chern(name, L):
    """(c2(S+), c2(S-)) as Fractions for the Spin^c structure with determinant L."""
    plus, minus = _swlab.spinor_chern(name, list(L))
    return Fraction(*plus), Fraction(*minus)


__all__ = [
    "chern_weil",
    "count_spinc_lifts",
    "divisors",
    "gamma",
    "gamma_two",
    "identities",
    "preset_names",
    "solve",
    "spinor_chern",
    "surface",
]
