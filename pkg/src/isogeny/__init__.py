"""Explicit isogenies between ordinary elliptic curves over F_{p^d}, p small."""

from .curves import (
    Curve,
    IsogenyMap,
    Isomorphism,
    NoRationalKernel,
    NotIsomorphic,
    find_isomorphism,
    kernel_from_point,
    random_ordinary_curve,
    velu,
)
from .engine import (
    DEFAULT_VARIANT,
    VARIANTS,
    IsogenySearch,
    NoSharedTorsion,
    RunReport,
    choose_k,
    fast_interpolate,
    find_isogeny,
    interpolate_classic,
    prepare,
    torsion_budget,
)
from .field import FieldCtx, FieldElement, make_field
from .poly import Poly
from .torsion import TorsionGenerator, build_torsion_generator
from .tower import Tower, build_base

__all__ = [
    "Curve",
    "IsogenyMap",
    "Isomorphism",
    "NoRationalKernel",
    "NotIsomorphic",
    "find_isomorphism",
    "kernel_from_point",
    "random_ordinary_curve",
    "velu",
    "DEFAULT_VARIANT",
    "VARIANTS",
    "IsogenySearch",
    "NoSharedTorsion",
    "RunReport",
    "choose_k",
    "fast_interpolate",
    "find_isogeny",
    "interpolate_classic",
    "prepare",
    "torsion_budget",
    "FieldCtx",
    "FieldElement",
    "make_field",
    "Poly",
    "TorsionGenerator",
    "build_torsion_generator",
    "Tower",
    "build_base",
]
