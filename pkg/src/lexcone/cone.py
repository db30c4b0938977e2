"""Polyhedral cone predicates: membership, pointedness, interior functionals.

A cone is described by its generators.  Membership delegates to the
certified LP kernel.  Pointedness is decided incrementally: a cone stays
pointed exactly when the negation of each newly added generator is outside
the cone built so far.  For pointed cones an interior functional (strictly
positive on every generator) is produced by maximising the worst slack
over the box [-1, 1]^d, which is lossless because cones are scale
invariant.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional

from .exact_lp import (
    DimensionMismatch,
    FeasibilityCertificate,
    RationalMatrix,
    RationalVector,
    lp_feasible,
    max_slack_point,
    primitive_int_vector,
)


class NotPointed(ValueError):
    """Raised when an interior functional is requested for a non-pointed cone."""


@dataclass(frozen=True)
class ConeSpec:
    """Conic hull of a finite generator set.

    Zero generators are conic no-ops and are stripped on construction with
    a warning; they only arise from degenerate difference vectors in
    malformed inputs.
    """

    generators: RationalMatrix
    ambient_dim: int

    def __init__(self, generators, ambient_dim: Optional[int] = None):
        gm = generators if isinstance(generators, RationalMatrix) else RationalMatrix(generators)
        kept = tuple(c for c in gm.columns if not c.is_zero())
        if len(kept) != gm.ncols:
            warnings.warn("dropping zero generators from cone description", stacklevel=2)
        if ambient_dim is None:
            if not kept:
                raise ValueError("ambient_dim required for a generator-free cone")
            ambient_dim = kept[0].dim
        if kept and kept[0].dim != ambient_dim:
            raise DimensionMismatch(
                f"generators have dim {kept[0].dim}, ambient_dim {ambient_dim}"
            )
        object.__setattr__(self, "generators", RationalMatrix(kept))
        object.__setattr__(self, "ambient_dim", int(ambient_dim))

    @property
    def ngens(self) -> int:
        return self.generators.ncols


def in_cone(v: RationalVector, cone: ConeSpec) -> FeasibilityCertificate:
    """Certificate for v being a conic combination of the generators."""
    if v.dim != cone.ambient_dim:
        raise DimensionMismatch(f"vector dim {v.dim} != ambient {cone.ambient_dim}")
    return lp_feasible(v, cone.generators)


@dataclass(frozen=True)
class PointednessResult:
    pointed: bool
    failure_index: Optional[int] = None

    def __bool__(self) -> bool:
        return self.pointed


def check_pointed(cone: ConeSpec) -> PointednessResult:
    """Incremental pointedness test.

    Processes generators in input order; on failure reports the index of
    the first generator whose negation already lay inside the partial
    cone.  The empty set is pointed ({0} is a pointed cone).
    """
    cols = cone.generators.columns
    for i in range(1, len(cols)):
        partial = RationalMatrix(cols[:i])
        if lp_feasible(-cols[i], partial).is_member:
            return PointednessResult(False, i)
    return PointednessResult(True)


def interior_functional(cone: ConeSpec) -> RationalVector:
    """Some xi with xi.v > 0 for every generator, verified exactly."""
    if cone.ngens == 0:
        return RationalVector([0] * cone.ambient_dim)
    gens = [primitive_int_vector(c.entries) for c in cone.generators.columns]
    slack, point = max_slack_point(gens, cone.ambient_dim)
    if slack <= 0:
        raise NotPointed("cone admits no strictly positive functional")
    xi = RationalVector(point)
    assert all(xi.dot(c) > 0 for c in cone.generators.columns)
    return xi
