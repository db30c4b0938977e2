"""Arbitrary-precision rational vectors and a certified LP feasibility kernel.

The single question answered here is conic membership: given a target v
and generator columns V, does some alpha >= 0 satisfy V.alpha = v?  The
answer always comes with a certificate that can be replayed exactly:
either the weights alpha themselves, or a separating functional y with
y.v_i >= 0 for every generator and y.v < 0.  Certificates are verified
before being returned, so downstream code may trust them blindly.

All scalars are fractions.Fraction: stored in lowest terms, positive
denominator, no rounding anywhere.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Optional, Sequence

from . import _simplex

Rational = Fraction


class DimensionMismatch(ValueError):
    """Raised when vector or matrix dimensions are inconsistent."""


def parse_rational(text) -> Fraction:
    """Parse ``"p/q"`` or ``"p"`` (also accepts ints) into a Fraction."""
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    return Fraction(str(text).strip())


def format_rational(q: Fraction) -> str:
    return str(Fraction(q))


@dataclass(frozen=True)
class RationalVector:
    """Immutable dense vector of Fractions."""

    entries: tuple[Fraction, ...]

    def __init__(self, entries: Iterable):
        object.__setattr__(
            self, "entries", tuple(Fraction(e) for e in entries)
        )

    @property
    def dim(self) -> int:
        return len(self.entries)

    def dot(self, other: "RationalVector | Sequence") -> Fraction:
        other_entries = other.entries if isinstance(other, RationalVector) else tuple(other)
        if len(other_entries) != len(self.entries):
            raise DimensionMismatch(
                f"dot of dim {len(self.entries)} with dim {len(other_entries)}"
            )
        return sum((a * b for a, b in zip(self.entries, other_entries)), Fraction(0))

    def scale(self, factor) -> "RationalVector":
        f = Fraction(factor)
        return RationalVector(e * f for e in self.entries)

    def __add__(self, other: "RationalVector") -> "RationalVector":
        if other.dim != self.dim:
            raise DimensionMismatch(f"add dim {self.dim} with dim {other.dim}")
        return RationalVector(a + b for a, b in zip(self.entries, other.entries))

    def __neg__(self) -> "RationalVector":
        return RationalVector(-e for e in self.entries)

    def __getitem__(self, i: int) -> Fraction:
        return self.entries[i]

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def is_zero(self) -> bool:
        return all(e == 0 for e in self.entries)


@dataclass(frozen=True)
class RationalMatrix:
    """A matrix stored as a tuple of equal-dimension column vectors."""

    columns: tuple[RationalVector, ...]

    def __init__(self, columns: Iterable):
        cols = tuple(
            c if isinstance(c, RationalVector) else RationalVector(c) for c in columns
        )
        dims = {c.dim for c in cols}
        if len(dims) > 1:
            raise DimensionMismatch(f"ragged column dims {sorted(dims)}")
        object.__setattr__(self, "columns", cols)

    @property
    def ncols(self) -> int:
        return len(self.columns)

    @property
    def dim(self) -> int:
        return self.columns[0].dim if self.columns else 0

    def combine(self, weights: RationalVector) -> RationalVector:
        if weights.dim != self.ncols:
            raise DimensionMismatch(
                f"{self.ncols} columns but {weights.dim} weights"
            )
        if not self.columns:
            return RationalVector(())
        acc = [Fraction(0)] * self.dim
        for w, col in zip(weights.entries, self.columns):
            if w:
                for i, e in enumerate(col.entries):
                    acc[i] += w * e
        return RationalVector(acc)


class Verdict(enum.Enum):
    MEMBER = "member"
    NOT_MEMBER = "not_member"


@dataclass(frozen=True)
class FeasibilityCertificate:
    verdict: Verdict
    membership_weights: Optional[RationalVector] = None
    separator: Optional[RationalVector] = None

    @property
    def is_member(self) -> bool:
        return self.verdict is Verdict.MEMBER


def _integer_rows(columns: Sequence[RationalVector], target: RationalVector):
    """Row-scale [V | v] to integers; returns (rows, b, row scale factors)."""
    d = target.dim
    rows, b, denoms = [], [], []
    for i in range(d):
        denom = lcm(
            target.entries[i].denominator,
            *(c.entries[i].denominator for c in columns),
        ) if columns else target.entries[i].denominator
        rows.append([int(c.entries[i] * denom) for c in columns])
        b.append(int(target.entries[i] * denom))
        denoms.append(denom)
    return rows, b, denoms


def lp_feasible(target: RationalVector, generators: RationalMatrix) -> FeasibilityCertificate:
    """Decide whether the target is a nonnegative combination of the columns.

    Phase-style exact simplex with Bland's rule; deterministic for a fixed
    column ordering.  The returned certificate is verified before return.
    """
    if generators.ncols and generators.dim != target.dim:
        raise DimensionMismatch(
            f"target dim {target.dim} != generator dim {generators.dim}"
        )
    ncols = generators.ncols
    if ncols == 0:
        if target.is_zero():
            cert = FeasibilityCertificate(Verdict.MEMBER, RationalVector(()))
        else:
            # any coordinate with a nonzero entry separates
            i = next(k for k, e in enumerate(target.entries) if e != 0)
            sep = [Fraction(0)] * target.dim
            sep[i] = Fraction(-1) if target.entries[i] > 0 else Fraction(1)
            cert = FeasibilityCertificate(Verdict.NOT_MEMBER, None, RationalVector(sep))
        assert verify_certificate(target, generators, cert)
        return cert

    rows, b, denoms = _integer_rows(generators.columns, target)
    status, x, farkas = _simplex.solve_standard(rows, b, [0] * ncols)
    if status == _simplex.OPTIMAL:
        cert = FeasibilityCertificate(Verdict.MEMBER, RationalVector(x))
    elif status == _simplex.INFEASIBLE:
        # kernel Farkas acts on the row-scaled system; undo the scaling
        cert = FeasibilityCertificate(
            Verdict.NOT_MEMBER,
            None,
            RationalVector([-y * s for y, s in zip(farkas, denoms)]),
        )
    else:  # pragma: no cover - feasibility LPs are never unbounded
        raise RuntimeError("feasibility LP reported unbounded")
    assert verify_certificate(target, generators, cert), "certificate failed self-check"
    return cert


def verify_certificate(
    target: RationalVector,
    generators: RationalMatrix,
    cert: FeasibilityCertificate,
) -> bool:
    """Exact replay of a certificate; False on any violation."""
    try:
        if cert.verdict is Verdict.MEMBER:
            alpha = cert.membership_weights
            if alpha is None or alpha.dim != generators.ncols:
                return False
            if any(a < 0 for a in alpha.entries):
                return False
            if generators.ncols == 0:
                return target.is_zero()
            return generators.combine(alpha).entries == target.entries
        if cert.verdict is Verdict.NOT_MEMBER:
            y = cert.separator
            if y is None or y.dim != target.dim:
                return False
            if any(y.dot(col) < 0 for col in generators.columns):
                return False
            return y.dot(target) < 0
    except DimensionMismatch:
        return False
    return False


# ---------------------------------------------------------------------------
# interior-point LP: maximise the slack of a strict inequality system
# ---------------------------------------------------------------------------


def max_slack_point(int_generators: Sequence[Sequence[int]], dim: int):
    """Maximise t subject to xi.v >= t for each generator, -1 <= xi_j <= 1.

    Generators must be integer vectors.  Returns (t*, point) with t* a
    Fraction and point a tuple of Fractions attaining it; t* > 0 iff some
    xi satisfies every xi.v > 0 strictly.
    """
    gens = [tuple(int(e) for e in g) for g in int_generators]
    m = len(gens)
    if m == 0:
        return Fraction(1), tuple(Fraction(0) for _ in range(dim))
    if any(len(g) != dim for g in gens):
        raise DimensionMismatch("generator dimension mismatch")

    # variables: p_1..p_d (xi_j = p_j - 1), t, s_1..s_m surplus, q_1..q_d box
    nvars = dim + 1 + m + dim
    rows, b = [], []
    for i, g in enumerate(gens):
        row = [0] * nvars
        row[:dim] = list(g)
        row[dim] = -1
        row[dim + 1 + i] = -1
        rows.append(row)
        b.append(sum(g))
    for j in range(dim):
        row = [0] * nvars
        row[j] = 1
        row[dim + 1 + m + j] = 1
        rows.append(row)
        b.append(2)
    cost = [0] * nvars
    cost[dim] = -1  # maximise t

    status, x, _ = _simplex.solve_standard(rows, b, cost, want_farkas=False)
    if status != _simplex.OPTIMAL:  # pragma: no cover - LP is feasible and bounded
        raise RuntimeError(f"slack LP terminated with status {status}")
    point = tuple(x[j] - 1 for j in range(dim))
    return x[dim], point


def primitive_int_vector(entries: Iterable) -> tuple[int, ...]:
    """Scale a rational vector to coprime integers with the same direction."""
    fracs = [Fraction(e) for e in entries]
    denom = 1
    for f in fracs:
        denom = lcm(denom, f.denominator)
    ints = [int(f * denom) for f in fracs]
    g = 0
    for v in ints:
        g = gcd(g, v)
    if g > 1:
        ints = [v // g for v in ints]
    return tuple(ints)
