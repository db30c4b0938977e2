"""Parameter space decomposition for interaction functions.

An interaction function of type (n_1,..,n_q) is a product of q disjoint
variable sums.  Substituting each variable by either a low rate l_i or a
raised rate l_i + d_i produces 2^n product polynomials, indexed by the
n-bit word whose d-th most significant bit records whether variable d is
raised.  Raising a bit strictly increases the product on the positive
orthant, so the index words carry the subset-lattice partial order.

The admissible total orders of this family are found by mapping each
factor value to an independent coordinate (the coordinate-wise log of
factor values turns products into sums), enumerating orders of the
resulting linear family, and then separating genuine orders from
artefacts of the relaxation: product-splitting inequalities restrict the
linear domain, types (2,1,..,1) become exact, sampling the original
polynomials at integer points witnesses orders, and the unresolved
remainder is exported for external semi-algebraic deciders.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .exact_lp import RationalVector
from .lclep import LCLEPInstance, LinearForm, SolutionSet, Solver, check_sigma, solve
from .order import (
    CyclicRefinement,
    LinearExtension,
    PartialOrder,
    one_bit_covers,
    refine_order,
)


class NonPositiveParameter(ValueError):
    """Raised when a parameter point leaves the open positive orthant."""


class WrongType(ValueError):
    """Raised when an operation is asked for an unsupported interaction type."""


class TypeMismatch(ValueError):
    """Raised when sub-problem solutions do not fit the derived sub-type."""


class RealizationFailed(RuntimeError):
    """Raised when no rational witness parameter is confirmed within budget."""


class UnsupportedMode(ValueError):
    """Raised when a solve mode does not apply to the interaction type."""


@dataclass(frozen=True)
class InteractionType:
    """Summand sizes (n_1,..,n_q) of an interaction function, descending."""

    parts: tuple[int, ...]

    def __init__(self, parts: Iterable[int]):
        ps = tuple(int(p) for p in parts)
        if not ps or any(p < 1 for p in ps):
            raise WrongType(f"parts must be positive integers, got {ps!r}")
        if any(a < b for a, b in zip(ps, ps[1:])):
            raise WrongType(f"parts must be non-increasing, got {ps!r}")
        object.__setattr__(self, "parts", ps)

    @property
    def n(self) -> int:
        return sum(self.parts)

    @property
    def q(self) -> int:
        return len(self.parts)

    @property
    def blocks(self) -> tuple[tuple[int, ...], ...]:
        """Variable blocks I_j as consecutive runs of 1..n."""
        out = []
        start = 1
        for p in self.parts:
            out.append(tuple(range(start, start + p)))
            start += p
        return tuple(out)

    def block_offsets(self) -> tuple[int, ...]:
        out = []
        start = 0
        for p in self.parts:
            out.append(start)
            start += p
        return tuple(out)

    def local_index(self, word: int, j: int) -> int:
        """Sub-index of factor j (0-based) inside a global index word."""
        off = self.block_offsets()[j]
        width = self.parts[j]
        return (word >> (self.n - off - width)) & ((1 << width) - 1)

    def __str__(self) -> str:
        return ",".join(str(p) for p in self.parts)

    @classmethod
    def parse(cls, text: str) -> "InteractionType":
        try:
            parts = [int(p) for p in str(text).replace("(", "").replace(")", "").split(",") if p.strip()]
        except ValueError as exc:
            raise WrongType(f"cannot parse interaction type {text!r}") from exc
        return cls(sorted(parts, reverse=True))


@dataclass(frozen=True)
class ParameterPoint:
    """Strictly positive rates (l_1..l_n) and bumps (d_1..d_n)."""

    ell: RationalVector
    delta: RationalVector

    def __init__(self, ell, delta):
        e = ell if isinstance(ell, RationalVector) else RationalVector(ell)
        d = delta if isinstance(delta, RationalVector) else RationalVector(delta)
        if e.dim != d.dim:
            raise NonPositiveParameter(f"rate/bump length mismatch {e.dim} vs {d.dim}")
        if any(v <= 0 for v in e.entries) or any(v <= 0 for v in d.entries):
            raise NonPositiveParameter("parameters must be strictly positive")
        object.__setattr__(self, "ell", e)
        object.__setattr__(self, "delta", d)

    @property
    def n(self) -> int:
        return self.ell.dim


@dataclass(frozen=True)
class PSDInstance:
    """The 2^n product polynomials of one interaction type.

    Polynomials are kept factored: the polynomial at index word i is the
    product over factors j of (sum of block-j rates + bump of each raised
    block-j variable).
    """

    itype: InteractionType
    lattice: PartialOrder

    @property
    def size(self) -> int:
        return 1 << self.itype.n

    def delta_support(self, word: int) -> tuple[tuple[int, ...], ...]:
        """Raised variables of each factor at the given index word."""
        n = self.itype.n
        return tuple(
            tuple(k for k in block if (word >> (n - k)) & 1)
            for block in self.itype.blocks
        )

    def value(self, word: int, point: ParameterPoint) -> Fraction:
        n = self.itype.n
        if point.n != n:
            raise NonPositiveParameter(f"point has {point.n} variables, type needs {n}")
        total = Fraction(1)
        for block in self.itype.blocks:
            s = Fraction(0)
            for k in block:
                s += point.ell[k - 1]
                if (word >> (n - k)) & 1:
                    s += point.delta[k - 1]
            total *= s
        return total


def build_psd(itype: InteractionType) -> PSDInstance:
    return PSDInstance(itype, one_bit_covers(itype))


def evaluate(inst: PSDInstance, point: ParameterPoint) -> RationalVector:
    """Exact values of all 2^n polynomials, in index-word order."""
    return RationalVector([inst.value(i, point) for i in range(inst.size)])


@dataclass(frozen=True)
class LinearizedInstance:
    """Linear stand-in family for a PSD instance.

    For q >= 2 the ambient space has one coordinate per (factor, factor
    sub-index) pair, dim = sum over factors of 2^(n_j), and the form for
    index word i is the sum of the q unit coordinates selected by i's
    factor sub-indices.  Already-linear families (q = 1) bypass this and
    keep their original coefficient vectors on (l_1..l_n, d_1..d_n).
    """

    itype: InteractionType
    dim: int
    forms: tuple[LinearForm, ...]
    extra_domain: tuple[LinearForm, ...]

    @property
    def m(self) -> int:
        return self.dim

    def lattice(self) -> PartialOrder:
        return one_bit_covers(self.itype)

    def to_lclep(self, domain_forms: Sequence[LinearForm] = ()) -> LCLEPInstance:
        return LCLEPInstance(
            self.forms, self.lattice(), tuple(self.extra_domain) + tuple(domain_forms)
        )


def coordinate_offsets(itype: InteractionType) -> tuple[int, ...]:
    """Start of each factor's coordinate block in the linearized space."""
    out = []
    start = 0
    for p in itype.parts:
        out.append(start)
        start += 1 << p
    return tuple(out)


def linear_forms(itype: InteractionType) -> tuple[LinearForm, ...]:
    """Coefficient vectors of the product polynomials when q = 1."""
    n = itype.n
    forms = []
    for word in range(1 << n):
        coeffs = [1] * n + [0] * n
        for k in range(1, n + 1):
            if (word >> (n - k)) & 1:
                coeffs[n + k - 1] = 1
        forms.append(LinearForm(coeffs))
    return tuple(forms)


def linearize(inst: PSDInstance) -> LinearizedInstance:
    itype = inst.itype
    if itype.q == 1:
        return LinearizedInstance(itype, 2 * itype.n, linear_forms(itype), ())
    offsets = coordinate_offsets(itype)
    dim = offsets[-1] + (1 << itype.parts[-1])
    forms = []
    for word in range(inst.size):
        coeffs = [0] * dim
        for j in range(itype.q):
            coeffs[offsets[j] + itype.local_index(word, j)] = 1
        forms.append(LinearForm(coeffs))
    return LinearizedInstance(itype, dim, tuple(forms), ())


def log_transfer_map(point: ParameterPoint, itype: InteractionType) -> RationalVector:
    """Coordinate-wise log of factor values, as exact binary rationals.

    Pairs with the q >= 2 linearized coordinates: the linear form of index
    word i evaluated here equals log of the product polynomial at the
    point, up to double-precision log error.  Only order information is
    used downstream, and order claims are confirmed by exact comparison of
    the underlying products.
    """
    n = itype.n
    if point.n != n:
        raise NonPositiveParameter(f"point has {point.n} variables, type needs {n}")
    coords = []
    for j, block in enumerate(itype.blocks):
        width = itype.parts[j]
        for local in range(1 << width):
            s = Fraction(0)
            for r, k in enumerate(block, start=1):
                s += point.ell[k - 1]
                if (local >> (width - r)) & 1:
                    s += point.delta[k - 1]
            coords.append(Fraction(math.log(s)))
    return RationalVector(coords)


def quad_constraints(itype: InteractionType) -> tuple[LinearForm, ...]:
    """Product-splitting inequalities for the linearized domain.

    Within one factor, pick two raised bits and a background assignment:
    the four sub-indices (base, base+bit1, base+bit2, base+both) have
    factor values a, b, c, d with a + d = b + c and a < b, c < d, so
    b*c > a*d and the log coordinates satisfy x_b + x_c - x_a - x_d > 0.
    Swapped middle pairs are the same inequality and are emitted once.
    Multi-bit splittings are sums of these and add nothing.  Already
    linear families (q = 1) need no splitting and get none.
    """
    if itype.q == 1:
        return ()
    offsets = coordinate_offsets(itype)
    dim = offsets[-1] + (1 << itype.parts[-1])
    out = []
    for j, width in enumerate(itype.parts):
        if width < 2:
            continue
        for b1, b2 in itertools.combinations(range(width), 2):
            free = [b for b in range(width) if b not in (b1, b2)]
            for assignment in range(1 << len(free)):
                base = 0
                for pos, b in enumerate(free):
                    if (assignment >> pos) & 1:
                        base |= 1 << b
                quad = (base, base | 1 << b2, base | 1 << b1, base | 1 << b1 | 1 << b2)
                _assert_splitting_identity(itype, j, quad)
                coeffs = [0] * dim
                coeffs[offsets[j] + quad[0]] = -1
                coeffs[offsets[j] + quad[1]] = 1
                coeffs[offsets[j] + quad[2]] = 1
                coeffs[offsets[j] + quad[3]] = -1
                out.append(LinearForm(coeffs))
    return tuple(out)


def _assert_splitting_identity(itype: InteractionType, j: int, quad) -> None:
    """Symbolic check that the four sub-indices split the bump multiset."""
    width = itype.parts[j]
    a, b, c, d = (tuple((s >> (width - 1 - r)) & 1 for r in range(width)) for s in quad)
    for bits in zip(a, b, c, d):
        assert bits[0] + bits[3] == bits[1] + bits[2], "bump multiset identity broken"
    assert all(x <= y for x, y in zip(a, b)) and all(x <= y for x, y in zip(a, c))
    assert all(x <= y for x, y in zip(b, d)) and all(x <= y for x, y in zip(c, d))


def special_case_domain(itype: InteractionType) -> tuple[LinearForm, ...]:
    """The one extra inequality that makes types (2,1,..,1) exact."""
    if not (
        itype.q >= 2 and itype.parts[0] == 2 and all(p == 1 for p in itype.parts[1:])
    ):
        raise WrongType(f"special-case domain needs type (2,1,..,1), got ({itype})")
    forms = quad_constraints(itype)
    assert len(forms) == 1
    return forms


# ---------------------------------------------------------------------------
# witness realization for the exact special case
# ---------------------------------------------------------------------------


def _verify_linear_side(itype, lin, xi_prime, word) -> None:
    values = [f(xi_prime) for f in lin.forms]
    for a, b in lin.lattice().covers:
        if values[b] <= values[a]:
            raise ValueError("linear-side point violates the lattice order")
    for x, y in zip(word, word[1:]):
        if values[y] <= values[x]:
            raise ValueError("linear-side point does not realise the given order")
    if special_case_domain(itype)[0](xi_prime) <= 0:
        raise ValueError("linear-side point violates the product-splitting gate")


def realize_parameter(
    itype: InteractionType,
    xi_prime: RationalVector,
    sigma,
    max_precision: int = 320,
) -> ParameterPoint:
    """Turn a linear-side witness for a (2,1,..,1) order into true rates.

    Scale the point until the four first-factor coordinates x satisfy
    exp(x0) - exp(x1) - exp(x2) + exp(x3) = 0 (a positive scale exists
    because the splitting gate holds), then invert the factor-value map.
    The scale root is irrational, so everything is computed in decimal
    arithmetic of growing precision and accepted only once the decoded
    rational point exactly realises the order, which must happen since the
    target region is open.
    """
    special_case_domain(itype)  # rejects anything but (2,1,..,1)
    inst = build_psd(itype)
    lin = linearize(inst)
    if lin.dim != xi_prime.dim:
        raise WrongType(
            f"point has dim {xi_prime.dim}, linearized type ({itype}) needs {lin.dim}"
        )
    word = tuple(sigma.perm if isinstance(sigma, LinearExtension) else sigma)
    _verify_linear_side(itype, lin, xi_prime, word)

    x = [Fraction(e) for e in xi_prime.entries]
    n = itype.n
    precision = 40
    while precision <= max_precision:
        with localcontext() as ctx:
            ctx.prec = precision
            dx = [Decimal(f.numerator) / Decimal(f.denominator) for f in x]

            def g(t: Decimal) -> Decimal:
                return (
                    (t * dx[0]).exp()
                    - (t * dx[1]).exp()
                    - (t * dx[2]).exp()
                    + (t * dx[3]).exp()
                )

            lo = Decimal(1)
            while g(lo) >= 0:
                lo /= 2
                if lo < Decimal(10) ** -60:
                    raise RealizationFailed("no negative bracket for the scale root")
            hi = lo * 2
            while g(hi) <= 0:
                hi *= 2
                if hi > Decimal(10) ** 60:
                    raise RealizationFailed("no positive bracket for the scale root")
            for _ in range(int(precision * 3.5)):
                mid = (lo + hi) / 2
                if g(mid) <= 0:
                    lo = mid
                else:
                    hi = mid
            t = (lo + hi) / 2

            exps = [(t * v).exp() for v in dx]
            try:
                ell = [Fraction(exps[0]) / 2, Fraction(exps[0]) / 2]
                delta = [
                    Fraction(exps[2]) - Fraction(exps[0]),
                    Fraction(exps[1]) - Fraction(exps[0]),
                ]
                offsets = coordinate_offsets(itype)
                for j in range(1, itype.q):
                    base = offsets[j]
                    ell.append(Fraction(exps[base]))
                    delta.append(Fraction(exps[base + 1]) - Fraction(exps[base]))
                point = ParameterPoint(ell, delta)
            except NonPositiveParameter:
                precision *= 2
                continue
            values = [inst.value(i, point) for i in range(inst.size)]
            if all(values[a] < values[b] for a, b in zip(word, word[1:])):
                return point
        precision *= 2
    raise RealizationFailed(
        f"no confirmed witness within precision {max_precision} for ({itype})"
    )


# ---------------------------------------------------------------------------
# sub-problem refinements
# ---------------------------------------------------------------------------


def derived_subtype(itype: InteractionType, fixed_var: int):
    """Sub-type after pinning one variable, with the variable relabeling.

    Returns (subtype, mapper) where mapper(sub_word, bit) is the original
    index word with the fixed variable set to the given bit.
    """
    n = itype.n
    if not 1 <= fixed_var <= n:
        raise WrongType(f"variable {fixed_var} out of range for ({itype})")
    j0 = next(j for j, block in enumerate(itype.blocks) if fixed_var in block)
    factors = []
    for j, block in enumerate(itype.blocks):
        remaining = tuple(k for k in block if k != fixed_var)
        if remaining:
            factors.append(remaining)
    factors.sort(key=len, reverse=True)  # stable: preserves block order on ties
    subtype = InteractionType(len(f) for f in factors)
    sub_vars = [k for f in factors for k in f]
    sub_n = n - 1

    def mapper(sub_word: int, bit: int) -> int:
        word = bit << (n - fixed_var)
        for pos, k in enumerate(sub_vars, start=1):
            if (sub_word >> (sub_n - pos)) & 1:
                word |= 1 << (n - k)
        return word

    del j0
    return subtype, mapper


def subproblem_refinements(
    itype: InteractionType,
    fixed_var: int,
    bit: int,
    sub_solutions: SolutionSet,
):
    """Chains imposed on the half-lattice by solved smaller instances.

    Pinning a variable multiplies every polynomial in the half-family by a
    common positive factor (or merges the variable's rate into its block),
    so each admissible order of the derived sub-type forces the matching
    chain on the 2^(n-1) index words with that variable pinned.
    """
    if bit not in (0, 1):
        raise WrongType(f"bit must be 0 or 1, got {bit!r}")
    subtype, mapper = derived_subtype(itype, fixed_var)
    sub_size = 1 << subtype.n
    out = []
    subset = tuple(sorted(mapper(s, bit) for s in range(sub_size)))
    for ext in sub_solutions.extensions:
        if len(ext.perm) != sub_size:
            raise TypeMismatch(
                f"sub-solution on {len(ext.perm)} elements, sub-type ({subtype}) "
                f"needs {sub_size}"
            )
        chain = tuple(mapper(s, bit) for s in ext.perm)
        out.append((subset, chain))
    return out


class SubOrderGuide:
    """Search pruning by solved sub-instances.

    Pinning any variable to either value induces, on the matching half of
    the index words, an order that must be admissible for the derived
    sub-type.  The guide tracks, per (variable, value) pair, the induced
    partial word against a prefix trie of that sub-type's solution set and
    rejects extensions that leave the trie.  Rejections are always sound:
    solution sets of sub-types (or candidate supersets for sub-types with
    no exact solve) contain every order a true solution can induce.
    """

    def __init__(self, pairs):
        # pairs: (letter_of: full index -> sub index, trie root) per pin
        self.pairs = pairs
        self.nodes = [root for _, root in pairs]
        self.trail: list[list[tuple[int, dict]]] = []

    def reset(self) -> None:
        self.nodes = [root for _, root in self.pairs]
        self.trail.clear()

    def allows(self, i: int) -> bool:
        nodes = self.nodes
        for k, (letter_of, _) in enumerate(self.pairs):
            letter = letter_of.get(i)
            if letter is not None and letter not in nodes[k]:
                return False
        return True

    def push(self, i: int) -> None:
        moves = []
        nodes = self.nodes
        for k, (letter_of, _) in enumerate(self.pairs):
            letter = letter_of.get(i)
            if letter is not None:
                moves.append((k, nodes[k]))
                nodes[k] = nodes[k][letter]
        self.trail.append(moves)

    def pop(self) -> None:
        nodes = self.nodes
        for k, prev in self.trail.pop():
            nodes[k] = prev


def sub_order_guide(itype: InteractionType) -> Optional[SubOrderGuide]:
    """Build the guide from every pinnable variable's sub-type solutions."""
    n = itype.n
    if n <= 1:
        return None
    tries: dict[tuple[int, ...], dict] = {}
    pairs = []
    for v in range(1, n + 1):
        subtype, mapper = derived_subtype(itype, v)
        key = subtype.parts
        if key not in tries:
            if is_exactly_solvable(subtype):
                sols = solve_psd(subtype, "exact-special").solutions
            else:
                sols = solve_psd(subtype, "linearized-constrained").candidates
            trie: dict = {}
            for ext in sols.extensions:
                node = trie
                for letter in ext.perm:
                    node = node.setdefault(letter, {})
            tries[key] = trie
        for bit in (0, 1):
            letter_of = {mapper(s, bit): s for s in range(1 << (n - 1))}
            pairs.append((letter_of, tries[key]))
    return SubOrderGuide(pairs)


# ---------------------------------------------------------------------------
# solve pipeline
# ---------------------------------------------------------------------------

MODES = ("exact-special", "linearized-plain", "linearized-constrained", "full")


@dataclass
class PSDReport:
    itype: InteractionType
    mode: str
    solutions: Optional[SolutionSet] = None
    candidates: Optional[SolutionSet] = None
    sample_report: object = None
    residual: Optional[tuple[LinearExtension, ...]] = None

    @property
    def count(self) -> Optional[int]:
        if self.solutions is not None:
            return len(self.solutions)
        if self.sample_report is not None:
            return len(self.sample_report.witnessed)
        if self.candidates is not None:
            return len(self.candidates)
        return None

    @property
    def candidate_count(self) -> Optional[int]:
        return None if self.candidates is None else len(self.candidates)

    @property
    def witnessed_count(self) -> Optional[int]:
        if self.sample_report is None:
            return None
        return len(self.sample_report.witnessed)

    @property
    def residual_count(self) -> Optional[int]:
        return None if self.residual is None else len(self.residual)

    def summary(self) -> dict:
        return {
            "type": str(self.itype),
            "mode": self.mode,
            "count": self.count,
            "candidate_count": self.candidate_count,
            "witnessed_count": self.witnessed_count,
            "residual_count": self.residual_count,
        }


def is_exactly_solvable(itype: InteractionType) -> bool:
    if itype.q == 1:
        return True
    if all(p == 1 for p in itype.parts):
        return True
    return itype.parts[0] == 2 and all(p == 1 for p in itype.parts[1:])


def orthant_forms(dim: int) -> tuple[LinearForm, ...]:
    """Coordinate forms cutting out the open positive orthant."""
    out = []
    for j in range(dim):
        coeffs = [0] * dim
        coeffs[j] = 1
        out.append(LinearForm(coeffs))
    return tuple(out)


def exact_instance(itype: InteractionType) -> LCLEPInstance:
    """The LC-LEP whose solution set is the true PSD solution set.

    Already-linear families keep their own coordinates and the positive
    orthant domain; log-linear ones (all parts 1) swap to independent
    factor coordinates on the whole space; types (2,1,..,1) add the
    product-splitting gate that makes the swap lossless.
    """
    inst = build_psd(itype)
    lin = linearize(inst)
    if itype.q == 1:
        return lin.to_lclep(orthant_forms(2 * itype.n))
    if all(p == 1 for p in itype.parts):
        return lin.to_lclep()
    if itype.parts[0] == 2 and all(p == 1 for p in itype.parts[1:]):
        return lin.to_lclep(special_case_domain(itype))
    raise UnsupportedMode(
        f"type ({itype}) has no exact linear reformulation; "
        "use linearized/full modes"
    )


def solve_psd(
    itype: InteractionType,
    mode: str = "exact-special",
    emit_witnesses: bool = False,
    sample_count: int = 10**6,
    seed: int = 0,
    radius: int = 1000,
    bootstrap: bool = False,
    jobs: int = 1,
) -> PSDReport:
    if mode not in MODES:
        raise UnsupportedMode(f"unknown mode {mode!r}")
    inst = build_psd(itype)
    lin = linearize(inst)

    if mode == "exact-special":
        if not is_exactly_solvable(itype):
            raise UnsupportedMode(
                f"exact-special does not apply to type ({itype})"
            )
        sols = solve(exact_instance(itype), emit_witnesses)
        return PSDReport(itype, mode, solutions=sols)

    if mode == "linearized-plain":
        cands = solve(lin.to_lclep(), emit_witnesses)
        return PSDReport(itype, mode, candidates=cands)

    constrained = _solve_constrained(itype, lin, emit_witnesses, bootstrap, jobs)
    if mode == "linearized-constrained":
        return PSDReport(itype, mode, candidates=constrained)

    # full pipeline: candidates, sampling witnesses, residual
    from . import sampler

    cfg = sampler.SampleConfig(radius=radius, sample_count=sample_count, seed=seed)
    report = sampler.sample(inst, cfg, jobs=jobs)
    residual = sampler.residual(constrained, report)
    return PSDReport(
        itype,
        "full",
        candidates=constrained,
        sample_report=report,
        residual=residual,
    )


def _solve_constrained(itype, lin, emit_witnesses, bootstrap, jobs):
    domain = quad_constraints(itype)
    base_inst = lin.to_lclep(domain)
    guide = sub_order_guide(itype)
    if not bootstrap and jobs <= 1:
        return solve(base_inst, emit_witnesses, guide)
    return _solve_bootstrapped(itype, base_inst, guide, emit_witnesses, jobs)


def _bootstrap_chain_sets(itype: InteractionType):
    """Even/odd chains for the last variable from the solved sub-type."""
    subtype, _ = derived_subtype(itype, itype.n)
    if is_exactly_solvable(subtype):
        sub = solve_psd(subtype, "exact-special").solutions
    else:
        sub = solve_psd(subtype, "linearized-constrained").candidates
    return [subproblem_refinements(itype, itype.n, bit, sub) for bit in (0, 1)]


def _refined_task(args):
    inst, chains, guide = args
    try:
        refined = refine_order(inst.po, chains)
    except CyclicRefinement:
        return []
    sub_inst = LCLEPInstance(inst.forms, refined, inst.domain_forms)
    return list(Solver(sub_inst, False, guide).run())


def _solve_bootstrapped(itype, base_inst, guide, emit_witnesses, jobs):
    """Distributed constrained solve, one work unit per sub-order chain pair.

    Each unit refines the lattice by one admissible even chain and one odd
    chain of the last variable; the union over all consistent pairs equals
    the single-process constrained solve because every admissible word
    induces exactly one such pair.
    """
    even, odd = _bootstrap_chain_sets(itype)
    tasks = []
    for _, chain_e in even:
        for _, chain_o in odd:
            tasks.append((base_inst, [chain_e, chain_o], guide))
    words: set[tuple[int, ...]] = set()
    if jobs > 1:
        import concurrent.futures

        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            for chunk in pool.map(_refined_task, tasks, chunksize=4):
                words.update(w for w, _ in chunk)
    else:
        for task in tasks:
            words.update(w for w, _ in _refined_task(task))
    ordered = sorted(words)
    exts = tuple(LinearExtension(w) for w in ordered)
    if not emit_witnesses:
        return SolutionSet(exts, None)
    wits = {}
    for w in ordered:
        res = check_sigma(base_inst, w)
        assert res.admissible
        wits[w] = res.witness
    return SolutionSet(exts, wits)
