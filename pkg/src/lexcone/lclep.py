"""Solver for linearly constrained linear extension problems.

An instance is a family of homogeneous linear forms indexed 0..K, a
partial order on the indices, and a domain cone given by strict linear
inequalities.  The solver enumerates exactly the total orders sigma for
which some domain point xi satisfies

    form[sigma(0)](xi) < form[sigma(1)](xi) < ... < form[sigma(K)](xi).

Enumeration is a depth-first search over partial words.  Each live node
carries an exact integer interior point of its chamber (the set of domain
points realising the partial order built so far).  A candidate extension
is accepted immediately when the carried point already separates it;
otherwise one exact LP decides the subtree: a conic membership proof
prunes it, and a Farkas separator combined with the parent point yields an
interior point for the child.  Either way the decision is certified in
exact arithmetic.

A note on the root transition: the chamber of a partial word constrains
only consecutive differences of placed forms, so placing the first element
adds no constraint at all.  Requiring positivity of the first form itself
would wrongly prune orders whose minimum is nonpositive somewhere on the
domain.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Sequence

from . import _simplex
from .cone import ConeSpec
from .exact_lp import (
    DimensionMismatch,
    RationalMatrix,
    RationalVector,
    format_rational,
    max_slack_point,
    parse_rational,
    primitive_int_vector,
)
from .order import LinearExtension, PartialOrder


class InvalidPartition(ValueError):
    """Raised when a prefix set overlaps or fails to cover the search tree."""


@dataclass(frozen=True)
class LinearForm:
    """A homogeneous linear polynomial stored by its coefficient vector."""

    coeffs: RationalVector

    def __init__(self, coeffs):
        vec = coeffs if isinstance(coeffs, RationalVector) else RationalVector(coeffs)
        object.__setattr__(self, "coeffs", vec)

    @property
    def dim(self) -> int:
        return self.coeffs.dim

    def __call__(self, xi) -> Fraction:
        return self.coeffs.dot(xi)


@dataclass(frozen=True)
class LCLEPInstance:
    forms: tuple[LinearForm, ...]
    po: PartialOrder
    domain_forms: tuple[LinearForm, ...]

    def __init__(self, forms, po: PartialOrder, domain_forms=()):
        fs = tuple(f if isinstance(f, LinearForm) else LinearForm(f) for f in forms)
        ds = tuple(f if isinstance(f, LinearForm) else LinearForm(f) for f in domain_forms)
        if not fs:
            raise ValueError("instance needs at least one form")
        dims = {f.dim for f in fs} | {f.dim for f in ds}
        if len(dims) != 1:
            raise DimensionMismatch(f"mixed form dimensions {sorted(dims)}")
        if po.size != len(fs):
            raise ValueError(f"partial order on {po.size} elements, {len(fs)} forms")
        object.__setattr__(self, "forms", fs)
        object.__setattr__(self, "po", po)
        object.__setattr__(self, "domain_forms", ds)

    @property
    def dim(self) -> int:
        return self.forms[0].dim

    @property
    def size(self) -> int:
        return len(self.forms)


@dataclass(frozen=True)
class SolutionSet:
    """Admissible extensions in lexicographic word order, optional witnesses."""

    extensions: tuple[LinearExtension, ...]
    witnesses: Optional[dict[tuple[int, ...], RationalVector]] = None

    def __len__(self) -> int:
        return len(self.extensions)

    def words(self) -> list[tuple[int, ...]]:
        return [e.perm for e in self.extensions]


def base_cone(inst: LCLEPInstance) -> ConeSpec:
    """Domain forms plus one difference vector per covering pair."""
    gens = [f.coeffs for f in inst.domain_forms]
    for a, b in sorted(inst.po.covers):
        gens.append(inst.forms[b].coeffs + (-inst.forms[a].coeffs))
    return ConeSpec(RationalMatrix(gens), inst.dim)


def _dot(a: Sequence[int], b: Sequence[int]) -> int:
    s = 0
    for x, y in zip(a, b):
        s += x * y
    return s


@dataclass
class _Frame:
    word: tuple[int, ...]
    placed: int
    last: int
    witness: tuple[int, ...]
    candidates: list[int]
    idx: int
    appended: bool


class Solver:
    """Reusable search state for one instance.

    ``run`` is a generator of (word, witness) pairs in lexicographic word
    order; between yields ``pending_words`` describes the unexplored
    subtrees, which makes checkpoint/resume and partitioned runs exact.
    """

    def __init__(self, inst: LCLEPInstance, emit_witnesses: bool = False, guide=None):
        self.inst = inst
        self.emit_witnesses = emit_witnesses
        self.guide = guide
        self.dim = inst.dim
        self.size = inst.size
        self.pred = inst.po.predecessor_masks()
        zero = (0,) * self.dim

        raw = [f.coeffs for f in inst.domain_forms]
        for a, b in sorted(inst.po.covers):
            raw.append(inst.forms[b].coeffs + (-inst.forms[a].coeffs))
        self.infeasible = False
        base: list[tuple[int, ...]] = []
        seen: dict[tuple[int, ...], int] = {}
        for v in raw:
            iv = primitive_int_vector(v.entries)
            if iv == zero:
                self.infeasible = True
            elif iv not in seen:
                seen[iv] = 1
                base.append(iv)
        self.base = base
        self.gen_count = dict(seen)

        coeffs = [f.coeffs.entries for f in inst.forms]
        self.diff = [
            [
                primitive_int_vector(tuple(a - b for a, b in zip(coeffs[i], coeffs[j])))
                if i != j
                else zero
                for j in range(self.size)
            ]
            for i in range(self.size)
        ]
        self.zero = zero
        self._root_witness: Optional[tuple[int, ...]] = None
        self.frames: list[_Frame] = []
        self.gens: list[tuple[int, ...]] = []
        self.lp_calls = 0

    # -- feasibility primitives -------------------------------------------

    def root_witness(self) -> Optional[tuple[int, ...]]:
        """Interior point of the base chamber, or None when it is empty."""
        if self.infeasible:
            return None
        if self._root_witness is None:
            if not self.base:
                self._root_witness = (0,) * self.dim
            else:
                slack, point = max_slack_point(self.base, self.dim)
                if slack <= 0:
                    self.infeasible = True
                    return None
                self._root_witness = self._intify(point, self.base, None)
        return self._root_witness

    def _intify(self, fracs, gens, u) -> tuple[int, ...]:
        scale = 1 << 24
        rounded = tuple(int(round(Fraction(f) * scale)) for f in fracs)
        if any(rounded) and self._certifies(rounded, gens, u):
            return rounded
        exact = primitive_int_vector(fracs)
        assert self._certifies(exact, gens, u), "witness construction failed"
        return exact

    def _certifies(self, w, gens, u) -> bool:
        if u is not None and _dot(w, u) <= 0:
            return False
        return all(_dot(w, g) > 0 for g in gens)

    def _child_witness(self, u: tuple[int, ...], witness: tuple[int, ...]):
        """Decide the child chamber with u appended; None when empty."""
        if u == self.zero:
            return None
        if _dot(witness, u) > 0:
            return witness
        neg = tuple(-x for x in u)
        if neg in self.gen_count:
            return None
        self.lp_calls += 1
        rows = [[g[r] for g in self.gens] for r in range(self.dim)]
        b = [-x for x in u]
        status, _, farkas = _simplex.solve_standard(rows, b, [0] * len(self.gens))
        if status == _simplex.OPTIMAL:
            return None  # -u is a conic combination: chamber is empty
        sep = [-y for y in farkas]  # sep.g >= 0 on generators, sep.u > 0
        su = sum(s * x for s, x in zip(sep, u))
        pu = _dot(witness, u)
        eps = Fraction(1) if pu >= 0 else su / (-2 * pu)
        mixed = [s + eps * wx for s, wx in zip(sep, witness)]
        return self._intify(mixed, self.gens, u)

    # -- search ------------------------------------------------------------

    def _candidates(self, placed: int) -> list[int]:
        pred = self.pred
        return [
            i
            for i in range(self.size)
            if not placed >> i & 1 and not (pred[i] & ~placed)
        ]

    def _push_gen(self, u: tuple[int, ...]) -> bool:
        if u in self.gen_count:
            self.gen_count[u] += 1
            return False
        self.gen_count[u] = 1
        self.gens.append(u)
        return True

    def _pop_gen(self, u: tuple[int, ...], appended: bool) -> None:
        self.gen_count[u] -= 1
        if not self.gen_count[u]:
            del self.gen_count[u]
        if appended:
            self.gens.pop()

    def _enter(self, word, placed, last, witness) -> _Frame:
        frame = _Frame(word, placed, last, witness, self._candidates(placed), 0, False)
        self.frames.append(frame)
        return frame

    def replay(self, prefix: Sequence[int]):
        """Walk a partial word from the root; None when its subtree is dead."""
        witness = self.root_witness()
        if witness is None:
            return None
        word: tuple[int, ...] = ()
        placed = 0
        last = -1
        self.frames = []
        self.gens = list(self.base)
        self.gen_count = {g: 1 for g in self.base}
        guide = self.guide
        if guide is not None:
            guide.reset()
        frame = self._enter(word, placed, last, witness)
        for x in prefix:
            if x not in frame.candidates:
                return None
            if guide is not None and not guide.allows(x):
                return None
            appended = False
            if frame.last >= 0:
                u = self.diff[x][frame.last]
                witness = self._child_witness(u, frame.witness)
                if witness is None:
                    return None
                appended = self._push_gen(u)
            else:
                witness = frame.witness
            if guide is not None:
                guide.push(x)
            # ancestors of the prefix contribute no sibling subtrees
            frame.idx = len(frame.candidates)
            word = word + (x,)
            frame = self._enter(word, frame.placed | 1 << x, x, witness)
            frame.appended = appended
        return frame

    def run(self, prefix: Sequence[int] = ()) -> Iterator[tuple[tuple[int, ...], Optional[tuple[int, ...]]]]:
        start = self.replay(prefix)
        if start is None:
            return
        full = (1 << self.size) - 1
        if start.placed == full:
            yield start.word, (start.witness if self.emit_witnesses else None)
            return
        frames = self.frames
        guide = self.guide
        while frames:
            frame = frames[-1]
            if frame.idx >= len(frame.candidates):
                frames.pop()
                if guide is not None and frame.word:
                    guide.pop()
                # undo the chain generator appended on entry to this frame
                if len(frame.word) >= 2:
                    self._pop_gen(self.diff[frame.word[-1]][frame.word[-2]], frame.appended)
                continue
            i = frame.candidates[frame.idx]
            frame.idx += 1
            if guide is not None and not guide.allows(i):
                continue
            if frame.last >= 0:
                u = self.diff[i][frame.last]
                witness = self._child_witness(u, frame.witness)
                if witness is None:
                    continue
            else:
                u = None
                witness = frame.witness
            placed = frame.placed | 1 << i
            word = frame.word + (i,)
            if placed == full:
                yield word, (witness if self.emit_witnesses else None)
                continue
            appended = self._push_gen(u) if u is not None else False
            if guide is not None:
                guide.push(i)
            child = self._enter(word, placed, i, witness)
            child.appended = appended

    def pending_words(self) -> list[tuple[int, ...]]:
        out = []
        for frame in self.frames:
            for c in frame.candidates[frame.idx :]:
                out.append(frame.word + (c,))
        return sorted(out)


def solve(inst: LCLEPInstance, emit_witnesses: bool = False, guide=None) -> SolutionSet:
    """All admissible linear extensions; empty set when the base cone fails."""
    solver = Solver(inst, emit_witnesses, guide)
    sols = list(solver.run())
    exts = tuple(LinearExtension(w) for w, _ in sols)
    wits = None
    if emit_witnesses:
        wits = {w: RationalVector(x) for w, x in sols}
    return SolutionSet(exts, wits)


@dataclass(frozen=True)
class SigmaCheck:
    admissible: bool
    witness: Optional[RationalVector] = None


def check_sigma(inst: LCLEPInstance, sigma) -> SigmaCheck:
    """Single feasibility test of one total order (oracle / re-verification).

    Builds the chamber system of sigma directly (base generators plus the
    consecutive difference vectors) and solves one interior-point LP, so it
    shares no state with the incremental search.
    """
    word = tuple(sigma.perm if isinstance(sigma, LinearExtension) else sigma)
    if sorted(word) != list(range(inst.size)):
        raise ValueError(f"not a permutation of 0..{inst.size - 1}: {word!r}")
    gens: list[tuple[int, ...]] = []
    zero = (0,) * inst.dim
    for f in inst.domain_forms:
        gens.append(primitive_int_vector(f.coeffs.entries))
    for a, b in sorted(inst.po.covers):
        gens.append(
            primitive_int_vector((inst.forms[b].coeffs + (-inst.forms[a].coeffs)).entries)
        )
    for x, y in zip(word, word[1:]):
        gens.append(
            primitive_int_vector((inst.forms[y].coeffs + (-inst.forms[x].coeffs)).entries)
        )
    if any(g == zero for g in gens):
        return SigmaCheck(False)
    gens = list(dict.fromkeys(gens))
    if not gens:
        return SigmaCheck(True, RationalVector([0] * inst.dim))
    slack, point = max_slack_point(gens, inst.dim)
    if slack <= 0:
        return SigmaCheck(False)
    return SigmaCheck(True, RationalVector(point))


# ---------------------------------------------------------------------------
# partitioned runs
# ---------------------------------------------------------------------------


def _validate_prefixes(inst: LCLEPInstance, prefixes) -> list[tuple[int, ...]]:
    words = [tuple(int(x) for x in p) for p in prefixes]
    if not words:
        raise InvalidPartition("empty prefix list")
    for w in words:
        if len(set(w)) != len(w) or any(not 0 <= x < inst.size for x in w):
            raise InvalidPartition(f"malformed prefix word {w!r}")
    for i, a in enumerate(words):
        for b in words[i + 1 :]:
            shorter, longer = (a, b) if len(a) <= len(b) else (b, a)
            if longer[: len(shorter)] == shorter:
                raise InvalidPartition(f"overlapping prefixes {a!r} and {b!r}")
    return words


def _check_coverage(inst: LCLEPInstance, words: list[tuple[int, ...]]) -> None:
    """Every live search path must pass through exactly one prefix."""
    stop = set(words)
    if () in stop:
        return
    maxlen = max(len(w) for w in words)
    solver = Solver(inst)
    if solver.root_witness() is None:
        return  # empty tree is vacuously covered

    def descend(word, placed, last, witness):
        if word in stop:
            return
        if len(word) == maxlen:
            raise InvalidPartition(f"live word {word!r} not covered by any prefix")
        if placed == (1 << inst.size) - 1:
            raise InvalidPartition(f"complete word {word!r} not covered by any prefix")
        for i in solver._candidates(placed):
            if last >= 0:
                u = solver.diff[i][last]
                w = solver._child_witness(u, witness)
                if w is None:
                    continue
                appended = solver._push_gen(u)
                descend(word + (i,), placed | 1 << i, i, w)
                solver._pop_gen(u, appended)
            else:
                descend(word + (i,), placed | 1 << i, i, witness)

    solver.gens = list(solver.base)
    solver.gen_count = {g: 1 for g in solver.base}
    descend((), 0, -1, solver.root_witness())


def _solve_prefix(args):
    inst, prefix, emit = args
    solver = Solver(inst, emit)
    return list(solver.run(prefix))


def solve_partitioned(
    inst: LCLEPInstance,
    prefixes,
    emit_witnesses: bool = False,
    jobs: int = 1,
) -> SolutionSet:
    """Union of subtree solves over a covering, non-overlapping prefix set.

    Equals ``solve`` exactly; subtrees are independent so this is the
    distribution unit for multi-process runs.
    """
    words = _validate_prefixes(inst, prefixes)
    _check_coverage(inst, words)
    tasks = [(inst, w, emit_witnesses) for w in sorted(words)]
    if jobs > 1 and len(tasks) > 1:
        import concurrent.futures

        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_solve_prefix, tasks))
    else:
        chunks = [_solve_prefix(t) for t in tasks]
    merged: list = []
    for chunk in chunks:
        merged.extend(chunk)
    merged.sort(key=lambda item: item[0])
    exts = tuple(LinearExtension(w) for w, _ in merged)
    wits = {w: RationalVector(x) for w, x in merged} if emit_witnesses else None
    return SolutionSet(exts, wits)


def generate_prefixes(inst: LCLEPInstance, depth: int) -> list[tuple[int, ...]]:
    """Live partial words at the given depth (shorter if words complete)."""
    depth = min(depth, inst.size)
    if depth <= 0:
        return [()]
    solver = Solver(inst)
    if solver.root_witness() is None:
        return []
    out: list[tuple[int, ...]] = []

    def descend(word, placed, last, witness):
        if len(word) == depth:
            out.append(word)
            return
        for i in solver._candidates(placed):
            if last >= 0:
                u = solver.diff[i][last]
                w = solver._child_witness(u, witness)
                if w is None:
                    continue
                appended = solver._push_gen(u)
                descend(word + (i,), placed | 1 << i, i, w)
                solver._pop_gen(u, appended)
            else:
                descend(word + (i,), placed | 1 << i, i, witness)

    solver.gens = list(solver.base)
    solver.gen_count = {g: 1 for g in solver.base}
    descend((), 0, -1, solver.root_witness())
    return out


# ---------------------------------------------------------------------------
# file formats
# ---------------------------------------------------------------------------


def instance_to_dict(inst: LCLEPInstance) -> dict:
    return {
        "dimension": inst.dim,
        "forms": [[format_rational(c) for c in f.coeffs] for f in inst.forms],
        "covers": sorted([a, b] for a, b in inst.po.covers),
        "domain_forms": [
            [format_rational(c) for c in f.coeffs] for f in inst.domain_forms
        ],
    }


def instance_from_dict(data: dict) -> LCLEPInstance:
    try:
        dim = int(data["dimension"])
        forms = [
            LinearForm([parse_rational(c) for c in row]) for row in data["forms"]
        ]
        domain = [
            LinearForm([parse_rational(c) for c in row])
            for row in data.get("domain_forms", [])
        ]
        covers = [(int(a), int(b)) for a, b in data.get("covers", [])]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed instance: {exc}") from exc
    if any(f.dim != dim for f in forms) or any(f.dim != dim for f in domain):
        raise ValueError("form length does not match declared dimension")
    po = PartialOrder(len(forms), covers)
    return LCLEPInstance(forms, po, domain)


def load_instance(path) -> LCLEPInstance:
    with open(path, "r", encoding="utf-8") as fh:
        return instance_from_dict(json.load(fh))


def save_instance(inst: LCLEPInstance, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(instance_to_dict(inst), fh)
        fh.write("\n")


def solution_line(word: Sequence[int], witness=None) -> str:
    rec: dict = {"sigma": list(word)}
    if witness is not None:
        entries = witness.entries if isinstance(witness, RationalVector) else witness
        rec["witness"] = [format_rational(Fraction(x)) for x in entries]
    return json.dumps(rec, separators=(",", ":"))


def read_solution_lines(path):
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            word = tuple(int(x) for x in rec["sigma"])
            witness = None
            if rec.get("witness") is not None:
                witness = RationalVector([parse_rational(x) for x in rec["witness"]])
            out.append((word, witness))
    return out
