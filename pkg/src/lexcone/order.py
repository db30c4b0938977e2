"""Posets on index sets, linear extensions, and Boolean lattice structure.

Elements are always addressed by integer indices 0..K.  Boolean index
functions on {1,..,n} are stored as n-bit words where variable d occupies
bit (n - d), so the index word of a Boolean function alpha is exactly
sum(alpha(d) * 2**(n-d)).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator


class CyclicRefinement(ValueError):
    """Raised when a requested order refinement introduces a cycle."""


class TooLarge(ValueError):
    """Raised when an exact-count oracle is asked to exceed its size limit."""


def boolean_index_of(bits: dict[int, int] | tuple[int, ...], n: int) -> int:
    """Index word of a Boolean function on {1,..,n}.

    ``bits`` maps variable d (1-based) to 0/1, or is a tuple
    (alpha(1), .., alpha(n)).  Variable d contributes 2**(n-d), so the
    word's d-th most significant bit is alpha(d).
    """
    if isinstance(bits, dict):
        seq = tuple(bits[d] for d in range(1, n + 1))
    else:
        seq = tuple(bits)
    if len(seq) != n or any(b not in (0, 1) for b in seq):
        raise ValueError(f"need {n} bits in {{0,1}}, got {seq!r}")
    word = 0
    for d, b in enumerate(seq, start=1):
        word |= b << (n - d)
    return word


def bits_of_index(word: int, n: int) -> tuple[int, ...]:
    """Inverse of :func:`boolean_index_of`: (alpha(1), .., alpha(n))."""
    return tuple((word >> (n - d)) & 1 for d in range(1, n + 1))


@dataclass(frozen=True)
class PartialOrder:
    """A partial order on {0,..,size-1} stored by its covering relation.

    The stored cover set is the transitive reduction; construction rejects
    cycles and removes transitively implied pairs.
    """

    size: int
    covers: frozenset[tuple[int, int]]

    def __init__(self, size: int, relations=()):
        rels = {(int(a), int(b)) for a, b in relations}
        for a, b in rels:
            if not (0 <= a < size and 0 <= b < size):
                raise ValueError(f"relation ({a},{b}) out of range for size {size}")
            if a == b:
                raise CyclicRefinement(f"reflexive relation ({a},{b})")
        closure = _transitive_closure(size, rels)
        for a in range(size):
            if closure[a] >> a & 1:
                raise CyclicRefinement(f"cycle through element {a}")
        object.__setattr__(self, "size", size)
        object.__setattr__(self, "covers", frozenset(_transitive_reduction(size, rels, closure)))

    def closure_masks(self) -> list[int]:
        """closure_masks()[a] has bit b set iff a < b in the order."""
        return _transitive_closure(self.size, self.covers)

    def predecessor_masks(self) -> list[int]:
        """predecessor_masks()[b] has bit a set iff (a,b) is a cover."""
        masks = [0] * self.size
        for a, b in self.covers:
            masks[b] |= 1 << a
        return masks

    def is_refinement_of(self, other: "PartialOrder") -> bool:
        mine = self.closure_masks()
        return all(mine[a] >> b & 1 for a, b in other.covers)


@dataclass(frozen=True)
class LinearExtension:
    """A permutation sigma of {0,..,K}, listed as (sigma(0),..,sigma(K))."""

    perm: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.perm) != list(range(len(self.perm))):
            raise ValueError(f"not a permutation of 0..{len(self.perm)-1}: {self.perm!r}")

    def __len__(self) -> int:
        return len(self.perm)

    def __iter__(self):
        return iter(self.perm)

    def positions(self) -> list[int]:
        """positions()[element] = rank of element in the word."""
        pos = [0] * len(self.perm)
        for rank, element in enumerate(self.perm):
            pos[element] = rank
        return pos


def _transitive_closure(size: int, relations) -> list[int]:
    succ = [0] * size
    for a, b in relations:
        succ[a] |= 1 << b
    # iterate to fixpoint in reverse topological sweeps; size <= 64 in practice
    changed = True
    while changed:
        changed = False
        for a in range(size):
            mask = succ[a]
            acc = mask
            while mask:
                b = (mask & -mask).bit_length() - 1
                mask &= mask - 1
                acc |= succ[b]
            if acc != succ[a]:
                succ[a] = acc
                changed = True
    return succ

def _transitive_reduction(size, relations, closure) -> set[tuple[int, int]]:
    reduced = set()
    for a, b in relations:
        # (a,b) is implied if some intermediate c has a < c and c < b
        implied = False
        mask = closure[a]
        while mask:
            c = (mask & -mask).bit_length() - 1
            mask &= mask - 1
            if c != b and (closure[c] >> b) & 1:
                implied = True
                break
        if not implied:
            reduced.add((a, b))
    return reduced


def one_bit_covers(itype) -> PartialOrder:
    """Covering relation of index words differing in exactly one raised bit.

    ``itype`` is an interaction type or a plain total variable count; only
    the total matters, the result is the n-dimensional subset lattice on
    {0,..,2^n - 1}.
    """
    n = getattr(itype, "n", None)
    if n is None:
        n = int(itype)
    size = 1 << n
    covers = []
    for i in range(size):
        for d in range(n):
            if not (i >> d) & 1:
                covers.append((i, i | (1 << d)))
    return PartialOrder(size, covers)


def is_linear_extension(sigma: LinearExtension, po: PartialOrder) -> bool:
    """True iff every relation (a,b) of ``po`` has a placed before b."""
    if len(sigma) != po.size:
        raise ValueError(f"permutation length {len(sigma)} != order size {po.size}")
    pos = sigma.positions()
    return all(pos[a] < pos[b] for a, b in po.covers)


def count_linear_extensions(po: PartialOrder, limit: int = 12) -> int:
    """Exact count by dynamic programming over downsets.

    Only intended as a small-instance oracle; raises TooLarge past
    ``limit`` elements.
    """
    if po.size > limit:
        raise TooLarge(f"{po.size} elements exceeds oracle limit {limit}")
    pred = [0] * po.size
    for a, b in po.covers:
        pred[b] |= 1 << a
    full = (1 << po.size) - 1
    counts = {0: 1}
    frontier = [0]
    while frontier:
        next_counts: dict[int, int] = {}
        for placed in frontier:
            ways = counts[placed]
            for e in range(po.size):
                bit = 1 << e
                if placed & bit or (pred[e] & ~placed):
                    continue
                key = placed | bit
                next_counts[key] = next_counts.get(key, 0) + ways
        counts.update(next_counts)
        frontier = list(next_counts)
    return counts.get(full, 0) if po.size else 1


def linear_extensions(po: PartialOrder) -> Iterator[LinearExtension]:
    """Yield all linear extensions in lexicographic word order (oracle use)."""

    def rec(placed_mask, word):
        if len(word) == po.size:
            yield LinearExtension(tuple(word))
            return
        for e in range(po.size):
            bit = 1 << e
            if placed_mask & bit or (pred[e] & ~placed_mask):
                continue
            word.append(e)
            yield from rec(placed_mask | bit, word)
            word.pop()

    pred = [0] * po.size
    for a, b in po.covers:
        pred[b] |= 1 << a
    return rec(0, [])


def refine_order(base: PartialOrder, induced) -> PartialOrder:
    """Union of ``base`` with chains imposed on index subsets.

    ``induced`` is a sequence of chains, each an ordered tuple of element
    indices (consecutive entries become relations).  Raises
    CyclicRefinement when the combined relation has a cycle.
    """
    rels = set(base.covers)
    for chain in induced:
        seq = list(chain.perm) if isinstance(chain, LinearExtension) else list(chain)
        for a, b in zip(seq, seq[1:]):
            rels.add((int(a), int(b)))
    return PartialOrder(base.size, rels)
