"""Posets, Boolean index words, linear extension oracles."""

import itertools
import random

import pytest

from lexcone.order import (
    CyclicRefinement,
    LinearExtension,
    PartialOrder,
    TooLarge,
    bits_of_index,
    boolean_index_of,
    count_linear_extensions,
    is_linear_extension,
    linear_extensions,
    one_bit_covers,
    refine_order,
)


def test_boolean_index_of():
    assert boolean_index_of((1, 0, 0), 3) == 4
    assert boolean_index_of((0, 0, 0), 3) == 0
    assert boolean_index_of((1, 1, 1), 3) == 7
    assert boolean_index_of({1: 0, 2: 1, 3: 0}, 3) == 2


def test_boolean_index_bijection():
    for n in (1, 2, 3, 4):
        words = {boolean_index_of(bits, n) for bits in itertools.product((0, 1), repeat=n)}
        assert words == set(range(1 << n))
        for i in range(1 << n):
            assert boolean_index_of(bits_of_index(i, n), n) == i


def test_one_bit_covers_three_cube():
    po = one_bit_covers(3)
    ups_of_zero = {b for a, b in po.covers if a == 0}
    downs_of_seven = {a for a, b in po.covers if b == 7}
    assert ups_of_zero == {1, 2, 4}
    assert downs_of_seven == {3, 5, 6}
    assert len(po.covers) == 3 * 2 ** (3 - 1)


def test_one_bit_covers_small():
    assert one_bit_covers(1).covers == frozenset({(0, 1)})


def test_one_bit_covers_total_order_only():
    from lexcone.psd import InteractionType

    assert one_bit_covers(InteractionType((2, 1))) == one_bit_covers(3)
    assert one_bit_covers(InteractionType((1, 1, 1))) == one_bit_covers(3)


def test_count_linear_extensions():
    assert count_linear_extensions(one_bit_covers(3)) == 48
    assert count_linear_extensions(PartialOrder(3)) == 6
    chain = PartialOrder(4, [(0, 1), (1, 2), (2, 3)])
    assert count_linear_extensions(chain) == 1
    assert count_linear_extensions(one_bit_covers(1)) == 1
    assert count_linear_extensions(one_bit_covers(2)) == 2


def test_count_too_large():
    with pytest.raises(TooLarge):
        count_linear_extensions(PartialOrder(13))


def test_is_linear_extension():
    cube = one_bit_covers(3)
    assert is_linear_extension(LinearExtension(tuple(range(8))), cube)
    bad = LinearExtension((1, 0, 2, 3, 4, 5, 6, 7))
    assert not is_linear_extension(bad, cube)


def test_listing_matches_count():
    rng = random.Random(3)
    for _ in range(20):
        size = rng.randint(2, 6)
        rels = set()
        for _ in range(rng.randint(0, size)):
            a, b = rng.sample(range(size), 2)
            rels.add((min(a, b), max(a, b)))
        po = PartialOrder(size, rels)
        listed = list(linear_extensions(po))
        assert len(listed) == count_linear_extensions(po)
        assert all(is_linear_extension(s, po) for s in listed)
        words = [s.perm for s in listed]
        assert words == sorted(words)


def test_refine_order():
    cube = one_bit_covers(3)
    refined = refine_order(cube, [(0, 2, 4, 6), (1, 3, 5, 7)])
    closure = refined.closure_masks()
    assert closure[2] >> 4 & 1
    assert closure[3] >> 5 & 1
    assert refined.is_refinement_of(cube)
    assert refine_order(cube, []) == cube


def test_refine_order_cycle():
    chain = PartialOrder(2, [(0, 1)])
    with pytest.raises(CyclicRefinement):
        refine_order(chain, [(1, 0)])


def test_transitive_reduction():
    po = PartialOrder(3, [(0, 1), (1, 2), (0, 2)])
    assert po.covers == frozenset({(0, 1), (1, 2)})


def test_permutation_validation():
    with pytest.raises(ValueError):
        LinearExtension((0, 0, 1))
