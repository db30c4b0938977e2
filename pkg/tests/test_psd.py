"""Interaction-type machinery: products, linearization, constraints,
special-case exactness, witnesses, sub-problem chains."""

import itertools
import random
from fractions import Fraction

import pytest

from lexcone.exact_lp import RationalVector
from lexcone.lclep import check_sigma, solve
from lexcone.order import LinearExtension, one_bit_covers
from lexcone.psd import (
    InteractionType,
    NonPositiveParameter,
    ParameterPoint,
    RealizationFailed,
    TypeMismatch,
    UnsupportedMode,
    WrongType,
    build_psd,
    coordinate_offsets,
    derived_subtype,
    evaluate,
    exact_instance,
    linearize,
    log_transfer_map,
    quad_constraints,
    realize_parameter,
    solve_psd,
    special_case_domain,
    sub_order_guide,
    subproblem_refinements,
)
from paper_data import PROD21_ORDERS, SUM3_ORDERS


def pt(ells, deltas):
    return ParameterPoint(ells, deltas)


def test_interaction_type_validation():
    assert InteractionType((2, 1)).blocks == ((1, 2), (3,))
    assert InteractionType.parse("1,2,1").parts == (2, 1, 1)
    with pytest.raises(WrongType):
        InteractionType((1, 2))
    with pytest.raises(WrongType):
        InteractionType((0,))


def test_build_psd_polynomials():
    inst = build_psd(InteractionType((2, 1)))
    # index 7 raises every variable: (l1+l2+d1+d2)(l3+d3)
    assert inst.delta_support(7) == ((1, 2), (3,))
    assert inst.delta_support(0) == ((), ())
    assert inst.delta_support(4) == ((1,), ())
    lin = build_psd(InteractionType((3,)))
    assert lin.delta_support(0) == ((),)
    assert lin.delta_support(5) == ((1, 3),)


def test_evaluate_examples():
    inst = build_psd(InteractionType((2, 1)))
    values = evaluate(inst, pt((1, 1, 1), (1, 1, 1)))
    assert tuple(values) == (2, 4, 3, 6, 3, 6, 4, 8)
    one = build_psd(InteractionType((1,)))
    assert tuple(evaluate(one, pt((1,), (2,)))) == (1, 3)


def test_evaluate_top_is_strict_maximum():
    rng = random.Random(9)
    for parts in ((2, 1), (3,), (1, 1), (2, 2)):
        inst = build_psd(InteractionType(parts))
        n = inst.itype.n
        point = pt(
            [Fraction(rng.randint(1, 50), rng.randint(1, 9)) for _ in range(n)],
            [Fraction(rng.randint(1, 50), rng.randint(1, 9)) for _ in range(n)],
        )
        values = list(evaluate(inst, point))
        assert max(values[:-1]) < values[-1]


def test_evaluate_rejects_nonpositive():
    with pytest.raises(NonPositiveParameter):
        pt((1, 0), (1, 1))
    with pytest.raises(NonPositiveParameter):
        pt((1,), (-2,))


def test_lattice_soundness_on_random_points():
    rng = random.Random(123)
    for parts in ((2, 1), (2, 2), (3, 1), (4,), (1, 1, 1, 1)):
        itype = InteractionType(parts)
        inst = build_psd(itype)
        covers = sorted(inst.lattice.covers)
        for _ in range(40):
            point = pt(
                [rng.randint(1, 1000) for _ in range(itype.n)],
                [rng.randint(1, 1000) for _ in range(itype.n)],
            )
            values = list(evaluate(inst, point))
            assert all(values[a] < values[b] for a, b in covers)


def test_linearize_two_one():
    lin = linearize(build_psd(InteractionType((2, 1))))
    assert lin.dim == 6
    # index 0 picks the base sub-index of both factors
    assert tuple(lin.forms[0].coeffs.entries) == (1, 0, 0, 0, 1, 0)
    # every form has one unit per factor block
    for f in lin.forms:
        assert sum(f.coeffs.entries[:4]) == 1
        assert sum(f.coeffs.entries[4:]) == 1


def test_linearize_one_one():
    lin = linearize(build_psd(InteractionType((1, 1))))
    assert lin.dim == 4
    got = {tuple(f.coeffs.entries) for f in lin.forms}
    assert got == {
        (1, 0, 1, 0),
        (1, 0, 0, 1),
        (0, 1, 1, 0),
        (0, 1, 0, 1),
    }


def test_linearize_identity_for_linear_types():
    lin = linearize(build_psd(InteractionType((3,))))
    assert lin.dim == 6
    assert tuple(lin.forms[5].coeffs.entries) == (1, 1, 1, 1, 0, 1)
    assert lin.extra_domain == ()


def test_log_transfer_examples():
    import math

    e = math.e
    point = pt((1, 1), (Fraction(e - 1).limit_denominator(10**12),) * 2)
    coords = log_transfer_map(point, InteractionType((1, 1)))
    assert coords.dim == 4
    approx = [float(c) for c in coords]
    assert approx[0] == pytest.approx(0, abs=1e-9)
    assert approx[1] == pytest.approx(1, abs=1e-9)
    assert approx[2] == pytest.approx(0, abs=1e-9)
    assert approx[3] == pytest.approx(1, abs=1e-9)


def test_log_transfer_preserves_order():
    rng = random.Random(3)
    itype = InteractionType((2, 1))
    inst = build_psd(itype)
    lin = linearize(inst)
    for _ in range(50):
        point = pt(
            [rng.randint(1, 500) for _ in range(3)],
            [rng.randint(1, 500) for _ in range(3)],
        )
        values = list(evaluate(inst, point))
        coords = log_transfer_map(point, itype)
        lifted = [float(f(coords)) for f in lin.forms]
        for a, b in itertools.combinations(range(8), 2):
            if values[a] < values[b] and abs(lifted[b] - lifted[a]) > 1e-9:
                assert lifted[a] < lifted[b]


def test_log_transfer_factor_order():
    point = pt((1, 1, 1), (1, 1, 1))
    coords = log_transfer_map(point, InteractionType((2, 1)))
    f1 = [float(c) for c in coords.entries[:4]]
    f2 = [float(c) for c in coords.entries[4:]]
    assert sorted(f1) == [float(c) for c in map(_log_frac, (2, 3, 3, 4))]
    assert sorted(f2) == [float(c) for c in map(_log_frac, (1, 2))]


def _log_frac(v):
    import math

    return Fraction(math.log(v))


def test_quad_constraints_two_one():
    forms = quad_constraints(InteractionType((2, 1)))
    assert len(forms) == 1
    assert tuple(forms[0].coeffs.entries) == (-1, 1, 1, -1, 0, 0)


def test_quad_constraints_counts():
    assert quad_constraints(InteractionType((1, 1, 1))) == ()
    assert len(quad_constraints(InteractionType((3, 1)))) == 6
    assert len(quad_constraints(InteractionType((2, 2)))) == 2


def test_quad_constraints_positive_under_transfer():
    # each splitting form is positive at transferred points: the inner
    # product pair beats the outer pair, exactly
    rng = random.Random(8)
    for parts in ((2, 1), (2, 2), (3, 1)):
        itype = InteractionType(parts)
        inst = build_psd(itype)
        lin = linearize(inst)
        offsets = coordinate_offsets(itype)
        forms = quad_constraints(itype)
        for _ in range(25):
            point = pt(
                [rng.randint(1, 300) for _ in range(itype.n)],
                [rng.randint(1, 300) for _ in range(itype.n)],
            )
            coords = log_transfer_map(point, itype)
            for form in forms:
                entries = form.coeffs.entries
                pos = [k for k, c in enumerate(entries) if c == 1]
                neg = [k for k, c in enumerate(entries) if c == -1]
                inner = _coord_factor_value(itype, point, pos[0]) * _coord_factor_value(
                    itype, point, pos[1]
                )
                outer = _coord_factor_value(itype, point, neg[0]) * _coord_factor_value(
                    itype, point, neg[1]
                )
                assert inner > outer
                assert float(form(coords)) > 0


def _coord_factor_value(itype, point, coord):
    offsets = coordinate_offsets(itype)
    j = max(k for k in range(itype.q) if offsets[k] <= coord)
    local = coord - offsets[j]
    block = itype.blocks[j]
    width = itype.parts[j]
    total = Fraction(0)
    for r, k in enumerate(block, start=1):
        total += point.ell[k - 1]
        if (local >> (width - r)) & 1:
            total += point.delta[k - 1]
    return total


def test_special_case_domain():
    forms = special_case_domain(InteractionType((2, 1)))
    assert len(forms) == 1
    with pytest.raises(WrongType):
        special_case_domain(InteractionType((2, 2)))
    with pytest.raises(WrongType):
        special_case_domain(InteractionType((3, 1)))


def test_solve_psd_exact_special_small():
    assert solve_psd(InteractionType((2, 1)), "exact-special").count == 20
    assert solve_psd(InteractionType((3,)), "exact-special").count == 12
    words = [
        e.perm
        for e in solve_psd(InteractionType((2, 1)), "exact-special").solutions.extensions
    ]
    assert words == PROD21_ORDERS


def test_solve_psd_unsupported():
    with pytest.raises(UnsupportedMode):
        solve_psd(InteractionType((2, 2)), "exact-special")
    with pytest.raises(UnsupportedMode):
        solve_psd(InteractionType((2, 1)), "no-such-mode")


def test_inclusion_exact_in_constrained_in_plain():
    itype = InteractionType((2, 1))
    exact = set(solve_psd(itype, "exact-special").solutions.words())
    constrained = set(solve_psd(itype, "linearized-constrained").candidates.words())
    plain = set(solve_psd(itype, "linearized-plain").candidates.words())
    assert exact <= constrained <= plain
    assert len(exact) == 20 and len(plain) == 28


def test_realize_parameter_roundtrip():
    itype = InteractionType((2, 1))
    inst = build_psd(itype)
    lclep_inst = exact_instance(itype)
    for sigma in (PROD21_ORDERS[0], PROD21_ORDERS[-1]):
        res = check_sigma(lclep_inst, sigma)
        assert res.admissible
        point = realize_parameter(itype, res.witness, sigma)
        values = [inst.value(i, point) for i in sigma]
        assert all(a < b for a, b in zip(values, values[1:]))


def test_realize_parameter_wrong_type():
    with pytest.raises(WrongType):
        realize_parameter(
            InteractionType((2, 2)), RationalVector([0] * 8), tuple(range(16))
        )


def test_realize_parameter_rejects_bad_point():
    itype = InteractionType((2, 1))
    with pytest.raises(ValueError):
        realize_parameter(itype, RationalVector([0] * 6), PROD21_ORDERS[0])


def test_derived_subtype():
    sub, mapper = derived_subtype(InteractionType((2, 1, 1)), 4)
    assert sub.parts == (2, 1)
    assert sorted(mapper(s, 0) for s in range(8)) == [0, 2, 4, 6, 8, 10, 12, 14]
    assert sorted(mapper(s, 1) for s in range(8)) == [1, 3, 5, 7, 9, 11, 13, 15]
    sub, mapper = derived_subtype(InteractionType((2, 2)), 1)
    assert sub.parts == (2, 1)


def test_subproblem_refinements_examples():
    itype = InteractionType((2, 1, 1))
    sub_solutions = solve_psd(InteractionType((2, 1)), "exact-special").solutions
    even = subproblem_refinements(itype, 4, 0, sub_solutions)
    assert all(subset == tuple(range(0, 16, 2)) for subset, _ in even)
    assert len(even) == 20
    odd = subproblem_refinements(itype, 4, 1, sub_solutions)
    assert all(subset == tuple(range(1, 16, 2)) for subset, _ in odd)
    # the identity sub-order induces the doubled chain on even words
    chain = dict(zip([s.perm for s in sub_solutions.extensions], [c for _, c in even]))
    assert chain[tuple(range(8))] == tuple(range(0, 16, 2))


def test_subproblem_refinements_small():
    itype = InteractionType((1, 1))
    sub = solve_psd(InteractionType((1,)), "exact-special").solutions
    chains = subproblem_refinements(itype, 2, 0, sub)
    assert chains == [((0, 2), (0, 2))]


def test_subproblem_refinements_type_mismatch():
    itype = InteractionType((2, 1))
    wrong = solve_psd(InteractionType((2, 1)), "exact-special").solutions
    with pytest.raises(TypeMismatch):
        subproblem_refinements(itype, 1, 0, wrong)


def test_sub_chain_order_transfers_to_full_family():
    # pinning a variable: induced order of the half family at any point
    # matches the sub-type family at the merged parameters
    rng = random.Random(17)
    itype = InteractionType((2, 1, 1))
    inst = build_psd(itype)
    for fixed_var, bit in ((4, 0), (4, 1), (1, 0), (2, 1)):
        subtype, mapper = derived_subtype(itype, fixed_var)
        sub_inst = build_psd(subtype)
        for _ in range(10):
            point = pt(
                [rng.randint(1, 200) for _ in range(itype.n)],
                [rng.randint(1, 200) for _ in range(itype.n)],
            )
            full_vals = {
                mapper(s, bit): inst.value(mapper(s, bit), point)
                for s in range(1 << subtype.n)
            }
            order_full = sorted(full_vals, key=full_vals.get)
            sub_point = _merge_point(itype, subtype, fixed_var, bit, point)
            sub_vals = [sub_inst.value(s, sub_point) for s in range(1 << subtype.n)]
            order_sub = sorted(range(1 << subtype.n), key=sub_vals.__getitem__)
            ties = len(set(full_vals.values())) < len(full_vals)
            if not ties:
                assert [mapper(s, bit) for s in order_sub] == order_full


def _merge_point(itype, subtype, fixed_var, bit, point):
    # rebuild the sub-type parameters: the pinned variable's rate (and
    # bump, when raised) folds into a sibling variable of its block
    j0 = next(j for j, b in enumerate(itype.blocks) if fixed_var in b)
    block = itype.blocks[j0]
    fold = point.ell[fixed_var - 1] + (point.delta[fixed_var - 1] if bit else 0)
    factors = []
    for j, b in enumerate(itype.blocks):
        rem = tuple(k for k in b if k != fixed_var)
        if rem:
            factors.append((len(rem), j, rem))
    factors.sort(key=lambda t: t[0], reverse=True)
    ells, deltas = [], []
    for _, j, rem in factors:
        for k in rem:
            ell = point.ell[k - 1]
            if j == j0 and k == min(rem):
                ell = ell + fold
            ells.append(ell)
            deltas.append(point.delta[k - 1])
    if not any(j == j0 for _, j, _ in factors):
        # whole factor vanished: constant positive multiplier, drop it
        pass
    return ParameterPoint(ells, deltas)


def test_count_identity_small():
    assert solve_psd(InteractionType((3,)), "exact-special").count == 12
    assert solve_psd(InteractionType((1, 1, 1)), "exact-special").count == 12
    assert solve_psd(InteractionType((2,)), "exact-special").count == 2
    assert solve_psd(InteractionType((1, 1)), "exact-special").count == 2


def test_bootstrap_matches_plain_constrained():
    itype = InteractionType((1, 1, 1))
    direct = solve_psd(itype, "linearized-constrained")
    boot = solve_psd(itype, "linearized-constrained", bootstrap=True)
    assert direct.candidates.words() == boot.candidates.words()


def test_guide_prunes_nothing_spurious():
    # guided constrained solve stays a superset of the exact set
    itype = InteractionType((2, 1, 1))
    exact = set(solve_psd(itype, "exact-special").solutions.words())
    constrained = set(solve_psd(itype, "linearized-constrained").candidates.words())
    assert exact <= constrained
    assert len(constrained) == 1344
