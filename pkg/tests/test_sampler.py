"""Witness sampling: determinism, soundness, residual bookkeeping."""

import os

import pytest

from lexcone.lclep import SolutionSet
from lexcone.order import LinearExtension
from lexcone.psd import InteractionType, build_psd, evaluate, solve_psd
from lexcone.sampler import (
    SampleConfig,
    WitnessOutsideCandidates,
    export_residual,
    residual,
    sample,
)


def test_single_variable_unique_order():
    inst = build_psd(InteractionType((1,)))
    report = sample(inst, SampleConfig(radius=10, sample_count=50, seed=1))
    assert report.witnessed == {(0, 1)}
    assert report.drawn == 50
    point = report.first_witness[(0, 1)]
    assert point.ell[0] >= 1 and point.delta[0] >= 1


def test_all_ties_discarded():
    # radius 1 pins every parameter to 1: the two-plus-one products always
    # collide, so every draw is a tie
    inst = build_psd(InteractionType((2, 1)))
    report = sample(inst, SampleConfig(radius=1, sample_count=25, seed=3))
    assert report.witnessed == frozenset()
    assert report.tie_discards == 25


def test_determinism_and_monotonicity():
    inst = build_psd(InteractionType((2, 1)))
    cfg = SampleConfig(radius=50, sample_count=4000, seed=11)
    a = sample(inst, cfg)
    b = sample(inst, cfg)
    assert a.witnessed == b.witnessed
    assert a.tie_discards == b.tie_discards
    assert {w: (p.ell.entries, p.delta.entries) for w, p in a.first_witness.items()} == {
        w: (p.ell.entries, p.delta.entries) for w, p in b.first_witness.items()
    }
    smaller = sample(inst, SampleConfig(radius=50, sample_count=1500, seed=11))
    assert smaller.witnessed <= a.witnessed


def test_worker_count_invariance():
    inst = build_psd(InteractionType((2, 1)))
    cfg = SampleConfig(radius=100, sample_count=3000, seed=5)
    solo = sample(inst, cfg, jobs=1)
    duo = sample(inst, cfg, jobs=2)
    assert solo.witnessed == duo.witnessed
    assert solo.tie_discards == duo.tie_discards


def test_backend_equivalence():
    import lexcone._backend as backend

    if not backend.HAS_NUMBA:
        pytest.skip("numba unavailable")
    inst = build_psd(InteractionType((2, 1)))
    cfg = SampleConfig(radius=60, sample_count=2500, seed=9)
    results = {}
    for mode in ("numba", "python"):
        os.environ["LEXCONE_BACKEND"] = mode
        try:
            results[mode] = sample(inst, cfg)
        finally:
            os.environ.pop("LEXCONE_BACKEND", None)
    assert results["numba"].witnessed == results["python"].witnessed
    assert results["numba"].tie_discards == results["python"].tie_discards


def test_witnessed_subset_of_admissible():
    itype = InteractionType((2, 1))
    inst = build_psd(itype)
    admissible = set(solve_psd(itype, "exact-special").solutions.words())
    report = sample(inst, SampleConfig(radius=1000, sample_count=40000, seed=7))
    assert report.witnessed <= admissible
    # forty thousand draws comfortably witness every one of the 20 orders
    assert report.witnessed == admissible


def test_stored_witnesses_replay():
    itype = InteractionType((2, 2))
    inst = build_psd(itype)
    report = sample(inst, SampleConfig(radius=40, sample_count=2000, seed=13))
    for word, point in report.first_witness.items():
        values = list(evaluate(inst, point))
        assert all(values[a] < values[b] for a, b in zip(word, word[1:]))


def test_residual_bookkeeping():
    itype = InteractionType((2, 1))
    candidates = solve_psd(itype, "exact-special").solutions
    inst = build_psd(itype)
    report = sample(inst, SampleConfig(radius=1000, sample_count=40000, seed=7))
    assert residual(candidates, report) == ()
    empty = sample(inst, SampleConfig(radius=1000, sample_count=0, seed=7))
    assert [e.perm for e in residual(candidates, empty)] == candidates.words()


def test_residual_rejects_stray_witness():
    itype = InteractionType((2, 1))
    inst = build_psd(itype)
    report = sample(inst, SampleConfig(radius=1000, sample_count=5000, seed=7))
    truncated = SolutionSet(
        tuple(LinearExtension(w) for w in sorted(report.witnessed)[:3])
    )
    with pytest.raises(WitnessOutsideCandidates):
        residual(truncated, report)


def test_export_residual_format(tmp_path):
    itype = InteractionType((2, 1))
    inst = build_psd(itype)
    path = tmp_path / "residual.txt"
    export_residual(inst, [LinearExtension(tuple(range(8)))], path)
    text = path.read_text().splitlines()
    assert text[0] == "# psd-residual v1 type=2,1"
    assert text[2] == "sigma: 0 1 2 3 4 5 6 7"
    body = text[3:]
    positivity = [line for line in body if line in {f"l{k} > 0" for k in (1, 2, 3)} | {f"d{k} > 0" for k in (1, 2, 3)}]
    assert len(positivity) == 6
    inequalities = [line for line in body if "*" in line]
    assert len(inequalities) == 7
    # first difference: p1 - p0 = (l1+l2)d3
    assert inequalities[0] == "d3*l1 + d3*l2 > 0"


def test_export_residual_empty(tmp_path):
    inst = build_psd(InteractionType((2, 1)))
    path = tmp_path / "empty.txt"
    export_residual(inst, [], path)
    assert path.read_text() == "# psd-residual v1 type=2,1\n"


def test_exported_polynomials_match_exact_differences(tmp_path):
    # evaluate the expanded text against the factored evaluator
    import random
    from fractions import Fraction

    from lexcone.sampler import _monomials

    rng = random.Random(2)
    itype = InteractionType((2, 2))
    inst = build_psd(itype)
    for word in (0, 5, 9, 15):
        monos = _monomials(itype, word)
        for _ in range(10):
            ells = [rng.randint(1, 30) for _ in range(4)]
            deltas = [rng.randint(1, 30) for _ in range(4)]
            env = {f"l{k+1}": ells[k] for k in range(4)}
            env.update({f"d{k+1}": deltas[k] for k in range(4)})
            total = 0
            for mono, coeff in monos.items():
                term = coeff
                for var in mono:
                    term *= env[var]
                total += term
            point = build_psd(itype)
            from lexcone.psd import ParameterPoint

            assert total == inst.value(
                word, ParameterPoint([Fraction(v) for v in ells], [Fraction(v) for v in deltas])
            )
