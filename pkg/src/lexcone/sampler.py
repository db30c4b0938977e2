"""Witness sampling over integer parameter points.

Draws uniform integer points from {1,..,r}^(2n), evaluates all 2^n product
polynomials exactly, and records the strict value order of each tie-free
draw together with the first parameter point that realised it.  Sampled
orders are certificates: polynomial values at integer points are integers,
so every recorded order is exact.

The stream is organised in fixed-size shards, each driven by its own
seed-derived generator, so results are independent of worker count and
monotone in the sample count for a fixed seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from ._backend import HAS_NUMBA, use_numba
from .lclep import SolutionSet
from .order import LinearExtension
from .psd import InteractionType, ParameterPoint, PSDInstance

SHARD = 1 << 17


class WitnessOutsideCandidates(RuntimeError):
    """A sampled order escaped the candidate superset: upstream bug."""


@dataclass(frozen=True)
class SampleConfig:
    radius: int = 1000
    sample_count: int = 10**6
    seed: int = 0

    def __post_init__(self):
        if self.radius < 1:
            raise ValueError("radius must be a positive integer")
        if self.sample_count < 0:
            raise ValueError("sample count must be nonnegative")


@dataclass
class SampleReport:
    witnessed: frozenset
    first_witness: dict
    tie_discards: int
    drawn: int

    def extensions(self) -> tuple[LinearExtension, ...]:
        return tuple(LinearExtension(w) for w in sorted(self.witnessed))


@dataclass(frozen=True)
class _Tables:
    """Precomputed evaluation tables for one interaction type."""

    n: int
    q: int
    block_slices: tuple[tuple[int, int], ...]  # (start, stop) into 0-based vars
    masks: tuple[np.ndarray, ...]  # per factor: (2^width, width) 0/1
    colmaps: tuple[np.ndarray, ...]  # per factor: index word -> local sub-index
    max_value: int


def _tables(itype: InteractionType) -> _Tables:
    n = itype.n
    masks = []
    colmaps = []
    slices = []
    for j, block in enumerate(itype.blocks):
        width = itype.parts[j]
        slices.append((block[0] - 1, block[-1]))
        mask = np.zeros((1 << width, width), dtype=np.int64)
        for local in range(1 << width):
            for r in range(width):
                mask[local, r] = (local >> (width - 1 - r)) & 1
        masks.append(mask)
        colmaps.append(
            np.array([itype.local_index(i, j) for i in range(1 << n)], dtype=np.int64)
        )
    return _Tables(n, itype.q, tuple(slices), tuple(masks), tuple(colmaps), 0)


def _value_bound(itype: InteractionType, radius: int) -> int:
    bound = 1
    for p in itype.parts:
        bound *= 2 * radius * p
    return bound


def _factor_values(pts: np.ndarray, tables: _Tables, j: int) -> np.ndarray:
    start, stop = tables.block_slices[j]
    n = tables.n
    ell = pts[:, start:stop]
    delta = pts[:, n + start : n + stop]
    return ell.sum(axis=1, keepdims=True) + delta @ tables.masks[j].T


def _values_numpy(pts: np.ndarray, tables: _Tables) -> np.ndarray:
    vals = _factor_values(pts, tables, 0)[:, tables.colmaps[0]]
    for j in range(1, tables.q):
        vals = vals * _factor_values(pts, tables, j)[:, tables.colmaps[j]]
    return vals


def _rank_rows_numpy(vals: np.ndarray):
    order = np.argsort(vals, axis=1)
    ranked = np.take_along_axis(vals, order, axis=1)
    ties = (np.diff(ranked, axis=1) == 0).any(axis=1)
    return order.astype(np.int8), ties


if HAS_NUMBA:
    from numba import njit

    @njit(cache=True)
    def _rank_rows_kernel(vals, order, ties):  # pragma: no cover - compiled
        rows, width = vals.shape
        for i in range(rows):
            for k in range(width):
                order[i, k] = k
            # insertion sort; width <= 64
            for k in range(1, width):
                key = order[i, k]
                kv = vals[i, key]
                pos = k - 1
                while pos >= 0 and vals[i, order[i, pos]] > kv:
                    order[i, pos + 1] = order[i, pos]
                    pos -= 1
                order[i, pos + 1] = key
            for k in range(width - 1):
                if vals[i, order[i, k]] == vals[i, order[i, k + 1]]:
                    ties[i] = True
                    break

    def _rank_rows_numba(vals: np.ndarray):
        rows, width = vals.shape
        order = np.empty((rows, width), dtype=np.int8)
        ties = np.zeros(rows, dtype=np.bool_)
        _rank_rows_kernel(vals, order, ties)
        return order, ties

else:  # pragma: no cover - stripped installs only

    def _rank_rows_numba(vals):
        raise RuntimeError("numba unavailable")


def _rank_rows(vals: np.ndarray):
    if use_numba():
        return _rank_rows_numba(vals)
    return _rank_rows_numpy(vals)


def _process_batch(inst, tables, pts, exact, out, base_pos, counters):
    """Fold one batch of draws into the witness map."""
    if exact:
        vals = _values_numpy(pts, tables)
        order, ties = _rank_rows(vals)
    else:
        fvals = _values_numpy(pts.astype(np.float64), tables)
        order, ties = _rank_rows_numpy(fvals)
        ranked = np.take_along_axis(fvals, order.astype(np.int64), axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            rel = np.diff(ranked, axis=1) / ranked[:, 1:]
        close = (rel < 1e-9).any(axis=1)
        redo = np.nonzero(close | ties)[0]
        ties = ties.copy()
        for i in redo:
            exact_vals = [inst.value(w, _point(pts[i], tables.n)) for w in range(1 << tables.n)]
            perm = sorted(range(1 << tables.n), key=lambda w: exact_vals[w])
            if any(
                exact_vals[perm[k]] == exact_vals[perm[k + 1]]
                for k in range(len(perm) - 1)
            ):
                ties[i] = True
            else:
                ties[i] = False
                order[i] = np.array(perm, dtype=np.int8)
    counters["ties"] += int(ties.sum())
    keep = np.nonzero(~ties)[0]
    if keep.size == 0:
        return
    rows = np.ascontiguousarray(order[keep])
    flat = rows.view([("", rows.dtype)] * rows.shape[1]).ravel()
    uniq, first = np.unique(flat, return_index=True)
    for pattern, idx in zip(uniq, first):
        word = tuple(int(x) for x in rows[idx])
        if word not in out:
            out[word] = (base_pos + int(keep[idx]), pts[keep[idx]].copy())


def _point(row: Sequence[int], n: int) -> ParameterPoint:
    return ParameterPoint(
        [Fraction(int(v)) for v in row[:n]], [Fraction(int(v)) for v in row[n:]]
    )


def _shard_args(cfg: SampleConfig):
    full, rem = divmod(cfg.sample_count, SHARD)
    for s in range(full):
        yield s, SHARD
    if rem:
        yield full, rem


def _sample_shard(args):
    itype_parts, radius, seed, shard_index, count = args
    itype = InteractionType(itype_parts)
    from .psd import build_psd

    inst = build_psd(itype)
    tables = _tables(itype)
    exact = _value_bound(itype, radius) < (1 << 62)
    rng = np.random.default_rng([seed, shard_index])
    out: dict = {}
    counters = {"ties": 0}
    batch = 1 << 15
    done = 0
    while done < count:
        take = min(batch, count - done)
        pts = rng.integers(1, radius + 1, size=(take, 2 * tables.n), dtype=np.int64)
        _process_batch(
            inst, tables, pts, exact, out, shard_index * SHARD + done, counters
        )
        done += take
    return out, counters["ties"], count


def sample(inst: PSDInstance, cfg: SampleConfig, jobs: int = 1) -> SampleReport:
    """Deterministic witness sampling; identical for any worker count."""
    tasks = [
        (inst.itype.parts, cfg.radius, cfg.seed, s, c) for s, c in _shard_args(cfg)
    ]
    results = []
    if jobs > 1 and len(tasks) > 1:
        import concurrent.futures

        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_sample_shard, tasks))
    else:
        results = [_sample_shard(t) for t in tasks]

    merged: dict = {}
    ties = 0
    drawn = 0
    for out, shard_ties, count in results:
        ties += shard_ties
        drawn += count
        for word, (pos, row) in out.items():
            if word not in merged or pos < merged[word][0]:
                merged[word] = (pos, row)
    _replay_witnesses(inst, merged)
    witnesses = {
        word: _point(row, inst.itype.n) for word, (pos, row) in merged.items()
    }
    return SampleReport(frozenset(witnesses), witnesses, ties, drawn)


def _replay_witnesses(inst: PSDInstance, merged: dict) -> None:
    """Exact re-evaluation of every stored witness against its order."""
    if not merged:
        return
    tables = _tables(inst.itype)
    words = list(merged)
    rows = np.stack([merged[w][1] for w in words])
    radius = int(rows.max())
    if _value_bound(inst.itype, radius) < (1 << 62):
        vals = _values_numpy(rows, tables)
        perm = np.array(words, dtype=np.int64)
        picked = np.take_along_axis(vals, perm, axis=1)
        ok = (np.diff(picked, axis=1) > 0).all(axis=1)
        assert bool(ok.all()), "stored witness must replay"
    else:  # pragma: no cover - only reachable at order-6 scale
        for word in words:
            point = _point(merged[word][1], inst.itype.n)
            values = [inst.value(i, point) for i in word]
            assert all(a < b for a, b in zip(values, values[1:]))


def residual(candidates: SolutionSet, report: SampleReport) -> tuple[LinearExtension, ...]:
    """Candidate orders not yet witnessed, lexicographically sorted."""
    cand = set(candidates.words())
    stray = report.witnessed - cand
    if stray:
        raise WitnessOutsideCandidates(
            f"{len(stray)} sampled orders outside the candidate set, e.g. "
            f"{sorted(stray)[0]}"
        )
    return tuple(LinearExtension(w) for w in sorted(cand - report.witnessed))


# ---------------------------------------------------------------------------
# residual export
# ---------------------------------------------------------------------------


def _monomials(itype: InteractionType, word: int) -> dict[tuple[str, ...], int]:
    """Expand one product polynomial into integer monomials."""
    n = itype.n
    out: dict[tuple[str, ...], int] = {(): 1}
    for j, block in enumerate(itype.blocks):
        terms = []
        for k in block:
            terms.append(f"l{k}")
            if (word >> (n - k)) & 1:
                terms.append(f"d{k}")
        nxt: dict[tuple[str, ...], int] = {}
        for mono, coeff in out.items():
            for t in terms:
                key = tuple(sorted(mono + (t,)))
                nxt[key] = nxt.get(key, 0) + coeff
        out = nxt
    return out


def _poly_text(monos: dict[tuple[str, ...], int]) -> str:
    parts = []
    for mono in sorted(monos):
        coeff = monos[mono]
        if coeff == 0:
            continue
        body = "*".join(mono) if mono else "1"
        mag = abs(coeff)
        term = body if mag == 1 else f"{mag}*{body}"
        if not parts:
            parts.append(term if coeff > 0 else f"-{term}")
        else:
            parts.append(f"+ {term}" if coeff > 0 else f"- {term}")
    return " ".join(parts) if parts else "0"


def export_residual(inst: PSDInstance, residual_orders, path) -> None:
    """Write each unresolved order as a polynomial inequality system.

    One record per order: its word, positivity of every rate and bump, and
    the expanded consecutive differences, each with a " > 0" suffix.  The
    format is plain text for consumption by external quantifier
    elimination tools.
    """
    itype = inst.itype
    n = itype.n
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# psd-residual v1 type={itype}\n")
        for ext in residual_orders:
            word = tuple(ext.perm if isinstance(ext, LinearExtension) else ext)
            fh.write("\n")
            fh.write("sigma: " + " ".join(str(x) for x in word) + "\n")
            for k in range(1, n + 1):
                fh.write(f"l{k} > 0\n")
            for k in range(1, n + 1):
                fh.write(f"d{k} > 0\n")
            for a, b in zip(word, word[1:]):
                hi = _monomials(itype, b)
                lo = _monomials(itype, a)
                diff = dict(hi)
                for mono, coeff in lo.items():
                    diff[mono] = diff.get(mono, 0) - coeff
                fh.write(_poly_text(diff) + " > 0\n")
