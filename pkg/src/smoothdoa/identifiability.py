"""Verdicts for the two rank conditions that make smoothed MUSIC unambiguous.

Condition (a) asks every ``K + 1`` distinct directions to give a full-rank
manifold on the basic subarray; condition (b) asks the same of every ``K``
directions on the shift set. Both quantify over a continuum, so a verdict is
one of three things: proven by a named sufficiency rule, refuted by an
explicit counterexample, or unknown with the numerical evidence collected.

Numerical search works in spatial frequency ``u = sin(theta)``. For integer
positions the manifold is 2-periodic in ``u`` and a common translation of
every ``u`` multiplies the manifold by a unitary diagonal matrix, so singular
values depend only on the offsets between the directions. The search fixes
the first direction at ``u = 0`` and scans offsets on the circle of
circumference 2, keeping every pair of directions at least
``min_separation`` apart (nearly coincident directions always produce
arbitrarily small, but never zero, singular values).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from itertools import combinations
from typing import NamedTuple, Optional

import numpy as np

from .geometry import Decomposition, SensorPositions, longest_ula_segment
from .manifold import AngleSet, make_rng, manifold_matrix

_GOLDEN = (math.sqrt(5) - 1) / 2
_XTOL = 1e-15
_BATCH = 4096


class Status(str, Enum):
    PROVEN_SUFFICIENT = 'ProvenSufficient'
    COUNTEREXAMPLE_FOUND = 'CounterexampleFound'
    UNKNOWN = 'Unknown'


class RankBudgetError(ValueError):
    """The requested number of sources cannot fit the array."""


@dataclass(frozen=True)
class FalsificationConfig:
    """Settings for the counterexample search.

    Args:
        grid_points: Cells per offset dimension on the ``u`` circle. ``None``
            picks 256 for tuples of at most two directions and 64 otherwise.
        refinement_iters: Maximum coordinate-descent rounds per start.
        rank_tol: A tuple is a counterexample when the required singular
            value falls below ``rank_tol * sigma_1``.
        seed: Seed for the random restarts.
        n_starts: Number of best grid cells refined.
        restarts: Number of random feasible starts refined.
        min_separation: Minimum circular distance in ``u`` between two
            directions. ``None`` means one grid cell, ``2 / grid_points``.
    """

    grid_points: Optional[int] = None
    refinement_iters: int = 40
    rank_tol: float = 1e-8
    seed: int = 0
    n_starts: int = 8
    restarts: int = 8
    min_separation: Optional[float] = None

    def __post_init__(self):
        if self.grid_points is not None and self.grid_points < 64:
            raise ValueError('grid_points must be at least 64.')
        if not 0 < self.rank_tol < 1e-3:
            raise ValueError('rank_tol must lie in (0, 1e-3).')
        if self.refinement_iters < 0 or self.n_starts < 1 or self.restarts < 0:
            raise ValueError('Invalid refinement settings.')

    def points_for(self, tuple_size: int) -> int:
        if self.grid_points is not None:
            return self.grid_points
        return 256 if tuple_size <= 2 else 64

    def separation_for(self, tuple_size: int) -> float:
        if self.min_separation is not None:
            return self.min_separation
        return 2.0 / self.points_for(tuple_size)


DEFAULT_CONFIG = FalsificationConfig()


@dataclass(frozen=True)
class IdentifiabilityVerdict:
    status: Status
    rule: Optional[str] = None
    detail: Optional[str] = None
    counterexample: Optional[AngleSet] = None
    min_singular_value: Optional[float] = None
    relative_gap: Optional[float] = None

    @property
    def proven(self) -> bool:
        return self.status is Status.PROVEN_SUFFICIENT

    @property
    def falsified(self) -> bool:
        return self.status is Status.COUNTEREXAMPLE_FOUND

    def to_json(self) -> dict:
        ce = None
        if self.counterexample is not None:
            ce = [float(d) for d in self.counterexample.degrees]
        return {'status': self.status.value, 'rule': self.rule,
                'counterexample_deg': ce, 'min_sv': self.min_singular_value}


class Theorem1Report(NamedTuple):
    verdict_a: Optional[IdentifiabilityVerdict]
    verdict_b: Optional[IdentifiabilityVerdict]
    k_max: int
    feasible: bool


def _scores(positions: np.ndarray, offsets: np.ndarray, rank: int):
    """Relative and absolute ``rank``-th singular values for offset tuples.

    ``offsets`` has shape ``(B, t - 1)``; the first direction sits at ``u=0``.
    """
    b = offsets.shape[0]
    u = np.concatenate([np.zeros((b, 1)), offsets], axis=1)
    rel = np.empty(b)
    absolute = np.empty(b)
    for lo in range(0, b, _BATCH):
        phase = np.pi * positions[None, :, None] * u[lo:lo + _BATCH, None, :]
        sv = np.linalg.svd(np.exp(1j * phase), compute_uv=False)
        absolute[lo:lo + _BATCH] = sv[:, rank - 1]
        rel[lo:lo + _BATCH] = sv[:, rank - 1] / sv[:, 0]
    return rel, absolute


def _grid_offsets(points: int, tuple_size: int, sep: float) -> np.ndarray:
    step = 2.0 / points
    min_gap = max(1, math.ceil(sep / step - 1e-9))
    idx = np.array([c for c in combinations(range(1, points), tuple_size - 1)
                    if c[0] >= min_gap and points - c[-1] >= min_gap
                    and all(b - a >= min_gap for a, b in zip(c, c[1:]))],
                   dtype=float).reshape(-1, tuple_size - 1)
    return idx * step


def _random_offsets(rng: np.random.Generator, count: int, tuple_size: int,
                    sep: float) -> np.ndarray:
    out = []
    tries = 0
    while len(out) < count and tries < 1000 * max(count, 1):
        tries += 1
        v = np.sort(rng.uniform(0.0, 2.0, tuple_size - 1))
        gaps = np.diff(np.concatenate([[0.0], v, [2.0]]))
        if np.all(gaps >= sep):
            out.append(v)
    return np.array(out, dtype=float).reshape(-1, tuple_size - 1)


def _golden_min(f, lo: float, hi: float, x0: float, f0: float):
    """Golden-section search on ``[lo, hi]``; falls back to ``x0`` if no better."""
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > _XTOL * max(1.0, abs(a)):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    x, fx = (c, fc) if fc < fd else (d, fd)
    return (x, fx) if fx < f0 else (x0, f0)


def _refine(positions, start, rank, sep, window, iters):
    """Coordinate descent on the offsets, one golden-section line search each."""
    v = np.array(start, dtype=float)

    def score_at(vec):
        return _scores(positions, vec[None, :], rank)[0][0]

    best = score_at(v)
    for _ in range(iters):
        previous = best
        for i in range(v.size):
            lo = (v[i - 1] if i > 0 else 0.0) + sep
            hi = (v[i + 1] if i + 1 < v.size else 2.0) - sep
            lo, hi = max(lo, v[i] - window), min(hi, v[i] + window)
            if hi <= lo:
                continue

            def line(x, i=i):
                trial = v.copy()
                trial[i] = x
                return score_at(trial)

            v[i], best = _golden_min(line, lo, hi, v[i], best)
        if best >= previous:
            break
    return v, best


def _centered_sines(offsets: np.ndarray) -> tuple[np.ndarray, float]:
    """Translates a tuple on the ``u`` circle so its occupied arc is centred at 0.

    Returns the sorted ``u`` values and the arc length.
    """
    u = np.concatenate([[0.0], offsets])
    gaps = np.diff(np.concatenate([u, [2.0]]))
    j = int(np.argmax(gaps))
    start = u[(j + 1) % u.size]
    arc = 2.0 - gaps[j]
    centered = np.mod(u - start, 2.0) - arc / 2
    return np.sort(centered), arc


def falsify(s: SensorPositions, required_rank: int, tuple_size: int,
            cfg: Optional[FalsificationConfig] = None) -> IdentifiabilityVerdict:
    """Searches for ``tuple_size`` directions whose manifold on ``s`` loses rank.

    The score of a tuple is ``sigma_r / sigma_1`` with ``r = required_rank``.
    A coarse grid over direction offsets is scanned, the ``n_starts`` best
    cells and ``restarts`` seeded random tuples are refined by coordinate
    descent, and any refined tuple scoring below ``rank_tol`` is a
    counterexample. When several are found the most compact one (shortest
    occupied arc in ``u``) is reported, centred on broadside.
    """
    cfg = cfg or DEFAULT_CONFIG
    if not 1 <= tuple_size <= len(s):
        raise ValueError('tuple_size must be between 1 and |s| = %d.' % len(s))
    if not 1 <= required_rank <= tuple_size:
        raise ValueError('required_rank must be between 1 and tuple_size.')
    positions = s.array.astype(float)
    if tuple_size == 1:
        return IdentifiabilityVerdict(Status.UNKNOWN, rule='search',
                                      min_singular_value=math.sqrt(len(s)),
                                      relative_gap=1.0)
    points = cfg.points_for(tuple_size)
    sep = cfg.separation_for(tuple_size)
    grid = _grid_offsets(points, tuple_size, sep)
    rel, _ = _scores(positions, grid, required_rank)
    order = np.argsort(rel, kind='stable')[:cfg.n_starts]
    starts = [grid[i] for i in order]
    rng = make_rng(cfg.seed)
    starts += list(_random_offsets(rng, cfg.restarts, tuple_size, sep))

    window = 2 * (2.0 / points)
    refined = [_refine(positions, st, required_rank, sep, window,
                       cfg.refinement_iters) for st in starts]
    # Grid cells themselves also count as candidates for the reported minimum.
    candidates = refined + [(grid[i], rel[i]) for i in order]

    hits = []
    for offsets, score in candidates:
        if score < cfg.rank_tol:
            sines, arc = _centered_sines(offsets)
            hits.append((round(arc, 9), score, tuple(sines)))
    if hits:
        hits.sort()
        sines = np.array(hits[0][2])
        angles = AngleSet.from_sines(np.clip(sines, -1.0, 1.0 - 1e-16))
        sv = np.linalg.svd(manifold_matrix(s, angles), compute_uv=False)
        gap = sv[required_rank - 1] / sv[0]
        if gap < cfg.rank_tol:
            return IdentifiabilityVerdict(
                Status.COUNTEREXAMPLE_FOUND, rule='search', counterexample=angles,
                min_singular_value=float(sv[required_rank - 1]),
                relative_gap=float(gap))
    best_offsets, best = min(candidates, key=lambda c: c[1])
    _, absolute = _scores(positions, np.asarray(best_offsets)[None, :],
                          required_rank)
    return IdentifiabilityVerdict(Status.UNKNOWN, rule='search',
                                  min_singular_value=float(absolute[0]),
                                  relative_gap=float(best))


def coprime_triple(s: SensorPositions) -> Optional[tuple[int, int, int]]:
    """First triple ``p < q < r`` in ``s`` with ``gcd(q - p, r - p) == 1``."""
    for p, q, r in combinations(s.positions, 3):
        if math.gcd(q - p, r - p) == 1:
            return p, q, r
    return None


@lru_cache(maxsize=4096)
def _condition_a(positions: tuple, k: int, cfg: FalsificationConfig):
    s_b = SensorPositions(positions)
    start, length = longest_ula_segment(s_b)
    if length >= k + 1:
        return IdentifiabilityVerdict(
            Status.PROVEN_SUFFICIENT, rule='ula-segment',
            detail='start=%d,length=%d' % (start, length))
    return falsify(s_b, k + 1, k + 1, cfg)


@lru_cache(maxsize=4096)
def _condition_b(positions: tuple, k: int, cfg: FalsificationConfig):
    s_c = SensorPositions(positions)
    start, length = longest_ula_segment(s_c)
    if length >= k:
        return IdentifiabilityVerdict(
            Status.PROVEN_SUFFICIENT, rule='ula-segment',
            detail='start=%d,length=%d' % (start, length))
    if k == 2:
        triple = coprime_triple(s_c)
        if triple is not None:
            return IdentifiabilityVerdict(
                Status.PROVEN_SUFFICIENT, rule='coprime-triple',
                detail='{%d,%d,%d}' % triple)
    return falsify(s_c, k, k, cfg)


def check_condition_a(s_b: SensorPositions, k: int,
                      cfg: Optional[FalsificationConfig] = None
                      ) -> IdentifiabilityVerdict:
    """Every ``k + 1`` distinct directions must give rank ``k + 1`` on ``s_b``.

    A unit-spaced segment of ``k + 1`` elements proves it (Vandermonde
    rows); otherwise the counterexample search runs.
    """
    if k < 1:
        raise ValueError('k must be at least 1.')
    if k + 1 > len(s_b):
        raise RankBudgetError('K exceeds rank budget: k + 1 = %d > |S_b| = %d.'
                              % (k + 1, len(s_b)))
    return _condition_a(s_b.positions, k, cfg or DEFAULT_CONFIG)


def check_condition_b(s_c: SensorPositions, k: int,
                      cfg: Optional[FalsificationConfig] = None
                      ) -> IdentifiabilityVerdict:
    """Every ``k`` distinct directions must give rank ``k`` on ``s_c``.

    Proven by a unit-spaced segment of ``k`` elements, or for ``k = 2`` by a
    triple ``{p, q, r}`` whose offsets ``q - p`` and ``r - p`` are coprime.
    """
    if k < 1:
        raise ValueError('k must be at least 1.')
    if k > len(s_c):
        raise RankBudgetError('K exceeds rank budget: k = %d > |S_c| = %d.'
                              % (k, len(s_c)))
    return _condition_b(s_c.positions, k, cfg or DEFAULT_CONFIG)


def check_theorem1(deco: Decomposition, k: int,
                   cfg: Optional[FalsificationConfig] = None) -> Theorem1Report:
    """Both condition verdicts plus the largest supported source count.

    ``k_max = min(N_s, L + 1) - 1``. When ``k > k_max`` the report is
    infeasible and no verdicts are computed.
    """
    k_max = min(deco.n_s, deco.l + 1) - 1
    if k < 1 or k > k_max:
        return Theorem1Report(None, None, k_max, False)
    return Theorem1Report(check_condition_a(deco.basic, k, cfg),
                          check_condition_b(deco.shifts, k, cfg), k_max, True)
