"""Exhaustive search and ranking of sum-set decompositions ``S_b + S_c <= S``."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterator, Optional, Sequence

from .geometry import Decomposition, SensorPositions, aperture
from .identifiability import (FalsificationConfig, IdentifiabilityVerdict,
                              check_theorem1)

DEFAULT_NODE_BUDGET = 2_000_000
DEFAULT_MAX_RESULTS = 100_000


@dataclass(frozen=True)
class DecompositionQuery:
    parent: SensorPositions
    n_s: int
    l: int
    max_results: int = DEFAULT_MAX_RESULTS
    require_identifiable_for_k: Optional[int] = None
    node_budget: int = DEFAULT_NODE_BUDGET

    def __post_init__(self):
        if self.n_s < 1 or self.l < 1:
            raise ValueError('N_s and L must be positive.')
        if self.n_s > len(self.parent) or self.l > len(self.parent):
            raise ValueError('N_s and L cannot exceed |S| = %d.' % len(self.parent))
        if self.max_results < 1 or self.node_budget < 1:
            raise ValueError('max_results and node_budget must be positive.')


@dataclass
class SearchResult:
    """Decompositions found plus whether the search ran to completion.

    ``complete`` is False when the node budget or ``max_results`` stopped the
    search early; the list is then a lexicographic prefix of the full answer.
    """

    decompositions: list = field(default_factory=list)
    complete: bool = True
    nodes: int = 0

    def __iter__(self) -> Iterator[Decomposition]:
        return iter(self.decompositions)

    def __len__(self) -> int:
        return len(self.decompositions)

    def __getitem__(self, i):
        return self.decompositions[i]


@dataclass(frozen=True)
class RankedDecomposition:
    decomposition: Decomposition
    aperture_b: int
    verdict_a: Optional[IdentifiabilityVerdict] = None
    verdict_b: Optional[IdentifiabilityVerdict] = None
    feasible: bool = True

    @property
    def falsified(self) -> bool:
        return not self.feasible or any(
            v is not None and v.falsified for v in (self.verdict_a, self.verdict_b))

    def to_json(self) -> dict:
        def verdict(v):
            return None if v is None else v.to_json()
        return {'basic': self.decomposition.basic.to_list(),
                'shifts': self.decomposition.shifts.to_list(),
                'aperture_b': self.aperture_b,
                'verdict_a': verdict(self.verdict_a),
                'verdict_b': verdict(self.verdict_b)}


class _Stop(Exception):
    pass


def enumerate_decompositions(q: DecompositionQuery,
                             cfg: Optional[FalsificationConfig] = None
                             ) -> SearchResult:
    """All canonical ``(S_b, S_c)`` with ``|S_b| = N_s``, ``|S_c| = L``.

    Depth-first over basic subarrays ``{0 = b_0 < b_1 < ...}`` built from
    positive differences of the parent. Each node carries the set of shifts
    that still fit; since that set only shrinks as elements are added, a
    branch is cut as soon as fewer than ``L`` shifts remain. Output is
    lexicographic in ``S_b``, then in ``S_c``.

    When ``require_identifiable_for_k`` is set, decompositions that are
    infeasible for that K or carry a counterexample are dropped.
    """
    parent = q.parent
    members = frozenset(parent.positions)
    diffs = sorted({b - a for a, b in combinations(parent.positions, 2)})
    result = SearchResult()
    k = q.require_identifiable_for_k

    def emit(basic: tuple, shifts: tuple):
        basic_set = SensorPositions(basic)
        for chosen in combinations(shifts, q.l):
            deco = Decomposition(basic_set, SensorPositions(chosen), parent)
            if k is not None:
                report = check_theorem1(deco, k, cfg)
                if not report.feasible or any(v.falsified for v in
                                              (report.verdict_a, report.verdict_b)):
                    continue
            if len(result.decompositions) >= q.max_results:
                raise _Stop
            result.decompositions.append(deco)

    def extend(basic: tuple, shifts: tuple, start: int):
        result.nodes += 1
        if result.nodes > q.node_budget:
            raise _Stop
        if len(basic) == q.n_s:
            emit(basic, shifts)
            return
        need = q.n_s - len(basic)
        for j in range(start, len(diffs) - need + 1):
            e = diffs[j]
            kept = tuple(d for d in shifts if d + e in members)
            if len(kept) >= q.l:
                extend(basic + (e,), kept, j + 1)

    try:
        extend((0,), parent.positions, 0)
    except _Stop:
        result.complete = False
    return result


def _rank_key(r: RankedDecomposition) -> tuple:
    proven = sum(1 for v in (r.verdict_a, r.verdict_b) if v is not None and v.proven)
    return (r.falsified, -r.aperture_b, -proven) + r.decomposition.sort_key()


def rank_decompositions(decos: Sequence[Decomposition], k: Optional[int] = None,
                        cfg: Optional[FalsificationConfig] = None
                        ) -> list[RankedDecomposition]:
    """Orders decompositions for use with ``k`` sources.

    Without ``k`` the order is by basic-subarray aperture (largest first),
    then lexicographic. With ``k``, decompositions that are infeasible or
    carry a counterexample go last; the rest are ordered by aperture, then by
    the number of proven conditions, then lexicographically.
    """
    decos = list(decos)
    if decos:
        parent = decos[0].parent
        if any(d.parent != parent for d in decos):
            raise ValueError('All decompositions must share the same parent.')
    ranked = []
    for d in decos:
        if k is None:
            ranked.append(RankedDecomposition(d, aperture(d.basic)))
            continue
        report = check_theorem1(d, k, cfg)
        ranked.append(RankedDecomposition(d, aperture(d.basic), report.verdict_a,
                                          report.verdict_b, report.feasible))
    return sorted(ranked, key=_rank_key)
