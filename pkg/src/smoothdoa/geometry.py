"""Integer linear array geometries and the set algebra used for smoothing.

Positions are integers on the half-wavelength grid: an element at position
``n`` sits at ``n * lambda / 2``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Iterator

import numpy as np


@dataclass(frozen=True)
class SensorPositions:
    """A non-empty, strictly increasing set of non-negative integer positions.

    Args:
        positions: Element positions in half-wavelength units. Must already be
            sorted and duplicate free; use :meth:`from_iterable` to build one
            from arbitrary input.
    """

    positions: tuple[int, ...]

    def __post_init__(self):
        pos = tuple(int(p) for p in self.positions)
        if any(int(p) != p for p in self.positions):
            raise ValueError('Sensor positions must be integers.')
        if not pos:
            raise ValueError('Sensor positions cannot be empty.')
        if pos[0] < 0:
            raise ValueError('Sensor positions must be non-negative.')
        if any(b <= a for a, b in zip(pos, pos[1:])):
            raise ValueError('Sensor positions must be strictly increasing.')
        object.__setattr__(self, 'positions', pos)

    @classmethod
    def from_iterable(cls, values: Iterable[int]) -> 'SensorPositions':
        """Builds positions from any iterable, sorting and removing duplicates."""
        return cls(tuple(sorted(set(int(v) for v in values))))

    @classmethod
    def parse(cls, text: str) -> 'SensorPositions':
        """Parses a comma separated list such as ``'0,1,3,4'``."""
        items = [t for t in text.replace(' ', '').split(',') if t]
        return cls.from_iterable(int(t) for t in items)

    def __iter__(self) -> Iterator[int]:
        return iter(self.positions)

    def __len__(self) -> int:
        return len(self.positions)

    def __contains__(self, item) -> bool:
        return item in self._members

    def __getitem__(self, idx):
        return self.positions[idx]

    def __repr__(self) -> str:
        return 'SensorPositions(%s)' % list(self.positions)

    @property
    def _members(self) -> frozenset:
        # Cached lazily; frozen dataclass prevents normal attribute assignment.
        try:
            return self.__dict__['_member_cache']
        except KeyError:
            members = frozenset(self.positions)
            object.__setattr__(self, '_member_cache', members)
            return members

    @property
    def array(self) -> np.ndarray:
        """Positions as an integer numpy array."""
        return np.asarray(self.positions, dtype=np.int64)

    def normalized(self) -> 'SensorPositions':
        """Returns the geometry translated so that its first element is 0."""
        m = self.positions[0]
        return SensorPositions(tuple(p - m for p in self.positions))

    def shifted(self, delta: int) -> 'SensorPositions':
        return SensorPositions(tuple(p + delta for p in self.positions))

    def issubset(self, other: 'SensorPositions') -> bool:
        return self._members <= other._members

    def index_map(self) -> dict[int, int]:
        """Maps each position to its row index."""
        return {p: i for i, p in enumerate(self.positions)}

    def to_list(self) -> list[int]:
        return list(self.positions)


@dataclass(frozen=True)
class MimoArrayPair:
    """Transmit and receive arrays of a co-located MIMO radar."""

    tx: SensorPositions
    rx: SensorPositions

    @property
    def virtual(self) -> SensorPositions:
        """The sum co-array ``tx + rx``."""
        return sum_set(self.tx, self.rx)

    def is_non_redundant(self) -> bool:
        return is_non_redundant(self)


@dataclass(frozen=True)
class Decomposition:
    """A sum-set decomposition ``basic + shifts`` contained in ``parent``.

    ``basic`` is kept in canonical form (first element 0) and ``shifts`` holds
    absolute offsets into the coordinate frame of ``parent``.
    """

    basic: SensorPositions
    shifts: SensorPositions
    parent: SensorPositions

    def __post_init__(self):
        if self.basic[0] != 0:
            raise ValueError('The basic subarray must start at 0, got %r.'
                             % self.basic)
        for delta in self.shifts:
            missing = [b + delta for b in self.basic if b + delta not in self.parent]
            if missing:
                raise ValueError(
                    'Shift %d places basic-subarray elements at %s, which are '
                    'not in the parent array.' % (delta, missing))

    @property
    def n_s(self) -> int:
        return len(self.basic)

    @property
    def l(self) -> int:
        return len(self.shifts)

    def subarray(self, i: int) -> SensorPositions:
        """The i-th shifted copy ``basic + shifts[i]``."""
        return self.basic.shifted(self.shifts[i])

    def sort_key(self) -> tuple:
        return (self.basic.positions, self.shifts.positions)


def sum_set(a: SensorPositions, b: SensorPositions) -> SensorPositions:
    """Returns the sorted set ``{x + y : x in a, y in b}``."""
    return SensorPositions.from_iterable(x + y for x, y in product(a, b))


def is_non_redundant(pair: MimoArrayPair) -> bool:
    """True if every transmit/receive pair yields a distinct virtual element."""
    return len(sum_set(pair.tx, pair.rx)) == len(pair.tx) * len(pair.rx)


def aperture(s: SensorPositions) -> int:
    """Max minus min position."""
    if s is None or len(s) == 0:
        raise ValueError('Aperture of an empty array is undefined.')
    return s[-1] - s[0]


def longest_ula_segment(s: SensorPositions) -> tuple[int, int]:
    """Finds the longest run of unit-spaced positions.

    Returns:
        ``(start, length)`` of the longest run. Ties go to the smallest start.
    """
    best_start, best_len = s[0], 1
    start, length = s[0], 1
    for prev, cur in zip(s.positions, s.positions[1:]):
        if cur == prev + 1:
            length += 1
        else:
            start, length = cur, 1
        if length > best_len:
            best_start, best_len = start, length
    return best_start, best_len


def valid_shifts(basic: SensorPositions, parent: SensorPositions) -> tuple[int, ...]:
    """All non-negative shifts ``d`` with ``basic + d`` contained in ``parent``.

    The result may be empty, so a plain sorted tuple is returned.
    """
    first = basic[0]
    candidates = [p - first for p in parent if p - first >= 0]
    return tuple(d for d in candidates if all(b + d in parent for b in basic))
