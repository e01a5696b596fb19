"""Forward spatial smoothing of a single snapshot over a sum-set decomposition."""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .geometry import Decomposition
from .manifold import AngleLike, Snapshot, as_angle_set, steering_matrix_from_sines


class MissingPositionError(ValueError):
    """Raised when a smoothing subarray needs a position the snapshot lacks."""

    def __init__(self, position: int, shift: int):
        super().__init__('Position %d (shift %d) is not present in the snapshot '
                         'geometry.' % (position, shift))
        self.position = position
        self.shift = shift


@dataclass(frozen=True)
class SmoothedMatrix:
    """The ``N_s x L`` matrix whose i-th column reads ``basic + shifts[i]``."""

    y_matrix: np.ndarray
    decomposition: Decomposition
    source_snapshot_ref: str = ''

    @property
    def shape(self) -> tuple[int, int]:
        return self.y_matrix.shape

    def to_csv(self) -> str:
        """Rows follow ``basic``; each shift contributes a ``re``/``im`` column pair."""
        buf = io.StringIO()
        header = ['position']
        for d in self.decomposition.shifts:
            header += ['re_%d' % d, 'im_%d' % d]
        buf.write(','.join(header) + '\n')
        for b, row in zip(self.decomposition.basic, self.y_matrix):
            cells = [str(b)]
            for v in row:
                cells += ['%.12e' % v.real, '%.12e' % v.imag]
            buf.write(','.join(cells) + '\n')
        return buf.getvalue()


def smooth(snap: Snapshot, deco: Decomposition) -> SmoothedMatrix:
    """Rearranges a snapshot into the forward-smoothed matrix ``Y``.

    ``Y[m, i]`` is the snapshot entry at position ``basic[m] + shifts[i]``.
    Subarrays may overlap, so entries can be read more than once.

    Raises:
        MissingPositionError: If a required position is absent from the
            snapshot geometry.
    """
    lookup = snap.geometry.index_map()
    basic = deco.basic.positions
    rows = np.empty((len(basic), deco.l), dtype=np.intp)
    for i, delta in enumerate(deco.shifts):
        for m, b in enumerate(basic):
            try:
                rows[m, i] = lookup[b + delta]
            except KeyError:
                raise MissingPositionError(b + delta, delta) from None
    return SmoothedMatrix(snap.y[rows], deco, snap.ref)


def factorization_residual(smoothed: SmoothedMatrix, thetas: AngleLike,
                           x) -> float:
    """Frobenius norm of ``Y - A_b diag(x) A_c^T``.

    ``A_c`` is the manifold of the absolute shifts. The residual vanishes (up
    to rounding) for noiseless snapshots.
    """
    angles = as_angle_set(thetas)
    x = np.asarray(x, dtype=complex)
    if len(angles) == 0 or x.shape != (len(angles),):
        raise ValueError('Need one non-empty amplitude per angle.')
    deco = smoothed.decomposition
    a_b = steering_matrix_from_sines(deco.basic.array, angles.sines)
    a_c = steering_matrix_from_sines(deco.shifts.array, angles.sines)
    model = (a_b * x) @ a_c.T
    return float(np.linalg.norm(smoothed.y_matrix - model))
