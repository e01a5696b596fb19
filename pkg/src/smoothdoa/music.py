"""MUSIC on the spatially smoothed matrix."""

from __future__ import annotations

import io
from dataclasses import dataclass
from itertools import permutations

import numpy as np

from .geometry import Decomposition, SensorPositions
from .manifold import Snapshot, steering_matrix_from_sines
from .smoothing import SmoothedMatrix, smooth

DEFAULT_GRID_STEP_DEG = 0.02
# Denominators below this are treated as exact nulls of the noise projection.
DENOMINATOR_FLOOR = 1e-300


def angle_grid(step_deg: float = DEFAULT_GRID_STEP_DEG) -> np.ndarray:
    """Uniform grid from -90 deg (inclusive) to +90 deg (exclusive), in degrees."""
    if step_deg <= 0:
        raise ValueError('Grid step must be positive.')
    n = int(round(180.0 / step_deg))
    return -90.0 + step_deg * np.arange(n)


@dataclass(frozen=True)
class SubspaceSplit:
    signal_basis: np.ndarray
    noise_basis: np.ndarray
    singular_values: np.ndarray
    k_hat: int

    @property
    def k(self) -> int:
        return self.signal_basis.shape[1]


@dataclass(frozen=True)
class Pseudospectrum:
    grid_deg: np.ndarray
    values_db: np.ndarray

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write('theta_deg,p_db\n')
        for t, p in zip(self.grid_deg, self.values_db):
            buf.write('%.6f,%.6f\n' % (t, p))
        return buf.getvalue()


@dataclass(frozen=True)
class Peaks:
    angles_deg: list
    shortfall: bool


@dataclass(frozen=True)
class DoaEstimate:
    angles_deg: list
    shortfall: bool
    spectrum: Pseudospectrum
    split: SubspaceSplit
    smoothed: SmoothedMatrix

    def peaks_json(self) -> dict:
        return {'angles_deg': [float(a) for a in self.angles_deg],
                'shortfall': bool(self.shortfall),
                'k_hat': int(self.split.k_hat)}


def numerical_rank(singular_values: np.ndarray, shape: tuple[int, int]) -> int:
    """Counts singular values above ``max(shape) * eps * sigma_1``."""
    s = np.asarray(singular_values)
    if s.size == 0 or s[0] == 0:
        return 0
    tol = max(shape) * np.finfo(float).eps * s[0]
    return int(np.sum(s > tol))


def subspace_split(y: SmoothedMatrix, k: int) -> SubspaceSplit:
    """Splits the left singular vectors of ``Y`` into signal and noise parts.

    The first ``k`` left singular vectors span the signal subspace. ``k_hat``
    is the numerical rank of ``Y`` and is reported independently of ``k``, so
    ``k_hat < k`` on noiseless data flags a rank collapse.
    """
    mat = y.y_matrix if isinstance(y, SmoothedMatrix) else np.asarray(y)
    n_s = mat.shape[0]
    if not 1 <= k < n_s:
        raise ValueError('Need 1 <= k < N_s = %d for a non-empty noise '
                         'subspace, got k=%d.' % (n_s, k))
    u, s, _ = np.linalg.svd(mat, full_matrices=True)
    return SubspaceSplit(signal_basis=u[:, :k], noise_basis=u[:, k:],
                         singular_values=s, k_hat=numerical_rank(s, mat.shape))


def noise_projection(split: SubspaceSplit, s_b: SensorPositions,
                     grid_deg: np.ndarray) -> np.ndarray:
    """``a(theta)^H U_n U_n^H a(theta)`` for every grid angle."""
    a = steering_matrix_from_sines(s_b.array, np.sin(np.deg2rad(grid_deg)))
    proj = split.noise_basis.conj().T @ a
    return np.sum(proj.real ** 2 + proj.imag ** 2, axis=0)


def pseudospectrum(split: SubspaceSplit, s_b: SensorPositions,
                   grid=None) -> Pseudospectrum:
    """MUSIC pseudospectrum in dB, normalized to a 0 dB maximum.

    Denominators smaller than ``DENOMINATOR_FLOOR`` are clamped to it, which
    caps the spectrum at exact nulls.
    """
    grid_deg = angle_grid() if grid is None else np.asarray(grid, dtype=float)
    den = np.maximum(noise_projection(split, s_b, grid_deg), DENOMINATOR_FLOOR)
    p_db = -10.0 * np.log10(den)
    return Pseudospectrum(grid_deg, p_db - p_db.max())


def find_peaks(ps: Pseudospectrum, k: int) -> Peaks:
    """Top-``k`` local maxima, refined by 3-point parabolic interpolation.

    A point is a local maximum when it is strictly greater than both
    neighbours; the two end points only need to beat their single neighbour.
    """
    if k < 1:
        raise ValueError('k must be at least 1.')
    p = ps.values_db
    t = ps.grid_deg
    n = p.size
    if n == 1:
        return Peaks([float(t[0])], k > 1)
    is_peak = np.zeros(n, dtype=bool)
    is_peak[1:-1] = (p[1:-1] > p[:-2]) & (p[1:-1] > p[2:])
    is_peak[0] = p[0] > p[1]
    is_peak[-1] = p[-1] > p[-2]
    idx = np.flatnonzero(is_peak)
    # Stable sort keeps grid order among exact ties.
    idx = idx[np.argsort(-p[idx], kind='stable')][:k]
    angles = []
    for i in idx:
        if 0 < i < n - 1:
            left, mid, right = p[i - 1], p[i], p[i + 1]
            curv = left - 2 * mid + right
            offset = 0.5 * (left - right) / curv if curv < 0 else 0.0
            step = 0.5 * (t[i + 1] - t[i - 1])
            angles.append(float(t[i] + offset * step))
        else:
            angles.append(float(t[i]))
    return Peaks(angles, len(angles) < k)


def estimate_doa(snap: Snapshot, deco: Decomposition, k: int,
                 grid=None) -> DoaEstimate:
    """Smooth, split, scan and pick peaks in one call."""
    smoothed = smooth(snap, deco)
    split = subspace_split(smoothed, k)
    ps = pseudospectrum(split, deco.basic, grid)
    peaks = find_peaks(ps, k)
    return DoaEstimate(peaks.angles_deg, peaks.shortfall, ps, split, smoothed)


def is_resolved(estimates_deg, targets_deg, tol_deg: float = 0.5,
                shortfall: bool = False) -> bool:
    """Exactly K estimates, each within ``tol_deg`` of a distinct target."""
    est = sorted(float(e) for e in estimates_deg)
    tgt = sorted(float(t) for t in targets_deg)
    if shortfall or len(est) != len(tgt):
        return False
    return any(all(abs(e - tgt[j]) <= tol_deg for e, j in zip(est, perm))
               for perm in permutations(range(len(tgt))))
