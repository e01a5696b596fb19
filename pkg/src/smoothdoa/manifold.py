"""Steering vectors, manifold matrices and single-snapshot simulation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .geometry import SensorPositions

_MIN_SEPARATION = 1e-12


def make_rng(seed: int) -> np.random.Generator:
    """Seeded counter-based generator (Philox) used for all simulations."""
    return np.random.Generator(np.random.Philox(int(seed)))


def _check_angle(theta: float) -> None:
    if not (-math.pi / 2 <= theta < math.pi / 2):
        raise ValueError('Angle %r rad is outside [-pi/2, pi/2).' % theta)


@dataclass(frozen=True)
class AngleSet:
    """Distinct source directions in radians, each in ``[-pi/2, pi/2)``."""

    angles: tuple[float, ...]

    def __post_init__(self):
        angles = tuple(float(a) for a in self.angles)
        for a in angles:
            _check_angle(a)
        ordered = sorted(angles)
        if any(b - a <= _MIN_SEPARATION for a, b in zip(ordered, ordered[1:])):
            raise ValueError('Angles must be pairwise distinct.')
        object.__setattr__(self, 'angles', angles)

    @classmethod
    def from_degrees(cls, degrees: Iterable[float]) -> 'AngleSet':
        return cls(tuple(math.radians(d) for d in degrees))

    @classmethod
    def from_sines(cls, sines: Iterable[float]) -> 'AngleSet':
        return cls(tuple(math.asin(u) for u in sines))

    def __len__(self) -> int:
        return len(self.angles)

    def __iter__(self):
        return iter(self.angles)

    @property
    def radians(self) -> np.ndarray:
        return np.asarray(self.angles, dtype=float)

    @property
    def degrees(self) -> np.ndarray:
        return np.rad2deg(self.radians)

    @property
    def sines(self) -> np.ndarray:
        return np.sin(self.radians)


AngleLike = Union[AngleSet, Sequence[float], np.ndarray]


def as_angle_set(thetas: AngleLike) -> AngleSet:
    if isinstance(thetas, AngleSet):
        return thetas
    return AngleSet(tuple(np.atleast_1d(np.asarray(thetas, dtype=float))))


def steering_vector(s: SensorPositions, theta: float) -> np.ndarray:
    """Response ``exp(j*pi*d*sin(theta))`` of each element ``d`` of ``s``."""
    _check_angle(float(theta))
    return np.exp(1j * np.pi * s.array * math.sin(theta))


def steering_matrix_from_sines(positions, sines) -> np.ndarray:
    """Manifold matrix evaluated directly at spatial frequencies ``sin(theta)``.

    No range checks are performed; ``sines`` may be any real array and the
    result has shape ``(len(positions), len(sines))``.
    """
    d = np.asarray(positions, dtype=float)
    u = np.asarray(sines, dtype=float)
    return np.exp(1j * np.pi * np.outer(d, u))


def manifold_matrix(s: SensorPositions, thetas: AngleLike) -> np.ndarray:
    """Stacks the steering vectors of ``thetas`` as columns (``|s| x K``)."""
    angles = as_angle_set(thetas)
    return steering_matrix_from_sines(s.array, angles.sines)


@dataclass(frozen=True)
class Snapshot:
    """One complex measurement vector, ordered like ``geometry``.

    ``thetas`` and ``amplitudes`` record the ground truth the snapshot was
    simulated from; they are ``None`` for measured data.
    """

    y: np.ndarray
    geometry: SensorPositions
    noise_sigma: float = 0.0
    seed: Optional[int] = None
    thetas: Optional[AngleSet] = None
    amplitudes: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        y = np.asarray(self.y, dtype=complex)
        if y.ndim != 1 or y.shape[0] != len(self.geometry):
            raise ValueError('Snapshot length %d does not match the %d-element '
                             'geometry.' % (y.size, len(self.geometry)))
        object.__setattr__(self, 'y', y)

    @property
    def ref(self) -> str:
        return 'seed=%s,sigma=%r' % (self.seed, self.noise_sigma)

    @property
    def noiseless(self) -> bool:
        return self.noise_sigma == 0.0

    def to_pairs(self) -> list[list[float]]:
        """Export form: a list of ``[re, im]`` pairs."""
        return [[float(v.real), float(v.imag)] for v in self.y]


def noise_sigma_for_snr(snr_db: float, amplitudes=None) -> float:
    """Noise level meeting ``SNR = 20 log10(min_k |x_k| / sigma)``.

    ``amplitudes`` defaults to unit magnitudes. An infinite SNR gives 0.
    """
    if math.isinf(snr_db) and snr_db > 0:
        return 0.0
    x_min = 1.0 if amplitudes is None else float(np.min(np.abs(amplitudes)))
    return x_min * 10.0 ** (-snr_db / 20.0)


def simulate_snapshot(s: SensorPositions, thetas: AngleLike, snr_db: float,
                      seed: int, amplitudes=None,
                      unit_phase: bool = False) -> Snapshot:
    """Simulates ``y = A_S(theta) x + n`` for a single snapshot.

    Random draws come from ``make_rng(seed)`` in a fixed order: first the K
    source phases, uniform on ``(0, 2*pi]``, then a ``(2, |s|)`` block of
    standard normals for the real and imaginary noise parts. The noise is
    circularly symmetric with total variance ``sigma**2`` per entry.

    Args:
        s: Array geometry.
        thetas: Source directions in radians.
        snr_db: SNR in dB; ``float('inf')`` disables the noise.
        seed: Generator seed.
        amplitudes: Explicit source amplitudes. Overrides the random phases.
        unit_phase: Uses ``x_k = 1`` (fixed-phase test mode).
    """
    angles = as_angle_set(thetas)
    k = len(angles)
    if k < 1:
        raise ValueError('At least one source is required.')
    rng = make_rng(seed)
    phases = 2 * np.pi * (1.0 - rng.random(k))
    if amplitudes is not None:
        x = np.asarray(amplitudes, dtype=complex)
        if x.shape != (k,):
            raise ValueError('Expected %d amplitudes, got shape %s.' % (k, x.shape))
    elif unit_phase:
        x = np.ones(k, dtype=complex)
    else:
        x = np.exp(1j * phases)
    sigma = noise_sigma_for_snr(snr_db, x)
    y = manifold_matrix(s, angles) @ x
    if sigma > 0:
        z = rng.standard_normal((2, len(s)))
        y = y + sigma / math.sqrt(2) * (z[0] + 1j * z[1])
    return Snapshot(y=y, geometry=s, noise_sigma=sigma, seed=seed,
                    thetas=angles, amplitudes=x)
