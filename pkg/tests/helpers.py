"""Shared scene generators for the tests."""

import math

import numpy as np

from smoothdoa.geometry import Decomposition, SensorPositions, sum_set
from smoothdoa.manifold import AngleSet


def random_decomposition(rng, max_size=20, max_pos=30):
    """A random basic subarray and shift set, embedded in a random parent."""
    while True:
        n_s = int(rng.integers(1, 7))
        l = int(rng.integers(1, 5))
        basic = set(rng.choice(np.arange(1, 12), n_s - 1, replace=False).tolist()) | {0}
        shifts = set(rng.choice(np.arange(0, 12), l, replace=False).tolist())
        core = sum_set(SensorPositions.from_iterable(basic),
                       SensorPositions.from_iterable(shifts))
        extra = rng.integers(0, max_pos, int(rng.integers(0, 4))).tolist()
        parent = SensorPositions.from_iterable(list(core) + extra)
        if len(parent) <= max_size:
            return Decomposition(SensorPositions.from_iterable(basic),
                                 SensorPositions.from_iterable(shifts), parent)


def random_angles(rng, k, lo_deg=-75.0, hi_deg=75.0, min_sep_deg=2.0):
    while True:
        d = np.sort(rng.uniform(lo_deg, hi_deg, k))
        if k == 1 or np.min(np.diff(d)) >= min_sep_deg:
            return AngleSet.from_degrees(d)


def gather_oracle(y, geometry, basic, shifts):
    """Independent construction of the smoothed matrix by list lookups."""
    pos = list(geometry)
    return np.array([[y[pos.index(b + d)] for d in shifts] for b in basic])


def product_oracle(basic, shifts, thetas, x):
    """``A_b diag(x) A_c^T`` built entry by entry."""
    out = np.zeros((len(basic), len(shifts)), dtype=complex)
    for m, b in enumerate(basic):
        for i, d in enumerate(shifts):
            out[m, i] = sum(xk * np.exp(1j * math.pi * (b + d) * math.sin(t))
                            for xk, t in zip(x, thetas))
    return out
