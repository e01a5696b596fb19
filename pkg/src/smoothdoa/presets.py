"""Built-in MIMO virtual arrays S1, S2, S3 and their smoothing decompositions.

All three use three transmitters at {0, 1, 2} and nine receivers, giving
27-element non-redundant virtual arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

from .geometry import Decomposition, MimoArrayPair, SensorPositions


@dataclass(frozen=True)
class PresetArray:
    name: str
    pair: MimoArrayPair
    decomposition: Decomposition

    @property
    def virtual(self) -> SensorPositions:
        return self.pair.virtual


def _preset(name, rx, basic, shifts) -> PresetArray:
    pair = MimoArrayPair(tx=SensorPositions((0, 1, 2)),
                         rx=SensorPositions.from_iterable(rx))
    deco = Decomposition(SensorPositions.from_iterable(basic),
                         SensorPositions.from_iterable(shifts), pair.virtual)
    return PresetArray(name, pair, deco)


PRESETS = {
    's1': _preset('s1', [3 * k for k in range(9)], range(25), [0, 1, 2]),
    's2': _preset('s2', [5 * k for k in range(9)],
                  [k + 5 * n for n in range(7) for k in range(3)], [0, 5, 10]),
    's3': _preset('s3', [3 * k for k in range(5)] + [21 + 9 * k for k in range(4)],
                  list(range(13)) + [21 + 9 * k for k in range(4)], [0, 1, 2]),
}


def get_preset(name: str) -> PresetArray:
    try:
        return PRESETS[name.lower()]
    except KeyError:
        raise ValueError('Unknown preset %r; choose from %s.'
                         % (name, ', '.join(sorted(PRESETS)))) from None
