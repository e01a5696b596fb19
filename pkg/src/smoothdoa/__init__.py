"""Single-snapshot DOA estimation by spatial smoothing on sparse linear arrays."""

__version__ = '0.1.0'

from .geometry import (Decomposition, MimoArrayPair, SensorPositions, aperture,
                       is_non_redundant, longest_ula_segment, sum_set, valid_shifts)
from .manifold import (AngleSet, Snapshot, manifold_matrix, simulate_snapshot,
                       steering_vector)
from .smoothing import SmoothedMatrix, factorization_residual, smooth
from .music import (Pseudospectrum, SubspaceSplit, estimate_doa, find_peaks,
                    pseudospectrum, subspace_split)
from .identifiability import (FalsificationConfig, IdentifiabilityVerdict, Status,
                              check_condition_a, check_condition_b, check_theorem1,
                              falsify)
from .decomposition import (DecompositionQuery, RankedDecomposition,
                            enumerate_decompositions, rank_decompositions)
