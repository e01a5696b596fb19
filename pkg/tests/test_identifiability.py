import math

import numpy as np
import numpy.testing as npt
import pytest
from hypothesis import given, settings, strategies as st

from smoothdoa.geometry import Decomposition, SensorPositions, longest_ula_segment
from smoothdoa.identifiability import (FalsificationConfig, RankBudgetError, Status,
                                       check_condition_a, check_condition_b,
                                       check_theorem1, coprime_triple, falsify)
from smoothdoa.manifold import AngleSet, steering_matrix_from_sines
from smoothdoa.presets import PRESETS


def sp(*values):
    return SensorPositions.from_iterable(values)


def svd_gap(positions, sines, rank):
    """Independent oracle: r-th over first singular value of exp(j pi d u)."""
    a = np.array([[complex(math.cos(math.pi * d * u), math.sin(math.pi * d * u))
                   for u in sines] for d in positions])
    sv = np.linalg.svd(a, compute_uv=False)
    return sv[rank - 1] / sv[0]


class TestConditionA:

    def test_ula_rule(self):
        v = check_condition_a(sp(0, 1, 2, 3), 2)
        assert v.status is Status.PROVEN_SUFFICIENT and v.rule == 'ula-segment'

    def test_separable_geometry_counterexample(self):
        assert svd_gap([0, 1, 3, 4], [-2 / 3, 0, 2 / 3], 3) < 1e-14
        v = check_condition_a(sp(0, 1, 3, 4), 2)
        assert v.status is Status.COUNTEREXAMPLE_FOUND
        npt.assert_allclose(v.counterexample.sines, [-2 / 3, 0, 2 / 3], atol=1e-6)
        npt.assert_allclose(v.counterexample.degrees, [-41.8103149, 0, 41.8103149],
                            atol=1e-4)

    def test_sparse_four_element_is_unknown(self):
        v = check_condition_a(sp(0, 3, 5, 7), 2)
        assert v.status is Status.UNKNOWN
        assert v.min_singular_value > 1e-3

    def test_rank_budget(self):
        with pytest.raises(RankBudgetError, match='K exceeds rank budget'):
            check_condition_a(sp(0, 1, 2), 3)


class TestConditionB:

    def test_coprime_rule(self):
        v = check_condition_b(sp(0, 4, 9), 2)
        assert v.status is Status.PROVEN_SUFFICIENT and v.rule == 'coprime-triple'

    def test_spacing_five_counterexample(self):
        assert svd_gap([0, 5, 10], [0.0, 0.4], 2) < 1e-14
        v = check_condition_b(sp(0, 5, 10), 2)
        assert v.status is Status.COUNTEREXAMPLE_FOUND
        assert v.min_singular_value < 1e-8
        assert abs(np.ptp(v.counterexample.sines) - 0.4) < 1e-6

    def test_k_equal_to_size_allowed(self):
        v = check_condition_b(sp(0, 1), 2)
        assert v.status is Status.PROVEN_SUFFICIENT

    def test_rank_budget(self):
        with pytest.raises(RankBudgetError):
            check_condition_b(sp(0, 1), 3)

    def test_coprime_triple_uses_translated_offsets(self):
        assert coprime_triple(sp(2, 6, 11)) == (2, 6, 11)
        assert coprime_triple(sp(0, 2, 4, 6)) is None


class TestFalsify:

    def test_exact_coincidence(self):
        v = falsify(sp(0, 5, 10), 2, 2)
        assert v.status is Status.COUNTEREXAMPLE_FOUND and v.min_singular_value < 1e-10

    def test_two_element_ula(self):
        v = falsify(sp(0, 1), 2, 2)
        assert v.status is Status.UNKNOWN and v.min_singular_value > 0.01

    def test_triple_counterexample(self):
        v = falsify(sp(0, 1, 3, 4), 3, 3)
        assert v.status is Status.COUNTEREXAMPLE_FOUND
        npt.assert_allclose(v.counterexample.sines, [-2 / 3, 0, 2 / 3], atol=1e-6)

    @pytest.mark.parametrize('positions, rank', [
        ((0, 5, 10), 2), ((0, 1, 3, 4), 3), ((0, 2, 4, 8), 2), ((0, 3, 4, 7), 3),
        ((0, 6, 9, 15), 2)])
    def test_counterexamples_recheck_independently(self, positions, rank):
        v = falsify(SensorPositions(positions), rank, rank)
        assert v.status is Status.COUNTEREXAMPLE_FOUND
        assert svd_gap(positions, v.counterexample.sines, rank) < 1e-8
        assert len(set(np.round(v.counterexample.sines, 9))) == rank

    def test_deterministic(self):
        cfg = FalsificationConfig(seed=3)
        a = falsify(sp(0, 3, 5, 7), 3, 3, cfg)
        b = falsify(sp(0, 3, 5, 7), 3, 3, cfg)
        assert a == b

    def test_config_validation(self):
        with pytest.raises(ValueError):
            FalsificationConfig(grid_points=32)
        with pytest.raises(ValueError):
            FalsificationConfig(rank_tol=1e-2)

    def test_single_direction(self):
        assert falsify(sp(0, 1, 4), 1, 1).status is Status.UNKNOWN

    @pytest.mark.parametrize('d1, d2', [(2, 4), (3, 9), (4, 6), (5, 7), (7, 11), (6, 8)])
    def test_coprime_equivalence_sample(self, d1, d2):
        v = falsify(sp(0, d1, d2), 2, 2)
        assert v.falsified == (math.gcd(d1, d2) > 1)

    def test_json(self):
        out = falsify(sp(0, 5, 10), 2, 2).to_json()
        assert set(out) == {'status', 'rule', 'counterexample_deg', 'min_sv'}
        assert out['status'] == 'CounterexampleFound' and len(out['counterexample_deg']) == 2


@settings(max_examples=50, deadline=None)
@given(st.sets(st.integers(0, 40), min_size=2, max_size=8),
       st.lists(st.floats(-1, 1), min_size=2, max_size=4),
       st.floats(-3, 3))
def test_singular_values_invariant_to_common_translation(positions, sines, shift):
    d = sorted(positions)
    sv1 = np.linalg.svd(steering_matrix_from_sines(d, sines), compute_uv=False)
    sv2 = np.linalg.svd(steering_matrix_from_sines(d, np.array(sines) + shift),
                        compute_uv=False)
    npt.assert_allclose(sv1, sv2, atol=1e-9)


@pytest.mark.parametrize('positions, k', [((0, 2, 3, 4, 9), 2), ((0, 1, 2, 3, 7), 3),
                                          ((0, 4, 5), 1)])
def test_ula_rule_sound_on_random_tuples(positions, k):
    s = SensorPositions(positions)
    start, length = longest_ula_segment(s)
    assert length >= k + 1
    rows = np.arange(start, start + k + 1)
    rng = np.random.default_rng(0)
    for _ in range(1000):
        sines = rng.uniform(-1, 1, k + 1)
        sv = np.linalg.svd(steering_matrix_from_sines(rows, sines), compute_uv=False)
        assert sv[-1] > 0
        # Vandermonde determinant is nonzero exactly when the nodes differ.
        nodes = np.exp(1j * np.pi * sines)
        det = np.prod([nodes[j] - nodes[i] for i in range(k + 1) for j in range(i + 1, k + 1)])
        assert abs(det) > 0


class TestTheorem1:

    def test_eq5_decomposition(self):
        deco = Decomposition(sp(0, 3, 5, 7), sp(0, 1), sp(0, 1, 3, 4, 5, 6, 7, 8))
        report = check_theorem1(deco, 2)
        assert report.k_max == 2 and report.feasible
        assert report.verdict_a.status is Status.UNKNOWN
        assert report.verdict_b.status is Status.PROVEN_SUFFICIENT

    def test_s1(self):
        report = check_theorem1(PRESETS['s1'].decomposition, 2)
        assert report.k_max == 3
        assert report.verdict_a.proven and report.verdict_b.proven

    def test_s2_fails_condition_b(self):
        report = check_theorem1(PRESETS['s2'].decomposition, 2)
        assert report.verdict_a.proven and report.verdict_b.falsified

    def test_boundary_is_infeasible(self):
        deco = Decomposition(sp(0, 3, 5, 7), sp(0, 1), sp(0, 1, 3, 4, 5, 6, 7, 8))
        report = check_theorem1(deco, min(deco.n_s, deco.l + 1))
        assert not report.feasible and report.verdict_a is None
