from itertools import combinations

import numpy as np
import pytest

from dualgame.errors import ArgError, DimensionError, ShapeError
from dualgame.measure import (
    OutcomeLabel,
    Povm,
    anti_trine_povm,
    born_distribution,
    born_probabilities,
    completeness_error,
    computational_povm,
    inverse_cdf,
    projective_povm,
    sample_outcome,
    seed_stream,
    six_pair_povm,
    verify_exclusion,
)
from dualgame.qcore import TOL_EIG, TOL_NORM, DensityMatrix, PureState
from dualgame.states import fourier_basis, reduced_path_state, simplex4_detectors, trine_detectors

from conftest import ANTI_TRINE, SIMPLEX, TRINE, proj


def born(v, op):
    v = np.asarray(v, dtype=complex)
    return float(np.real(v.conj() @ op @ v))


class TestAntiTrine:
    def test_elements(self):
        povm = anti_trine_povm()
        for j in range(3):
            np.testing.assert_allclose(povm.operators[j], (2 / 3) * proj(ANTI_TRINE[j]), atol=1e-15)

    def test_excludes_own_index(self):
        povm = anti_trine_povm()
        for j in range(3):
            assert born(TRINE[j], povm.operators[j]) == pytest.approx(0, abs=1e-15)

    def test_completeness(self):
        total = sum((2 / 3) * proj(v) for v in ANTI_TRINE)
        np.testing.assert_allclose(total, np.eye(2), atol=1e-15)
        assert completeness_error(anti_trine_povm().operators) <= 1e-12

    def test_other_outcomes_half(self):
        op = anti_trine_povm().operators[0]
        assert born(TRINE[1], op) == pytest.approx(0.5, abs=1e-12)
        assert born(TRINE[2], op) == pytest.approx(born(TRINE[1], op), abs=1e-12)


class TestSixPair:
    def test_labels(self):
        assert [lab.indices for lab in six_pair_povm().labels] == list(combinations(range(4), 2))

    @pytest.mark.parametrize("pair", list(combinations(range(4), 2)))
    def test_members_see_one_third(self, pair):
        povm = six_pair_povm()
        op = povm.operators[povm.labels.index(OutcomeLabel.pair(*pair))]
        for j in pair:
            assert born(SIMPLEX[j], op) == pytest.approx(1 / 3, abs=1e-12)
        for j in set(range(4)) - set(pair):
            assert born(SIMPLEX[j], op) <= 1e-12

    def test_01_excludes_2_and_3(self):
        op = six_pair_povm().operators[0]
        assert born(SIMPLEX[2], op) == pytest.approx(0, abs=1e-15)
        assert born(SIMPLEX[3], op) == pytest.approx(0, abs=1e-15)

    def test_completeness(self):
        assert completeness_error(six_pair_povm().operators) <= 1e-12


class TestProjective:
    def test_computational(self):
        povm = computational_povm(3)
        for j in range(3):
            np.testing.assert_array_equal(np.diag(povm.operators[j]).real, np.eye(3)[j])

    @pytest.mark.parametrize("N", [3, 4])
    def test_fourier(self, N):
        povm = projective_povm(fourier_basis(N))
        assert len(povm) == N and povm.dim == N
        assert completeness_error(povm.operators) <= 1e-12

    def test_non_orthonormal(self):
        with pytest.raises(ArgError):
            projective_povm([PureState([1, 0]), PureState(np.array([1, 1]) / np.sqrt(2))])

    def test_incomplete_povm_rejected(self):
        with pytest.raises(ShapeError):
            Povm([(OutcomeLabel.single(0), np.diag([1.0, 0.0]))])

    def test_negative_element_rejected(self):
        with pytest.raises(ShapeError):
            Povm([(OutcomeLabel.single(0), np.diag([1.5, 1.0])), (OutcomeLabel.single(1), np.diag([-0.5, 0.0]))])


class TestOutcomeLabel:
    def test_sorted_and_validated(self):
        assert OutcomeLabel.pair(3, 1).indices == (1, 3)
        with pytest.raises(ArgError):
            OutcomeLabel("pair", (1, 1))
        with pytest.raises(ArgError):
            OutcomeLabel("bag", (1,))


class TestBorn:
    def test_trine_path_state_in_u_basis(self, trine3):
        rho = reduced_path_state(trine3.state, 0)
        p = born_distribution(rho, projective_povm(fourier_basis(3))).probabilities
        np.testing.assert_allclose(p, [0, 0.5, 0.5], atol=1e-12)

    def test_trivial_povm(self):
        p = born_distribution(PureState([0.6, 0.8]), Povm([(OutcomeLabel.single(0), np.eye(2))]))
        np.testing.assert_allclose(p.probabilities, [1.0])

    def test_trine_under_anti_trine(self):
        expected = [(2 / 3) * abs(np.vdot(a, TRINE[1])) ** 2 for a in ANTI_TRINE]
        np.testing.assert_allclose(expected, [0.5, 0, 0.5], atol=1e-15)
        got = born_distribution(trine_detectors()[1], anti_trine_povm()).probabilities
        np.testing.assert_allclose(got, expected, atol=1e-15)

    def test_dim_mismatch(self):
        with pytest.raises(DimensionError):
            born_distribution(PureState([1, 0, 0]), anti_trine_povm())

    def test_sums_to_one(self):
        rng = np.random.default_rng(1)
        povm = six_pair_povm()
        for _ in range(20):
            v = rng.standard_normal(3) + 1j * rng.standard_normal(3)
            p = born_probabilities(PureState(v / np.linalg.norm(v)), povm)
            assert abs(p.sum() - 1) <= TOL_NORM


class TestSampling:
    def test_point_mass(self):
        povm = computational_povm(3)
        for seed in range(20):
            assert sample_outcome(PureState.basis(3, 2), povm, seed_stream(seed)) == OutcomeLabel.single(2)

    def test_identical_seeds(self):
        state, povm = trine_detectors()[1], anti_trine_povm()
        a = [sample_outcome(state, povm, rng) for rng in [seed_stream(42)] for _ in range(200)]
        b = [sample_outcome(state, povm, rng) for rng in [seed_stream(42)] for _ in range(200)]
        assert a == b

    def test_sample_outcome_uses_inverse_cdf(self):
        state, povm = trine_detectors()[1], anti_trine_povm()
        rng = seed_stream(42)
        drawn = [povm.labels.index(sample_outcome(state, povm, rng)) for _ in range(500)]
        us = seed_stream(42).random(500)
        np.testing.assert_array_equal(drawn, inverse_cdf(born_probabilities(state, povm), us))

    def test_excluded_outcome_never_drawn(self):
        p = born_probabilities(trine_detectors()[1], anti_trine_povm())
        n = 100_000
        idx = inverse_cdf(p, seed_stream(42).random(n))
        counts = np.bincount(idx, minlength=3)
        assert counts[1] == 0
        for c, q in zip(counts, p):
            assert abs(c / n - q) <= 5 * np.sqrt(q * (1 - q) / n)

    def test_streams_are_disjoint(self):
        assert not np.array_equal(seed_stream(1, 0).random(8), seed_stream(1, 1).random(8))

    def test_frequencies_converge(self):
        p = born_probabilities(SIMPLEX[0], six_pair_povm())
        n = 100_000
        counts = np.bincount(inverse_cdf(p, seed_stream(7).random(n)), minlength=6)
        for c, q in zip(counts, p):
            assert abs(c / n - q) <= 5 * np.sqrt(q * (1 - q) / n) + 1e-12


class TestExclusion:
    def test_anti_trine(self):
        rep = verify_exclusion(anti_trine_povm(), [([j], trine_detectors()[j]) for j in range(3)])
        assert rep.ok
        for j, lab in enumerate(anti_trine_povm().labels):
            assert rep.excluded[lab] == (j,)

    def test_six_pair(self):
        povm = six_pair_povm()
        hyps = [
            ([i for i, lab in enumerate(povm.labels) if j not in lab.indices], simplex4_detectors()[j])
            for j in range(4)
        ]
        rep = verify_exclusion(povm, hyps)
        assert rep.ok and not rep.near_misses
        for lab in povm.labels:
            assert set(rep.excluded[lab]) == set(range(4)) - set(lab.indices)

    def test_phase_elimination(self, trine3):
        hyps = [([k], reduced_path_state(trine3.state, k)) for k in range(3)]
        rep = verify_exclusion(projective_povm(fourier_basis(3)), hyps)
        assert rep.ok
        assert list(rep.excluded.values()) == [(0,), (1,), (2,)]

    def test_failure_reported(self):
        # the computational basis rules nothing out on the trine states
        rep = verify_exclusion(computational_povm(2), [([0], trine_detectors()[1])])
        assert not rep.ok

    def test_near_miss_visible(self):
        eps = 1e-7
        rho = DensityMatrix(np.diag([1 - eps, eps]))
        rep = verify_exclusion(computational_povm(2), [([1], rho)])
        assert not rep.ok
        assert rep.near_misses and rep.near_misses[0][2] == pytest.approx(eps)
