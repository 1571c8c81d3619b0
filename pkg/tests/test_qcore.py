import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dualgame.errors import DimensionError, DistError, ShapeError, StateError
from dualgame.qcore import (
    TOL_EIG,
    DensityMatrix,
    ProbDist,
    PureState,
    eig_hermitian,
    partial_trace,
    shannon_entropy,
    tensor,
    von_neumann_entropy,
)

from conftest import TRINE, U_BASIS, V_BASIS, proj


def random_pure(rng, da, db):
    v = rng.standard_normal(da * db) + 1j * rng.standard_normal(da * db)
    return PureState(v / np.linalg.norm(v), dims=(da, db))


def faddeev_leverrier(m):
    """Characteristic polynomial coefficients of ``m``, highest degree first."""
    n = m.shape[0]
    coeffs = [1.0 + 0j]
    mk = np.zeros_like(m)
    for k in range(1, n + 1):
        mk = m @ mk + coeffs[-1] * np.eye(n)
        coeffs.append(-np.trace(m @ mk) / k)
    return np.array(coeffs)


class TestTypes:
    def test_unnormalized_state_rejected(self):
        with pytest.raises(StateError):
            PureState([1.0, 1.0])

    def test_dims_must_match(self):
        with pytest.raises(DimensionError):
            PureState([1, 0, 0], dims=(2, 2))

    def test_density_matrix_checks(self):
        with pytest.raises(StateError):
            DensityMatrix([[0.5, 0.1], [0.0, 0.5]])
        with pytest.raises(StateError):
            DensityMatrix(np.eye(2))
        with pytest.raises(StateError):
            DensityMatrix(np.diag([1.5, -0.5]))

    def test_prob_dist_checks(self):
        with pytest.raises(DistError):
            ProbDist([0.5, 0.6])
        with pytest.raises(DistError):
            ProbDist([1.5, -0.5])


class TestTensor:
    def test_basis_bookkeeping(self):
        s = tensor(PureState.basis(2, 0), PureState.basis(2, 1))
        assert s.dims == (2, 2)
        assert s.amplitudes[1] == 1 and np.count_nonzero(s.amplitudes) == 1

    def test_identity(self):
        np.testing.assert_array_equal(tensor(np.eye(2), np.eye(3)), np.eye(6))

    def test_trine_interferometer_state(self):
        psi = sum(tensor(PureState.basis(3, j), PureState(TRINE[j])).amplitudes for j in range(3)) / np.sqrt(3)
        expected = np.array([TRINE[j, m] / np.sqrt(3) for j in range(3) for m in range(2)])
        np.testing.assert_allclose(psi, expected, atol=1e-15)

    def test_norm_preserved(self):
        rng = np.random.default_rng(3)
        s = tensor(random_pure(rng, 2, 3), random_pure(rng, 4, 1))
        assert s.dims == (2, 3, 4, 1)
        assert abs(np.linalg.norm(s.amplitudes) - 1) < 1e-12

    def test_overflow(self, monkeypatch):
        big = PureState(np.ones(8) / np.sqrt(8))
        other = PureState(np.ones(9) / 3)
        with pytest.raises(DimensionError):
            tensor(big, other)
        monkeypatch.setenv("DUALGAME_MAX_DIM", "100")
        assert tensor(big, other).dim == 72

    def test_mixed_operands(self):
        with pytest.raises(ShapeError):
            tensor(PureState.basis(2, 0), np.eye(2))


class TestPartialTrace:
    def test_trine_path_state(self):
        psi = (TRINE / np.sqrt(3)).reshape(-1)
        rho = partial_trace(PureState(psi, dims=(3, 2)).density(), (3, 2), keep=0)
        expected = 0.5 * (proj(U_BASIS[1]) + proj(U_BASIS[2]))
        np.testing.assert_allclose(rho.matrix, expected, atol=1e-12)

    def test_product_state(self):
        rho_a = np.diag([0.7, 0.3]).astype(complex)
        rho_b = np.array([[0.5, 0.25j], [-0.25j, 0.5]])
        rho = DensityMatrix(np.kron(rho_a, rho_b), dims=(2, 2))
        np.testing.assert_allclose(partial_trace(rho, (2, 2), 0).matrix, rho_a, atol=1e-15)
        np.testing.assert_allclose(partial_trace(rho, (2, 2), 1).matrix, rho_b, atol=1e-15)

    @pytest.mark.parametrize("keep", [0, 1])
    def test_maximally_entangled(self, keep):
        bell = PureState(np.array([1, 0, 0, 1]) / np.sqrt(2), dims=(2, 2))
        np.testing.assert_allclose(partial_trace(bell.density(), (2, 2), keep).matrix, np.eye(2) / 2, atol=1e-15)

    def test_three_factors(self):
        rng = np.random.default_rng(0)
        a, b, c = (random_pure(rng, d, 1) for d in (2, 3, 2))
        s = tensor(tensor(PureState(a.amplitudes), PureState(b.amplitudes)), PureState(c.amplitudes))
        red = partial_trace(s.density(), (2, 3, 2), keep=1)
        np.testing.assert_allclose(red.matrix, proj(b.amplitudes), atol=1e-12)

    def test_mismatched_dims(self):
        with pytest.raises(DimensionError):
            partial_trace(DensityMatrix(np.eye(4) / 4), (2, 3), 0)
        with pytest.raises(DimensionError):
            partial_trace(DensityMatrix(np.eye(4) / 4), (2, 2), 2)


class TestEig:
    def test_simplex_path_state(self):
        rho = np.eye(4) / 4 - (np.ones((4, 4)) - np.eye(4)) / 12
        vals, _ = eig_hermitian(rho)
        np.testing.assert_allclose(vals, [1 / 3, 1 / 3, 1 / 3, 0], atol=1e-12)

    def test_identity(self):
        vals, vecs = eig_hermitian(np.eye(3))
        np.testing.assert_allclose(vals, [1, 1, 1])
        np.testing.assert_allclose(vecs.conj().T @ vecs, np.eye(3), atol=1e-15)

    @pytest.mark.parametrize("seed", range(5))
    def test_random_against_characteristic_polynomial(self, seed):
        rng = np.random.default_rng(seed)
        a = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
        m = (a + a.conj().T) / 2
        vals, vecs = eig_hermitian(m)
        roots = np.sort(np.roots(faddeev_leverrier(m)).real)[::-1]
        np.testing.assert_allclose(vals, roots, atol=TOL_EIG)
        assert np.all(np.diff(vals) <= 0)
        assert np.max(np.abs(m - vecs @ np.diag(vals) @ vecs.conj().T)) <= TOL_EIG
        assert np.max(np.abs(vecs.conj().T @ vecs - np.eye(5))) <= TOL_EIG

    def test_non_hermitian(self):
        with pytest.raises(ShapeError):
            eig_hermitian([[1, 1], [0, 1]])


class TestEntropy:
    def test_rank_two_mixture(self):
        rho = 0.5 * (proj(U_BASIS[1]) + proj(U_BASIS[2]))
        assert von_neumann_entropy(DensityMatrix(rho)) == pytest.approx(1.0, abs=1e-12)

    def test_pure(self):
        assert von_neumann_entropy(DensityMatrix(proj(U_BASIS[0]))) == pytest.approx(0.0, abs=1e-12)

    def test_v_basis_mixture(self):
        rho = sum(proj(V_BASIS[j]) for j in (1, 2, 3)) / 3
        assert von_neumann_entropy(rho) == pytest.approx(np.log2(3), abs=1e-12)

    def test_small_negative_clamped(self):
        assert von_neumann_entropy(np.diag([1 + 5e-10, -5e-10])) == pytest.approx(0.0, abs=1e-8)

    def test_invalid(self):
        with pytest.raises(StateError):
            von_neumann_entropy(np.diag([1.1, -0.1]))

    @pytest.mark.parametrize(
        "p, expected",
        [([0.25] * 4, 2.0), ([1.0, 0.0, 0.0], 0.0), ([1 / 3] * 3, np.log2(3))],
    )
    def test_shannon(self, p, expected):
        assert shannon_entropy(ProbDist(p)) == pytest.approx(expected, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(da=st.integers(1, 8), db=st.integers(1, 8), seed=st.integers(0, 2**32 - 1))
def test_pure_bipartite_entropies_match(da, db, seed):
    s = random_pure(np.random.default_rng(seed), da, db)
    rho = s.density()
    ra, rb = partial_trace(rho, s.dims, 0), partial_trace(rho, s.dims, 1)
    assert abs(von_neumann_entropy(ra) - von_neumann_entropy(rb)) <= 10 * TOL_EIG
    for r, d in ((ra, da), (rb, db)):
        assert abs(np.trace(r.matrix) - 1) <= 1e-9
        assert eig_hermitian(r.matrix)[0][-1] >= -1e-9
        assert 0 <= von_neumann_entropy(r) <= np.log2(d) + 1e-9


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(0, 1), min_size=1, max_size=12).filter(lambda x: sum(x) > 1e-3))
def test_shannon_bounded_by_support(raw):
    p = np.array(raw) / sum(raw)
    h = shannon_entropy(p)
    assert 0 <= h <= np.log2(np.count_nonzero(p)) + 1e-12
