"""Interferometer states, detector families, phase unitaries and Fourier bases.

Constructors return the literal amplitudes of the standard 3- and 4-path
constructions without any global rephasing, so regression tests can compare
entries exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ArgError, DimensionError
from .qcore import TOL_HERM, DensityMatrix, ProbDist, PureState, partial_trace, tensor

SQRT2 = np.sqrt(2.0)
SQRT3 = np.sqrt(3.0)


@dataclass(frozen=True)
class DetectorFamily:
    """Detector states ``|eta_j>``, one per path, all of one dimension."""

    states: tuple[PureState, ...]

    def __init__(self, states: Sequence[PureState]):
        states = tuple(s if isinstance(s, PureState) else PureState(s) for s in states)
        if not states:
            raise DimensionError("detector family must contain at least one state")
        dims = {s.dim for s in states}
        if len(dims) != 1 or any(len(s.dims) != 1 for s in states):
            raise DimensionError("detector states must be single-factor and share a dimension")
        object.__setattr__(self, "states", states)

    @property
    def n_states(self) -> int:
        return len(self.states)

    @property
    def detector_dim(self) -> int:
        return self.states[0].dim

    def gram(self) -> np.ndarray:
        """Matrix of overlaps ``<eta_j|eta_k>``."""
        a = np.array([s.amplitudes for s in self.states])
        return a.conj() @ a.T

    def __getitem__(self, j: int) -> PureState:
        return self.states[j]

    def __len__(self) -> int:
        return len(self.states)


def phase_unitary(N: int, k: int) -> np.ndarray:
    """Diagonal ``U(a^k)`` with entries ``exp(2 pi i j k / N)``."""
    if N < 1:
        raise ArgError(f"N must be positive, got {N}")
    if not 0 <= k < N:
        raise ArgError(f"group element k={k} out of range for Z_{N}")
    # reduce jk mod N first so that e.g. N=4 gives exactly 1, i, -1, -i
    jk = (np.arange(N) * k) % N
    return np.diag(_root_of_unity(jk, N))


def _root_of_unity(m: np.ndarray, N: int) -> np.ndarray:
    phases = np.exp(2j * np.pi * m / N)
    # snap the cardinal points (+-1, +-i) exactly
    quarter = (4 * m) % N == 0
    if np.any(quarter):
        q = ((4 * m[quarter]) // N) % 4
        phases[quarter] = np.array([1, 1j, -1, -1j])[q]
    return phases


@dataclass(frozen=True)
class PhaseGroup:
    """The regular representation of ``Z_N`` acting diagonally on paths."""

    N: int

    def __post_init__(self):
        if self.N < 1:
            raise ArgError(f"N must be positive, got {self.N}")

    @property
    def elements(self) -> range:
        return range(self.N)

    def unitary(self, k: int) -> np.ndarray:
        return phase_unitary(self.N, k)

    def compose(self, j: int, k: int) -> int:
        return (j + k) % self.N


def fourier_basis(N: int, sign: int = 1) -> list[PureState]:
    """``|w_j> = N^{-1/2} sum_k exp(sign 2 pi i j k / N) |k>`` for j = 0..N-1."""
    if N < 1:
        raise ArgError(f"N must be positive, got {N}")
    if sign not in (1, -1):
        raise ArgError(f"sign must be +1 or -1, got {sign}")
    jk = np.outer(np.arange(N), np.arange(N)) % N
    rows = _root_of_unity((sign * jk) % N, N) / np.sqrt(N)
    return [PureState(row) for row in rows]


def trine_detectors() -> DetectorFamily:
    return DetectorFamily([
        [1.0, 0.0],
        [-0.5, SQRT3 / 2],
        [-0.5, -SQRT3 / 2],
    ])


def anti_trine_states() -> DetectorFamily:
    """Qubit states with ``<eta_j|anti_j> = 0`` against the trine."""
    return DetectorFamily([
        [0.0, 1.0],
        [-SQRT3 / 2, -0.5],
        [SQRT3 / 2, -0.5],
    ])


def simplex4_detectors() -> DetectorFamily:
    """Four qutrit states with pairwise overlap -1/3."""
    return DetectorFamily([
        [0.0, 0.0, 1.0],
        [2 * SQRT2 / 3, 0.0, -1 / 3],
        [-SQRT2 / 3, np.sqrt(2 / 3), -1 / 3],
        [-SQRT2 / 3, -np.sqrt(2 / 3), -1 / 3],
    ])


def two_pair_detectors() -> DetectorFamily:
    """Orthogonal qubit markers: paths {1,3} -> |0>, paths {0,2} -> |1>."""
    zero, one = [1.0, 0.0], [0.0, 1.0]
    return DetectorFamily([one, zero, one, zero])


def interferometer_state(weights: ProbDist, detectors: DetectorFamily) -> PureState:
    """``sum_j sqrt(p_j) |j>_p |eta_j>_d`` on dims ``[N, d]``."""
    if not isinstance(weights, ProbDist):
        weights = ProbDist(weights)
    N = len(weights)
    if detectors.n_states != N:
        raise DimensionError(f"{detectors.n_states} detector states for {N} paths")
    d = detectors.detector_dim
    # route through tensor() so the dimension cap applies
    tensor(PureState.basis(N, 0), PureState.basis(d, 0))
    amps = np.zeros((N, d), dtype=complex)
    for j, (p, eta) in enumerate(zip(weights.probabilities, detectors.states)):
        amps[j] = np.sqrt(p) * eta.amplitudes
    return PureState(amps.reshape(-1), dims=(N, d))


def reduced_path_state(psi: PureState, k: int, group: PhaseGroup | None = None) -> DensityMatrix:
    """Alice's path state ``U(a^k) Tr_d(|psi><psi|) U(a^k)^dagger``."""
    if len(psi.dims) != 2:
        raise DimensionError(f"expected a path (x) detector state, got dims {psi.dims}")
    N = psi.dims[0]
    if group is None:
        group = PhaseGroup(N)
    elif group.N != N:
        raise DimensionError(f"phase group Z_{group.N} does not act on {N} paths")
    rho0 = partial_trace(psi.density(), psi.dims, keep=0).matrix
    u = group.unitary(k)
    rho = u @ rho0 @ u.conj().T
    return DensityMatrix(0.5 * (rho + rho.conj().T))


def group_law_holds(N: int, tol: float = TOL_HERM) -> bool:
    """Check ``U(a^j) U(a^k) = U(a^{j+k mod N})`` for all pairs."""
    for j in range(N):
        for k in range(N):
            lhs = phase_unitary(N, j) @ phase_unitary(N, k)
            if np.max(np.abs(lhs - phase_unitary(N, (j + k) % N))) > tol:
                return False
    return True
