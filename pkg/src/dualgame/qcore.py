"""Dense complex linear algebra and entropies for small Hilbert spaces.

Matrices are plain ``numpy`` complex arrays. States, density matrices and
probability distributions are thin frozen dataclasses that validate their
invariants on construction. All logarithms are base 2.

Composite indices follow the row-major Kronecker convention: for factor
dimensions ``[d_path, d_det]`` the amplitude of ``|j>|m>`` lives at
``j * d_det + m``.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .errors import DimensionError, DistError, ShapeError, StateError

TOL_NORM = 1e-9
TOL_HERM = 1e-9
TOL_PSD = 1e-9
TOL_EIG = 1e-8

DEFAULT_MAX_DIM = 64


def max_dim() -> int:
    """Largest composite dimension allowed; ``DUALGAME_MAX_DIM`` overrides."""
    raw = os.environ.get("DUALGAME_MAX_DIM")
    if raw is None:
        return DEFAULT_MAX_DIM
    try:
        value = int(raw)
    except ValueError:
        raise DimensionError(f"DUALGAME_MAX_DIM must be an integer, got {raw!r}")
    if value < 1:
        raise DimensionError(f"DUALGAME_MAX_DIM must be positive, got {value}")
    return value


def as_matrix(m, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite 2-D complex array."""
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ShapeError(f"{name} must be a non-empty 2-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ShapeError(f"{name} has non-finite entries")
    return arr


def is_hermitian(m: np.ndarray, tol: float = TOL_HERM) -> bool:
    return m.shape[0] == m.shape[1] and np.max(np.abs(m - m.conj().T)) <= tol


@dataclass(frozen=True)
class PureState:
    """Normalized amplitude vector on a tensor product of factors."""

    dims: tuple[int, ...]
    amplitudes: np.ndarray = field(repr=False)

    def __init__(self, amplitudes, dims: Sequence[int] | None = None):
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        if dims is None:
            dims = (amps.size,)
        dims = tuple(int(d) for d in dims)
        if not dims or any(d < 1 for d in dims):
            raise DimensionError(f"factor dimensions must be positive, got {dims}")
        if math.prod(dims) != amps.size:
            raise DimensionError(
                f"{amps.size} amplitudes do not match factor dimensions {dims}"
            )
        if not np.all(np.isfinite(amps)):
            raise StateError("amplitudes must be finite")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > TOL_NORM:
            raise StateError(f"state is not normalized (norm = {norm!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def inner(self, other: "PureState") -> complex:
        """``<self|other>``."""
        if other.dim != self.dim:
            raise DimensionError(f"cannot take inner product of dims {self.dim} and {other.dim}")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def projector(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())

    def density(self) -> "DensityMatrix":
        return DensityMatrix(self.projector(), dims=self.dims)

    @classmethod
    def basis(cls, dim: int, index: int) -> "PureState":
        if not 0 <= index < dim:
            raise DimensionError(f"basis index {index} out of range for dim {dim}")
        amps = np.zeros(dim, dtype=complex)
        amps[index] = 1.0
        return cls(amps)


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, positive semidefinite, unit-trace matrix."""

    matrix: np.ndarray = field(repr=False)
    dims: tuple[int, ...]

    def __init__(self, matrix, dims: Sequence[int] | None = None):
        m = as_matrix(matrix, "density matrix")
        if m.shape[0] != m.shape[1]:
            raise ShapeError(f"density matrix must be square, got {m.shape}")
        if not is_hermitian(m):
            raise StateError("density matrix is not Hermitian")
        tr = np.trace(m).real
        if abs(tr - 1.0) > TOL_NORM:
            raise StateError(f"density matrix trace is {tr!r}, expected 1")
        lowest = np.linalg.eigvalsh(m)[0]
        if lowest < -TOL_PSD:
            raise StateError(f"density matrix has negative eigenvalue {lowest!r}")
        dims = (m.shape[0],) if dims is None else tuple(int(d) for d in dims)
        if math.prod(dims) != m.shape[0]:
            raise DimensionError(f"factor dimensions {dims} do not match size {m.shape[0]}")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class ProbDist:
    """Finite probability distribution with optional outcome labels."""

    probabilities: np.ndarray
    labels: tuple | None = None

    def __init__(self, probabilities, labels: Sequence | None = None):
        p = np.asarray(probabilities, dtype=float).reshape(-1)
        if p.size == 0:
            raise DistError("empty distribution")
        if not np.all(np.isfinite(p)):
            raise DistError("probabilities must be finite")
        if np.any(p < 0):
            raise DistError(f"negative probability {p.min()!r}")
        if abs(p.sum() - 1.0) > TOL_NORM:
            raise DistError(f"probabilities sum to {p.sum()!r}, expected 1")
        if labels is not None:
            labels = tuple(labels)
            if len(labels) != p.size:
                raise DistError(f"{len(labels)} labels for {p.size} probabilities")
        p.setflags(write=False)
        object.__setattr__(self, "probabilities", p)
        object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:
        return self.probabilities.size

    @classmethod
    def uniform(cls, n: int) -> "ProbDist":
        return cls(np.full(n, 1.0 / n))


Operand = Union[PureState, np.ndarray]


def tensor(a: Operand, b: Operand) -> Operand:
    """Kronecker product of two states or two matrices."""
    if isinstance(a, PureState) and isinstance(b, PureState):
        dims = a.dims + b.dims
        _check_dim(math.prod(dims))
        return PureState(np.kron(a.amplitudes, b.amplitudes), dims=dims)
    if isinstance(a, PureState) or isinstance(b, PureState):
        raise ShapeError("tensor operands must both be states or both be matrices")
    ma, mb = as_matrix(a, "left operand"), as_matrix(b, "right operand")
    _check_dim(ma.shape[0] * mb.shape[0])
    _check_dim(ma.shape[1] * mb.shape[1])
    return np.kron(ma, mb)


def _check_dim(d: int) -> None:
    limit = max_dim()
    if d > limit:
        raise DimensionError(f"dimension {d} exceeds the configured maximum {limit}")


def partial_trace(rho: DensityMatrix, dims: Sequence[int], keep: int) -> DensityMatrix:
    """Reduce ``rho`` to the single factor ``keep``, tracing out all others."""
    dims = tuple(int(d) for d in dims)
    if math.prod(dims) != rho.dim:
        raise DimensionError(f"factor dimensions {dims} do not match size {rho.dim}")
    if not 0 <= keep < len(dims):
        raise DimensionError(f"factor index {keep} out of range for {len(dims)} factors")
    n = len(dims)
    t = rho.matrix.reshape(dims + dims)
    # move kept factor to the front on both sides, then contract the rest
    order = [keep] + [i for i in range(n) if i != keep]
    t = t.transpose(order + [n + i for i in order])
    rest = math.prod(d for i, d in enumerate(dims) if i != keep)
    t = t.reshape(dims[keep], rest, dims[keep], rest)
    reduced = np.einsum("arbr->ab", t)
    return DensityMatrix(0.5 * (reduced + reduced.conj().T), dims=(dims[keep],))


def eig_hermitian(m) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a Hermitian matrix.

    Returns eigenvalues in descending order and the matching orthonormal
    eigenvectors as columns.
    """
    m = m.matrix if isinstance(m, DensityMatrix) else as_matrix(m)
    if not is_hermitian(m):
        raise ShapeError("eig_hermitian requires a Hermitian matrix")
    vals, vecs = np.linalg.eigh(0.5 * (m + m.conj().T))
    return vals[::-1].copy(), vecs[:, ::-1].copy()


def _clamped_spectrum(rho) -> np.ndarray:
    if isinstance(rho, DensityMatrix):
        m = rho.matrix
    else:
        try:
            m = DensityMatrix(rho).matrix
        except (ShapeError, DimensionError) as exc:
            raise StateError(str(exc)) from exc
    vals = eig_hermitian(m)[0]
    if vals[-1] < -TOL_PSD:
        raise StateError(f"negative eigenvalue {vals[-1]!r}")
    return np.where(vals < 0, 0.0, vals)


def _entropy_bits(p: np.ndarray) -> float:
    nz = p[p > 0]
    h = float(-np.sum(nz * np.log2(nz)))
    return h if h > 0 else 0.0


def von_neumann_entropy(rho) -> float:
    """Entropy ``-Tr rho log2 rho`` in bits."""
    return _entropy_bits(_clamped_spectrum(rho))


def shannon_entropy(p) -> float:
    """Entropy of a probability distribution in bits."""
    if not isinstance(p, ProbDist):
        p = ProbDist(p)
    return _entropy_bits(p.probabilities)
