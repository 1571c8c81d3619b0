"""POVMs, Born probabilities, seeded sampling and exclusion checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import ArgError, DimensionError, ShapeError
from .qcore import TOL_EIG, TOL_PSD, DensityMatrix, ProbDist, PureState, as_matrix, is_hermitian
from .states import SQRT2, SQRT3, anti_trine_states

State = Union[PureState, DensityMatrix]


@dataclass(frozen=True, order=True)
class OutcomeLabel:
    """Name of a measurement outcome: a single index, a pair or a larger set."""

    kind: str
    indices: tuple[int, ...]

    def __post_init__(self):
        if self.kind not in ("single", "pair", "set"):
            raise ArgError(f"unknown outcome kind {self.kind!r}")
        idx = tuple(sorted(int(i) for i in self.indices))
        if len(set(idx)) != len(idx) or any(i < 0 for i in idx):
            raise ArgError(f"outcome indices must be distinct and non-negative: {self.indices}")
        if self.kind == "single" and len(idx) != 1:
            raise ArgError("single outcome needs exactly one index")
        if self.kind == "pair" and len(idx) != 2:
            raise ArgError("pair outcome needs exactly two indices")
        object.__setattr__(self, "indices", idx)

    @classmethod
    def single(cls, i: int) -> "OutcomeLabel":
        return cls("single", (i,))

    @classmethod
    def pair(cls, i: int, j: int) -> "OutcomeLabel":
        return cls("pair", (i, j))

    def __str__(self) -> str:
        if self.kind == "single":
            return str(self.indices[0])
        return "{" + ",".join(map(str, self.indices)) + "}"


@dataclass(frozen=True)
class Povm:
    """Labeled positive operators summing to the identity."""

    labels: tuple[OutcomeLabel, ...]
    operators: tuple[np.ndarray, ...] = field(repr=False)

    def __init__(self, elements: Iterable[tuple[OutcomeLabel, np.ndarray]]):
        labels, ops = [], []
        for label, op in elements:
            m = as_matrix(op, f"POVM element {label}")
            if m.shape[0] != m.shape[1]:
                raise ShapeError(f"POVM element {label} is not square")
            if not is_hermitian(m):
                raise ShapeError(f"POVM element {label} is not Hermitian")
            if np.linalg.eigvalsh(m)[0] < -TOL_PSD:
                raise ShapeError(f"POVM element {label} is not positive semidefinite")
            m = m.copy()
            m.setflags(write=False)
            labels.append(label)
            ops.append(m)
        if not ops:
            raise ShapeError("POVM must have at least one element")
        if len({m.shape for m in ops}) != 1:
            raise DimensionError("POVM elements differ in dimension")
        if len(set(labels)) != len(labels):
            raise ArgError("POVM labels must be unique")
        err = completeness_error(ops)
        if err > TOL_EIG:
            raise ShapeError(f"POVM elements do not sum to identity (error {err:.3g})")
        object.__setattr__(self, "labels", tuple(labels))
        object.__setattr__(self, "operators", tuple(ops))

    @property
    def dim(self) -> int:
        return self.operators[0].shape[0]

    def __len__(self) -> int:
        return len(self.operators)

    @property
    def elements(self) -> list[tuple[OutcomeLabel, np.ndarray]]:
        return list(zip(self.labels, self.operators))

    def stacked(self) -> np.ndarray:
        return np.array(self.operators)


def completeness_error(operators: Sequence[np.ndarray]) -> float:
    """Max-entry deviation of ``sum_i Pi_i`` from the identity."""
    total = np.sum(operators, axis=0)
    return float(np.max(np.abs(total - np.eye(total.shape[0]))))


def anti_trine_povm() -> Povm:
    """Bob's qubit exclusion measurement ``Pi_j = (2/3)|anti_j><anti_j|``."""
    return Povm(
        (OutcomeLabel.single(j), (2 / 3) * s.projector())
        for j, s in enumerate(anti_trine_states().states)
    )


def _complement_pair(pair: tuple[int, int], n: int = 4) -> tuple[int, int]:
    rest = tuple(i for i in range(n) if i not in pair)
    return rest[0], rest[1]


def six_pair_xi() -> dict[tuple[int, int], np.ndarray]:
    """Qutrit vectors orthogonal to the simplex detector states of each pair."""
    h = SQRT3 / 2
    return {
        (0, 1): np.array([0.0, 1.0, 0.0]),
        (0, 2): np.array([-h, -0.5, 0.0]),
        (0, 3): np.array([h, -0.5, 0.0]),
        (1, 2): h * np.array([1 / 3, 1 / SQRT3, 2 * SQRT2 / 3]),
        (1, 3): h * np.array([1 / 3, -1 / SQRT3, 2 * SQRT2 / 3]),
        (2, 3): h * np.array([2 / 3, 0.0, -2 * SQRT2 / 3]),
    }


def six_pair_povm() -> Povm:
    """Pair-detecting measurement for the four simplex detector states.

    Element ``{j,k}`` is half the projector onto the vector orthogonal to the
    complementary pair, so a click on ``{j,k}`` rules out the other two paths.
    """
    xi = six_pair_xi()
    return Povm(
        (OutcomeLabel.pair(*pair), 0.5 * np.outer(xi[_complement_pair(pair)], xi[_complement_pair(pair)]))
        for pair in combinations(range(4), 2)
    )


def projective_povm(basis: Sequence[PureState], labels: Sequence[OutcomeLabel] | None = None) -> Povm:
    """Rank-one projectors onto an orthonormal basis."""
    basis = list(basis)
    if not basis:
        raise ArgError("empty basis")
    a = np.array([b.amplitudes for b in basis])
    if a.shape[0] != a.shape[1]:
        raise ArgError(f"{a.shape[0]} vectors cannot form a basis of dimension {a.shape[1]}")
    gram = a.conj() @ a.T
    if np.max(np.abs(gram - np.eye(len(basis)))) > TOL_EIG:
        raise ArgError("basis is not orthonormal")
    if labels is None:
        labels = [OutcomeLabel.single(j) for j in range(len(basis))]
    if len(labels) != len(basis):
        raise ArgError(f"{len(labels)} labels for {len(basis)} basis vectors")
    return Povm((lab, b.projector()) for lab, b in zip(labels, basis))


def computational_povm(n: int) -> Povm:
    return projective_povm([PureState.basis(n, j) for j in range(n)])


def _state_matrix(state) -> np.ndarray:
    if isinstance(state, PureState):
        return state.projector()
    if isinstance(state, DensityMatrix):
        return state.matrix
    if np.ndim(state) == 1:
        return PureState(state).projector()
    return DensityMatrix(state).matrix


def born_probabilities(state: State, povm: Povm) -> np.ndarray:
    """Raw ``Tr(rho Pi_i)`` with tiny negatives clipped to zero."""
    rho = _state_matrix(state)
    if rho.shape[0] != povm.dim:
        raise DimensionError(f"state dimension {rho.shape[0]} does not match POVM dimension {povm.dim}")
    # Tr(rho Pi) = sum_ab rho_ab Pi_ba
    p = np.einsum("ab,iba->i", rho, povm.stacked()).real
    return np.where(p < 0, 0.0, p)


def born_distribution(state: State, povm: Povm) -> ProbDist:
    return ProbDist(born_probabilities(state, povm), labels=povm.labels)


def seed_stream(seed: int, stream: int | Sequence[int] = 0) -> np.random.Generator:
    """Counter-based generator for ``(seed, stream id)``.

    Distinct stream ids give statistically independent Philox streams, so
    concurrent samplers never share state.
    """
    key = (stream,) if isinstance(stream, int) else tuple(stream)
    ss = np.random.SeedSequence(int(seed), spawn_key=key)
    return np.random.Generator(np.random.Philox(ss))


def inverse_cdf(probs: np.ndarray, u) -> np.ndarray:
    """Map uniforms in [0, 1) to outcome indices.

    ``probs`` is one distribution or a stack of them (last axis = outcomes);
    ``u`` broadcasts against the leading axes. Zero-probability outcomes are
    never returned.
    """
    cdf = np.cumsum(probs, axis=-1)
    x = np.asarray(u, dtype=float)[..., None] * cdf[..., -1:]
    idx = np.sum(cdf <= x, axis=-1)
    return np.minimum(idx, probs.shape[-1] - 1)


def sample_index(probs: np.ndarray, rng: np.random.Generator) -> int:
    return int(inverse_cdf(np.asarray(probs, dtype=float), rng.random()))


def sample_outcome(state: State, povm: Povm, rng: np.random.Generator) -> OutcomeLabel:
    """Draw one outcome by inverse CDF over the POVM's label order."""
    return povm.labels[sample_index(born_probabilities(state, povm), rng)]


@dataclass
class ExclusionReport:
    """Which hypotheses each outcome rules out."""

    excluded: dict[OutcomeLabel, tuple[int, ...]]
    intended: dict[OutcomeLabel, tuple[int, ...]]
    probabilities: np.ndarray
    near_misses: list[tuple[OutcomeLabel, int, float]]
    ok: bool

    def __bool__(self) -> bool:
        return self.ok


def verify_exclusion(
    povm: Povm,
    hypotheses: Sequence[tuple[Iterable[int], State]],
    tol: float = TOL_EIG,
) -> ExclusionReport:
    """Check that every outcome rules out its intended hypotheses.

    ``hypotheses[i]`` is ``(indices, state)`` where ``indices`` are the POVM
    outcome positions that must have vanishing probability on ``state``.
    Probabilities in ``(tol, 1e-6]`` are listed as near misses.
    """
    probs = np.array([born_probabilities(st, povm) for _, st in hypotheses])
    excluded, intended, near = {}, {}, []
    for i, label in enumerate(povm.labels):
        excluded[label] = tuple(h for h in range(len(hypotheses)) if probs[h, i] <= tol)
        intended[label] = tuple(h for h, (outs, _) in enumerate(hypotheses) if i in set(outs))
        near.extend((label, h, float(probs[h, i])) for h in range(len(hypotheses)) if tol < probs[h, i] <= 1e-6)
    ok = all(set(intended[lab]) <= set(excluded[lab]) for lab in povm.labels)
    ok = ok and all(excluded[lab] for lab in povm.labels)
    return ExclusionReport(excluded, intended, probs, near, ok)
