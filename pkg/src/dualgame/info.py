"""Mutual information, Holevo quantities and the path/phase duality check.

The central inequality: for any phase measurement by Alice and any detector
measurement by Bob,

    I(phase sent : Alice's outcome) + I(path : Bob's outcome) <= H({p_j})

where ``p_j`` are the path weights. Zero-probability cells contribute 0
to every entropy and mutual information in this module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ArgError, DimensionError, DistError
from .game import GameScenario
from .measure import OutcomeLabel, Povm, seed_stream
from .qcore import (
    TOL_EIG,
    TOL_NORM,
    DensityMatrix,
    ProbDist,
    PureState,
    shannon_entropy,
    von_neumann_entropy,
)
from .states import DetectorFamily, reduced_path_state


@dataclass(frozen=True)
class JointDistribution:
    """Table ``p(x, y)``; rows index x, columns index y."""

    table: np.ndarray
    x_labels: tuple | None = None
    y_labels: tuple | None = None

    def __post_init__(self):
        t = np.asarray(self.table, dtype=float)
        if t.ndim != 2 or t.size == 0:
            raise DistError(f"joint table must be a non-empty 2-D array, got shape {t.shape}")
        if not np.all(np.isfinite(t)) or np.any(t < 0):
            raise DistError("joint table entries must be finite and non-negative")
        if abs(t.sum() - 1.0) > TOL_NORM:
            raise DistError(f"joint table sums to {t.sum()!r}, expected 1")
        for name, labels, n in (("x", self.x_labels, t.shape[0]), ("y", self.y_labels, t.shape[1])):
            if labels is not None and len(labels) != n:
                raise DistError(f"{len(labels)} {name} labels for {n} rows/columns")
        t.setflags(write=False)
        object.__setattr__(self, "table", t)

    @classmethod
    def from_conditional(cls, prior, channel, x_labels=None, y_labels=None) -> "JointDistribution":
        """Build ``p(x, y) = p(x) p(y|x)``."""
        prior = np.asarray(prior, dtype=float)
        channel = np.asarray(channel, dtype=float)
        return cls(prior[:, None] * channel, x_labels, y_labels)

    @property
    def p_x(self) -> np.ndarray:
        return self.table.sum(axis=1)

    @property
    def p_y(self) -> np.ndarray:
        return self.table.sum(axis=0)

    def transpose(self) -> "JointDistribution":
        return JointDistribution(self.table.T, self.y_labels, self.x_labels)


def mutual_information(j: JointDistribution) -> float:
    """``I(X:Y)`` in bits."""
    t = j.table
    outer = np.outer(j.p_x, j.p_y)
    mask = t > 0
    mi = float(np.sum(t[mask] * np.log2(t[mask] / outer[mask])))
    return mi if mi > 0 else 0.0


@dataclass(frozen=True)
class Ensemble:
    priors: ProbDist
    states: tuple[DensityMatrix, ...]

    def __post_init__(self):
        states = tuple(s.density() if isinstance(s, PureState) else s for s in self.states)
        if len(states) != len(self.priors):
            raise DimensionError(f"{len(states)} states for {len(self.priors)} priors")
        if len({s.dim for s in states}) != 1:
            raise DimensionError("ensemble states differ in dimension")
        object.__setattr__(self, "states", states)

    def average(self) -> np.ndarray:
        return sum(p * s.matrix for p, s in zip(self.priors.probabilities, self.states))


def holevo_quantity(e: Ensemble) -> float:
    """``S(sum p_i rho_i) - sum p_i S(rho_i)``."""
    avg = e.average()
    chi = von_neumann_entropy(DensityMatrix(0.5 * (avg + avg.conj().T))) - sum(
        p * von_neumann_entropy(s) for p, s in zip(e.priors.probabilities, e.states)
    )
    return chi if chi > 0 else 0.0


def coherence_rel_entropy(rho: DensityMatrix, weights: ProbDist | None = None) -> float:
    """Relative-entropy coherence ``H(diag rho) - S(rho)`` in the path basis."""
    diag = np.diag(rho.matrix).real
    if weights is None:
        weights = ProbDist(np.clip(diag, 0, None) / np.clip(diag, 0, None).sum())
    elif not isinstance(weights, ProbDist):
        weights = ProbDist(weights)
    if len(weights) != rho.dim or np.max(np.abs(weights.probabilities - diag)) > TOL_EIG:
        raise ArgError("weights do not match the diagonal of rho")
    c = shannon_entropy(weights) - von_neumann_entropy(rho)
    return c if c > 0 else 0.0


@dataclass
class DualityReport:
    phase_mi: float
    path_mi: float
    entropy: float
    slack: float
    passed: bool
    saturated: bool

    def as_dict(self) -> dict:
        return {
            "I_phase": self.phase_mi,
            "I_path": self.path_mi,
            "H_weights": self.entropy,
            "slack": self.slack,
            "pass": self.passed,
            "saturated": self.saturated,
        }


def duality_check(
    phase_joint: JointDistribution,
    path_joint: JointDistribution,
    weights: ProbDist,
    tol: float = TOL_EIG,
) -> DualityReport:
    i1 = mutual_information(phase_joint)
    i2 = mutual_information(path_joint)
    h = shannon_entropy(weights)
    slack = h - i1 - i2
    return DualityReport(i1, i2, h, slack, slack >= -tol, abs(slack) <= tol)


def scenario_joints(s: GameScenario) -> tuple[JointDistribution, JointDistribution]:
    """Exact (phase, Alice outcome) and (path, Bob outcome) joint tables."""
    N = s.N
    phase = JointDistribution.from_conditional(
        np.full(N, 1.0 / N), s.phase_table, tuple(range(N)), s.alice_phase_povm.labels
    )
    # Bob's statistics do not depend on the phase; use k = 0
    path = JointDistribution.from_conditional(
        s.weights.probabilities, s.bob_table[0], tuple(range(N)), s.bob_povm.labels
    )
    return phase, path


def scenario_duality(s: GameScenario) -> DualityReport:
    phase, path = scenario_joints(s)
    return duality_check(phase, path, s.weights)


def phase_ensemble(s: GameScenario) -> Ensemble:
    return Ensemble(ProbDist.uniform(s.N), tuple(reduced_path_state(s.state, k, s.group) for k in range(s.N)))


def detector_ensemble(s: GameScenario) -> Ensemble:
    return Ensemble(s.weights, tuple(eta.density() for eta in s.detectors.states))


@dataclass(frozen=True)
class Partition:
    """``n`` disjoint sets of size ``m`` covering ``0..N-1``."""

    N: int
    sets: tuple[frozenset[int], ...]

    def __post_init__(self):
        sets = tuple(frozenset(s) for s in self.sets)
        if not sets:
            raise ArgError("partition needs at least one set")
        sizes = {len(s) for s in sets}
        if len(sizes) != 1:
            raise ArgError(f"partition sets must share one size, got {sorted(sizes)}")
        union = frozenset().union(*sets)
        if sum(map(len, sets)) != len(union) or union != frozenset(range(self.N)):
            raise ArgError("partition sets must be disjoint and cover 0..N-1")
        object.__setattr__(self, "sets", sets)

    @property
    def n(self) -> int:
        return len(self.sets)

    @property
    def m(self) -> int:
        return len(self.sets[0])

    @classmethod
    def contiguous(cls, N: int, n: int) -> "Partition":
        if n < 1 or N % n:
            raise ArgError(f"{n} does not divide {N}")
        m = N // n
        return cls(N, tuple(frozenset(range(y * m, (y + 1) * m)) for y in range(n)))

    def joint(self) -> JointDistribution:
        """Uniform x with the deterministic channel ``y = set containing x``."""
        t = np.zeros((self.N, self.n))
        for y, s in enumerate(self.sets):
            for x in s:
                t[x, y] = 1.0 / self.N
        return JointDistribution(t)


def partition_mi(p: Partition) -> float:
    return math.log2(p.n)


@dataclass(frozen=True)
class FeasibilityVerdict:
    N: int
    n_ways: int
    n_phases: int
    info_needed: float
    info_available: float
    feasible: bool
    tight: bool


def partition_feasible(N: int, n_ways: int, n_phases: int | None = None) -> FeasibilityVerdict:
    """Necessary condition for always winning a partition game.

    Passing does not prove a winning strategy exists; failing proves none does.
    """
    if n_phases is None:
        n_phases = n_ways
    if N < 1:
        raise ArgError(f"N must be positive, got {N}")
    for n in (n_ways, n_phases):
        if n < 1 or N % n:
            raise ArgError(f"{n} is not a divisor of {N}")
    need = math.log2(n_ways) + math.log2(n_phases)
    have = math.log2(N)
    return FeasibilityVerdict(N, n_ways, n_phases, need, have, need <= have + TOL_EIG, abs(need - have) <= TOL_EIG)


def scan_partitions(n_max: int) -> list[FeasibilityVerdict]:
    """Verdicts for every N <= n_max and every pair of divisors of N."""
    rows = []
    for N in range(1, n_max + 1):
        divisors = [d for d in range(1, N + 1) if N % d == 0]
        rows.extend(partition_feasible(N, a, b) for a in divisors for b in divisors)
    return rows


# -- random scenarios -------------------------------------------------------


def random_unit_vector(rng: np.random.Generator, dim: int) -> np.ndarray:
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def random_povm(rng: np.random.Generator, dim: int, n_outcomes: int) -> Povm:
    """``Pi_i = S^{-1/2} M_i^dag M_i S^{-1/2}`` with ``S = sum M_i^dag M_i``."""
    ms = rng.standard_normal((n_outcomes, dim, dim)) + 1j * rng.standard_normal((n_outcomes, dim, dim))
    raw = np.einsum("iba,ibc->iac", ms.conj(), ms)
    w, v = np.linalg.eigh(raw.sum(axis=0))
    inv_sqrt = (v / np.sqrt(w)) @ v.conj().T
    ops = inv_sqrt @ raw @ inv_sqrt
    ops = 0.5 * (ops + ops.conj().transpose(0, 2, 1))
    # absorb rounding into the last element so completeness is tight
    ops[-1] += np.eye(dim) - ops.sum(axis=0)
    return Povm((OutcomeLabel.single(i), op) for i, op in enumerate(ops))


def random_scenario(
    rng: np.random.Generator,
    paths: Sequence[int] = (2, 3, 4),
    dims: tuple[int, int] = (2, 4),
    max_outcomes: int = 8,
) -> GameScenario:
    """Generic scenario: random weights, detectors and both POVMs.

    Answer maps are singletons ``{outcome mod N}``; they only matter for
    win probabilities, not for the duality check.
    """
    N = int(rng.choice(paths))
    d = int(rng.integers(dims[0], dims[1] + 1))
    weights = ProbDist(rng.dirichlet(np.ones(N)))
    detectors = DetectorFamily([PureState(random_unit_vector(rng, d)) for _ in range(N)])
    bob = random_povm(rng, d, int(rng.integers(2, max_outcomes + 1)))
    alice = random_povm(rng, N, int(rng.integers(2, max_outcomes + 1)))
    return GameScenario(
        weights=weights,
        detectors=detectors,
        bob_povm=bob,
        alice_phase_povm=alice,
        ways_answers=tuple(frozenset({y % N}) for y in range(len(bob))),
        phases_answers=tuple(frozenset({x % N}) for x in range(len(alice))),
        ways_answer_size=1,
        phases_answer_size=1,
        name="random",
    )


@dataclass
class FuzzFailure:
    seed: int
    index: int
    check: str
    value: float


@dataclass
class FuzzReport:
    count: int
    seed: int
    dims: tuple[int, int]
    min_slack: float
    min_holevo_margin: float
    failures: list[FuzzFailure] = field(default_factory=list)

    @property
    def violations(self) -> int:
        return len(self.failures)


def fuzz_duality(count: int, seed: int, dims: tuple[int, int] = (2, 4), tol: float = TOL_EIG) -> FuzzReport:
    """Check the duality relation and Holevo dominance on random scenarios.

    Scenario ``i`` is drawn from stream ``(seed, i)`` and can be rebuilt alone
    with ``random_scenario(seed_stream(seed, i), dims=dims)``.
    """
    if count < 1:
        raise ArgError(f"count must be at least 1, got {count}")
    min_slack = math.inf
    min_margin = math.inf
    failures = []
    for i in range(count):
        s = random_scenario(seed_stream(seed, i), dims=dims)
        phase, path = scenario_joints(s)
        rep = duality_check(phase, path, s.weights, tol)
        min_slack = min(min_slack, rep.slack)
        if not rep.passed:
            failures.append(FuzzFailure(seed, i, "duality", rep.slack))
        for name, mi, ens in (
            ("holevo_phase", rep.phase_mi, phase_ensemble(s)),
            ("holevo_path", rep.path_mi, detector_ensemble(s)),
        ):
            margin = holevo_quantity(ens) - mi
            min_margin = min(min_margin, margin)
            if margin < -tol:
                failures.append(FuzzFailure(seed, i, name, margin))
    return FuzzReport(count, seed, tuple(dims), min_slack, min_margin, failures)
