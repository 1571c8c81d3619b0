"""Ways/Phases duality game: scenarios, exact win probabilities, Monte Carlo.

A round goes as follows. The House picks Ways or Phases with probability
1/2 each and a phase ``k`` uniformly from ``Z_N``, then hands the path
factor of ``(U(a^k) (x) I)|Psi>`` to Alice and the detector factor to Bob.

* Phases: Alice measures ``alice_phase_povm`` on her reduced state and
  answers the set stored for her outcome; the round is won if ``k`` is in it.
* Ways: Alice measures the path basis and gets ``j``; Bob measures
  ``bob_povm`` on the conditional detector state and answers the set stored
  for his outcome; the round is won if ``j`` is in it.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DualGameError, ScenarioError
from .measure import (
    OutcomeLabel,
    Povm,
    anti_trine_povm,
    born_probabilities,
    computational_povm,
    inverse_cdf,
    projective_povm,
    seed_stream,
    six_pair_povm,
)
from .qcore import ProbDist, PureState
from .states import (
    DetectorFamily,
    PhaseGroup,
    fourier_basis,
    interferometer_state,
    reduced_path_state,
    simplex4_detectors,
    trine_detectors,
    two_pair_detectors,
)

MC_CHUNK = 1 << 15


class Subgame(str, Enum):
    WAYS = "Ways"
    PHASES = "Phases"


@dataclass(frozen=True)
class GameScenario:
    """Everything needed to play one duality game.

    ``ways_answers[y]`` is the path set Bob names after outcome ``y`` of
    ``bob_povm``; ``phases_answers[x]`` is the phase set Alice names after
    outcome ``x`` of ``alice_phase_povm``.
    """

    weights: ProbDist
    detectors: DetectorFamily
    bob_povm: Povm
    alice_phase_povm: Povm
    ways_answers: tuple[frozenset[int], ...]
    phases_answers: tuple[frozenset[int], ...]
    ways_answer_size: int
    phases_answer_size: int
    name: str = "custom"

    def __post_init__(self):
        object.__setattr__(self, "ways_answers", tuple(frozenset(int(i) for i in a) for a in self.ways_answers))
        object.__setattr__(self, "phases_answers", tuple(frozenset(int(i) for i in a) for a in self.phases_answers))
        N = len(self.weights)
        if self.detectors.n_states != N:
            raise ScenarioError(f"{self.detectors.n_states} detector states for {N} paths")
        if self.bob_povm.dim != self.detectors.detector_dim:
            raise ScenarioError(
                f"Bob's POVM acts on dimension {self.bob_povm.dim}, detectors have {self.detectors.detector_dim}"
            )
        if self.alice_phase_povm.dim != N:
            raise ScenarioError(f"Alice's phase POVM acts on dimension {self.alice_phase_povm.dim}, expected {N}")
        for which, answers, povm, size in (
            ("ways", self.ways_answers, self.bob_povm, self.ways_answer_size),
            ("phases", self.phases_answers, self.alice_phase_povm, self.phases_answer_size),
        ):
            if len(answers) != len(povm):
                raise ScenarioError(f"{which} answer map has {len(answers)} entries for {len(povm)} outcomes")
            for y, a in enumerate(answers):
                if len(a) != size:
                    raise ScenarioError(f"{which} answer {y} has size {len(a)}, declared {size}")
                if any(not 0 <= i < N for i in a):
                    raise ScenarioError(f"{which} answer {y} has index outside 0..{N - 1}")

    @property
    def N(self) -> int:
        return len(self.weights)

    @property
    def group(self) -> PhaseGroup:
        return PhaseGroup(self.N)

    @cached_property
    def state(self) -> PureState:
        return interferometer_state(self.weights, self.detectors)

    @cached_property
    def phase_table(self) -> np.ndarray:
        """``[k, x]`` = probability Alice gets outcome x given phase k."""
        return np.array([
            born_probabilities(reduced_path_state(self.state, k, self.group), self.alice_phase_povm)
            for k in range(self.N)
        ])

    @cached_property
    def path_table(self) -> np.ndarray:
        """``[k, j]`` = probability Alice's path measurement gives j given phase k."""
        amps = self._phased_amplitudes()
        return np.sum(np.abs(amps) ** 2, axis=2)

    @cached_property
    def bob_table(self) -> np.ndarray:
        """``[k, j, y]`` = probability Bob gets y given phase k and Alice's path j."""
        amps = self._phased_amplitudes()
        out = np.empty((self.N, self.N, len(self.bob_povm)))
        for k in range(self.N):
            for j in range(self.N):
                v = amps[k, j]
                norm = np.linalg.norm(v)
                cond = PureState(v / norm) if norm > 0 else self.detectors[j]
                out[k, j] = born_probabilities(cond, self.bob_povm)
        return out

    def _phased_amplitudes(self) -> np.ndarray:
        d = self.detectors.detector_dim
        psi = self.state.amplitudes.reshape(self.N, d)
        return np.array([np.diag(self.group.unitary(k))[:, None] * psi for k in range(self.N)])

    @cached_property
    def ways_win(self) -> np.ndarray:
        """``[j, y]`` = path j lies in Bob's answer for outcome y."""
        return np.array([[j in a for a in self.ways_answers] for j in range(self.N)])

    @cached_property
    def phases_win(self) -> np.ndarray:
        return np.array([[k in a for a in self.phases_answers] for k in range(self.N)])


@dataclass(frozen=True)
class RoundResult:
    subgame: Subgame
    hidden: int
    answer: frozenset[int]
    win: bool
    outcome: OutcomeLabel | None = None


class WinProbabilities(NamedTuple):
    p_ways: float
    p_phases: float
    p_overall: float


class MonteCarloResult(NamedTuple):
    rate: float
    stderr: float


def play_rounds(s: GameScenario, n: int, rng: np.random.Generator) -> dict[str, np.ndarray]:
    """Play ``n`` independent rounds; returns per-round arrays.

    Keys: ``ways`` (bool), ``phase`` (House's k), ``hidden``, ``outcome``
    (index into the measuring player's POVM) and ``win``.
    """
    N = s.N
    ways = rng.random(n) < 0.5
    k = rng.integers(0, N, size=n)
    u_alice = rng.random(n)
    u_bob = rng.random(n)

    x = inverse_cdf(s.phase_table[k], u_alice)
    j = inverse_cdf(s.path_table[k], u_alice)
    y = inverse_cdf(s.bob_table[k, j], u_bob)

    hidden = np.where(ways, j, k)
    outcome = np.where(ways, y, x)
    win = np.where(ways, s.ways_win[j, y], s.phases_win[k, x])
    return {"ways": ways, "phase": k, "hidden": hidden, "outcome": outcome, "win": win}


def play_round(s: GameScenario, rng: np.random.Generator) -> RoundResult:
    r = play_rounds(s, 1, rng)
    ways = bool(r["ways"][0])
    o = int(r["outcome"][0])
    if ways:
        answer, label = s.ways_answers[o], s.bob_povm.labels[o]
    else:
        answer, label = s.phases_answers[o], s.alice_phase_povm.labels[o]
    return RoundResult(
        subgame=Subgame.WAYS if ways else Subgame.PHASES,
        hidden=int(r["hidden"][0]),
        answer=answer,
        win=bool(r["win"][0]),
        outcome=label,
    )


def exact_win_probability(s: GameScenario) -> WinProbabilities:
    p_ways = float(np.sum(s.path_table[:, :, None] * s.bob_table * s.ways_win[None]) / s.N)
    p_phases = float(np.sum(s.phase_table * s.phases_win) / s.N)
    return WinProbabilities(p_ways, p_phases, 0.5 * (p_ways + p_phases))


def original_game_bound(N: int) -> float:
    """Upper bound on the win probability of the exact-answer game."""
    if N < 1:
        raise DualGameError(f"N must be positive, got {N}")
    return 0.5 + 0.5 / math.sqrt(N)


def monte_carlo_win_rate(
    s: GameScenario, trials: int, seed: int, workers: int = 1, chunk: int = MC_CHUNK
) -> MonteCarloResult:
    """Win rate over ``trials`` seeded rounds with its binomial standard error.

    Rounds are split into fixed-size chunks, chunk ``i`` drawing from stream
    ``(seed, i)``, so the result does not depend on ``workers``.
    """
    if trials < 1:
        raise DualGameError(f"trials must be at least 1, got {trials}")
    sizes = [min(chunk, trials - start) for start in range(0, trials, chunk)]

    def run(i: int) -> int:
        return int(np.count_nonzero(play_rounds(s, sizes[i], seed_stream(seed, i))["win"]))

    # warm cached tables before any threads touch them
    exact_win_probability(s)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            wins = sum(pool.map(run, range(len(sizes))))
    else:
        wins = sum(map(run, range(len(sizes))))
    rate = wins / trials
    return MonteCarloResult(rate, math.sqrt(rate * (1 - rate) / trials))


def complement_answers(N: int, excluded: Sequence[int]) -> tuple[frozenset[int], ...]:
    """Answer map naming everything except the index each outcome rules out."""
    full = frozenset(range(N))
    return tuple(full - {e} for e in excluded)


def trine3() -> GameScenario:
    """Three paths, trine detectors; both players eliminate one of three."""
    return GameScenario(
        weights=ProbDist.uniform(3),
        detectors=trine_detectors(),
        bob_povm=anti_trine_povm(),
        alice_phase_povm=projective_povm(fourier_basis(3, +1)),
        ways_answers=complement_answers(3, range(3)),
        phases_answers=complement_answers(3, range(3)),
        ways_answer_size=2,
        phases_answer_size=2,
        name="trine3",
    )


def sixpair4() -> GameScenario:
    """Four paths, simplex detectors; Bob names a pair, Alice names three phases."""
    bob = six_pair_povm()
    return GameScenario(
        weights=ProbDist.uniform(4),
        detectors=simplex4_detectors(),
        bob_povm=bob,
        alice_phase_povm=projective_povm(fourier_basis(4, +1)),
        ways_answers=tuple(frozenset(lab.indices) for lab in bob.labels),
        phases_answers=complement_answers(4, range(4)),
        ways_answer_size=2,
        phases_answer_size=3,
        name="sixpair4",
    )


def twopair4() -> GameScenario:
    """Four paths split into pairs {1,3} and {0,2}; saturates the duality relation."""
    return GameScenario(
        weights=ProbDist.uniform(4),
        detectors=two_pair_detectors(),
        bob_povm=computational_povm(2),
        alice_phase_povm=projective_povm(fourier_basis(4, +1)),
        ways_answers=(frozenset({1, 3}), frozenset({0, 2})),
        phases_answers=tuple(frozenset({x % 2, x % 2 + 2}) for x in range(4)),
        ways_answer_size=2,
        phases_answer_size=2,
        name="twopair4",
    )


PRESETS = {"trine3": trine3, "sixpair4": sixpair4, "twopair4": twopair4}
