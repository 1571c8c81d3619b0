"""JSON scenario files.

A file is either ``{"schema_version": 1, "preset": "trine3"}`` or a full
description::

    {
      "schema_version": 1,
      "name": "my-game",
      "N": 3,
      "weights": [0.333..., ...],
      "detectors": [[[re, im], ...], ...],          # one vector per path
      "bob_povm": {"labels": [...], "elements": [matrix, ...]},
      "alice_phase_povm": {"labels": [...], "elements": [matrix, ...]},
      "ways_answers": [[1, 2], ...],                # one set per Bob outcome
      "phases_answers": [[1, 2], ...],              # one set per Alice outcome
      "ways_answer_size": 2,
      "phases_answer_size": 2
    }

Complex numbers are ``[re, im]`` pairs; a matrix is a list of rows. A label
is ``{"kind": "single"|"pair"|"set", "indices": [...]}``.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Any

import numpy as np

from .errors import DualGameError
from .game import PRESETS, GameScenario
from .measure import OutcomeLabel, Povm
from .qcore import ProbDist, PureState
from .states import DetectorFamily

SCHEMA_VERSION = 1


class ScenarioFileError(DualGameError):
    """Scenario file could not be parsed; ``field`` locates the problem."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


def _get(doc: dict, key: str, path: str = "") -> Any:
    where = f"{path}.{key}" if path else key
    if not isinstance(doc, dict) or key not in doc:
        raise ScenarioFileError(where, "missing field")
    return doc[key]


def _number(v, where: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ScenarioFileError(where, f"expected a number, got {v!r}")
    return float(v)


def _int(v, where: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise ScenarioFileError(where, f"expected an integer, got {v!r}")
    return v


def _list(v, where: str) -> list:
    if not isinstance(v, list):
        raise ScenarioFileError(where, f"expected a list, got {type(v).__name__}")
    return v


def _complex(v, where: str) -> complex:
    v = _list(v, where)
    if len(v) != 2:
        raise ScenarioFileError(where, "complex numbers are [re, im] pairs")
    return complex(_number(v[0], f"{where}[0]"), _number(v[1], f"{where}[1]"))


def _vector(v, where: str) -> np.ndarray:
    return np.array([_complex(z, f"{where}[{i}]") for i, z in enumerate(_list(v, where))], dtype=complex)


def _matrix(v, where: str) -> np.ndarray:
    rows = [_vector(r, f"{where}[{i}]") for i, r in enumerate(_list(v, where))]
    if not rows or len({r.size for r in rows}) != 1:
        raise ScenarioFileError(where, "matrix rows must be non-empty and of equal length")
    return np.array(rows)


def _label(v, where: str) -> OutcomeLabel:
    if isinstance(v, int) and not isinstance(v, bool):
        return OutcomeLabel.single(v)
    kind = _get(v, "kind", where)
    indices = [_int(i, f"{where}.indices[{n}]") for n, i in enumerate(_list(_get(v, "indices", where), f"{where}.indices"))]
    try:
        return OutcomeLabel(kind, tuple(indices))
    except DualGameError as exc:
        raise ScenarioFileError(where, str(exc)) from exc


def _povm(doc, where: str) -> Povm:
    elems = _list(_get(doc, "elements", where), f"{where}.elements")
    mats = [_matrix(m, f"{where}.elements[{i}]") for i, m in enumerate(elems)]
    if "labels" in doc:
        raw = _list(doc["labels"], f"{where}.labels")
        labels = [_label(lab, f"{where}.labels[{i}]") for i, lab in enumerate(raw)]
        if len(labels) != len(mats):
            raise ScenarioFileError(f"{where}.labels", f"{len(labels)} labels for {len(mats)} elements")
    else:
        labels = [OutcomeLabel.single(i) for i in range(len(mats))]
    try:
        return Povm(zip(labels, mats))
    except DualGameError as exc:
        raise ScenarioFileError(where, str(exc)) from exc


def _answers(v, where: str) -> tuple[frozenset[int], ...]:
    out = []
    for i, a in enumerate(_list(v, where)):
        idx = [_int(x, f"{where}[{i}][{n}]") for n, x in enumerate(_list(a, f"{where}[{i}]"))]
        if len(set(idx)) != len(idx):
            raise ScenarioFileError(f"{where}[{i}]", "answer set has repeated indices")
        out.append(frozenset(idx))
    return tuple(out)


def scenario_from_dict(doc: Any) -> GameScenario:
    if not isinstance(doc, dict):
        raise ScenarioFileError("<root>", "scenario must be a JSON object")
    version = _int(_get(doc, "schema_version"), "schema_version")
    if version != SCHEMA_VERSION:
        raise ScenarioFileError("schema_version", f"unsupported version {version}")
    if "preset" in doc:
        name = doc["preset"]
        if name not in PRESETS:
            raise ScenarioFileError("preset", f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
        return PRESETS[name]()

    N = _int(_get(doc, "N"), "N")
    raw_w = _list(_get(doc, "weights"), "weights")
    weights = [_number(w, f"weights[{i}]") for i, w in enumerate(raw_w)]
    if len(weights) != N:
        raise ScenarioFileError("weights", f"{len(weights)} weights for N = {N}")
    try:
        weights = ProbDist(weights)
    except DualGameError as exc:
        raise ScenarioFileError("weights", str(exc)) from exc

    raw_d = _list(_get(doc, "detectors"), "detectors")
    vecs = [_vector(v, f"detectors[{i}]") for i, v in enumerate(raw_d)]
    try:
        detectors = DetectorFamily([PureState(v) for v in vecs])
    except DualGameError as exc:
        raise ScenarioFileError("detectors", str(exc)) from exc

    fields = dict(
        weights=weights,
        detectors=detectors,
        bob_povm=_povm(_get(doc, "bob_povm"), "bob_povm"),
        alice_phase_povm=_povm(_get(doc, "alice_phase_povm"), "alice_phase_povm"),
        ways_answers=_answers(_get(doc, "ways_answers"), "ways_answers"),
        phases_answers=_answers(_get(doc, "phases_answers"), "phases_answers"),
        ways_answer_size=_int(_get(doc, "ways_answer_size"), "ways_answer_size"),
        phases_answer_size=_int(_get(doc, "phases_answer_size"), "phases_answer_size"),
        name=str(doc.get("name", "custom")),
    )
    try:
        s = GameScenario(**fields)
        s.state  # applies the dimension cap
    except DualGameError as exc:
        raise ScenarioFileError("<scenario>", str(exc)) from exc
    return s


def load_scenario(path: str | Path) -> GameScenario:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ScenarioFileError("<file>", f"cannot read {path}: {exc.strerror}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioFileError(f"line {exc.lineno} column {exc.colno}", exc.msg) from exc
    return scenario_from_dict(doc)


def _pair(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def _mat_to_list(m: np.ndarray) -> list:
    return [[_pair(z) for z in row] for row in m]


def _label_to_dict(label: OutcomeLabel) -> dict:
    return {"kind": label.kind, "indices": list(label.indices)}


def _povm_to_dict(p: Povm) -> dict:
    return {
        "labels": [_label_to_dict(lab) for lab in p.labels],
        "elements": [_mat_to_list(op) for op in p.operators],
    }


def scenario_to_dict(s: GameScenario) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "name": s.name,
        "N": s.N,
        "weights": [float(p) for p in s.weights.probabilities],
        "detectors": [[_pair(z) for z in eta.amplitudes] for eta in s.detectors.states],
        "bob_povm": _povm_to_dict(s.bob_povm),
        "alice_phase_povm": _povm_to_dict(s.alice_phase_povm),
        "ways_answers": [sorted(a) for a in s.ways_answers],
        "phases_answers": [sorted(a) for a in s.phases_answers],
        "ways_answer_size": s.ways_answer_size,
        "phases_answer_size": s.phases_answer_size,
    }


def dump_scenario(s: GameScenario, path: str | Path) -> None:
    Path(path).write_text(json.dumps(scenario_to_dict(s), indent=2) + "\n")


def scenario_digest(s: GameScenario) -> str:
    canonical = json.dumps(scenario_to_dict(s), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()
