"""Synthetic photon-count experiments with optional preparation and analysis errors.

Composition order for entangled-probe runs is fixed: probe state, preparation error
``epsilon_i`` (two-qubit), the process on the signal qubit, analysis error ``epsilon_f``
(two-qubit), then the Bell projectors. Each outcome count is an independent Poisson
draw with mean ``N p``; every configuration draws from its own generator derived from
``(seed, config_id)`` so results do not depend on evaluation order.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import dcqd, sqpt
from .channels import ChannelSpec, build_channel
from .quantum import I2, PAULIS, X, Y, Z, dag, dumps, kraus_sum, matrix_from_json, matrix_to_json

SCHEMA = "counts/v1"
SCHEMES = ("sqpt", "dcqd", "calibration")
_AXES = {"x": X, "y": Y, "z": Z}


class CountsFormatError(ValueError):
    """Malformed count-record file."""


class SchemaVersionError(ValueError):
    """Count-record file written for another schema version."""


def polarization_rotation(axis: str, degrees: float) -> np.ndarray:
    """``exp(-i theta sigma)``: rotates the polarization by ``theta`` (the Bloch vector by ``2 theta``)."""
    theta = math.radians(degrees)
    return math.cos(theta) * I2 - 1j * math.sin(theta) * _AXES[axis]


def on_slot(op: np.ndarray, slot: int) -> np.ndarray:
    """Place a single-qubit operator on slot 0 (idler) or 1 (signal)."""
    return np.kron(op, I2) if slot == 0 else np.kron(I2, op)


def local_depolarizing_kraus(p: float) -> list[np.ndarray]:
    """Isotropic depolarization of strength ``p`` applied independently to both qubits."""
    single = [math.sqrt(1 - 3 * p / 4) * I2] + [math.sqrt(p / 4) * s for s in PAULIS[1:]]
    return [np.kron(a, b) for a in single for b in single]


def compose(first: Sequence[np.ndarray], then: Sequence[np.ndarray]) -> list[np.ndarray]:
    return [b @ a for a in first for b in then]


@dataclass(frozen=True)
class ErrorModel:
    """Two-qubit Kraus lists for the preparation and analysis errors; ``None`` is identity."""

    epsilon_i: tuple[np.ndarray, ...] | None = None
    epsilon_f: tuple[np.ndarray, ...] | None = None
    description: str = ""

    def __post_init__(self):
        for name in ("epsilon_i", "epsilon_f"):
            ks = getattr(self, name)
            if ks is None:
                continue
            ks = np.asarray(ks, dtype=complex)
            if ks.ndim != 3 or ks.shape[1:] != (4, 4):
                raise ValueError(f"{name} must be a list of 4x4 Kraus operators")
            top = np.linalg.eigvalsh(kraus_sum(ks))[-1]
            if top > 1 + 1e-9:
                raise ValueError(f"{name} increases trace (largest eigenvalue of sum K^+K is {top:.6g})")

    @property
    def is_identity(self) -> bool:
        return self.epsilon_i is None and self.epsilon_f is None

    def prepare(self, rho: np.ndarray) -> np.ndarray:
        if self.epsilon_i is None:
            return rho
        return sum(k @ rho @ dag(k) for k in self.epsilon_i)

    def effect(self, e: np.ndarray) -> np.ndarray:
        """Heisenberg-picture image of an analyzer effect under ``epsilon_f``."""
        if self.epsilon_f is None:
            return e
        return sum(dag(k) @ e @ k for k in self.epsilon_f)

    def to_json(self) -> dict:
        def enc(ks):
            return None if ks is None else [matrix_to_json(k) for k in ks]

        return {"description": self.description, "epsilon_i": enc(self.epsilon_i), "epsilon_f": enc(self.epsilon_f)}

    @classmethod
    def from_json(cls, data: dict) -> "ErrorModel":
        def dec(ks):
            return None if ks is None else tuple(matrix_from_json(k) for k in ks)

        return cls(dec(data.get("epsilon_i")), dec(data.get("epsilon_f")), data.get("description", ""))


DEFAULT_PREP_ROTATION_DEG = 10.0
DEFAULT_ANALYSIS_ROTATION_DEG = 6.0
DEFAULT_ANALYSIS_DEPOLARIZATION = 0.12


def inject_default_systematics() -> ErrorModel:
    """Preset systematic errors used by the compensation benchmarks.

    Preparation: 10 degree polarization rotation about y on the signal photon. Analysis:
    6 degree rotation about x on the idler, then 12% depolarization of each photon.
    Uncompensated reconstruction of the identity then scores F_J near 0.89.
    """
    eps_i = (on_slot(polarization_rotation("y", DEFAULT_PREP_ROTATION_DEG), 1),)
    eps_f = tuple(
        compose(
            [on_slot(polarization_rotation("x", DEFAULT_ANALYSIS_ROTATION_DEG), 0)],
            local_depolarizing_kraus(DEFAULT_ANALYSIS_DEPOLARIZATION),
        )
    )
    return ErrorModel(
        eps_i,
        eps_f,
        "default: eps_i = 10 deg y on signal; eps_f = 6 deg x on idler + 12% local depolarization",
    )


@dataclass(frozen=True)
class RunSpec:
    channel: ChannelSpec
    scheme: str
    budget: int
    seed: int
    errors: ErrorModel = field(default_factory=ErrorModel)
    noiseless: bool = False

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if int(self.budget) < 1:
            raise ValueError(f"budget N must be >= 1, got {self.budget}")
        if self.scheme == "sqpt" and not self.errors.is_identity:
            raise ValueError("error models apply to dcqd and calibration runs only")

    def to_json(self) -> dict:
        return {
            "channel": self.channel.to_json(),
            "scheme": self.scheme,
            "budget": int(self.budget),
            "seed": int(self.seed),
            "noiseless": self.noiseless,
            "errors": self.errors.to_json(),
        }

    @classmethod
    def from_json(cls, data: dict) -> "RunSpec":
        return cls(
            ChannelSpec.from_json(data["channel"]),
            data["scheme"],
            int(data["budget"]),
            int(data["seed"]),
            ErrorModel.from_json(data.get("errors") or {}),
            bool(data.get("noiseless", False)),
        )


def config_rng(seed: int, config_id: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(int(config_id),)))


def _draw(spec: RunSpec, config_id: int, probs: np.ndarray) -> list:
    mean = spec.budget * np.clip(np.asarray(probs, dtype=float), 0.0, None)
    if spec.noiseless:
        counts = np.rint(mean)
    else:
        counts = config_rng(spec.seed, config_id).poisson(mean)
    return counts.astype(np.int64).tolist()


def true_dcqd_table(chi: np.ndarray, errors: ErrorModel) -> np.ndarray:
    inputs = [errors.prepare(i.state) for i in dcqd.dcqd_inputs()]
    effects = np.array([errors.effect(e) for e in dcqd.bell_projectors()])
    return dcqd.dcqd_forward(chi, inputs, effects)


def calibration_probabilities(config: dcqd.CalibrationConfig, errors: ErrorModel) -> np.ndarray:
    """Outcome probabilities of one calibration setting.

    Tomography uses ideal local analyzers on the prepared probe; analyzer settings send
    ideal product states through ``epsilon_f`` and the Bell projectors.
    """
    if config.kind == "qst":
        rho = errors.prepare(dcqd.dcqd_inputs()[dcqd.INPUT_LABELS.index(config.input_label)].state)
        return np.einsum("kab,ba->k", dcqd.local_effects(config.bases), rho).real
    effects = np.array([errors.effect(e) for e in dcqd.bell_projectors()])
    return np.einsum("bxy,syx->sb", effects, dcqd.probe_states(config.bases)).real


def simulate_run(spec: RunSpec) -> dict:
    """Count-record document for one simulated experiment."""
    chi, _ = build_channel(spec.channel)
    n = int(spec.budget)
    records: list[dict[str, Any]] = []
    if spec.scheme == "sqpt":
        plan = sqpt.sqpt_plan()
        table = sqpt.sqpt_forward(chi, plan)
        for cfg, p in zip(plan, table):
            records.append(
                {"config_id": cfg.config_id, "input": cfg.input_label, "basis": cfg.basis, "counts": _draw(spec, cfg.config_id, p), "budget": n}
            )
    elif spec.scheme == "dcqd":
        table = true_dcqd_table(chi, spec.errors)
        for cid, (inp, p) in enumerate(zip(dcqd.dcqd_inputs(), table)):
            counts = _draw(spec, cid, p)
            records.append(
                {"config_id": cid, "input_label": inp.label, "counts": dict(zip(dcqd.BELL_LABELS, counts)), "budget": n}
            )
    else:
        for cfg in dcqd.calibration_plan():
            p = calibration_probabilities(cfg, spec.errors)
            rec: dict[str, Any] = {"config_id": cfg.config_id, "kind": cfg.kind, "bases": list(cfg.bases)}
            if cfg.kind == "qst":
                rec["input_label"] = cfg.input_label
                rec["counts"] = _draw(spec, cfg.config_id, p)
            else:
                rec["counts"] = np.reshape(_draw(spec, cfg.config_id, p.ravel()), (4, 4)).tolist()
            rec["budget"] = n
            records.append(rec)
    return {"schema": SCHEMA, "spec": spec.to_json(), "records": records}


# -- persistence -----------------------------------------------------------------


def dump_counts(doc: dict) -> str:
    return dumps(doc)


def save_counts(path: str | Path, doc: dict) -> None:
    validate_counts(doc)
    Path(path).write_text(dump_counts(doc))


def _nonneg_int(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise CountsFormatError(f"{where}: count must be an integer, got {value!r}")
    if value < 0:
        raise CountsFormatError(f"{where}: negative count {value}")
    return value


def _check_counts(value, where: str) -> None:
    if isinstance(value, dict):
        for key in dcqd.BELL_LABELS:
            if key not in value:
                raise CountsFormatError(f"{where}: missing Bell outcome {key!r}")
            _nonneg_int(value[key], f"{where}.{key}")
    elif isinstance(value, list):
        for i, v in enumerate(value):
            _check_counts(v, f"{where}[{i}]") if isinstance(v, (list, dict)) else _nonneg_int(v, f"{where}[{i}]")
    else:
        raise CountsFormatError(f"{where}: counts must be a list or object")


def validate_counts(doc: dict, expected_schema: str = SCHEMA) -> dict:
    if not isinstance(doc, dict):
        raise CountsFormatError("top level must be an object")
    found = doc.get("schema")
    if found != expected_schema:
        raise SchemaVersionError(f"count file has schema {found!r} but this reader expects {expected_schema!r}")
    if "records" not in doc or not isinstance(doc["records"], list):
        raise CountsFormatError("missing 'records' list")
    for i, rec in enumerate(doc["records"]):
        where = f"records[{i}]"
        if not isinstance(rec, dict):
            raise CountsFormatError(f"{where}: record must be an object")
        for key in ("config_id", "counts", "budget"):
            if key not in rec:
                raise CountsFormatError(f"{where}: missing field {key!r}")
        _check_counts(rec["counts"], f"{where}.counts")
        budget = rec["budget"]
        if isinstance(budget, bool) or not isinstance(budget, int) or budget < 1:
            raise CountsFormatError(f"{where}.budget: must be a positive integer, got {budget!r}")
    return doc


def load_counts(path: str | Path, expected_schema: str = SCHEMA) -> dict:
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CountsFormatError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return validate_counts(doc, expected_schema)


def scheme_of(doc: dict) -> str:
    return doc.get("spec", {}).get("scheme", "")
