"""Direct characterization with entangled probes and a full Bell-state analysis.

The idler photon occupies the first tensor slot and the signal photon, which passes
through the process, the second. Bell outcomes are ordered ``(Phi+, Phi-, Psi+, Psi-)``
and keyed ``phi_plus, phi_minus, psi_plus, psi_minus`` in count records.
"""
from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .quantum import (
    PSD_TOL,
    chi_design,
    dag,
    design_probabilities,
    hermitian_eigvalsh,
    ket,
    matrix_to_json,
    matrix_from_json,
    projector,
    validate_density_matrix,
)
from .sqpt import BASES

BELL_LABELS = ("phi_plus", "phi_minus", "psi_plus", "psi_minus")
BELL_SYMBOLS = {"phi_plus": "Phi+", "phi_minus": "Phi-", "psi_plus": "Psi+", "psi_minus": "Psi-"}
INPUT_LABELS = ("BELL", "HV", "DA", "LR")
HYBRID_LABELS = ("phi+", "phi-", "psi+", "psi-")

# counts of experimental configurations, for the documentation ledger
CONFIG_COUNTS = {
    "sqpt": 18,
    "sqpt_minimal": 12,
    "dcqd": 4,
    "calibration": 45,
    "calibration_qst": 36,
    "calibration_probe": 9,
    "two_qubit_error_map_qpt": 288,
    "sqpt_error_characterization": 24,
    "aapt_min": 54,
    "aapt_max": 288,
}


class ExtractionUndefinedError(ValueError):
    """The relaxation ratio has no finite value for the supplied data."""


class CalibrationQualityWarning(UserWarning):
    pass


class DataQualityWarning(UserWarning):
    pass


def _k2(a: str, b: str) -> np.ndarray:
    return np.kron(ket(a), ket(b))


def bell_states() -> dict[str, np.ndarray]:
    s = 1 / math.sqrt(2)
    return {
        "phi_plus": s * (_k2("H", "H") + _k2("V", "V")),
        "phi_minus": s * (_k2("H", "H") - _k2("V", "V")),
        "psi_plus": s * (_k2("H", "V") + _k2("V", "H")),
        "psi_minus": s * (_k2("H", "V") - _k2("V", "H")),
    }


def bell_projectors() -> np.ndarray:
    return np.array([projector(v) for v in bell_states().values()])


@dataclass(frozen=True)
class DcqdInput:
    label: str
    state: np.ndarray


def dcqd_inputs() -> list[DcqdInput]:
    """The four probe states: ``Phi-`` and three partially entangled states.

    Partial states are ``cos(pi/8)|aa> - i sin(pi/8)|bb>`` for ``(a, b)`` in
    ``(H, V), (D, A), (L, R)``.
    """
    c, s = math.cos(math.pi / 8), math.sin(math.pi / 8)
    states = [bell_states()["phi_minus"]]
    for a, b in ("HV", "DA", "LR"):
        states.append(c * _k2(a, a) - 1j * s * _k2(b, b))
    return [DcqdInput(label, projector(v)) for label, v in zip(INPUT_LABELS, states)]


def dcqd_design(inputs: Sequence[np.ndarray] | None = None, effects: np.ndarray | None = None) -> np.ndarray:
    """Design tensor with four rows (Bell outcomes) per input, inputs varying slowest.

    ``inputs`` and ``effects`` default to the ideal probes and Bell projectors; calibrated
    values substitute here to compensate preparation and analysis errors.
    """
    inputs = [i.state for i in dcqd_inputs()] if inputs is None else list(inputs)
    effects = bell_projectors() if effects is None else np.asarray(effects)
    rhos = np.array([r for r in inputs for _ in effects])
    return chi_design(rhos, np.array([e for _ in inputs for e in effects]))


def dcqd_probabilities(chi: np.ndarray, inp: DcqdInput) -> np.ndarray:
    return design_probabilities(dcqd_design([inp.state]), chi)


def dcqd_forward(chi: np.ndarray, inputs=None, effects=None) -> np.ndarray:
    """Probability table of shape ``(n_inputs, 4)``."""
    p = design_probabilities(dcqd_design(inputs, effects), chi)
    return p.reshape(-1, 4)


# -- single-setting diagnostics -------------------------------------------------


def bell_outcome_to_chi_diag(probs: Sequence[float]) -> tuple[float, float, float, float]:
    """Diagonal of ``chi`` read off the Bell-input outcome distribution.

    ``(I (x) sigma_m)|Phi->`` is ``Phi-, Psi-, Psi+, Phi+`` (up to phase) for m = 0..3,
    so each Bell outcome probability is one diagonal element.
    """
    p = np.asarray(probs, dtype=float)
    if p.shape != (4,):
        raise ValueError(f"expected 4 Bell probabilities, got shape {p.shape}")
    total = p.sum()
    if abs(total - 1) > 1e-6:
        warnings.warn(
            f"Bell probabilities sum to {total:.8g}, not 1: non-trace-preserving or miscalibrated data",
            DataQualityWarning,
            stacklevel=2,
        )
    phi_p, phi_m, psi_p, psi_m = p
    return float(phi_m), float(psi_m), float(psi_p), float(phi_p)


def relaxation_multipliers_from_probs(probs: Sequence[float]) -> tuple[float, float]:
    c0, c1, c2, c3 = bell_outcome_to_chi_diag(probs)
    return c0 + c3 - c1 - c2, c0 - c3


def extract_relaxation_ratio(probs: Sequence[float]) -> float:
    """``T2/T1 = ln(alpha)/ln(beta)`` from a single Bell-input setting."""
    alpha, beta = relaxation_multipliers_from_probs(probs)
    if not (0 < alpha < 1 and 0 < beta < 1):
        raise ExtractionUndefinedError(
            f"relaxation ratio undefined: alpha={alpha:.6g}, beta={beta:.6g} must both lie in (0, 1)"
        )
    return math.log(alpha) / math.log(beta)


def counts_to_probs(counts: Mapping[str, float]) -> np.ndarray:
    n = np.array([counts[k] for k in BELL_LABELS], dtype=float)
    if n.sum() <= 0:
        raise ExtractionUndefinedError("no detected coincidences")
    return n / n.sum()


# -- hyperentangled Bell-state analysis ----------------------------------------
# single-photon space is polarization (x) OAM, OAM basis index 0 = counter-clockwise, 1 = clockwise


def hybrid_bell_states() -> dict[str, np.ndarray]:
    s = 1 / math.sqrt(2)
    e = np.eye(4, dtype=complex)
    h_ccw, h_cw, v_ccw, v_cw = e
    return {
        "phi+": s * (h_cw + v_ccw),
        "phi-": s * (h_cw - v_ccw),
        "psi+": s * (h_ccw + v_cw),
        "psi-": s * (h_ccw - v_cw),
    }


def hyperentangled_state(bell: str) -> np.ndarray:
    """Polarization Bell state times the orbital ``Psi+``, ordered photon1 (pol, OAM), photon2 (pol, OAM)."""
    spin = bell_states()[bell]
    orbit = bell_states()["psi_plus"]
    full = np.kron(spin, orbit).reshape(2, 2, 2, 2)  # (p1, p2, o1, o2)
    return full.transpose(0, 2, 1, 3).reshape(16)


def hyper_bsa_table() -> dict[str, dict[tuple[str, str], float]]:
    """Coincidence probabilities over all 16 hybrid-state pairs for each Bell label."""
    hyb = hybrid_bell_states()
    table = {}
    for bell in BELL_LABELS:
        state = hyperentangled_state(bell)
        table[bell] = {
            (a, b): float(abs(np.vdot(np.kron(hyb[a], hyb[b]), state)) ** 2)
            for a, b in itertools.product(HYBRID_LABELS, repeat=2)
        }
    return table


def hyper_bsa_decompose(bell: str) -> dict[tuple[str, str], float]:
    if bell not in BELL_LABELS:
        raise ValueError(f"unknown Bell label {bell!r}")
    return {pair: p for pair, p in hyper_bsa_table()[bell].items() if p > 1e-12}


def bsa_classify(pair: tuple[str, str]) -> str:
    pair = tuple(pair)
    for bell, dist in hyper_bsa_table().items():
        if dist[pair] > 1e-12:
            return bell
    raise ValueError(f"unknown hybrid pair {pair!r}")


# -- calibration ---------------------------------------------------------------


@dataclass(frozen=True)
class CalibrationConfig:
    config_id: int
    kind: str  # "qst" or "probe"
    bases: tuple[str, str]
    input_label: str | None = None


def calibration_plan() -> list[CalibrationConfig]:
    """36 two-qubit tomography settings (9 per probe) and 9 analyzer characterization settings."""
    pairs = list(itertools.product(BASES, repeat=2))
    plan = [
        CalibrationConfig(len(pairs) * i + j, "qst", pair, label)
        for i, label in enumerate(INPUT_LABELS)
        for j, pair in enumerate(pairs)
    ]
    plan += [CalibrationConfig(len(plan) + j, "probe", pair) for j, pair in enumerate(pairs)]
    return plan


def local_effects(bases: tuple[str, str]) -> np.ndarray:
    """Product projectors for a basis pair, outcomes ordered (++, +-, -+, --)."""
    b1, b2 = BASES[bases[0]], BASES[bases[1]]
    return np.array([np.kron(projector(ket(a)), projector(ket(b))) for a in b1 for b in b2])


def probe_states(bases: tuple[str, str]) -> np.ndarray:
    """The four product eigenstates prepared in one analyzer characterization setting."""
    return local_effects(bases)


@dataclass(frozen=True)
class CalibrationData:
    inputs: np.ndarray  # (4, 4, 4) characterized probe states
    measurement: np.ndarray  # (4, 4, 4) characterized Bell-analyzer effects

    def __post_init__(self):
        if np.shape(self.inputs) != (4, 4, 4) or np.shape(self.measurement) != (4, 4, 4):
            raise ValueError("calibration needs four 4x4 input states and four 4x4 effects")
        for rho in self.inputs:
            validate_density_matrix(rho, 4)
            if abs(np.trace(rho).real - 1) > 1e-9:
                raise ValueError("calibrated input states must have unit trace")
        for e in self.measurement:
            if hermitian_eigvalsh(e)[-1] < -PSD_TOL:
                raise ValueError("calibrated effect is not PSD")
        if hermitian_eigvalsh(np.eye(4) - self.measurement.sum(axis=0))[-1] < -PSD_TOL:
            raise ValueError("calibrated effects sum to more than the identity")

    def to_json(self) -> dict:
        return {
            "schema": "calibration/v1",
            "inputs": {lab: matrix_to_json(r) for lab, r in zip(INPUT_LABELS, self.inputs)},
            "measurement": {lab: matrix_to_json(e) for lab, e in zip(BELL_LABELS, self.measurement)},
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "CalibrationData":
        if data.get("schema") != "calibration/v1":
            raise ValueError(f"unsupported calibration schema {data.get('schema')!r}, expected 'calibration/v1'")
        inputs = np.array([matrix_from_json(data["inputs"][lab]) for lab in INPUT_LABELS])
        meas = np.array([matrix_from_json(data["measurement"][lab]) for lab in BELL_LABELS])
        return cls(inputs, meas)


def ideal_calibration() -> CalibrationData:
    return CalibrationData(np.array([i.state for i in dcqd_inputs()]), bell_projectors())


def _hermitian_basis(dim: int) -> np.ndarray:
    basis = []
    for a in range(dim):
        for b in range(a, dim):
            m = np.zeros((dim, dim), dtype=complex)
            if a == b:
                m[a, a] = 1
                basis.append(m)
            else:
                m[a, b] = m[b, a] = 1
                basis.append(m.copy())
                m[a, b], m[b, a] = -1j, 1j
                basis.append(m)
    return np.array(basis)


def invert_effects(probes: np.ndarray, freqs: np.ndarray) -> tuple[np.ndarray, float]:
    """Least-squares effects ``E_b`` from ``freqs[s, b] = Tr(E_b probe_s)``, projected onto valid POVMs.

    Returns the effects and the largest operator-norm shift introduced by the projection.
    """
    basis = _hermitian_basis(4)
    a = np.einsum("jab,sba->sj", basis, probes).real
    coef, *_ = np.linalg.lstsq(a, freqs, rcond=None)
    raw = np.einsum("jb,jxy->bxy", coef, basis)
    projected = []
    for e in raw:
        w, v = np.linalg.eigh((e + dag(e)) / 2)
        projected.append((v * np.clip(w, 0, None)) @ dag(v))
    projected = np.array(projected)
    top = hermitian_eigvalsh(projected.sum(axis=0))[0]
    if top > 1:
        projected /= top
    shift = max(float(np.max(np.abs(np.linalg.eigvalsh(r - p)))) for r, p in zip(raw, projected))
    return projected, shift


def characterize_from_calibration(records: Sequence[Mapping], options=None) -> CalibrationData:
    """Calibration data from the 45 calibration count records.

    Probe states come from maximum-likelihood tomography on their 9 local-basis settings;
    analyzer effects come from linear inversion over the 36 product probes.
    """
    from .estimation import mle_qst

    qst = {label: ([], [], []) for label in INPUT_LABELS}
    probes, freqs = [], []
    for rec in records:
        bases = tuple(rec["bases"])
        if rec["kind"] == "qst":
            effects, counts, budgets = qst[rec["input_label"]]
            effects.extend(local_effects(bases))
            counts.extend(rec["counts"])
            budgets.extend([rec["budget"]] * 4)
        elif rec["kind"] == "probe":
            probes.extend(probe_states(bases))
            freqs.extend(np.asarray(rec["counts"], dtype=float) / rec["budget"])
        else:
            raise ValueError(f"record {rec.get('config_id')}: unknown calibration kind {rec['kind']!r}")
    inputs = []
    for label in INPUT_LABELS:
        effects, counts, budgets = qst[label]
        if not effects:
            raise ValueError(f"no tomography records for input {label}")
        inputs.append(mle_qst(np.array(effects), np.array(counts, float), np.array(budgets, float), options).state)
    if not probes:
        raise ValueError("no analyzer characterization records")
    meas, shift = invert_effects(np.array(probes), np.array(freqs))
    if shift > 0.05:
        warnings.warn(f"analyzer PSD projection moved an effect by {shift:.3g} > 0.05", CalibrationQualityWarning, stacklevel=2)
    return CalibrationData(np.array(inputs), meas)


def records_to_arrays(records: Sequence[Mapping]) -> tuple[list[str], np.ndarray, np.ndarray]:
    """Input labels, flattened counts and per-outcome budgets from DCQD count records."""
    labels, counts, budgets = [], [], []
    for rec in records:
        label = rec["input_label"]
        if label not in INPUT_LABELS:
            raise ValueError(f"record {rec.get('config_id')}: unknown input label {label!r}")
        labels.append(label)
        counts.extend(float(rec["counts"][k]) for k in BELL_LABELS)
        budgets.extend([float(rec["budget"])] * 4)
    return labels, np.array(counts), np.array(budgets)


def design_for(labels: Sequence[str], calibration: CalibrationData | None = None) -> np.ndarray:
    cal = ideal_calibration() if calibration is None else calibration
    states = [cal.inputs[INPUT_LABELS.index(lab)] for lab in labels]
    return dcqd_design(states, cal.measurement)
