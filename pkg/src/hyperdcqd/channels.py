"""Constructors for the single-qubit polarization processes used in the comparison suite.

Every constructor returns ``(chi, kraus)``; the Kraus list is built independently and
serves as a cross-check of the process matrix.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np

from .quantum import I2, PAULIS, X, Y, Z, kraus_to_chi, projector, ket, ptm_to_chi

KINDS = (
    "identity",
    "pauli_rotation",
    "partial_dephasing",
    "partial_polarizer",
    "depolarizing",
    "relaxation",
    "mixture",
)

_AXES = {"x": X, "y": Y, "z": Z}


class ChannelSpecError(ValueError):
    """Invalid channel kind or parameter."""


@dataclass(frozen=True)
class ChannelSpec:
    kind: str
    params: Mapping[str, Any] = field(default_factory=dict)
    components: tuple["ChannelSpec", ...] = ()

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind, "params": dict(self.params)}
        if self.components:
            out["components"] = [c.to_json() for c in self.components]
        return out

    @classmethod
    def from_json(cls, data: Mapping) -> "ChannelSpec":
        if not isinstance(data, Mapping) or "kind" not in data:
            raise ChannelSpecError("channel spec must be an object with a 'kind' field")
        params = data.get("params", {})
        if not isinstance(params, Mapping):
            raise ChannelSpecError("channel spec 'params' must be an object")
        comps = tuple(cls.from_json(c) for c in data.get("components", ()))
        spec = cls(str(data["kind"]), dict(params), comps)
        validate_spec(spec)
        return spec


def _prob(spec: ChannelSpec, name: str, default=None) -> float:
    val = spec.params.get(name, default)
    if val is None:
        raise ChannelSpecError(f"{spec.kind}: missing parameter {name!r}")
    val = float(val)
    if not 0.0 <= val <= 1.0:
        raise ChannelSpecError(f"{spec.kind}: parameter {name!r}={val} outside [0, 1]")
    return val


def relaxation_multipliers(spec: ChannelSpec) -> tuple[float, float]:
    """Longitudinal and transverse Bloch multipliers ``(alpha, beta)`` of a relaxation spec."""
    try:
        t = float(spec.params["t"])
        t1 = float(spec.params["T1"])
        t2 = float(spec.params["T2"])
    except KeyError as exc:
        raise ChannelSpecError(f"relaxation: missing parameter {exc.args[0]!r}") from None
    if t < 0:
        raise ChannelSpecError(f"relaxation: parameter 't'={t} must be non-negative")
    for name, val in (("T1", t1), ("T2", t2)):
        if not val > 0:
            raise ChannelSpecError(f"relaxation: parameter {name!r}={val} must be positive")
    alpha, beta = math.exp(-t / t1), math.exp(-t / t2)
    if beta * beta > alpha + 1e-12:
        raise ChannelSpecError(
            f"relaxation: T1={t1}, T2={t2} violates complete positivity (beta^2={beta * beta:.6g} > alpha={alpha:.6g})"
        )
    return alpha, beta


def validate_spec(spec: ChannelSpec) -> None:
    build_channel(spec)


def amplitude_damping_kraus(gamma: float) -> list[np.ndarray]:
    """Decay ``|V> -> |H>`` with probability ``gamma``."""
    return [
        np.array([[1, 0], [0, math.sqrt(1 - gamma)]], dtype=complex),
        np.array([[0, math.sqrt(gamma)], [0, 0]], dtype=complex),
    ]


def phase_damping_kraus(coherence: float) -> list[np.ndarray]:
    """Shrink the transverse Bloch components by ``coherence`` in [0, 1]."""
    return [math.sqrt((1 + coherence) / 2) * I2, math.sqrt((1 - coherence) / 2) * Z]


def relaxation_chi(alpha: float, beta: float) -> np.ndarray:
    """Process matrix of ``x -> beta x, y -> beta y, z -> alpha z + 1 - alpha``."""
    ptm = np.diag([1.0, beta, beta, alpha]).astype(complex)
    ptm[3, 0] = 1 - alpha
    return ptm_to_chi(ptm)


def build_channel(spec: ChannelSpec) -> tuple[np.ndarray, list[np.ndarray]]:
    kind = spec.kind
    if kind == "identity":
        return np.diag([1, 0, 0, 0]).astype(complex), [I2.copy()]
    if kind == "pauli_rotation":
        axis = str(spec.params.get("axis", "z")).lower()
        if axis not in _AXES:
            raise ChannelSpecError(f"pauli_rotation: parameter 'axis'={axis!r} not one of x, y, z")
        angle = float(spec.params.get("angle", math.pi))
        u = math.cos(angle / 2) * I2 - 1j * math.sin(angle / 2) * _AXES[axis]
        return kraus_to_chi([u]), [u]
    if kind == "partial_dephasing":
        q = _prob(spec, "q")
        chi = np.diag([1 - q / 2, 0, 0, q / 2]).astype(complex)
        kraus = [math.sqrt(1 - q) * I2] + [math.sqrt(q) * projector(ket(s)) for s in "HV"]
        return chi, kraus
    if kind == "partial_polarizer":
        q = _prob(spec, "q")
        axis = str(spec.params.get("axis", "H")).upper()
        if axis not in ("H", "V"):
            raise ChannelSpecError(f"partial_polarizer: parameter 'axis'={axis!r} not H or V")
        kraus = [math.sqrt(1 - q) * I2, math.sqrt(q) * projector(ket(axis))]
        return kraus_to_chi(kraus), kraus
    if kind == "depolarizing":
        p = _prob(spec, "p")
        chi = np.diag([1 - 3 * p / 4, p / 4, p / 4, p / 4]).astype(complex)
        kraus = [math.sqrt(chi[m, m].real) * PAULIS[m] for m in range(4)]
        return chi, kraus
    if kind == "relaxation":
        alpha, beta = relaxation_multipliers(spec)
        coherence = beta / math.sqrt(alpha) if alpha > 0 else 0.0
        kraus = [d @ a for d in phase_damping_kraus(min(coherence, 1.0)) for a in amplitude_damping_kraus(1 - alpha)]
        return relaxation_chi(alpha, beta), kraus
    if kind == "mixture":
        weights = [float(w) for w in spec.params.get("weights", ())]
        if len(weights) != len(spec.components) or not weights:
            raise ChannelSpecError("mixture: 'weights' must match the number of components")
        if any(w < 0 for w in weights) or abs(sum(weights) - 1) > 1e-12:
            raise ChannelSpecError(f"mixture: parameter 'weights'={weights} must be non-negative and sum to 1")
        chi = np.zeros((4, 4), dtype=complex)
        kraus = []
        for w, comp in zip(weights, spec.components):
            c, ks = build_channel(comp)
            chi += w * c
            kraus += [math.sqrt(w) * k for k in ks]
        return chi, kraus
    raise ChannelSpecError(f"unknown channel kind {kind!r}; expected one of {', '.join(KINDS)}")


def relaxation_spec(alpha: float, beta: float) -> ChannelSpec:
    """Relaxation spec with ``t = 1`` reproducing the given Bloch multipliers."""
    return ChannelSpec("relaxation", {"t": 1.0, "T1": -1 / math.log(alpha), "T2": -1 / math.log(beta)})


FIG3 = {
    "fig3a": ("identity", ChannelSpec("identity")),
    "fig3b": ("sigma_z rotation", ChannelSpec("pauli_rotation", {"axis": "z"})),
    "fig3c": ("partial dephasing", ChannelSpec("partial_dephasing", {"q": 0.5})),
    "fig3d": ("partial polarizer", ChannelSpec("partial_polarizer", {"q": 0.5, "axis": "H"})),
    "fig3e": ("depolarization", ChannelSpec("depolarizing", {"p": 0.5})),
    "fig3f": ("spin-lattice and spin-spin relaxation", ChannelSpec("relaxation", {"t": math.log(2), "T1": 1.0, "T2": 1.0})),
}

BUILDING_BLOCKS = {
    "sigma_x": ChannelSpec("pauli_rotation", {"axis": "x"}),
    "sigma_y": ChannelSpec("pauli_rotation", {"axis": "y"}),
    "dephasing": ChannelSpec("partial_dephasing", {"q": 1.0}),
    "polarizer": ChannelSpec("partial_polarizer", {"q": 1.0, "axis": "H"}),
    "full_depolarizing": ChannelSpec("depolarizing", {"p": 1.0}),
    "amplitude_damping": ChannelSpec("relaxation", {"t": math.log(2), "T1": 1.0, "T2": 2.0}),
}


def channel_zoo() -> dict[str, ChannelSpec]:
    """The six processes of the comparison suite, keyed ``fig3a`` .. ``fig3f``.

    Partial-process strengths (0.5) are defaults of this package.
    """
    return {name: spec for name, (_, spec) in FIG3.items()}


def preset(name: str) -> ChannelSpec:
    if name in FIG3:
        return FIG3[name][1]
    if name in BUILDING_BLOCKS:
        return BUILDING_BLOCKS[name]
    raise ChannelSpecError(f"unknown preset {name!r}; known: {', '.join([*FIG3, *BUILDING_BLOCKS])}")


def is_trace_preserving(spec: ChannelSpec) -> bool:
    if spec.kind == "partial_polarizer":
        return float(spec.params.get("q", 0)) == 0
    if spec.kind == "mixture":
        return all(is_trace_preserving(c) for c in spec.components)
    return True
