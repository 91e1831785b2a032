"""Single-qubit process representations and the Jamiolkowski fidelity.

Conventions used throughout the package:

* ``|0> = |H>``, ``|1> = |V>``; ``|D> = (|H>+|V>)/sqrt2``, ``|A> = (|H>-|V>)/sqrt2``,
  ``|L> = (|H>+i|V>)/sqrt2``, ``|R> = (|H>-i|V>)/sqrt2``.
* The process matrix ``chi`` is indexed in the Pauli order ``(I, X, Y, Z)`` and acts as
  ``eps(rho) = sum_mn chi[m, n] sigma_m rho sigma_n``.
* Two-qubit operators are ordered ``idler (x) signal``; single-qubit processes act on
  the second slot.

States and process matrices are plain ``numpy`` arrays. Validation helpers raise
:class:`NonPhysicalError` naming the violated bound.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-9
TRACE_TOL = 1e-10

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = np.array([I2, X, Y, Z])
PAULI_LABELS = ("I", "X", "Y", "Z")

_S = 1 / np.sqrt(2)
KETS = {
    "H": np.array([1, 0], dtype=complex),
    "V": np.array([0, 1], dtype=complex),
    "D": np.array([_S, _S], dtype=complex),
    "A": np.array([_S, -_S], dtype=complex),
    "L": np.array([_S, 1j * _S], dtype=complex),
    "R": np.array([_S, -1j * _S], dtype=complex),
}

# sigma_n sigma_m products used by the trace-preservation operator sum_mn chi_mn sigma_n sigma_m
_SIGMA_NM = np.einsum("nab,mbc->mnac", PAULIS, PAULIS)

# columns are (I (x) sigma_m)|Phi+>, an orthonormal basis (Phi+, Psi+, i Psi-, Phi-)
_PHI_PLUS = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
CHOI_BASIS = np.stack([np.kron(I2, s) @ _PHI_PLUS for s in PAULIS], axis=1)


class NonPhysicalError(ValueError):
    """Raised when a matrix violates a state or process invariant."""


class UndefinedFidelityError(ValueError):
    """Raised when a fidelity is requested for a process with a zero-trace Choi state."""


def ket(label: str) -> np.ndarray:
    return KETS[label].copy()


def projector(vec: np.ndarray) -> np.ndarray:
    vec = np.asarray(vec, dtype=complex)
    return np.outer(vec, vec.conj())


def dag(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def hermiticity_deviation(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - dag(m)))) if m.size else 0.0


def hermitian_eigvalsh(m: np.ndarray) -> np.ndarray:
    """Eigenvalues of the Hermitian part of ``m``, sorted descending."""
    return np.linalg.eigvalsh((m + dag(m)) / 2)[::-1]


def psd_sqrt(m: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh((m + dag(m)) / 2)
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ dag(v)


def validate_density_matrix(rho: np.ndarray, dim: int | None = None) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density matrix must be square, got shape {rho.shape}")
    if dim is not None and rho.shape[0] != dim:
        raise ValueError(f"expected a {dim}x{dim} density matrix, got {rho.shape[0]}x{rho.shape[1]}")
    dev = hermiticity_deviation(rho)
    if dev > HERMITIAN_TOL:
        raise NonPhysicalError(f"density matrix not Hermitian: deviation {dev:.3g} > {HERMITIAN_TOL}")
    lam = hermitian_eigvalsh(rho)[-1]
    if lam < -PSD_TOL:
        raise NonPhysicalError(f"density matrix not PSD: eigenvalue {lam:.3g} < {-PSD_TOL}")
    tr = np.trace(rho).real
    if not 0 < tr <= 1 + TRACE_TOL:
        raise NonPhysicalError(f"density matrix trace {tr:.12g} outside (0, 1]")
    return rho


def trace_operator(chi: np.ndarray) -> np.ndarray:
    """``sum_mn chi[m, n] sigma_n sigma_m``; the process preserves trace iff this is I."""
    return np.einsum("mn,mnab->ab", np.asarray(chi, dtype=complex), _SIGMA_NM)


@dataclass(frozen=True)
class PhysicalityReport:
    hermiticity_deviation: float
    min_eigenvalue: float
    tp_floor: float
    tp_deviation: float
    violations: tuple[str, ...] = field(default_factory=tuple)

    @property
    def physical(self) -> bool:
        return not self.violations

    @property
    def trace_preserving(self) -> bool:
        return self.tp_deviation <= PSD_TOL

    @property
    def trace_decreasing(self) -> bool:
        return self.physical and not self.trace_preserving


def check_physicality(chi: np.ndarray) -> PhysicalityReport:
    """Report how far ``chi`` is from a completely positive, trace non-increasing map.

    ``tp_floor`` is the smallest eigenvalue of ``I - sum chi_mn sigma_n sigma_m``; it is
    zero for trace-preserving maps and positive when some input loses trace.
    """
    chi = np.asarray(chi, dtype=complex)
    if chi.shape != (4, 4):
        raise ValueError(f"chi must be 4x4, got {chi.shape}")
    herm = hermiticity_deviation(chi)
    min_eig = float(hermitian_eigvalsh(chi)[-1])
    f = trace_operator(chi)
    tp_floor = float(hermitian_eigvalsh(I2 - f)[-1])
    tp_dev = float(np.max(np.abs(f - I2)))
    violations = []
    if herm > HERMITIAN_TOL:
        violations.append(f"non-Hermitian: deviation {herm:.3g} > {HERMITIAN_TOL}")
    if min_eig < -PSD_TOL:
        violations.append(f"negative eigenvalue {min_eig:.6g} < {-PSD_TOL}")
    if tp_floor < -PSD_TOL:
        violations.append(f"trace increasing: eigenvalue of I - sum {tp_floor:.6g} < {-PSD_TOL}")
    return PhysicalityReport(herm, min_eig, tp_floor, tp_dev, tuple(violations))


def validate_chi(chi: np.ndarray) -> np.ndarray:
    chi = np.asarray(chi, dtype=complex)
    report = check_physicality(chi)
    if not report.physical:
        raise NonPhysicalError("non-physical chi: " + "; ".join(report.violations))
    return chi


def apply_chi(chi: np.ndarray, rho: np.ndarray, validate: bool = True) -> np.ndarray:
    """Apply ``eps(rho) = sum_mn chi[m, n] sigma_m rho sigma_n`` to a single-qubit state."""
    chi = np.asarray(chi, dtype=complex)
    rho = np.asarray(rho, dtype=complex)
    if chi.shape != (4, 4):
        raise ValueError(f"chi must be 4x4, got {chi.shape}")
    if rho.shape != (2, 2):
        raise ValueError(f"apply_chi acts on 2x2 states, got {rho.shape}")
    if validate:
        validate_chi(chi)
        validate_density_matrix(rho)
    return np.einsum("mn,mab,bc,ncd->ad", chi, PAULIS, rho, PAULIS)


def apply_kraus(kraus: Sequence[np.ndarray], rho: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    out = np.zeros_like(rho)
    for k in kraus:
        k = np.asarray(k, dtype=complex)
        if k.shape[1] != rho.shape[0]:
            raise ValueError(f"Kraus operator {k.shape} does not act on a {rho.shape} state")
        out = out + k @ rho @ dag(k)
    return out


def kraus_sum(kraus: Sequence[np.ndarray]) -> np.ndarray:
    return sum(dag(k) @ k for k in np.asarray(kraus, dtype=complex))


def chi_to_choi(chi: np.ndarray) -> np.ndarray:
    """Choi state ``(I (x) eps)(|Phi+><Phi+|)``; unit trace for trace-preserving ``eps``."""
    chi = np.asarray(chi, dtype=complex)
    return CHOI_BASIS @ chi @ dag(CHOI_BASIS)


def choi_to_chi(choi: np.ndarray) -> np.ndarray:
    return dag(CHOI_BASIS) @ np.asarray(choi, dtype=complex) @ CHOI_BASIS


def chi_to_kraus(chi: np.ndarray, atol: float = 1e-12) -> list[np.ndarray]:
    """Kraus operators from the eigendecomposition of ``chi`` (largest weight first).

    Eigenvalues below ``atol`` are dropped; eigenvalues below ``-PSD_TOL`` are an error.
    """
    chi = np.asarray(chi, dtype=complex)
    w, v = np.linalg.eigh((chi + dag(chi)) / 2)
    if w[0] < -PSD_TOL:
        raise NonPhysicalError(f"chi has negative eigenvalue {w[0]:.6g} < {-PSD_TOL}")
    order = np.argsort(-w, kind="stable")
    return [np.sqrt(w[i]) * np.einsum("m,mab->ab", v[:, i], PAULIS) for i in order if w[i] > atol]


def kraus_to_chi(kraus: Sequence[np.ndarray]) -> np.ndarray:
    chi = np.zeros((4, 4), dtype=complex)
    for k in kraus:
        c = np.einsum("mab,ba->m", PAULIS, np.asarray(k, dtype=complex)) / 2
        chi += np.outer(c, c.conj())
    return chi


def ptm_to_chi(ptm: np.ndarray) -> np.ndarray:
    """Convert a Pauli transfer matrix ``R[i, j] = Tr(sigma_i eps(sigma_j)) / 2`` to ``chi``.

    The map is assembled on the Choi state, which is linear in ``eps``.
    """
    ptm = np.asarray(ptm, dtype=complex)
    choi = np.zeros((4, 4), dtype=complex)
    for a in range(2):
        for b in range(2):
            unit = np.zeros((2, 2), dtype=complex)
            unit[a, b] = 1.0
            coeffs = np.einsum("jba,ab->j", PAULIS, unit) / 2
            image = np.einsum("ij,j,iab->ab", ptm, coeffs, PAULIS)
            choi += np.kron(unit, image) / 2
    return choi_to_chi(choi)


def lift_to_signal(op: np.ndarray) -> np.ndarray:
    """Embed a single-qubit operator on the signal (second) slot of a two-qubit space."""
    return np.kron(I2, op)


def chi_design(rhos: np.ndarray, effects: np.ndarray) -> np.ndarray:
    """Linear map from ``chi`` to outcome probabilities.

    Returns ``B`` with ``B[k, m, n] = Tr(E_k S_m rho_k S_n)`` so that
    ``p_k = Re sum_mn B[k, m, n] chi[m, n]``. ``S_m`` is ``sigma_m`` for 2x2 inputs and
    ``I (x) sigma_m`` for 4x4 inputs.
    """
    rhos = np.asarray(rhos, dtype=complex)
    effects = np.asarray(effects, dtype=complex)
    ops = PAULIS if rhos.shape[-1] == 2 else np.array([lift_to_signal(s) for s in PAULIS])
    return np.einsum("kab,mbc,kcd,nda->kmn", effects, ops, rhos, ops, optimize=True)


def design_probabilities(design: np.ndarray, chi: np.ndarray) -> np.ndarray:
    return np.einsum("kmn,mn->k", design, np.asarray(chi, dtype=complex)).real


def state_fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Root fidelity ``Tr sqrt(sqrt(rho) sigma sqrt(rho))`` of two PSD matrices."""
    # equals the trace norm of sqrt(rho) sqrt(sigma), which is symmetric in its arguments
    return float(np.sum(np.linalg.svd(psd_sqrt(rho) @ psd_sqrt(sigma), compute_uv=False)))


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    return float(0.5 * np.sum(np.abs(np.linalg.eigvalsh(rho - sigma))))


def jamiolkowski_fidelity(a: np.ndarray, b: np.ndarray) -> float:
    """Fidelity between the unit-trace-normalised Choi states of two processes.

    Normalisation keeps the metric defined for lossy processes such as a polarizer.
    """
    ca, cb = chi_to_choi(a), chi_to_choi(b)
    ta, tb = np.trace(ca).real, np.trace(cb).real
    if ta <= PSD_TOL or tb <= PSD_TOL:
        raise UndefinedFidelityError(
            f"Choi state has zero trace ({ta:.3g}, {tb:.3g}); fidelity undefined for a fully blocking process"
        )
    ra, rb = ca / ta, cb / tb
    if np.array_equal(ra, rb):
        return 1.0
    f = state_fidelity(ra, rb)
    return float(min(max(f, 0.0), 1.0))


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_chi(rng: np.random.Generator, rank: int = 4, loss: float = 0.0) -> np.ndarray:
    """Random physical ``chi`` from a Haar isometry; ``loss`` > 0 attenuates ``|V>`` inputs."""
    u = random_unitary(2 * rank, rng)[:, :2]
    filt = np.diag([1.0, np.sqrt(1 - loss)])
    return kraus_to_chi([u[2 * k:2 * k + 2, :] @ filt for k in range(rank)])


def random_density_matrix(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    rank = dim if rank is None else rank
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = g @ dag(g)
    return rho / np.trace(rho).real


# -- JSON ---------------------------------------------------------------------


def matrix_to_json(m: np.ndarray) -> list:
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def matrix_from_json(data: list) -> np.ndarray:
    try:
        arr = np.array(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"matrix must be nested [re, im] pairs: {exc}") from None
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise ValueError(f"matrix must be nested [re, im] pairs, got array of shape {arr.shape}")
    # viewing the pairs as complex keeps signed zeros that re + 1j * im would drop
    return np.ascontiguousarray(arr).view(complex)[..., 0]


def tagged_matrix(kind: str, m: np.ndarray) -> dict:
    m = np.asarray(m)
    return {"kind": kind, "dim": int(m.shape[0]), "matrix": matrix_to_json(m)}


def untag_matrix(data: dict, kind: str | None = None) -> np.ndarray:
    if kind is not None and data.get("kind") != kind:
        raise ValueError(f"expected kind {kind!r}, got {data.get('kind')!r}")
    m = matrix_from_json(data["matrix"])
    if m.shape != (data["dim"], data["dim"]):
        raise ValueError(f"declared dim {data['dim']} does not match matrix shape {m.shape}")
    return m


def dumps(obj) -> str:
    """Deterministic JSON text; floats use Python's shortest round-trip repr."""
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"
