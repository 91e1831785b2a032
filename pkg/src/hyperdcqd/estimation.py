"""Maximum-likelihood and linear-inversion reconstruction of process and state matrices.

Both process matrices and density matrices are written ``X = T^dagger T`` with ``T``
complex lower-triangular, so every iterate is PSD. Counts are treated as independent
Poisson variables with means ``N p_k``; a known budget ``N`` lets the total detected
flux carry trace information for lossy processes.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, replace
from typing import Callable

import numpy as np
from scipy.special import xlogy

from .quantum import (
    PSD_TOL,
    TRACE_TOL,
    _SIGMA_NM,
    I2,
    chi_to_kraus,
    design_probabilities,
    jamiolkowski_fidelity,
    kraus_to_chi,
    matrix_to_json,
    trace_operator,
)

PROBABILITY_FLOOR = 1e-12


class UnderdeterminedError(ValueError):
    """The design matrix does not determine every parameter."""


@dataclass(frozen=True)
class MLEOptions:
    tol: float = 1e-10
    max_iter: int = 5000
    trace_preserving: bool = False
    penalty_weight: float | None = None  # defaults to 1e3 * budget
    bootstrap: int = 0
    seed: int = 0

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, data: dict) -> "MLEOptions":
        return cls(**data)


@dataclass(frozen=True)
class LikelihoodModel:
    """``p_k = Re sum_mn design[k, m, n] X[m, n]``; counts and budgets per outcome ``k``."""

    design: np.ndarray
    counts: np.ndarray
    budgets: np.ndarray

    def __post_init__(self):
        if len(self.design) != len(self.counts) or len(self.counts) != len(self.budgets):
            raise ValueError(
                f"design ({len(self.design)}), counts ({len(self.counts)}) and budgets ({len(self.budgets)}) disagree"
            )
        if np.any(np.asarray(self.counts) < 0):
            raise ValueError("counts must be non-negative")
        if np.any(np.asarray(self.budgets) <= 0):
            raise ValueError("budgets must be positive")

    def with_counts(self, counts: np.ndarray) -> "LikelihoodModel":
        return replace(self, counts=np.asarray(counts, dtype=float))

    def nll(self, x: np.ndarray) -> float:
        p = np.maximum(design_probabilities(self.design, x), PROBABILITY_FLOOR)
        mu = self.budgets * p
        return float(np.sum(mu - self.counts * np.log(mu)))


@dataclass(frozen=True)
class BootstrapSummary:
    mean: float
    std: float
    resamples: int
    excluded: int
    fidelities: tuple[float, ...]
    chi_std: np.ndarray  # element-wise spread of |chi|

    def to_json(self) -> dict:
        return {
            "fidelity_mean": self.mean,
            "fidelity_std": self.std,
            "resamples": self.resamples,
            "excluded": self.excluded,
            "chi_abs_std": [[float(v) for v in row] for row in self.chi_std],
        }


@dataclass(frozen=True)
class ReconstructionResult:
    chi: np.ndarray
    nll: float
    iterations: int
    converged: bool
    floored: int = 0
    nll_history: tuple[float, ...] = ()
    options: MLEOptions = field(default_factory=MLEOptions)
    bootstrap: BootstrapSummary | None = None

    @property
    def state(self) -> np.ndarray:
        return self.chi

    def to_json(self, kind: str = "chi") -> dict:
        out = {
            "kind": kind,
            "dim": int(self.chi.shape[0]),
            "matrix": matrix_to_json(self.chi),
            "nll": self.nll,
            "iterations": self.iterations,
            "converged": self.converged,
            "floored_outcomes": self.floored,
            "options": self.options.to_json(),
        }
        if kind == "chi":
            out["tp_residual"] = float(np.linalg.norm(trace_operator(self.chi) - I2))
        if self.bootstrap is not None:
            out["bootstrap"] = self.bootstrap.to_json()
        return out


# -- linear inversion ------------------------------------------------------------


def hermitian_coordinates(dim: int) -> np.ndarray:
    """Real basis ``H_j`` of dim x dim Hermitian matrices, orthogonal under the trace product."""
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


def linear_inversion(design: np.ndarray, probabilities: np.ndarray, rcond: float = 1e-10) -> np.ndarray:
    """Least-squares Hermitian ``X`` with ``design . X = probabilities``; no positivity enforced."""
    dim = design.shape[1]
    basis = hermitian_coordinates(dim)
    a = np.einsum("kmn,jmn->kj", design, basis).real
    sv = np.linalg.svd(a, compute_uv=False)
    rank = int(np.sum(sv > rcond * sv[0]))
    if rank < len(basis):
        raise UnderdeterminedError(
            f"design has rank {rank} < {len(basis)}: null space of dimension {len(basis) - rank}"
        )
    coef, *_ = np.linalg.lstsq(a, np.asarray(probabilities, dtype=float), rcond=None)
    return np.einsum("j,jmn->mn", coef, basis)


def linear_inversion_qpt(design: np.ndarray, probabilities: np.ndarray) -> np.ndarray:
    return linear_inversion(design, np.ravel(probabilities))


# -- maximum likelihood ----------------------------------------------------------

_TRIL = np.tril_indices(4)
_OFF = np.tril_indices(4, -1)


def _unpack(x: np.ndarray) -> np.ndarray:
    t = np.zeros((4, 4), dtype=complex)
    t[np.diag_indices(4)] = x[:4]
    t[_OFF] = x[4:10] + 1j * x[10:16]
    return t


def _pack_grad(g: np.ndarray) -> np.ndarray:
    # g[i, j] = df/dRe T_ij - i df/dIm T_ij
    return np.concatenate([np.diag(g).real, g[_OFF].real, -g[_OFF].imag])


def _initial_params(scale: float) -> np.ndarray:
    x = np.zeros(16)
    x[:4] = scale
    return x


class _Objective:
    def __init__(self, model: LikelihoodModel, normalize: bool, penalty: float):
        self.flat = np.ascontiguousarray(model.design.reshape(len(model.design), -1))
        self.counts = np.asarray(model.counts, dtype=float)
        self.budgets = np.asarray(model.budgets, dtype=float)
        self.normalize = normalize
        self.penalty = penalty
        self.floored = 0

    def matrix(self, x: np.ndarray) -> np.ndarray:
        t = _unpack(x)
        m = t.conj().T @ t
        if self.normalize:
            m = m / np.trace(m).real
        return m

    def __call__(self, x: np.ndarray) -> tuple[float, np.ndarray]:
        t = _unpack(x)
        s = t.conj().T @ t
        tr = np.trace(s).real
        m = s / tr if self.normalize else s
        p = (self.flat @ m.ravel()).real
        low = p < PROBABILITY_FLOOR
        self.floored = int(np.count_nonzero(low & (self.counts > 0)))
        p = np.where(low, PROBABILITY_FLOOR, p)
        mu = self.budgets * p
        # Poisson deviance / 2: the NLL minus its saturated constant, so relative changes stay resolvable
        f = float(np.sum(mu - self.counts + xlogy(self.counts, self.counts / mu)))
        w = np.where(low, 0.0, self.budgets - self.counts / p)
        # gm[a, b] = df / dM[a, b] for a Hermitian perturbation
        gm = (w @ self.flat).reshape(4, 4)
        if self.penalty:
            resid = np.einsum("mn,mnab->ab", m, _SIGMA_NM) - I2
            f += self.penalty * float(np.sum(np.abs(resid) ** 2))
            gm = gm + 2 * self.penalty * np.einsum("ab,mnba->mn", resid, _SIGMA_NM)
        if self.normalize:
            gm = (gm - np.sum(gm * m).real * np.eye(4)) / tr
        # df = Re Tr(gm^T dS), dS = dT^+ T + T^+ dT
        g = 2 * (t @ gm.T).conj()
        return f, _pack_grad(g)


def _bfgs(obj: Callable, x0: np.ndarray, tol: float, max_iter: int, patience: int = 3):
    # converged once the relative NLL change stays below tol for `patience` consecutive steps
    x = x0.copy()
    quiet = 0
    f, g = obj(x)
    n = len(x)
    h = np.eye(n) / max(np.linalg.norm(g), 1.0)
    history = [f]
    converged = False
    it = 0
    reset = False
    while it < max_iter:
        d = -h @ g
        slope = float(g @ d)
        if slope >= 0:
            h = np.eye(n) / max(np.linalg.norm(g), 1.0)
            d, slope = -h @ g, -float(h[0, 0] * g @ g)
        step = 1.0
        accepted = False
        for _ in range(60):
            xn = x + step * d
            fn, gn = obj(xn)
            if fn <= f + 1e-4 * step * slope:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            if reset:
                # no descent possible at working precision
                converged = True
                break
            h = np.eye(n) / max(np.linalg.norm(g), 1.0)
            reset = True
            continue
        reset = False
        it += 1
        s, y = xn - x, gn - g
        sy = float(s @ y)
        if sy > 1e-300:
            if it == 1:
                h = np.eye(n) * sy / float(y @ y)
            rho = 1.0 / sy
            hy = h @ y
            h = h + (rho * rho * float(y @ hy) + rho) * np.outer(s, s) - rho * (np.outer(hy, s) + np.outer(s, hy))
        rel = abs(f - fn) / max(abs(fn), 1e-300)
        x, f, g = xn, fn, gn
        history.append(f)
        quiet = quiet + 1 if rel < tol else 0
        if quiet >= patience:
            converged = True
            break
    return x, f, it, converged, history


def enforce_trace_bound(chi: np.ndarray, trace_preserving: bool = False) -> np.ndarray:
    """Precompose with ``C`` so the trace operator becomes ``C F C``.

    ``C`` shrinks only eigen-directions where ``F`` exceeds 1 (or rescales all of them to
    1 when ``trace_preserving``); a process already inside the bound is returned as is.
    """
    f = trace_operator(chi)
    w, v = np.linalg.eigh((f + f.conj().T) / 2)
    if trace_preserving:
        if w[0] <= 0:
            raise ValueError("trace operator is singular; cannot normalise to a trace-preserving map")
        c = 1 / np.sqrt(w)
    else:
        if w[-1] <= 1 + TRACE_TOL:
            return chi
        c = np.minimum(1.0, 1 / np.sqrt(w))
    cmat = (v * c) @ v.conj().T
    out = kraus_to_chi([k @ cmat for k in chi_to_kraus(chi)])
    return (out + out.conj().T) / 2


def _fit(model: LikelihoodModel, options: MLEOptions, normalize: bool) -> ReconstructionResult:
    penalty = 0.0
    if options.trace_preserving and not normalize:
        penalty = options.penalty_weight if options.penalty_weight is not None else 1e3 * float(np.max(model.budgets))
    obj = _Objective(model, normalize, penalty)
    x, f, it, conv, hist = _bfgs(obj, _initial_params(0.5), options.tol, options.max_iter)
    m = obj.matrix(x)
    m = (m + m.conj().T) / 2
    if not normalize:
        m = enforce_trace_bound(m, options.trace_preserving)
    obj(x)
    nll = model.nll(m)
    return ReconstructionResult(m, nll, it, conv, obj.floored, tuple(hist), options)


def mle_qpt(model: LikelihoodModel, options: MLEOptions | None = None) -> ReconstructionResult:
    """Process matrix maximising the Poisson likelihood, PSD by construction.

    With ``options.trace_preserving`` a penalty ``lambda ||F - I||_F^2`` on the trace operator
    ``F = sum chi_mn sigma_n sigma_m`` is added, ``lambda = 1e3 N`` unless overridden.
    The fit is then passed through ``enforce_trace_bound``: shot noise can push ``F`` above
    the identity, which no physical process allows.
    """
    return _fit(model, options or MLEOptions(), normalize=False)


def mle_qst(effects: np.ndarray, counts: np.ndarray, budgets: np.ndarray, options: MLEOptions | None = None) -> ReconstructionResult:
    """Unit-trace two-qubit density matrix from projector counts.

    ``effects[k]`` is the measured projector; the fitted state is ``result.state``.
    """
    design = np.swapaxes(np.asarray(effects, dtype=complex), -1, -2)
    model = LikelihoodModel(design, np.asarray(counts, dtype=float), np.asarray(budgets, dtype=float))
    return _fit(model, options or MLEOptions(), normalize=True)


def bootstrap_uncertainty(
    model: LikelihoodModel,
    reference: np.ndarray,
    resamples: int = 200,
    seed: int = 0,
    options: MLEOptions | None = None,
    estimator: Callable[[LikelihoodModel, MLEOptions], ReconstructionResult] = mle_qpt,
) -> BootstrapSummary:
    """Spread of the Jamiolkowski fidelity to ``reference`` under Poisson resampling of the counts.

    Every count is redrawn as Poisson with mean equal to the observed count. Resamples
    whose fit does not converge are excluded and counted.
    """
    if resamples < 2:
        raise ValueError(f"bootstrap needs at least 2 resamples, got {resamples}")
    options = replace(options or MLEOptions(), bootstrap=0)
    rng = np.random.default_rng(seed)
    draws = rng.poisson(np.asarray(model.counts, dtype=float), size=(resamples, len(model.counts)))
    fids, chis = [], []
    excluded = 0
    for counts in draws:
        res = estimator(model.with_counts(counts), options)
        if not res.converged:
            excluded += 1
            continue
        fids.append(jamiolkowski_fidelity(res.chi, reference))
        chis.append(np.abs(res.chi))
    if len(fids) < 2:
        raise RuntimeError(f"only {len(fids)} of {resamples} bootstrap fits converged")
    fids_a = np.array(fids)
    return BootstrapSummary(
        float(fids_a.mean()), float(fids_a.std(ddof=1)), len(fids), excluded, tuple(fids), np.std(chis, axis=0, ddof=1)
    )


def is_valid_estimate(chi: np.ndarray, trace_preserving: bool = False) -> bool:
    w = np.linalg.eigvalsh(chi)
    if w[0] < -PSD_TOL:
        return False
    if trace_preserving:
        return float(np.linalg.norm(trace_operator(chi) - I2)) < 1e-3
    return True


def effective_budget(model: LikelihoodModel) -> float:
    return float(math.fsum(model.budgets) / len(model.budgets))
