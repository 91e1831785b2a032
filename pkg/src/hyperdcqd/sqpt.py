"""Standard process tomography: probe states through the process, local analysis after it."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .quantum import apply_chi, chi_design, design_probabilities, ket, projector

INPUTS = ("H", "V", "D", "A", "L", "R")
MINIMAL_INPUTS = ("H", "V", "D", "L")
BASES = {"HV": ("H", "V"), "DA": ("D", "A"), "LR": ("L", "R")}


@dataclass(frozen=True)
class SqptConfig:
    config_id: int
    input_label: str
    basis: str

    @property
    def rho(self) -> np.ndarray:
        return projector(ket(self.input_label))

    @property
    def projectors(self) -> np.ndarray:
        return np.array([projector(ket(s)) for s in BASES[self.basis]])


def sqpt_plan(minimal: bool = False) -> list[SqptConfig]:
    """Input states x analysis bases, inputs varying slowest.

    The default over-complete plan has 6 x 3 = 18 configurations; ``minimal`` keeps four
    inputs for 12.
    """
    inputs = MINIMAL_INPUTS if minimal else INPUTS
    return [SqptConfig(i * 3 + j, s, b) for i, s in enumerate(inputs) for j, b in enumerate(BASES)]


def sqpt_probabilities(chi: np.ndarray, config: SqptConfig) -> tuple[float, float]:
    out = apply_chi(chi, config.rho)
    p = [float(np.trace(proj @ out).real) for proj in config.projectors]
    return p[0], p[1]


def sqpt_design(plan: list[SqptConfig]) -> np.ndarray:
    """Design tensor with two rows per configuration (first outcome, second outcome)."""
    rhos = np.array([c.rho for c in plan for _ in range(2)])
    effects = np.array([proj for c in plan for proj in c.projectors])
    return chi_design(rhos, effects)


def sqpt_forward(chi: np.ndarray, plan: list[SqptConfig] | None = None) -> np.ndarray:
    """Probability table of shape ``(len(plan), 2)``."""
    plan = sqpt_plan() if plan is None else plan
    return design_probabilities(sqpt_design(plan), chi).reshape(len(plan), 2)


def plan_from_records(records: list[dict]) -> list[SqptConfig]:
    plan = []
    for rec in records:
        if rec["input"] not in INPUTS or rec["basis"] not in BASES:
            raise ValueError(f"record {rec.get('config_id')}: unknown input/basis {rec['input']!r}/{rec['basis']!r}")
        plan.append(SqptConfig(int(rec["config_id"]), rec["input"], rec["basis"]))
    return plan


def records_to_arrays(records: list[dict]) -> tuple[list[SqptConfig], np.ndarray, np.ndarray]:
    """Plan, flattened counts and per-outcome budgets from SQPT count records."""
    plan = plan_from_records(records)
    counts = np.array([n for rec in records for n in rec["counts"]], dtype=float)
    budgets = np.array([rec["budget"] for rec in records for _ in range(2)], dtype=float)
    return plan, counts, budgets
