"""Record-level reconstruction: count documents in, process estimates out."""
from __future__ import annotations

from dataclasses import replace
from typing import Mapping, Sequence

import numpy as np

from . import dcqd, sqpt
from .dcqd import CalibrationData
from .estimation import (
    LikelihoodModel,
    MLEOptions,
    ReconstructionResult,
    bootstrap_uncertainty,
    linear_inversion,
    mle_qpt,
)


def sqpt_model(records: Sequence[Mapping]) -> LikelihoodModel:
    plan, counts, budgets = sqpt.records_to_arrays(list(records))
    return LikelihoodModel(sqpt.sqpt_design(plan), counts, budgets)


def dcqd_model(records: Sequence[Mapping], calibration: CalibrationData | None = None) -> LikelihoodModel:
    labels, counts, budgets = dcqd.records_to_arrays(records)
    return LikelihoodModel(dcqd.design_for(labels, calibration), counts, budgets)


def model_for(scheme: str, records: Sequence[Mapping], calibration: CalibrationData | None = None) -> LikelihoodModel:
    if scheme == "sqpt":
        if calibration is not None:
            raise ValueError("calibration data applies to the dcqd scheme only")
        return sqpt_model(records)
    if scheme == "dcqd":
        return dcqd_model(records, calibration)
    raise ValueError(f"cannot reconstruct scheme {scheme!r}")


def reconstruct(
    scheme: str,
    records: Sequence[Mapping],
    calibration: CalibrationData | None = None,
    options: MLEOptions | None = None,
    reference: np.ndarray | None = None,
) -> ReconstructionResult:
    """Maximum-likelihood process matrix; bootstraps when ``options.bootstrap`` > 0.

    The bootstrap fidelity is taken against ``reference``, or the point estimate when
    none is given.
    """
    options = options or MLEOptions()
    model = model_for(scheme, records, calibration)
    result = mle_qpt(model, options)
    if options.bootstrap:
        ref = result.chi if reference is None else reference
        summary = bootstrap_uncertainty(model, ref, options.bootstrap, options.seed, options)
        result = replace(result, bootstrap=summary)
    return result


def invert(scheme: str, records: Sequence[Mapping], calibration: CalibrationData | None = None) -> np.ndarray:
    """Unconstrained linear-inversion estimate from observed frequencies."""
    model = model_for(scheme, records, calibration)
    return linear_inversion(model.design, model.counts / model.budgets)
