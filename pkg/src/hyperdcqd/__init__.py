"""Simulation and reconstruction of single-qubit polarization processes.

Standard process tomography (18 configurations) and direct characterization with
entangled probes and hyperentangled Bell-state analysis (4 configurations), with
maximum-likelihood reconstruction and calibration-based error compensation.
"""
from .channels import ChannelSpec, build_channel, channel_zoo, preset
from .dcqd import (
    CalibrationData,
    bell_outcome_to_chi_diag,
    bsa_classify,
    calibration_plan,
    characterize_from_calibration,
    dcqd_forward,
    dcqd_inputs,
    dcqd_probabilities,
    extract_relaxation_ratio,
    hybrid_bell_states,
    hyper_bsa_decompose,
)
from .estimation import (
    LikelihoodModel,
    MLEOptions,
    ReconstructionResult,
    bootstrap_uncertainty,
    enforce_trace_bound,
    linear_inversion,
    mle_qpt,
    mle_qst,
)
from .labsim import ErrorModel, RunSpec, inject_default_systematics, load_counts, save_counts, simulate_run
from .pipeline import invert, reconstruct
from .quantum import (
    apply_chi,
    apply_kraus,
    check_physicality,
    chi_to_choi,
    chi_to_kraus,
    choi_to_chi,
    jamiolkowski_fidelity,
    kraus_to_chi,
)
from .report import compare_methods, emit_chi_plot_data
from .sqpt import sqpt_forward, sqpt_plan, sqpt_probabilities

__version__ = "0.1.0"
