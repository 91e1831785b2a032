"""Method comparison records and chi-matrix plot data."""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from .dcqd import CONFIG_COUNTS
from .quantum import jamiolkowski_fidelity


def config_ledger() -> dict:
    """Experimental-configuration counts per method, for reporting next to fidelities."""
    return {
        "sqpt": CONFIG_COUNTS["sqpt"],
        "sqpt_minimal": CONFIG_COUNTS["sqpt_minimal"],
        "dcqd": CONFIG_COUNTS["dcqd"],
        "dcqd_over_sqpt_minimal": str(Fraction(CONFIG_COUNTS["dcqd"], CONFIG_COUNTS["sqpt_minimal"])),
        "dcqd_over_sqpt": str(Fraction(CONFIG_COUNTS["dcqd"], CONFIG_COUNTS["sqpt"])),
        "calibration": CONFIG_COUNTS["calibration"],
        "two_qubit_error_map_qpt": CONFIG_COUNTS["two_qubit_error_map_qpt"],
        "sqpt_error_characterization": CONFIG_COUNTS["sqpt_error_characterization"],
        "aapt": [CONFIG_COUNTS["aapt_min"], CONFIG_COUNTS["aapt_max"]],
    }


def compare_methods(chi_sqpt: np.ndarray, chi_dcqd: np.ndarray, chi_true: np.ndarray | None = None) -> dict:
    out = {"cross_fidelity": jamiolkowski_fidelity(chi_sqpt, chi_dcqd)}
    if chi_true is not None:
        out["sqpt_vs_truth"] = jamiolkowski_fidelity(chi_sqpt, chi_true)
        out["dcqd_vs_truth"] = jamiolkowski_fidelity(chi_dcqd, chi_true)
    out["configurations"] = config_ledger()
    return out


def emit_chi_plot_data(chi: np.ndarray) -> str:
    """CSV rows ``m,n,abs,re,im`` for every element, row-major."""
    chi = np.asarray(chi, dtype=complex)
    lines = ["m,n,abs,re,im"]
    for m in range(chi.shape[0]):
        for n in range(chi.shape[1]):
            z = chi[m, n]
            lines.append(f"{m},{n},{float(abs(z))!r},{float(z.real)!r},{float(z.imag)!r}")
    return "\n".join(lines) + "\n"
