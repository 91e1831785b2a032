"""
T2:T1 from a single setting
===========================

With the Bell-state probe alone, the four Bell outcome probabilities are the
diagonal of chi. For relaxation, alpha = exp(-t/T1) and beta = exp(-t/T2) follow
from sums of those diagonals, and R = T2/T1 = ln(alpha)/ln(beta).
"""
import numpy as np

from hyperdcqd import RunSpec, extract_relaxation_ratio, simulate_run
from hyperdcqd.channels import ChannelSpec
from hyperdcqd.dcqd import bell_outcome_to_chi_diag, counts_to_probs

# %%
# Equal decay times: the expected ratio is 1.
spec = ChannelSpec("relaxation", {"t": float(np.log(2)), "T1": 1.0, "T2": 1.0})
ratios = []
for seed in range(100):
    bell_record = simulate_run(RunSpec(spec, "dcqd", 100_000, seed))["records"][0]
    ratios.append(extract_relaxation_ratio(counts_to_probs(bell_record["counts"])))
print(f"R = {np.mean(ratios):.3f} +- {np.std(ratios, ddof=1):.3f} over 100 runs")
print("chi diagonal from the last run:", np.round(bell_outcome_to_chi_diag(counts_to_probs(bell_record["counts"])), 4))

# %%
# Sweep T2 at fixed T1 = 1; complete positivity caps T2 at 2 T1.
for t2 in (0.5, 1.0, 1.5, 2.0):
    spec = ChannelSpec("relaxation", {"t": 0.5, "T1": 1.0, "T2": t2})
    rec = simulate_run(RunSpec(spec, "dcqd", 100_000, seed=7))["records"][0]
    print(f"T2/T1 = {t2:.1f}  estimated {extract_relaxation_ratio(counts_to_probs(rec['counts'])):.3f}")
