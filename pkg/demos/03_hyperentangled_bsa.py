"""
Bell-state analysis with a second degree of freedom
===================================================

With the pair also entangled in orbital angular momentum, each photon can be
projected onto a hybrid polarization-OAM Bell state. The pair of single-photon
outcomes identifies the two-photon polarization Bell state uniquely.
"""
from hyperdcqd import bsa_classify, hyper_bsa_decompose
from hyperdcqd.dcqd import BELL_LABELS, BELL_SYMBOLS, HYBRID_LABELS

# %%
# Four coincidence pairs per polarization Bell state, each with probability 1/4.
for bell in BELL_LABELS:
    pairs = ", ".join(f"({a},{b})" for a, b in sorted(hyper_bsa_decompose(bell)))
    print(f"{BELL_SYMBOLS[bell]:<5} -> {pairs}")

# %%
# The 16 pairs split into four disjoint groups, so a lookup table classifies
# every coincidence.
print()
print("      " + "".join(f"{b:>8}" for b in HYBRID_LABELS))
for a in HYBRID_LABELS:
    print(f"{a:<6}" + "".join(f"{BELL_SYMBOLS[bsa_classify((a, b))]:>8}" for b in HYBRID_LABELS))
