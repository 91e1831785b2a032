"""
Six single-qubit processes
==========================

The comparison set spans a unitary, dephasing, loss, depolarization and
relaxation. Each is built from a ``ChannelSpec`` and carries both a process
matrix in the Pauli basis and a Kraus set.
"""
import numpy as np

from hyperdcqd import build_channel, channel_zoo, check_physicality
from hyperdcqd.quantum import trace_operator

# %%
# The diagonal of chi is the weight of each Pauli error (I, X, Y, Z); the
# trace operator shows which inputs lose photons.
for name, spec in channel_zoo().items():
    chi, kraus = build_channel(spec)
    rep = check_physicality(chi)
    f = trace_operator(chi)
    print(f"{name}  {spec.kind:<18} diag={np.round(np.diag(chi).real, 3)}  "
          f"Kraus={len(kraus)}  TP={rep.trace_preserving}  F_diag={np.round(np.diag(f).real, 3)}")

# %%
# Relaxation with equal decay rates is not unital: population flows to |H>, so
# chi picks up an off-diagonal I-Z term.
chi_f, _ = build_channel(channel_zoo()["fig3f"])
print("\nrelaxation chi (abs):")
print(np.round(np.abs(chi_f), 4))
