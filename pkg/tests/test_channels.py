import math

import numpy as np
import pytest

from hyperdcqd.channels import (
    BUILDING_BLOCKS,
    ChannelSpec,
    ChannelSpecError,
    amplitude_damping_kraus,
    build_channel,
    channel_zoo,
    phase_damping_kraus,
    preset,
    relaxation_multipliers,
    relaxation_spec,
)
from hyperdcqd.quantum import (
    apply_chi,
    apply_kraus,
    check_physicality,
    ket,
    kraus_to_chi,
    projector,
    random_density_matrix,
    trace_operator,
)

GRID_STATES = [projector(ket(s)) for s in "HVDALR"] + [np.eye(2) / 2]


def bloch_image(chi, axis):
    """Bloch vector of eps(rho) for the +1 eigenstate of `axis`."""
    from hyperdcqd.quantum import PAULIS

    s = {"x": "D", "y": "L", "z": "H"}[axis]
    out = apply_chi(chi, projector(ket(s)))
    return np.array([np.trace(p @ out).real for p in PAULIS[1:]])


def test_partial_dephasing_full():
    chi, kraus = build_channel(ChannelSpec("partial_dephasing", {"q": 1.0}))
    assert np.allclose(chi, np.diag([0.5, 0, 0, 0.5]), atol=1e-15)
    # Kraus {Pi_H, Pi_V}, each (sigma_0 +- sigma_3)/2, expanded in the Pauli basis
    assert np.allclose(kraus_to_chi([projector(ket("H")), projector(ket("V"))]), chi, atol=1e-15)


def test_depolarizing_zero_is_identity():
    chi, _ = build_channel(ChannelSpec("depolarizing", {"p": 0.0}))
    assert np.array_equal(chi, np.diag([1, 0, 0, 0]).astype(complex))


def test_depolarizing_definition():
    p = 0.3
    chi, _ = build_channel(ChannelSpec("depolarizing", {"p": p}))
    rho = projector(ket("D"))
    assert np.allclose(apply_chi(chi, rho), (1 - p) * rho + p * np.eye(2) / 2, atol=1e-15)


@pytest.mark.parametrize("alpha", [0.2, 0.5, 0.9])
def test_relaxation_equal_rates_closed_form_and_kraus(alpha):
    beta = alpha
    chi, _ = build_channel(relaxation_spec(alpha, beta))
    expected = [(1 + 2 * beta + alpha) / 4, (1 - alpha) / 4, (1 - alpha) / 4, (1 - 2 * beta + alpha) / 4]
    assert np.allclose(np.diag(chi).real, expected, atol=1e-12)
    assert abs(chi[0, 3] - np.conj(chi[3, 0])) < 1e-15
    assert abs(chi[0, 3]) > 1e-3  # non-unital term
    # oracle: amplitude damping then dephasing down to beta
    oracle = [d @ a for d in phase_damping_kraus(beta / math.sqrt(alpha)) for a in amplitude_damping_kraus(1 - alpha)]
    assert np.allclose(kraus_to_chi(oracle), chi, atol=1e-12)


def test_relaxation_bloch_map():
    alpha, beta = 0.6, 0.7
    chi, _ = build_channel(relaxation_spec(alpha, beta))
    assert np.allclose(bloch_image(chi, "x"), [beta, 0, 1 - alpha], atol=1e-12)
    assert np.allclose(bloch_image(chi, "y"), [0, beta, 1 - alpha], atol=1e-12)
    assert np.allclose(bloch_image(chi, "z"), [0, 0, 1], atol=1e-12)  # |H> is the fixed pole
    v = apply_chi(chi, projector(ket("V")))
    assert np.trace(np.diag([1, -1]) @ v).real == pytest.approx(-alpha + (1 - alpha))


def test_relaxation_zero_time_is_identity():
    chi, _ = build_channel(ChannelSpec("relaxation", {"t": 0.0, "T1": 1.0, "T2": 1.0}))
    assert np.array_equal(np.round(chi, 15), np.diag([1, 0, 0, 0]).astype(complex))


def test_relaxation_cp_violation():
    with pytest.raises(ChannelSpecError, match="violates complete positivity"):
        build_channel(ChannelSpec("relaxation", {"t": 1.0, "T1": 1.0, "T2": 10.0}))


def test_relaxation_cp_boundary_allowed():
    alpha, beta = relaxation_multipliers(relaxation_spec(0.25, 0.5))
    assert beta**2 == pytest.approx(alpha)
    assert check_physicality(build_channel(relaxation_spec(0.25, 0.5))[0]).physical


@pytest.mark.parametrize(
    "spec",
    [
        ChannelSpec("partial_dephasing", {"q": 1.5}),
        ChannelSpec("depolarizing", {"p": -0.1}),
        ChannelSpec("partial_polarizer", {"q": 0.5, "axis": "D"}),
        ChannelSpec("pauli_rotation", {"axis": "w"}),
        ChannelSpec("mixture", {"weights": [0.5, 0.6]}, (ChannelSpec("identity"), ChannelSpec("identity"))),
        ChannelSpec("warp_drive"),
    ],
)
def test_invalid_specs(spec):
    with pytest.raises(ChannelSpecError):
        build_channel(spec)


def test_partial_polarizer_trace_operator():
    for q in (0.0, 0.3, 1.0):
        chi, _ = build_channel(ChannelSpec("partial_polarizer", {"q": q}))
        expected = (1 - q) * np.eye(2) + q * projector(ket("H"))
        assert np.allclose(trace_operator(chi), expected, atol=1e-10)


def test_mixture_is_linear():
    comps = (ChannelSpec("partial_dephasing", {"q": 1.0}), ChannelSpec("pauli_rotation", {"axis": "x"}), ChannelSpec("identity"))
    w = [0.2, 0.3, 0.5]
    chi, kraus = build_channel(ChannelSpec("mixture", {"weights": w}, comps))
    expected = sum(wi * build_channel(c)[0] for wi, c in zip(w, comps))
    assert np.max(np.abs(chi - expected)) < 1e-12
    assert np.max(np.abs(kraus_to_chi(kraus) - chi)) < 1e-12


def test_spec_json_round_trip():
    spec = ChannelSpec("mixture", {"weights": [0.5, 0.5]}, (preset("fig3c"), preset("fig3f")))
    assert ChannelSpec.from_json(spec.to_json()) == spec


class TestZoo:
    def test_six_panels(self):
        zoo = channel_zoo()
        assert list(zoo) == ["fig3a", "fig3b", "fig3c", "fig3d", "fig3e", "fig3f"]

    def test_all_physical(self, zoo):
        for name, (_, chi, _) in zoo.items():
            assert check_physicality(chi).physical, name

    def test_relaxation_preset_cp(self):
        alpha, beta = relaxation_multipliers(channel_zoo()["fig3f"])
        assert alpha == pytest.approx(0.5) and beta == pytest.approx(0.5)
        assert beta**2 <= alpha

    def test_trace_preservation(self, zoo):
        for name, (_, chi, _) in zoo.items():
            tp = check_physicality(chi).trace_preserving
            assert tp == (name != "fig3d"), name
            if tp:
                assert np.max(np.abs(trace_operator(chi) - np.eye(2))) < 1e-10

    def test_chi_and_kraus_agree(self, zoo, rng):
        states = GRID_STATES + [random_density_matrix(2, rng) for _ in range(5)]
        for spec in [*channel_zoo().values(), *BUILDING_BLOCKS.values()]:
            chi, kraus = build_channel(spec)
            for rho in states:
                assert np.max(np.abs(apply_chi(chi, rho) - apply_kraus(kraus, rho))) < 1e-12, spec

    def test_preset_lookup(self):
        assert preset("fig3c") == ChannelSpec("partial_dephasing", {"q": 0.5})
        with pytest.raises(ChannelSpecError):
            preset("fig9z")
