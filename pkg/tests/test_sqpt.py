import numpy as np
import pytest

from hyperdcqd.channels import ChannelSpec, build_channel
from hyperdcqd.estimation import linear_inversion
from hyperdcqd.sqpt import BASES, INPUTS, SqptConfig, records_to_arrays, sqpt_design, sqpt_forward, sqpt_plan, sqpt_probabilities


def chi_of(kind, **params):
    return build_channel(ChannelSpec(kind, params))[0]


def test_plan_sizes_and_order():
    plan = sqpt_plan()
    assert len(plan) == 18
    assert len(sqpt_plan(minimal=True)) == 12
    assert [(c.input_label, c.basis) for c in plan[:4]] == [("H", "HV"), ("H", "DA"), ("H", "LR"), ("V", "HV")]
    assert [c.config_id for c in plan] == list(range(18))


def test_projectors_complete():
    for c in sqpt_plan():
        assert np.max(np.abs(c.projectors.sum(axis=0) - np.eye(2))) < 1e-14


def test_probability_examples():
    assert sqpt_probabilities(chi_of("identity"), SqptConfig(0, "H", "HV")) == pytest.approx((1, 0), abs=1e-15)
    assert sqpt_probabilities(chi_of("pauli_rotation", axis="z"), SqptConfig(0, "D", "DA")) == pytest.approx((0, 1), abs=1e-15)
    pol = chi_of("partial_polarizer", q=1.0, axis="H")
    assert sqpt_probabilities(pol, SqptConfig(0, "D", "HV")) == pytest.approx((0.5, 0), abs=1e-15)


def test_identity_table():
    table = sqpt_forward(chi_of("identity"))
    for c, (p1, p2) in zip(sqpt_plan(), table):
        if c.input_label in BASES[c.basis]:
            assert (p1, p2) == pytest.approx((1.0, 0.0) if c.input_label == BASES[c.basis][0] else (0.0, 1.0), abs=1e-15)
        else:
            assert (p1, p2) == pytest.approx((0.5, 0.5), abs=1e-15)


def test_fully_depolarizing_table():
    assert np.allclose(sqpt_forward(chi_of("depolarizing", p=1.0)), 0.5, atol=1e-15)


def test_sigma_z_symmetry():
    ident = sqpt_forward(chi_of("identity"))
    sz = sqpt_forward(chi_of("pauli_rotation", axis="z"))
    swapped = ident.copy()
    for i, c in enumerate(sqpt_plan()):
        if c.basis in ("DA", "LR"):
            swapped[i] = swapped[i, ::-1]
    assert np.max(np.abs(sz - swapped)) < 1e-15


def test_trace_preserving_rows_sum_to_one(zoo):
    for name, (_, chi, _) in zoo.items():
        sums = sqpt_forward(chi).sum(axis=1)
        if name == "fig3d":
            assert np.all(sums <= 1 + 1e-12)
        else:
            assert np.max(np.abs(sums - 1)) < 1e-12, name


def test_linear_inversion_recovers_zoo(zoo):
    plan = sqpt_plan()
    design = sqpt_design(plan)
    for name, (_, chi, _) in zoo.items():
        est = linear_inversion(design, sqpt_forward(chi, plan).ravel())
        assert np.max(np.abs(est - chi)) < 1e-10, name


def test_minimal_plan_also_determines_chi(zoo):
    plan = sqpt_plan(minimal=True)
    design = sqpt_design(plan)
    chi = zoo["fig3f"][1]
    assert np.max(np.abs(linear_inversion(design, sqpt_forward(chi, plan).ravel()) - chi)) < 1e-10


def test_records_to_arrays():
    recs = [{"config_id": 0, "input": "H", "basis": "HV", "counts": [9, 1], "budget": 10}]
    plan, counts, budgets = records_to_arrays(recs)
    assert plan == [SqptConfig(0, "H", "HV")]
    assert counts.tolist() == [9, 1] and budgets.tolist() == [10, 10]
    with pytest.raises(ValueError):
        records_to_arrays([{**recs[0], "input": "Q"}])
    assert set(INPUTS) == {"H", "V", "D", "A", "L", "R"}
