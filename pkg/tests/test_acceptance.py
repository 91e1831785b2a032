"""Acceptance criteria, one check per criterion.

Run under pytest (``pytest tests/test_acceptance.py -s``) or directly
(``python3 tests/test_acceptance.py``); either way each criterion prints a single
``PASS``/``FAIL`` line with the measured numbers.
"""
import sys
import tempfile
from pathlib import Path

import numpy as np
import pytest

from hyperdcqd import labsim, pipeline
from hyperdcqd.channels import ChannelSpec, build_channel, channel_zoo, relaxation_spec
from hyperdcqd.cli import main as cli_main
from hyperdcqd.dcqd import (
    BELL_LABELS,
    CONFIG_COUNTS,
    HYBRID_LABELS,
    bsa_classify,
    calibration_plan,
    characterize_from_calibration,
    counts_to_probs,
    dcqd_design,
    dcqd_inputs,
    dcqd_probabilities,
    extract_relaxation_ratio,
    hyper_bsa_decompose,
    hyper_bsa_table,
)
from hyperdcqd.estimation import LikelihoodModel, MLEOptions, linear_inversion, mle_qpt
from hyperdcqd.quantum import (
    apply_chi,
    apply_kraus,
    check_physicality,
    chi_to_choi,
    chi_to_kraus,
    choi_to_chi,
    jamiolkowski_fidelity,
    random_chi,
    random_density_matrix,
    trace_operator,
)
from hyperdcqd.sqpt import sqpt_design, sqpt_plan

# coincidence pairs expected for each polarization Bell state
EXPECTED_PAIRS = {
    "phi_plus": {("phi+", "psi+"), ("phi-", "psi-"), ("psi+", "phi+"), ("psi-", "phi-")},
    "phi_minus": {("phi+", "psi-"), ("phi-", "psi+"), ("psi+", "phi-"), ("psi-", "phi+")},
    "psi_plus": {("phi+", "phi+"), ("phi-", "phi-"), ("psi+", "psi+"), ("psi-", "psi-")},
    "psi_minus": {("phi+", "phi-"), ("phi-", "phi+"), ("psi+", "psi-"), ("psi-", "psi+")},
}


def report(number, ok, detail):
    line = f"CRITERION {number}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(line, flush=True)
    return line


def zoo_chis():
    return {name: build_channel(spec)[0] for name, spec in channel_zoo().items()}


def exact_model(chi, design, n=1e6):
    p = np.real(np.einsum("kmn,mn->k", design, chi))
    return LikelihoodModel(design, n * p, np.full(len(p), n))


def simulate_dcqd(spec, n, seed, errors=None):
    run = labsim.RunSpec(spec, "dcqd", n, seed, errors or labsim.ErrorModel())
    return labsim.simulate_run(run)["records"]


# -- criteria ------------------------------------------------------------------


def criterion_1():
    got = {
        "sqpt": len(sqpt_plan()),
        "sqpt_minimal": len(sqpt_plan(minimal=True)),
        "dcqd": len(dcqd_inputs()),
        "calibration": len(calibration_plan()),
    }
    expected = {"sqpt": 18, "sqpt_minimal": 12, "dcqd": 4, "calibration": 45}
    ok = got == expected and all(CONFIG_COUNTS[k] == v for k, v in expected.items())
    return ok, f"configs {got}"


def criterion_2():
    worst = 0.0
    ok = True
    owners = {}
    for bell, pairs in EXPECTED_PAIRS.items():
        dist = hyper_bsa_decompose(bell)
        ok &= set(dist) == pairs
        worst = max(worst, max(abs(p - 0.25) for p in dist.values()))
        for pair in dist:
            ok &= pair not in owners
            owners[pair] = bell
    table = hyper_bsa_table()
    for bell in BELL_LABELS:
        worst = max(worst, max(p for pair, p in table[bell].items() if pair not in EXPECTED_PAIRS[bell]))
    ok &= len(owners) == len(HYBRID_LABELS) ** 2
    ok &= all(bsa_classify(pair) == bell for pair, bell in owners.items())
    ok &= worst <= 1e-12
    return bool(ok), f"16 pairs in 4 disjoint classes, max |p - expected| = {worst:.2e}"


def criterion_3():
    rng = np.random.default_rng(3)
    worst_apply = worst_choi = 0.0
    for i in range(100):
        chi = random_chi(rng, rank=1 + i % 4, loss=0.3 if i % 5 == 0 else 0.0)
        kraus = chi_to_kraus(chi)
        for _ in range(20):
            rho = random_density_matrix(2, rng)
            worst_apply = max(worst_apply, float(np.max(np.abs(apply_chi(chi, rho) - apply_kraus(kraus, rho)))))
        worst_choi = max(worst_choi, float(np.max(np.abs(choi_to_chi(chi_to_choi(chi)) - chi))))
    ok = worst_apply <= 1e-12 and worst_choi <= 1e-12
    return ok, f"apply_chi vs Kraus max err {worst_apply:.2e}; chi<->choi max err {worst_choi:.2e}"


def criterion_4():
    lowest = 1.0
    rows = []
    for name, chi in zoo_chis().items():
        fids = {}
        for scheme, design in (("dcqd", dcqd_design()), ("sqpt", sqpt_design(sqpt_plan()))):
            model = exact_model(chi, design)
            lin = linear_inversion(design, model.counts / model.budgets)
            mle = mle_qpt(model).chi
            fids[f"{scheme}_lin"] = jamiolkowski_fidelity(lin, chi)
            fids[f"{scheme}_mle"] = jamiolkowski_fidelity(mle, chi)
            fids[f"_{scheme}"] = mle
        cross = jamiolkowski_fidelity(fids.pop("_sqpt"), fids.pop("_dcqd"))
        fids["cross"] = cross
        lowest = min(lowest, *fids.values())
        rows.append(f"{name}:{min(fids.values()):.6f}")
    return lowest >= 0.9999, f"min F_J over lin/MLE/cross per channel {' '.join(rows)}"


def criterion_5(seeds=50, n=10**4):
    means = {}
    for name, spec in channel_zoo().items():
        chi = build_channel(spec)[0]
        fids = [jamiolkowski_fidelity(pipeline.reconstruct("dcqd", simulate_dcqd(spec, n, s)).chi, chi) for s in range(seeds)]
        means[name] = float(np.mean(fids))
    ok = all(m >= 0.98 for m in means.values())
    return ok, "mean DCQD F_J " + " ".join(f"{k}:{v:.4f}" for k, v in means.items())


def compensation_run(spec, n, seed, errors):
    chi = build_channel(spec)[0]
    records = simulate_dcqd(spec, n, seed, errors)
    cal_run = labsim.RunSpec(ChannelSpec("identity"), "calibration", n, 10_000 + seed, errors)
    calibration = characterize_from_calibration(labsim.simulate_run(cal_run)["records"])
    raw = pipeline.reconstruct("dcqd", records).chi
    fixed = pipeline.reconstruct("dcqd", records, calibration).chi
    return jamiolkowski_fidelity(raw, chi), jamiolkowski_fidelity(fixed, chi)


def criterion_6(seeds=20, n=10**5):
    errors = labsim.inject_default_systematics()
    raw_all, fixed_all, per_channel = [], [], []
    for name, spec in channel_zoo().items():
        pairs = np.array([compensation_run(spec, n, s, errors) for s in range(seeds)])
        raw_all.extend(pairs[:, 0])
        fixed_all.extend(pairs[:, 1])
        per_channel.append(f"{name}:{pairs[:, 0].mean():.3f}->{pairs[:, 1].mean():.4f}")
    raw, fixed = float(np.mean(raw_all)), float(np.mean(fixed_all))
    ok = raw <= 0.95 and fixed >= 0.98 and fixed - raw >= 0.03
    detail = f"pooled uncorrected {raw:.4f}, corrected {fixed:.4f}, gain {fixed - raw:.4f} | " + " ".join(per_channel)
    return ok, detail


def criterion_7(seeds=100, n=10**5):
    spec = relaxation_spec(0.5, 0.5)
    ratios = []
    for s in range(seeds):
        rec = simulate_dcqd(spec, n, s)[0]
        assert rec["input_label"] == "BELL"
        ratios.append(extract_relaxation_ratio(counts_to_probs(rec["counts"])))
    ratios = np.array(ratios)
    within = float(np.mean(np.abs(ratios - 1) <= 0.06))
    worst = 0.0
    for alpha in np.linspace(0.05, 0.95, 10):
        for beta in np.linspace(0.05, 0.95, 10):
            if beta**2 > alpha:
                continue
            p = dcqd_probabilities(build_channel(relaxation_spec(alpha, beta))[0], dcqd_inputs()[0])
            worst = max(worst, abs(extract_relaxation_ratio(p) - np.log(alpha) / np.log(beta)))
    ok = within >= 0.9 and worst <= 1e-10
    detail = f"R = {ratios.mean():.4f} +- {ratios.std(ddof=1):.4f}, {within:.0%} within 0.06; noiseless grid max err {worst:.2e}"
    return ok, detail


def criterion_8(seeds=5):
    worst_eig = np.inf
    worst_tp = 0.0
    failures = []
    fits = 0
    for name, spec in channel_zoo().items():
        tp_channel = check_physicality(build_channel(spec)[0]).trace_preserving
        for scheme in ("sqpt", "dcqd"):
            for n in (100, 10**4):
                for s in range(seeds):
                    run = labsim.simulate_run(labsim.RunSpec(spec, scheme, n, s))
                    for tp in (False, True) if tp_channel else (False,):
                        chi = pipeline.reconstruct(scheme, run["records"], options=MLEOptions(trace_preserving=tp)).chi
                        rep = check_physicality(chi)
                        fits += 1
                        worst_eig = min(worst_eig, rep.min_eigenvalue)
                        if tp:
                            worst_tp = max(worst_tp, float(np.linalg.norm(trace_operator(chi) - np.eye(2))))
                        if not rep.physical:
                            failures.append((name, scheme, n, s, tp, rep.violations))
    ok = not failures and worst_eig >= -1e-9 and worst_tp < 1e-3
    detail = f"{fits} fits, min eigenvalue {worst_eig:.2e}, max TP residual {worst_tp:.2e}, failures {failures[:3]}"
    return ok, detail


def cli_pipeline(workdir: Path) -> dict:
    w = workdir
    steps = [
        ["channel", "build", "--preset", "fig3f", "--out", w / "channel.json"],
        ["simulate", "--scheme", "dcqd", "--channel", w / "channel.json", "--n", 10**4, "--seed", 5, "--errors", "default", "--out", w / "dcqd.json"],
        ["simulate", "--scheme", "calibration", "--channel", w / "channel.json", "--n", 10**4, "--seed", 6, "--errors", "default", "--out", w / "cal_counts.json"],
        ["simulate", "--scheme", "sqpt", "--channel", w / "channel.json", "--n", 10**4, "--seed", 7, "--out", w / "sqpt.json"],
        ["calibrate", "--counts", w / "cal_counts.json", "--out", w / "calibration.json"],
        ["reconstruct", "--scheme", "dcqd", "--counts", w / "dcqd.json", "--calibration", w / "calibration.json", "--bootstrap", 20, "--seed", 1, "--out", w / "dcqd_chi.json"],
        ["reconstruct", "--scheme", "sqpt", "--counts", w / "sqpt.json", "--tp", "--out", w / "sqpt_chi.json"],
        ["compare", "--a", w / "sqpt_chi.json", "--b", w / "dcqd_chi.json", "--truth", w / "channel.json", "--out", w / "compare.json"],
        ["plotdata", "--chi", w / "dcqd_chi.json", "--out", w / "dcqd_chi.csv"],
        ["relaxation", "--counts", w / "dcqd.json", "--out", w / "relaxation.json"],
    ]
    for argv in steps:
        code = cli_main([str(a) for a in argv])
        if code != 0:
            raise RuntimeError(f"{argv[0]} exited {code}")
    return {p.name: p.read_bytes() for p in sorted(w.iterdir())}


def criterion_9():
    with tempfile.TemporaryDirectory() as a, tempfile.TemporaryDirectory() as b:
        first, second = cli_pipeline(Path(a)), cli_pipeline(Path(b))
    differing = [name for name in first if first[name] != second.get(name)]
    ok = sorted(first) == sorted(second) and not differing
    return ok, f"{len(first)} output files, byte-identical: {not differing} {differing}"


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7, criterion_8, criterion_9]


@pytest.mark.parametrize("number", range(1, 10))
def test_acceptance(number, capsys):
    ok, detail = CRITERIA[number - 1]()
    with capsys.disabled():
        report(number, ok, detail)
    assert ok, detail


if __name__ == "__main__":
    results = [CRITERIA[i - 1]() for i in range(1, 10)]
    for i, (ok, detail) in enumerate(results, 1):
        report(i, ok, detail)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
