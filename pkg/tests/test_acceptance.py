"""Acceptance criteria, one test each.

Every test prints a single ``PASS``/``FAIL`` line (visible in ``pytest -v``
output) before asserting. Tolerances are fixed by the criteria themselves.
"""

import math
import time

import numpy as np
import pytest

from noiseinv import channel as ch
from noiseinv import linalg, measures, noise, randomops, sampling, verify
from noiseinv import experiments as ex
from noiseinv.cli import main
from noiseinv.noise import NoiseFamily
from noiseinv.sampling import EnsembleSpec

KINDS = ("pauli", "depolarizing", "dephasing", "amplitude_damping")
EPS_GRID = (0.01, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45)
AUDIT_EPS = (0.01, 0.05, 0.1, 0.2)
HAAR_SAMPLES = 10_000
SEED = 2024


def family(kind, n, eps):
    # pauli:zz on two qubits, pauli:z on one
    return NoiseFamily.parse("pauli:" + "z" * n if kind == "pauli" else kind, n, eps)


@pytest.fixture
def verdict(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {number}: {detail}")
        assert ok, detail
    return emit


@pytest.fixture(scope="module")
def haar_sweeps():
    """10^4 Haar pure two-qubit states per family, timed per family."""
    out = {}
    for kind in KINDS:
        cfg = ex.SweepConfig(
            family(kind, 2, 0.0), AUDIT_EPS, EnsembleSpec("haar", 2, HAAR_SAMPLES, SEED),
            inject_max_entangled=False,
        )
        t0 = time.perf_counter()
        res = ex.run_sweep(cfg)
        out[kind] = (res, time.perf_counter() - t0)
    return out


def test_criterion_01_closed_form_nu(verdict):
    t0 = time.perf_counter()
    worst, cases = 0.0, 0
    for kind in ("pauli", "depolarizing", "dephasing"):
        for n in (1, 2):
            for eps in EPS_GRID:
                f = family(kind, n, eps)
                if eps >= f.eps_max:
                    continue
                inv = noise.build_inverse(f)
                numeric = math.log2(linalg.trace_norm(inv.matrix) / 2**n)
                worst = max(worst, abs(noise.nu_inverse(f) - numeric))
                cases += 1
    dt = time.perf_counter() - t0
    verdict(1, worst < 1e-9 and dt < 5,
            f"{cases} cases, max |nu - log2(||L||_1/d)| = {worst:.2e} (< 1e-9), {dt:.2f}s (< 5s)")


def test_criterion_02_inverse_correctness(verdict):
    t0 = time.perf_counter()
    worst, cases = 0.0, 0
    for kind in KINDS:
        for n in (1, 2):
            for eps in EPS_GRID:
                f = family(kind, n, eps)
                if eps >= f.eps_max:
                    continue
                comp = ch.compose(noise.build_inverse(f), noise.build_channel(f))
                worst = max(worst, ch.choi_distance(comp, ch.identity_channel(f.dims)))
                cases += 1
    dt = time.perf_counter() - t0
    verdict(2, worst < 1e-9 and dt < 5,
            f"{cases} cases, max Frobenius error = {worst:.2e} (< 1e-9), {dt:.2f}s (< 5s)")


def test_criterion_03_max_entangled_closed_forms(verdict):
    closed = {
        "pauli": lambda e: 0.0,
        "depolarizing": lambda e: math.log2(1 - 0.75 * e),
        "dephasing": lambda e: math.log2(1 - 0.5 * e),
        "amplitude_damping": lambda e: math.log2(1 - e + e * e / 2),
    }
    bell = ch.max_entangled_state(2)
    e0 = measures.log_negativity(bell)
    worst = 0.0
    for kind in KINDS:
        for eps in (0.001, 0.01, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3):
            f = family(kind, 2, eps)
            sim = measures.log_negativity(ch.apply(noise.build_channel(f), bell)) - e0
            worst = max(worst, abs(sim - closed[kind](eps)), abs(noise.max_entangled_delta(f) - sim))
    verdict(3, worst < 1e-10, f"max |simulated - closed form| = {worst:.2e} (< 1e-10)")


def test_criterion_04_negativity_audit(verdict, haar_sweeps):
    parts, ok = [], True
    for kind, (res, dt) in haar_sweeps.items():
        bound = sum(s.bound_violation_count for s in res.summaries)
        incr = sum(s.increase_violation_count for s in res.summaries)
        margin = min(s.nu_inverse - s.abs_delta_max for s in res.summaries)
        counts = {s.count for s in res.summaries}
        ok &= bound == 0 and incr == 0 and dt < 120 and counts == {HAAR_SAMPLES}
        parts.append(f"{kind}: bound={bound} increase={incr} min slack={margin:.3g} {dt:.1f}s")
    verdict(4, ok, "; ".join(parts))


def test_criterion_05_purity_audit(verdict):
    parts, ok = [], True
    for kind in ("pauli", "depolarizing", "dephasing"):
        cfg = ex.SweepConfig(family(kind, 2, 0.0), AUDIT_EPS,
                             EnsembleSpec("haar", 2, HAAR_SAMPLES, SEED))
        res = ex.run_purity_audit(cfg)
        viol = sum(s.violation_count for s in res.summaries)
        ok &= viol == 0
        msg = f"{kind}: violations={viol}"
        if kind == "depolarizing":
            dev = max(s.max_exact_deviation for s in res.summaries)
            ok &= dev < 1e-9
            msg += f" exact deviation={dev:.2e} (< 1e-9)"
        parts.append(msg)
    verdict(5, ok, "; ".join(parts))


def test_criterion_06_depolarizing_spectrum(verdict):
    spec = EnsembleSpec("signed", 2, 100, SEED)
    rho = sampling.sample_batch(spec)
    worst = 0.0
    for eps in AUDIT_EPS:
        out = ch.apply_matrix(noise.build_channel(family("depolarizing", 2, eps)), rho)
        lam0 = linalg.jacobi_eigh(linalg.partial_transpose(rho, (2, 2), 1))[0]
        lam1 = linalg.jacobi_eigh(linalg.partial_transpose(out, (2, 2), 1))[0]
        worst = max(worst, float(np.max(np.abs(lam1 - ((1 - eps) * lam0 + eps / 4)))))

    cfg = ex.SweepConfig(family("depolarizing", 2, 0.0), AUDIT_EPS,
                         EnsembleSpec("signed", 2, HAAR_SAMPLES, SEED), inject_max_entangled=False)
    peaks_ok, peaks = True, []
    for s in ex.run_sweep(cfg).summaries:
        width = s.bin_edges[1] - s.bin_edges[0]
        target = math.log2(1 / (1 - s.epsilon))
        off = abs(s.peak - target) / width
        peaks_ok &= off <= 1.0
        peaks.append(f"eps={s.epsilon}: {off:.2f} bins")
    verdict(6, worst < 1e-10 and peaks_ok,
            f"spectrum max deviation {worst:.2e} (< 1e-10); peak offsets {', '.join(peaks)} (<= 1)")


def test_criterion_07_dephasing_witness(verdict):
    worst_delta = worst_en = 0.0
    for eps in EPS_GRID:
        f = family("dephasing", 2, eps)
        rho0 = verify.dephasing_witness(2, eps)
        out = ch.apply_matrix(noise.build_channel(f), rho0)
        e_in, e_out = measures.log_negativity(rho0), measures.log_negativity(out)
        worst_delta = max(worst_delta, abs(abs(e_out - e_in) - noise.nu_inverse(f)))
        worst_en = max(worst_en, abs(e_in - math.log2((4 + 2 * eps) / (4 * (1 - eps)))))
    verdict(7, worst_delta < 1e-9 and worst_en < 1e-10,
            f"max ||dE_N| - nu| = {worst_delta:.2e} (< 1e-9), max E_N error = {worst_en:.2e} (< 1e-10)")


def test_criterion_08_depolarizing_bounds(verdict):
    worst = 0.0
    for n in (1, 2):
        for eps in EPS_GRID:
            b = measures.nu_bounds(noise.build_inverse(family("depolarizing", n, eps)))
            lower = math.log2((1 + (1 - 2 / 4**n) * eps) / (1 - eps))
            upper = math.log2((1 + eps) / (1 - eps))
            worst = max(worst, abs(b.lower_max_eig - lower), abs(b.upper_min_eig - upper))
    verdict(8, worst < 1e-10, f"max bound error = {worst:.2e} (< 1e-10)")


def test_criterion_09_separability(verdict):
    cnot = np.eye(4)[[0, 1, 3, 2]]
    swap = np.eye(4)[[0, 2, 1, 3]]
    wrong = 0
    for u in (cnot, swap):
        wrong += bool(measures.separability_necessary(ch.choi_from_unitary(u, (2, 2))))
    rng = np.random.default_rng(SEED)
    for k in range(50):
        c = ch.tensor(randomops.cptp((2,), rng, 1 + k % 4), randomops.cptp((2,), rng, 1 + (k + 1) % 4))
        wrong += not measures.separability_necessary(c)
    verdict(9, wrong == 0, f"misclassifications = {wrong} out of 52")


def test_criterion_10_mu_relation(verdict, haar_sweeps):
    worst_ratio = 0.0
    for kind in KINDS:
        for n in (1, 2):
            for eps in (0.005, 0.01, 0.02, 0.03, 0.04, 0.05):
                f = family(kind, n, eps)
                gap = abs(noise.mu_inverse(f) - noise.nu_inverse(f) / 2)
                worst_ratio = max(worst_ratio, gap / (5 * eps * eps))
    fractions = []
    for kind, (res, _) in haar_sweeps.items():
        for s in res.summaries:
            if s.epsilon <= 0.05:
                fractions.append(f"{kind}@{s.epsilon}={s.mu_fraction:.4f}")
    verdict(10, worst_ratio < 1,
            f"max |mu - nu/2| / (5 eps^2) = {worst_ratio:.3f} (< 1); "
            f"observed fraction |dE_N| <= mu: {', '.join(fractions)}")


def test_criterion_11_determinism(verdict, tmp_path, capsys):
    args = ["sweep", "--noise", "amplitude_damping", "--ensemble", "signed",
            "--samples", "500", "--seed", "17", "--epsilons", "0.05,0.2"]
    for name in ("first", "second"):
        assert main(args + ["--out", str(tmp_path / name / "run.csv")]) in (0, 1)
    capsys.readouterr()
    same = all(
        (tmp_path / "first" / f).read_bytes() == (tmp_path / "second" / f).read_bytes()
        for f in ("run.csv", "run.summary.csv", "run.hist.csv")
    )
    verdict(11, same, "repeated seeded sweep files are byte-identical" if same else "outputs differ")
