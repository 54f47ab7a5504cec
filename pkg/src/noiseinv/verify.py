"""Self-checks of the library's invariants, grouped by module.

``run(target)`` executes every registered check for one module (or all of
them) and returns a JSON-serializable report. Sample counts are sized so the
whole run finishes in well under a minute.
"""

from __future__ import annotations

import math
import time
from typing import Callable

import numpy as np

from . import channel as ch
from . import experiments, linalg, measures, noise, randomops, sampling
from .noise import NoiseFamily, pauli_string

MODULES = ("linalg", "channel", "noise", "measures", "sampling", "expcli")
SUITES: dict[str, list[Callable]] = {m: [] for m in MODULES}

EPS_GRID = (0.05, 0.1, 0.2, 0.3, 0.45)
KINDS = ("pauli", "depolarizing", "dephasing", "amplitude_damping")
SEED = 20240601


def check(module: str):
    def register(fn):
        SUITES[module].append(fn)
        return fn
    return register


def _families(n_values=(1, 2), eps_grid=EPS_GRID, kinds=KINDS):
    for kind in kinds:
        for n in n_values:
            for e in eps_grid:
                f = NoiseFamily(kind, n)
                if e < f.eps_max:
                    yield f.with_epsilon(e)


# --- linalg -----------------------------------------------------------------


@check("linalg")
def tensor_trace_multiplicative():
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for _ in range(20):
        a, b = randomops.ginibre(2, rng), randomops.ginibre(4, rng)
        t = np.trace(linalg.tensor_product(a, b))
        worst = max(worst, abs(t - np.trace(a) * np.trace(b)))
    return worst < 1e-10, {"max_residual": worst}


@check("linalg")
def partial_trace_recovers_factors():
    rng = np.random.default_rng(SEED + 1)
    worst = 0.0
    for _ in range(20):
        a, b = randomops.hermitian(2, rng), randomops.hermitian(3, rng)
        ab = linalg.tensor_product(a, b)
        ra = linalg.partial_trace(ab, (2, 3), [0])
        rb = linalg.partial_trace(ab, (2, 3), [1])
        worst = max(worst, np.max(np.abs(ra - np.trace(b) * a)), np.max(np.abs(rb - np.trace(a) * b)))
    return worst < 1e-10, {"max_residual": float(worst)}


@check("linalg")
def partial_transpose_spectrum_sums_to_trace():
    rng = np.random.default_rng(SEED + 2)
    worst = 0.0
    for _ in range(20):
        h = randomops.hermitian(4, rng)
        w = linalg.hermitian_eigenvalues(linalg.partial_transpose(h, (2, 2), 1))
        worst = max(worst, abs(w.sum() - np.trace(h).real))
    return worst < 1e-10, {"max_residual": float(worst)}


@check("linalg")
def trace_norm_unitary_invariant():
    rng = np.random.default_rng(SEED + 3)
    worst = 0.0
    for _ in range(20):
        h = randomops.hermitian(4, rng)
        u = randomops.unitary(4, rng)
        worst = max(worst, abs(linalg.trace_norm(u @ h @ u.conj().T) - linalg.trace_norm(h)))
    return worst < 1e-10, {"max_residual": float(worst)}


@check("linalg")
def eigenvalues_match_characteristic_roots():
    rng = np.random.default_rng(SEED + 4)
    worst = 0.0
    for _ in range(20):
        h = randomops.hermitian(4, rng)
        roots = np.sort(np.roots(np.poly(h)).real)
        worst = max(worst, np.max(np.abs(linalg.hermitian_eigenvalues(h) - roots)))
    return worst < 1e-8, {"max_residual": float(worst)}


# --- channel ----------------------------------------------------------------


@check("channel")
def kraus_choi_is_cptp():
    rng = np.random.default_rng(SEED + 10)
    bad = 0
    for k in (1, 2, 4):
        for dims in ((2,), (2, 2)):
            c = randomops.cptp(dims, rng, k)
            bad += not (ch.is_hp(c) and ch.is_tp(c) and ch.is_cp(c))
    return bad == 0, {"failures": bad}


@check("channel")
def hptp_preserves_trace_and_hermiticity():
    rng = np.random.default_rng(SEED + 11)
    worst = 0.0
    for f in _families(eps_grid=(0.1, 0.3)):
        inv = noise.build_inverse(f)
        for _ in range(5):
            rho = randomops.unit_trace_hermitian(f.d, rng)
            out = ch.apply_matrix(inv, rho)
            worst = max(worst, abs(np.trace(out) - 1), np.max(np.abs(out - out.conj().T)))
    return worst < 1e-10, {"max_residual": float(worst)}


@check("channel")
def inverse_composes_to_identity():
    worst = 0.0
    for f in _families():
        ident = ch.identity_channel(f.dims)
        worst = max(worst, ch.choi_distance(ch.compose(noise.build_inverse(f), noise.build_channel(f)), ident))
    return worst < 1e-9, {"max_frobenius": worst}


@check("channel")
def partial_transpose_lemma():
    rng = np.random.default_rng(SEED + 12)
    worst = 0.0
    for kind in KINDS:
        for trial in range(25):
            f = NoiseFamily(kind, 2, float(rng.uniform(0.01, 0.45)))
            c = noise.build_inverse(f) if trial % 2 else noise.build_channel(f)
            rho = randomops.unit_trace_hermitian(4, rng)
            lhs = linalg.partial_transpose(ch.apply_matrix(c, rho), (2, 2), 1)
            rhs = ch.apply_matrix(ch.map_partial_transpose(c), linalg.partial_transpose(rho, (2, 2), 1))
            worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst < 1e-9, {"max_residual": worst}


@check("channel")
def conjugated_orthogonal_decomposition_stays_orthogonal():
    rng = np.random.default_rng(SEED + 13)
    bad = 0
    for kind in ("pauli", "depolarizing", "dephasing"):
        dec = noise.channel_decomposition(NoiseFamily(kind, 2, 0.2))
        for _ in range(5):
            moved = dec.conjugated(randomops.unitary(4, rng), randomops.unitary(4, rng))
            bad += not moved.is_orthogonal
    return bad == 0, {"failures": bad}


@check("channel")
def tensor_of_orthogonal_decompositions_is_orthogonal():
    bad = 0
    for ka in ("pauli", "depolarizing", "dephasing"):
        for kb in ("pauli", "depolarizing", "dephasing"):
            a = noise.inverse_decomposition(NoiseFamily(ka, 1, 0.1))
            b = noise.inverse_decomposition(NoiseFamily(kb, 1, 0.3))
            bad += not a.tensor(b).is_orthogonal
    return bad == 0, {"failures": bad}


# --- noise ------------------------------------------------------------------


@check("noise")
def nu_matches_trace_norm():
    """Closed-form nu against log2(||L_inv||_1 / d) for orthogonal families."""
    worst = 0.0
    for f in _families(kinds=("pauli", "depolarizing", "dephasing"),
                       eps_grid=tuple(round(0.05 * k, 2) for k in range(1, 10))):
        tn = linalg.trace_norm(noise.build_inverse(f).matrix)
        worst = max(worst, abs(noise.nu_inverse(f) - math.log2(tn / f.d)))
    return worst < 1e-9, {"max_residual": worst}


@check("noise")
def max_entangled_matches_simulation():
    worst = 0.0
    bell = ch.max_entangled_state(2)
    e0 = measures.log_negativity(bell)
    for kind in KINDS:
        for e in (0.001, 0.01, 0.05, 0.1, 0.2, 0.3):
            f = NoiseFamily(kind, 2, e)
            sim = measures.log_negativity(ch.apply(noise.build_channel(f), bell)) - e0
            worst = max(worst, abs(sim - noise.max_entangled_delta(f)))
    return worst < 1e-10, {"max_residual": worst}


@check("noise")
def channel_cp_inverse_not_cp():
    bad = []
    for f in _families():
        if not ch.is_cp(noise.build_channel(f)) or ch.is_cp(noise.build_inverse(f)):
            bad.append(f"{f.label}/n={f.n}/eps={f.epsilon}")
    return not bad, {"failures": bad}


@check("noise")
def depolarizing_spectrum_shift():
    rng = np.random.default_rng(SEED + 20)
    worst = 0.0
    for _ in range(30):
        e = float(rng.uniform(0.01, 0.5))
        rho0 = randomops.unit_trace_hermitian(4, rng)
        out = ch.apply_matrix(noise.build_channel(NoiseFamily("depolarizing", 2, e)), rho0)
        w0 = linalg.hermitian_eigenvalues(linalg.partial_transpose(rho0, (2, 2), 1))
        w = linalg.hermitian_eigenvalues(linalg.partial_transpose(out, (2, 2), 1))
        worst = max(worst, float(np.max(np.abs(w - ((1 - e) * w0 + e / 4)))))
    return worst < 1e-10, {"max_residual": worst}


@check("noise")
def dephasing_bloch_shrinkage():
    rng = np.random.default_rng(SEED + 21)
    worst = 0.0
    for n in (1, 2):
        for _ in range(10):
            e = float(rng.uniform(0.01, 0.9))
            rho0 = randomops.density(2**n, rng)
            out = ch.apply_matrix(noise.build_channel(NoiseFamily("dephasing", n, e)), rho0)
            r0 = measures.bloch_vector(rho0)
            r = measures.bloch_vector(out)
            z_only = np.array([all(a in (0, 3) for a in lab) for lab in r0.labels])
            expect = np.where(z_only, r0.coefficients, (1 - e) * r0.coefficients)
            worst = max(worst, float(np.max(np.abs(r.coefficients - expect))))
    return worst < 1e-12, {"max_residual": worst}


# --- measures ---------------------------------------------------------------


def _random_signed_pauli_map(n: int, rng) -> ch.MixedUnitaryDecomposition:
    labels = noise.pauli_labels(n)
    k = int(rng.integers(2, len(labels) + 1))
    pick = rng.choice(len(labels), size=k, replace=False)
    q = rng.normal(size=k)
    q[0] += 1 - q.sum()
    return ch.MixedUnitaryDecomposition(tuple(q), tuple(pauli_string(labels[i]) for i in pick))


@check("measures")
def purity_growth_bounded_by_implementability():
    rng = np.random.default_rng(SEED + 30)
    worst = -np.inf
    for _ in range(40):
        n = int(rng.integers(1, 3))
        dec = _random_signed_pauli_map(n, rng)
        c = ch.choi_from_mixed_unitary(dec)
        nu = measures.nu_orthogonal(c, dec)
        rho0 = randomops.unit_trace_hermitian(2**n, rng)
        d = 2**n
        out = ch.apply_matrix(c, rho0)
        ratio = math.log2((measures.purity(out) * d - 1) / (measures.purity(rho0) * d - 1))
        worst = max(worst, ratio - 2 * nu)
    return worst <= 1e-9, {"max_excess": worst}


@check("measures")
def purity_decrease_bounded_for_noise():
    rng = np.random.default_rng(SEED + 31)
    viol = 0
    for f in _families(kinds=("pauli", "depolarizing", "dephasing"), eps_grid=(0.05, 0.2, 0.4)):
        c = noise.build_channel(f)
        nu = noise.nu_inverse(f)
        for _ in range(10):
            rho0 = randomops.density(f.d, rng)
            out = ch.apply_matrix(c, rho0)
            ratio = math.log2((measures.purity(out) * f.d - 1) / (measures.purity(rho0) * f.d - 1))
            viol += not (-2 * nu - 1e-9 <= ratio <= 1e-9)
    return viol == 0, {"violations": viol}


@check("measures")
def negativity_decrease_bounded_for_noise():
    rng = np.random.default_rng(SEED + 32)
    viol = 0
    for f in _families(n_values=(2,), eps_grid=(0.05, 0.2, 0.4)):
        c = noise.build_channel(f)
        nu = noise.nu_inverse(f)
        for _ in range(20):
            rho0 = randomops.density(4, rng, rank=int(rng.integers(1, 5)))
            delta = measures.log_negativity(ch.apply_matrix(c, rho0)) - measures.log_negativity(rho0)
            viol += not (-nu - 1e-9 <= delta <= 1e-9)
    return viol == 0, {"violations": viol}


@check("measures")
def product_channels_contract_partial_transpose_norm():
    rng = np.random.default_rng(SEED + 33)
    worst = -np.inf
    for _ in range(30):
        c = ch.tensor(randomops.cptp((2,), rng), randomops.cptp((2,), rng))
        rho0 = randomops.unit_trace_hermitian(4, rng)
        before = linalg.trace_norm(linalg.partial_transpose(rho0, (2, 2), 1))
        after = linalg.trace_norm(linalg.partial_transpose(ch.apply_matrix(c, rho0), (2, 2), 1))
        worst = max(worst, after - before)
    return worst <= 1e-10, {"max_excess": worst}


@check("measures")
def exact_nu_within_bounds():
    bad = []
    for f in _families(kinds=("pauli", "depolarizing", "dephasing")):
        inv = noise.build_inverse(f)
        nu = measures.nu_orthogonal(inv, noise.inverse_decomposition(f))
        if not measures.nu_bounds(inv).contains(nu):
            bad.append(f"{f.label}/n={f.n}/eps={f.epsilon}")
    for f in _families(kinds=("amplitude_damping",)):
        if not measures.nu_bounds(noise.build_inverse(f)).contains(noise.nu_inverse(f)):
            bad.append(f"{f.label}/n={f.n}/eps={f.epsilon}")
    return not bad, {"failures": bad}


def dephasing_witness(n: int, eps: float) -> np.ndarray:
    """Non-physical input mapped by dephasing onto ``|+...+><+...+|``."""
    plus = np.full(2**n, 2 ** (-n / 2), dtype=complex)
    d = 2**n
    return np.outer(plus, plus.conj()) / (1 - eps) - eps / (d * (1 - eps)) * np.eye(d)


@check("measures")
def dephasing_witness_saturates_bound():
    worst = 0.0
    for e in (0.01, 0.1, 0.3, 0.6):
        f = NoiseFamily("dephasing", 2, e)
        rho0 = dephasing_witness(2, e)
        en0 = measures.log_negativity(rho0)
        out = ch.apply_matrix(noise.build_channel(f), rho0)
        gap = abs(abs(measures.log_negativity(out) - en0) - noise.nu_inverse(f))
        closed = abs(en0 - math.log2((4 + 2 * e) / (4 * (1 - e))))
        worst = max(worst, gap, closed)
    return worst < 1e-9, {"max_residual": worst}


# --- sampling ---------------------------------------------------------------


@check("sampling")
def stream_is_deterministic():
    bad = 0
    for kind in sampling.ENSEMBLES:
        spec = sampling.EnsembleSpec(kind, 2, 50, 1234)
        bad += not np.array_equal(sampling.sample_batch(spec), sampling.sample_batch(spec))
        # a single sample regenerated alone matches its slot in the batch
        bad += not np.array_equal(sampling.sample_matrix(spec, 17), sampling.sample_batch(spec, 17, 18)[0])
    return bad == 0, {"failures": bad}


def _ks_statistic(a: np.ndarray, b: np.ndarray) -> float:
    grid = np.sort(np.concatenate([a, b]))
    fa = np.searchsorted(np.sort(a), grid, side="right") / a.size
    fb = np.searchsorted(np.sort(b), grid, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


@check("sampling")
def haar_negativity_is_unitarily_invariant():
    """Coarse two-sample test: KS distance below 0.1 for 2000 samples."""
    spec = sampling.EnsembleSpec("haar", 2, 2000, 99)
    rho = sampling.sample_batch(spec)
    u = sampling.random_unitary(4, 7)
    moved = u @ rho @ u.conj().T
    ks = _ks_statistic(measures.log_negativity(rho), measures.log_negativity(moved))
    return ks < 0.1, {"ks_distance": ks}


# --- expcli -----------------------------------------------------------------


def _sweep(kind: str, ensemble="haar", count=1000, eps=(0.01, 0.05, 0.1, 0.2), seed=SEED):
    cfg = experiments.SweepConfig(
        NoiseFamily.parse(kind, 2), eps, sampling.EnsembleSpec(ensemble, 2, count, seed)
    )
    return experiments.run_sweep(cfg)


@check("expcli")
def negativity_bound_holds_over_ensembles():
    out = {}
    for kind in ("pauli:zz", "depolarizing", "dephasing", "amplitude_damping"):
        out[kind] = _sweep(kind).violations
    return all(v == 0 for v in out.values()), {"violations": out}


@check("expcli")
def injected_max_entangled_matches_closed_form():
    worst = 0.0
    for kind in ("pauli:zz", "depolarizing", "dephasing", "amplitude_damping"):
        for s in _sweep(kind, count=10).summaries:
            worst = max(worst, abs(s.max_entangled_simulated - s.max_entangled_delta))
    return worst < 1e-10, {"max_residual": worst}


@check("expcli")
def max_entangled_brackets_haar_ensemble():
    dep = _sweep("depolarizing").summaries
    zz = _sweep("pauli:zz").summaries
    sup_ok = all(s.abs_delta_max <= abs(s.max_entangled_delta) + 1e-10 for s in dep)
    inf_ok = all(s.max_entangled_delta == 0.0 and s.abs_delta_min >= 0.0 for s in zz)
    return sup_ok and inf_ok, {
        "depolarizing_max": [s.abs_delta_max for s in dep],
        "depolarizing_curve": [abs(s.max_entangled_delta) for s in dep],
    }


@check("expcli")
def mu_fraction_reported():
    """Observation only: share of physical samples with |delta| <= mu."""
    frac = {}
    for kind in ("pauli:zz", "depolarizing", "dephasing", "amplitude_damping"):
        frac[kind] = [s.mu_fraction for s in _sweep(kind, count=500).summaries]
    return True, {"mu_fraction": frac}


@check("expcli")
def csv_output_is_deterministic():
    a = _sweep("dephasing", count=50, eps=(0.1,))
    b = _sweep("dephasing", count=50, eps=(0.1,))
    meta = experiments.metadata(a.config, "sweep")
    ta = experiments.to_csv(meta, a.columns, experiments.RECORD_FIELDS)
    tb = experiments.to_csv(meta, b.columns, experiments.RECORD_FIELDS)
    return ta == tb, {"bytes": len(ta)}


# --- runner -----------------------------------------------------------------


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.generic):
        x = x.item()
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    return x


def run(target: str = "all") -> dict:
    if target != "all" and target not in SUITES:
        raise ValueError(f"unknown verify target {target!r}; expected 'all' or one of {MODULES}")
    modules = MODULES if target == "all" else (target,)
    report = {"target": target, "passed": True, "suites": {}}
    for m in modules:
        results = []
        for fn in SUITES[m]:
            t0 = time.perf_counter()
            try:
                ok, detail = fn()
            except Exception as exc:  # a crash is a failure, not an abort
                ok, detail = False, {"error": f"{type(exc).__name__}: {exc}"}
            results.append({
                "name": fn.__name__,
                "passed": bool(ok),
                "seconds": round(time.perf_counter() - t0, 3),
                "detail": _jsonable(detail),
            })
            report["passed"] &= bool(ok)
        report["suites"][m] = results
    return report
