"""Monte-Carlo negativity sweeps, purity audits and closed-form tables.

Samples are processed as stacked arrays, so one epsilon is a single
vectorized pass over the whole ensemble; record order is sample-index order.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from . import channel as ch
from . import linalg, measures, noise, sampling
from .channel import ChoiOperator
from .noise import NoiseFamily
from .sampling import EnsembleSpec

TOL = 1e-9
HIST_BINS = 100
PERCENTILES = (5, 25, 50, 75, 95)

RECORD_FIELDS = (
    "epsilon", "sample_index", "source", "E_N_in", "E_N_out", "delta",
    "purity_in", "purity_out", "physical_in", "flag",
)
AUDIT_FIELDS = (
    "epsilon", "sample_index", "purity_in", "purity_out", "ratio",
    "lower_bound", "bloch_shrink", "physical_in", "flag",
)


class ConfigError(ValueError):
    """Invalid experiment configuration."""


@dataclass(frozen=True)
class SweepConfig:
    noise: NoiseFamily
    epsilons: tuple[float, ...]
    ensemble: EnsembleSpec
    cut: int | None = None
    output: str | None = None
    format: str = "csv"
    inject_max_entangled: bool = True
    bins: int = HIST_BINS

    def __post_init__(self):
        eps = tuple(float(e) for e in self.epsilons)
        if not eps:
            raise ConfigError("need at least one epsilon")
        for e in eps:
            if not 0.0 < e < self.noise.eps_max:
                raise ConfigError(
                    f"epsilon {e} outside (0, {self.noise.eps_max}) for {self.noise.kind}"
                )
        if self.ensemble.n != self.noise.n:
            raise ConfigError("ensemble and noise act on different qubit counts")
        cut = self.cut
        if self.noise.n >= 2 or cut is not None:
            cut = self.noise.n // 2 if cut is None else int(cut)
            if not 0 < cut < self.noise.n:
                raise ConfigError(f"cut {cut} does not split {self.noise.n} qubits")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"unknown output format {self.format!r}")
        object.__setattr__(self, "epsilons", eps)
        object.__setattr__(self, "cut", cut)

    @property
    def dims(self) -> tuple[int, ...]:
        return self.noise.dims

    def describe(self) -> dict:
        return {
            "noise": self.noise.label,
            "qubits": self.noise.n,
            "epsilons": list(self.epsilons),
            "ensemble": self.ensemble.kind,
            "samples": self.ensemble.count,
            "seed": self.ensemble.seed,
            "cut": self.cut,
            "format": self.format,
            "inject_max_entangled": self.inject_max_entangled,
            "bins": self.bins,
        }


@dataclass
class SweepRecord:
    epsilon: float
    sample_index: int
    source: str
    E_N_in: float
    E_N_out: float
    delta: float
    purity_in: float
    purity_out: float
    physical_in: bool
    flag: str


@dataclass
class EpsilonSummary:
    epsilon: float
    count: int
    abs_delta_min: float
    abs_delta_max: float
    abs_delta_mean: float
    percentiles: dict
    bin_edges: list
    densities: list
    out_of_range: int
    nu_inverse: float
    mu_inverse: float
    max_entangled_delta: float | None
    max_entangled_simulated: float | None
    physical_count: int
    bound_violation_count: int
    increase_violation_count: int
    mu_exceed_count: int
    mu_fraction: float | None

    @property
    def histogram_area(self) -> float:
        widths = np.diff(self.bin_edges)
        return float(np.sum(np.asarray(self.densities) * widths))

    @property
    def peak(self) -> float:
        """Centre of the highest histogram bin."""
        k = int(np.argmax(self.densities))
        return 0.5 * (self.bin_edges[k] + self.bin_edges[k + 1])


@dataclass
class SweepResult:
    config: SweepConfig
    columns: dict
    summaries: list[EpsilonSummary] = field(default_factory=list)

    @property
    def violations(self) -> int:
        return sum(s.bound_violation_count + s.increase_violation_count for s in self.summaries)

    def records(self):
        n = len(self.columns["epsilon"])
        for i in range(n):
            yield SweepRecord(**{k: _py(self.columns[k][i]) for k in RECORD_FIELDS})

    def summary_for(self, epsilon: float) -> EpsilonSummary:
        for s in self.summaries:
            if math.isclose(s.epsilon, epsilon):
                return s
        raise KeyError(epsilon)


def _py(x):
    if isinstance(x, np.generic):
        return x.item()
    return x


def physical_flags(rho: np.ndarray, atol: float = TOL) -> np.ndarray:
    """PSD test per stacked operator; eigenvalues within ``atol`` of 0 count as 0."""
    w = linalg.jacobi_eigh(rho)[0]
    return w[..., 0] >= -atol


def _inputs(cfg: SweepConfig):
    rho = sampling.sample_batch(cfg.ensemble)
    source = ["ensemble"] * len(rho)
    index = list(range(len(rho)))
    if cfg.inject_max_entangled and cfg.noise.n % 2 == 0 and cfg.cut == cfg.noise.n // 2:
        bell = ch.max_entangled_state(cfg.noise.n).matrix
        rho = np.concatenate([bell[None], rho])
        source = ["max_entangled"] + source
        index = [-1] + index
    return rho, np.array(index), np.array(source)


def run_sweep(cfg: SweepConfig) -> SweepResult:
    """Change of log-negativity over an ensemble for every epsilon.

    The maximally entangled state, when injected, is sample ``-1`` and is
    excluded from the distribution statistics.
    """
    if cfg.cut is None:
        raise ConfigError("negativity sweeps need at least two qubits")
    rho0, index, source = _inputs(cfg)
    dims = cfg.dims
    en_in = measures.log_negativity(rho0, cfg.cut, dims)
    p_in = measures.purity(rho0)
    phys = physical_flags(rho0)
    ens = source == "ensemble"

    cols = {k: [] for k in RECORD_FIELDS}
    summaries = []
    for eps in cfg.epsilons:
        fam = cfg.noise.with_epsilon(eps)
        out = ch.apply_matrix(noise.build_channel(fam), rho0)
        en_out = measures.log_negativity(out, cfg.cut, dims)
        p_out = measures.purity(out)
        delta = en_out - en_in
        flag = np.where(np.abs(en_in) <= TOL, "separable_input", "ok")
        m = len(rho0)
        cols["epsilon"].append(np.full(m, eps))
        cols["sample_index"].append(index)
        cols["source"].append(source)
        cols["E_N_in"].append(en_in)
        cols["E_N_out"].append(en_out)
        cols["delta"].append(delta)
        cols["purity_in"].append(p_in)
        cols["purity_out"].append(p_out)
        cols["physical_in"].append(phys)
        cols["flag"].append(flag)
        summaries.append(_summarize(cfg, fam, delta, phys, ens, source))

    columns = {k: np.concatenate(v) for k, v in cols.items()}
    return SweepResult(cfg, columns, summaries)


def _summarize(cfg, fam: NoiseFamily, delta, phys, ens, source) -> EpsilonSummary:
    nu = noise.nu_inverse(fam)
    mu = noise.mu_inverse(fam)
    a = np.abs(delta[ens])
    edges = np.linspace(0.0, nu, cfg.bins + 1)
    counts, _ = np.histogram(a, bins=edges)
    inside = int(counts.sum())
    widths = np.diff(edges)
    dens = counts / (inside * widths) if inside else np.zeros_like(widths)
    ph = phys & ens
    pa = np.abs(delta[ph])
    bound_v = int(np.sum(pa > nu + TOL))
    incr_v = int(np.sum(delta[ph] > TOL))
    mu_exceed = int(np.sum(pa > mu))
    try:
        me = noise.max_entangled_delta(fam) if cfg.cut == cfg.noise.n // 2 else None
    except (ValueError, NotImplementedError):
        me = None
    sim = delta[source == "max_entangled"]
    return EpsilonSummary(
        epsilon=fam.epsilon,
        count=int(a.size),
        abs_delta_min=float(a.min()),
        abs_delta_max=float(a.max()),
        abs_delta_mean=float(a.mean()),
        percentiles={str(p): float(np.percentile(a, p)) for p in PERCENTILES},
        bin_edges=[float(x) for x in edges],
        densities=[float(x) for x in dens],
        out_of_range=int(a.size - inside),
        nu_inverse=nu,
        mu_inverse=mu,
        max_entangled_delta=me,
        max_entangled_simulated=float(sim[0]) if sim.size else None,
        physical_count=int(ph.sum()),
        bound_violation_count=bound_v,
        increase_violation_count=incr_v,
        mu_exceed_count=mu_exceed,
        mu_fraction=float(np.mean(pa <= mu)) if pa.size else None,
    )


# --- purity audit -----------------------------------------------------------


class AuditRefused(ValueError):
    """The purity bound does not apply to this noise family."""


@dataclass
class AuditSummary:
    epsilon: float
    count: int
    degenerate_count: int
    violation_count: int
    shrink_violation_count: int | None
    max_exact_deviation: float | None
    nu_inverse: float
    ratio_min: float
    ratio_max: float


@dataclass
class AuditResult:
    config: SweepConfig
    columns: dict
    summaries: list[AuditSummary]

    @property
    def violations(self) -> int:
        return sum(s.violation_count + (s.shrink_violation_count or 0) for s in self.summaries)


def run_purity_audit(cfg: SweepConfig) -> AuditResult:
    """Check ``-2 nu <= log2[(P d - 1)/(P0 d - 1)] <= 0`` per sample.

    Samples whose input or output Bloch vector vanishes make the ratio
    undefined; they are kept with ``flag = "degenerate"`` and ``ratio = nan``.
    """
    if cfg.noise.kind == "amplitude_damping":
        raise AuditRefused(
            "purity bound needs a noise whose inverse is an orthogonal mixed-unitary map; "
            "amplitude damping is not mixed-unitary"
        )
    rho0 = sampling.sample_batch(cfg.ensemble)
    d = cfg.noise.d
    p_in = measures.purity(rho0)
    phys = physical_flags(rho0)
    index = np.arange(len(rho0))
    cols = {k: [] for k in AUDIT_FIELDS}
    summaries = []
    for eps in cfg.epsilons:
        fam = cfg.noise.with_epsilon(eps)
        nu = noise.nu_inverse(fam)
        out = ch.apply_matrix(noise.build_channel(fam), rho0)
        p_out = measures.purity(out)
        num = p_out * d - 1
        den = p_in * d - 1
        degenerate = (np.abs(den) <= TOL) | (np.abs(num) <= TOL)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(degenerate, np.nan, np.log2(num / den))
            shrink = np.where(degenerate, np.nan, np.sqrt(num / den))
        ok = ~degenerate
        viol = int(np.sum((ratio[ok] < -2 * nu - TOL) | (ratio[ok] > TOL)))
        shrink_v = None
        if fam.kind == "dephasing":
            s = shrink[ok]
            shrink_v = int(np.sum((s < 1 - eps - TOL) | (s > 1 + TOL)))
        exact = None
        if fam.kind == "depolarizing":
            exact = float(np.max(np.abs(ratio[ok] - 2 * math.log2(1 - eps)))) if ok.any() else 0.0
        m = len(rho0)
        cols["epsilon"].append(np.full(m, eps))
        cols["sample_index"].append(index)
        cols["purity_in"].append(p_in)
        cols["purity_out"].append(p_out)
        cols["ratio"].append(ratio)
        cols["lower_bound"].append(np.full(m, -2 * nu))
        cols["bloch_shrink"].append(shrink)
        cols["physical_in"].append(phys)
        cols["flag"].append(np.where(degenerate, "degenerate", "ok"))
        summaries.append(AuditSummary(
            epsilon=eps,
            count=m,
            degenerate_count=int(degenerate.sum()),
            violation_count=viol,
            shrink_violation_count=shrink_v,
            max_exact_deviation=exact,
            nu_inverse=nu,
            ratio_min=float(np.nanmin(ratio)) if ok.any() else float("nan"),
            ratio_max=float(np.nanmax(ratio)) if ok.any() else float("nan"),
        ))
    columns = {k: np.concatenate(v) for k, v in cols.items()}
    return AuditResult(cfg, columns, summaries)


# --- closed-form tables -----------------------------------------------------


def analytic_table(family: NoiseFamily, epsilons: Sequence[float]) -> list[dict]:
    rows = []
    for eps in epsilons:
        f = family.with_epsilon(eps)
        try:
            me = noise.max_entangled_delta(f)
        except (ValueError, NotImplementedError):
            me = None
        rows.append({
            "noise": f.label,
            "qubits": f.n,
            "epsilon": eps,
            "nu_inverse": noise.nu_inverse(f),
            "mu_inverse": noise.mu_inverse(f),
            "max_entangled_delta": me,
        })
    return rows


# --- channel ingestion ------------------------------------------------------


def ingest_channel(source, cut: int | None = None) -> dict:
    """Audit an external channel: predicates, bounds, separability test.

    ``source`` is a path to a Choi JSON file or a :class:`ChoiOperator`.
    """
    c = source if isinstance(source, ChoiOperator) else ch.load_json(source)
    report = {
        "d": c.d,
        "factorization": list(c.dims),
        "is_hp": ch.is_hp(c),
        "is_tp": ch.is_tp(c),
        "is_cp": ch.is_cp(c),
    }
    if report["is_hp"]:
        report["channel_bounds"] = measures.nu_bounds(c).as_dict()
    try:
        inv = ch.inverse(c)
    except linalg.SingularMatrixError as exc:
        report["invertible"] = False
        report["condition"] = exc.condition
        report["inverse_bounds"] = None
    else:
        report["invertible"] = True
        report["inverse_bounds"] = measures.nu_bounds(inv).as_dict() if ch.is_hp(inv) else None
    if len(c.dims) >= 2:
        v = measures.separability_necessary(c, cut)
        report["separable_necessary"] = v.passes
        report["separability_violation"] = v.violation
        report["separability_witness"] = list(v.witness) if v.witness else None
    else:
        report["separable_necessary"] = None
    return report


# --- output -----------------------------------------------------------------


def metadata(cfg: SweepConfig, command: str) -> dict:
    return {
        "command": command,
        "package": f"noiseinv {__version__}",
        "numpy": np.__version__,
        "generator": sampling.GENERATOR,
        "config": cfg.describe(),
    }


def _fmt(x) -> str:
    x = _py(x)
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, float):
        return repr(x)
    return str(x)


def to_csv(meta: dict, columns: dict, fields: Sequence[str]) -> str:
    buf = io.StringIO()
    for key, value in meta.items():
        buf.write(f"# {key}: {json.dumps(value, sort_keys=True)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(fields)
    n = len(columns[fields[0]])
    for i in range(n):
        w.writerow([_fmt(columns[k][i]) for k in fields])
    return buf.getvalue()


def _jsonable(x):
    x = _py(x)
    if isinstance(x, float) and not math.isfinite(x):
        return None
    return x


def to_json(meta: dict, columns: dict, fields: Sequence[str], summaries) -> str:
    n = len(columns[fields[0]])
    doc = {
        "metadata": meta,
        "summary": [
            {k: (_jsonable(v) if not isinstance(v, (list, dict)) else v)
             for k, v in asdict(s).items()}
            for s in summaries
        ],
        "records": [{k: _jsonable(columns[k][i]) for k in fields} for i in range(n)],
    }
    return json.dumps(doc, indent=1, sort_keys=False)


def summary_table(summaries) -> list[dict]:
    """Summaries without per-bin arrays, for CSV side files and printing."""
    rows = []
    for s in summaries:
        row = {k: v for k, v in asdict(s).items() if k not in ("bin_edges", "densities")}
        if "percentiles" in row:
            for p, v in row.pop("percentiles").items():
                row[f"p{p}"] = v
        rows.append(row)
    return rows


def write_result(result, path, fmt: str, command: str) -> Path:
    """Write records (and a summary block) to ``path`` in ``csv`` or ``json``."""
    path = Path(path)
    meta = metadata(result.config, command)
    fields = RECORD_FIELDS if isinstance(result, SweepResult) else AUDIT_FIELDS
    if fmt == "json":
        text = to_json(meta, result.columns, fields, result.summaries)
    else:
        text = to_csv(meta, result.columns, fields)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    if fmt == "csv":
        rows = summary_table(result.summaries)
        side = path.with_name(path.stem + ".summary.csv")
        buf = io.StringIO()
        for key, value in meta.items():
            buf.write(f"# {key}: {json.dumps(value, sort_keys=True)}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(rows[0].keys())
        for r in rows:
            w.writerow([_fmt(v) if v is not None else "" for v in r.values()])
        with open(side, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())
        if isinstance(result, SweepResult):
            hist = path.with_name(path.stem + ".hist.csv")
            buf = io.StringIO()
            for key, value in meta.items():
                buf.write(f"# {key}: {json.dumps(value, sort_keys=True)}\n")
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(["epsilon", "bin_lo", "bin_hi", "density"])
            for s in result.summaries:
                for k, dens in enumerate(s.densities):
                    w.writerow([_fmt(s.epsilon), _fmt(s.bin_edges[k]),
                                _fmt(s.bin_edges[k + 1]), _fmt(dens)])
            with open(hist, "w", encoding="utf-8", newline="") as fh:
                fh.write(buf.getvalue())
    return path
