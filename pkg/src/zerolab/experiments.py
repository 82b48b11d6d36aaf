"""Seeded multi-trial experiments over polynomial ensembles.

Each runner turns one configuration into a flat list of trial records:
degree, trial index, region label, observed statistic (zero count over n,
slice volume over n, log-modulus, certificate flag), the deterministic
reference value for that region, and the RNG provenance needed to re-run
the trial.  Records serialize to JSON lines and summaries to CSV, both
carrying a schema version; identical (config, master seed) pairs produce
byte-identical files regardless of how trials were scheduled.

Randomness: every trial owns the counter-based stream
(master_seed, kind_id, degree, trial), so parallel execution cannot
reorder draws.  Necessity scans instead fix one stream per trial and use
prefixes of a single coefficient sequence across the degree ladder, which
is the reading where a single heavy draw eventually dominates every later
degree.
"""

from __future__ import annotations

import csv
import json
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConfigError
from .ensembles import (
    CoefficientLaw,
    RngStream,
    assemble_polynomial,
    log_moment_finite,
    sample_coefficients,
)
from .extremal import RegionSpec, build_evaluator, extremal_value, reference_mass
from .onb import build_onb, elliptic_onb
from .stahltotik import (
    RegularMeasureSpec,
    build_recurrence_onb,
    equilibrium_mass,
    roots_of_combination,
)
from .weights import WeightSpec, make_weight
from .zeros import (
    AP_FALLBACK_NATS,
    angular_ks_statistic,
    coefficient_log_range,
    count_zeros_annulus_ap,
    count_zeros_rect,
    count_zeros_region,
    log_eval_points,
    roots_of,
    slice_volume,
)

SCHEMA_VERSION = 1
DEFAULT_EPSILONS = (0.05, 0.1, 0.2)
_KIND_IDS = {
    "equidistribution": 1,
    "probability_convergence": 1,  # shares streams with equidistribution
    "pointwise_tail": 3,
    "necessity": 4,
    "bergman": 6,
    "onp_check": 7,
}


# ---------------------------------------------------------------------------
# regions


@dataclass(frozen=True)
class RectRegion:
    """Axis-aligned rectangle [a, b] x [-h, h]; the region type for measures
    supported on the real line."""

    a: float
    b: float
    half_height: float = 0.1

    def __post_init__(self):
        if self.b < self.a:
            raise ConfigError("interval must satisfy a <= b")
        if self.half_height <= 0:
            raise ConfigError("half_height must be positive")

    def label(self) -> str:
        return f"ivl{self.a:g}-{self.b:g}@h{self.half_height:g}"


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class ExperimentConfig:
    ensemble: dict
    coefficients: CoefficientLaw
    degrees: tuple
    trials: int
    regions: tuple
    probes: tuple
    epsilons: tuple
    experiment_kind: str
    seed: int
    caps: dict = field(default_factory=dict)


def _parse_region(entry, m: int):
    if not isinstance(entry, dict):
        raise ConfigError(f"region entries must be objects, got {type(entry).__name__}")
    if "interval" in entry:
        a, b = entry["interval"]
        return RectRegion(float(a), float(b), float(entry.get("half_height", 0.1)))
    if "annuli" not in entry:
        raise ConfigError("region needs 'annuli' or 'interval'")
    annuli = tuple((float(a), float(b)) for a, b in entry["annuli"])
    if len(annuli) != m:
        raise ConfigError(f"region has {len(annuli)} annuli, ensemble dimension is {m}")
    sectors = entry.get("sectors")
    if sectors is not None:
        sectors = tuple((float(a), float(b)) for a, b in sectors)
    return RegionSpec(annuli, sectors)


def _parse_probe(entry, m: int) -> tuple:
    if isinstance(entry, (int, float)):
        if m != 1:
            raise ConfigError("scalar probes only make sense in dimension 1")
        return (complex(entry),)
    entry = list(entry)
    if m == 1 and len(entry) == 2 and all(isinstance(v, (int, float)) for v in entry):
        return (complex(entry[0], entry[1]),)
    if len(entry) != m:
        raise ConfigError(f"probe needs {m} coordinates")
    out = []
    for coord in entry:
        if isinstance(coord, (int, float)):
            out.append(complex(coord))
        else:
            out.append(complex(coord[0], coord[1]))
    return tuple(out)


def config_from_dict(d: dict) -> ExperimentConfig:
    """Validate a raw configuration dictionary.

    Raises ConfigError naming the offending key on any problem.
    """
    if not isinstance(d, dict):
        raise ConfigError("configuration must be a JSON object")
    for key in ("ensemble", "coefficients", "degrees", "experiment_kind", "seed"):
        if key not in d:
            raise ConfigError(f"missing configuration key {key!r}")
    kind = d["experiment_kind"]
    if kind not in _KIND_IDS:
        raise ConfigError(f"unknown experiment_kind {kind!r}")
    ens = d["ensemble"]
    if not isinstance(ens, dict) or ("weight" not in ens and "measure" not in ens):
        raise ConfigError("ensemble needs a 'weight' or 'measure' key")
    if "weight" in ens:
        raw_w = ens["weight"]
        if not (raw_w in ("weyl", "fubini_study") or (isinstance(raw_w, dict) and "power" in raw_w)):
            raise ConfigError(f"unknown weight {raw_w!r}")
    else:
        raw_m = ens["measure"]
        if not (
            raw_m in ("chebyshev", "circle")
            or (isinstance(raw_m, dict) and ("jacobi" in raw_m or "recurrence" in raw_m))
        ):
            raise ConfigError(f"unknown measure {raw_m!r}")
    m = int(ens.get("dimension", 1))
    coeff_raw = d["coefficients"]
    if not isinstance(coeff_raw, dict) or "kind" not in coeff_raw:
        raise ConfigError("coefficients needs a 'kind' key")
    law = CoefficientLaw(coeff_raw["kind"], coeff_raw.get("alpha"))
    degrees = tuple(int(n) for n in d["degrees"])
    if any(n <= 0 for n in degrees):
        raise ConfigError("degrees must be positive")
    if any(b <= a for a, b in zip(degrees, degrees[1:])):
        raise ConfigError("degrees must be strictly increasing")
    trials = int(d.get("trials", 1))
    if trials < 0:
        raise ConfigError("trials must be >= 0")
    regions = tuple(_parse_region(r, m) for r in d.get("regions", []))
    probes = tuple(_parse_probe(p, m) for p in d.get("probes", []))
    epsilons = tuple(float(e) for e in d.get("epsilons", DEFAULT_EPSILONS))
    if any(e <= 0 for e in epsilons):
        raise ConfigError("epsilons must be positive")
    caps = dict(d.get("caps", {}))
    return ExperimentConfig(
        ensemble=ens,
        coefficients=law,
        degrees=degrees,
        trials=trials,
        regions=regions,
        probes=probes,
        epsilons=epsilons,
        experiment_kind=kind,
        seed=int(d["seed"]),
        caps=caps,
    )


def load_config(path) -> ExperimentConfig:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"configuration file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in {path} at line {exc.lineno}: {exc.msg}")
    return config_from_dict(raw)


# ---------------------------------------------------------------------------
# ensemble runtimes


class _WeightRuntime:
    def __init__(self, cfg: ExperimentConfig):
        ens = cfg.ensemble
        self.m = int(ens.get("dimension", 1))
        raw = ens["weight"]
        if isinstance(raw, dict) and "power" in raw:
            spec = WeightSpec(
                "power",
                self.m,
                float(ens.get("growth_margin", 1.0)),
                float(ens.get("growth_radius", 3.0)),
                power=tuple(float(p) for p in raw["power"]["p"]),
            )
        elif raw in ("weyl", "fubini_study"):
            spec = WeightSpec(
                raw,
                self.m,
                float(ens.get("growth_margin", 1.0)),
                float(ens.get("growth_radius", 3.0)),
            )
        else:
            raise ConfigError(f"unknown weight {raw!r}")
        self.weight = make_weight(spec)
        self.elliptic = ens.get("basis", "elliptic" if self.weight.growth_exempt else "weighted") == "elliptic"
        if self.elliptic and not self.weight.growth_exempt:
            raise ConfigError("the elliptic basis belongs to the fubini_study weight")
        caps = cfg.caps
        self.evaluator = build_evaluator(
            self.weight,
            s_box=tuple(caps.get("s_box", (-8.0, 8.0))),
            t_resolution=caps.get("t_resolution"),
            s_count=caps.get("s_count"),
        )
        self._basis_cache = {}

    def basis(self, n: int):
        if n not in self._basis_cache:
            if self.elliptic:
                self._basis_cache[n] = elliptic_onb(n, self.m)
            else:
                self._basis_cache[n] = build_onb(n, self.weight)
        return self._basis_cache[n]

    def reference(self, region) -> float:
        if isinstance(region, RectRegion):
            raise ConfigError("interval regions require a measure ensemble")
        kind = "M_U" if self.weight.growth_exempt and self.m >= 2 else (
            "mu_Q" if self.m == 1 else "V_U"
        )
        return reference_mass(self.evaluator, region, kind).value

    def probe_reference(self, probe) -> float:
        return extremal_value(self.evaluator, np.asarray(probe, dtype=complex))


class _MeasureRuntime:
    def __init__(self, cfg: ExperimentConfig):
        raw = cfg.ensemble["measure"]
        if raw == "chebyshev":
            self.spec = RegularMeasureSpec("chebyshev")
        elif raw == "circle":
            self.spec = RegularMeasureSpec("circle")
        elif isinstance(raw, dict) and "jacobi" in raw:
            self.spec = RegularMeasureSpec(
                "jacobi", alpha=float(raw["jacobi"]["alpha"]), beta=float(raw["jacobi"]["beta"])
            )
        elif isinstance(raw, dict) and "recurrence" in raw:
            self.spec = RegularMeasureSpec(
                "custom_recurrence",
                rec_a=tuple(raw["recurrence"]["a"]),
                rec_b=tuple(raw["recurrence"]["b"]),
            )
        else:
            raise ConfigError(f"unknown measure {raw!r}")
        self.m = 1
        self._basis_cache = {}

    def basis(self, n: int):
        if n not in self._basis_cache:
            self._basis_cache[n] = build_recurrence_onb(self.spec, n)
        return self._basis_cache[n]

    def reference(self, region) -> float:
        if isinstance(region, RectRegion):
            return equilibrium_mass(self.spec, (region.a, region.b))
        return equilibrium_mass(self.spec, region)


def _resolve_runtime(cfg: ExperimentConfig):
    if "weight" in cfg.ensemble:
        return _WeightRuntime(cfg)
    return _MeasureRuntime(cfg)


# ---------------------------------------------------------------------------
# records


@dataclass(frozen=True)
class TrialRecord:
    n: int
    trial: int
    region: str
    stat: float
    ref: float
    kind: str
    seed: tuple
    flags: tuple = ()

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "n": self.n,
            "trial": self.trial,
            "region": self.region,
            "stat": self.stat,
            "ref": self.ref,
            "kind": self.kind,
            "seed": list(self.seed),
            "flags": list(self.flags),
        }

    @staticmethod
    def from_dict(d: dict) -> "TrialRecord":
        if d.get("schema") != SCHEMA_VERSION:
            raise ConfigError(f"unsupported record schema {d.get('schema')!r}")
        return TrialRecord(
            n=int(d["n"]),
            trial=int(d["trial"]),
            region=str(d["region"]),
            stat=float(d["stat"]),
            ref=float(d["ref"]),
            kind=str(d["kind"]),
            seed=tuple(int(s) for s in d["seed"]),
            flags=tuple(str(f) for f in d["flags"]),
        )


@dataclass(frozen=True)
class SummaryRow:
    degree: int
    region: str
    mean_abs_dev: float
    exceedance: tuple  # one frequency per epsilon
    se: float


@dataclass(frozen=True)
class SummaryStats:
    epsilons: tuple
    rows: tuple
    flags: tuple = ()


def summarize(records, epsilons=DEFAULT_EPSILONS) -> SummaryStats:
    """Per (degree, region): mean |stat - ref|, exceedance frequencies, s.e."""
    groups = {}
    for rec in records:
        groups.setdefault((rec.n, rec.region), []).append(abs(rec.stat - rec.ref))
    rows = []
    for (n, region), devs in sorted(groups.items()):
        devs = np.asarray(devs)
        exceed = tuple(float(np.mean(devs >= e)) for e in epsilons)
        se = float(np.std(devs, ddof=1) / math.sqrt(devs.size)) if devs.size > 1 else 0.0
        rows.append(SummaryRow(n, region, float(np.mean(devs)), exceed, se))
    return SummaryStats(tuple(epsilons), tuple(rows))


def persist(obj, path) -> None:
    """Records to JSON lines, summaries to CSV; both schema-versioned."""
    if isinstance(obj, SummaryStats):
        with open(path, "w", newline="") as fh:
            fh.write(f"# schema: {SCHEMA_VERSION}\n")
            writer = csv.writer(fh)
            writer.writerow(
                ["degree", "region", "mean_abs_dev"]
                + [f"exceed_{e:g}" for e in obj.epsilons]
                + ["se"]
            )
            for row in obj.rows:
                writer.writerow(
                    [row.degree, row.region, repr(row.mean_abs_dev)]
                    + [repr(v) for v in row.exceedance]
                    + [repr(row.se)]
                )
        return
    with open(path, "w") as fh:
        for rec in obj:
            fh.write(json.dumps(rec.to_dict(), sort_keys=True, separators=(",", ":")))
            fh.write("\n")


def load(path):
    """Inverse of persist; JSONL gives records, CSV gives a summary."""
    text_path = str(path)
    if text_path.endswith(".csv"):
        return load_summary(path)
    return load_records(path)


def load_records(path) -> list:
    records = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                records.append(TrialRecord.from_dict(json.loads(line)))
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise ConfigError(f"bad record at {path} line {lineno}: {exc}")
    return records


def load_summary(path) -> SummaryStats:
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines or not lines[0].startswith(f"# schema: {SCHEMA_VERSION}"):
        raise ConfigError(f"bad summary at {path} line 1: missing schema comment")
    reader = csv.reader(lines[1:])
    header = next(reader)
    eps = tuple(float(h[len("exceed_"):]) for h in header if h.startswith("exceed_"))
    rows = []
    for lineno, row in enumerate(reader, start=3):
        try:
            k = 3 + len(eps)
            rows.append(
                SummaryRow(
                    int(row[0]),
                    row[1],
                    float(row[2]),
                    tuple(float(v) for v in row[3:k]),
                    float(row[k]),
                )
            )
        except (IndexError, ValueError) as exc:
            raise ConfigError(f"bad summary at {path} line {lineno}: {exc}")
    return SummaryStats(eps, tuple(rows))


# ---------------------------------------------------------------------------
# core statistics per trial


class _TrialCounter:
    """Counts zeros of one polynomial in several regions, finding roots once.

    Falls back to argument-principle contours when the combined coefficient
    magnitudes span more nats than the root finder can represent.
    """

    def __init__(self, runtime, poly, base_samples: int = 64):
        self.runtime = runtime
        self.poly = poly
        self.base_samples = base_samples
        self._roots = None
        self.fallback = runtime.m == 1 and coefficient_log_range(poly) > AP_FALLBACK_NATS

    def _root_set(self):
        if self._roots is None:
            if isinstance(self.runtime, _MeasureRuntime):
                self._roots = roots_of_combination(
                    self.poly.basis, self.poly.coefficients
                )
            else:
                self._roots = roots_of(self.poly)
        return self._roots

    def stat(self, region, flags: list) -> float:
        n = self.poly.n
        if self.runtime.m >= 2:
            est = slice_volume(self.poly, region, base_samples=self.base_samples)
            return est.value / n
        if self.fallback:
            if isinstance(self.runtime, _MeasureRuntime) and self.runtime.spec.kind != "circle":
                raise ConfigError("heavy-tail fallback only covers monomial-type bases")
            if not isinstance(region, RegionSpec) or region.sectors is not None:
                raise ConfigError("heavy-tail fallback only covers full-angle annuli")
            flags.append("fallback_argument_principle")
            lo, hi = region.annuli[0]
            return count_zeros_annulus_ap(self.poly, lo, hi) / n
        roots = self._root_set()
        if isinstance(region, RectRegion):
            return count_zeros_rect(roots, region.a, region.b, region.half_height) / n
        zc = count_zeros_region(roots, region)
        if zc.boundary:
            flags.append(f"boundary_roots:{zc.boundary}")
        return zc.interior / n


def _capped_degrees(cfg: ExperimentConfig, m: int) -> tuple:
    if m < 3:
        return cfg.degrees
    cap = int(cfg.caps.get("max_degree_m3", 30))
    kept = tuple(n for n in cfg.degrees if n <= cap)
    if kept != cfg.degrees:
        warnings.warn(
            f"dropping degrees above the m>=3 cap of {cap}; raise caps.max_degree_m3 to override"
        )
    return kept


def _map_trials(fn, trial_indices, threads: int):
    if threads <= 1:
        return [fn(t) for t in trial_indices]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, trial_indices))


# ---------------------------------------------------------------------------
# runners


def run_equidistribution(cfg: ExperimentConfig) -> list:
    """Sample, count zeros (or slice volumes), and pair with reference masses."""
    runtime = _resolve_runtime(cfg)
    if not cfg.regions:
        raise ConfigError("equidistribution runs need at least one region")
    refs = {r.label(): runtime.reference(r) for r in cfg.regions}
    kind_id = _KIND_IDS["equidistribution"]
    threads = int(cfg.caps.get("threads", 1))
    base_samples = int(cfg.caps.get("base_samples", 64))
    records = []
    for n in _capped_degrees(cfg, runtime.m):
        basis = runtime.basis(n)

        def one_trial(t, n=n, basis=basis):
            stream = RngStream(cfg.seed, (kind_id, n, t))
            coeffs = sample_coefficients(cfg.coefficients, basis.size, stream)
            poly = assemble_polynomial(basis, coeffs, tuple(stream.provenance()))
            counter = _TrialCounter(runtime, poly, base_samples)
            out = []
            for region in cfg.regions:
                flags: list = []
                stat = counter.stat(region, flags)
                out.append(
                    TrialRecord(
                        n,
                        t,
                        region.label(),
                        float(stat),
                        float(refs[region.label()]),
                        "equidistribution",
                        tuple(stream.provenance()),
                        tuple(flags),
                    )
                )
            if isinstance(runtime, _MeasureRuntime) and runtime.spec.kac_demo:
                if not counter.fallback:
                    out.append(
                        TrialRecord(
                            n,
                            t,
                            "angles",
                            float(angular_ks_statistic(counter._root_set())),
                            0.0,
                            "kac_ks",
                            tuple(stream.provenance()),
                            (),
                        )
                    )
            return out

        for chunk in _map_trials(one_trial, range(cfg.trials), threads):
            records.extend(chunk)
    records.sort(key=lambda r: (r.kind, r.n, r.trial, r.region))
    return records


def run_probability_convergence(cfg: ExperimentConfig):
    """Exceedance frequencies per degree; flags non-decreasing sequences."""
    records = run_equidistribution(cfg)
    stats = summarize(records, cfg.epsilons)
    flags = []
    if len(cfg.degrees) >= 2:
        regions = sorted({row.region for row in stats.rows})
        for region in regions:
            rows = [r for r in stats.rows if r.region == region]
            rows.sort(key=lambda r: r.degree)
            for i, eps in enumerate(cfg.epsilons):
                freqs = [r.exceedance[i] for r in rows]
                if len(freqs) >= 2 and all(b >= a for a, b in zip(freqs, freqs[1:])) and max(freqs) > 0:
                    flags.append(f"exceedance_nondecreasing:{region}:eps{eps:g}")
    return records, SummaryStats(stats.epsilons, stats.rows, tuple(flags))


@dataclass(frozen=True)
class PointwiseTailRow:
    degree: int
    frequency: float
    envelope: float  # c / sqrt(n^m) fitted at the smallest degree


@dataclass(frozen=True)
class PointwiseTailReport:
    probe: tuple
    epsilon: float
    reference: float
    rows: tuple


def run_pointwise_tail(cfg: ExperimentConfig, z=None, eps: Optional[float] = None):
    """Empirical P[(1/n) log|f(z)| < V(z) - eps] per degree, with records."""
    runtime = _resolve_runtime(cfg)
    if isinstance(runtime, _MeasureRuntime):
        raise ConfigError("pointwise tail runs use weight ensembles")
    if z is None:
        if not cfg.probes:
            raise ConfigError("pointwise tail runs need a probe")
        z = cfg.probes[0]
    z = tuple(complex(c) for c in np.atleast_1d(np.asarray(z, dtype=complex)))
    if eps is None:
        eps = cfg.epsilons[0]
    v_ref = runtime.probe_reference(z)
    kind_id = _KIND_IDS["pointwise_tail"]
    threads = int(cfg.caps.get("threads", 1))
    label = "probe(" + ",".join(f"{c.real:g}{c.imag:+g}j" for c in z) + ")"
    records = []
    for n in _capped_degrees(cfg, runtime.m):
        basis = runtime.basis(n)

        def one_trial(t, n=n, basis=basis):
            stream = RngStream(cfg.seed, (kind_id, n, t))
            coeffs = sample_coefficients(cfg.coefficients, basis.size, stream)
            poly = assemble_polynomial(basis, coeffs, tuple(stream.provenance()))
            pts = np.asarray([z[0]] if runtime.m == 1 else [z], dtype=complex)
            mag, _ = log_eval_points(poly, pts if runtime.m == 1 else pts.reshape(1, -1))
            return TrialRecord(
                n,
                t,
                label,
                float(mag[0] / n),
                float(v_ref),
                "pointwise_tail",
                tuple(stream.provenance()),
                (),
            )

        records.extend(_map_trials(one_trial, range(cfg.trials), threads))
    records.sort(key=lambda r: (r.kind, r.n, r.trial, r.region))
    rows = []
    degrees = sorted({r.n for r in records})
    c_fit = None
    for n in degrees:
        stats = [r.stat for r in records if r.n == n]
        freq = float(np.mean([s < v_ref - eps for s in stats])) if stats else 0.0
        if c_fit is None:
            c_fit = freq * math.sqrt(float(n) ** runtime.m)
        rows.append(PointwiseTailRow(n, freq, c_fit / math.sqrt(float(n) ** runtime.m)))
    return records, PointwiseTailReport(tuple(z), float(eps), float(v_ref), tuple(rows))


@dataclass(frozen=True)
class NecessityRow:
    degree: int
    trial: int
    region: str
    certificate: bool
    deviation: float


@dataclass(frozen=True)
class NecessityReport:
    rows: tuple
    control_rows: tuple
    firings: int
    max_deviation: float
    control_firings: int


def run_necessity(cfg: ExperimentConfig):
    """Degree scan with one coefficient stream per trial (prefix reuse).

    Records the dominance-certificate flag and the count deviation per
    degree, then repeats the scan with Gaussian coefficients under the
    same streams as a finite-log-moment control.
    """
    runtime = _resolve_runtime(cfg)
    if isinstance(runtime, _MeasureRuntime):
        raise ConfigError("necessity runs use weight ensembles")
    if not cfg.regions:
        raise ConfigError("necessity runs need a region")
    if log_moment_finite(cfg.coefficients, runtime.m) and not cfg.caps.get(
        "allow_finite_moment", False
    ):
        raise ConfigError(
            "necessity runs expect an infinite log-moment law at this dimension; "
            "set caps.allow_finite_moment to override"
        )
    from .zeros import dominance_certificate  # local import keeps module load light

    degrees = _capped_degrees(cfg, runtime.m)
    if not degrees:
        return [], NecessityReport((), (), 0, 0.0, 0)
    refs = {r.label(): runtime.reference(r) for r in cfg.regions}
    kind_id = _KIND_IDS["necessity"]
    d_max = runtime.basis(max(degrees)).size
    records, rows, control_rows = [], [], []
    for law, tag, sink in (
        (cfg.coefficients, "necessity", rows),
        (CoefficientLaw("gaussian_complex"), "necessity_control", control_rows),
    ):
        for t in range(cfg.trials):
            stream = RngStream(cfg.seed, (kind_id, t))
            master = sample_coefficients(law, d_max, stream)
            base_samples = int(cfg.caps.get("base_samples", 64))
            for n in degrees:
                basis = runtime.basis(n)
                coeffs = master.prefix(basis.size)
                poly = assemble_polynomial(basis, coeffs, tuple(stream.provenance()))
                counter = _TrialCounter(runtime, poly, base_samples)
                for region in cfg.regions:
                    flags: list = []
                    fired = dominance_certificate(poly, region)
                    if fired:
                        flags.append("certificate")
                    stat = counter.stat(region, flags)
                    dev = abs(stat - refs[region.label()])
                    sink.append(NecessityRow(n, t, region.label(), fired, dev))
                    records.append(
                        TrialRecord(
                            n,
                            t,
                            region.label(),
                            float(stat),
                            float(refs[region.label()]),
                            tag,
                            tuple(stream.provenance()),
                            tuple(flags),
                        )
                    )
    records.sort(key=lambda r: (r.kind, r.n, r.trial, r.region))
    report = NecessityReport(
        tuple(rows),
        tuple(control_rows),
        sum(1 for r in rows if r.certificate),
        max((r.deviation for r in rows), default=0.0),
        sum(1 for r in control_rows if r.certificate),
    )
    return records, report
