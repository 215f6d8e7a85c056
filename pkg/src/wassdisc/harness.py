"""Experiment driver: generates point-set families, runs every inequality
check, and emits machine-readable reports.

Each check produces `CheckRecord`s with the raw left/right hand sides so
a report is auditable after the fact; the pass rule is the fixed slack

    lhs <= rhs * (1 + 1e-9) + 1e-12

chosen for double-precision accumulation across the exact solvers and
enumerations.  Every theorem-backed check must pass on every generated
instance: a failure signals a toolkit bug, not a counterexample.  Checks
that do not apply (e.g. the density-based reverse bound against a point
mass) are emitted as explicit skip records with a reason, never dropped.

A full run with a fixed config and seed is deterministic down to the
report bytes: no timestamps, stable key order, 17-significant-digit
number formatting.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import math
from dataclasses import dataclass

import numpy as np

from . import bounds
from .discrepancy import ks_distance_1d, star_discrepancy, uniform_discrepancy
from .errors import DomainError
from .measures import (
    DiscreteMeasure,
    Domain,
    Measure,
    Norm,
    UniformCube,
    diameter,
    halton,
    iid_uniform,
    midpoint_grid,
    read_points_csv,
    van_der_corput,
)
from .multiscale import UNBOUNDED, multiscale_upper_cube
from .transport import w1_dual_gap_check, wasserstein_1d, wasserstein_exact

TOOLKIT_VERSION = "0.1.0"

REL_SLACK = 1e-9
ABS_SLACK = 1e-12

MULTISCALE_LEVELS = tuple(range(0, 13))


class Family(enum.Enum):
    MIDPOINT = "midpoint"
    VAN_DER_CORPUT = "van_der_corput"
    HALTON = "halton"
    IID_UNIFORM = "iid_uniform"
    CUSTOM = "custom"


@dataclass(frozen=True)
class ExperimentConfig:
    family: Family = Family.IID_UNIFORM
    n_values: tuple = (16, 32)
    d: int = 1
    p_values: tuple = (1.0, 2.0)
    norm: Norm = Norm.LINF
    seed: int = 1
    trials: int = 1
    grid_cap: int = 20_000_000
    pair_cap: int = 100_000_000
    support_cap: int = 1024
    custom_file: str | None = None

    def __post_init__(self):
        if not self.n_values or not self.p_values:
            raise DomainError("n_values and p_values must be nonempty")
        if self.trials < 1:
            raise DomainError("trials must be >= 1")
        if self.family is Family.CUSTOM and not self.custom_file:
            raise DomainError("custom family needs custom_file")

    def to_dict(self) -> dict:
        return {
            "family": self.family.value,
            "n_values": list(self.n_values),
            "d": self.d,
            "p_values": list(self.p_values),
            "norm": self.norm.value,
            "seed": self.seed,
            "trials": self.trials,
            "grid_cap": self.grid_cap,
            "pair_cap": self.pair_cap,
            "support_cap": self.support_cap,
            "custom_file": self.custom_file,
        }

    @staticmethod
    def from_dict(data: dict) -> "ExperimentConfig":
        kv = dict(data)
        out = {}
        if "family" in kv:
            out["family"] = Family(kv["family"])
        if "norm" in kv:
            out["norm"] = Norm(str(kv["norm"]).lower())
        for key in ("n_values", "p_values"):
            if key in kv:
                seq = kv[key]
                if isinstance(seq, (int, float)):
                    seq = [seq]
                out[key] = tuple(int(v) if key == "n_values" else float(v) for v in seq)
        for key in ("d", "seed", "trials", "grid_cap", "pair_cap", "support_cap"):
            if key in kv:
                out[key] = int(kv[key])
        if kv.get("custom_file"):
            out["custom_file"] = str(kv["custom_file"])
        return ExperimentConfig(**out)


def load_config(path: str) -> ExperimentConfig:
    """Read a config file: JSON object, or plain key=value lines where
    list values are comma separated (n_values=8,16,32)."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return ExperimentConfig.from_dict(json.loads(text))
    data: dict = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key in ("n_values", "p_values"):
            data[key] = [v for v in value.split(",") if v]
        else:
            data[key] = value
    return ExperimentConfig.from_dict(data)


# ---------------------------------------------------------------------------
# Records and reports
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CheckRecord:
    name: str
    params: dict
    lhs: float | None
    rhs: float | None
    margin: float | None
    passed: bool
    skip_reason: str | None = None

    @property
    def skipped(self) -> bool:
        return self.skip_reason is not None


def make_record(name: str, params: dict, lhs: float, rhs: float) -> CheckRecord:
    lhs = float(lhs)
    rhs = float(rhs)
    return CheckRecord(name, dict(params), lhs, rhs, rhs - lhs,
                       lhs <= rhs * (1.0 + REL_SLACK) + ABS_SLACK)


def make_skip(name: str, params: dict, reason: str) -> CheckRecord:
    return CheckRecord(name, dict(params), None, None, None, True, reason)


@dataclass(frozen=True)
class Report:
    version: str
    config: dict
    records: tuple

    def summary(self) -> dict:
        skipped = sum(1 for r in self.records if r.skipped)
        passed = sum(1 for r in self.records if not r.skipped and r.passed)
        failed = sum(1 for r in self.records if not r.skipped and not r.passed)
        return {"total": len(self.records), "passed": passed, "failed": failed,
                "skipped": skipped}

    @property
    def all_passed(self) -> bool:
        return self.summary()["failed"] == 0


def _fmt_number(x) -> str:
    if x is None:
        return "null"
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x) or math.isinf(x):
            raise DomainError(f"non-finite value {x} cannot be serialized")
        return format(x, ".17g")
    raise TypeError(type(x))


def _fmt_json(obj) -> str:
    if obj is None or isinstance(obj, (bool, int, float, np.bool_, np.integer, np.floating)):
        return _fmt_number(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(_fmt_json(v) for v in obj) + "]"
    if isinstance(obj, dict):
        return "{" + ",".join(f"{json.dumps(str(k))}:{_fmt_json(v)}" for k, v in obj.items()) + "}"
    raise TypeError(type(obj))


def _record_dict(r: CheckRecord) -> dict:
    return {"name": r.name, "params": r.params, "lhs": r.lhs, "rhs": r.rhs,
            "margin": r.margin, "pass": r.passed, "skip_reason": r.skip_reason}


def emit_report(report: Report, fmt: str = "json") -> bytes:
    """Serialize a report; numbers carry 17 significant digits, keys are
    emitted in a fixed order so identical runs give identical bytes."""
    if fmt == "json":
        body = {
            "version": report.version,
            "config": report.config,
            "records": [_record_dict(r) for r in report.records],
            "summary": report.summary(),
        }
        return (_fmt_json(body) + "\n").encode()
    if fmt == "csv":
        buf = io.StringIO()
        buf.write("# version=" + report.version + "\n")
        buf.write("# config=" + _fmt_json(report.config) + "\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["name", "params", "lhs", "rhs", "margin", "pass", "skip_reason"])
        for r in report.records:
            writer.writerow([
                r.name,
                _fmt_json(r.params),
                _fmt_number(r.lhs),
                _fmt_number(r.rhs),
                _fmt_number(r.margin),
                "true" if r.passed else "false",
                "" if r.skip_reason is None else r.skip_reason,
            ])
        return buf.getvalue().encode()
    raise DomainError(f"unknown report format {fmt!r}")


def _record_from_dict(d: dict) -> CheckRecord:
    return CheckRecord(d["name"], d["params"], d["lhs"], d["rhs"], d["margin"],
                       d["pass"], d.get("skip_reason"))


def parse_report(data: bytes) -> Report:
    text = data.decode()
    if text.lstrip().startswith("{"):
        body = json.loads(text)
        return Report(body["version"], body["config"],
                      tuple(_record_from_dict(r) for r in body["records"]))
    lines = [ln for ln in text.splitlines() if ln]
    version = lines[0].removeprefix("# version=")
    config = json.loads(lines[1].removeprefix("# config="))
    records = []
    for row in csv.reader(lines[3:]):
        name, params, lhs, rhs, margin, passed, skip = row
        records.append(CheckRecord(
            name,
            json.loads(params),
            None if lhs == "null" else float(lhs),
            None if rhs == "null" else float(rhs),
            None if margin == "null" else float(margin),
            passed == "true",
            skip or None,
        ))
    return Report(version, config, tuple(records))


# ---------------------------------------------------------------------------
# Instance generation
# ---------------------------------------------------------------------------

def generate_measure(config: ExperimentConfig, n: int, trial: int, offset: int = 0) -> DiscreteMeasure:
    fam = config.family
    if fam is Family.MIDPOINT:
        if config.d != 1:
            raise DomainError("midpoint family is one-dimensional")
        return midpoint_grid(n)
    if fam is Family.VAN_DER_CORPUT:
        if config.d != 1:
            raise DomainError("van der Corput family is one-dimensional")
        return van_der_corput(n, base=2 + (trial % 3))
    if fam is Family.HALTON:
        # trials walk along the sequence: trial t takes points t*n+1 .. (t+1)*n
        full = halton(n * (trial + 1), config.d)
        return DiscreteMeasure(full.points[trial * n:], np.full(n, 1.0 / n))
    if fam is Family.IID_UNIFORM:
        return iid_uniform(n, config.d, config.seed + 7919 * trial + 104729 * offset)
    return read_points_csv(config.custom_file)


def _instances(config: ExperimentConfig):
    for n in config.n_values:
        for trial in range(config.trials):
            mu = generate_measure(config, n, trial)
            yield n, trial, mu


# ---------------------------------------------------------------------------
# Check suites
# ---------------------------------------------------------------------------

def sandwich_records(mu: Measure, nu: Measure, params: dict,
                     pair_cap: int = 100_000_000, grid_cap: int = 20_000_000) -> list:
    """D_star <= D_inf and D_inf <= 2^d D_star for one measure pair."""
    d = mu.dim
    ds = star_discrepancy(mu, nu, grid_cap=grid_cap)
    di = uniform_discrepancy(mu, nu, pair_cap=pair_cap, grid_cap=grid_cap)
    base = dict(params, dstar=ds, dinf=di)
    return [
        make_record("dstar_le_dinf", base, ds, di),
        make_record("dinf_le_2d_dstar", base, di, (2.0 ** d) * ds),
    ]


def check_sandwich(config: ExperimentConfig) -> list:
    records = []
    for n, trial, mu in _instances(config):
        params = {"family": config.family.value, "n": n, "d": config.d, "trial": trial}
        records.extend(sandwich_records(mu, UniformCube(config.d), dict(params, vs="uniform"),
                                        config.pair_cap, config.grid_cap))
        if config.family is Family.IID_UNIFORM:
            nu = generate_measure(config, n, trial, offset=1)
            records.extend(sandwich_records(mu, nu, dict(params, vs="discrete"),
                                            config.pair_cap, config.grid_cap))
    return records


def _uniform_discretization(d: int, n_support: int):
    """Equal-weight midpoints of the dyadic cells with >= 4x the support size."""
    level = max(1, math.ceil(math.log2(max(4 * n_support, 2)) / d))
    side = 2 ** level
    axes = (np.arange(side) + 0.5) / side
    grids = np.meshgrid(*([axes] * d), indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)
    w = np.full(side ** d, 1.0 / side ** d)
    return DiscreteMeasure(pts, w), level


def _wp_vs_uniform(mu: DiscreteMeasure, p: float, norm: Norm, support_cap: int):
    """W_p(mu, uniform law): exact in 1D, discretized above with its bias.

    Returns (value, level, bias); the true distance lies within +-bias of
    the returned value, bias being the half cell diameter at the level.
    """
    d = mu.dim
    if d == 1:
        return wasserstein_1d(mu, UniformCube(1), p), None, 0.0
    grid, level = _uniform_discretization(d, mu.size)
    w, _ = wasserstein_exact(mu, grid, p, norm, support_cap=support_cap)
    bias = diameter(norm, d) * 2.0 ** (-level) / 2.0
    return w, level, bias


def check_wp_vs_dinf(config: ExperimentConfig) -> list:
    """W_p^p against the regime bounds, the sharpened W_1 bound, the 1D
    star-discrepancy domination, and the truncated multiscale bounds."""
    records = []
    d = config.d
    for n, trial, mu in _instances(config):
        nu = UniformCube(d)
        dinf = uniform_discrepancy(mu, nu, config.pair_cap, config.grid_cap)
        dstar = star_discrepancy(mu, nu, config.grid_cap)
        base = {"family": config.family.value, "n": n, "d": d, "trial": trial,
                "dinf": dinf, "dstar": dstar}
        for p in config.p_values:
            w, level, bias = _wp_vs_uniform(mu, p, config.norm, config.support_cap)
            params = dict(base, p=p)
            if level is not None:
                params.update(discretization_level=level, bias=bias)
            cube = bounds.bound_cube(p, d, dinf, config.norm)
            rhs = (cube.value ** (1.0 / p) + bias) ** p if bias else cube.value
            records.append(make_record("wp_le_cube_bound",
                                       dict(params, regime=cube.regime.value), w ** p, rhs))
            for l0 in list(MULTISCALE_LEVELS) + [UNBOUNDED]:
                ub = multiscale_upper_cube(mu, nu, p, l0, config.norm)
                rhs = (ub ** (1.0 / p) + bias) ** p if bias else ub
                records.append(make_record(
                    "wp_le_multiscale",
                    dict(params, l0="unbounded" if l0 is UNBOUNDED else l0), w ** p, rhs))
            if p == 1:
                if d == 1:
                    records.append(make_record("w1_le_dstar_1d", params, w, dstar))
                else:
                    ref = bounds.bound_w1_refined(d, dinf, config.norm)
                    records.append(make_record("w1_le_refined_dinf", params, w, ref.value + bias))
                    refs = bounds.bound_w1_refined(d, dstar, config.norm, star=True)
                    records.append(make_record("w1_le_refined_dstar", params, w, refs.value + bias))
    return records


def reverse_records(mu: DiscreteMeasure, nu: Measure, rs, norm_w1: Norm,
                    params: dict, support_cap: int = 1024) -> list:
    """Star discrepancy bounded by a power of the sup-norm W_1.

    Valid only when ``nu`` has a density (here: the uniform law, density
    one); other targets yield an explicit skip record.
    """
    if not isinstance(nu, UniformCube):
        return [make_skip("dstar_le_reverse", dict(params), "no density")]
    d = nu.dim
    dstar = star_discrepancy(mu, nu)
    w1, level, bias = _wp_vs_uniform(mu, 1.0, norm_w1, support_cap)
    out = []
    for r in rs:
        rb = bounds.reverse_bound(r, d, w1 + bias, 1.0)
        p2 = dict(params, r=r, dstar=dstar, w1=w1)
        if level is not None:
            p2.update(discretization_level=level, bias=bias)
        out.append(make_record("dstar_le_reverse", p2, dstar, rb.value))
    return out


def check_reverse(config: ExperimentConfig, rs=(1.0, 2.0)) -> list:
    records = []
    for n, trial, mu in _instances(config):
        params = {"family": config.family.value, "n": n, "d": config.d, "trial": trial}
        records.extend(reverse_records(mu, UniformCube(config.d), rs, Norm.LINF,
                                       params, config.support_cap))
    return records


SUITES = {
    "sandwich": check_sandwich,
    "wp_vs_dinf": check_wp_vs_dinf,
    "reverse": check_reverse,
}


def run_suite(name: str, config: ExperimentConfig) -> Report:
    if name == "all":
        records = []
        for fn in SUITES.values():
            records.extend(fn(config))
    elif name in SUITES:
        records = SUITES[name](config)
    else:
        raise DomainError(f"unknown suite {name!r}; choose from {sorted(SUITES)} or 'all'")
    return Report(TOOLKIT_VERSION, dict(config.to_dict(), suite=name), tuple(records))


# ---------------------------------------------------------------------------
# Iterated-logarithm demonstration
# ---------------------------------------------------------------------------

def lil_demo(seed: int, n_max: int) -> list:
    """Scaled star discrepancy sqrt(2n/loglog n) * D_star(U_1..U_n) along a
    geometric n-grid.  Demonstration output only: almost-sure limsup
    statements admit no finite-sample pass/fail."""
    if n_max < 8:
        raise DomainError("n_max must be >= 8")
    stream = iid_uniform(n_max, 1, seed)
    rows = []
    n = 8
    while n <= n_max:
        prefix = DiscreteMeasure(stream.points[:n], np.full(n, 1.0 / n))
        ds = ks_distance_1d(prefix, UniformCube(1))
        rows.append((n, ds, math.sqrt(2.0 * n / math.log(math.log(n))) * ds))
        n *= 2
    return rows
