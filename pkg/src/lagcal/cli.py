"""Configuration-driven command line front end.

One JSON document describes a run: the signature, a family, the
experiment to perform and its sampling parameters.  Results land in two
files, a JSON report with a fixed key set and a CSV table with one row
per sample, written with LF line endings and full round-trip float
precision so that fixed seeds reproduce byte-identical output.

Exit codes: 0 success, 1 usage or validation error, 2 when an
experiment threshold is violated.
"""

import argparse
import csv
import json
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .core import (
    GeometryError,
    NULL_PLANE_BASIS,
    Signature,
    apply_J,
    circ_mean,
    circ_spread,
    plane_props,
    random_complex_plane,
    random_lagrangian_plane,
    random_plane,
    random_totally_null_plane,
    spans_equal,
    symplectic_orthogonal,
    wrap_angle,
)
from .curvature import curvature_sample, minimality_residual
from .families import (
    Catenoid,
    Curve,
    Equivariant,
    EvolvingQuadric,
    FamilySpecError,
    FlatPlane,
    Hopf,
    PairCurve,
    ProductNullCurves,
    RadialProfile,
    SphereCurve,
    build_family,
    check_self_adjoint,
    evolving_quadric_angle,
)
from .calibration import (
    frame_quantities,
    random_lagrangian_frames,
    random_perturbations,
    volume_compare,
)
from .immersion import (
    induced_metric,
    interior_samples,
    lagrangian_angle_at,
    lagrangian_defect,
    dvol as dvol_at,
    metric_signature,
)

EXPERIMENTS = ("verify", "angle", "curvature", "calibrate", "volume-compare", "plane-props")

MINIMALITY_GATE = 1e-6
ANGLE_GATE_EQUIVARIANT = 1e-9
ANGLE_GATE_QUADRIC = 1e-8
CURVATURE_GATE = 1e-5
SLACK_GATE = -1e-9
IDENTITY_GATE = 1e-10
VOLUME_SLACK_GATE = -1e-6


class ConfigError(ValueError):
    def __init__(self, fieldname: str, message: str):
        super().__init__(f"{fieldname}: {message}")
        self.fieldname = fieldname


@dataclass
class RunConfig:
    signature: Signature
    experiment: str
    family: dict | None = None
    samples: int = 1000
    seed: int = 42
    tol: float = 1e-9
    grid: list = field(default_factory=list)
    out: str | None = None


@dataclass
class ExperimentReport:
    """Fixed-schema result record; inapplicable scalars stay None."""

    config: dict
    seed: int
    version: str
    passed: bool
    max_defect: float | None = None
    beta_mean: float | None = None
    beta_spread: float | None = None
    residual: float | None = None
    volumes: list | None = None
    slack_min: float | None = None
    identity_max_residual: float | None = None
    degenerate_count: int | None = None
    samples_table: str | None = None
    columns: list | None = None
    rows: list | None = None


def _check_keys(obj: dict, allowed: set, where: str):
    unknown = set(obj) - allowed
    if unknown:
        raise ConfigError(where, f"unknown keys {sorted(unknown)}")


def _complex(value, where: str) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    if (isinstance(value, list) and len(value) == 2
            and all(isinstance(x, (int, float)) for x in value)):
        return complex(value[0], value[1])
    raise ConfigError(where, "complex values are numbers or [re, im] pairs")


def _interval(value, where: str) -> tuple[float, float]:
    if (not isinstance(value, list) or len(value) != 2
            or not all(isinstance(x, (int, float)) for x in value)
            or not value[0] < value[1]):
        raise ConfigError(where, "intervals are [lo, hi] with lo < hi")
    return float(value[0]), float(value[1])


def _parse_curve(obj, where: str) -> Curve:
    if not isinstance(obj, dict) or "form" not in obj:
        raise ConfigError(where, "curve specs are objects with a 'form' key")
    form = obj["form"]
    if form == "circle":
        _check_keys(obj, {"form", "interval"}, where)
        return Curve.circle(_interval(obj.get("interval", [0.0, 2 * np.pi]), where))
    if form == "line":
        _check_keys(obj, {"form", "z0", "z1", "interval"}, where)
        return Curve.line(_complex(obj["z0"], where), _complex(obj["z1"], where),
                          _interval(obj["interval"], where))
    if form == "exp":
        _check_keys(obj, {"form", "z0", "rate", "interval"}, where)
        return Curve.exponential(_complex(obj["z0"], where), _complex(obj["rate"], where),
                                 _interval(obj["interval"], where))
    if form == "samples":
        _check_keys(obj, {"form", "s", "values"}, where)
        values = [_complex(v, where) for v in obj["values"]]
        return Curve.from_samples(obj["s"], values)
    raise ConfigError(where, f"unknown curve form '{form}'")


def _parse_profile(obj, where: str) -> RadialProfile:
    if obj is None:
        return RadialProfile.constant()
    if not isinstance(obj, dict) or "form" not in obj:
        raise ConfigError(where, "radial profiles are objects with a 'form' key")
    if obj["form"] == "constant":
        _check_keys(obj, {"form", "value"}, where)
        return RadialProfile.constant(float(obj.get("value", 1.0)))
    if obj["form"] == "exp":
        _check_keys(obj, {"form", "rate", "scale"}, where)
        return RadialProfile.exponential(float(obj["rate"]), float(obj.get("scale", 1.0)))
    raise ConfigError(where, f"unknown profile form '{obj['form']}'")


def _parse_sphere_curve(obj, where: str) -> SphereCurve:
    if not isinstance(obj, dict) or "form" not in obj:
        raise ConfigError(where, "sphere curves are objects with a 'form' key")
    if obj["form"] == "great-circle":
        _check_keys(obj, {"form", "interval"}, where)
        return SphereCurve.great_circle(_interval(obj.get("interval", [0.0, 2 * np.pi]), where))
    if obj["form"] == "torus":
        _check_keys(obj, {"form", "alpha", "k1", "k2", "interval"}, where)
        return SphereCurve.torus(float(obj["alpha"]), float(obj["k1"]), float(obj["k2"]),
                                 _interval(obj.get("interval", [0.0, 2 * np.pi]), where))
    raise ConfigError(where, f"unknown sphere curve form '{obj['form']}'")


def _parse_pair_curve(obj, where: str) -> PairCurve:
    if not isinstance(obj, dict) or "form" not in obj:
        raise ConfigError(where, "pair curves are objects with a 'form' key")
    if obj["form"] == "real-exp":
        _check_keys(obj, {"form", "c1", "c2", "interval"}, where)
        return PairCurve.real_exponential(tuple(obj["c1"]), tuple(obj["c2"]),
                                          _interval(obj["interval"], where))
    if obj["form"] == "samples":
        _check_keys(obj, {"form", "u", "values"}, where)
        return PairCurve.from_samples(obj["u"], obj["values"])
    raise ConfigError(where, f"unknown pair curve form '{obj['form']}'")


def _parse_plane(obj, where: str) -> np.ndarray:
    if obj == "null-x1y2":
        return NULL_PLANE_BASIS
    if isinstance(obj, dict) and set(obj) == {"basis"}:
        basis = np.array([[_complex(z, where) for z in row] for row in obj["basis"]])
        return basis
    raise ConfigError(where, "planes are 'null-x1y2' or {'basis': [[z, z], [z, z]]}")


def parse_family(obj, sig: Signature) -> object:
    where = "family"
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ConfigError(where, "family specs are objects with a 'kind' key")
    kind = obj["kind"]
    if kind == "flat":
        _check_keys(obj, {"kind"}, where)
        return FlatPlane(sig=sig)
    if kind == "equivariant":
        _check_keys(obj, {"kind", "epsilon", "gamma", "chart_center", "chart_half_width"}, where)
        return Equivariant(
            sig=sig, epsilon=int(obj.get("epsilon", 1)),
            gamma=_parse_curve(obj["gamma"], where + ".gamma"),
            chart_center=(np.asarray(obj["chart_center"], dtype=float)
                          if "chart_center" in obj else None),
            chart_half_width=float(obj.get("chart_half_width", 0.35)))
    if kind == "catenoid":
        _check_keys(obj, {"kind", "epsilon", "c", "sector", "chart_center",
                          "chart_half_width"}, where)
        if "c" not in obj:
            raise ConfigError(where + ".c", "catenoid families need the constant c")
        return Catenoid(
            sig=sig, epsilon=int(obj.get("epsilon", 1)), c=float(obj["c"]),
            sector=int(obj.get("sector", 0)),
            chart_center=(np.asarray(obj["chart_center"], dtype=float)
                          if "chart_center" in obj else None),
            chart_half_width=float(obj.get("chart_half_width", 0.35)))
    if kind == "evolving-quadric":
        _check_keys(obj, {"kind", "matrix", "c", "r", "s_interval", "chart_center",
                          "chart_half_width"}, where)
        matrix = np.asarray(obj["matrix"], dtype=float)
        residual = check_self_adjoint(matrix, sig)
        if residual > 1e-10:
            raise ConfigError(where + ".matrix",
                              f"matrix is not self-adjoint: residual {residual:.3e}")
        return EvolvingQuadric(
            sig=sig, matrix=matrix, c=float(obj["c"]),
            r=_parse_profile(obj.get("r"), where + ".r"),
            s_interval=_interval(obj.get("s_interval", [-0.4, 0.4]), where + ".s_interval"),
            chart_center=(np.asarray(obj["chart_center"], dtype=float)
                          if "chart_center" in obj else None),
            chart_half_width=float(obj.get("chart_half_width", 0.35)))
    if kind == "product-null-curves":
        _check_keys(obj, {"kind", "plane", "gamma1", "gamma2"}, where)
        return ProductNullCurves(
            sig=sig, plane=_parse_plane(obj.get("plane", "null-x1y2"), where + ".plane"),
            gamma1=_parse_pair_curve(obj["gamma1"], where + ".gamma1"),
            gamma2=_parse_pair_curve(obj["gamma2"], where + ".gamma2"))
    if kind == "hopf":
        _check_keys(obj, {"kind", "gamma"}, where)
        return Hopf(gamma=_parse_sphere_curve(obj["gamma"], where + ".gamma"))
    raise ConfigError(where + ".kind", f"unknown family kind '{kind}'")


def parse_config(text: str) -> RunConfig:
    """Parse and validate one JSON run configuration."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("document", f"invalid JSON at line {exc.lineno}, column {exc.colno}")
    if not isinstance(raw, dict):
        raise ConfigError("document", "the configuration must be a JSON object")
    _check_keys(raw, {"signature", "family", "experiment", "samples", "seed", "tol",
                      "grid", "out"}, "document")

    sig_obj = raw.get("signature")
    if not isinstance(sig_obj, dict):
        raise ConfigError("signature", "required object with integer keys p and n")
    _check_keys(sig_obj, {"p", "n"}, "signature")
    try:
        sig = Signature(int(sig_obj["p"]), int(sig_obj["n"]))
    except (KeyError, GeometryError) as exc:
        raise ConfigError("signature", str(exc))

    experiment = raw.get("experiment")
    if experiment not in EXPERIMENTS:
        raise ConfigError("experiment", f"must be one of {', '.join(EXPERIMENTS)}")

    samples = raw.get("samples", 20 if experiment == "volume-compare" else 1000)
    if not isinstance(samples, int) or samples < 1:
        raise ConfigError("samples", "must be an integer >= 1")
    if experiment == "volume-compare" and samples > 64:
        raise ConfigError("samples", "volume-compare runs at most 64 perturbations")

    seed = raw.get("seed", 42)
    if not isinstance(seed, int) or not 0 <= seed < 2 ** 64:
        raise ConfigError("seed", "must fit an unsigned 64-bit integer")

    tol = raw.get("tol", 1e-9)
    if not isinstance(tol, (int, float)) or tol <= 0:
        raise ConfigError("tol", "must be a positive number")

    grid = raw.get("grid", [])
    if not isinstance(grid, list) or not all(isinstance(g, int) and g >= 1 for g in grid):
        raise ConfigError("grid", "must be a list of integers >= 1")

    family = raw.get("family")
    if experiment not in ("calibrate", "plane-props"):
        if family is None:
            raise ConfigError("family", f"the {experiment} experiment needs a family")
        parse_family(family, sig)  # validate now, rebuild later

    out = raw.get("out")
    if out is not None and not isinstance(out, str):
        raise ConfigError("out", "must be a path string")

    return RunConfig(signature=sig, experiment=experiment, family=family,
                     samples=samples, seed=seed, tol=float(tol), grid=list(grid), out=out)


def _config_echo(cfg: RunConfig) -> dict:
    return {
        "signature": {"p": cfg.signature.p, "n": cfg.signature.n},
        "family": cfg.family,
        "experiment": cfg.experiment,
        "samples": cfg.samples,
        "seed": cfg.seed,
        "tol": cfg.tol,
        "grid": cfg.grid,
    }


def _grid_for(cfg: RunConfig, n: int) -> list:
    if cfg.grid:
        return cfg.grid if len(cfg.grid) == n else [cfg.grid[0]] * n
    return [64] * n


# --- experiments ------------------------------------------------------------------

def _run_verify(cfg: RunConfig) -> ExperimentReport:
    patch = build_family(parse_family(cfg.family, cfg.signature))
    rng = np.random.default_rng(cfg.seed)
    pts = interior_samples(patch, cfg.samples, rng)
    rows = []
    defects = np.empty(cfg.samples)
    betas = np.empty(cfg.samples)
    bad_signature = 0
    p = cfg.signature.p
    for k, u in enumerate(pts):
        defects[k] = lagrangian_defect(patch, u)
        betas[k] = lagrangian_angle_at(patch, u)
        pos, neg, null = metric_signature(induced_metric(patch, u))
        if neg != p or null != 0:
            bad_signature += 1
        rows.append([k, *u, defects[k], betas[k], dvol_at(patch, u), neg, null])
    report = minimality_residual(patch, min(cfg.samples, 300),
                                 np.random.default_rng(cfg.seed + 1))
    passed = (float(np.max(defects)) <= cfg.tol) and bad_signature == 0
    n = patch.n
    return ExperimentReport(
        config=_config_echo(cfg), seed=cfg.seed, version=__version__, passed=passed,
        max_defect=float(np.max(defects)), beta_mean=circ_mean(betas),
        beta_spread=circ_spread(betas), residual=report.residual,
        degenerate_count=bad_signature,
        columns=["index", *[f"u{j}" for j in range(n)], "defect", "beta", "dvol",
                 "signature_negative", "signature_null"],
        rows=rows)


def _run_angle(cfg: RunConfig) -> ExperimentReport:
    spec = parse_family(cfg.family, cfg.signature)
    patch = build_family(spec)
    rng = np.random.default_rng(cfg.seed)
    pts = interior_samples(patch, cfg.samples, rng)
    gamma = patch.meta.get("gamma")
    rows = []
    offsets = np.empty(cfg.samples)
    if gamma is not None:
        n = patch.n
        for k, u in enumerate(pts):
            beta = lagrangian_angle_at(patch, u)
            law = float(np.angle(complex(gamma.d1(u[-1])) * complex(gamma.val(u[-1])) ** (n - 1)))
            offsets[k] = wrap_angle(beta - law)
            rows.append([k, *u, beta, law, offsets[k]])
        residual = float(np.max(np.abs(offsets)))
        gate = max(cfg.tol, ANGLE_GATE_EQUIVARIANT)
    elif isinstance(spec, EvolvingQuadric):
        chart = patch.meta["chart"]
        for k, u in enumerate(pts):
            beta = lagrangian_angle_at(patch, u)
            law = evolving_quadric_angle(spec, u[-1], chart.value(u[:-1]))
            offsets[k] = wrap_angle(beta - law)
            rows.append([k, *u, beta, law, offsets[k]])
        residual = circ_spread(offsets)
        gate = max(cfg.tol, ANGLE_GATE_QUADRIC)
    else:
        raise ConfigError("family", "the angle experiment needs an angle law "
                          "(equivariant, catenoid or evolving-quadric family)")
    return ExperimentReport(
        config=_config_echo(cfg), seed=cfg.seed, version=__version__,
        passed=residual <= gate,
        beta_mean=circ_mean(offsets), beta_spread=circ_spread(offsets),
        residual=residual,
        columns=["index", *[f"u{j}" for j in range(patch.n)], "beta", "beta_law", "offset"],
        rows=rows)


def _run_curvature(cfg: RunConfig) -> ExperimentReport:
    patch = build_family(parse_family(cfg.family, cfg.signature))
    rng = np.random.default_rng(cfg.seed)
    count = min(cfg.samples, 300)
    pts = interior_samples(patch, count, rng, margin=0.08)
    rows = []
    worst = 0.0
    for k, u in enumerate(pts):
        sample = curvature_sample(patch, u)
        worst = max(worst, sample.discrepancy)
        rows.append([k, *u, float(np.linalg.norm(sample.H_angle)),
                     float(np.linalg.norm(sample.H_sff)), sample.discrepancy])
    return ExperimentReport(
        config=_config_echo(cfg), seed=cfg.seed, version=__version__,
        passed=worst <= CURVATURE_GATE, residual=worst,
        columns=["index", *[f"u{j}" for j in range(patch.n)],
                 "h_angle_norm", "h_sff_norm", "discrepancy"],
        rows=rows)


def _run_calibrate(cfg: RunConfig) -> ExperimentReport:
    sig = cfg.signature
    rng = np.random.default_rng(cfg.seed)
    frames = random_lagrangian_frames(sig, cfg.samples, rng)
    q = frame_quantities(frames, sig)
    beta0 = rng.uniform(-np.pi, np.pi, cfg.samples)
    th = (np.exp(-1j * beta0) * q["omega_det"]).real
    slack = (q["dvol"] - th) / q["scale"]
    tight_slack = (q["dvol"] - np.abs(q["omega_det"])) / q["scale"]
    identity = np.abs(q["dvol"] - q["absdet_m"]) / q["dvol"]
    rows = [[k, beta0[k], float(q["beta"][k]), float(q["dvol"][k]), float(th[k]),
             float(slack[k]), float(identity[k])] for k in range(cfg.samples)]
    slack_min = float(min(np.min(slack), np.min(tight_slack)))
    identity_max = float(np.max(identity))
    return ExperimentReport(
        config=_config_echo(cfg), seed=cfg.seed, version=__version__,
        passed=(slack_min >= SLACK_GATE) and (identity_max <= IDENTITY_GATE),
        max_defect=float(np.max(q["defect"])),
        slack_min=slack_min, identity_max_residual=identity_max, degenerate_count=0,
        columns=["index", "beta0", "beta", "dvol", "theta0", "slack", "identity_residual"],
        rows=rows)


def _run_volume_compare(cfg: RunConfig) -> ExperimentReport:
    patch = build_family(parse_family(cfg.family, cfg.signature))
    specs = random_perturbations(patch, cfg.samples, cfg.seed)
    report = volume_compare(patch, specs, _grid_for(cfg, patch.n), seed=cfg.seed)
    rows = []
    volumes = [report.base_volume]
    for r in report.results:
        rows.append([r.index, r.spec.amplitude, r.spec.radius, *r.spec.center,
                     r.spec.steps, r.spec.step_size, r.status,
                     r.volume if r.volume is not None else "",
                     r.defect_max if r.defect_max is not None else "",
                     r.degenerate_points])
        if r.volume is not None:
            volumes.append(r.volume)
    ok = [r for r in report.results if r.status == "ok"]
    quorum = len(ok) >= (3 * len(specs)) // 4
    slack_min = (min(r.volume - report.base_volume for r in ok) if ok else None)
    passed = quorum and slack_min is not None and slack_min >= VOLUME_SLACK_GATE
    return ExperimentReport(
        config=_config_echo(cfg), seed=cfg.seed, version=__version__, passed=passed,
        max_defect=max((r.defect_max for r in ok), default=None),
        volumes=volumes, slack_min=slack_min,
        degenerate_count=report.degenerate_count,
        columns=["index", "amplitude", "radius", "center0", "center1", "steps",
                 "step_size", "status", "volume", "defect_max", "degenerate_points"],
        rows=rows)


def _run_plane_props(cfg: RunConfig) -> ExperimentReport:
    sig = cfg.signature
    if (sig.p, sig.n) != (1, 2):
        raise ConfigError("signature", "plane-props runs in signature (1, 2)")
    rng = np.random.default_rng(cfg.seed)
    rows = []
    violations = 0
    for k in range(cfg.samples):
        kind = k % 4
        if kind == 0:
            plane = random_plane(rng)
        elif kind == 1:
            plane = random_totally_null_plane(rng, sig)
        elif kind == 2:
            plane = random_lagrangian_plane(rng, sig)
        else:
            plane = random_complex_plane(rng, null=bool(k % 8 == 7), sig=sig)
        props = plane_props(plane, sig, tol=1e-8)
        flags = (props.totally_null, props.lagrangian, props.complex_line)
        two_of_three_ok = not (sum(flags) == 2)
        orth = symplectic_orthogonal(plane, sig)
        null_iff = props.totally_null == spans_equal(apply_J(plane), orth, tol=1e-8)
        if not two_of_three_ok or not null_iff:
            violations += 1
        rows.append([k, *[int(f) for f in flags], int(two_of_three_ok), int(null_iff)])
    return ExperimentReport(
        config=_config_echo(cfg), seed=cfg.seed, version=__version__,
        passed=violations == 0, residual=float(violations),
        degenerate_count=0,
        columns=["index", "totally_null", "lagrangian", "complex_line",
                 "two_of_three_ok", "null_iff_jplane_ok"],
        rows=rows)


_RUNNERS = {
    "verify": _run_verify,
    "angle": _run_angle,
    "curvature": _run_curvature,
    "calibrate": _run_calibrate,
    "volume-compare": _run_volume_compare,
    "plane-props": _run_plane_props,
}


def run_experiment(cfg: RunConfig) -> ExperimentReport:
    return _RUNNERS[cfg.experiment](cfg)


def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (np.integer,)):
        return str(int(value))
    return str(value)


def emit_report(report: ExperimentReport, out_dir: str) -> tuple[str, str]:
    """Write report.json and samples.csv; returns the two paths."""
    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, "samples.csv")
    with open(csv_path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(report.columns)
        for row in report.rows:
            writer.writerow([_fmt(v) for v in row])

    payload = {
        "config": report.config,
        "seed": report.seed,
        "version": report.version,
        "passed": report.passed,
        "max_defect": report.max_defect,
        "beta_mean": report.beta_mean,
        "beta_spread": report.beta_spread,
        "residual": report.residual,
        "volumes": report.volumes,
        "slack_min": report.slack_min,
        "identity_max_residual": report.identity_max_residual,
        "degenerate_count": report.degenerate_count,
        "samples_table": "samples.csv",
    }
    json_path = os.path.join(out_dir, "report.json")
    with open(json_path, "w", newline="") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
        handle.write("\n")
    return json_path, csv_path


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="lagcal",
        description="Verification experiments for minimal Lagrangian families")
    parser.add_argument("experiment", choices=EXPERIMENTS)
    parser.add_argument("--config", required=True, help="path to the JSON run configuration")
    parser.add_argument("--out", default=None, help="output directory (default: config or '.')")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--samples", type=int, default=None)
    parser.add_argument("--tol", type=float, default=None)
    args = parser.parse_args(argv)

    try:
        with open(args.config) as handle:
            text = handle.read()
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 1

    try:
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError("document",
                              f"invalid JSON at line {exc.lineno}, column {exc.colno}")
        if not isinstance(raw, dict):
            raise ConfigError("document", "the configuration must be a JSON object")
        raw["experiment"] = args.experiment
        cfg = parse_config(json.dumps(raw))
        if args.seed is not None:
            cfg.seed = args.seed
        if args.samples is not None:
            if cfg.experiment == "volume-compare" and args.samples > 64:
                raise ConfigError("samples", "volume-compare runs at most 64 perturbations")
            cfg.samples = args.samples
        if args.tol is not None:
            if args.tol <= 0:
                raise ConfigError("tol", "must be a positive number")
            cfg.tol = args.tol
        report = run_experiment(cfg)
    except (ConfigError, FamilySpecError, GeometryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    out_dir = args.out or cfg.out or "."
    try:
        json_path, csv_path = emit_report(report, out_dir)
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return 1
    print(f"report: {json_path}")
    print(f"samples: {csv_path}")
    print("status:", "pass" if report.passed else "threshold violation")
    return 0 if report.passed else 2


if __name__ == "__main__":
    sys.exit(main())
