"""Command-line driver and report emission.

Exit codes: 0 every check passed, 1 at least one check failed, 2 usage or
configuration error.  The JSON layout is versioned by ``SCHEMA_VERSION``
and the CSV column order by ``CSV_VERSION``.
"""
from __future__ import annotations

import argparse
import csv
import datetime as _dt
import json
import os
import sys
import time
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from . import __version__
from .geometry_models import (
    OPERATOR_DEGREES,
    POINTWISE_TOL,
    SPECTRAL_TOL,
    SPHERE_CHECKS,
    SphereSpec,
    TorusSpec,
    anti_self_adjoint_params,
    friedrich_saturation,
    prop0_saturation_on_sphere,
    proposition_config,
    random_constant_form,
    sphere_check,
    torus_weighted_bound_check,
    torus_spectrum,
    yamabe_hijazi_check,
    BudgetExceeded,
)
from .identity_lab import AUXILIARY, CURVATURE, IDENTITIES, run_hierarchy, run_identities
from .parameter_space import (
    BOUND_ANCHORS,
    BOUND_CASE_OF,
    DISPLAYS,
    FEASIBILITY_GOALS,
    crosscheck_closed_forms,
    feasible_region,
)
from .hierarchy import HIERARCHY_CASES

SCHEMA_VERSION = "1.0"
CSV_VERSION = "1"
CSV_COLUMNS = ("case", "n", "re_lambda", "im_lambda", "bound", "margin")
ENV_OUT = "MFDIRAC_OUT"
DEFAULT_OUT = "mfdirac-report"

SUITES = ("identities", "hierarchy", "params", "torus", "sphere")
VERBS = {
    "verify-identities": ("identities",),
    "verify-hierarchy": ("hierarchy",),
    "params": ("params",),
    "torus-spectrum": ("torus",),
    "sphere-checks": ("sphere",),
    "all": SUITES,
}
DEFAULT_N = {
    "identities": (2, 3, 4),
    "hierarchy": (2, 3, 4),
    "params": (8, 9, 10),
    "torus": (2, 3),
    "sphere": (2, 3, 4),
}
TORUS_BOUNDS = ("friedrich", "prop0", "prop1", "harm2", "prop2", "harm3", "prop3", "prop01", "prop02", "prop03")
MAX_N = 12


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    suites: tuple = SUITES
    n_list: tuple | None = None
    seed: int = 0
    trials: int = 100
    draws: int = 5
    radius: int = 4
    tol: float | None = None
    out: str | None = None
    format: str = "both"
    horizon: bool = True

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.draws < 1:
            raise ConfigError("draws must be >= 1")
        if self.radius < 1:
            raise ConfigError("radius must be >= 1")
        if self.format not in ("json", "csv", "both"):
            raise ConfigError(f"unknown format {self.format!r}")
        if self.tol is not None and not self.tol > 0:
            raise ConfigError("tol must be positive")
        for n in self.n_list or ():
            if not 2 <= n <= MAX_N:
                raise ConfigError(f"dimension {n} outside 2..{MAX_N}")

    def dims(self, suite):
        return tuple(self.n_list) if self.n_list else DEFAULT_N[suite]

    def echo(self) -> dict:
        out = {f.name: getattr(self, f.name) for f in fields(self)}
        out["suites"] = list(self.suites)
        out["n_list"] = None if self.n_list is None else list(self.n_list)
        return out


def parse_n_list(text) -> tuple:
    """``"2,3"``, ``"2-5"`` or a mix of both."""
    out = []
    for part in str(text).replace(" ", "").split(","):
        if not part:
            continue
        try:
            if "-" in part:
                lo, hi = (int(x) for x in part.split("-", 1))
                out.extend(range(lo, hi + 1))
            else:
                out.append(int(part))
        except ValueError:
            raise ConfigError(f"bad dimension list {text!r}") from None
    if not out:
        raise ConfigError("empty dimension list")
    return tuple(sorted(set(out)))


_CONFIG_TYPES = {"n": parse_n_list, "seed": int, "trials": int, "draws": int, "radius": int,
                 "tol": float, "out": str, "format": str, "horizon": None}


def _bool(text):
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def load_config_file(path) -> dict:
    """Flat ``key = value`` file; ``#`` starts a comment."""
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    out = {}
    for num, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{num}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _CONFIG_TYPES:
            raise ConfigError(f"{path}:{num}: unknown key {key!r}")
        conv = _CONFIG_TYPES[key] or _bool
        try:
            out[key] = conv(value)
        except ValueError:
            raise ConfigError(f"{path}:{num}: bad value for {key}: {value!r}") from None
    return out


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", help="dimensions, e.g. 2,3 or 2-4")
    common.add_argument("--seed", type=int)
    common.add_argument("--trials", type=int, help="random jets or draws per check")
    common.add_argument("--draws", type=int, help="parameter draws per jet")
    common.add_argument("--radius", type=int, help="torus Fourier truncation radius")
    common.add_argument("--tol", type=float, help="override the floating point tolerances")
    common.add_argument("--out", help=f"output directory (default ${ENV_OUT} or ./{DEFAULT_OUT})")
    common.add_argument("--format", choices=("json", "csv", "both"))
    common.add_argument("--config", help="flat key = value file; flags win")
    common.add_argument("--no-horizon", dest="horizon", action="store_false", default=None,
                        help="skip the nine-dimensional horizon identities")
    common.add_argument("--quiet", action="store_true")
    p = argparse.ArgumentParser(prog="mfdirac", description="Verify multi-form modified Dirac operator identities.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="verb", required=True)
    for verb in VERBS:
        sub.add_parser(verb, parents=[common])
    return p


def config_from_args(args) -> RunConfig:
    values = load_config_file(args.config) if args.config else {}
    for key in ("seed", "trials", "draws", "radius", "tol", "out", "format", "horizon"):
        v = getattr(args, key)
        if v is not None:
            values[key] = v
    if args.n is not None:
        values["n"] = parse_n_list(args.n)
    n_list = values.pop("n", None)
    return RunConfig(suites=VERBS[args.verb], n_list=n_list, **values)


# suites ---------------------------------------------------------------------

def _check(suite, ident, n, passed, anchor, /, **extra):
    out = {k: v for k, v in extra.items() if k not in ("suite", "id", "n", "passed", "anchor")}
    out.update(suite=suite, id=ident, n=n, passed=bool(passed), anchor=anchor)
    return out


def _identity_ids(n):
    ids = ["FI-LICH", "FI-0", "FI-1", "FI-01"]
    if n >= 2:
        ids += ["FI-2", "FI-02"]
    if n >= 3:
        ids += ["FI-3", "FI-03"]
    if n >= 4:
        ids.append("FI-4")
    return ids


def _from_identity(suite, rep):
    d = rep.as_dict()
    d.pop("seconds", None)
    ident = d.pop("id")
    n = d.pop("n")
    passed = d.pop("passed")
    anchor = d.pop("anchor")
    return _check(suite, ident, n, passed, anchor, **d)


def suite_identities(cfg: RunConfig) -> list:
    checks = []
    dims = cfg.dims("identities")
    for n in dims:
        for ident in _identity_ids(n):
            if n == 9 and ident != "FI-LICH":
                continue
            rep = run_identities([ident], n, cfg.trials, cfg.draws, cfg.seed)[0]
            checks.append(_from_identity("identities", rep))
        for ident, (_, case, degrees) in AUXILIARY.items():
            if max(degrees) <= n:
                rep = run_identities([ident], n, cfg.trials, 1, cfg.seed)[0]
                checks.append(_from_identity("identities", rep))
        for ident, (case, spec) in CURVATURE.items():
            if max(p for _, _, p in spec) <= n:
                rep = run_identities([ident], n, cfg.trials, 1, cfg.seed)[0]
                checks.append(_from_identity("identities", rep))
    if cfg.n_list is None:
        # the 4-form identity is also run one dimension up
        rep = run_identities(["FI-4"], 5, cfg.trials, cfg.draws, cfg.seed)[0]
        checks.append(_from_identity("identities", rep))
    if cfg.horizon and (cfg.n_list is None or 9 in dims):
        ids = ["FI-HOR+", "FI-HOR-", "FI-HOR-DERIVED+", "FI-HOR-DERIVED-"]
        for rep in run_identities(ids, 9, cfg.trials, 1, cfg.seed):
            checks.append(_from_identity("identities", rep))
    return checks


def suite_hierarchy(cfg: RunConfig) -> list:
    checks = []
    trials = min(cfg.trials, 20)
    for n in cfg.dims("hierarchy"):
        for case_id, (_, spec) in HIERARCHY_CASES.items():
            if max((p for _, _, p in spec), default=0) > n:
                continue
            for rep in run_hierarchy(case_id, n, trials, 2, cfg.seed):
                checks.append(_from_identity("hierarchy", rep))
    return checks


def _display_degree(case_id):
    return max(int(ch) for ch in case_id.split("-")[0])


def suite_params(cfg: RunConfig) -> list:
    checks = []
    cases = sorted({d.case_id for d in DISPLAYS})
    for n in cfg.dims("params"):
        for case_id in cases:
            if _display_degree(case_id) > n:
                continue
            for res in crosscheck_closed_forms(case_id, n, cfg.trials, cfg.seed):
                d = res.as_dict()
                ident, anchor = d.pop("id"), d.pop("anchor")
                d.pop("n")
                if d.get("erratum"):
                    # the printed form is expected to fail; the check is that
                    # the corrected form holds and the printed one does not
                    passed = d["erratum_confirmed"]
                    d["status"] = "erratum confirmed" if passed else "erratum not reproduced"
                    checks.append(_check("params", ident, n, passed, anchor, **d))
                else:
                    checks.append(_check("params", ident, n, d.pop("passed"), anchor, **d))
        for case_id, goal in FEASIBILITY_GOALS:
            if case_id == "4-form" and n < 4:
                continue
            f = feasible_region(case_id, n, goal)
            d = f.as_dict()
            ok = f.matches_printed is not False and (case_id != "4-form" or not f.feasible)
            checks.append(_check("params", f"FEAS-{case_id}-{goal}", n, ok,
                                 f"{case_id} parameter constraint ({goal})", **d))
    return checks


def _spectrum_check(rep, ident, anchor, tol, extra=None):
    d = rep.as_dict()
    d.pop("params", None)
    d.update(extra or {})
    passed = rep.bound is None or rep.min_margin >= -tol
    return _check("torus", ident, rep.n, passed, anchor, **d)


def suite_torus(cfg: RunConfig, rows: list) -> list:
    checks = []
    tol = cfg.tol or SPECTRAL_TOL
    ptol = cfg.tol or POINTWISE_TOL
    for n in cfg.dims("torus"):
        rng = np.random.default_rng([cfg.seed, n])
        zero = torus_spectrum(TorusSpec(n, "dirac", radius=cfg.radius))
        # e = 0: per mode eigenvalues are +-i|p|, never zero for antiperiodic offsets
        p_abs = np.sort(np.abs(zero.eigenvalues.imag))
        ok = zero.max_real_part < ptol and p_abs[0] >= np.pi * np.sqrt(n) - ptol
        checks.append(_check("torus", "DIRAC-FREE", n, ok, "flat torus Dirac spectrum is +-i|p|",
                             max_abs_real=zero.max_real_part, min_abs=float(p_abs[0])))
        for bound_id in TORUS_BOUNDS:
            case_id = BOUND_CASE_OF[bound_id]
            try:
                spec = proposition_config(bound_id, n, rng, cfg.radius)
            except ValueError as exc:
                if "needs n" in str(exc):
                    continue
                raise
            rep = torus_spectrum(spec, bound_id)
            checks.append(_spectrum_check(rep, f"TORUS-{bound_id}", BOUND_ANCHORS[bound_id], tol,
                                          {"params": spec.params.as_dict(), "non_tight": rep.bound <= 0}))
            rows.extend(rep.rows(f"{bound_id}"))
            if case_id in OPERATOR_DEGREES and OPERATOR_DEGREES[case_id]:
                asa = TorusSpec(n, case_id, anti_self_adjoint_params(case_id, n, rng), spec.forms,
                                spec.f, radius=cfg.radius)
                arep = torus_spectrum(asa)
                checks.append(_check("torus", f"ASA-{bound_id}", n, arep.max_real_part < ptol,
                                     f"{case_id} operator with anti-hermitian modification is anti-self-adjoint",
                                     max_abs_real=arep.max_real_part, params=asa.params.as_dict()))
                rows.extend(arep.rows(f"{bound_id}-anti-self-adjoint"))
        if cfg.horizon and n == 9:
            forms = {p: random_constant_form(9, p, rng, 0.3) for p in (1, 2, 4)}
            for sign in ("+", "-"):
                rep = torus_spectrum(TorusSpec(9, f"horizon{sign}", forms=forms, radius=1))
                checks.append(_check("torus", f"HORIZON{sign}", 9, True, "horizon operator spectrum (no bound)",
                                     **rep.as_dict()))
                rows.extend(rep.rows(f"horizon{sign}"))
    dims = [n for n in cfg.dims("torus") if n >= 3]
    for n in dims[:1]:
        r = torus_weighted_bound_check(n, min(cfg.radius, 3))
        checks.append(_check("torus", "TORUS-weighted01-nonconstant-h", n, r["passed"], BOUND_ANCHORS["weighted01"], **r))
    return checks


def suite_sphere(cfg: RunConfig) -> list:
    checks = []
    tol = cfg.tol or POINTWISE_TOL
    dims = cfg.dims("sphere")
    for n in dims:
        for sign in (1, -1):
            spec = SphereSpec(n, 1.0, sign)
            pts = _sphere_points(spec, cfg)
            for cid in SPHERE_CHECKS:
                rep = sphere_check(cid, spec, pts, tol)
                d = rep.as_dict()
                checks.append(_check("sphere", f"SPHERE-{cid}", n, rep.passed, d.pop("anchor"),
                                     **{k: v for k, v in d.items() if k not in ("check", "n", "passed")}))
    sat_dims = dims if cfg.n_list else (2, 3, 4, 5, 6)
    for n in sat_dims:
        for r in (1, 2):
            d = friedrich_saturation(n, r)
            checks.append(_check("sphere", "FRIEDRICH-SATURATION", n, d.pop("passed"),
                                 "Friedrich bound is attained on the round sphere", **d))
        if n >= 3:
            d = yamabe_hijazi_check(n, 1)
            checks.append(_check("sphere", "HIJAZI-SPHERE", n, d.pop("passed"),
                                 "Hijazi bound equals Friedrich on the round sphere", **d))
        for t in (0.0, 0.25, 0.5, 1.0, (n + 1) / 2):
            d = prop0_saturation_on_sphere(n, 1.0, complex(0, t), tol=cfg.tol or 1e-12)
            checks.append(_check("sphere", "PROP0-SPHERE", n, d.pop("passed"), BOUND_ANCHORS["prop0"], **d))
    return checks


def _sphere_points(spec, cfg):
    from .geometry_models import sphere_points
    return sphere_points(spec, max(20, min(cfg.trials, 50)), cfg.seed)


def run(cfg: RunConfig) -> tuple[dict, list]:
    """Execute the configured suites; returns the report and the CSV rows."""
    checks, rows, timing = [], [], {}
    for suite in cfg.suites:
        start = time.perf_counter()
        if suite == "identities":
            checks += suite_identities(cfg)
        elif suite == "hierarchy":
            checks += suite_hierarchy(cfg)
        elif suite == "params":
            checks += suite_params(cfg)
        elif suite == "torus":
            checks += suite_torus(cfg, rows)
        elif suite == "sphere":
            checks += suite_sphere(cfg)
        timing[suite] = round(time.perf_counter() - start, 3)
    return make_report(cfg, checks, timing), rows


def make_report(cfg: RunConfig | None, checks: list, timing: dict | None = None) -> dict:
    failed = [c for c in checks if not c["passed"]]
    return {
        "schema_version": SCHEMA_VERSION,
        "csv_version": CSV_VERSION,
        "csv_columns": list(CSV_COLUMNS),
        "tool_version": __version__,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        "config": cfg.echo() if cfg else {},
        "passed": not failed,
        "summary": {"checks": len(checks), "failed": len(failed),
                    "failed_ids": sorted({f"{c['suite']}:{c['id']}" for c in failed})},
        "checks": checks,
        "timing": timing or {},
    }


def _jsonable(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, (tuple, set)):
        return list(x)
    return str(x)


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def emit(report: dict, rows, out_dir, fmt: str = "both") -> list:
    """Write ``report.json`` and/or ``spectra.csv``; returns the paths."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        written = []
        if fmt in ("json", "both"):
            path = out / "report.json"
            path.write_text(json.dumps(report, indent=2, sort_keys=True, default=_jsonable) + "\n")
            written.append(path)
        if fmt in ("csv", "both"):
            path = out / "spectra.csv"
            with path.open("w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(CSV_COLUMNS)
                for row in rows:
                    w.writerow([_fmt(v) for v in row])
            written.append(path)
    except OSError as exc:
        raise ConfigError(f"cannot write to {out_dir}: {exc}") from None
    return written


def _summary_lines(report):
    by_suite = {}
    for c in report["checks"]:
        s = by_suite.setdefault(c["suite"], [0, 0])
        s[0] += 1
        s[1] += not c["passed"]
    for suite, (total, bad) in by_suite.items():
        yield f"{'FAIL' if bad else 'PASS'} {suite}: {total - bad}/{total} checks passed"
    for ident in report["summary"]["failed_ids"]:
        yield f"  failed: {ident}"


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and 2
    try:
        cfg = config_from_args(args)
        out_dir = cfg.out or os.environ.get(ENV_OUT) or DEFAULT_OUT
        report, rows = run(cfg)
        paths = emit(report, rows, out_dir, cfg.format)
    except (ConfigError, BudgetExceeded) as exc:
        print(f"mfdirac: error: {exc}", file=sys.stderr)
        return 2
    if not args.quiet:
        for line in _summary_lines(report):
            print(line)
        for p in paths:
            print(f"wrote {p}")
    return 0 if report["passed"] else 1


if __name__ == "__main__":
    sys.exit(main())
