"""Command-line front end.

Subcommands: wigner, overlap, contour, scaling, oracle-check.  Every run
writes its output file(s) plus a manifest (<out>.manifest.json) carrying
the resolved parameters and a digest; outputs are byte-stable for a fixed
parameter set and independent of --workers.

Exit codes: 0 success, 1 usage error, 2 numerical failure.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .errors import (
    ConvergenceError,
    CutoffCapError,
    DomainError,
    NoEnclosingContourError,
    NoIntersectionError,
    NumericalError,
)
from .features import central_contour, isotropy_ratio, radial_extent, scaling_exponent, zero_contours
from .fieldio import (
    manifest_dict,
    read_field_csv,
    read_field_json,
    write_field_csv,
    write_field_json,
    write_field_pgm,
    write_json,
)
from .geometry import DiskPoint
from .grids import PhaseSpaceGrid
from .pipeline import sensitivity_radius_sweep, wigner_feature_sweep
from .sensitivity import overlap_grid, sql_baseline
from .states import CircularStateSpec, coherent_overlap, parity_overlap
from .wigner import wigner_circular, wigner_term
from .sensitivity import overlap_term

USAGE_EXIT = 1
NUMERICAL_EXIT = 2

_NUMERICAL_ERRORS = (NumericalError, ConvergenceError, CutoffCapError,
                     NoEnclosingContourError, NoIntersectionError)


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on usage errors; the contract here is 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(USAGE_EXIT)


def _load_config(path: str) -> dict:
    """Flat `key = value` config lines; '#' starts a comment."""
    out = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DomainError(f"config line without '=': {raw!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = val
    return out


def _out_path(name: str) -> Path:
    base = os.environ.get("SU11_PHASE_LAB_OUTDIR", "")
    p = Path(name)
    if base and not p.is_absolute():
        return Path(base) / p
    return p


def _write_field(field, out: Path, fmt: str):
    if fmt == "csv":
        write_field_csv(field, out)
    elif fmt == "json":
        write_field_json(field, out)
    elif fmt == "pgm":
        write_field_pgm(field, out)
    else:  # pragma: no cover - argparse restricts choices
        raise DomainError(f"unknown format {fmt}")


def _read_field(path: Path):
    if path.suffix == ".json":
        return read_field_json(path)
    return read_field_csv(path)


def _finish(command: str, params: dict, out: Path, t0: float, extra_outputs=()):
    timings = {"wall_seconds": time.time() - t0}
    write_json(
        manifest_dict(command, params, __version__, timings),
        out.with_name(out.name + ".manifest.json"),
    )
    for line in (str(out), *map(str, extra_outputs)):
        print(line)


def _add_grid_flags(p: _Parser):
    p.add_argument("--nx", type=int, default=601)
    p.add_argument("--np", type=int, default=601, dest="npts")
    p.add_argument("--extent", type=float, default=0.9)
    p.add_argument("--workers", type=int, default=1)


def _add_state_flags(p: _Parser):
    p.add_argument("--k", type=float, required=True, help="Bargmann index")
    p.add_argument("--nbar", type=int, required=True, help="number of components")
    p.add_argument("--tau", type=float, required=True, help="radial parameter tau-bar")
    p.add_argument("--normalize", dest="normalize", action="store_true", default=True)
    p.add_argument("--no-normalize", dest="normalize", action="store_false")


def cmd_wigner(args) -> int:
    t0 = time.time()
    spec = CircularStateSpec(k=args.k, n_components=args.nbar, tau_bar=args.tau)
    grid = PhaseSpaceGrid(nx=args.nx, np=args.npts, extent=args.extent)
    field = wigner_circular(spec, grid, normalize=args.normalize, workers=args.workers)
    out = _out_path(args.out)
    _write_field(field, out, args.format)
    params = {
        "k": args.k, "nbar": args.nbar, "tau": args.tau,
        "nx": args.nx, "np": args.npts, "extent": args.extent,
        "normalize": args.normalize, "format": args.format, "out": str(args.out),
    }
    _finish("wigner", params, out, t0)
    return 0


def cmd_overlap(args) -> int:
    t0 = time.time()
    spec = CircularStateSpec(k=args.k, n_components=args.nbar, tau_bar=args.tau)
    grid = PhaseSpaceGrid(nx=args.nx, np=args.npts, extent=args.extent)
    field = overlap_grid(spec, grid, normalize=args.normalize, workers=args.workers)
    out = _out_path(args.out)
    _write_field(field, out, args.format)
    extra = []
    if args.sql:
        from .grids import ScalarField

        base = np.full(grid.shape, np.nan)
        m = grid.mask
        r2 = np.abs(grid.zeta[m]) ** 2
        base[m] = np.exp(2.0 * args.k * np.log1p(-r2))
        sql_field = ScalarField(grid=grid, values=base)
        sql_out = out.with_name(out.stem + "_sql" + out.suffix)
        _write_field(sql_field, sql_out, args.format)
        extra.append(sql_out)
    params = {
        "k": args.k, "nbar": args.nbar, "tau": args.tau,
        "nx": args.nx, "np": args.npts, "extent": args.extent,
        "normalize": args.normalize, "format": args.format, "out": str(args.out),
        "sql": bool(args.sql),
    }
    _finish("overlap", params, out, t0, extra)
    return 0


def cmd_contour(args) -> int:
    t0 = time.time()
    path = _out_path(args.field)
    if not path.exists():
        raise DomainError(f"field file not found: {path}")
    field = _read_field(path)
    contours = zero_contours(field, level=args.level)
    central = central_contour(contours)  # raises NoEnclosingContourError -> exit 2
    thetas = [i * math.pi / 4 for i in range(4)]
    metrics = {
        "isotropy_ratio": isotropy_ratio(central, n_dirs=args.dirs),
        "extents": {f"{t:.6f}": radial_extent(central, t) for t in thetas},
        "n_contours": len(contours),
        "n_closed": sum(1 for c in contours if c.closed),
        "central_vertices": central.n_vertices,
        "central_area": abs(central.signed_area()),
    }
    doc = {
        "format": "su11-phase-lab.contours",
        "version": 1,
        "level": args.level,
        "metrics": metrics,
        "contours": [
            {
                "closed": c.closed,
                "level": c.field_level,
                "points": [[px, py] for px, py in c.points],
            }
            for c in contours
        ],
    }
    out = _out_path(args.out)
    write_json(doc, out)
    params = {"field": str(args.field), "level": args.level, "dirs": args.dirs,
              "out": str(args.out)}
    _finish("contour", params, out, t0)
    return 0


def cmd_scaling(args) -> int:
    t0 = time.time()
    k_list = [float(s) for s in args.k_list.split(",") if s]
    if args.target == "synthetic":
        # planted 1/k law: pipeline self-test hook
        fit = scaling_exponent([(k, args.synthetic_coeff / k) for k in k_list])
        per_theta = {"synthetic": _fit_dict(fit)}
    elif args.target == "wigner-extent":
        thetas = [math.radians(float(s)) for s in args.theta.split(",") if s]
        per_theta = {}
        for t in thetas:
            fit = wigner_feature_sweep(k_list, args.nbar, args.tau, t)
            per_theta[f"{t:.6f}"] = _fit_dict(fit)
    elif args.target == "overlap-radius":
        fit = sensitivity_radius_sweep(k_list, args.nbar, args.tau, n_dirs=args.dirs)
        per_theta = {"direction-average": _fit_dict(fit)}
    else:  # pragma: no cover
        raise DomainError(f"unknown target {args.target}")
    doc = {
        "format": "su11-phase-lab.scaling",
        "version": 1,
        "target": args.target,
        "k_list": k_list,
        "fits": per_theta,
    }
    out = _out_path(args.out)
    write_json(doc, out)
    params = {
        "target": args.target, "k_list": args.k_list, "nbar": args.nbar,
        "tau": args.tau, "theta": args.theta, "dirs": args.dirs, "out": str(args.out),
    }
    _finish("scaling", params, out, t0)
    return 0


def _fit_dict(fit) -> dict:
    return {
        "samples": [[k, e] for k, e in fit.samples],
        "slope": fit.slope,
        "intercept": fit.intercept,
        "rms_residual": fit.rms_residual,
    }


def cmd_oracle_check(args) -> int:
    from . import highprec

    t0 = time.time()
    kset = [float(s) for s in args.kset.split(",") if s]
    rng = np.random.default_rng(args.seed)

    def sample_point():
        r = 0.8 * math.sqrt(rng.uniform())
        ang = rng.uniform(0.0, 2.0 * math.pi)
        return DiskPoint(r * complex(math.cos(ang), math.sin(ang)))

    checks = []
    worst = {"coherent_overlap": 0.0, "parity_overlap": 0.0,
             "overlap_term": 0.0, "wigner_term": 0.0}
    for trial in range(args.trials):
        k = kset[trial % len(kset)]
        zi, zj, zc, zd = (sample_point() for _ in range(4))
        pairs = {
            "coherent_overlap": (
                coherent_overlap(k, zi, zj),
                highprec.hp_coherent_overlap(k, zi, zj),
            ),
            "parity_overlap": (
                parity_overlap(k, zi, zj),
                highprec.hp_parity_overlap(k, zi, zj),
            ),
            "overlap_term": (
                overlap_term(k, zi, zj, zd.zeta),
                highprec.hp_overlap_term(k, zi, zj, zd.zeta),
            ),
            "wigner_term": (
                wigner_term(k, zi, zj, zc),
                highprec.hp_wigner_term(k, zi, zj, zc),
            ),
        }
        entry = {"trial": trial, "k": k,
                 "zi": [zi.zeta.real, zi.zeta.imag],
                 "zj": [zj.zeta.real, zj.zeta.imag],
                 "z": [zc.zeta.real, zc.zeta.imag],
                 "delta": [zd.zeta.real, zd.zeta.imag],
                 "errors": {}}
        for name, (closed, oracle) in pairs.items():
            err = abs(closed - oracle) / max(abs(oracle), 1e-300)
            entry["errors"][name] = err
            worst[name] = max(worst[name], err)
        checks.append(entry)

    all_pass = all(e < args.tol for e in worst.values())
    report = {
        "format": "su11-phase-lab.oracle-check",
        "version": 1,
        "trials": args.trials,
        "seed": args.seed,
        "tol": args.tol,
        "kset": kset,
        "worst_relative_error": worst,
        "pass": bool(all_pass),
        "checks": checks,
    }
    out = _out_path(args.out)
    write_json(report, out)
    params = {"trials": args.trials, "seed": args.seed, "tol": args.tol,
              "kset": args.kset, "out": str(args.out)}
    _finish("oracle-check", params, out, t0)
    if not all_pass:
        sys.stderr.write(
            f"oracle-check: tolerance breach, worst errors {worst}\n"
        )
        return NUMERICAL_EXIT
    return 0


def build_parser():
    parser = _Parser(prog="su11-phase-lab", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    subparsers = {}

    pw = sub.add_parser("wigner", help="Wigner field of a circular state")
    _add_state_flags(pw)
    _add_grid_flags(pw)
    pw.add_argument("--out", required=True)
    pw.add_argument("--format", choices=["csv", "pgm", "json"], default="csv")
    pw.add_argument("--config", default=None)
    pw.set_defaults(func=cmd_wigner)

    po = sub.add_parser("overlap", help="displacement-overlap field S(delta)")
    _add_state_flags(po)
    _add_grid_flags(po)
    po.add_argument("--sql", action="store_true",
                    help="also write the coherent baseline field")
    po.add_argument("--out", required=True)
    po.add_argument("--format", choices=["csv", "pgm", "json"], default="csv")
    po.add_argument("--config", default=None)
    po.set_defaults(func=cmd_overlap)

    pc = sub.add_parser("contour", help="zero contours + metrics of a saved field")
    pc.add_argument("--field", required=True, help="CSV or JSON field file")
    pc.add_argument("--level", type=float, default=0.0)
    pc.add_argument("--dirs", type=int, default=360)
    pc.add_argument("--out", required=True)
    pc.add_argument("--config", default=None)
    pc.set_defaults(func=cmd_contour)

    ps = sub.add_parser("scaling", help="power-law fits of feature extents vs k")
    ps.add_argument("--target", choices=["wigner-extent", "overlap-radius", "synthetic"],
                    required=True)
    ps.add_argument("--k-list", default="8,12,16,24,32")
    ps.add_argument("--nbar", type=int, default=4)
    ps.add_argument("--tau", type=float, default=1.5)
    ps.add_argument("--theta", default="0",
                    help="comma list of ray directions in degrees (wigner-extent)")
    ps.add_argument("--dirs", type=int, default=64,
                    help="direction count for overlap-radius averaging")
    ps.add_argument("--synthetic-coeff", type=float, default=1.0)
    ps.add_argument("--out", required=True)
    ps.add_argument("--config", default=None)
    ps.set_defaults(func=cmd_scaling)

    pk = sub.add_parser("oracle-check", help="closed forms vs the Fock oracle")
    pk.add_argument("--trials", type=int, default=100)
    pk.add_argument("--seed", type=int, default=7)
    pk.add_argument("--tol", type=float, default=1e-8)
    pk.add_argument("--kset", default="0.5,1,5,12,16")
    pk.add_argument("--out", required=True)
    pk.add_argument("--config", default=None)
    pk.set_defaults(func=cmd_oracle_check)

    subparsers.update(wigner=pw, overlap=po, contour=pc, scaling=ps)
    subparsers["oracle-check"] = pk
    return parser, subparsers


def _apply_config(parser, subparser, cfg: dict):
    """Install config values as subcommand defaults; explicit flags still win."""
    actions = {a.dest: a for a in subparser._actions}
    bad = sorted(set(cfg) - set(actions))
    if bad:
        parser.error(f"unknown config keys: {bad}")
    coerced = {}
    for key, raw in cfg.items():
        action = actions[key]
        if isinstance(action.const, bool):  # store_true / store_false flags
            low = raw.strip().lower()
            if low not in ("true", "false", "0", "1"):
                parser.error(f"config key {key} needs a boolean, got {raw!r}")
            coerced[key] = low in ("true", "1")
        else:
            coerced[key] = raw  # argparse applies `type` to string defaults
    subparser.set_defaults(**coerced)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, subparsers = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "config", None):
            _apply_config(parser, subparsers[args.command], _load_config(args.config))
            args = parser.parse_args(argv)
        return args.func(args)
    except SystemExit as exc:
        return int(exc.code or 0)
    except DomainError as exc:
        sys.stderr.write(f"su11-phase-lab: {exc}\n")
        return USAGE_EXIT
    except _NUMERICAL_ERRORS as exc:
        sys.stderr.write(f"su11-phase-lab: numerical failure: {exc}\n")
        return NUMERICAL_EXIT


if __name__ == "__main__":
    sys.exit(main())
