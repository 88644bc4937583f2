"""Command-line front end.

Subcommands read a flat JSON config (the ensemble given in its canonical
text form), run the requested computation, and write reports, figures,
and a run manifest into the output directory.

Exit codes: 0 success, 1 malformed config or usage, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import svgplot
from .ensemble import build_ensemble, gram_residual, parse_spec, sample
from .errors import ConfigError, NumericalError
from .mc import ExperimentConfig, run_experiment
from .rootfind import zeros_of_pair, zeros_of_sample
from .szego import expected_density, kernel_on_grid, square_grid, square_grid_2d

_REQUIRED = object()


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems through the exit-1 path."""

    def error(self, message):
        raise ConfigError(message)


def _build_parser() -> _Parser:
    p = _Parser(prog="zcsim", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON config file")
    common.add_argument("--seed", type=int, help="override the config seed")
    common.add_argument("--out", type=Path, help="output directory")
    common.add_argument("--format", choices=("csv", "json"), default="json",
                        help="tabular output format (JSON report always written)")
    common.add_argument("--quiet", action="store_true")

    info = sub.add_parser("ensemble-info", parents=[common],
                          help="print basis cardinality and Gram residual")
    info.add_argument("spec", nargs="?",
                      help="ensemble text, e.g. 'family=su2 N=3'")

    sub.add_parser("expected-density", parents=[common],
                   help="density grid CSV + heatmap")
    sub.add_parser("sample-zeros", parents=[common],
                   help="one sampled zero set, CSV + scatter")
    for kind in ("expectation", "variance", "trajectory", "polytope"):
        sub.add_parser(kind, parents=[common],
                       help=f"run the {kind} experiment")
    plot = sub.add_parser("plot", parents=[common],
                          help="re-render SVG figures from an existing report")
    plot.add_argument("report", type=Path, help="report JSON file")
    return p


def _load_config(args) -> dict:
    if args.config is None:
        raise ConfigError("--config is required for this subcommand")
    try:
        text = args.config.read_text()
    except OSError as e:
        raise ConfigError(f"cannot read config: {e}")
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(
            f"{args.config}: invalid JSON at line {e.lineno}, "
            f"column {e.colno}: {e.msg}")
    if not isinstance(cfg, dict):
        raise ConfigError(f"{args.config}: top level must be a JSON object")
    return cfg


def _take(cfg: dict, schema: dict, context: str) -> dict:
    unknown = sorted(set(cfg) - set(schema))
    if unknown:
        raise ConfigError(f"{context}: unknown keys {unknown}")
    missing = sorted(k for k, v in schema.items()
                     if v is _REQUIRED and k not in cfg)
    if missing:
        raise ConfigError(f"{context}: missing keys {missing}")
    out = dict(schema)
    out.update(cfg)
    return out


def _config_hash(resolved: dict) -> str:
    blob = json.dumps(resolved, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def _write_manifest(out_dir: Path, config_path, resolved: dict,
                    outputs: list, wall: float) -> None:
    manifest = {
        "config_path": str(config_path) if config_path else "",
        "config_sha256": _config_hash(resolved),
        "outputs": sorted(str(Path(o).name) for o in outputs),
        "wall_time_s": round(wall, 3),
        "exit_status": 0,
    }
    path = out_dir / "manifest.json"
    path.write_text(json.dumps(manifest, indent=1, sort_keys=True) + "\n")


def _out_dir(args, fallback: str = "") -> Path:
    d = args.out if args.out is not None else Path(fallback or "zcsim-out")
    d.mkdir(parents=True, exist_ok=True)
    return d


def _say(args, msg: str) -> None:
    if not args.quiet:
        print(msg)


# ---------------------------------------------------------------- handlers

def _cmd_ensemble_info(args) -> int:
    if args.spec:
        text = args.spec
    else:
        cfg = _take(_load_config(args), {"ensemble": _REQUIRED}, "ensemble-info")
        text = cfg["ensemble"]
    spec = parse_spec(text)
    basis = build_ensemble(spec)
    res = gram_residual(basis)
    lines = [
        f"ensemble: {spec.to_text()}",
        f"dimension: {spec.dimension}",
        f"basis cardinality: {basis.coeffs.shape[0]}",
        f"gram residual: {res:.3e}",
        f"orthonormality check: {basis.check_kind}",
    ]
    if basis.base_locus:
        lines.append(f"base locus: {basis.base_locus}")
    _say(args, "\n".join(lines))
    if args.out is not None:
        out = _out_dir(args)
        t0 = time.monotonic()
        info = {
            "ensemble": spec.to_text(),
            "dimension": spec.dimension,
            "cardinality": int(basis.coeffs.shape[0]),
            "gram_residual": float(res),
            "check": basis.check_kind,
        }
        (out / "ensemble_info.json").write_text(
            json.dumps(info, indent=1, sort_keys=True) + "\n")
        _write_manifest(out, args.config, {"ensemble": spec.to_text()},
                        ["ensemble_info.json"], time.monotonic() - t0)
    return 0


def _cmd_expected_density(args) -> int:
    t0 = time.monotonic()
    cfg = _take(_load_config(args), {
        "ensemble": _REQUIRED,
        "half_width": 2.0,
        "nodes": 201,
    }, "expected-density")
    basis = build_ensemble(parse_spec(cfg["ensemble"]))
    if basis.dimension == 1:
        grid = square_grid(cfg["half_width"], cfg["nodes"])
    else:
        grid = square_grid_2d(cfg["half_width"], cfg["nodes"])
    dens = expected_density(kernel_on_grid(basis, grid))
    out = _out_dir(args)
    outputs = []

    pts = grid.points()
    path = out / "density.csv"
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        if basis.dimension == 1:
            w.writerow(["re", "im", "density", "stencil_bound", "interior"])
            for k in range(pts.shape[0]):
                w.writerow([repr(float(pts[k].real)),
                            repr(float(pts[k].imag)),
                            repr(float(dens.values[k])),
                            repr(float(dens.bound_values[k])),
                            int(dens.interior[k])])
        else:
            w.writerow(["re_z", "im_z", "re_w", "im_w",
                        "density", "stencil_bound", "interior"])
            for k in range(pts.shape[0]):
                w.writerow([repr(float(pts[k, 0].real)),
                            repr(float(pts[k, 0].imag)),
                            repr(float(pts[k, 1].real)),
                            repr(float(pts[k, 1].imag)),
                            repr(float(dens.values[k])),
                            repr(float(dens.bound_values[k])),
                            int(dens.interior[k])])
    outputs.append(path)

    if basis.dimension == 1:
        field = dens.values.reshape(grid.shape)
        svg = svgplot.heatmap_svg(grid.axis_values(0), grid.axis_values(1),
                                  field, title=f"density {cfg['ensemble']}")
        spath = out / "density.svg"
        spath.write_text(svg)
        outputs.append(spath)

    _say(args, f"interior mass: {dens.mass:.6g}")
    _write_manifest(out, args.config, cfg, outputs, time.monotonic() - t0)
    return 0


def _cmd_sample_zeros(args) -> int:
    t0 = time.monotonic()
    cfg = _take(_load_config(args), {
        "ensemble": _REQUIRED,
        "seed": 0,
        "trial": 0,
    }, "sample-zeros")
    if args.seed is not None:
        cfg["seed"] = args.seed
    basis = build_ensemble(parse_spec(cfg["ensemble"]))
    out = _out_dir(args)
    outputs = []
    if basis.dimension == 1:
        zset = zeros_of_sample(sample(basis, cfg["seed"], cfg["trial"]))
        path = out / "zeros.csv"
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["re", "im", "residual", "multiplicity"])
            for k in range(zset.points.shape[0]):
                w.writerow([repr(float(zset.points[k].real)),
                            repr(float(zset.points[k].imag)),
                            repr(float(zset.residuals[k])),
                            int(zset.multiplicities[k])])
        outputs.append(path)
        svg = svgplot.scatter_svg(zset.points,
                                  title=f"zeros {cfg['ensemble']}")
    else:
        s1 = sample(basis, cfg["seed"], 2 * cfg["trial"])
        s2 = sample(basis, cfg["seed"], 2 * cfg["trial"] + 1)
        zset = zeros_of_pair(s1, s2)
        path = out / "zeros.csv"
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["re_z", "im_z", "re_w", "im_w",
                        "residual", "multiplicity"])
            for k in range(zset.points.shape[0]):
                w.writerow([repr(float(zset.points[k, 0].real)),
                            repr(float(zset.points[k, 0].imag)),
                            repr(float(zset.points[k, 1].real)),
                            repr(float(zset.points[k, 1].imag)),
                            repr(float(zset.residuals[k])),
                            int(zset.multiplicities[k])])
        outputs.append(path)
        svg = svgplot.scatter_svg(zset.points[:, 0],
                                  title=f"zeros (z-plane) {cfg['ensemble']}")
    spath = out / "zeros.svg"
    spath.write_text(svg)
    outputs.append(spath)
    _say(args, f"zeros found: {zset.total_count} "
               f"(converged: {zset.converged})")
    _write_manifest(out, args.config, cfg, outputs, time.monotonic() - t0)
    return 0


def _report_figures(report: dict, out: Path) -> list:
    """Render the figure set for a report dict; returns written paths."""
    kind = report["kind"]
    summary = report["summary"]
    rows = report["rows"]
    outputs = []
    if kind == "variance":
        degrees = sorted({r["N"] for r in rows})
        pooled = [float(np.mean([r["variance"] for r in rows if r["N"] == n]))
                  for n in degrees]
        svg = svgplot.loglog_svg(degrees, pooled, slope=summary.get("slope"),
                                 intercept=summary.get("intercept"),
                                 title=f"variance {report['config']['ensemble']}")
        path = out / "variance.svg"
        path.write_text(svg)
        outputs.append(path)
    elif kind == "trajectory":
        xs = [r["N"] for r in rows]
        ys = [r["discrepancy"] for r in rows]
        svg = svgplot.line_svg(xs, ys, title="trajectory discrepancy",
                               ylabel="d_N",
                               hline=report["config"].get("epsilon"))
        path = out / "trajectory.svg"
        path.write_text(svg)
        outputs.append(path)
    elif kind == "expectation":
        top = max(r["N"] for r in rows)
        sel = [r for r in rows if r["N"] == top]
        idx = [r["phi"] for r in sel]
        svg = svgplot.line_svg(idx, [r["mean"] for r in sel],
                               title=f"pairing means by test function, N={top}",
                               ylabel="mean pairing")
        path = out / "expectation.svg"
        path.write_text(svg)
        outputs.append(path)
    elif kind == "polytope":
        xs = [r["N"] for r in rows]
        ys = [r["inside_mass"] for r in rows]
        svg = svgplot.line_svg(xs, ys, title="zero mass in window",
                               ylabel="inside fraction")
        path = out / "polytope.svg"
        path.write_text(svg)
        outputs.append(path)
    return outputs


def _cmd_experiment(args) -> int:
    t0 = time.monotonic()
    raw = _load_config(args)
    cfg = ExperimentConfig.from_dict(raw)
    if cfg.kind != args.command:
        raise ConfigError(f"config kind {cfg.kind!r} does not match "
                          f"subcommand {args.command!r}")
    if args.seed is not None:
        d = cfg.to_dict()
        d["seed"] = args.seed
        cfg = ExperimentConfig.from_dict(d)
    out = _out_dir(args, cfg.out_dir)
    report = run_experiment(cfg)
    outputs = []
    jpath = out / "report.json"
    jpath.write_text(report.to_json())
    outputs.append(jpath)
    if args.format == "csv":
        cpath = out / "report.csv"
        cpath.write_text(report.to_csv())
        outputs.append(cpath)
    outputs.extend(_report_figures(json.loads(report.to_json()), out))
    for line in report.summary.get("notes", []):
        _say(args, f"note: {line}")
    _say(args, f"{cfg.kind} report written to {jpath}")
    _write_manifest(out, args.config, cfg.to_dict(), outputs,
                    time.monotonic() - t0)
    return 0


def _cmd_plot(args) -> int:
    t0 = time.monotonic()
    try:
        report = json.loads(args.report.read_text())
    except OSError as e:
        raise ConfigError(f"cannot read report: {e}")
    except json.JSONDecodeError as e:
        raise ConfigError(f"{args.report}: invalid JSON at line {e.lineno}, "
                          f"column {e.colno}: {e.msg}")
    if "kind" not in report or "summary" not in report:
        raise ConfigError(f"{args.report}: not a report file "
                          f"(missing 'kind'/'summary')")
    out = _out_dir(args)
    outputs = _report_figures(report, out)
    if not outputs:
        raise ConfigError(f"no figure defined for report kind "
                          f"{report['kind']!r}")
    _say(args, f"wrote {', '.join(str(p) for p in outputs)}")
    _write_manifest(out, args.report, report.get("config", {}), outputs,
                    time.monotonic() - t0)
    return 0


_HANDLERS = {
    "ensemble-info": _cmd_ensemble_info,
    "expected-density": _cmd_expected_density,
    "sample-zeros": _cmd_sample_zeros,
    "expectation": _cmd_experiment,
    "variance": _cmd_experiment,
    "trajectory": _cmd_experiment,
    "polytope": _cmd_experiment,
    "plot": _cmd_plot,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _HANDLERS[args.command](args)
    except (ConfigError, ValueError) as e:
        # ValueError covers malformed ensemble text and config field values
        print(f"zcsim: config error: {e}", file=sys.stderr)
        return 1
    except NumericalError as e:
        print(f"zcsim: numerical failure: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
