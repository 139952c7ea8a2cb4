"""Command-line frontend.

    iwasawa classify INPUT              JSON report for one structure
    iwasawa verify                      run every property suite
    iwasawa region-map --out map.csv    (lambda, mu, region, component) samples
    iwasawa retract-trace [INPUT]       entries of J(t) along a contraction path
    iwasawa dolbeault INPUT             invariant Dolbeault ranks

INPUT is a JSON file ("-" for stdin) holding one of
    {"J": [[...6 rows of 6 reals...]]}
    {"echelon_plus": {"a": z, "b": z, "c": z, "d": z, "x": z, "y": z}}
    {"echelon_minus": {"a": z, "b": z, "c": z, "x": z, "y": z, "v": z}}
with z a number or a [re, im] pair, or one of the names J0, J1.

Exit codes: 0 success, 1 verification failure, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import acstruct, dolbeault, echelon, retract, spectra, suites

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
FORMATS = ("json", "csv", "svg")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    seed: int = 0
    samples: int = 200
    tolerance: float | None = None
    output_path: str | None = None
    format: str | None = None

    def __post_init__(self):
        if self.samples <= 0:
            raise UsageError("--samples must be positive")
        if self.tolerance is not None and self.tolerance <= 0:
            raise UsageError("--tol must be positive")


# -- input -----------------------------------------------------------------

def load_structure(source: str) -> np.ndarray:
    """A 6x6 matrix from a file, stdin, a builtin name or an echelon tuple."""
    if source in ("J0", "J1"):
        return getattr(acstruct, source).copy()
    try:
        text = sys.stdin.read() if source == "-" else Path(source).read_text()
        data = json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {source}: {exc}") from exc
    try:
        if not isinstance(data, dict):
            raise ValueError("expected a JSON object")
        if "J" in data:
            J = np.array(data["J"], dtype=float)
            if J.shape != (6, 6):
                raise ValueError(f"J must be 6x6, got shape {J.shape}")
            return acstruct.check_acs(J)
        if "echelon_plus" in data:
            return echelon.J_from_echelon_plus(echelon.EchelonPlus.from_dict(data["echelon_plus"]))
        if "echelon_minus" in data:
            return echelon.J_from_echelon_minus(echelon.EchelonMinus.from_dict(data["echelon_minus"]))
        raise ValueError("expected one of the keys J, echelon_plus, echelon_minus")
    except (ValueError, TypeError) as exc:
        raise UsageError(f"invalid structure in {source}: {exc}") from exc


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        try:
            Path(out).write_text(text)
        except OSError as exc:
            raise UsageError(f"cannot write {out}: {exc}") from exc


ZERO_TOL = 1e-13  # report floats below this as exact zeros


def _clean(obj):
    if isinstance(obj, float):
        return 0.0 if abs(obj) < ZERO_TOL else obj
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def _json(obj) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=True) + "\n"


# -- classify --------------------------------------------------------------

def _chart(J, to_coords):
    try:
        return to_coords(J, check=False).to_dict(), None
    except echelon.InfinityClass:
        return None, "InfinityClass"


def classify_report(J) -> dict:
    J = acstruct.check_acs(J)
    if not acstruct.is_integrable(J):
        return {"integrable": False}
    report = {"integrable": True, "component": spectra.classify(J)}
    if acstruct.orientation_total(J) != 1:
        # echelon charts and the spectrum describe positively oriented structures
        report["echelon"] = {"J0": "NotApplicable", "J1": "NotApplicable"}
    else:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            plus, plus_err = _chart(J, echelon.echelon_plus_from_J)
            minus, minus_err = _chart(J, echelon.echelon_minus_from_J)
        report["echelon"] = {"J0": plus or plus_err, "J1": minus or minus_err}
        report["in_C0_finite"] = plus is not None
        if plus is not None:
            coords = echelon.EchelonPlus.from_dict(plus)
            s = spectra.spectrum(coords.X)
            report["spectrum"] = dict(s.to_dict(), chart="J0")
            report["region"] = "origin" if np.abs(coords.X).max() <= ZERO_TOL else s.region
            report["orbit_dimension"] = spectra.orbit_dimension(coords)
        else:
            # Figure-1 regions and orbit dimensions live on the J0 chart; give
            # the raw eigenvalues of the J1-chart X only
            s = spectra.spectrum(echelon.EchelonMinus.from_dict(minus).X)
            raw = s.to_dict()
            report["spectrum"] = {k: raw[k] for k in ("gamma", "delta", "lambda", "mu")}
            report["spectrum"]["chart"] = "J1"
            report["region"] = "NotApplicable"
            report["orbit_dimension"] = None
    report["h1"] = dolbeault.dolbeault_report(J).h1
    return report


def cmd_classify(args, cfg: RunConfig) -> int:
    J = load_structure(args.input)
    _emit(_json(classify_report(J)), cfg.output_path)
    return EXIT_OK


# -- verify ----------------------------------------------------------------

def verify_table(results, fmt: str | None) -> str:
    if fmt == "json":
        return _json([r.to_dict() for r in results])
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["suite", "module", "status", "worst", "tol", "margin", "anchor", "detail"])
        for r in results:
            w.writerow([r.name, r.module, "PASS" if r.passed else "FAIL",
                        f"{r.worst:.3e}", f"{r.tol:.1e}", f"{r.margin:.3e}", r.anchor, r.detail])
        return buf.getvalue()
    lines = [f"{'suite':28s} {'module':10s} {'status':6s} {'worst':>10s} {'tol':>8s} {'margin':>11s}  anchor"]
    for r in results:
        lines.append(f"{r.name:28s} {r.module:10s} {'PASS' if r.passed else 'FAIL':6s} "
                     f"{r.worst:10.3e} {r.tol:8.1e} {r.margin:11.3e}  {r.anchor}: {r.detail}")
    failed = sum(not r.passed for r in results)
    lines.append(f"{len(results) - failed}/{len(results)} suites passed")
    return "\n".join(lines) + "\n"


def cmd_verify(args, cfg: RunConfig) -> int:
    names = None
    if args.suite:
        unknown = sorted(set(args.suite) - set(suites.SUITE_NAMES))
        if unknown:
            raise UsageError(f"unknown suite(s): {', '.join(unknown)}")
        names = args.suite
    results = suites.run_all(cfg.seed, cfg.samples, cfg.tolerance, names)
    _emit(verify_table(results, cfg.format), cfg.output_path)
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


# -- region map ------------------------------------------------------------

def region_rows(seed: int, samples: int) -> list[dict]:
    rng = np.random.default_rng(seed)
    rows = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        for c, J in suites.sample_plus(rng, samples):
            s = spectra.spectrum(c.X)
            rows.append({"lambda": s.lam, "mu": s.mu, "region": s.region,
                         "component": spectra.classify(J, cross_check=False)})
    return rows


def region_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["lambda_re", "lambda_im", "mu_re", "mu_im", "region", "component"])
    for r in rows:
        w.writerow([f"{r['lambda'].real:.12g}", f"{r['lambda'].imag:.12g}",
                    f"{r['mu'].real:.12g}", f"{r['mu'].imag:.12g}", r["region"], r["component"]])
    return buf.getvalue()


def _figure_path(cfg: RunConfig, args, default: str) -> str | None:
    if args.figure:
        return args.figure
    if cfg.format == "svg":
        return str(Path(cfg.output_path or default).with_suffix(".svg"))
    return None


def cmd_region_map(args, cfg: RunConfig) -> int:
    rows = region_rows(cfg.seed, cfg.samples)
    out = cfg.output_path or "region_map.csv"
    _emit(region_csv(rows), out)
    fig = _figure_path(cfg, args, out)
    if fig:
        from .figures import region_map

        region_map([r["lambda"] for r in rows], [r["mu"] for r in rows],
                   [r["region"] for r in rows], fig)
    return EXIT_OK


# -- retraction trace ------------------------------------------------------

def _default_minus_structure(seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    for c, J in suites.sample_plus(rng, 1000):
        if spectra.classify(J, cross_check=False) == spectra.CMINUS:
            return J
    raise RuntimeError("no sample in the negative component")


def cmd_retract_trace(args, cfg: RunConfig) -> int:
    J = load_structure(args.input) if args.input else _default_minus_structure(cfg.seed)
    if not acstruct.is_integrable(J) or spectra.classify(J, cross_check=False) != spectra.CMINUS:
        raise UsageError("retract-trace needs an integrable structure in C-")
    if args.kind == "contraction":
        path = retract.contraction_path(J)
        fn, title = path.at, "contraction onto the sphere Z"
    else:
        Jhat = acstruct.restrict_to_D(J)
        fiber = J[4:, 4:] if np.allclose(J[:4, 4:], 0) else acstruct.J1[4:, 4:]
        fn = lambda t: acstruct.embed_D(retract.homotopy_path(Jhat, 1 - t), fiber)  # noqa: E731
        title = "polar retraction of the base structure"
    rows = retract.trace_rows(fn, args.steps)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t"] + [f"J{i}{j}" for i in range(1, 7) for j in range(1, 7)])
    for r in rows:
        w.writerow([f"{x:.12g}" for x in r])
    out = cfg.output_path or "retract_trace.csv"
    _emit(buf.getvalue(), out)
    fig = _figure_path(cfg, args, out)
    if fig:
        from .figures import trace_plot

        trace_plot(rows, fig, title)
    return EXIT_OK


# -- dolbeault -------------------------------------------------------------

def cmd_dolbeault(args, cfg: RunConfig) -> int:
    J = load_structure(args.input)
    if not acstruct.is_integrable(J):
        report = {"integrable": False}
    else:
        report = dict(dolbeault.dolbeault_report(J).to_dict(), integrable=True)
    _emit(_json(report), cfg.output_path)
    return EXIT_OK


# -- entry point -----------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    common.add_argument("--samples", type=int, default=200, help="samples per suite or map")
    common.add_argument("--tol", type=float, default=None, help="override residual tolerances")
    common.add_argument("--out", default=None, help="output file (default stdout for reports)")
    common.add_argument("--format", choices=FORMATS, default=None)

    parser = argparse.ArgumentParser(prog="iwasawa", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", parents=[common], help="classify one structure")
    p.add_argument("input")
    p.set_defaults(fn=cmd_classify)

    p = sub.add_parser("verify", parents=[common], help="run the property suites")
    p.add_argument("--suite", action="append", help="run only this suite (repeatable)")
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("region-map", parents=[common], help="sample the eigenvalue regions")
    p.add_argument("--figure", default=None, help="also draw the map (.svg or .png)")
    p.set_defaults(fn=cmd_region_map)

    p = sub.add_parser("retract-trace", parents=[common], help="trace a path to the sphere Z")
    p.add_argument("input", nargs="?", default=None)
    p.add_argument("--kind", choices=("contraction", "polar"), default="contraction")
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--figure", default=None, help="also plot the entries (.svg or .png)")
    p.set_defaults(fn=cmd_retract_trace)

    p = sub.add_parser("dolbeault", parents=[common], help="invariant Dolbeault ranks")
    p.add_argument("input")
    p.set_defaults(fn=cmd_dolbeault)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig(args.seed, args.samples, args.tol, args.out, args.format)
        if getattr(args, "steps", 1) <= 0:
            raise UsageError("--steps must be positive")
        return args.fn(args, cfg)
    except UsageError as exc:
        print(f"iwasawa: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
