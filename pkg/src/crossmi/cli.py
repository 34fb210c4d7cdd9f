"""Command-line front end: ``crossmi <subcommand> ...``.

Every subcommand writes its outputs under ``--outdir`` together with a
``manifest.json`` listing the command, a hash of the resolved configuration,
the seed, the tool version and the files written. Errors are reported on a
single stderr line of the form ``crossmi: error[CODE]: message``.

Exit status: 0 success, 1 a figure check failed, 2 input error.
"""

from __future__ import annotations

import argparse
import dataclasses
import datetime
import hashlib
import json
import sys
from pathlib import Path


from . import __version__
from .dataset import (LN2, Backend, DatasetError, EstimatorConfig, read_paired_csv,
                      to_jsonable, write_columns_csv, write_paired_csv,
                      write_results_json)
from .estimators import (DegenerateFitError, DuplicatePointsError,
                         estimate_cross_mi, estimate_mi, gaussian_fit,
                         gaussian_heatmap, heatmap_columns)
from .figures import (FIGURE_IDS, UnknownFigureError, resolve_config,
                      run_figure, scaling_statistics)
from .significance import (BlockSpec, ShuffleTarget, TestKind,
                           support_distances, test_cross_mi_nonzero,
                           test_mi_difference, test_mi_nonzero)
from .simgen import ConditionSpec, scaling_experiment

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INPUT_ERROR = 2


class CliError(Exception):
    def __init__(self, code: str, message: str, status: int = EXIT_INPUT_ERROR):
        super().__init__(message)
        self.code = code
        self.status = status


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError("USAGE", message)


# -- manifest ------------------------------------------------------------------


def config_hash(config) -> str:
    """sha256 of the canonical JSON form (sorted keys, no whitespace)."""
    text = json.dumps(to_jsonable(config), sort_keys=True, separators=(",", ":"),
                      allow_nan=False)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


@dataclasses.dataclass
class RunManifest:
    command: str
    config_hash: str
    seed: int
    tool_version: str
    outputs: list
    timestamp: str = ""
    extra: dict = dataclasses.field(default_factory=dict)

    def to_dict(self) -> dict:
        doc = {"command": self.command, "config_hash": self.config_hash,
               "seed": self.seed, "tool_version": self.tool_version,
               "outputs": [str(p) for p in self.outputs],
               "timestamp": self.timestamp}
        doc.update(self.extra)
        return doc

    def write(self, outdir: Path) -> Path:
        missing = [str(p) for p in self.outputs if not (outdir / p).exists()]
        if missing:
            raise CliError("OUTPUT", f"outputs missing after run: {', '.join(missing)}")
        path = outdir / "manifest.json"
        path.write_text(json.dumps(to_jsonable(self.to_dict()), indent=2) + "\n",
                        encoding="utf-8")
        return path


def _finish(args, outdir: Path, config: dict, outputs, extra=None) -> Path:
    stamp = datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")
    manifest = RunManifest(args.command, config_hash(config), args.seed,
                           __version__, [Path(p).as_posix() for p in outputs], stamp,
                           extra or {})
    return manifest.write(outdir)


# -- helpers -------------------------------------------------------------------


def _outdir(args) -> Path:
    out = Path(args.outdir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise CliError("OUTPUT", f"cannot create output directory {out}: {exc.strerror}")
    return out


def _read(path, args):
    return read_paired_csv(path, args.x_col, args.y_col)


def _estimator(args) -> EstimatorConfig:
    return EstimatorConfig(backend=Backend(args.backend), k=args.k,
                           noise_amplitude=args.noise, rng_seed=args.seed,
                           normalise=not args.no_normalise)


def _load_json(path) -> dict:
    if path is None:
        return {}
    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(f"no such file: {p}")
    try:
        return json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise CliError("CONFIG", f"{p}: invalid JSON ({exc.msg} at line {exc.lineno})")


def _block_len(text: str):
    if text == "auto":
        return None
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"block length must be an integer or 'auto', got {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError("block length must be positive")
    return value


# -- subcommands ---------------------------------------------------------------


def cmd_estimate(args) -> int:
    outdir = _outdir(args)
    cfg = _estimator(args)
    test = _read(args.test, args)
    config = {"estimator": cfg.to_dict(), "test": str(args.test),
              "reference": None if args.reference is None else str(args.reference),
              "self_exclude": args.self_exclude}
    if args.reference is None:
        result = estimate_mi(test, cfg)
        kind = "MI"
    else:
        reference = _read(args.reference, args)
        result = estimate_cross_mi(test, reference, cfg, exclude_self=args.self_exclude)
        kind = "CrossMI"
    outputs = [args.out]
    write_results_json(outdir / args.out, result, config=config, bits=args.bits)
    if args.locals_csv:
        scale = 1 / LN2 if args.bits else 1.0
        unit = "bits" if args.bits else "nats"
        write_paired_csv(outdir / args.locals_csv, test,
                         extra={f"local_{unit}": result.locals * scale})
        outputs.append(args.locals_csv)
    _finish(args, outdir, config, outputs, {"kind": kind})
    mean = result.mean / LN2 if args.bits else result.mean
    print(f"{kind} mean = {mean!r} {'bits' if args.bits else 'nats'}")
    return EXIT_OK


def cmd_test(args) -> int:
    outdir = _outdir(args)
    cfg = _estimator(args)
    kind = TestKind(args.kind)
    spec = BlockSpec(args.block_len, args.n_perms, args.seed)
    test = _read(args.test, args)
    reference = None if args.reference is None else _read(args.reference, args)
    if kind is TestKind.MI_NONZERO:
        result = test_mi_nonzero(test, cfg, spec)
    elif reference is None:
        raise CliError("INPUT", f"{kind.value} needs --reference")
    elif kind is TestKind.MI_DIFFERENCE:
        result = test_mi_difference(test, reference, cfg, spec)
    else:
        result = test_cross_mi_nonzero(test, reference, ShuffleTarget(args.shuffle_target),
                                       cfg, spec)
    config = {"estimator": cfg.to_dict(), "kind": kind.value,
              "block_len": "auto" if args.block_len is None else args.block_len,
              "n_permutations": args.n_perms, "shuffle_target": args.shuffle_target,
              "test": str(args.test),
              "reference": None if args.reference is None else str(args.reference)}
    write_results_json(outdir / args.out, result, config=config, bits=args.bits)
    _finish(args, outdir, config, [args.out])
    print(f"{kind.value}: observed = {result.observed!r} nats, "
          f"p = {result.p_value!r}, block_len = {result.block_len}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    override = _load_json(args.config)
    try:
        resolved = resolve_config(args.figure_id, override)
    except UnknownFigureError as exc:
        raise CliError("FIGURE", str(exc))
    outdir = _outdir(args)
    run = run_figure(args.figure_id, args.seed, override)
    paths = run.write(outdir, bits=args.bits)
    checks = [c.to_dict() for c in run.checks]
    _finish(args, outdir, resolved, [p.name for p in paths],
            {"figure_id": args.figure_id, "checks": checks, "passed": run.passed})
    for c in run.checks:
        print(f"{'PASS' if c.passed else 'FAIL'} {args.figure_id}: {c.name} [{c.detail}]")
    if not run.passed:
        failed = [c.name for c in run.checks if not c.passed]
        raise CliError("CHECK", f"{args.figure_id}: failed checks: {'; '.join(failed)}",
                       EXIT_CHECK_FAILED)
    return EXIT_OK


def cmd_heatmap(args) -> int:
    outdir = _outdir(args)
    reference = _read(args.reference, args)
    model = gaussian_fit(reference)
    xs, ys, grid = gaussian_heatmap(model, tuple(args.x_range), tuple(args.y_range),
                                    args.resolution)
    cols = heatmap_columns(xs, ys, grid)
    if args.bits:
        cols["local_mi_bits"] = cols.pop("local_mi_nats") / LN2
    write_columns_csv(outdir / args.out, cols)
    config = {"reference": str(args.reference), "x_range": args.x_range,
              "y_range": args.y_range, "resolution": args.resolution,
              "model": model.to_dict()}
    _finish(args, outdir, config, [args.out])
    print(f"wrote {args.resolution}x{args.resolution} grid to {outdir / args.out}")
    return EXIT_OK


def cmd_diagnose(args) -> int:
    outdir = _outdir(args)
    test = _read(args.test, args)
    reference = _read(args.reference, args)
    test_nn, ref_nn = support_distances(test, reference)
    ratio = float(test_nn.mean() / ref_nn.mean())
    report = {"support_ratio": ratio,
              "mean_test_to_reference_distance": float(test_nn.mean()),
              "mean_reference_to_reference_distance": float(ref_nn.mean()),
              "n_test": test.n, "n_reference": reference.n}
    config = {"test": str(args.test), "reference": str(args.reference)}
    write_results_json(outdir / args.out, report, kind="SupportDiagnostic", config=config)
    write_paired_csv(outdir / args.distances_csv, test,
                     extra={"nearest_reference_distance": test_nn})
    _finish(args, outdir, config, [args.out, args.distances_csv])
    print(f"support ratio = {ratio!r} (test-to-reference over reference spacing)")
    return EXIT_OK


def cmd_scaling(args) -> int:
    outdir = _outdir(args)
    fig = resolve_config("fig6", _load_json(args.config))["figure"]
    if args.sizes:
        fig["test_sizes"] = args.sizes
    if args.n_reference:
        fig["n_reference"] = args.n_reference
    cfg = _estimator(args)
    rows = scaling_experiment(ConditionSpec.from_dict(fig["reference"]),
                              ConditionSpec.from_dict(fig["test"]), fig["test_sizes"],
                              args.include_test, cfg, args.seed, fig["n_reference"])
    scale = 1 / LN2 if args.bits else 1.0
    unit = "bits" if args.bits else "nats"
    write_columns_csv(outdir / args.out, {
        "n_test": [r.n_test for r in rows],
        f"I_p_{unit}": [r.I_p * scale for r in rows],
        f"I_q_{unit}": [r.I_q * scale for r in rows],
        f"CI_pq_{unit}": [r.CI_pq * scale for r in rows]})
    config = {"estimator": cfg.to_dict(), "scaling": fig,
              "include_test_in_reference": args.include_test}
    stats = scaling_statistics(rows)
    _finish(args, outdir, config, [args.out], {"trend": stats})
    print(f"Spearman rho = {stats['spearman_rho']:.3f}, "
          f"slope p = {stats['slope_p_value']:.3f}")
    return EXIT_OK


# -- parser --------------------------------------------------------------------


def _common(p, estimator=True):
    p.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    p.add_argument("--outdir", default=".", help="directory for all outputs")
    p.add_argument("--bits", action="store_true", help="report information in bits")
    p.add_argument("--x-col", default="x", help="CSV column holding x")
    p.add_argument("--y-col", default="y", help="CSV column holding y")
    if estimator:
        p.add_argument("--backend", choices=[b.value for b in Backend], default="KSG")
        p.add_argument("--k", type=int, default=4, help="KSG neighbour count")
        p.add_argument("--noise", type=float, default=1e-8,
                       help="relative jitter amplitude for the KSG backend")
        p.add_argument("--no-normalise", action="store_true",
                       help="skip standardising by the reference statistics")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="crossmi", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"crossmi {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("estimate", help="MI of a series or cross MI against a reference")
    p.add_argument("--test", required=True, type=Path)
    p.add_argument("--reference", type=Path)
    p.add_argument("--self-exclude", action="store_true",
                   help="treat test row i as reference row i (test == reference)")
    p.add_argument("--out", default="estimate.json")
    p.add_argument("--locals-csv", default=None, help="also write per-sample locals")
    _common(p)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("test", help="block-shuffle permutation tests")
    p.add_argument("--test", required=True, type=Path)
    p.add_argument("--reference", type=Path,
                   help="reference series (second dataset for MI_DIFFERENCE)")
    p.add_argument("--kind", choices=[k.value for k in TestKind], default="MI_NONZERO")
    p.add_argument("--shuffle-target", choices=["TEST", "REFERENCE"], default="TEST")
    p.add_argument("--block-len", type=_block_len, default=None,
                   help="samples per block or 'auto' (default)")
    p.add_argument("--n-perms", type=int, default=200)
    p.add_argument("--out", default="test.json")
    _common(p)
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("simulate", help="run a pinned figure pipeline")
    p.add_argument("figure_id", help=f"one of {', '.join(FIGURE_IDS)}")
    p.add_argument("--config", type=Path, help="JSON overriding the pinned settings")
    _common(p, estimator=False)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("heatmap", help="Gaussian local MI over a grid")
    p.add_argument("--reference", required=True, type=Path)
    p.add_argument("--x-range", nargs=2, type=float, required=True, metavar=("LO", "HI"))
    p.add_argument("--y-range", nargs=2, type=float, required=True, metavar=("LO", "HI"))
    p.add_argument("--resolution", type=int, default=50)
    p.add_argument("--out", default="heatmap.csv")
    _common(p, estimator=False)
    p.set_defaults(func=cmd_heatmap)

    p = sub.add_parser("diagnose", help="support diagnostic of test vs reference")
    p.add_argument("--test", required=True, type=Path)
    p.add_argument("--reference", required=True, type=Path)
    p.add_argument("--out", default="diagnose.json")
    p.add_argument("--distances-csv", default="distances.csv")
    _common(p, estimator=False)
    p.set_defaults(func=cmd_diagnose)

    p = sub.add_parser("scaling", help="cross MI against test-set size")
    p.add_argument("--config", type=Path, help="JSON overriding the pinned scaling settings")
    p.add_argument("--sizes", type=int, nargs="+")
    p.add_argument("--n-reference", type=int)
    p.add_argument("--include-test", action=argparse.BooleanOptionalAction, default=True,
                   help="pool the test samples into the reference")
    p.add_argument("--out", default="scaling.csv")
    _common(p)
    p.set_defaults(func=cmd_scaling)
    return parser


_ERROR_CODES = (
    (FileNotFoundError, "FILE"),
    (DatasetError, "DATA"),
    (DuplicatePointsError, "DUPLICATES"),
    (DegenerateFitError, "DEGENERATE"),
    (OSError, "OUTPUT"),
    (ValueError, "INPUT"),
    (KeyError, "CONFIG"),
    (TypeError, "CONFIG"),
)


def _report(code: str, message: str):
    text = " ".join(str(message).split())
    print(f"crossmi: error[{code}]: {text}", file=sys.stderr)


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except CliError as exc:
        _report(exc.code, exc)
        return exc.status
    except Exception as exc:
        for kind, code in _ERROR_CODES:
            if isinstance(exc, kind):
                _report(code, exc)
                return EXIT_INPUT_ERROR
        raise


if __name__ == "__main__":
    sys.exit(main())
