"""Command-line driver: generate, denoise, metrics, compare, import.

Exit codes: 0 success, 2 usage or invalid input, 3 numerical divergence,
4 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import io
from .energy import ModelParams
from .phase import PhasePair, decompose, normalize, pythagorean_deviation, reconstruct, wrap
from .solvers import (
    DivergenceError,
    SolveConfig,
    fixed_point_denoise,
    gradient_descent_denoise,
    strobel_denoise,
)
from .synth import NoiseSpec, SceneSpec, add_noise, compute_metrics, generate_scene

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DIVERGED = 3
EXIT_IO = 4

SCENES = {
    "ramp": "ramp_with_vertical_jump",
    "gaussian": "gaussian_peak",
    "expr": "custom_expression",
}

DENOISE_DEFAULTS = {
    "method": "fixed-point",
    "lambda1": 2.5,
    "lambda2": 2.5,
    "lambda3": 5.0,
    "beta": 0.001,
    "epsilon": 1e-7,
    "max_outer": 10_000,
    "gs_sweeps": 1,
    "tau": None,
    "filter": "mean3",
    "sigma": 1.0,
    "normalize": False,
}

COMPARE_COLUMNS = (
    "method",
    "mse_real",
    "mse_im",
    "iqi_real",
    "iqi_im",
    "pyth_mean",
    "pyth_max",
    "iterations",
    "wall_time",
)


class UsageError(ValueError):
    pass


def _write_pair(out: Path, prefix: str, pair: PhasePair) -> None:
    io.write_field(out / f"{prefix}_real.phf", pair.real)
    io.write_field(out / f"{prefix}_im.phf", pair.im)


def _read_pair(directory: Path, prefix: str) -> PhasePair:
    return PhasePair(
        io.read_field(directory / f"{prefix}_real.phf"),
        io.read_field(directory / f"{prefix}_im.phf"),
    )


def cmd_generate(args) -> int:
    spec = SceneSpec(
        kind=SCENES[args.scene],
        rows=args.rows,
        cols=args.cols,
        phase_range=args.phase_range,
        jump_height=args.jump_height,
        seed=args.seed,
        expression=args.expression,
    )
    phi = generate_scene(spec)
    psi = wrap(phi)
    noisy, achieved = add_noise(psi, NoiseSpec(args.snr_db, seed=args.seed))

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    io.write_field(out / "phi.phf", phi)
    io.write_field(out / "clean_psi.phf", psi)
    io.write_field(out / "noisy_psi.phf", noisy)
    _write_pair(out, "clean", decompose(psi))
    _write_pair(out, "noisy", decompose(noisy))
    io.write_pgm16(out / "clean_psi.pgm", psi)
    io.write_pgm16(out / "noisy_psi.pgm", noisy)
    io.write_json(
        out / "scene.json",
        {
            "scene": {
                "kind": spec.kind,
                "rows": spec.rows,
                "cols": spec.cols,
                "phase_range": spec.phase_range,
                "jump_height": spec.jump_height,
                "expression": spec.expression,
            },
            "noise": {"target_snr_db": args.snr_db, "seed": args.seed, "rng": "numpy PCG64"},
            "achieved_snr_db": achieved,
        },
    )
    print(f"achieved_snr_db={achieved:.4f}")
    return EXIT_OK


def _denoise_options(args) -> dict:
    opts = dict(DENOISE_DEFAULTS)
    if args.config:
        cfg = io.read_json(args.config)
        unknown = set(cfg) - set(opts)
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        opts.update(cfg)
    for key in DENOISE_DEFAULTS:
        value = getattr(args, key, None)
        if value is not None and value is not False:
            opts[key] = value
    return opts


def _load_noisy(directory: Path) -> PhasePair:
    if (directory / "noisy_real.phf").exists():
        return _read_pair(directory, "noisy")
    return decompose(io.read_field(directory / "noisy_psi.phf"))


def _maybe_metrics(directory: Path, result: PhasePair):
    needed = ("clean_real.phf", "clean_im.phf", "noisy_psi.phf")
    if not all((directory / name).exists() for name in needed):
        return None
    reference = _read_pair(directory, "clean")
    return compute_metrics(result, reference, io.read_field(directory / "noisy_psi.phf"))


def cmd_denoise(args) -> int:
    opts = _denoise_options(args)
    src, out = Path(args.input), Path(args.out)
    data = _load_noisy(src)
    if opts["normalize"]:
        data = normalize(data)
    params = ModelParams(opts["lambda1"], opts["lambda2"], opts["lambda3"], opts["beta"])
    config = SolveConfig(
        params=params,
        epsilon=opts["epsilon"],
        max_outer=int(opts["max_outer"]),
        gs_sweeps_per_outer=int(opts["gs_sweeps"]),
        record_energy=True,
    )
    out.mkdir(parents=True, exist_ok=True)

    method = opts["method"]
    report_doc = {
        "method": method,
        "input": str(src),
        "normalized_input": bool(opts["normalize"]),
        "params": {
            "lambda1": params.lambda1,
            "lambda2": params.lambda2,
            "lambda3": params.lambda3,
            "beta": params.beta,
        },
    }
    t0 = time.perf_counter()
    report = None
    try:
        if method == "fixed-point":
            result, report = fixed_point_denoise(data, config)
        elif method == "gradient-descent":
            result, report = gradient_descent_denoise(data, config, tau=opts["tau"])
        elif method == "strobel":
            result = strobel_denoise(data, opts["filter"], opts["sigma"])
            report_doc["filter"] = opts["filter"]
            if opts["filter"] == "gaussian":
                report_doc["sigma"] = opts["sigma"]
        else:
            raise UsageError(f"unknown method {method!r}")
    except DivergenceError as exc:
        io.write_trace(out / "trace.csv", exc.report)
        report_doc.update(_iteration_fields(exc.report, config))
        report_doc["error"] = str(exc)
        report_doc["timing"] = {"wall_time": exc.report.wall_time}
        io.write_json(out / "report.json", report_doc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    wall = time.perf_counter() - t0

    psi = reconstruct(result)
    _write_pair(out, "denoised", result)
    io.write_field(out / "denoised_psi.phf", psi)
    io.write_field(out / "pyth_dev.phf", pythagorean_deviation(result))
    io.write_pgm16(out / "denoised_psi.pgm", psi)
    if report is not None:
        io.write_trace(out / "trace.csv", report)
        report_doc.update(_iteration_fields(report, config))
        wall = report.wall_time
    else:
        report_doc.update({"converged": True, "iterations": 0})
    report_doc["timing"] = {"wall_time": wall}
    io.write_json(out / "report.json", report_doc)

    metrics = _maybe_metrics(src, result)
    if metrics is not None:
        io.write_json(out / "metrics.json", metrics.as_dict())
    if report is None:
        print(f"{method}: direct filter applied")
    else:
        status = "converged" if report.converged else "stopped at max_outer"
        print(f"{method}: {status} after {report.outer_iterations} iterations")
    return EXIT_OK


def _iteration_fields(report, config: SolveConfig) -> dict:
    fields = {
        "converged": report.converged,
        "iterations": report.outer_iterations,
        "final_rel_change": report.final_relative_change,
        "epsilon": config.epsilon,
        "max_outer": config.max_outer,
        "gs_sweeps_per_outer": config.gs_sweeps_per_outer,
    }
    if report.step is not None:
        fields["tau"] = report.step
    if report.dominance_margins:
        fields["min_dominance_margin"] = min(report.dominance_margins)
    return fields


def _load_result(directory: Path) -> PhasePair:
    if (directory / "denoised_real.phf").exists():
        return _read_pair(directory, "denoised")
    return PhasePair(io.read_field(directory / "real.phf"), io.read_field(directory / "im.phf"))


def cmd_metrics(args) -> int:
    result = _load_result(Path(args.result))
    ref_dir = Path(args.reference)
    reference = _read_pair(ref_dir, "clean")
    if result.shape != reference.shape:
        raise UsageError(f"shape mismatch: result {result.shape} vs reference {reference.shape}")
    metrics = compute_metrics(result, reference, io.read_field(ref_dir / "noisy_psi.phf"))
    io.write_json(args.out, metrics.as_dict())
    print(" ".join(f"{k}={v:.6g}" for k, v in metrics.as_dict().items()))
    return EXIT_OK


def cmd_compare(args) -> int:
    rows = []
    for run in map(Path, args.runs):
        report = io.read_json(run / "report.json")
        metrics = io.read_json(run / "metrics.json")
        label = report.get("method", run.name)
        if "filter" in report:
            label = f"{label}({report['filter']})"
        rows.append(
            {
                "method": label,
                **{k: metrics[k] for k in COMPARE_COLUMNS[1:7]},
                "iterations": report.get("iterations", 0),
                "wall_time": report.get("timing", {}).get("wall_time", ""),
            }
        )
    with open(args.out, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=COMPARE_COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    return EXIT_OK


def _read_gray(path: Path) -> tuple[np.ndarray, int]:
    with open(path, "rb") as fh:
        head = fh.read(2)
    if head == b"P5":
        return io.read_pgm(path)
    from PIL import Image

    with Image.open(path) as img:
        levels = np.asarray(img)
    if levels.ndim != 2:
        raise UsageError(f"{path}: expected a single-channel grayscale image")
    maxval = 255 if levels.dtype == np.uint8 else 65535
    return levels.astype(np.int64), maxval


def cmd_import(args) -> int:
    levels, maxval = _read_gray(Path(args.image))
    psi = wrap(-math.pi + 2.0 * math.pi * levels / maxval)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    io.write_field(out / "noisy_psi.phf", psi)
    _write_pair(out, "noisy", decompose(psi))
    io.write_json(
        out / "import.json",
        {
            "source": str(args.image),
            "shape": list(psi.shape),
            "mapping": {
                "maxval": maxval,
                "formula": "psi = wrap(-pi + 2*pi*level/maxval)",
            },
        },
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="phasetv", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="synthetic wrapped phase with calibrated noise")
    g.add_argument("--scene", choices=sorted(SCENES), default="ramp")
    g.add_argument("--rows", type=int, default=128)
    g.add_argument("--cols", type=int, default=128)
    g.add_argument("--phase-range", type=float, default=14 * math.pi, help="radians")
    g.add_argument("--jump-height", type=float, default=math.pi, help="radians")
    g.add_argument("--expression", help="numpy expression in i, j for --scene expr")
    g.add_argument("--snr-db", type=float, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_generate)

    d = sub.add_parser("denoise", help="denoise the channel pair in a directory")
    d.add_argument("--method", choices=("fixed-point", "gradient-descent", "strobel"))
    d.add_argument("--lambda1", type=float)
    d.add_argument("--lambda2", type=float)
    d.add_argument("--lambda3", type=float)
    d.add_argument("--beta", type=float)
    d.add_argument("--epsilon", type=float)
    d.add_argument("--max-outer", type=int)
    d.add_argument("--gs-sweeps", type=int)
    d.add_argument("--tau", type=float, help="gradient-descent step (default: stability bound)")
    d.add_argument("--filter", choices=("mean3", "gaussian"))
    d.add_argument("--sigma", type=float)
    d.add_argument("--normalize", action="store_true", help="divide input channels by their amplitude")
    d.add_argument("--config", help="JSON file with any of the above; flags take precedence")
    d.add_argument("--in", dest="input", required=True)
    d.add_argument("--out", required=True)
    d.set_defaults(func=cmd_denoise)

    m = sub.add_parser("metrics", help="MSE/IQI/Pythagorean metrics against a reference")
    m.add_argument("--result", required=True)
    m.add_argument("--reference", required=True)
    m.add_argument("--out", required=True)
    m.set_defaults(func=cmd_metrics)

    c = sub.add_parser("compare", help="tabulate several denoise runs")
    c.add_argument("--runs", nargs="+", required=True)
    c.add_argument("--out", required=True)
    c.set_defaults(func=cmd_compare)

    i = sub.add_parser("import", help="convert an 8/16-bit grayscale image to wrapped phase")
    i.add_argument("--image", required=True)
    i.add_argument("--out", required=True)
    i.set_defaults(func=cmd_import)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (OSError, io.FormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
