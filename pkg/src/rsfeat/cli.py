"""Command-line entry point: ``rsfeat {extract,bench,kernel-dump,gen-test-image}``."""

from __future__ import annotations

import argparse
import itertools
import os
import sys

from .backends import STRATEGIES, WorkPartition
from .bench import OutputMismatchError, bench, format_table, write_report
from .kernels import branch_sigma, make_log_kernel
from .pipeline import ConfigError, PipelineConfig, config_from_mapping, load_config, run, validate
from .raster import RasterFormatError, read_image, write_image, write_mask
from .synthetic import KINDS, make_test_image


def _workers(text: str):
    return text if text == "auto" else int(text)


def _add_input_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", required=True, help="input raster")
    p.add_argument("--format", choices=("pgm", "raw"), default="pgm")
    p.add_argument("--width", type=int, help="raw input width")
    p.add_argument("--height", type=int, help="raw input height")
    p.add_argument("--bit-depth", type=int, choices=(8, 16), help="raw input sample depth")
    p.add_argument("--big-endian", action="store_true", help="raw 16-bit samples are big-endian")
    p.add_argument("--mode", choices=("urban", "water"))
    p.add_argument("--config", help="key = value config file")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override a config field (repeatable)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rsfeat", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="run the urban or water pipeline and write masks")
    _add_input_args(p)
    p.add_argument("--backend", choices=STRATEGIES)
    p.add_argument("--workers", type=_workers)
    p.add_argument("--chunk", type=int)
    p.add_argument("--out-prefix", required=True)

    p = sub.add_parser("bench", help="time execution strategies and report speedups")
    _add_input_args(p)
    p.add_argument("--baseline", choices=STRATEGIES, default="sequential")
    p.add_argument("--backend", nargs="+", choices=STRATEGIES,
                   default=["row_parallel", "pixel_parallel"], help="candidate strategies")
    p.add_argument("--workers", nargs="+", type=_workers, default=["auto"])
    p.add_argument("--chunk", nargs="+", type=int, default=[512])
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--no-warmup", action="store_true")
    p.add_argument("--report", help="write reports here (.json or .csv)")
    p.add_argument("--report-format", choices=("json", "csv"))

    p = sub.add_parser("kernel-dump", help="print a LoG stencil as a text grid")
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--size", type=int, default=5)
    p.add_argument("--variance", action="store_true", help="treat --sigma as a variance")
    p.add_argument("--no-dc-correct", action="store_true")

    p = sub.add_parser("gen-test-image", help="write a synthetic fixture")
    p.add_argument("--kind", choices=KINDS, required=True)
    p.add_argument("--size", type=int, default=64)
    p.add_argument("--bit-depth", type=int, choices=(8, 16), default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True)
    p.add_argument("--format", choices=("pgm", "raw"), default="pgm")
    return parser


def _config(args) -> PipelineConfig:
    cfg = load_config(args.config) if args.config else PipelineConfig()
    overrides = {}
    for item in args.set:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError([f"--set expects KEY=VALUE, got {item!r}"])
        overrides[key] = value
    if args.mode:
        overrides["mode"] = args.mode
    if args.command == "extract":
        for key in ("backend", "workers", "chunk"):
            if getattr(args, key) is not None:
                overrides[key] = getattr(args, key)
    cfg = config_from_mapping(overrides, cfg)
    problems = validate(cfg)
    if problems:
        raise ConfigError(problems)
    return cfg


def _read(args):
    return read_image(args.input, args.format, width=args.width, height=args.height,
                      bit_depth=args.bit_depth, big_endian=args.big_endian)


def _extract(args) -> int:
    cfg = _config(args)
    image = _read(args)
    result = run(image, cfg)
    prefix = args.out_prefix
    write_mask(result.feature_mask, f"{prefix}features.pgm")
    write_mask(result.edge_mask, f"{prefix}edges.pgm")
    write_mask(result.combined_mask, f"{prefix}combined.pgm")
    if result.denoised is not None:
        write_image(result.denoised, f"{prefix}denoised.pgm")
    print(f"{cfg.mode}: {image.width}x{image.height}, features={result.feature_mask.count()} "
          f"edges={result.edge_mask.count()} combined={result.combined_mask.count()} "
          f"pixels, {result.total_ms:.1f} ms ({cfg.partition.label})")
    return 0


def _candidates(args) -> list[WorkPartition]:
    seen, out = set(), []
    for strategy, workers, chunk in itertools.product(args.backend, args.workers, args.chunk):
        if strategy != "pixel_parallel":
            chunk = 512
        part = WorkPartition(strategy, workers, chunk)
        key = (strategy, part.n_workers, part.chunk)
        if key not in seen:
            seen.add(key)
            out.append(part)
    return out


def _bench(args) -> int:
    cfg = _config(args)
    image = _read(args)
    if args.repeats < 1:
        raise ConfigError(["--repeats must be >= 1"])
    image_id = os.path.splitext(os.path.basename(args.input))[0]
    try:
        reports = bench(image, cfg, args.baseline, _candidates(args), args.repeats,
                        image_id=image_id, warmup=not args.no_warmup)
    except OutputMismatchError as exc:
        print(f"rsfeat: output mismatch: {exc}", file=sys.stderr)
        return 3
    print(format_table(reports))
    if args.report:
        fmt = args.report_format or ("csv" if args.report.endswith(".csv") else "json")
        write_report(reports, fmt, args.report)
    return 0


def _kernel_dump(args) -> int:
    sigma = branch_sigma(args.sigma, args.variance)
    print(make_log_kernel(sigma, args.size, not args.no_dc_correct).format_grid())
    return 0


def _gen(args) -> int:
    image = make_test_image(args.kind, args.size, args.bit_depth, args.seed)
    write_image(image, args.output, args.format)
    return 0


COMMANDS = {"extract": _extract, "bench": _bench, "kernel-dump": _kernel_dump,
            "gen-test-image": _gen}


def cli_main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, RasterFormatError, ValueError) as exc:
        print(f"rsfeat: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"rsfeat: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_main())
