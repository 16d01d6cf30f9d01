"""Command line interface.

Exit status: 0 on success, 1 on runtime failure, 2 on usage or
configuration errors.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
import time
from pathlib import Path

from . import __version__
from .baselines import downscale_bicubic, downscale_box, downscale_lanczos
from .bench import BenchConfig, BenchError, load_config, run_bench, write_markdown, write_report
from .cooc import compute_profile, export_heatmap
from .downscale import LsidParams, default_threads, downscale_image
from .guide import compute_guide, make_scale_spec
from .metrics import psnr, ssim
from .raster import ImageFormatError, load_image, merge_channels, save_image, split_channels

EXIT_OK, EXIT_RUNTIME, EXIT_USAGE = 0, 1, 2
METHODS = ("lsid", "box", "bicubic", "lanczos")
CHANNELS = {"r": 0, "g": 1, "b": 2}


class UsageError(Exception):
    pass


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected an integer >= 1, got {text}")
    return v


def _factor(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text}") from None
    if not math.isfinite(v) or v <= 1:
        raise argparse.ArgumentTypeError(f"factor must be > 1, got {text}")
    return v


def _factor_list(text: str) -> list[float]:
    return [_factor(t) for t in text.split(",") if t.strip()]


def _fmt(v: float, digits: int = 6) -> str:
    return "inf" if math.isinf(v) else f"{v:.{digits}f}"


def cmd_downscale(args) -> int:
    img = load_image(args.input)
    try:
        spec = make_scale_spec(img.width, img.height, args.factor)
        params = LsidParams(factor=args.factor, alpha=args.alpha, k=args.k)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    t0 = time.perf_counter()
    if args.method == "lsid":
        out = downscale_image(img, params, threads=args.threads)
    else:
        fn = {"box": downscale_box, "bicubic": downscale_bicubic, "lanczos": downscale_lanczos}[args.method]
        out = fn(img, args.factor, threads=args.threads)
    elapsed = (time.perf_counter() - t0) * 1000.0
    save_image(out, args.output)
    if args.dump_guide:
        save_image(merge_channels([compute_guide(p, spec) for p in split_channels(img)]), args.dump_guide)
    print(f"{args.method}: {img.width}x{img.height} -> {out.width}x{out.height} in {elapsed:.1f} ms", file=sys.stderr)
    return EXIT_OK


def cmd_cooc(args) -> int:
    img = load_image(args.input)
    if args.channel is None:
        idx = 0
    elif args.channel == "gray":
        if img.channels != 1:
            raise UsageError("--channel gray needs a grayscale input; pick r, g or b")
        idx = 0
    else:
        if img.channels != 3:
            raise UsageError(f"--channel {args.channel} needs an RGB input")
        idx = CHANNELS[args.channel]
    plane = split_channels(img)[idx]
    try:
        profile = compute_profile(plane, args.k, threads=args.threads)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    png, csv_path = export_heatmap(profile, args.heatmap, args.csv)
    if args.figure:
        from .plotting import render_profile

        render_profile(profile, args.figure, title=Path(args.input).name)
    print(f"heatmap {png}, counts {csv_path}, max count {profile.max_count}", file=sys.stderr)
    return EXIT_OK


def cmd_compare(args) -> int:
    ref = load_image(args.ref)
    test = load_image(args.test)
    if ref.data.shape != test.data.shape:
        raise UsageError(
            f"dimension mismatch: {ref.width}x{ref.height}x{ref.channels} vs {test.width}x{test.height}x{test.channels}"
        )
    p = psnr(ref, test)
    try:
        s = ssim(ref, test)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if args.ssim_percent:
        s *= 100.0
    print(f"psnr_db={_fmt(p)} ssim={_fmt(s)}")
    return EXIT_OK


def _bench_config(args) -> BenchConfig:
    values = load_config(args.config) if args.config else {}
    for key in ("hr_dir", "gt_dir", "gt_template", "factors", "methods", "alpha", "k", "threads", "out", "markdown"):
        v = getattr(args, key)
        if v is not None:
            values[key] = v
    if "hr_dir" not in values:
        raise BenchError("--hr-dir is required (flag or config key hr_dir)")
    if "factors" not in values:
        raise BenchError("--factors is required (flag or config key factors)")
    if "out" not in values:
        raise BenchError("--out is required (flag or config key out)")
    values.setdefault("threads", default_threads())
    return BenchConfig(**values)


def cmd_bench(args) -> int:
    cfg = _bench_config(args)
    report = run_bench(cfg)
    write_report(report, cfg.out)
    if cfg.markdown:
        write_markdown(report, cfg.markdown)
    errors = sum(1 for r in report.rows if r.error)
    print(f"{len(report.rows)} rows written to {cfg.out} ({errors} with errors)", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lsid", description="Co-occurrence guided image downscaling.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("downscale", help="downscale one image")
    p.add_argument("--input", required=True, type=Path)
    p.add_argument("--output", required=True, type=Path)
    p.add_argument("--factor", required=True, type=_factor, help="downscaling factor > 1, may be fractional")
    p.add_argument("--method", choices=METHODS, default="lsid")
    p.add_argument("--alpha", type=float, default=5.0, help="range kernel strength (default 5)")
    p.add_argument("--k", type=_positive_int, default=3, help="co-occurrence neighborhood radius (default 3)")
    p.add_argument("--dump-guide", type=Path, help="also write the uniform-average guide image")
    p.add_argument("--threads", type=_positive_int, default=default_threads())
    p.set_defaults(func=cmd_downscale)

    p = sub.add_parser("cooc", help="export the co-occurrence profile of one channel")
    p.add_argument("--input", required=True, type=Path)
    p.add_argument("--k", type=_positive_int, default=3)
    p.add_argument("--heatmap", required=True, type=Path, help="log-scaled 256x256 PNG")
    p.add_argument("--csv", type=Path, help="raw counts CSV (default: heatmap path with .csv)")
    p.add_argument("--channel", choices=("r", "g", "b", "gray"))
    p.add_argument("--figure", type=Path, help="annotated matplotlib rendering")
    p.add_argument("--threads", type=_positive_int, default=default_threads())
    p.set_defaults(func=cmd_cooc)

    p = sub.add_parser("compare", help="PSNR and SSIM of a test image against a reference")
    p.add_argument("--ref", required=True, type=Path)
    p.add_argument("--test", required=True, type=Path)
    p.add_argument("--ssim-percent", action="store_true", help="print SSIM scaled by 100")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser(
        "bench",
        help="batch benchmark over a directory",
        description=(
            "Config file keys (key = value, one per line): hr_dir, gt_dir, gt_template, "
            "factors, methods, alpha, k, threads, out, markdown. Flags override the file."
        ),
    )
    p.add_argument("--config", type=Path, help="key = value config file")
    p.add_argument("--hr-dir", dest="hr_dir", type=Path)
    p.add_argument("--gt-dir", dest="gt_dir", help="ground-truth directory; may contain {factor}")
    p.add_argument("--gt-template", dest="gt_template", help="GT filename stem template, default {stem}")
    p.add_argument("--factors", type=_factor_list, help="comma separated, e.g. 2,4,8.75")
    p.add_argument("--methods", type=lambda s: [m.strip() for m in s.split(",") if m.strip()],
                   help="comma separated from lsid,box,bicubic,lanczos,external:<dir>")
    p.add_argument("--alpha", type=float)
    p.add_argument("--k", type=_positive_int)
    p.add_argument("--threads", type=_positive_int)
    p.add_argument("--out", type=Path, help="CSV report path")
    p.add_argument("--markdown", type=Path, help="optional per-method mean summary")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, BenchError) as exc:
        print(f"lsid {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ImageFormatError, ValueError) as exc:
        print(f"lsid {args.command}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
