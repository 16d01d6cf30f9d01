"""Batch evaluation harness.

Every high-resolution image in ``hr_dir`` is downscaled by every requested
method and factor.  When a ground-truth low-resolution file exists for the
image, PSNR and SSIM are computed against it.  Failures become rows with an
``error`` field; nothing attempted is dropped.
"""

from __future__ import annotations

import configparser
import csv
import logging
import math
import statistics
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

from .baselines import downscale_bicubic, downscale_box, downscale_lanczos
from .downscale import LsidParams, downscale_image
from .metrics import psnr, ssim
from .raster import Raster, load_image

__all__ = [
    "BUILTIN_METHODS",
    "CSV_HEADER",
    "BenchConfig",
    "BenchError",
    "BenchReport",
    "BenchRow",
    "format_factor",
    "load_config",
    "run_bench",
    "write_markdown",
    "write_report",
]

log = logging.getLogger(__name__)

CSV_HEADER = ["image", "method", "factor", "psnr_db", "ssim", "time_ms", "out_w", "out_h", "error"]
BUILTIN_METHODS = ("lsid", "box", "bicubic", "lanczos")
IMAGE_SUFFIXES = {".png", ".ppm", ".pgm", ".pnm"}
EXTERNAL_PREFIX = "external:"


class BenchError(ValueError):
    """Harness-level configuration problem (as opposed to a per-row failure)."""


def format_factor(factor: float) -> str:
    return f"{factor:g}"


@dataclass
class BenchConfig:
    """Inputs for :func:`run_bench`.

    ``gt_dir`` and external method directories may contain ``{factor}``,
    and ``gt_template`` may use ``{stem}`` and ``{factor}``; DIV2K's
    ``X4/0001x4.png`` layout is ``gt_dir="LR/X{factor}"``,
    ``gt_template="{stem}x{factor}"``.
    """

    hr_dir: Path
    factors: list[float]
    methods: list[str] = field(default_factory=lambda: ["lsid", "bicubic"])
    gt_dir: Optional[str] = None
    gt_template: str = "{stem}"
    alpha: float = 5.0
    k: int = 3
    threads: int = 1
    out: Optional[Path] = None
    markdown: Optional[Path] = None

    def validate(self) -> None:
        hr = Path(self.hr_dir)
        if not hr.is_dir():
            raise BenchError(f"hr_dir {hr} is not a directory")
        if not _list_images(hr):
            raise BenchError(f"hr_dir {hr} contains no PNG/PPM images")
        if not self.factors:
            raise BenchError("no factors given")
        for f in self.factors:
            if not f > 1:
                raise BenchError(f"factor {f} must be > 1")
        if not self.methods:
            raise BenchError("no methods given")
        for m in self.methods:
            if m not in BUILTIN_METHODS and not (m.startswith(EXTERNAL_PREFIX) and len(m) > len(EXTERNAL_PREFIX)):
                raise BenchError(f"unknown method {m!r}")
        try:
            LsidParams(factor=2.0, alpha=self.alpha, k=self.k)
        except ValueError as exc:
            raise BenchError(str(exc)) from exc


@dataclass
class BenchRow:
    image: str
    method: str
    factor: float
    psnr_db: Optional[float] = None
    ssim: Optional[float] = None
    time_ms: Optional[float] = None
    out_w: Optional[int] = None
    out_h: Optional[int] = None
    error: str = ""

    def sort_key(self):
        return (self.image, self.method, self.factor)

    def as_csv(self) -> list[str]:
        def num(v, fmt):
            if v is None:
                return ""
            if math.isinf(v):
                return "inf" if v > 0 else "-inf"
            return format(v, fmt)

        return [
            self.image,
            self.method,
            format_factor(self.factor),
            num(self.psnr_db, ".6f"),
            num(self.ssim, ".6f"),
            num(self.time_ms, ".3f"),
            "" if self.out_w is None else str(self.out_w),
            "" if self.out_h is None else str(self.out_h),
            self.error,
        ]


@dataclass
class BenchReport:
    rows: list[BenchRow] = field(default_factory=list)

    def summary(self) -> list[dict]:
        """Mean PSNR/SSIM per (method, factor) over rows without errors."""
        groups: dict[tuple[str, float], list[BenchRow]] = {}
        for r in self.rows:
            groups.setdefault((r.method, r.factor), []).append(r)
        out = []
        for (method, factor), rows in sorted(groups.items()):
            ok = [r for r in rows if not r.error]
            scored = [r for r in ok if r.psnr_db is not None]
            out.append(
                {
                    "method": method,
                    "factor": factor,
                    "n": len(scored),
                    "psnr_db": statistics.fmean(r.psnr_db for r in scored) if scored else None,
                    "ssim": statistics.fmean(r.ssim for r in scored) if scored else None,
                    "time_ms": statistics.fmean(r.time_ms for r in ok if r.time_ms is not None)
                    if any(r.time_ms is not None for r in ok)
                    else None,
                }
            )
        return out


def _list_images(d: Path) -> list[Path]:
    return sorted(p for p in d.iterdir() if p.is_file() and p.suffix.lower() in IMAGE_SUFFIXES)


def _find(directory: Path, stem: str) -> Optional[Path]:
    if not directory.is_dir():
        return None
    for suffix in (".png", ".ppm", ".pgm", ".pnm"):
        cand = directory / f"{stem}{suffix}"
        if cand.is_file():
            return cand
    return None


def _method_fn(method: str, cfg: BenchConfig) -> Callable[[Raster, float], Raster]:
    if method == "lsid":
        return lambda img, f: downscale_image(img, LsidParams(factor=f, alpha=cfg.alpha, k=cfg.k), threads=cfg.threads)
    table = {"box": downscale_box, "bicubic": downscale_bicubic, "lanczos": downscale_lanczos}
    fn = table[method]
    return lambda img, f: fn(img, f, threads=cfg.threads)


def _score(row: BenchRow, result: Raster, gt: Optional[Raster]) -> None:
    row.out_w, row.out_h = result.width, result.height
    if gt is None:
        return
    if gt.data.shape != result.data.shape:
        row.error = (
            f"dimension mismatch: output {result.width}x{result.height}x{result.channels}"
            f" vs gt {gt.width}x{gt.height}x{gt.channels}"
        )
        return
    row.psnr_db = psnr(result, gt)
    row.ssim = ssim(result, gt)


def run_bench(cfg: BenchConfig) -> BenchReport:
    cfg.validate()
    hr_paths = _list_images(Path(cfg.hr_dir))
    rows: list[BenchRow] = []
    for hr_path in hr_paths:
        stem = hr_path.stem
        try:
            hr = load_image(hr_path)
        except Exception as exc:  # noqa: BLE001 - recorded as data
            for method in cfg.methods:
                for f in cfg.factors:
                    rows.append(BenchRow(stem, method, f, error=f"load failed: {exc}"))
            continue
        for f in cfg.factors:
            gt = None
            if cfg.gt_dir:
                fac = format_factor(f)
                gt_path = _find(Path(cfg.gt_dir.format(factor=fac)), cfg.gt_template.format(stem=stem, factor=fac))
                if gt_path is None:
                    log.warning("no ground truth for %s at factor %s; metrics left empty", stem, fac)
                else:
                    try:
                        gt = load_image(gt_path)
                    except Exception as exc:  # noqa: BLE001
                        for method in cfg.methods:
                            rows.append(BenchRow(stem, method, f, error=f"gt load failed: {exc}"))
                        continue
            for method in cfg.methods:
                rows.append(_run_one(hr, stem, method, f, gt, cfg))
    rows.sort(key=BenchRow.sort_key)
    return BenchReport(rows)


def _run_one(hr: Raster, stem: str, method: str, factor: float, gt, cfg: BenchConfig) -> BenchRow:
    row = BenchRow(stem, method, factor)
    try:
        if method.startswith(EXTERNAL_PREFIX):
            ext_dir = Path(method[len(EXTERNAL_PREFIX):].format(factor=format_factor(factor)))
            path = _find(ext_dir, stem)
            if path is None:
                row.error = f"no external output for {stem} in {ext_dir}"
                return row
            result = load_image(path)
        else:
            fn = _method_fn(method, cfg)
            t0 = time.perf_counter()
            result = fn(hr, factor)
            row.time_ms = (time.perf_counter() - t0) * 1000.0
        _score(row, result, gt)
    except Exception as exc:  # noqa: BLE001 - per-row failures are data
        row.error = str(exc) or type(exc).__name__
    return row


def write_report(report: BenchReport, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_HEADER)
        for r in report.rows:
            w.writerow(r.as_csv())


def write_markdown(report: BenchReport, path) -> None:
    def cell(v, fmt):
        if v is None:
            return "-"
        return "inf" if math.isinf(v) else format(v, fmt)

    lines = [
        "| method | factor | n | mean PSNR (dB) | mean SSIM | mean time (ms) |",
        "|---|---|---|---|---|---|",
    ]
    for s in report.summary():
        lines.append(
            f"| {s['method']} | {format_factor(s['factor'])} | {s['n']} | {cell(s['psnr_db'], '.2f')}"
            f" | {cell(s['ssim'], '.4f')} | {cell(s['time_ms'], '.1f')} |"
        )
    Path(path).write_text("\n".join(lines) + "\n")


def _split_list(value: str) -> list[str]:
    return [v.strip() for v in value.split(",") if v.strip()]


def load_config(path) -> dict:
    """Read a ``key = value`` bench config file into keyword arguments.

    Recognised keys: ``hr_dir``, ``gt_dir``, ``gt_template``, ``factors``,
    ``methods``, ``alpha``, ``k``, ``threads``, ``out``, ``markdown``.
    Lists are comma separated; lines starting with ``#`` are comments.
    """
    text = Path(path).read_text()
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string("[bench]\n" + text)
    except configparser.Error as exc:
        raise BenchError(f"cannot parse config {path}: {exc}") from exc
    sec = parser["bench"]
    known = {"hr_dir", "gt_dir", "gt_template", "factors", "methods", "alpha", "k", "threads", "out", "markdown"}
    unknown = set(sec) - known
    if unknown:
        raise BenchError(f"unknown config keys: {', '.join(sorted(unknown))}")
    out: dict = {}
    try:
        for key, raw in sec.items():
            if key == "factors":
                out[key] = [float(v) for v in _split_list(raw)]
            elif key == "methods":
                out[key] = _split_list(raw)
            elif key == "alpha":
                out[key] = float(raw)
            elif key in ("k", "threads"):
                out[key] = int(raw)
            else:
                out[key] = raw
    except ValueError as exc:
        raise BenchError(f"bad value in config {path}: {exc}") from exc
    return out
