"""Deterministic CSV, SVG and JSON writers for sampled paths."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import numpy as np

from .paths import PathSample

DIGITS = 12


def fmt(x: float) -> str:
    # + 0.0 turns -0.0 into 0.0 so equal values always print the same
    return format(float(x) + 0.0, f".{DIGITS}g")


def path_csv(sample: PathSample) -> str:
    buf = io.StringIO()
    buf.write("t,re,im\n")
    for t, z in zip(sample.t, sample.values):
        buf.write(f"{fmt(t)},{fmt(z.real)},{fmt(z.imag)}\n")
    return buf.getvalue()


def read_path_csv(text: str) -> PathSample:
    rows = list(csv.DictReader(io.StringIO(text)))
    values = np.array([float(r["re"]) + 1j * float(r["im"]) for r in rows])
    return PathSample(len(rows) - 1, values)


def path_svg(sample: PathSample) -> str:
    """A single polyline in the complex plane (imaginary axis pointing up)."""
    x = sample.values.real
    y = -sample.values.imag
    x0, x1 = float(x.min()), float(x.max())
    y0, y1 = float(y.min()), float(y.max())
    wx = (x1 - x0) or 1.0
    wy = (y1 - y0) or 1.0
    x0, wx = x0 - 0.05 * wx, 1.1 * wx
    y0, wy = y0 - 0.05 * wy, 1.1 * wy
    pts = " ".join(f"{fmt(a)},{fmt(b)}" for a, b in zip(x, y))
    return (
        '<svg xmlns="http://www.w3.org/2000/svg" '
        f'viewBox="{fmt(x0)} {fmt(y0)} {fmt(wx)} {fmt(wy)}">\n'
        f'<polyline fill="none" stroke="black" stroke-width="{fmt(0.005 * wx)}" '
        f'points="{pts}"/>\n</svg>\n'
    )


def write_text(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return path


def write_path(outdir: Path, stem: str, sample: PathSample) -> tuple[Path, Path]:
    return (
        write_text(outdir / f"{stem}.csv", path_csv(sample)),
        write_text(outdir / f"{stem}.svg", path_svg(sample)),
    )


def write_json(path: Path, data) -> Path:
    return write_text(path, json.dumps(data, indent=2, sort_keys=True) + "\n")
