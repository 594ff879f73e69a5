"""Deterministic CSV and SVG emission for distance curves."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .runner import CurvePoint

CSV_HEADER = "x,mean_distance,stderr,label"

SVG_WIDTH = 640
SVG_HEIGHT = 440
MARGIN_LEFT = 70
MARGIN_RIGHT = 150
MARGIN_TOP = 20
MARGIN_BOTTOM = 55

# Fixed palette keeps reruns byte-identical.
PALETTE = ("#1b6ca8", "#d1495b", "#2e8b57", "#8a5ab6", "#d2851e", "#3d3d3d")


@dataclass(frozen=True)
class Curve:
    label: str
    points: Sequence[CurvePoint]
    dotted: bool = False

    def __post_init__(self) -> None:
        if not self.label:
            raise ValueError("curve label must be non-empty")
        if not self.points:
            raise ValueError("curve must contain at least one point")


def _fmt(value: float) -> str:
    return f"{value:.12g}"


def emit_csv(points: Sequence[CurvePoint], path: str | Path) -> Path:
    """Write points as CSV: 12 significant digits, LF endings, UTF-8."""
    if not points:
        raise ValueError("refusing to write an empty CSV")
    path = Path(path)
    lines = [CSV_HEADER]
    for p in points:
        lines.append(f"{_fmt(p.x)},{_fmt(p.mean_distance)},{_fmt(p.stderr)},{p.label}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    return path


def read_csv(path: str | Path) -> list[CurvePoint]:
    """Parse a file written by emit_csv back into curve points."""
    text = Path(path).read_text(encoding="utf-8")
    lines = [ln for ln in text.split("\n") if ln]
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError("not an emitted curve CSV")
    points = []
    for ln in lines[1:]:
        x, mean, se, label = ln.split(",", 3)
        points.append(CurvePoint(float(x), float(mean), float(se), label))
    return points


def _scale(value: float, lo: float, hi: float, out_lo: float, out_hi: float) -> float:
    if hi == lo:
        return 0.5 * (out_lo + out_hi)
    return out_lo + (value - lo) * (out_hi - out_lo) / (hi - lo)


def _ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi == lo:
        return [lo]
    step = (hi - lo) / (count - 1)
    return [lo + i * step for i in range(count)]


def emit_svg(curves: Sequence[Curve], path: str | Path,
             x_title: str = "copies", y_title: str = "average trace distance") -> Path:
    """Write a standalone line chart; dotted curves render dashed strokes."""
    if not curves:
        raise ValueError("need at least one curve")
    path = Path(path)
    xs = [p.x for c in curves for p in c.points]
    ys = [p.mean_distance for c in curves for p in c.points]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = 0.0, max(ys) * 1.05 if max(ys) > 0 else 1.0
    px_lo, px_hi = MARGIN_LEFT, SVG_WIDTH - MARGIN_RIGHT
    py_lo, py_hi = SVG_HEIGHT - MARGIN_BOTTOM, MARGIN_TOP

    def sx(v: float) -> str:
        return f"{_scale(v, x_lo, x_hi, px_lo, px_hi):.2f}"

    def sy(v: float) -> str:
        return f"{_scale(v, y_lo, y_hi, py_lo, py_hi):.2f}"

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_WIDTH}" '
        f'height="{SVG_HEIGHT}" viewBox="0 0 {SVG_WIDTH} {SVG_HEIGHT}">',
        f'<rect width="{SVG_WIDTH}" height="{SVG_HEIGHT}" fill="white"/>',
        f'<line x1="{px_lo}" y1="{py_lo}" x2="{px_hi}" y2="{py_lo}" stroke="black"/>',
        f'<line x1="{px_lo}" y1="{py_lo}" x2="{px_lo}" y2="{py_hi}" stroke="black"/>',
    ]
    for t in _ticks(x_lo, x_hi):
        x = sx(t)
        parts.append(f'<line x1="{x}" y1="{py_lo}" x2="{x}" y2="{py_lo + 5}" stroke="black"/>')
        parts.append(f'<text x="{x}" y="{py_lo + 18}" font-size="11" '
                     f'text-anchor="middle">{t:g}</text>')
    for t in _ticks(y_lo, y_hi):
        y = sy(t)
        parts.append(f'<line x1="{px_lo - 5}" y1="{y}" x2="{px_lo}" y2="{y}" stroke="black"/>')
        parts.append(f'<text x="{px_lo - 8}" y="{y}" font-size="11" '
                     f'text-anchor="end" dominant-baseline="middle">{t:.3g}</text>')
    mid_x = (px_lo + px_hi) / 2
    mid_y = (py_lo + py_hi) / 2
    parts.append(f'<text x="{mid_x}" y="{SVG_HEIGHT - 12}" font-size="13" '
                 f'text-anchor="middle">{x_title}</text>')
    parts.append(f'<text x="16" y="{mid_y}" font-size="13" text-anchor="middle" '
                 f'transform="rotate(-90 16 {mid_y})">{y_title}</text>')
    for i, curve in enumerate(curves):
        color = PALETTE[i % len(PALETTE)]
        dash = ' stroke-dasharray="5 4"' if curve.dotted else ""
        coords = " ".join(f"{sx(p.x)},{sy(p.mean_distance)}" for p in curve.points)
        parts.append(f'<polyline points="{coords}" fill="none" stroke="{color}" '
                     f'stroke-width="1.6"{dash}/>')
        ly = MARGIN_TOP + 14 + 18 * i
        lx = px_hi + 12
        parts.append(f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 22}" y2="{ly - 4}" '
                     f'stroke="{color}" stroke-width="1.6"{dash}/>')
        parts.append(f'<text x="{lx + 28}" y="{ly}" font-size="12">{curve.label}</text>')
    parts.append("</svg>")
    path.write_text("\n".join(parts) + "\n", encoding="utf-8", newline="\n")
    return path
