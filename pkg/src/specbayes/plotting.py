"""Minimal deterministic SVG line charts of spectra.

Output depends only on the input values (fixed palette, fixed number
formatting), so identical inputs give identical bytes.
"""

from __future__ import annotations

from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

from .core import Spectrum
from .errors import SpectralError

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf")
WIDTH, HEIGHT = 640, 400
MARGIN = dict(left=60, right=20, top=20, bottom=45)


def _num(x: float) -> str:
    return f"{x:.2f}".rstrip("0").rstrip(".")


def _ticks(lo: float, hi: float, count: int = 5) -> np.ndarray:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / count
    mag = 10 ** np.floor(np.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=10 * mag)
    start = np.ceil(lo / step - 1e-9) * step
    return np.arange(start, hi + step * 1e-9, step)


def svg_line_chart(spectra: Sequence[Spectrum], labels: Sequence[str] | None = None,
                   title: str = "", y_label: str = "relative value") -> str:
    spectra = list(spectra)
    if not spectra:
        raise SpectralError("nothing to plot")
    labels = list(labels) if labels is not None else [s.label or f"series {n + 1}" for n, s in enumerate(spectra)]
    if len(labels) != len(spectra):
        raise SpectralError(f"{len(labels)} labels for {len(spectra)} spectra")

    x_lo = min(s.grid.start_nm for s in spectra)
    x_hi = max(s.grid.stop_nm for s in spectra)
    y_lo = min(0.0, min(float(s.values.min()) for s in spectra))
    y_hi = max(float(s.values.max()) for s in spectra)
    if y_hi <= y_lo:
        y_hi = y_lo + 1.0
    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def sx(w):
        return MARGIN["left"] + (w - x_lo) / (x_hi - x_lo) * pw

    def sy(v):
        return MARGIN["top"] + (1 - (v - y_lo) / (y_hi - y_lo)) * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    if title:
        out.append(f'<title>{escape(title)}</title>')
    x0, y0 = MARGIN["left"], MARGIN["top"] + ph
    out.append(f'<g stroke="black" stroke-width="1">'
               f'<line x1="{x0}" y1="{y0}" x2="{x0 + pw}" y2="{y0}"/>'
               f'<line x1="{x0}" y1="{MARGIN["top"]}" x2="{x0}" y2="{y0}"/></g>')
    for t in _ticks(x_lo, x_hi, 6):
        x = _num(sx(t))
        out.append(f'<line x1="{x}" y1="{y0}" x2="{x}" y2="{y0 + 5}" stroke="black"/>'
                   f'<text x="{x}" y="{y0 + 18}" text-anchor="middle">{_num(t)}</text>')
    for t in _ticks(y_lo, y_hi, 5):
        y = _num(sy(t))
        out.append(f'<line x1="{x0 - 5}" y1="{y}" x2="{x0}" y2="{y}" stroke="black"/>'
                   f'<text x="{x0 - 8}" y="{y}" text-anchor="end" dominant-baseline="middle">{_num(t)}</text>')
    out.append(f'<text x="{x0 + pw / 2:.0f}" y="{HEIGHT - 8}" text-anchor="middle">wavelength (nm)</text>')
    out.append(f'<text x="14" y="{MARGIN["top"] + ph / 2:.0f}" text-anchor="middle" '
               f'transform="rotate(-90 14 {MARGIN["top"] + ph / 2:.0f})">{escape(y_label)}</text>')

    for n, s in enumerate(spectra):
        colour = PALETTE[n % len(PALETTE)]
        points = " ".join(f"{_num(sx(w))},{_num(sy(v))}" for w, v in zip(s.wavelengths, s.values))
        out.append(f'<polyline fill="none" stroke="{colour}" stroke-width="2" points="{points}"/>')

    if len(spectra) > 1:
        lx, ly = x0 + pw - 150, MARGIN["top"] + 10
        out.append('<g class="legend">')
        for n, label in enumerate(labels):
            colour = PALETTE[n % len(PALETTE)]
            y = ly + 18 * n
            out.append(f'<line x1="{lx}" y1="{y}" x2="{lx + 20}" y2="{y}" stroke="{colour}" stroke-width="2"/>'
                       f'<text x="{lx + 26}" y="{y}" dominant-baseline="middle">{escape(label)}</text>')
        out.append('</g>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def merged_csv(spectra: Sequence[Spectrum], labels: Sequence[str]) -> str:
    """Wide CSV on the union of wavelengths; blank where a series has no sample."""
    columns = []
    for s in spectra:
        columns.append({float(w): float(v) for w, v in zip(s.wavelengths, s.values)})
    wavelengths = sorted(set().union(*columns))
    rows = [",".join(["wavelength_nm"] + [lab.replace(",", " ") for lab in labels])]
    for w in wavelengths:
        rows.append(",".join([repr(w)] + [repr(c[w]) if w in c else "" for c in columns]))
    return "\n".join(rows) + "\n"
