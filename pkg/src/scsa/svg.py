"""Bare-bones SVG rendering of the overlay and potential-well plots."""

from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

WIDTH, HEIGHT, PAD = 420, 300, 40
COLORS = ("#1f77b4", "#d62728", "#2ca02c")


def _scale(lo, hi, a, b):
    span = (hi - lo) or 1.0
    return lambda v: a + (np.asarray(v) - lo) * (b - a) / span


def _panel(ox, title, x, series, hlines=(), ylim=None):
    x = np.asarray(x, dtype=float)
    ys = [np.asarray(s, dtype=float) for _, s in series]
    values = [float(y.min()) for y in ys] + [float(y.max()) for y in ys] + list(hlines)
    lo, hi = ylim if ylim else (min(values), max(values))
    sx = _scale(x.min(), x.max(), ox + PAD, ox + WIDTH - 10)
    sy = _scale(lo, hi, HEIGHT - PAD, 20)
    out = [
        f'<text x="{ox + WIDTH / 2:.1f}" y="14" text-anchor="middle" '
        f'font-size="12">{escape(title)}</text>',
        f'<line x1="{ox + PAD}" y1="{HEIGHT - PAD}" x2="{ox + WIDTH - 10}" '
        f'y2="{HEIGHT - PAD}" stroke="black"/>',
        f'<line x1="{ox + PAD}" y1="20" x2="{ox + PAD}" y2="{HEIGHT - PAD}" stroke="black"/>',
        f'<text x="{ox + PAD}" y="{HEIGHT - PAD + 14}" font-size="10">{x.min():.3g}</text>',
        f'<text x="{ox + WIDTH - 10}" y="{HEIGHT - PAD + 14}" font-size="10" '
        f'text-anchor="end">{x.max():.3g}</text>',
        f'<text x="{ox + PAD - 4}" y="{HEIGHT - PAD}" font-size="10" '
        f'text-anchor="end">{lo:.3g}</text>',
        f'<text x="{ox + PAD - 4}" y="26" font-size="10" text-anchor="end">{hi:.3g}</text>',
    ]
    for i, ((label, _), y) in enumerate(zip(series, ys)):
        pts = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(sx(x), sy(y)))
        color = COLORS[i % len(COLORS)]
        out.append(f'<polyline fill="none" stroke="{color}" points="{pts}"/>')
        out.append(f'<text x="{ox + WIDTH - 14}" y="{34 + 12 * i}" font-size="10" '
                   f'text-anchor="end" fill="{color}">{escape(label)}</text>')
    for level in hlines:
        yy = float(sy(level))
        out.append(f'<line x1="{ox + PAD}" y1="{yy:.2f}" x2="{ox + WIDTH - 10}" '
                   f'y2="{yy:.2f}" stroke="{COLORS[1]}" stroke-dasharray="4,2"/>')
    return out


def render(x, y, y_chi, levels) -> str:
    """Two panels: y against y_chi, and the well -y with levels -kappa^2/chi."""
    body = _panel(0, "signal and reconstruction", x, [("y", y), ("y_chi", y_chi)])
    body += _panel(WIDTH, "well -y and levels -kappa^2/chi", x,
                   [("-y", -np.asarray(y, dtype=float))],
                   hlines=[-float(v) for v in levels])
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{2 * WIDTH}" '
        f'height="{HEIGHT}" viewBox="0 0 {2 * WIDTH} {HEIGHT}">\n'
        + "\n".join(body) + "\n</svg>\n"
    )
