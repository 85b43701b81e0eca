"""Standalone SVG survival-curve charts (remaining agents against step)."""

from __future__ import annotations

from xml.sax.saxutils import escape

WIDTH, HEIGHT = 720, 440
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 64, 170, 40, 52
PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
           "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"]


def _nice_ticks(hi: float, count: int = 5) -> list[float]:
    if hi <= 0:
        return [0.0]
    raw = hi / count
    mag = 10 ** len(str(int(raw))) / 10 if raw >= 1 else 1
    step = next(m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw)
    ticks, v = [], 0.0
    while v <= hi + 1e-9:
        ticks.append(v)
        v += step
    return ticks


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def survival_svg(series: list[tuple[str, list[tuple[int, int]]]], title: str = "") -> str:
    """Render ``[(label, [(step, remaining), ...]), ...]`` as an SVG document."""
    x_max = max((pts[-1][0] for _, pts in series if pts), default=1) or 1
    y_max = max((pts[0][1] for _, pts in series if pts), default=1) or 1
    pw = WIDTH - MARGIN_L - MARGIN_R
    ph = HEIGHT - MARGIN_T - MARGIN_B

    def sx(v):
        return MARGIN_L + pw * v / x_max

    def sy(v):
        return MARGIN_T + ph * (1 - v / y_max)

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2 - MARGIN_R / 2}" y="24" text-anchor="middle" font-size="15">'
        f'{escape(title)}</text>',
    ]
    for t in _nice_ticks(x_max):
        out.append(f'<line x1="{_fmt(sx(t))}" y1="{MARGIN_T + ph}" x2="{_fmt(sx(t))}" '
                   f'y2="{MARGIN_T + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{_fmt(sx(t))}" y="{MARGIN_T + ph + 18}" '
                   f'text-anchor="middle">{t:g}</text>')
    for t in _nice_ticks(y_max):
        out.append(f'<line x1="{MARGIN_L - 5}" y1="{_fmt(sy(t))}" x2="{MARGIN_L}" '
                   f'y2="{_fmt(sy(t))}" stroke="black"/>')
        out.append(f'<text x="{MARGIN_L - 8}" y="{_fmt(sy(t) + 4)}" '
                   f'text-anchor="end">{t:g}</text>')
    out.append(f'<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{pw}" height="{ph}" '
               f'fill="none" stroke="black"/>')
    out.append(f'<text x="{MARGIN_L + pw / 2}" y="{HEIGHT - 12}" text-anchor="middle">'
               f'time step</text>')
    out.append(f'<text x="16" y="{MARGIN_T + ph / 2}" text-anchor="middle" '
               f'transform="rotate(-90 16 {MARGIN_T + ph / 2})">agents remaining</text>')

    for k, (label, pts) in enumerate(series):
        color = PALETTE[k % len(PALETTE)]
        coords = " ".join(f"{_fmt(sx(s))},{_fmt(sy(r))}" for s, r in pts)
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
                   f'points="{coords}"/>')
        ly = MARGIN_T + 10 + 18 * k
        lx = WIDTH - MARGIN_R + 14
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 20}" y2="{ly}" stroke="{color}" '
                   f'stroke-width="2"/>')
        out.append(f'<text x="{lx + 26}" y="{ly + 4}">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
