"""Standalone SVG charts (heatmap, line chart, bar chart) with no plotting dependency.

Output is a pure function of the inputs, so reruns give identical files.
"""

from __future__ import annotations

from typing import Mapping, Sequence

PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"]
WIDTH, HEIGHT = 720, 480
LEFT, RIGHT, TOP, BOTTOM = 70, 170, 50, 60


def _esc(text) -> str:
    return (str(text).replace("&", "&amp;").replace("<", "&lt;")
            .replace(">", "&gt;").replace('"', "&quot;"))


def _open(title: str) -> list[str]:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>',
        f'<text x="{WIDTH / 2:.1f}" y="28" text-anchor="middle" font-size="16">{_esc(title)}</text>',
    ]


def _axes(lines: list[str], x_label: str, y_label: str) -> None:
    x0, x1, y0, y1 = LEFT, WIDTH - RIGHT, TOP, HEIGHT - BOTTOM
    lines.append(f'<line x1="{x0}" y1="{y1}" x2="{x1}" y2="{y1}" stroke="#000"/>')
    lines.append(f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="#000"/>')
    lines.append(f'<text x="{(x0 + x1) / 2:.1f}" y="{HEIGHT - 15}" text-anchor="middle" font-size="13">{_esc(x_label)}</text>')
    lines.append(f'<text x="18" y="{(y0 + y1) / 2:.1f}" text-anchor="middle" font-size="13" '
                 f'transform="rotate(-90 18 {(y0 + y1) / 2:.1f})">{_esc(y_label)}</text>')


def _gray(v: float) -> str:
    # 0 -> black, 1 -> white, matching the usual phase-transition rendering
    g = int(round(255 * min(max(v, 0.0), 1.0)))
    return f"#{g:02x}{g:02x}{g:02x}"


def heatmap_svg(values: Sequence[Sequence[float]], row_labels: Sequence, col_labels: Sequence,
                title: str, row_name: str = "m", col_name: str = "K") -> str:
    """Grid of gray cells; rows drawn bottom-up so larger row values sit higher."""
    rows, cols = len(row_labels), len(col_labels)
    pw, ph = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM
    cw, ch = pw / cols, ph / rows
    lines = _open(title)
    for i in range(rows):
        y = HEIGHT - BOTTOM - (i + 1) * ch
        for j in range(cols):
            v = float(values[i][j])
            lines.append(f'<rect x="{LEFT + j * cw:.2f}" y="{y:.2f}" width="{cw:.2f}" height="{ch:.2f}" '
                         f'fill="{_gray(v)}"><title>{row_name}={row_labels[i]} {col_name}={col_labels[j]}: {v:.3f}</title></rect>')
    step_r = max(1, rows // 10)
    step_c = max(1, cols // 10)
    for i in range(0, rows, step_r):
        y = HEIGHT - BOTTOM - (i + 0.5) * ch
        lines.append(f'<text x="{LEFT - 6}" y="{y + 4:.2f}" text-anchor="end" font-size="11">{_esc(row_labels[i])}</text>')
    for j in range(0, cols, step_c):
        x = LEFT + (j + 0.5) * cw
        lines.append(f'<text x="{x:.2f}" y="{HEIGHT - BOTTOM + 16}" text-anchor="middle" font-size="11">{_esc(col_labels[j])}</text>')
    _axes(lines, col_name, row_name)
    for k in range(11):
        y = TOP + ph * (1 - k / 10) - ph / 11
        lines.append(f'<rect x="{WIDTH - RIGHT + 30}" y="{y:.2f}" width="20" height="{ph / 11:.2f}" fill="{_gray(k / 10)}" stroke="#999"/>')
        if k % 5 == 0:
            lines.append(f'<text x="{WIDTH - RIGHT + 56}" y="{y + ph / 22 + 4:.2f}" font-size="11">{k / 10:.1f}</text>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def line_chart_svg(x: Sequence[float], series: Mapping[str, Sequence[float]], title: str,
                   x_label: str, y_label: str = "recovery probability",
                   y_range: tuple[float, float] = (0.0, 1.0)) -> str:
    pw, ph = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM
    lo, hi = min(x), max(x)
    span = (hi - lo) or 1.0
    ylo, yhi = y_range

    def px(v):
        return LEFT + (v - lo) / span * pw

    def py(v):
        return HEIGHT - BOTTOM - (v - ylo) / (yhi - ylo) * ph

    lines = _open(title)
    for k in range(6):
        v = ylo + (yhi - ylo) * k / 5
        lines.append(f'<line x1="{LEFT}" y1="{py(v):.2f}" x2="{WIDTH - RIGHT}" y2="{py(v):.2f}" stroke="#ddd"/>')
        lines.append(f'<text x="{LEFT - 6}" y="{py(v) + 4:.2f}" text-anchor="end" font-size="11">{v:.1f}</text>')
    for v in x:
        lines.append(f'<text x="{px(v):.2f}" y="{HEIGHT - BOTTOM + 16}" text-anchor="middle" font-size="11">{_esc(v)}</text>')
    _axes(lines, x_label, y_label)
    for idx, (name, ys) in enumerate(series.items()):
        color = PALETTE[idx % len(PALETTE)]
        pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(x, ys))
        lines.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="2"/>')
        for a, b in zip(x, ys):
            lines.append(f'<circle cx="{px(a):.2f}" cy="{py(b):.2f}" r="3" fill="{color}"/>')
        ly = TOP + 18 * idx + 10
        lines.append(f'<line x1="{WIDTH - RIGHT + 15}" y1="{ly}" x2="{WIDTH - RIGHT + 40}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        lines.append(f'<text x="{WIDTH - RIGHT + 46}" y="{ly + 4}" font-size="12">{_esc(name)}</text>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def bar_chart_svg(counts: Mapping[int, int], title: str, x_label: str = "iterations",
                  y_label: str = "trials") -> str:
    """One bar per observed bin, in bin order."""
    bins = sorted(counts)
    pw, ph = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM
    top = max(counts.values()) if counts else 1
    bw = pw / max(1, len(bins))
    lines = _open(title)
    _axes(lines, x_label, y_label)
    for k in range(6):
        v = top * k / 5
        y = HEIGHT - BOTTOM - ph * k / 5
        lines.append(f'<text x="{LEFT - 6}" y="{y + 4:.2f}" text-anchor="end" font-size="11">{v:.0f}</text>')
    for i, b in enumerate(bins):
        h = ph * counts[b] / top
        x = LEFT + i * bw
        lines.append(f'<rect x="{x + bw * 0.1:.2f}" y="{HEIGHT - BOTTOM - h:.2f}" width="{bw * 0.8:.2f}" '
                     f'height="{h:.2f}" fill="{PALETTE[0]}"><title>{b}: {counts[b]}</title></rect>')
        lines.append(f'<text x="{x + bw / 2:.2f}" y="{HEIGHT - BOTTOM + 16}" text-anchor="middle" font-size="11">{b}</text>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
