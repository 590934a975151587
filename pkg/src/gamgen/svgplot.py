"""Minimal SVG line charts for the Monte Carlo metrics, no plotting stack.

One SVG per true-parameter grid point, two panels: RB vs n and RMSE vs n,
with one polyline per estimated parameter. Output is plain text and
deterministic for identical inputs.
"""

from __future__ import annotations

import math
from typing import Sequence

from .errors import DataError

__all__ = ["group_cells", "write_figure_svgs"]

_COLORS = ("#1f6fb4", "#c0392b", "#2e8b57", "#8e44ad", "#b8860b", "#444444")

_WIDTH, _HEIGHT = 960, 380
_PANEL = dict(left=72, top=48, width=360, height=260, gap=96)


def group_cells(rows: Sequence[dict]):
    """Group metric rows (CSV order) into cells, then cells by theta point.

    A cell is one (theta, n) block of consecutive rows; blocks start whenever
    the (param_name, estimator) pair of the first row recurs. Cells belong to
    the same theta point when their (param_name, theta_true) signatures match.
    """
    if not rows:
        raise DataError("no metric rows to plot")
    first = (rows[0]["param_name"], rows[0]["estimator"])
    cells = []
    for row in rows:
        if (row["param_name"], row["estimator"]) == first:
            cells.append([])
        cells[-1].append(row)
    by_theta: dict = {}
    order = []
    for cell in cells:
        signature = tuple(sorted({(r["param_name"], r["theta_true"]) for r in cell}))
        if signature not in by_theta:
            by_theta[signature] = []
            order.append(signature)
        by_theta[signature].append(cell)
    return [(sig, by_theta[sig]) for sig in order]


def _corrected_kinds(cell) -> list:
    kinds = []
    for r in cell:
        k = r["estimator"]
        if not k.endswith("-raw") and k not in kinds:
            kinds.append(k)
    return kinds


def _nice_ticks(hi: float, count: int = 5):
    if not (hi > 0.0) or not math.isfinite(hi):
        hi = 1.0
    raw = hi / count
    step = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        if raw <= step * mult:
            step *= mult
            break
    ticks = []
    t = 0.0
    while t <= hi + step * 1e-9:
        ticks.append(round(t, 12))
        t += step
    return ticks


def _fmt(v: float) -> str:
    return format(v, ".6g")


def _panel_svg(out, x0, y0, metric, ns, series, colors):
    w, h = _PANEL["width"], _PANEL["height"]
    n_lo, n_hi = min(ns), max(ns)
    span = max(n_hi - n_lo, 1)
    top = max(
        (max(vals) for _, vals in series if any(math.isfinite(v) for v in vals)),
        default=1.0,
    )
    ticks = _nice_ticks(top * 1.05)
    y_hi = ticks[-1] if ticks[-1] > 0 else 1.0

    def px(n):
        return x0 + (n - n_lo) / span * w

    def py(v):
        return y0 + h - (v / y_hi) * h

    out.append(
        f'<rect x="{x0}" y="{y0}" width="{w}" height="{h}" fill="none" '
        'stroke="#333" stroke-width="1"/>'
    )
    for t in ticks:
        yy = _fmt(py(t))
        out.append(
            f'<line x1="{x0 - 4}" y1="{yy}" x2="{x0}" y2="{yy}" stroke="#333"/>'
        )
        out.append(
            f'<text x="{x0 - 8}" y="{yy}" font-size="10" text-anchor="end" '
            f'dominant-baseline="middle">{_fmt(t)}</text>'
        )
        if t > 0:
            out.append(
                f'<line x1="{x0}" y1="{yy}" x2="{x0 + w}" y2="{yy}" '
                'stroke="#ddd" stroke-width="0.6"/>'
            )
    for n in ns:
        xx = _fmt(px(n))
        yb = y0 + h
        out.append(f'<line x1="{xx}" y1="{yb}" x2="{xx}" y2="{yb + 4}" stroke="#333"/>')
        out.append(
            f'<text x="{xx}" y="{yb + 16}" font-size="10" text-anchor="middle">{n}</text>'
        )
    out.append(
        f'<text x="{x0 + w / 2}" y="{y0 + h + 34}" font-size="12" '
        'text-anchor="middle">n</text>'
    )
    out.append(
        f'<text x="{x0 - 46}" y="{y0 + h / 2}" font-size="12" text-anchor="middle" '
        f'transform="rotate(-90 {x0 - 46} {y0 + h / 2})">{metric}</text>'
    )
    for (label, vals), color in zip(series, colors):
        pts = " ".join(
            f"{_fmt(px(n))},{_fmt(py(v))}"
            for n, v in zip(ns, vals)
            if math.isfinite(v)
        )
        out.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.8"/>'
        )
        for n, v in zip(ns, vals):
            if math.isfinite(v):
                out.append(
                    f'<circle cx="{_fmt(px(n))}" cy="{_fmt(py(v))}" r="2.6" '
                    f'fill="{color}"/>'
                )
    ly = y0 + 12
    for (label, _), color in zip(series, colors):
        out.append(
            f'<line x1="{x0 + w - 110}" y1="{ly}" x2="{x0 + w - 86}" y2="{ly}" '
            f'stroke="{color}" stroke-width="1.8"/>'
        )
        out.append(
            f'<text x="{x0 + w - 80}" y="{ly + 4}" font-size="11">{label}</text>'
        )
        ly += 16


def _render_theta_svg(signature, cells, path):
    cells = sorted(cells, key=lambda c: c[0]["n"])
    ns = [c[0]["n"] for c in cells]
    kinds = _corrected_kinds(cells[0])
    params = []
    for r in cells[0]:
        if r["param_name"] not in params:
            params.append(r["param_name"])

    series_rb = []
    series_rmse = []
    for pname in params:
        for kind in kinds:
            rb_vals = []
            rmse_vals = []
            for cell in cells:
                match = [
                    r
                    for r in cell
                    if r["param_name"] == pname and r["estimator"] == kind
                ]
                rb_vals.append(match[0]["rb"] if match else float("nan"))
                rmse_vals.append(match[0]["rmse"] if match else float("nan"))
            label = pname if len(kinds) == 1 else f"{pname} ({kind})"
            series_rb.append((label, rb_vals))
            series_rmse.append((label, rmse_vals))

    title = ", ".join(f"{k}={_fmt(v)}" for k, v in signature)
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" '
        f'height="{_HEIGHT}" viewBox="0 0 {_WIDTH} {_HEIGHT}" '
        'font-family="sans-serif">',
        f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
        f'<text x="{_WIDTH / 2}" y="24" font-size="14" text-anchor="middle">'
        f"{title}</text>",
    ]
    x0 = _PANEL["left"]
    _panel_svg(out, x0, _PANEL["top"], "RB", ns, series_rb, _COLORS)
    x1 = x0 + _PANEL["width"] + _PANEL["gap"]
    _panel_svg(out, x1, _PANEL["top"], "RMSE", ns, series_rmse, _COLORS)
    out.append("</svg>")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(out) + "\n")


def write_figure_svgs(rows: Sequence[dict], out_prefix: str) -> list:
    """One SVG per theta grid point; returns the written paths."""
    paths = []
    for signature, cells in group_cells(rows):
        tag = "-".join(f"{k}{_fmt(v)}" for k, v in signature)
        path = f"{out_prefix}-{tag}.svg"
        _render_theta_svg(signature, cells, path)
        paths.append(path)
    return paths
