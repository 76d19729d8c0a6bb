"""Figures: a byte-stable SVG of grid boxes and a matplotlib report figure."""

from __future__ import annotations

from fractions import Fraction

from .badic import GridBox, cover_set
from .points import NetPoints

SIZE = 512


def _num(value: Fraction) -> str:
    """Fixed-point rendering with at most 4 decimals, computed exactly."""
    scaled = round(value * 10000)
    whole, frac = divmod(scaled, 10000)
    if frac == 0:
        return str(whole)
    return f"{whole}.{frac:04d}".rstrip("0")


def _rect(x0: Fraction, y0: Fraction, w: Fraction, h: Fraction) -> str:
    # y0 is measured from the bottom of the unit square; SVG y grows downward.
    top = SIZE - (y0 + h) * SIZE
    return f'<rect x="{_num(x0 * SIZE)}" y="{_num(top)}" width="{_num(w * SIZE)}" height="{_num(h * SIZE)}"/>'


def render_svg(points: NetPoints, m: int, grid: bool = False, boxes: bool = False) -> str:
    """Unit square with one filled square of side ``b**-m`` per point.

    Only the first two coordinates are drawn.  ``grid`` adds b-adic lines at
    resolutions ``1..m`` (coarser levels darker); ``boxes`` shades every
    elementary interval of volume ``b**-m`` containing a point's grid box.
    """
    if points.dim < 2:
        raise ValueError("plotting needs at least two coordinates")
    b = points.base
    side = b**m
    corners = points.grid_corners(m)
    cell = Fraction(1, side)
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SIZE}" height="{SIZE}" '
        f'viewBox="0 0 {SIZE} {SIZE}">',
        f'<rect x="0" y="0" width="{SIZE}" height="{SIZE}" fill="white"/>',
    ]
    if boxes:
        out.append('<g fill="#404040" fill-opacity="0.12" stroke="none">')
        for corner in corners.points:
            box = GridBox(b, m, corner[:2])
            for e in cover_set(box):
                (dx, dy), (ax, ay) = e.shape, e.cells
                w, h = Fraction(1, b**dx), Fraction(1, b**dy)
                out.append(_rect(ax * w, ay * h, w, h))
        out.append("</g>")
    if grid:
        for level in range(m, 0, -1):
            shade = 0xC0 - (0xC0 * (m - level)) // max(m, 1)
            colour = f"#{shade:02x}{shade:02x}{shade:02x}"
            out.append(f'<g stroke="{colour}" stroke-width="1">')
            step = Fraction(SIZE, b**level)
            for k in range(1, b**level):
                if level > 1 and k % b == 0:
                    continue
                pos = _num(step * k)
                out.append(f'<line x1="{pos}" y1="0" x2="{pos}" y2="{SIZE}"/>')
                out.append(f'<line x1="0" y1="{pos}" x2="{SIZE}" y2="{pos}"/>')
            out.append("</g>")
    out.append('<g fill="black" stroke="none">')
    for corner in corners.points:
        out.append(_rect(corner[0] * cell, corner[1] * cell, cell, cell))
    out.append("</g>")
    out.append(f'<rect x="0" y="0" width="{SIZE}" height="{SIZE}" fill="none" stroke="black" stroke-width="2"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_report_figure(points: NetPoints, m: int, path: str, star=None, box=None, title: str | None = None):
    """Write a matplotlib figure of the points and the extremal anchored box."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    from matplotlib.patches import Rectangle

    den = points.base**points.exponent
    xs = [p[0] / den for p in points.points]
    ys = [p[1] / den for p in points.points]
    fig, ax = plt.subplots(figsize=(5, 5))
    try:
        side = points.base**m
        if side <= 64:
            for k in range(1, side):
                ax.axvline(k / side, color="0.9", lw=0.5, zorder=0)
                ax.axhline(k / side, color="0.9", lw=0.5, zorder=0)
        if box is not None:
            ax.add_patch(Rectangle((0, 0), float(box.x), float(box.y), fill=True, alpha=0.15, color="tab:red", lw=0))
        ax.scatter(xs, ys, s=max(2, 400 / max(len(xs), 1)), color="black", zorder=2)
        ax.set_xlim(0, 1)
        ax.set_ylim(0, 1)
        ax.set_aspect("equal")
        label = title or f"b={points.base}, m={m}, N={len(points)}"
        if star is not None:
            label += f"\nstar discrepancy = {float(star):.6g}"
        ax.set_title(label, fontsize=10)
        fig.savefig(path, dpi=120, bbox_inches="tight")
    finally:
        plt.close(fig)
