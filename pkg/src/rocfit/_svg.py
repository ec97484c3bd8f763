"""Minimal static SVG renderer for ROC plots.

Just enough to emit axes, polylines, and band polygons with
deterministic formatting; no styling beyond per-element attributes.
"""

from __future__ import annotations

_MARGIN = 50.0
_SIZE = 440.0


def _fmt(x: float) -> str:
    return f"{x:.3f}"


class SvgCanvas:
    """Unit-square plot area mapped into a fixed-size SVG document."""

    def __init__(self, title: str = ""):
        self.title = title
        self.elements: list[str] = []

    def _x(self, u: float) -> float:
        return _MARGIN + u * _SIZE

    def _y(self, v: float) -> float:
        return _MARGIN + (1.0 - v) * _SIZE

    def polyline(self, xs, ys, color: str = "black", width: float = 1.5,
                 dashed: bool = False) -> None:
        pts = " ".join(f"{_fmt(self._x(x))},{_fmt(self._y(y))}" for x, y in zip(xs, ys))
        dash = ' stroke-dasharray="6,4"' if dashed else ""
        self.elements.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" '
            f'stroke-width="{width}"{dash}/>'
        )

    def polygon(self, xs, ys, color: str = "#9ecae1", opacity: float = 0.5) -> None:
        pts = " ".join(f"{_fmt(self._x(x))},{_fmt(self._y(y))}" for x, y in zip(xs, ys))
        self.elements.append(
            f'<polygon points="{pts}" fill="{color}" fill-opacity="{opacity}" stroke="none"/>'
        )

    def _axes(self) -> list[str]:
        parts = []
        x0, y0 = self._x(0.0), self._y(0.0)
        x1, y1 = self._x(1.0), self._y(1.0)
        parts.append(
            f'<rect x="{_fmt(x0)}" y="{_fmt(y1)}" width="{_fmt(x1 - x0)}" '
            f'height="{_fmt(y0 - y1)}" fill="white" stroke="black" stroke-width="1"/>'
        )
        for tick in (0.0, 0.25, 0.5, 0.75, 1.0):
            tx, ty = self._x(tick), self._y(tick)
            parts.append(
                f'<line x1="{_fmt(tx)}" y1="{_fmt(y0)}" x2="{_fmt(tx)}" '
                f'y2="{_fmt(y0 + 5)}" stroke="black"/>'
            )
            parts.append(
                f'<text x="{_fmt(tx)}" y="{_fmt(y0 + 18)}" font-size="11" '
                f'text-anchor="middle">{tick:g}</text>'
            )
            parts.append(
                f'<line x1="{_fmt(x0 - 5)}" y1="{_fmt(ty)}" x2="{_fmt(x0)}" '
                f'y2="{_fmt(ty)}" stroke="black"/>'
            )
            parts.append(
                f'<text x="{_fmt(x0 - 8)}" y="{_fmt(ty + 4)}" font-size="11" '
                f'text-anchor="end">{tick:g}</text>'
            )
        cx = (x0 + x1) / 2.0
        parts.append(
            f'<text x="{_fmt(cx)}" y="{_fmt(y0 + 36)}" font-size="13" '
            f'text-anchor="middle">false alarm rate</text>'
        )
        parts.append(
            f'<text x="16" y="{_fmt((y0 + y1) / 2.0)}" font-size="13" '
            f'text-anchor="middle" transform="rotate(-90 16 {_fmt((y0 + y1) / 2.0)})">'
            f"hit rate</text>"
        )
        if self.title:
            parts.append(
                f'<text x="{_fmt(cx)}" y="24" font-size="14" '
                f'text-anchor="middle">{self.title}</text>'
            )
        return parts

    def render(self) -> str:
        w = h = 2 * _MARGIN + _SIZE
        body = "\n".join(self._axes() + self.elements)
        return (
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{w:g}" height="{h:g}" '
            f'viewBox="0 0 {w:g} {h:g}">\n{body}\n</svg>\n'
        )
