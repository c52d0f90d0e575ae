"""
Heatmaps of tables and factorizations as binary PPM (P6) or SVG.

Cells are cell_px squares coloured black, green, red and white for 1, 1/2, 1/4 and 0; any
other value v is gray level round(255 (1 - v)), halves rounded up. Measurement blocks are
separated by one-pixel blue rows.
"""

import math
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from errors import StructuralError
from models import DataTable, OntFactorization

RGB = Tuple[int, int, int]

SEPARATOR: RGB = (0, 0, 255)
EXACT_COLORS = {
    Fraction(1): (0, 0, 0),
    Fraction(1, 2): (0, 160, 0),
    Fraction(1, 4): (200, 0, 0),
    Fraction(0): (255, 255, 255),
}
FORMATS = ("ppm", "svg")


def cell_color(value: Fraction) -> RGB:
    value = Fraction(value)
    if value in EXACT_COLORS:
        return EXACT_COLORS[value]
    level = math.floor(255 * (1 - value) + Fraction(1, 2))
    level = min(255, max(0, level))
    return (level, level, level)


# A band is a grid of values plus the number of rows per measurement block (None: no separators).
Band = Tuple[Sequence[Sequence[Fraction]], Optional[int]]


def _bands(source: Union[DataTable, OntFactorization], block_size: Optional[int]) -> List[Band]:
    if isinstance(source, DataTable):
        return [(source.entries, source.d)]
    if block_size is not None and (block_size < 1 or len(source.M) % block_size):
        raise StructuralError(f"block size {block_size} does not divide M's {len(source.M)} rows")
    p_transposed = tuple(zip(*source.P)) if source.P else ()
    return [(source.M, block_size), (p_transposed, None)]


def _layout(bands: Sequence[Band], cell_px: int) -> Tuple[int, int, List[Tuple[str, int, object]]]:
    """Width, height and a top-to-bottom list of ("cells", y, row) / ("rule", y, None) strips."""
    width = max((len(grid[0]) if grid else 0) for grid, _ in bands) * cell_px
    strips = []
    y = 0
    for b, (grid, block) in enumerate(bands):
        if b:
            strips.append(("rule", y, None))
            y += 1
        for r, row in enumerate(grid):
            if block and r and r % block == 0:
                strips.append(("rule", y, None))
                y += 1
            strips.append(("cells", y, row))
            y += cell_px
    return width, y, strips


def _ppm(width: int, height: int, strips, cell_px: int) -> bytes:
    image = np.full((height, width, 3), 255, dtype=np.uint8)
    for kind, y, row in strips:
        if kind == "rule":
            image[y, :, :] = SEPARATOR
            continue
        for c, value in enumerate(row):
            image[y:y + cell_px, c * cell_px:(c + 1) * cell_px, :] = cell_color(value)
    return f"P6\n{width} {height}\n255\n".encode("ascii") + image.tobytes()


def _svg(width: int, height: int, strips, cell_px: int) -> bytes:
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" shape-rendering="crispEdges">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="rgb(255,255,255)"/>',
    ]
    for kind, y, row in strips:
        if kind == "rule":
            r, g, b = SEPARATOR
            parts.append(f'<rect x="0" y="{y}" width="{width}" height="1" fill="rgb({r},{g},{b})"/>')
            continue
        for c, value in enumerate(row):
            r, g, b = cell_color(value)
            if (r, g, b) == (255, 255, 255):
                continue
            parts.append(
                f'<rect x="{c * cell_px}" y="{y}" width="{cell_px}" height="{cell_px}" fill="rgb({r},{g},{b})"/>'
            )
    parts.append("</svg>")
    return ("\n".join(parts) + "\n").encode("utf-8")


def render_heatmap(
    source: Union[DataTable, OntFactorization],
    cell_px: int = 8,
    fmt: str = "ppm",
    block_size: Optional[int] = None,
) -> bytes:
    """Table: s*cell_px wide, d*m*cell_px + (m - 1) high. Factorization: M above a blue rule
    above P transposed, with M's block separators drawn when block_size is given."""
    if cell_px < 1:
        raise ValueError("cell_px must be at least 1")
    if fmt not in FORMATS:
        raise ValueError(f"format must be one of {FORMATS}, got {fmt!r}")
    width, height, strips = _layout(_bands(source, block_size), cell_px)
    if fmt == "svg":
        return _svg(width, height, strips, cell_px)
    return _ppm(width, height, strips, cell_px)
