"""Deterministic rendering of plot specs to SVG 1.1 or ASCII text.

Both backends are plain string builders with fixed number formatting and
no timestamps or randomness, so rendering the same spec twice yields
byte-identical output.
"""

from __future__ import annotations

from .exceptions import ConfigError
from .interpret import PlotSpec

__all__ = ["render"]

# SVG canvas geometry.
_W, _H = 640, 480
_ML, _MR, _MT, _MB = 70.0, 20.0, 40.0, 55.0
_PW = _W - _ML - _MR
_PH = _H - _MT - _MB

# Text plot geometry: total width 80 columns.
_TEXT_WIDTH = 80
_TEXT_PLOT_W = 64
_TEXT_PLOT_H = 20


def render(spec: PlotSpec, format: str) -> bytes:
    """Render a plot spec to bytes in the requested format.

    ``format`` is ``"svg"`` (an SVG 1.1 document) or ``"text"`` (ASCII,
    80 columns for curves; heatmaps and tree diagrams become aligned
    tables).  Any other (kind, format) combination raises ConfigError.
    """
    if not isinstance(spec, PlotSpec):
        raise ConfigError(f"expected a PlotSpec, got {type(spec).__name__}")
    renderers = {
        ("curve", "svg"): _curve_svg,
        ("curve", "text"): _curve_text,
        ("heatmap", "svg"): _heatmap_svg,
        ("heatmap", "text"): _heatmap_text,
        ("tree_diagram", "svg"): _tree_svg,
        ("tree_diagram", "text"): _tree_text,
    }
    try:
        fn = renderers[(spec.kind, format)]
    except KeyError:
        raise ConfigError(f"unsupported plot kind/format pair: ({spec.kind!r}, {format!r})") from None
    return fn(spec).encode("utf-8")


def _num(v: float) -> str:
    """Fixed-format SVG coordinate."""
    return format(v, ".2f")


def _label(v: float) -> str:
    return format(v, ".4g")


def _escape(text: str) -> str:
    return (text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
            .replace('"', "&quot;"))


def _svg_open(title: str) -> list[str]:
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_W}" height="{_H}" viewBox="0 0 {_W} {_H}">',
        f'<rect x="0" y="0" width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_num(_W / 2)}" y="24" text-anchor="middle" '
        f'font-family="monospace" font-size="14">{_escape(title)}</text>',
    ]


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    return [lo + (hi - lo) * i / (n - 1) for i in range(n)]


def _axes_svg(x_lo, x_hi, y_lo, y_hi, x_label, y_label) -> tuple[list[str], callable, callable]:
    def to_px(v):
        if x_hi == x_lo:
            return _ML + _PW / 2
        return _ML + (v - x_lo) / (x_hi - x_lo) * _PW

    def to_py(v):
        if y_hi == y_lo:
            return _MT + _PH / 2
        return _MT + (y_hi - v) / (y_hi - y_lo) * _PH

    parts = [
        f'<line x1="{_num(_ML)}" y1="{_num(_MT + _PH)}" x2="{_num(_ML + _PW)}" '
        f'y2="{_num(_MT + _PH)}" stroke="black"/>',
        f'<line x1="{_num(_ML)}" y1="{_num(_MT)}" x2="{_num(_ML)}" '
        f'y2="{_num(_MT + _PH)}" stroke="black"/>',
    ]
    for tv in _ticks(x_lo, x_hi):
        px = to_px(tv)
        parts.append(f'<line x1="{_num(px)}" y1="{_num(_MT + _PH)}" x2="{_num(px)}" '
                     f'y2="{_num(_MT + _PH + 5)}" stroke="black"/>')
        parts.append(f'<text x="{_num(px)}" y="{_num(_MT + _PH + 18)}" text-anchor="middle" '
                     f'font-family="monospace" font-size="10">{_escape(_label(tv))}</text>')
    for tv in _ticks(y_lo, y_hi):
        py = to_py(tv)
        parts.append(f'<line x1="{_num(_ML - 5)}" y1="{_num(py)}" x2="{_num(_ML)}" '
                     f'y2="{_num(py)}" stroke="black"/>')
        parts.append(f'<text x="{_num(_ML - 8)}" y="{_num(py + 3)}" text-anchor="end" '
                     f'font-family="monospace" font-size="10">{_escape(_label(tv))}</text>')
    parts.append(f'<text x="{_num(_ML + _PW / 2)}" y="{_num(_H - 12)}" text-anchor="middle" '
                 f'font-family="monospace" font-size="12">{_escape(x_label)}</text>')
    parts.append(f'<text x="16" y="{_num(_MT + _PH / 2)}" text-anchor="middle" '
                 f'font-family="monospace" font-size="12" '
                 f'transform="rotate(-90 16 {_num(_MT + _PH / 2)})">{_escape(y_label)}</text>')
    return parts, to_px, to_py


def _curve_svg(spec: PlotSpec) -> str:
    xs, ys = spec.x, spec.y
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    parts = _svg_open(spec.title)
    axis_parts, to_px, to_py = _axes_svg(x_lo, x_hi, y_lo, y_hi, spec.x_label, spec.y_label)
    parts.extend(axis_parts)
    solid_lo, solid_hi = spec.solid_range if spec.solid_range else (x_lo, x_hi)

    # Consecutive point pairs are solid when both ends lie in the training
    # range; extrapolated stretches are dashed.
    segments: list[tuple[bool, list[tuple[float, float]]]] = []
    for i in range(len(xs) - 1):
        in_range = solid_lo <= xs[i] <= solid_hi and solid_lo <= xs[i + 1] <= solid_hi
        pt_a = (to_px(xs[i]), to_py(ys[i]))
        pt_b = (to_px(xs[i + 1]), to_py(ys[i + 1]))
        if segments and segments[-1][0] == in_range and segments[-1][1][-1] == pt_a:
            segments[-1][1].append(pt_b)
        else:
            segments.append((in_range, [pt_a, pt_b]))
    for in_range, pts in segments:
        coords = " ".join(f"{_num(px)},{_num(py)}" for px, py in pts)
        dash = "" if in_range else ' stroke-dasharray="6 4"'
        parts.append(f'<polyline points="{coords}" fill="none" stroke="#1f6fb4" '
                     f'stroke-width="1.5"{dash}/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _heatmap_svg(spec: PlotSpec) -> str:
    xs, ys, grid = spec.x, spec.y, spec.grid
    flat = [v for row in grid for v in row]
    v_lo, v_hi = min(flat), max(flat)
    parts = _svg_open(spec.title)
    axis_parts, to_px, to_py = _axes_svg(min(xs), max(xs), min(ys), max(ys),
                                         spec.x_label, spec.y_label)
    parts.extend(axis_parts)

    def color(v: float) -> str:
        t = 0.5 if v_hi == v_lo else (v - v_lo) / (v_hi - v_lo)
        # white at the low end to a deep blue at the high end
        r = round(255 + (33 - 255) * t)
        g = round(255 + (102 - 255) * t)
        b = round(255 + (172 - 255) * t)
        return f"rgb({r},{g},{b})"

    cell_w = _PW / len(xs)
    cell_h = _PH / len(ys)
    for r, row in enumerate(grid):
        for c, v in enumerate(row):
            px = _ML + c * cell_w
            py = _MT + _PH - (r + 1) * cell_h
            parts.append(f'<rect x="{_num(px)}" y="{_num(py)}" width="{_num(cell_w)}" '
                         f'height="{_num(cell_h)}" fill="{color(v)}"/>')
    parts.append(f'<text x="{_num(_ML + _PW)}" y="{_num(_MT - 6)}" text-anchor="end" '
                 f'font-family="monospace" font-size="10">'
                 f'{_escape(f"value range [{_label(v_lo)}, {_label(v_hi)}]")}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _tree_svg(spec: PlotSpec) -> str:
    parts = _svg_open(spec.title)
    placed = {n.id: n for n in spec.nodes}

    def to_px(x):
        return _ML + x * _PW

    def to_py(y):
        return _MT + 20 + y * (_PH - 40)

    for a, b in spec.edges:
        na, nb = placed[a], placed[b]
        parts.append(f'<line x1="{_num(to_px(na.x))}" y1="{_num(to_py(na.y))}" '
                     f'x2="{_num(to_px(nb.x))}" y2="{_num(to_py(nb.y))}" stroke="black"/>')
    for n in spec.nodes:
        px, py = to_px(n.x), to_py(n.y)
        w = max(60.0, 7.2 * len(n.label) + 12)
        fill = "#eef3fa" if n.is_leaf else "#ffffff"
        parts.append(f'<rect x="{_num(px - w / 2)}" y="{_num(py - 12)}" width="{_num(w)}" '
                     f'height="24" fill="{fill}" stroke="black" rx="4"/>')
        parts.append(f'<text x="{_num(px)}" y="{_num(py + 4)}" text-anchor="middle" '
                     f'font-family="monospace" font-size="11">{_escape(n.label)}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


# ---------------------------------------------------------------------------
# Text backends
# ---------------------------------------------------------------------------

def _curve_text(spec: PlotSpec) -> str:
    xs, ys = spec.x, spec.y
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    solid_lo, solid_hi = spec.solid_range if spec.solid_range else (x_lo, x_hi)
    w, h = _TEXT_PLOT_W, _TEXT_PLOT_H
    cells = [[" "] * w for _ in range(h)]

    def col_of(x):
        if x_hi == x_lo:
            return w // 2
        return min(w - 1, max(0, round((x - x_lo) / (x_hi - x_lo) * (w - 1))))

    def row_of(y):
        if y_hi == y_lo:
            return h // 2
        return min(h - 1, max(0, round((y_hi - y) / (y_hi - y_lo) * (h - 1))))

    for x, y in zip(xs, ys):
        mark = "*" if solid_lo <= x <= solid_hi else "o"
        r, c = row_of(y), col_of(x)
        if cells[r][c] == " " or mark == "*":
            cells[r][c] = mark

    gutter = 10
    lines = [spec.title[:_TEXT_WIDTH]]
    for r in range(h):
        if r == 0:
            ylab = _label(y_hi)
        elif r == h - 1:
            ylab = _label(y_lo)
        else:
            ylab = ""
        lines.append(f"{ylab:>{gutter - 1}} |" + "".join(cells[r]))
    lines.append(" " * (gutter - 1) + "+" + "-" * w)
    left = _label(x_lo)
    right = _label(x_hi)
    pad = w - len(left) - len(right)
    lines.append(" " * gutter + left + " " * max(1, pad) + right)
    if spec.x_label or spec.y_label:
        lines.append(f"x: {spec.x_label}   y: {spec.y_label}".rstrip())
    if solid_lo > x_lo or solid_hi < x_hi:
        lines.append("legend: * data range, o extrapolation")
    return "\n".join(line.rstrip() for line in lines) + "\n"


def _heatmap_text(spec: PlotSpec) -> str:
    cell_w = 11
    lines = [spec.title, f"rows: {spec.y_label}, columns: {spec.x_label}"]
    header = " " * cell_w + "".join(f"{_label(x):>{cell_w}}" for x in spec.x)
    lines.append(header)
    # Print rows top-down from the largest y so the table reads like a plot.
    for r in range(len(spec.y) - 1, -1, -1):
        row = f"{_label(spec.y[r]):>{cell_w}}"
        row += "".join(f"{_label(v):>{cell_w}}" for v in spec.grid[r])
        lines.append(row)
    return "\n".join(lines) + "\n"


def _tree_text(spec: PlotSpec) -> str:
    children: dict[int, list[int]] = {}
    has_parent = set()
    for a, b in spec.edges:
        children.setdefault(a, []).append(b)
        has_parent.add(b)
    depth_of: dict[int, int] = {}
    roots = [n.id for n in spec.nodes if n.id not in has_parent]

    def assign(node_id: int, depth: int):
        depth_of[node_id] = depth
        for ch in children.get(node_id, ()):
            assign(ch, depth + 1)

    for root in roots:
        assign(root, 0)
    ordered = sorted(spec.nodes, key=lambda n: (round(n.y, 9), n.x, n.id))
    rows = [("id", "depth", "kind", "children", "label")]
    for n in ordered:
        kids = ",".join(str(c) for c in children.get(n.id, ()))
        rows.append((str(n.id), str(depth_of.get(n.id, 0)),
                     "leaf" if n.is_leaf else "split", kids or "-", n.label))
    widths = [max(len(r[i]) for r in rows) for i in range(4)]
    lines = [spec.title]
    for r in rows:
        lines.append("  ".join([r[0].rjust(widths[0]), r[1].rjust(widths[1]),
                                r[2].ljust(widths[2]), r[3].ljust(widths[3]), r[4]]).rstrip())
    return "\n".join(lines) + "\n"
