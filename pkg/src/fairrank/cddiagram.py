"""Critical-difference diagram: grouping of statistically indistinguishable
algorithms and deterministic standalone SVG rendering.

The diagram shows every algorithm as a marker on a rank axis (rank 1 =
best, on the left), a ruler indicating the critical difference, and one
bold horizontal bar per group of algorithms whose mean ranks all lie
within the critical difference of each other.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import IoFailure


@dataclass(frozen=True)
class CDLayout:
    """Everything needed to draw one critical-difference diagram."""
    critical_difference: float
    axis: tuple[float, float]
    algorithm_positions: dict[str, float]
    groups: tuple[tuple[str, ...], ...]


def cd_groups(mean_ranks, cd: float) -> list[tuple[str, ...]]:
    """Maximal groups of algorithms within one critical difference.

    Algorithms are sorted by mean rank (ties by name); every maximal
    contiguous interval whose extreme mean ranks differ by at most cd
    becomes a group. Groups that are subsets of other groups are dropped,
    so the result covers all algorithms without redundancy; an algorithm
    in no multi-member group appears as a singleton.
    """
    items = sorted(mean_ranks.items(), key=lambda kv: (kv[1], kv[0]))
    names = [name for name, _ in items]
    ranks = [rank for _, rank in items]
    groups: list[tuple[str, ...]] = []
    reach_so_far = -1
    for i in range(len(items)):
        j = i
        while j + 1 < len(items) and ranks[j + 1] - ranks[i] <= cd:
            j += 1
        if j > reach_so_far:  # not a subset of an earlier interval
            groups.append(tuple(names[i:j + 1]))
            reach_so_far = j
    return groups


def cd_layout(mean_ranks, cd: float) -> CDLayout:
    """Assemble a CDLayout from name -> mean rank and a critical difference."""
    positions = dict(sorted(mean_ranks.items(), key=lambda kv: (kv[1], kv[0])))
    k = len(positions)
    return CDLayout(cd, (1.0, float(max(k, 1))), positions, tuple(cd_groups(positions, cd)))


_PAD = 30
_LABEL_W = 170
_PX_PER_RANK = 90
_ROW_H = 16
_BAR_H = 8


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def cd_svg(layout: CDLayout) -> str:
    """Render the layout to a deterministic standalone SVG string.

    Group bars are the only `<line>` elements; axis, ticks, and the CD
    ruler are `<path>` elements and label leaders are `<polyline>`, so
    bars are countable in the output. Only groups with at least two
    members get a bar.
    """
    lo, hi = layout.axis
    k = len(layout.algorithm_positions)
    ordered = sorted(layout.algorithm_positions.items(), key=lambda kv: (kv[1], kv[0]))

    def x(rank: float) -> float:
        return _PAD + _LABEL_W + (rank - lo) * _PX_PER_RANK

    axis_y = 56.0
    width = 2 * (_PAD + _LABEL_W) + (hi - lo) * _PX_PER_RANK

    body: list[str] = []
    font = 'font-family="Helvetica, Arial, sans-serif"'

    # CD ruler above the axis, clamped to the axis span
    cd = layout.critical_difference
    ruler_y = 22.0
    ruler_end = x(min(lo + cd, hi)) if hi > lo else x(lo)
    body.append(f'<path d="M {_fmt(x(lo))} {_fmt(ruler_y - 4)} V {_fmt(ruler_y)} '
                f'H {_fmt(ruler_end)} V {_fmt(ruler_y - 4)}" '
                'fill="none" stroke="#444" stroke-width="1"/>')
    body.append(f'<text x="{_fmt((x(lo) + ruler_end) / 2)}" y="{_fmt(ruler_y - 8)}" '
                f'{font} font-size="11" text-anchor="middle" fill="#444">'
                f'CD = {cd:.3f}</text>')

    # axis with one tick per integer rank
    ticks = "".join(f" M {_fmt(x(r))} {_fmt(axis_y)} V {_fmt(axis_y - 6)}"
                    for r in range(int(lo), int(hi) + 1))
    body.append(f'<path d="M {_fmt(x(lo))} {_fmt(axis_y)} H {_fmt(x(hi))}{ticks}" '
                'fill="none" stroke="#000" stroke-width="1.2"/>')
    for r in range(int(lo), int(hi) + 1):
        body.append(f'<text x="{_fmt(x(r))}" y="{_fmt(axis_y - 10)}" {font} '
                    f'font-size="11" text-anchor="middle">{r}</text>')

    # group bars (only the connecting lines; singletons draw nothing),
    # staggered into depth rows when their spans overlap
    bars = [(layout.algorithm_positions[g[0]], layout.algorithm_positions[g[-1]])
            for g in layout.groups if len(g) >= 2]
    depth_ends: list[float] = []
    bar_y0 = axis_y + 10
    for b_lo, b_hi in bars:
        depth = next((d for d, end in enumerate(depth_ends) if b_lo > end), len(depth_ends))
        if depth == len(depth_ends):
            depth_ends.append(b_hi)
        else:
            depth_ends[depth] = b_hi
        y = bar_y0 + depth * _BAR_H
        body.append(f'<line x1="{_fmt(x(b_lo))}" y1="{_fmt(y)}" x2="{_fmt(x(b_hi))}" '
                    f'y2="{_fmt(y)}" stroke="#000" stroke-width="3.5" '
                    'stroke-linecap="round"/>')

    # markers and labels: best half listed down the left margin, the rest
    # down the right margin in reverse rank order (leaders never cross)
    label_y0 = bar_y0 + max(len(depth_ends), 1) * _BAR_H + 14
    n_left = (k + 1) // 2
    rows: list[tuple[str, float, int, str]] = []
    for i, (name, rank) in enumerate(ordered):
        body.append(f'<circle cx="{_fmt(x(rank))}" cy="{_fmt(axis_y)}" r="3" fill="#000"/>')
        if i < n_left:
            rows.append((name, rank, i, "left"))
        else:
            rows.append((name, rank, k - 1 - i, "right"))
    for name, rank, row, side in rows:
        y = label_y0 + row * _ROW_H
        if side == "left":
            end_x, anchor, text_x = _PAD + _LABEL_W - 8, "end", _PAD + _LABEL_W - 12
        else:
            end_x, anchor, text_x = width - _PAD - _LABEL_W + 8, "start", width - _PAD - _LABEL_W + 12
        body.append(f'<polyline points="{_fmt(x(rank))},{_fmt(axis_y)} '
                    f'{_fmt(x(rank))},{_fmt(y)} {_fmt(end_x)},{_fmt(y)}" '
                    'fill="none" stroke="#888" stroke-width="0.8"/>')
        body.append(f'<text x="{_fmt(text_x)}" y="{_fmt(y + 4)}" {font} font-size="12" '
                    f'text-anchor="{anchor}">{_escape(name)} ({rank:.2f})</text>')

    height = label_y0 + max(n_left, k - n_left, 1) * _ROW_H + _PAD / 2
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(width)}" '
            f'height="{_fmt(height)}" viewBox="0 0 {_fmt(width)} {_fmt(height)}">'
            '<rect width="100%" height="100%" fill="#fff"/>')
    return head + "".join(body) + "</svg>\n"


def _escape(text: str) -> str:
    return (text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
            .replace('"', "&quot;"))


def render_cd_svg(layout: CDLayout, out) -> None:
    """Write the SVG for a layout to a binary sink."""
    data = cd_svg(layout).encode("utf-8")
    try:
        out.write(data)
    except OSError as exc:
        raise IoFailure(f"writing SVG failed: {exc}") from exc
