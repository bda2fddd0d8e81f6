"""Critical-difference diagrams as standalone SVG files.

The layout is the usual one: a horizontal rank axis, one labelled stem
per treatment at its average rank, a bar showing the critical difference,
and thick connectors under the axis joining groups whose rank spread does
not exceed the CD.  Output is byte-deterministic for identical inputs.
"""

from __future__ import annotations

from pathlib import Path

__all__ = ["rank_cliques", "emit_cd_diagram"]


def rank_cliques(sorted_ranks: list[float], cd: float) -> list[tuple[int, int]]:
    """Maximal index intervals [i, j] (j > i) whose rank spread is <= cd.

    `sorted_ranks` must be ascending.  Nested intervals are dropped, which
    is the standard interval-merging construction of CD-diagram cliques.
    """
    n = len(sorted_ranks)
    intervals = []
    for i in range(n):
        j = i
        while j + 1 < n and sorted_ranks[j + 1] - sorted_ranks[i] <= cd:
            j += 1
        if j > i:
            intervals.append((i, j))
    maximal = []
    for (i, j) in intervals:
        if not any(oi <= i and j <= oj and (oi, oj) != (i, j) for oi, oj in intervals):
            maximal.append((i, j))
    return maximal


def emit_cd_diagram(avg_ranks: dict[str, float], cd: float, path) -> None:
    """Render average ranks and a critical difference to an SVG file.

    2 to 10 treatments are supported (the range of the CD constant table).
    """
    k = len(avg_ranks)
    if not 2 <= k <= 10:
        raise ValueError(f"CD diagrams support 2..10 treatments, got {k}")
    # Ascending rank = best first; ties ordered by name for determinism.
    items = sorted(avg_ranks.items(), key=lambda kv: (kv[1], kv[0]))
    names = [name for name, _ in items]
    ranks = [float(r) for _, r in items]

    left, right = 70.0, 530.0
    axis_y = 70.0
    span = right - left

    def x_of(rank: float) -> float:
        return left + (rank - 1.0) / (k - 1.0) * span

    cliques = rank_cliques(ranks, cd)
    clique_gap = 9.0
    clique_y0 = axis_y + 12.0
    label_top = clique_y0 + clique_gap * max(len(cliques), 1) + 8.0

    n_left = (k + 1) // 2
    label_step = 18.0
    height = label_top + label_step * max(n_left, k - n_left) + 20.0

    e = []
    e.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="600" height="{height:.0f}" '
        f'viewBox="0 0 600 {height:.0f}" font-family="Helvetica, Arial, sans-serif">'
    )
    e.append('<rect width="100%" height="100%" fill="white"/>')

    # CD bar above the axis.
    cd_x0, cd_x1 = left, left + cd / (k - 1.0) * span
    bar_y = axis_y - 34.0
    e.append(_line(cd_x0, bar_y, cd_x1, bar_y, 1.5))
    e.append(_line(cd_x0, bar_y - 4, cd_x0, bar_y + 4, 1.5))
    e.append(_line(cd_x1, bar_y - 4, cd_x1, bar_y + 4, 1.5))
    e.append(_text((cd_x0 + cd_x1) / 2.0, bar_y - 7.0, f"CD = {cd:.4f}", "middle", 12))

    # Axis with integer ticks.
    e.append(_line(left, axis_y, right, axis_y, 2.0))
    for tick in range(1, k + 1):
        tx = x_of(tick)
        e.append(_line(tx, axis_y - 5, tx, axis_y, 1.5))
        e.append(_text(tx, axis_y - 9.0, str(tick), "middle", 11))

    # Clique connectors under the axis.
    for level, (i, j) in enumerate(cliques):
        cy = clique_y0 + level * clique_gap
        e.append(_line(x_of(ranks[i]) - 3, cy, x_of(ranks[j]) + 3, cy, 4.0))

    # Stems and labels: best half on the left, the rest on the right.
    for pos, (name, rank) in enumerate(zip(names, ranks)):
        sx = x_of(rank)
        if pos < n_left:
            ly = label_top + pos * label_step
            lx = left - 8.0
            anchor = "end"
        else:
            ly = label_top + (k - 1 - pos) * label_step
            lx = right + 8.0
            anchor = "start"
        e.append(_line(sx, axis_y, sx, ly, 1.0))
        e.append(_line(sx, ly, lx + (4 if anchor == "end" else -4), ly, 1.0))
        e.append(_text(lx, ly + 4.0, f"{name} ({rank:.3f})", anchor, 12))

    e.append("</svg>")
    Path(path).write_bytes(("\n".join(e) + "\n").encode("utf-8"))


def _line(x1: float, y1: float, x2: float, y2: float, width: float) -> str:
    return (
        f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" '
        f'stroke="black" stroke-width="{width:g}"/>'
    )


def _text(x: float, y: float, content: str, anchor: str, size: int) -> str:
    return (
        f'<text x="{x:.2f}" y="{y:.2f}" text-anchor="{anchor}" '
        f'font-size="{size}">{content}</text>'
    )
