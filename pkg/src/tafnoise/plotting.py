"""Deterministic standalone SVG figures (matplotlib, Agg backend)."""

from __future__ import annotations

import io

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .errors import InputError  # noqa: E402

STYLE = {
    "svg.hashsalt": "tafnoise",
    "svg.fonttype": "none",
    "font.size": 10,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.linewidth": 1.5,
    "lines.markersize": 4,
    "figure.figsize": (5.0, 3.6),
}


def _data_comment(series):
    lines = ["tafnoise plot data"]
    for s in series:
        lines.append(f"series {s.get('label') or ''}".rstrip())
        for x, y in zip(s["x"], s["y"]):
            lines.append(f"{float(x)!r},{float(y)!r}")
    # "--" is not allowed inside XML comments
    return "<!-- " + "\n".join(lines).replace("--", "- -") + " -->\n"


def render_svg(series, xlabel="", ylabel="", title="", logx=False, logy=False) -> bytes:
    """Render line/scatter series to SVG bytes.

    ``series`` is a list of dicts with keys ``x``, ``y`` and optionally
    ``label``, ``style`` ("line", "markers" or "both") and ``yerr``. Data
    markers are grouped under ``<g id="markers-N">`` so they can be told
    apart from tick marks. The raw data is embedded as an XML comment.
    """
    if not series or all(len(s["x"]) == 0 for s in series):
        raise InputError("nothing to plot")
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        for i, s in enumerate(series):
            x = np.asarray(s["x"], float)
            y = np.asarray(s["y"], float)
            if x.shape != y.shape:
                raise InputError("x and y must have equal length")
            style = s.get("style", "both")
            label = s.get("label")
            if style in ("line", "both"):
                (ln,) = ax.plot(x, y, "-", label=label if style == "line" else None, color=f"C{i}")
                ln.set_gid(f"line-{i}")
            if style in ("markers", "both"):
                if s.get("yerr") is not None:
                    eb = ax.errorbar(x, y, yerr=s["yerr"], fmt="none", ecolor=f"C{i}", elinewidth=0.8)
                    for coll in eb.lines[2]:
                        coll.set_gid(f"errorbars-{i}")
                (mk,) = ax.plot(x, y, "o", label=label, color=f"C{i}")
                mk.set_gid(f"markers-{i}")
        if logx:
            ax.set_xscale("log")
        if logy:
            ax.set_yscale("log")
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        if title:
            ax.set_title(title)
        if any(s.get("label") for s in series):
            ax.legend(frameon=False)
        fig.tight_layout()
        buf = io.BytesIO()
        fig.savefig(buf, format="svg", metadata={"Date": None, "Creator": "tafnoise"})
        plt.close(fig)
    svg = buf.getvalue().decode()
    head, sep, rest = svg.partition("?>\n")
    svg = head + sep + _data_comment(series) + rest if sep else _data_comment(series) + svg
    return svg.encode()


def count_markers(svg: bytes | str, index=0) -> int:
    """Number of data markers drawn for series ``index`` in an SVG from :func:`render_svg`."""
    text = svg.decode() if isinstance(svg, bytes) else svg
    start = text.find(f'<g id="markers-{index}">')
    if start < 0:
        return 0
    depth, pos, count = 0, start, 0
    while True:
        nxt_open = text.find("<g", pos + 1)
        nxt_close = text.find("</g>", pos + 1)
        if nxt_close < 0:
            break
        segment_end = nxt_close if nxt_open < 0 or nxt_close < nxt_open else nxt_open
        count += text.count("<use", pos, segment_end)
        if segment_end == nxt_close:
            if depth == 0:
                break
            depth -= 1
        else:
            depth += 1
        pos = segment_end
    return count
