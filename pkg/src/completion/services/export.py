"""Deterministic JSON/CSV output and static SVG plots of CTRs."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import os
import tempfile
from pathlib import Path
from typing import Any, Iterable, Sequence

import matplotlib

matplotlib.use("Agg")
from matplotlib import pyplot as plt  # noqa: E402  pylint: disable=wrong-import-position

from .core import _get_setting  # noqa: E402  pylint: disable=wrong-import-position

logger = logging.getLogger(__name__)


def output_digits() -> int:
    """Significant digits used for every emitted number."""
    return int(_get_setting("CTR_OUTPUT_DIGITS", 12))


def format_number(value: float, digits: int | None = None) -> float | None:
    """Round to ``digits`` significant digits; non-finite values become None."""
    value = float(value)
    if not math.isfinite(value):
        return None
    digits = output_digits() if digits is None else digits
    rounded = float(f"{value:.{digits}g}")
    return rounded + 0.0


def normalize(payload: Any, digits: int | None = None) -> Any:
    """Recursively round floats, keep mapping order, turn tuples into lists."""
    if isinstance(payload, bool) or payload is None or isinstance(payload, (int, str)):
        return payload
    if isinstance(payload, float):
        return format_number(payload, digits)
    if isinstance(payload, dict):
        return {str(key): normalize(value, digits) for key, value in payload.items()}
    if isinstance(payload, (list, tuple)):
        return [normalize(value, digits) for value in payload]
    if hasattr(payload, "as_dict"):
        return normalize(payload.as_dict(), digits)
    if hasattr(payload, "item"):
        return normalize(payload.item(), digits)
    raise TypeError(f"cannot serialize {type(payload).__name__}")


def dumps(payload: Any, digits: int | None = None) -> str:
    """JSON text with fixed field order and rounded numbers."""
    return json.dumps(normalize(payload, digits), indent=2, ensure_ascii=False) + "\n"


def write_atomic(path: str | Path, text: str) -> Path:
    """Write UTF-8 text through a temporary file in the target directory."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    handle, temp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(handle, "w", encoding="utf-8", newline="") as stream:
            stream.write(text)
        os.replace(temp_name, path)
    except BaseException:
        if os.path.exists(temp_name):
            os.unlink(temp_name)
        raise
    logger.info("wrote %s", path)
    return path


def write_json(path: str | Path, payload: Any, digits: int | None = None) -> Path:
    """Atomically write ``dumps(payload)``."""
    return write_atomic(path, dumps(payload, digits))


def boundary_csv(points: Iterable[Any], digits: int | None = None) -> str:
    """CSV text with header ``d1,d2`` and ``\\n`` line endings."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["d1", "d2"])
    for point in points:
        d1, d2 = point.as_tuple() if hasattr(point, "as_tuple") else point
        writer.writerow([repr(format_number(d1, digits)), repr(format_number(d2, digits))])
    return buffer.getvalue()


def write_boundary_csv(path: str | Path, points: Sequence[Any], digits: int | None = None) -> Path:
    """Atomically write the boundary CSV."""
    return write_atomic(path, boundary_csv(points, digits))


def _ray_end(origin, direction, limit):
    scale = max(limit[0] - origin[0], limit[1] - origin[1], 0.0)
    return (origin[0] + scale * direction[0], origin[1] + scale * direction[1])


def _subregion_polyline(sub, samples: int) -> list:
    pieces = sub.pieces()
    per_piece = max(samples // max(len(pieces), 1), 1)
    fractions = [(k + 1) / (per_piece + 1) for k in range(per_piece)]
    points = [sub.vertices[0]]
    for _, end, sampler in pieces:
        points.extend(sampler(fractions))
        points.append(end)
    return points


def plot_ctr_svg(
    ctr, path: str | Path, samples: int = 200, title: str = "", show_vertices: bool = False
) -> Path:
    """Draw each sub-region's boundary polyline and its two rays as a static SVG.

    Artists carry SVG ids (``sub1-boundary``, ``sub2-ray-1``, ...) so the file
    can be styled or inspected afterwards.
    """
    corners = ctr.corner_points()
    limit = (
        2.0 * max(point[0] for point in corners),
        2.0 * max(point[1] for point in corners),
    )
    figure, axes = plt.subplots(figsize=(6, 6))
    try:
        for sub, colour in ((ctr.sub1, "tab:blue"), (ctr.sub2, "tab:orange")):
            polyline = _subregion_polyline(sub, samples // 2)
            axes.plot([p[0] for p in polyline], [p[1] for p in polyline], color=colour,
                      lw=1.5, gid=f"sub{sub.side}-boundary")
            for index, ray in enumerate(sub.rays):
                end = _ray_end(ray.origin, ray.direction, limit)
                axes.plot([ray.origin[0], end[0]], [ray.origin[1], end[1]], color=colour,
                          lw=1.0, ls="--", gid=f"sub{sub.side}-ray-{index}")
        if show_vertices:
            axes.scatter([c[0] for c in corners], [c[1] for c in corners], color="black", s=12,
                         zorder=3, gid="ctr-vertices")
        axes.set_xlim(0.0, limit[0])
        axes.set_ylim(0.0, limit[1])
        axes.set_xlabel("d1")
        axes.set_ylabel("d2")
        axes.set_title(title or f"completion time region ({ctr.tag})")
        buffer = io.StringIO()
        figure.savefig(buffer, format="svg")
    finally:
        plt.close(figure)
    logger.debug("plotted %s region into %s", ctr.tag, path)
    return write_atomic(path, buffer.getvalue())
