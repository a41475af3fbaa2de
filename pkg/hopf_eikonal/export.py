"""
Writers for reports (JSON) and fiber geometry (CSV, OBJ). Files are written once, atomically.
"""
import json
import logging
import os
import tempfile

import numpy as np
import pandas as pd

from hopf_eikonal import EXPORT_FORMATS
from hopf_eikonal.utils import DomainError

logger = logging.getLogger(__name__)

FIBER_COLUMNS = ["fiber_id", "point_index", "x", "y", "z"]


def to_json(report):
    """Stable rendering: sorted keys, fixed indentation, full float precision"""
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def write_atomic(path, text):
    directory = os.path.dirname(os.path.abspath(path))
    handle, temporary = tempfile.mkstemp(dir=directory, prefix=".hopf-", suffix=".tmp")
    try:
        with os.fdopen(handle, "w", newline="") as stream:
            stream.write(text)
        os.replace(temporary, path)
    except BaseException:
        if os.path.exists(temporary):
            os.remove(temporary)
        raise
    logger.info("Wrote %s", path)


def fibers_frame(fibers):
    frames = [
        pd.DataFrame(
            {
                "fiber_id": fiber_id,
                "point_index": np.arange(len(fiber.points)),
                "x": fiber.points[:, 0],
                "y": fiber.points[:, 1],
                "z": fiber.points[:, 2],
            }
        )
        for fiber_id, fiber in enumerate(fibers)
    ]
    return pd.concat(frames, ignore_index=True)[FIBER_COLUMNS]


def fibers_to_csv(fibers):
    return fibers_frame(fibers).to_csv(index=False, float_format="%.17g")


def fibers_to_obj(fibers):
    """Wavefront OBJ: one v line per point, one closed l record per fiber (indices are 1-based)"""
    lines = [f"# {len(fibers)} fibers"]
    offset = 1
    for fiber in fibers:
        lines.extend("v {:.17g} {:.17g} {:.17g}".format(*point) for point in fiber.points)
        indices = list(range(offset, offset + len(fiber.points)))
        if fiber.closed:
            indices.append(offset)
        lines.append("l " + " ".join(str(index) for index in indices))
        offset += len(fiber.points)
    return "\n".join(lines) + "\n"


_WRITERS = {"csv": fibers_to_csv, "obj": fibers_to_obj}


def render_fibers(fibers, fmt):
    if fmt not in EXPORT_FORMATS:
        raise DomainError(f"Unknown export format {fmt!r}, expected one of {', '.join(EXPORT_FORMATS)}")
    return _WRITERS[fmt](fibers)


def read_fibers_csv(path):
    """Closed polylines from an exported CSV, as a list of (N, 3) arrays ordered by fiber_id"""
    try:
        frame = pd.read_csv(path)
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as error:
        raise DomainError(f"Cannot read fibers from {path}: {error}")
    missing = set(FIBER_COLUMNS) - set(frame.columns)
    if missing:
        raise DomainError(f"{path} lacks the columns {', '.join(sorted(missing))}")
    curves = []
    for _, group in frame.sort_values(["fiber_id", "point_index"]).groupby("fiber_id", sort=True):
        points = group[["x", "y", "z"]].to_numpy(dtype=float)
        if len(points) < 3:
            raise DomainError(f"{path}: a fiber needs at least three points")
        curves.append(points)
    return curves
