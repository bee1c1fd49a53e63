"""
Oriented-box geometry: corners and separating-axis overlap test.
"""
import math
from typing import Sequence

import numpy as np

# Ego footprint (typical sedan)
EGO_LENGTH = 4.6
EGO_WIDTH = 1.85


def box_corners(x: float, y: float, heading: float, length: float, width: float) -> np.ndarray:
    """Corners of an oriented rectangle, counter-clockwise, shape (4, 2)."""
    c, s = math.cos(heading), math.sin(heading)
    hl, hw = length / 2.0, width / 2.0
    local = np.array([[hl, hw], [-hl, hw], [-hl, -hw], [hl, -hw]])
    rot = np.array([[c, -s], [s, c]])
    return local @ rot.T + np.array([x, y])


def _axes(corners: np.ndarray) -> np.ndarray:
    edges = np.roll(corners, -1, axis=0) - corners
    normals = np.stack([edges[:, 1], -edges[:, 0]], axis=1)
    return normals[:2] / np.linalg.norm(normals[:2], axis=1, keepdims=True)


def polygons_overlap(corners_a: np.ndarray, corners_b: np.ndarray) -> bool:
    """Separating-axis test for two rectangles. Touching counts as overlap."""
    for axis in np.concatenate([_axes(corners_a), _axes(corners_b)]):
        proj_a = corners_a @ axis
        proj_b = corners_b @ axis
        if proj_a.min() > proj_b.max() or proj_b.min() > proj_a.max():
            return False
    return True


def separation_margin(corners_a: np.ndarray, corners_b: np.ndarray) -> float:
    """Signed SAT margin: > 0 separation gap on the best axis, < 0 minimum penetration."""
    best_gap = -math.inf
    for axis in np.concatenate([_axes(corners_a), _axes(corners_b)]):
        proj_a = corners_a @ axis
        proj_b = corners_b @ axis
        best_gap = max(best_gap, proj_a.min() - proj_b.max(), proj_b.min() - proj_a.max())
    return float(best_gap)


def boxes_overlap(a: Sequence[float], b: Sequence[float]) -> bool:
    """Overlap of two (x, y, heading, length, width) boxes."""
    return polygons_overlap(box_corners(*a), box_corners(*b))
