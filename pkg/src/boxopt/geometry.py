"""Axis-aligned bounding-box arithmetic: IoU, coordinate transform, greedy NMS.

Boxes are continuous-valued ``(u1, v1, u2, v2)`` corner tuples in pixel
coordinates.  The search code proposes fractional boxes, so nothing here
snaps to an integer grid; rasterization is the scorer's concern.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned box with top-left ``(u1, v1)`` and bottom-right ``(u2, v2)``.

    Width and height must be strictly positive; degenerate boxes are rejected
    at construction so that ``log(w)`` and ``log(h)`` are always defined
    downstream.
    """

    u1: float
    v1: float
    u2: float
    v2: float

    def __post_init__(self) -> None:
        for name in ("u1", "v1", "u2", "v2"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not all(math.isfinite(c) for c in self.coords):
            raise ValueError(f"non-finite box coordinates: {self.coords}")
        if not (self.u2 > self.u1 and self.v2 > self.v1):
            raise ValueError(
                f"degenerate box (needs u2 > u1 and v2 > v1): {self.coords}"
            )

    @property
    def coords(self) -> tuple[float, float, float, float]:
        return (self.u1, self.v1, self.u2, self.v2)

    @property
    def width(self) -> float:
        return self.u2 - self.u1

    @property
    def height(self) -> float:
        return self.v2 - self.v1

    @property
    def center_u(self) -> float:
        return 0.5 * (self.u1 + self.u2)

    @property
    def center_v(self) -> float:
        return 0.5 * (self.v1 + self.v2)

    @property
    def area(self) -> float:
        return self.width * self.height

    def scaled(self, s: float) -> "BoundingBox":
        """Return the box with every coordinate multiplied by ``s > 0``."""
        if s <= 0:
            raise ValueError(f"scale factor must be positive, got {s}")
        return BoundingBox(s * self.u1, s * self.v1, s * self.u2, s * self.v2)

    def as_array(self) -> np.ndarray:
        return np.array(self.coords, dtype=float)

    @staticmethod
    def from_array(arr: Sequence[float]) -> "BoundingBox":
        u1, v1, u2, v2 = (float(c) for c in arr)
        return BoundingBox(u1, v1, u2, v2)


def boxes_to_array(boxes: Iterable[BoundingBox]) -> np.ndarray:
    """Stack boxes into an ``(N, 4)`` float array of corner coordinates."""
    coords = [b.coords for b in boxes]
    if not coords:
        return np.empty((0, 4), dtype=float)
    return np.asarray(coords, dtype=float)


def iou(a: BoundingBox, b: BoundingBox) -> float:
    """Intersection-over-union of two boxes.

    Symmetric, in ``[0, 1]``, and exactly 0 for disjoint boxes or boxes that
    touch only along an edge (zero-area intersection).
    """
    iw = min(a.u2, b.u2) - max(a.u1, b.u1)
    ih = min(a.v2, b.v2) - max(a.v1, b.v1)
    if iw <= 0.0 or ih <= 0.0:
        return 0.0
    inter = iw * ih
    return inter / (a.area + b.area - inter)


def iou_matrix(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Pairwise IoU between two ``(N, 4)`` / ``(M, 4)`` corner arrays.

    Returns an ``(N, M)`` matrix; vectorized equivalent of :func:`iou`.
    """
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    iw = np.minimum(a[:, None, 2], b[None, :, 2]) - np.maximum(a[:, None, 0], b[None, :, 0])
    ih = np.minimum(a[:, None, 3], b[None, :, 3]) - np.maximum(a[:, None, 1], b[None, :, 1])
    inter = np.clip(iw, 0.0, None) * np.clip(ih, 0.0, None)
    area_a = (a[:, 2] - a[:, 0]) * (a[:, 3] - a[:, 1])
    area_b = (b[:, 2] - b[:, 0]) * (b[:, 3] - b[:, 1])
    union = area_a[:, None] + area_b[None, :] - inter
    return inter / union


def psi_transform(box: BoundingBox, z: float) -> np.ndarray:
    """Map a box to the dimensionless 4-vector ``[u̅/e^z, v̅/e^z, log w, log h]``.

    ``z`` is the latent scale: scaling a box by ``s`` while shifting ``z`` by
    ``log s`` leaves the first two components unchanged and adds ``log s`` to
    the last two, which keeps all pairwise differences invariant.
    """
    if not math.isfinite(z):
        raise ValueError(f"latent scale must be finite, got {z}")
    inv = math.exp(-z)
    return np.array(
        [
            box.center_u * inv,
            box.center_v * inv,
            math.log(box.width),
            math.log(box.height),
        ]
    )


def psi_transform_array(boxes: np.ndarray, z: float) -> np.ndarray:
    """Vectorized :func:`psi_transform` over an ``(N, 4)`` corner array."""
    boxes = np.atleast_2d(np.asarray(boxes, dtype=float))
    inv = math.exp(-z)
    out = np.empty_like(boxes)
    out[:, 0] = 0.5 * (boxes[:, 0] + boxes[:, 2]) * inv
    out[:, 1] = 0.5 * (boxes[:, 1] + boxes[:, 3]) * inv
    out[:, 2] = np.log(boxes[:, 2] - boxes[:, 0])
    out[:, 3] = np.log(boxes[:, 3] - boxes[:, 1])
    return out


def psi_inverse(vec: np.ndarray, z: float) -> BoundingBox:
    """Invert :func:`psi_transform`: recover corner coordinates from
    ``[u̅/e^z, v̅/e^z, log w, log h]``."""
    scale = math.exp(z)
    cu = float(vec[0]) * scale
    cv = float(vec[1]) * scale
    w = math.exp(float(vec[2]))
    h = math.exp(float(vec[3]))
    return BoundingBox(cu - 0.5 * w, cv - 0.5 * h, cu + 0.5 * w, cv + 0.5 * h)


def greedy_nms(
    dets: Sequence[tuple[BoundingBox, float]],
    overlap_threshold: float,
) -> list[tuple[BoundingBox, float]]:
    """Greedy non-maximum suppression.

    Repeatedly keeps the highest-scoring remaining box and drops every box
    whose IoU with it exceeds ``overlap_threshold``.  Score ties are broken
    by lexicographic order on the corner coordinates so the result is
    deterministic regardless of input order.

    Parameters
    ----------
    dets : sequence of (BoundingBox, score)
    overlap_threshold : float in [0, 1]

    Returns
    -------
    list of (BoundingBox, score), sorted by descending score.
    """
    if not 0.0 <= overlap_threshold <= 1.0:
        raise ValueError(f"overlap threshold must be in [0, 1], got {overlap_threshold}")
    if not dets:
        return []
    order = sorted(range(len(dets)), key=lambda i: (-dets[i][1], dets[i][0].coords))
    boxes = boxes_to_array([dets[i][0] for i in order])
    alive = np.ones(len(order), dtype=bool)
    kept: list[tuple[BoundingBox, float]] = []
    for pos in range(len(order)):
        if not alive[pos]:
            continue
        kept.append(dets[order[pos]])
        overlaps = iou_matrix(boxes[pos : pos + 1], boxes[alive])[0]
        # indices of currently-alive boxes, in sorted order
        alive_idx = np.flatnonzero(alive)
        alive[alive_idx[overlaps > overlap_threshold]] = False
    return kept


def clip_box_to_bounds(
    box: BoundingBox,
    bounds: tuple[float, float, float, float],
    min_size: float = 1.0,
) -> BoundingBox:
    """Fit a box inside rectangular bounds ``(u_min, v_min, u_max, v_max)``.

    The box is shifted to lie inside the bounds where possible and shrunk
    only when it is larger than the bounded region; this preserves width and
    height for the common case of a box hanging slightly off an image edge.
    """
    u_min, v_min, u_max, v_max = (float(c) for c in bounds)
    span_u = u_max - u_min
    span_v = v_max - v_min
    if span_u < min_size or span_v < min_size:
        raise ValueError(f"bounds too small to hold a box of size {min_size}: {bounds}")
    w = min(max(box.width, min_size), span_u)
    h = min(max(box.height, min_size), span_v)
    u1 = min(max(box.u1, u_min), u_max - w)
    v1 = min(max(box.v1, v_min), v_max - h)
    return BoundingBox(u1, v1, u1 + w, v1 + h)
