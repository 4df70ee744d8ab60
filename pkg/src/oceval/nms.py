"""Score filtering, class-wise non-maximum suppression, and grid tuning.

The tuner sweeps a (score threshold, IoU threshold) grid, applies the
filtering to every image, and scores the surviving detections either by
mean image-level correction cost (minimized) or by dataset mAP
(maximized). Exhaustive search over the default 18 x 7 grid is cheap
compared to the per-point evaluation itself.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Hashable

from .costs import Detection, GroundTruthInstance, OcCostParams
from .errors import ConfigError
from .geometry import boxes_to_array, pairwise_iou
from .map_metric import MapParams, dataset_map
from .occost import dataset_oc_cost

__all__ = [
    "NmsParams",
    "TuneResult",
    "nms",
    "default_grid",
    "tune",
]

ImageInput = tuple[Hashable, Sequence[Detection], Sequence[GroundTruthInstance]]


@dataclass(frozen=True)
class NmsParams:
    """Post-processing thresholds.

    Detections scoring below ``score_threshold`` are dropped; within each
    category, a detection overlapping an already-kept higher-scoring one
    with IoU strictly above ``iou_threshold`` is suppressed.
    """

    score_threshold: float = 0.0
    iou_threshold: float = 0.5

    def __post_init__(self) -> None:
        if not 0.0 <= self.score_threshold <= 1.0:
            raise ConfigError(f"score_threshold must be in [0, 1], got {self.score_threshold}")
        if not 0.0 <= self.iou_threshold <= 1.0:
            raise ConfigError(f"iou_threshold must be in [0, 1], got {self.iou_threshold}")


@dataclass(frozen=True)
class TuneResult:
    """Outcome of a grid sweep.

    ``grid`` maps each candidate to its objective value; ``objective_kind``
    is "minimize-oc-cost" or "maximize-map". Ties keep the earliest grid
    point.
    """

    best_params: NmsParams
    objective_value: float
    grid: tuple[tuple[NmsParams, float], ...]
    objective_kind: str


def nms(dets: Sequence[Detection], params: NmsParams) -> list[Detection]:
    """Filter and suppress one image's detections.

    Output is sorted by descending score (ties keep input order) and the
    operation is idempotent: feeding the result back returns it unchanged.
    """
    kept_order = sorted(
        (i for i, d in enumerate(dets) if d.score >= params.score_threshold),
        key=lambda i: (-dets[i].score, i),
    )
    if not kept_order:
        return []
    boxes = boxes_to_array(dets[i].box for i in kept_order)
    iou = pairwise_iou(boxes, boxes)
    suppressed = [False] * len(kept_order)
    for a in range(len(kept_order)):
        if suppressed[a]:
            continue
        label = dets[kept_order[a]].label
        for b in range(a + 1, len(kept_order)):
            if suppressed[b] or dets[kept_order[b]].label != label:
                continue
            if iou[a, b] > params.iou_threshold:
                suppressed[b] = True
    return [dets[i] for a, i in enumerate(kept_order) if not suppressed[a]]


def default_grid() -> list[NmsParams]:
    """Score thresholds 0.05..0.90 step 0.05 crossed with IoU thresholds
    0.3..0.9 step 0.1, in row-major order (score outer, IoU inner)."""
    scores = [i / 100.0 for i in range(5, 91, 5)]
    ious = [i / 10.0 for i in range(3, 10)]
    return [NmsParams(s, t) for s in scores for t in ious]


def _apply_grid_point(
    per_image_inputs: Sequence[ImageInput], params: NmsParams
) -> list[ImageInput]:
    return [(image_id, nms(dets, params), gts) for image_id, dets, gts in per_image_inputs]


def tune(
    per_image_inputs: Sequence[ImageInput],
    objective: str = "oc-cost",
    grid: Sequence[NmsParams] | None = None,
    oc_params: OcCostParams | None = None,
    map_params: MapParams | None = None,
    jobs: int = 1,
) -> TuneResult:
    """Exhaustively score every grid point and keep the best.

    ``objective`` is "oc-cost" (lower is better) or "map" (higher is
    better). Exact ties keep the first point in grid order, so results are
    reproducible for a fixed grid.
    """
    if objective not in ("oc-cost", "map"):
        raise ConfigError(f"objective must be 'oc-cost' or 'map', got {objective!r}")
    candidates = list(default_grid() if grid is None else grid)
    if not candidates:
        raise ConfigError("tuning grid is empty")
    inputs = list(per_image_inputs)

    scored: list[tuple[NmsParams, float]] = []
    for point in candidates:
        filtered = _apply_grid_point(inputs, point)
        if objective == "oc-cost":
            value = dataset_oc_cost(filtered, oc_params or OcCostParams(), jobs=jobs).mean_oc_cost
        else:
            value = dataset_map(filtered, map_params).mean_ap
        scored.append((point, value))

    if objective == "oc-cost":
        best_index = min(range(len(scored)), key=lambda i: (scored[i][1], i))
        kind = "minimize-oc-cost"
    else:
        best_index = max(range(len(scored)), key=lambda i: (scored[i][1], -i))
        kind = "maximize-map"
    best_point, best_value = scored[best_index]
    return TuneResult(
        best_params=best_point,
        objective_value=best_value,
        grid=tuple(scored),
        objective_kind=kind,
    )
