"""Classical mean average precision over pooled, ranked detections.

Detections are pooled per category across the whole dataset, ranked by
confidence, and greedily matched within each image against that
category's ground truths at a fixed IoU threshold. Average precision
samples the precision envelope at equally spaced recall points; the
defaults follow the COCO convention (101 recall points, IoU thresholds
0.50 to 0.95 in steps of 0.05). A single-threshold 11-point VOC mode is
available through the parameters.

A single-image variant treats one image as the whole dataset, scoring
the categories present in that image's detections or ground truths.
"""

from __future__ import annotations

import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from typing import Hashable

import numpy as np

from .costs import Detection, GroundTruthInstance
from .errors import ConfigError
from .geometry import boxes_to_array, pairwise_iou

__all__ = [
    "COCO_IOU_THRESHOLDS",
    "MapParams",
    "PrCurve",
    "MapReport",
    "match_greedy",
    "average_precision",
    "pr_curve",
    "dataset_map",
    "single_image_map",
    "MatchTable",
    "build_match_table",
    "map_from_table",
]

COCO_IOU_THRESHOLDS: tuple[float, ...] = tuple(round(0.50 + 0.05 * i, 2) for i in range(10))

ImageInput = tuple[Hashable, Sequence[Detection], Sequence[GroundTruthInstance]]


@dataclass(frozen=True)
class MapParams:
    """Evaluation-protocol knobs.

    ``iou_thresholds`` must be sorted ascending, unique, inside (0, 1].
    ``max_detections`` optionally caps detections per image by score rank
    before matching (off by default). Detections are always ranked by
    descending score; ``score_ordering`` exists to state that contract.
    """

    iou_thresholds: tuple[float, ...] = COCO_IOU_THRESHOLDS
    recall_points: int = 101
    score_ordering: str = "descending"
    max_detections: int | None = None

    def __post_init__(self) -> None:
        thrs = tuple(self.iou_thresholds)
        object.__setattr__(self, "iou_thresholds", thrs)
        if not thrs:
            raise ConfigError("at least one IoU threshold is required")
        if list(thrs) != sorted(set(thrs)):
            raise ConfigError(f"IoU thresholds must be sorted and unique, got {thrs}")
        if not all(0.0 < t <= 1.0 for t in thrs):
            raise ConfigError(f"IoU thresholds must lie in (0, 1], got {thrs}")
        if self.recall_points < 2:
            raise ConfigError(f"recall_points must be >= 2, got {self.recall_points}")
        if self.score_ordering != "descending":
            raise ConfigError("detections are ranked by descending score only")
        if self.max_detections is not None and self.max_detections < 1:
            raise ConfigError(f"max_detections must be >= 1, got {self.max_detections}")

    @classmethod
    def voc(cls) -> "MapParams":
        """Single-threshold 11-point protocol."""
        return cls(iou_thresholds=(0.5,), recall_points=11)


@dataclass(frozen=True)
class PrCurve:
    """Raw precision/recall points for one category at one IoU threshold."""

    category: int
    iou_threshold: float
    points: tuple[tuple[float, float], ...]
    ap: float


@dataclass(frozen=True)
class MapReport:
    """Dataset mAP with its per-category breakdown (mean AP over thresholds)."""

    mean_ap: float
    per_category: Mapping[int, float]
    params: MapParams = field(default_factory=MapParams)


def _greedy_flags(iou_mat: np.ndarray, iou_threshold: float) -> list[bool]:
    """True/false-positive flags for rows already ranked by descending score.

    Each row claims the unclaimed column of highest IoU; the claim counts as
    a true positive when that IoU reaches the threshold. Duplicates of an
    already-claimed ground truth fall through to worse columns or to false
    positive. IoU ties resolve to the lowest column index.
    """
    taken = [False] * iou_mat.shape[1]
    flags: list[bool] = []
    for row in iou_mat:
        best_j = -1
        best = 0.0
        for j, value in enumerate(row):
            if not taken[j] and value > best:
                best = float(value)
                best_j = j
        if best_j >= 0 and best >= iou_threshold:
            taken[best_j] = True
            flags.append(True)
        else:
            flags.append(False)
    return flags


def match_greedy(
    dets: Sequence[Detection],
    gts: Sequence[GroundTruthInstance],
    category: int,
    iou_threshold: float,
) -> list[tuple[int, bool]]:
    """Greedy TP/FP labeling of one category's detections within one image.

    Returns (index into ``dets``, is-true-positive) pairs ordered by
    descending score, score ties broken by input order.
    """
    det_ids = sorted(
        (i for i, d in enumerate(dets) if d.label == category),
        key=lambda i: (-dets[i].score, i),
    )
    gt_ids = [j for j, g in enumerate(gts) if g.label == category]
    if not det_ids:
        return []
    mat = pairwise_iou(
        boxes_to_array(dets[i].box for i in det_ids),
        boxes_to_array(gts[j].box for j in gt_ids),
    )
    flags = _greedy_flags(mat, iou_threshold)
    return list(zip(det_ids, flags))


def _envelope(flags: Sequence[bool], num_gt: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Cumulative recall, precision, and the running-max precision envelope."""
    tp = np.cumsum(np.asarray(flags, dtype=np.float64))
    ranks = np.arange(1, len(flags) + 1, dtype=np.float64)
    recall = tp / num_gt
    precision = tp / ranks
    envelope = np.maximum.accumulate(precision[::-1])[::-1]
    return recall, precision, envelope


def average_precision(
    flags: Sequence[bool],
    num_gt: int,
    recall_points: int = 101,
) -> float | None:
    """Interpolated AP from score-ordered TP/FP flags.

    Samples the precision envelope at ``recall_points`` equally spaced
    recall values and averages. With no ground truths the value is
    undefined (None) unless detections exist, in which case it is 0.
    """
    if num_gt < 0:
        raise ConfigError(f"num_gt must be >= 0, got {num_gt}")
    if num_gt == 0:
        return 0.0 if len(flags) else None
    if not len(flags):
        return 0.0
    recall, _, envelope = _envelope(flags, num_gt)
    samples = np.linspace(0.0, 1.0, recall_points)
    idx = np.searchsorted(recall, samples, side="left")
    sampled = np.where(idx < len(recall), envelope[np.minimum(idx, len(recall) - 1)], 0.0)
    return float(np.mean(sampled))


def pr_curve(
    flags: Sequence[bool],
    num_gt: int,
    category: int,
    iou_threshold: float,
    recall_points: int = 101,
) -> PrCurve:
    """Raw cumulative precision/recall points plus the interpolated AP."""
    ap = average_precision(flags, num_gt, recall_points)
    if num_gt == 0 or not len(flags):
        return PrCurve(category, iou_threshold, (), 0.0 if ap is None else ap)
    recall, precision, _ = _envelope(flags, num_gt)
    points = tuple(zip(recall.tolist(), precision.tolist()))
    return PrCurve(category, iou_threshold, points, float(ap))


@dataclass(frozen=True)
class MatchTable:
    """Precomputed per-image matching, reusable across resampled subsets.

    ``entries[image_index][category]`` holds (gt_count, det_rows) where each
    det row is (score, image_index, position, flags-per-threshold). Matching
    happens within one image, so any multiset of images can be pooled later
    without re-running the geometry.
    """

    entries: tuple[dict[int, tuple[int, tuple[tuple[float, int, int, tuple[bool, ...]], ...]]], ...]
    params: MapParams


def build_match_table(per_image_inputs: Sequence[ImageInput], params: MapParams) -> MatchTable:
    entries = []
    for image_index, (_, dets, gts) in enumerate(per_image_inputs):
        dets = list(dets)
        if params.max_detections is not None and len(dets) > params.max_detections:
            keep = sorted(range(len(dets)), key=lambda i: (-dets[i].score, i))
            keep = sorted(keep[: params.max_detections])
            dets = [dets[i] for i in keep]
        cats = sorted({d.label for d in dets} | {g.label for g in gts})
        image_entry: dict[int, tuple[int, tuple]] = {}
        for cat in cats:
            det_ids = sorted(
                (i for i, d in enumerate(dets) if d.label == cat),
                key=lambda i: (-dets[i].score, i),
            )
            gt_count = sum(1 for g in gts if g.label == cat)
            rows: list[tuple[float, int, int, tuple[bool, ...]]] = []
            if det_ids:
                gt_boxes = boxes_to_array(g.box for g in gts if g.label == cat)
                mat = pairwise_iou(boxes_to_array(dets[i].box for i in det_ids), gt_boxes)
                per_thr = [_greedy_flags(mat, thr) for thr in params.iou_thresholds]
                for pos, det_id in enumerate(det_ids):
                    rows.append(
                        (
                            dets[det_id].score,
                            image_index,
                            pos,
                            tuple(per_thr[t][pos] for t in range(len(params.iou_thresholds))),
                        )
                    )
            image_entry[cat] = (gt_count, tuple(rows))
        entries.append(image_entry)
    return MatchTable(entries=tuple(entries), params=params)


def map_from_table(table: MatchTable, image_indices: Sequence[int]) -> MapReport:
    """Pool a multiset of images from the table and compute mAP.

    Pooled detections sort by (-score, image index, in-image rank), which
    makes the value invariant to the order of ``image_indices``; repeated
    indices count with multiplicity. Only categories with at least one
    pooled ground truth participate.
    """
    params = table.params
    gt_counts: dict[int, int] = {}
    for idx in image_indices:
        for cat, (gt_count, _) in table.entries[idx].items():
            gt_counts[cat] = gt_counts.get(cat, 0) + gt_count
    categories = sorted(cat for cat, count in gt_counts.items() if count > 0)
    if not categories:
        return MapReport(mean_ap=0.0, per_category={}, params=params)

    per_category: dict[int, float] = {}
    for cat in categories:
        pooled: list[tuple[float, int, int, tuple[bool, ...]]] = []
        for idx in image_indices:
            entry = table.entries[idx].get(cat)
            if entry is not None:
                pooled.extend(entry[1])
        pooled.sort(key=lambda row: (-row[0], row[1], row[2]))
        aps = []
        for t in range(len(params.iou_thresholds)):
            flags = [row[3][t] for row in pooled]
            ap = average_precision(flags, gt_counts[cat], params.recall_points)
            aps.append(0.0 if ap is None else ap)
        per_category[cat] = math.fsum(aps) / len(aps)

    mean_ap = math.fsum(per_category.values()) / len(per_category)
    return MapReport(mean_ap=mean_ap, per_category=per_category, params=params)


def dataset_map(per_image_inputs: Sequence[ImageInput], params: MapParams | None = None) -> MapReport:
    """COCO-style dataset mAP: pool per category, average APs over thresholds
    then over categories that have ground truths."""
    params = params or MapParams()
    inputs = list(per_image_inputs)
    table = build_match_table(inputs, params)
    return map_from_table(table, range(len(inputs)))


def single_image_map(
    dets: Sequence[Detection],
    gts: Sequence[GroundTruthInstance],
    params: MapParams | None = None,
) -> float:
    """mAP of one image treated as a one-sample dataset.

    Scored over the categories present in this image's detections or ground
    truths; categories with detections but no ground truths contribute 0.
    An image with neither is vacuously perfect and scores 1 (callers may
    flag it in their output).
    """
    params = params or MapParams()
    cats = sorted({d.label for d in dets} | {g.label for g in gts})
    if not cats:
        return 1.0
    table = build_match_table([(None, dets, gts)], params)
    entry = table.entries[0]
    per_cat: list[float] = []
    for cat in cats:
        gt_count, rows = entry[cat]
        if gt_count == 0:
            per_cat.append(0.0)
            continue
        aps = []
        for t in range(len(params.iou_thresholds)):
            flags = [row[3][t] for row in rows]
            ap = average_precision(flags, gt_count, params.recall_points)
            aps.append(0.0 if ap is None else ap)
        per_cat.append(math.fsum(aps) / len(aps))
    return math.fsum(per_cat) / len(per_cat)
