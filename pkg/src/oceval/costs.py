"""Pairwise correction costs between detections and ground truths.

A unit cost says how much work it takes to turn one detection into one
ground-truth instance. It blends a localization term (driven by
generalized IoU) and a classification term (driven by the label match
and the confidence score), weighted by ``loc_weight``. The full problem
adds one dummy row and one dummy column priced at ``dummy_cost``, which
absorb unmatched detections (false positives) and unmatched ground
truths (false negatives).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from collections.abc import Sequence

import numpy as np

from .errors import ConfigError
from .geometry import BoundingBox, boxes_to_array, giou, pairwise_giou

__all__ = [
    "Detection",
    "GroundTruthInstance",
    "OcCostParams",
    "CostMatrix",
    "SupplyDemand",
    "localization_cost",
    "classification_cost",
    "unit_cost",
    "build_problem",
]


@dataclass(frozen=True)
class Detection:
    """A labeled box with a confidence score in [0, 1]."""

    box: BoundingBox
    label: int
    score: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.score) and 0.0 <= self.score <= 1.0):
            raise ValueError(f"detection score must lie in [0, 1], got {self.score!r}")


@dataclass(frozen=True)
class GroundTruthInstance:
    """A labeled reference box."""

    box: BoundingBox
    label: int


@dataclass(frozen=True)
class OcCostParams:
    """Knobs of the correction cost.

    loc_weight:
        Weight of the localization term; the classification term gets the
        complement. Exposed as ``--lambda`` on the command line. 0 scores
        labels only, 1 scores geometry only.
    dummy_cost:
        Unit cost of routing a detection or a ground truth to the dummy,
        i.e. of declaring it a false positive / false negative. Exposed as
        ``--beta``. It caps the cost a matched pair may incur: pairs whose
        unit cost exceeds it are cheaper to reject than to match.

    Both must lie in [0, 1]; that keeps the final per-image cost in [0, 1].
    """

    loc_weight: float = 0.5
    dummy_cost: float = 0.6

    def __post_init__(self) -> None:
        if not (math.isfinite(self.loc_weight) and 0.0 <= self.loc_weight <= 1.0):
            raise ConfigError(f"loc_weight must lie in [0, 1], got {self.loc_weight!r}")
        if not (math.isfinite(self.dummy_cost) and 0.0 <= self.dummy_cost <= 1.0):
            raise ConfigError(f"dummy_cost must lie in [0, 1], got {self.dummy_cost!r}")


@dataclass(frozen=True)
class CostMatrix:
    """Dummy-augmented (m+1) x (n+1) unit-cost matrix.

    Row i < m is detection i, column j < n is ground truth j; the last row
    and column are the dummy legs, every entry priced at the dummy cost.
    """

    entries: np.ndarray
    m: int
    n: int

    @property
    def degenerate(self) -> bool:
        """True for the 0-detection, 0-ground-truth problem; callers short-circuit it."""
        return self.m == 0 and self.n == 0


@dataclass(frozen=True)
class SupplyDemand:
    """Integer capacities: unit supplies/demands for real rows and columns,
    n for the dummy supplier and m for the dummy demander, so the problem
    is always balanced at m + n total units."""

    supplies: np.ndarray
    demands: np.ndarray


def localization_cost(a: BoundingBox, b: BoundingBox) -> float:
    """(1 - GIoU) / 2, in [0, 1): zero iff the boxes coincide."""
    return (1.0 - giou(a, b)) / 2.0


def classification_cost(score: float, det_label: int, gt_label: int) -> float:
    """Cost of fixing the label given the confidence placed on it.

    A correct label costs (1 - score) / 2, so confident correct labels are
    nearly free; a wrong label costs (1 + score) / 2, so confident mistakes
    are penalized hardest. Either branch maps score 0 to 0.5.
    """
    if det_label == gt_label:
        return (1.0 - score) / 2.0
    return (1.0 + score) / 2.0


def unit_cost(det: Detection, gt: GroundTruthInstance, params: OcCostParams) -> float:
    """Convex blend of localization and classification costs, in [0, 1]."""
    w = params.loc_weight
    return w * localization_cost(det.box, gt.box) + (1.0 - w) * classification_cost(
        det.score, det.label, gt.label
    )


def build_problem(
    dets: Sequence[Detection],
    gts: Sequence[GroundTruthInstance],
    params: OcCostParams,
) -> tuple[CostMatrix, SupplyDemand]:
    """Assemble the dummy-augmented cost matrix and its capacities.

    Entry (i, j) for i < m, j < n is ``unit_cost(dets[i], gts[j], params)``;
    the dummy row and column (including the corner) carry the dummy cost.
    Either side may be empty; with both empty the 1 x 1 problem is returned
    flagged as degenerate for the caller to short-circuit.
    """
    m, n = len(dets), len(gts)
    entries = np.full((m + 1, n + 1), params.dummy_cost, dtype=np.float64)
    if m and n:
        det_boxes = boxes_to_array(d.box for d in dets)
        gt_boxes = boxes_to_array(g.box for g in gts)
        loc = (1.0 - pairwise_giou(det_boxes, gt_boxes)) / 2.0
        scores = np.array([d.score for d in dets], dtype=np.float64)[:, None]
        det_labels = np.array([d.label for d in dets])
        gt_labels = np.array([g.label for g in gts])
        cls = np.where(
            det_labels[:, None] == gt_labels[None, :],
            (1.0 - scores) / 2.0,
            (1.0 + scores) / 2.0,
        )
        entries[:m, :n] = params.loc_weight * loc + (1.0 - params.loc_weight) * cls
    supplies = np.ones(m + 1, dtype=np.int64)
    supplies[m] = n
    demands = np.ones(n + 1, dtype=np.int64)
    demands[n] = m
    return CostMatrix(entries=entries, m=m, n=n), SupplyDemand(supplies=supplies, demands=demands)
