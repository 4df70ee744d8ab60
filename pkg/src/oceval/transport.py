"""Exact solver for the balanced detection-correction transportation problem.

The problem always has unit supplies on real rows, unit demands on real
columns, and a dummy row/column holding the slack, so it reduces to a
square assignment problem: split the dummy supplier into n unit rows and
the dummy demander into m unit columns, solve the (m+n) x (m+n)
assignment exactly, and fold the dummy copies back together. Assignment
vertices map one-to-one onto integral transportation vertices, so the
result is an exact integral optimum, not an approximation.

Plan selection among equal-cost optima matters downstream (the
normalization mass depends on how many real pairs the plan matches), so
the solver deterministically prefers plans with the maximum number of
matched real pairs. It does so by solving with real-pair costs nudged
down by a tiny epsilon; the reported objective is always computed from
the unperturbed costs of the selected plan.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .costs import CostMatrix, SupplyDemand
from .errors import ConfigError, ValidationError

__all__ = ["TransportPlan", "solve", "brute_force_solve", "MAX_BRUTE_FORCE_SIDE"]

# Bias toward more matched real pairs among equal-cost plans. Far smaller
# than any meaningful cost gap, far larger than accumulated rounding.
_TIE_EPSILON = 1e-7

MAX_BRUTE_FORCE_SIDE = 6


@dataclass(frozen=True)
class TransportPlan:
    """An integral optimal plan: flows[i][j] units moved from row i to column j.

    Row sums equal supplies and column sums equal demands exactly; real-to-real
    cells carry 0 or 1 unit. ``objective`` is the plan's total cost under the
    unperturbed cost matrix (the dummy-to-dummy corner included).
    """

    flows: np.ndarray
    objective: float

    @property
    def matched_pairs(self) -> int:
        """Number of real detection / real ground-truth unit flows."""
        return int(self.flows[:-1, :-1].sum())


def _validate_problem(cost: CostMatrix, sd: SupplyDemand) -> None:
    m, n = cost.m, cost.n
    entries = cost.entries
    if entries.shape != (m + 1, n + 1):
        raise ConfigError(
            f"cost matrix shape {entries.shape} does not match declared sizes m={m}, n={n}"
        )
    if np.isnan(entries).any():
        raise ValidationError("cost matrix contains NaN entries")
    if (entries < 0).any():
        raise ValidationError("cost matrix contains negative entries")
    if not np.isfinite(entries).all():
        raise ValidationError("cost matrix contains non-finite entries")
    supplies, demands = sd.supplies, sd.demands
    if supplies.shape != (m + 1,) or demands.shape != (n + 1,):
        raise ConfigError("supply/demand vectors do not match the cost matrix shape")
    if supplies.sum() != demands.sum():
        raise ConfigError(
            f"unbalanced problem: total supply {int(supplies.sum())} != "
            f"total demand {int(demands.sum())}"
        )
    if not ((supplies[:m] == 1).all() and supplies[m] == n):
        raise ConfigError("supplies must be unit for real rows with the slack on the dummy row")
    if not ((demands[:n] == 1).all() and demands[n] == m):
        raise ConfigError("demands must be unit for real columns with the slack on the dummy column")


def _plan_objective(entries: np.ndarray, flows: np.ndarray) -> float:
    rows, cols = np.nonzero(flows)
    return math.fsum(
        entries[i, j] * flows[i, j] for i, j in zip(rows.tolist(), cols.tolist())
    )


def solve(cost: CostMatrix, sd: SupplyDemand) -> TransportPlan:
    """Solve the transportation problem exactly.

    Returns an integral plan whose objective attains the linear-programming
    minimum; among optimal plans, one with the maximum number of matched
    real pairs is selected deterministically.
    """
    _validate_problem(cost, sd)
    m, n = cost.m, cost.n
    if m == 0 and n == 0:
        return TransportPlan(flows=np.zeros((1, 1), dtype=np.int64), objective=0.0)

    size = m + n
    entries = cost.entries
    stacked = np.empty((size, size), dtype=np.float64)
    stacked[:m, :n] = entries[:m, :n] - _TIE_EPSILON
    stacked[:m, n:] = entries[:m, n][:, None]
    stacked[m:, :n] = entries[m, :n][None, :]
    stacked[m:, n:] = entries[m, n]

    rows, cols = linear_sum_assignment(stacked)
    flows = np.zeros((m + 1, n + 1), dtype=np.int64)
    for r, c in zip(rows.tolist(), cols.tolist()):
        flows[r if r < m else m, c if c < n else n] += 1
    return TransportPlan(flows=flows, objective=_plan_objective(entries, flows))


def brute_force_solve(cost: CostMatrix, sd: SupplyDemand) -> TransportPlan:
    """Exhaustively enumerate every integral plan; verification oracle for ``solve``.

    Every integral vertex of this problem is a partial injective matching
    between real rows and real columns: k matched pairs force m - k flows to
    the dummy column, n - k flows from the dummy row, and k dummy-to-dummy
    units. Enumeration is bounded to small instances by design.
    """
    _validate_problem(cost, sd)
    m, n = cost.m, cost.n
    if m > MAX_BRUTE_FORCE_SIDE or n > MAX_BRUTE_FORCE_SIDE:
        raise ConfigError(
            f"brute-force enumeration is limited to {MAX_BRUTE_FORCE_SIDE} boxes per side, "
            f"got m={m}, n={n}"
        )
    entries = cost.entries

    best_obj: float | None = None
    best_k = -1
    best_match: tuple[tuple[int, int], ...] = ()
    for k in range(min(m, n) + 1):
        for det_sel in itertools.combinations(range(m), k):
            det_unmatched = [i for i in range(m) if i not in det_sel]
            for gt_sel in itertools.permutations(range(n), k):
                gt_unmatched = [j for j in range(n) if j not in gt_sel]
                terms = [entries[i, j] for i, j in zip(det_sel, gt_sel)]
                terms += [entries[i, n] for i in det_unmatched]
                terms += [entries[m, j] for j in gt_unmatched]
                terms += [entries[m, n]] * k
                obj = math.fsum(terms)
                if best_obj is None or obj < best_obj or (obj == best_obj and k > best_k):
                    best_obj = obj
                    best_k = k
                    best_match = tuple(zip(det_sel, gt_sel))

    flows = np.zeros((m + 1, n + 1), dtype=np.int64)
    matched_dets = set()
    matched_gts = set()
    for i, j in best_match:
        flows[i, j] = 1
        matched_dets.add(i)
        matched_gts.add(j)
    for i in range(m):
        if i not in matched_dets:
            flows[i, n] = 1
    for j in range(n):
        if j not in matched_gts:
            flows[m, j] = 1
    flows[m, n] = best_k
    assert best_obj is not None
    return TransportPlan(flows=flows, objective=best_obj)
