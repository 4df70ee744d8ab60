"""Tune score/IoU thresholds against each metric and compare the output.

The dataset is clean detections at score 0.9 plus disjoint low-score
noise boxes. Ranking-based mAP never pays for bottom-ranked noise, so
tuning against it has no reason to raise the score threshold. Tuning
against the correction cost does, and the per-image detection counts
land back on the ground-truth counts.
"""

from oceval import BoundingBox, Detection, GroundTruthInstance, nms, tune

b1 = BoundingBox(0, 0, 60, 60)
b2 = BoundingBox(200, 0, 260, 60)
noise_box = BoundingBox(400, 400, 430, 430)

inputs = []
for image_id in range(8):
    gts = [GroundTruthInstance(b1, 1), GroundTruthInstance(b2, 2)]
    dets = [
        Detection(b1, 1, 0.9),
        Detection(b2, 2, 0.9),
        Detection(noise_box, 1, 0.1),
    ]
    inputs.append((image_id, dets, gts))

for objective in ("oc-cost", "map"):
    result = tune(inputs, objective)
    best = result.best_params
    counts = [len(nms(dets, best)) for _, dets, _ in inputs]
    print(
        f"objective {objective:8s} -> score_thr {best.score_threshold:.2f} "
        f"iou_thr {best.iou_threshold:.1f}  value {result.objective_value:.4f}  "
        f"dets/image after filtering: {counts[0]} (gt has 2)"
    )

print()
print("map ties at 1.0 across the whole grid, so the sweep keeps its")
print("first point and the noise survives; minimizing the correction")
print("cost pushes the score threshold above the noise and the count")
print("histogram collapses onto the ground truth")
