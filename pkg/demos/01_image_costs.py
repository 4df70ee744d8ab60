"""Score single images and read the correction plan.

Four tiny scenes show what the image-level cost responds to: a perfect
detection, a redundant duplicate, a completely missed image, and a
mislabeled box.
"""

from oceval import BoundingBox, Detection, GroundTruthInstance, OcCostParams, image_oc_cost

box = BoundingBox(100, 100, 200, 180)
params = OcCostParams()  # loc_weight 0.5, dummy_cost 0.6

gt = [GroundTruthInstance(box, label=1)]

scenes = {
    "perfect detection": [Detection(box, label=1, score=1.0)],
    "duplicate detection": [Detection(box, 1, 1.0), Detection(box, 1, 1.0)],
    "no detections": [],
    "wrong label": [Detection(box, label=2, score=1.0)],
    "hedged score": [Detection(box, label=1, score=0.6)],
}

for name, dets in scenes.items():
    result = image_oc_cost(dets, gt, params)
    print(f"{name:22s} oc_cost {result.oc_cost:.4f}  matched {result.matched_pairs}")

print()
print("the duplicate plan, pair by pair:")
result = image_oc_cost(scenes["duplicate detection"], gt, params, with_breakdown=True)
for pair in result.per_pair_breakdown:
    det = pair.det_index if pair.det_index is not None else "-"
    gt_i = pair.gt_index if pair.gt_index is not None else "-"
    print(f"  det {det} -> gt {gt_i}  cost {pair.cost:.3f}")
print(f"total {result.oc_cost:.3f}: one free match, one false positive at 0.6, mass 2")
