"""A false positive that mAP cannot see.

Dataset mAP pools detections per category and ranks them by score. A
false positive ranked below every true positive never changes any
sampled precision, so appending one to an otherwise clean detector
leaves mAP exactly where it was. The correction cost charges it
immediately: someone reviewing that image would have to delete the box.
"""

from oceval import (
    BoundingBox,
    Detection,
    GroundTruthInstance,
    OcCostParams,
    dataset_map,
    dataset_oc_cost,
)

b1 = BoundingBox(0, 0, 50, 50)
b2 = BoundingBox(200, 0, 260, 50)
b3 = BoundingBox(0, 200, 50, 260)

clean = [
    (1, [Detection(b1, 1, 0.90)], [GroundTruthInstance(b1, 1)]),
    (2, [Detection(b2, 1, 0.85)], [GroundTruthInstance(b2, 1)]),
    (3, [Detection(b3, 2, 0.90)], [GroundTruthInstance(b3, 2)]),
]

spurious = Detection(BoundingBox(400, 400, 440, 440), 1, 0.10)
polluted = [clean[0], clean[1], (3, [Detection(b3, 2, 0.90), spurious], clean[2][2])]

for name, inputs in (("clean", clean), ("with low-ranked fp", polluted)):
    map_score = dataset_map(inputs).mean_ap
    oc = dataset_oc_cost(inputs, OcCostParams()).mean_oc_cost
    print(f"{name:20s} mAP {map_score:.6f}   mean oc_cost {oc:.6f}")

print()
print("mAP is unchanged to the last digit; the correction cost rises")
print("because image 3 now needs a deletion")
