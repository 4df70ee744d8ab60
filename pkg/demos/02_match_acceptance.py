"""How the dummy cost decides which pairs are worth matching.

A pair is matched only when its unit cost does not exceed the dummy
cost: beyond that, dropping the detection and re-annotating the ground
truth separately is cheaper than correcting the pair. Sweeping the
dummy cost over a fixed mislabeled scene shows the acceptance flip.
"""

from oceval import BoundingBox, Detection, GroundTruthInstance, OcCostParams, image_oc_cost

box = BoundingBox(0, 0, 100, 100)
# perfectly localized, wrong class, fully confident: pair cost 0.5
dets = [Detection(box, label=2, score=1.0)]
gts = [GroundTruthInstance(box, label=1)]

print("pair unit cost is 0.5 in every row; only the dummy cost changes")
print()
print("dummy_cost  oc_cost  matched")
for beta in (0.2, 0.3, 0.45, 0.5, 0.55, 0.6, 0.8, 1.0):
    result = image_oc_cost(dets, gts, OcCostParams(loc_weight=0.5, dummy_cost=beta))
    print(f"{beta:9.2f}  {result.oc_cost:7.4f}  {result.matched_pairs}")

print()
print("below 0.5 the pair is rejected and the image pays two corrections")
print("normalized to the dummy cost itself; from 0.5 up the match is kept")
print("and the image pays the pair cost instead")
