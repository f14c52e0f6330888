"""Stream crops and the detection recovery chain.

The detector here is a toy: it "sees" a face only when the image is nearly
free of salt-and-pepper impulses, so the median steps of the chain rescue it.

    python demos/face_crops_and_recovery.py
"""

import numpy as np
from scipy.ndimage import median_filter
from skimage import data

from degradekit import imagecore as ic
from degradekit.facegeom import (BBox, center_crop, crop_resize, expand_bbox, patch_grid,
                                 recover_batch, recovery_report)

img = ic.from_uint8(data.astronaut())
box = BBox(170, 40, 100, 120)
grown = expand_bbox(box, 1.3, img.shape[1], img.shape[0])
print("face box", box, "-> expanded", grown)
local = crop_resize(img, grown)
glob = center_crop(img)
print("local crop", local.shape, "global crop", glob.shape, "patch grid", patch_grid(local.shape[0]))


class ToyDetector:
    serial = False

    def detect(self, im, image_id):
        impulses = np.mean(np.abs(im - median_filter(im, size=(3, 3, 1), mode="mirror")) > 0.4)
        h, w = im.shape[:2]
        return [] if impulses > 0.002 else [(BBox(w / 4, h / 4, w / 2, h / 2), 0.95)]


rng = np.random.default_rng(0)
corpus = []
for i in range(20):
    noisy = ic.resize(img, 64, 64)
    if i % 4:
        mask = rng.random(noisy.shape[:2]) < 0.03
        noisy[mask] = rng.integers(0, 2, (int(mask.sum()), 1))
    corpus.append((f"face{i:02d}", noisy))

for label, steps in (("chain off", []), ("chain on", None)):
    report = recovery_report(recover_batch(corpus, ToyDetector(), steps=steps))
    print(f"{label:9s} failure rate {report['failure_rate']:.2f}  {report}")
