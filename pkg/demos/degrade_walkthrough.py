"""Compound degradation: sample a plan, apply it, record it, replay it.

    python demos/degrade_walkthrough.py [output_dir]
"""

import sys
from pathlib import Path

import numpy as np
from skimage import data

from degradekit import imagecore as ic
from degradekit.degrade import DegradeConfig, degrade_batch, image_seed, op_catalog, replay, sample_plan

out_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else None
cfg = DegradeConfig()
print(f"{len(op_catalog())} ops in the catalog:")
for spec in op_catalog():
    print(f"  {spec.op_id:22s} {spec.category}")

img = ic.from_uint8(data.astronaut())[::2, ::2]
seed = image_seed(7, "astronaut")
for severity in (0.0, 0.3, 0.6, 1.0):
    plan = sample_plan(cfg, severity, seed, (img.shape[1], img.shape[0]))
    names = [op.op_id for op in plan.steps]
    print(f"severity {severity:.1f}: {len(names)} steps  {' > '.join(names) or '(identity)'}")

images = [("astronaut", img), ("coffee", ic.from_uint8(data.coffee())[::2, ::2])]
outputs, manifest = degrade_batch(images, cfg, severity=0.5, global_seed=7, jobs=2)
for (image_id, src), out, rec in zip(images, outputs, manifest.images):
    again = replay(src, rec)
    print(f"{image_id}: PSNR {ic.psnr(src, out):.2f} dB, replay identical: {np.array_equal(again, out)}")
    if out_dir:
        out_dir.mkdir(parents=True, exist_ok=True)
        ic.write_png(out_dir / f"{image_id}__s0.50.png", out)
if out_dir:
    manifest.save(out_dir / "manifest.json")
    print("wrote", out_dir)
