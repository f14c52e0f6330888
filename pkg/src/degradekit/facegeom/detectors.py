"""Bundled face-detector backends.

A detector is any object with ``detect(img, image_id) -> [(BBox, confidence), ...]``
(an empty list means no face).  Set ``serial = True`` on detectors that cannot be
called concurrently.
"""

from __future__ import annotations

import csv
import os
import subprocess
import tempfile

from .. import imagecore as ic
from ..errors import DetectorError, MalformedData
from ..formats import parse_detection_row, read_detections


class FileDetector:
    """Looks detections up by image id; ignores pixel content."""

    serial = False

    def __init__(self, detections: dict):
        self.detections = detections

    @classmethod
    def from_csv(cls, path):
        return cls(read_detections(path))

    def detect(self, img, image_id):
        return list(self.detections.get(image_id, []))


class CommandDetector:
    """Runs an external program per call.

    ``argv`` may contain ``{input}`` (path of a temporary PNG) and ``{image_id}``.
    The program prints ``image_id,x,y,w,h,confidence`` lines; empty fields mean
    no face.
    """

    serial = False

    def __init__(self, argv, timeout: float | None = 300.0):
        self.argv = list(argv)
        self.timeout = timeout

    def detect(self, img, image_id):
        with tempfile.TemporaryDirectory(prefix="degradekit-det-") as tmp:
            src = os.path.join(tmp, "input.png")
            ic.write_png(src, img)
            argv = [a.replace("{input}", src).replace("{image_id}", image_id) for a in self.argv]
            try:
                proc = subprocess.run(argv, capture_output=True, timeout=self.timeout)
            except (OSError, subprocess.TimeoutExpired) as exc:
                raise DetectorError(f"detector command could not run: {exc}") from exc
        if proc.returncode != 0:
            raise DetectorError(f"detector exited with {proc.returncode}: "
                                f"{proc.stderr.decode(errors='replace').strip()}")
        found = []
        lines = proc.stdout.decode("utf-8", errors="replace").splitlines()
        for row in csv.reader(line for line in lines if line.strip()):
            if [c.strip() for c in row] == ["image_id", "x", "y", "w", "h", "confidence"]:
                continue
            if len(row) != 6:
                raise DetectorError(f"detector emitted a malformed line: {','.join(row)!r}")
            try:
                _, box, conf = parse_detection_row([c.strip() for c in row], "<detector stdout>")
            except MalformedData as exc:
                raise DetectorError(str(exc)) from exc
            if box is not None:
                found.append((box, conf))
        return found
