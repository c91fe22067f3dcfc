"""End-to-end mean-opinion-score session against a live grading service.

Prepares a study directory with the image-study command, starts the
HTTP service on an ephemeral port, submits a few grades the way the
browser UI would, and reads back the per-pair MOS.  The same directory
can afterwards be served interactively:

    pcaanon serve-mos --input <study dir> --port 8000 --ui frontend/dist
"""

import json
import tempfile
import threading
import urllib.request
from pathlib import Path

import numpy as np

from pcaanon import GrayImage, write_image
from pcaanon.cli import main
from pcaanon.mos import make_server

workdir = Path(tempfile.mkdtemp(prefix="mos-demo-"))

# --- prepare stimuli --------------------------------------------------------
rng = np.random.default_rng(12)
noise = rng.standard_normal((128, 128))
freq = np.hypot(np.fft.fftfreq(128)[:, None], np.fft.fftfreq(128)[None, :])
freq[0, 0] = freq[0, 1]
field = np.real(np.fft.ifft2(np.fft.fft2(noise) / freq ** 1.4))
field = (field - field.min()) / (field.max() - field.min()) * 255.0
write_image(GrayImage(pixels=np.floor(field + 0.5)),
            workdir / "source.pgm")

study_dir = workdir / "study"
main(["image-study", "--input", str(workdir / "source.pgm"),
      "--output", str(study_dir), "--ks", "1,2,5"])

# --- start the service ------------------------------------------------------
server = make_server(study_dir, port=0)
base = "http://{}:{}".format(*server.server_address[:2])
threading.Thread(target=server.serve_forever, daemon=True).start()
print("service at", base)

with urllib.request.urlopen(base + "/session") as resp:
    manifest = json.load(resp)
print("pairs:", [p["id"] for p in manifest["pairs"]])

# --- grade like three observers would ---------------------------------------
# double stimulus: each pair shows the untouched reference next to the
# k-removed test image; observers mark a point on the continuous 0..100 line
grades = {
    "pair-k1": [82.0, 75.5, 90.0],
    "pair-k2": [64.0, 58.5, 71.0],
    "pair-k5": [40.0, 33.5, 52.0],
}
for pair_id, values in grades.items():
    for i, grade in enumerate(values):
        body = json.dumps({"observer": f"observer-{i}", "pair": pair_id,
                           "grade": grade}).encode()
        req = urllib.request.Request(base + "/grade", data=body,
                                     headers={"Content-Type":
                                              "application/json"})
        with urllib.request.urlopen(req) as resp:
            assert resp.status == 204

# --- read the scores back ----------------------------------------------------
with urllib.request.urlopen(base + "/mos") as resp:
    scores = json.load(resp)
print(f"\n{'pair':>9} {'k':>3} {'grades':>7} {'MOS':>7}")
for entry in scores["pairs"]:
    print(f"{entry['id']:>9} {entry['k']:>3} {entry['count']:>7} "
          f"{entry['mos']:>7}")

server.shutdown()
server.server_close()
print("\nstudy directory kept at", study_dir)
