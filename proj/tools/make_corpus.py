#!/usr/bin/env python3
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Assemble the desk-scale training/test corpus from scikit-image sample data.

Only sample images released as CC0 or public domain are used. Training and
held-out crops come from disjoint source photographs. Output is deterministic.

    python3 tools/make_corpus.py tests/data/corpus
"""

import argparse
import pathlib

import numpy as np
from skimage import data, io

TRAIN_SOURCES = {
    # name: (loader, number of crops)
    "astronaut": (data.astronaut, 14),
    "coins": (data.coins, 8),
    "brick": (data.brick, 8),
    "grass": (data.grass, 8),
    "gravel": (data.gravel, 8),
    "rocket": (data.rocket, 12),
    "hubble": (data.hubble_deep_field, 10),
    "text": (data.text, 4),
    "clock": (data.clock, 6),
    "retina": (data.retina, 12),
    "ihc": (data.immunohistochemistry, 10),
}

TEST_SOURCES = {
    "camera": (data.camera, 4),
    "coffee": (data.coffee, 3),
    "chelsea": (data.chelsea, 3),
}


def luma(img):
    if img.ndim == 2:
        return img.astype(np.float64)
    rgb = img[..., :3].astype(np.float64)
    return 0.299 * rgb[..., 0] + 0.587 * rgb[..., 1] + 0.114 * rgb[..., 2]


def crops(img, count, size, rng, min_std=12.0, tries=4000):
    h, w = img.shape[:2]
    size = min(size, h, w)
    y = luma(img)
    out = []
    for _ in range(tries):
        if len(out) == count:
            break
        r = int(rng.integers(0, h - size + 1))
        c = int(rng.integers(0, w - size + 1))
        if y[r:r + size, c:c + size].std() < min_std:
            continue
        if any(abs(r - r0) < size // 2 and abs(c - c0) < size // 2 for r0, c0 in
               [(o[0], o[1]) for o in out]):
            continue
        out.append((r, c, img[r:r + size, c:c + size]))
    return [o[2] for o in out]


def emit(sources, outdir, size, rng):
    outdir.mkdir(parents=True, exist_ok=True)
    n = 0
    for name, (loader, count) in sources.items():
        img = loader()
        if img.ndim == 3 and img.shape[2] == 4:
            img = img[..., :3]
        for i, crop in enumerate(crops(img, count, size, rng)):
            io.imsave(outdir / f"{name}_{i:02d}.png", np.ascontiguousarray(crop),
                      check_contrast=False)
            n += 1
    return n


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("outdir", type=pathlib.Path)
    ap.add_argument("--train-size", type=int, default=128)
    ap.add_argument("--test-size", type=int, default=160)
    ap.add_argument("--seed", type=int, default=20161001)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    ntrain = emit(TRAIN_SOURCES, args.outdir / "train", args.train_size, rng)
    ntest = emit(TEST_SOURCES, args.outdir / "test", args.test_size, rng)
    print(f"wrote {ntrain} training and {ntest} held-out images to {args.outdir}")


if __name__ == "__main__":
    main()
