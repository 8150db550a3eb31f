"""Tiny TorchScript model definitions and manifest writers for the tests.

The models are real scripted networks with deterministically seeded
weights, small enough to build on the fly; they stand in for the large
embedding, feature, generator, and segmentation checkpoints that the
adapters reference by path in production.
"""

import json

import numpy as np
import torch
from torch import nn

from s2radapters.formats import save_image_png, save_trainid_png


class TinyEmbedder(nn.Module):
    def __init__(self):
        super().__init__()
        torch.manual_seed(0)
        self.pool = nn.AdaptiveAvgPool2d(8)
        self.proj = nn.Linear(3 * 8 * 8, 2048)

    def forward(self, x):
        return self.proj(self.pool(x).flatten(1))


class TinyLayerNet(nn.Module):
    def __init__(self):
        super().__init__()
        torch.manual_seed(1)
        self.c1 = nn.Conv2d(3, 4, 3, stride=2, padding=1)
        self.c2 = nn.Conv2d(4, 8, 3, stride=2, padding=1)

    def forward(self, x):
        a = torch.relu(self.c1(x))
        b = torch.relu(self.c2(a))
        return a, b


class TinyGenerator(nn.Module):
    def forward(self, labels, noise):
        x = labels / 18.0
        rgb = torch.cat([x, 1.0 - x, 0.5 + 0.1 * noise], dim=1)
        out = nn.functional.interpolate(
            rgb, size=(512, 1024), mode="bilinear", align_corners=False
        )
        return out.clamp(0.0, 1.0)


class TinySegmenter(nn.Module):
    def __init__(self):
        super().__init__()
        torch.manual_seed(2)
        self.head = nn.Conv2d(3, 19, 3, padding=1)

    def forward(self, x):
        logits = self.head(x)
        h, w = x.shape[2], x.shape[3]
        cols = torch.arange(w).unsqueeze(0).expand(h, w)
        inst = (cols * 2 // w + 1).to(torch.int64).unsqueeze(0)
        return logits, inst


def write_image_manifest(root, n=4, size=(48, 32), corrupt=None):
    """n photographic PNGs plus a manifest listing them in order."""
    w, h = size
    entries = []
    for i in range(n):
        rs = np.random.RandomState(100 + i)
        rgb = rs.rand(h, w, 3)
        path = root / f"img{i}.png"
        save_image_png(path, rgb)
        if corrupt == i:
            path.write_bytes(b"not a png")
        entries.append({"entry_id": f"img{i}", "image_path": str(path)})
    mpath = root / "manifest.json"
    mpath.write_text(json.dumps({"role": "custom", "entries": entries}, indent=2))
    return mpath


def write_label_manifest(root, n=3, size=(64, 32), corrupt=None):
    """n trainId label maps plus a manifest referencing them."""
    w, h = size
    entries = []
    for i in range(n):
        rs = np.random.RandomState(200 + i)
        ids = rs.choice([0, 1, 8, 11, 13], size=(h, w))
        path = root / f"lab{i}.png"
        save_trainid_png(path, ids)
        if corrupt == i:
            path.write_bytes(b"broken")
        entries.append(
            {"entry_id": f"lab{i}", "image_path": str(path), "label_path": str(path)}
        )
    mpath = root / "labels.json"
    mpath.write_text(json.dumps({"role": "custom", "entries": entries}, indent=2))
    return mpath
