"""Session fixture building the tiny TorchScript checkpoints."""

import pytest
import torch

from tinymodels import TinyEmbedder, TinyGenerator, TinyLayerNet, TinySegmenter


@pytest.fixture(scope="session")
def checkpoints(tmp_path_factory):
    root = tmp_path_factory.mktemp("ckpt")
    paths = {}
    for name, module in (
        ("embedder", TinyEmbedder()),
        ("layers", TinyLayerNet()),
        ("generator", TinyGenerator()),
        ("segmenter", TinySegmenter()),
    ):
        p = root / f"{name}.pt"
        torch.jit.script(module.eval()).save(str(p))
        paths[name] = str(p)
    return paths


