"""Adapter job configuration.

A job is a JSON file naming the work kind, the input manifest, the output
directory, and the checkpoint to run. Checkpoints are TorchScript files
referenced by path; a missing checkpoint is always a hard error, never a
silent substitution.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

KINDS = ("fid_features", "lpips_features", "generate", "segment")
DEFAULT_PROMPT = "A realistic driving scene"


class AdapterError(Exception):
    pass


@dataclass(frozen=True)
class AdapterJob:
    kind: str
    manifest: str
    out_dir: str
    model: str
    prompt: str = DEFAULT_PROMPT
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise AdapterError(f"unknown job kind {self.kind!r}; expected one of {KINDS}")

    @classmethod
    def load(cls, path) -> "AdapterJob":
        try:
            doc = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise AdapterError(f"{path}: {exc}")
        known = {"kind", "manifest", "out_dir", "model", "prompt", "seed"}
        extra = set(doc) - known
        if extra:
            raise AdapterError(f"{path}: unknown job fields {sorted(extra)}")
        missing = {"kind", "manifest", "out_dir", "model"} - set(doc)
        if missing:
            raise AdapterError(f"{path}: missing job fields {sorted(missing)}")
        return cls(**doc)


def manifest_entries(manifest_path) -> list[dict]:
    """Entries of a dataset manifest JSON, in file order."""
    try:
        doc = json.loads(Path(manifest_path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise AdapterError(f"{manifest_path}: {exc}")
    entries = doc.get("entries", [])
    if not isinstance(entries, list):
        raise AdapterError(f"{manifest_path}: entries must be a list")
    return entries


def load_checkpoint(path):
    """Load a TorchScript checkpoint in deterministic eval mode."""
    import torch

    p = Path(path)
    if not p.exists():
        raise AdapterError(
            f"checkpoint {p} not found; download or export the model and pass "
            f"its path in the job config (models are never substituted)"
        )
    try:
        model = torch.jit.load(str(p), map_location="cpu")
    except Exception as exc:
        raise AdapterError(f"checkpoint {p}: failed to load TorchScript: {exc}")
    model.eval()
    return model
