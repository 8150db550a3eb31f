"""Validation-set manifests.

A manifest declares one validation set: its role in the benchmark
(the real set, or a generated set from real/simulator label maps), the
files per entry, and provenance metadata (generator, prompt, seed,
resize stage).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

ROLES = ("V_i", "V_pc", "V_oc", "V_cc", "V_ps", "V_os", "V_cs", "custom")
# SHIFT-derived roles ship no panoptic ground truth
SHIFT_ROLES = ("V_ps", "V_os", "V_cs")


class ManifestError(Exception):
    pass


@dataclass(frozen=True)
class ManifestEntry:
    entry_id: str
    image_path: str
    label_path: str | None = None
    instance_path: str | None = None
    pred_sem_path: str | None = None
    pred_inst_path: str | None = None
    feature_path: str | None = None


@dataclass
class DatasetManifest:
    role: str
    entries: list[ManifestEntry]
    taxonomy: str = "cityscapes-trainid"
    resolution: tuple[int, int] = (1024, 512)
    provenance: dict = field(default_factory=dict)
    fid_feature_path: str | None = None  # one FVEC for the whole set

    def __post_init__(self):
        if self.role not in ROLES:
            raise ManifestError(f"unknown role {self.role!r}; expected one of {ROLES}")
        ids = [e.entry_id for e in self.entries]
        if len(set(ids)) != len(ids):
            raise ManifestError("duplicate entry ids")
        if self.role in SHIFT_ROLES:
            bad = [e.entry_id for e in self.entries if e.instance_path]
            if bad:
                raise ManifestError(
                    f"role {self.role}: instance_path not allowed "
                    f"(panoptic annotations not provided for SHIFT-derived roles): {bad[:3]}"
                )

    @property
    def allows_panoptic(self) -> bool:
        return self.role not in SHIFT_ROLES

    def sorted_entries(self) -> list[ManifestEntry]:
        return sorted(self.entries, key=lambda e: e.entry_id)

    def validate_files(self) -> list[str]:
        """Paths referenced but missing on disk."""
        missing = []
        for e in self.entries:
            for p in (e.image_path, e.label_path, e.instance_path,
                      e.pred_sem_path, e.pred_inst_path, e.feature_path):
                if p and not Path(p).exists():
                    missing.append(p)
        if self.fid_feature_path and not Path(self.fid_feature_path).exists():
            missing.append(self.fid_feature_path)
        return missing

    def to_dict(self) -> dict:
        return {
            "role": self.role,
            "taxonomy": self.taxonomy,
            "resolution": list(self.resolution),
            "provenance": self.provenance,
            "fid_feature_path": self.fid_feature_path,
            "entries": [
                {k: v for k, v in vars(e).items() if v is not None} for e in self.entries
            ],
        }

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")

    @classmethod
    def load(cls, path) -> "DatasetManifest":
        try:
            doc = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ManifestError(f"{path}: {exc}")
        entries = [ManifestEntry(**e) for e in doc.get("entries", [])]
        return cls(
            role=doc["role"],
            entries=entries,
            taxonomy=doc.get("taxonomy", "cityscapes-trainid"),
            resolution=tuple(doc.get("resolution", (1024, 512))),
            provenance=doc.get("provenance", {}),
            fid_feature_path=doc.get("fid_feature_path"),
        )
