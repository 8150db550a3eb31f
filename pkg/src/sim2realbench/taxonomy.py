"""Class taxonomies and label-map conversion.

Taxonomies and inter-taxonomy mappings are data (JSON), not code: the
package ships the Cityscapes 19-class trainId taxonomy, the CARLA
semantic-camera taxonomy, and a versioned CARLA->trainId mapping, but any
simulator can be plugged in via config files of the same shape.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .imgcore import ImageBuffer

DEFAULT_IGNORE_ID = 255


class TaxonomyError(Exception):
    pass


@dataclass(frozen=True)
class ClassDef:
    id: int
    name: str
    color: tuple[int, int, int]
    ignore_in_eval: bool = False


@dataclass(frozen=True)
class Taxonomy:
    name: str
    classes: tuple[ClassDef, ...]
    ignore_id: int = DEFAULT_IGNORE_ID

    def __post_init__(self):
        ids = [c.id for c in self.classes]
        if len(set(ids)) != len(ids):
            raise TaxonomyError(f"{self.name}: duplicate class ids")
        colors = [c.color for c in self.classes]
        if len(set(colors)) != len(colors):
            raise TaxonomyError(f"{self.name}: duplicate class colors")
        if any(c.id == self.ignore_id and not c.ignore_in_eval for c in self.classes):
            raise TaxonomyError(f"{self.name}: ignore_id {self.ignore_id} used by a class")

    @property
    def ids(self) -> frozenset[int]:
        return frozenset(c.id for c in self.classes)

    def eval_ids(self) -> list[int]:
        return [c.id for c in self.classes if not c.ignore_in_eval]


@dataclass(frozen=True)
class TaxonomyMapping:
    source: str
    target: str
    pairs: dict[int, int] = field(hash=False)

    def validate(self, src: Taxonomy, dst: Taxonomy) -> None:
        missing = src.ids - set(self.pairs)
        if missing:
            raise TaxonomyError(f"mapping {self.source}->{self.target} misses source ids {sorted(missing)}")
        bad = {t for t in self.pairs.values() if t not in dst.ids and t != dst.ignore_id}
        if bad:
            raise TaxonomyError(f"mapping {self.source}->{self.target} has unknown target ids {sorted(bad)}")


@dataclass(frozen=True)
class LabelMap:
    width: int
    height: int
    taxonomy: str
    ids: np.ndarray  # (height, width) integer class ids

    @classmethod
    def from_array(cls, ids: np.ndarray, taxonomy: str) -> "LabelMap":
        a = np.ascontiguousarray(ids, dtype=np.int64)
        if a.ndim != 2:
            raise TaxonomyError(f"label map must be 2-D, got shape {ids.shape}")
        return cls(width=a.shape[1], height=a.shape[0], taxonomy=taxonomy, ids=a)


# ---------------------------------------------------------------------------
# config I/O

def taxonomy_from_dict(d: dict) -> Taxonomy:
    classes = tuple(
        ClassDef(
            id=int(c["id"]),
            name=str(c["name"]),
            color=tuple(int(v) for v in c["color"]),
            ignore_in_eval=bool(c.get("ignore_in_eval", False)),
        )
        for c in d["classes"]
    )
    return Taxonomy(name=d["name"], classes=classes, ignore_id=int(d.get("ignore_id", DEFAULT_IGNORE_ID)))


def mapping_from_dict(d: dict) -> TaxonomyMapping:
    return TaxonomyMapping(
        source=d["source"],
        target=d["target"],
        pairs={int(k): int(v) for k, v in d["pairs"].items()},
    )


def load_taxonomy(path) -> Taxonomy:
    return taxonomy_from_dict(json.loads(Path(path).read_text()))


def load_mapping(path) -> TaxonomyMapping:
    return mapping_from_dict(json.loads(Path(path).read_text()))


def _builtin(name: str) -> dict:
    return json.loads(resources.files("sim2realbench.data").joinpath(name).read_text())


def builtin_taxonomy(name: str) -> Taxonomy:
    """Shipped taxonomies: 'cityscapes-trainid', 'carla'."""
    files = {"cityscapes-trainid": "cityscapes_trainid.json", "carla": "carla.json"}
    if name not in files:
        raise TaxonomyError(f"no builtin taxonomy {name!r}")
    return taxonomy_from_dict(_builtin(files[name]))


def builtin_mapping(source: str, target: str) -> TaxonomyMapping:
    if (source, target) != ("carla", "cityscapes-trainid"):
        raise TaxonomyError(f"no builtin mapping {source}->{target}")
    return mapping_from_dict(_builtin("carla_to_cityscapes_trainid.json"))


# ---------------------------------------------------------------------------
# conversions

def decode_simulator_labels(raw: ImageBuffer, tax: Taxonomy) -> LabelMap:
    """Read class ids from the red channel of a simulator RGB label frame."""
    if raw.channels != 3:
        raise TaxonomyError(f"simulator label frame must be RGB, got {raw.channels} channels")
    red = np.rint(raw.data[:, :, 0]).astype(np.int64)
    valid = tax.ids | {tax.ignore_id}
    present = np.unique(red)
    unknown = [int(v) for v in present if int(v) not in valid]
    if unknown:
        counts = ", ".join(
            f"unknown simulator class {v} ({int((red == v).sum())} px)" for v in unknown
        )
        raise TaxonomyError(counts)
    return LabelMap.from_array(red, tax.name)


def apply_mapping(lm: LabelMap, m: TaxonomyMapping, target: Taxonomy) -> LabelMap:
    """Per-pixel id substitution into the target taxonomy."""
    if lm.taxonomy != m.source:
        raise TaxonomyError(f"label map is {lm.taxonomy!r}, mapping expects {m.source!r}")
    lut = np.full(max(int(lm.ids.max(initial=0)), max(m.pairs, default=0), target.ignore_id) + 1,
                  target.ignore_id, dtype=np.int64)
    for s, t in m.pairs.items():
        if s < lut.size:
            lut[s] = t
    lut[min(target.ignore_id, lut.size - 1)] = target.ignore_id
    return LabelMap.from_array(lut[lm.ids], m.target)


def encode_color(lm: LabelMap, tax: Taxonomy) -> ImageBuffer:
    """Paint each pixel with its class color; ignore pixels become black."""
    lut = np.zeros((max([tax.ignore_id] + [c.id for c in tax.classes]) + 1, 3))
    for c in tax.classes:
        lut[c.id] = c.color
    return ImageBuffer.from_array(lut[lm.ids])


def decode_color(img: ImageBuffer, tax: Taxonomy) -> LabelMap:
    """Inverse of encode_color; unknown colors are an error."""
    if img.channels != 3:
        raise TaxonomyError("color label map must be RGB")
    rgb = np.rint(img.data).astype(np.int64)
    packed = (rgb[:, :, 0] << 16) | (rgb[:, :, 1] << 8) | rgb[:, :, 2]
    table = {(c.color[0] << 16) | (c.color[1] << 8) | c.color[2]: c.id for c in tax.classes}
    table.setdefault(0, tax.ignore_id)  # black = ignore unless a class claims it
    out = np.empty_like(packed)
    unknown = []
    for v in np.unique(packed):
        key = int(v)
        if key in table:
            out[packed == v] = table[key]
        else:
            r, g, b = (key >> 16) & 255, (key >> 8) & 255, key & 255
            unknown.append(f"unknown color ({r},{g},{b}) ({int((packed == v).sum())} px)")
    if unknown:
        raise TaxonomyError("; ".join(unknown))
    return LabelMap.from_array(out, tax.name)
