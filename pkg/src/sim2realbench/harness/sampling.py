"""Seeded one-frame-per-scenario sampling.

The generator is xorshift64* with splitmix64 seeding: 64-bit state,
next = state ^= state >> 12, <<= 25, >>= 27; output = state * M >> 32.
Implemented in-tree so the selection is reproducible across platforms
and library versions.
"""

from __future__ import annotations

from pathlib import Path

from .manifest import DatasetManifest, ManifestEntry, ManifestError

_MASK = (1 << 64) - 1
_MULT = 0x2545F4914F6CDD1D


class Xorshift64Star:
    def __init__(self, seed: int):
        # splitmix64 scramble so small seeds do not yield tiny states
        z = (seed + 0x9E3779B97F4A7C15) & _MASK
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        self.state = (z ^ (z >> 31)) or 1

    def next_u32(self) -> int:
        x = self.state
        x ^= x >> 12
        x = (x ^ (x << 25)) & _MASK
        x ^= x >> 27
        self.state = x
        return ((x * _MULT) & _MASK) >> 32

    def below(self, n: int) -> int:
        """Unbiased draw in [0, n) by rejection."""
        limit = (1 << 32) - ((1 << 32) % n)
        while True:
            v = self.next_u32()
            if v < limit:
                return v % n


IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg")


def sample_shift(scenario_root, seed: int, label_suffix: str = "_labels.png") -> DatasetManifest:
    """Pick one frame per scenario subdirectory, deterministically by seed.

    Frames are the non-label images in each scenario directory; the chosen
    frame's label is `<stem><label_suffix>` next to it.
    """
    root = Path(scenario_root)
    scenarios = sorted(p for p in root.iterdir() if p.is_dir())
    if not scenarios:
        raise ManifestError(f"{root}: no scenario subdirectories")
    rng = Xorshift64Star(seed)
    entries = []
    for scen in scenarios:
        frames = sorted(
            p for p in scen.iterdir()
            if p.suffix.lower() in IMAGE_SUFFIXES and not p.name.endswith(label_suffix)
        )
        if not frames:
            raise ManifestError(f"{scen}: scenario has no frames")
        chosen = frames[rng.below(len(frames))]
        label = chosen.with_name(chosen.stem + label_suffix)
        if not label.exists():
            raise ManifestError(f"{chosen}: missing label file {label.name}")
        entries.append(
            ManifestEntry(
                entry_id=f"{scen.name}/{chosen.stem}",
                image_path=str(chosen),
                label_path=str(label),
            )
        )
    return DatasetManifest(
        role="custom",
        entries=entries,
        taxonomy="carla",
        provenance={"sampler": "xorshift64star", "seed": seed},
    )
