"""Deterministic evaluation-pair sampling.

The generator is part of the external contract so that any implementation
reproduces pair lists bit-exactly. It is the splitmix64 stream:

    state <- (state + 0x9E3779B97F4A7C15) mod 2^64
    z <- state
    z <- ((z XOR (z >> 30)) * 0xBF58476D1CE4E5B9) mod 2^64
    z <- ((z XOR (z >> 27)) * 0x94D049BB133111EB) mod 2^64
    output <- z XOR (z >> 31)

Bounded draws in [0, m) use rejection: draw 64-bit words until
``u < 2^64 - (2^64 mod m)`` and return ``u mod m``.

Each evaluation pair is drawn by picking a clothing id uniformly (ids
ordered by first appearance in the manifest), then two distinct frames of
it: source index ``i`` in [0, k), then ``j`` in [0, k-1) with ``j += 1``
whenever ``j >= i``. A drawn clothing id with fewer than two frames is
discarded and the draw repeats.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

__all__ = [
    "SplitMix64",
    "EvalEntry",
    "EvalManifest",
    "load_manifest",
    "save_manifest",
    "sample_eval_pairs",
]

_MASK64 = (1 << 64) - 1


class SplitMix64:
    """The documented 64-bit splitmix stream; see the module docstring."""

    def __init__(self, seed: int):
        if not 0 <= seed <= _MASK64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        self._state = seed

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def next_below(self, bound: int) -> int:
        """Uniform integer in [0, bound) via rejection sampling."""
        if bound < 1:
            raise ValueError("bound must be >= 1")
        limit = 2**64 - (2**64 % bound)
        while True:
            u = self.next_u64()
            if u < limit:
                return u % bound


@dataclass(frozen=True)
class EvalEntry:
    """One evaluation frame: ids plus the file paths backing it."""

    subject: str
    clothing: str
    frame: str
    pose_path: str = ""
    image_path: str = ""

    def __post_init__(self):
        for field_name in ("subject", "clothing", "frame"):
            value = getattr(self, field_name)
            if not isinstance(value, str) or not value:
                raise ValueError(f"entry {field_name} must be a non-empty string")


@dataclass(frozen=True)
class EvalManifest:
    """The frames available for evaluation plus the sampling seed."""

    entries: tuple[EvalEntry, ...]
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        if not self.entries:
            raise ValueError("manifest has no entries")
        if not 0 <= self.seed <= _MASK64:
            raise ValueError("seed must be an unsigned 64-bit integer")


def load_manifest(blob) -> EvalManifest:
    if isinstance(blob, bytes):
        blob = blob.decode("utf-8")
    obj = json.loads(blob)
    if not isinstance(obj, dict) or not isinstance(obj.get("entries"), list):
        raise ValueError('manifest JSON needs an "entries" list')
    entries = tuple(
        EvalEntry(
            subject=str(e["subject"]),
            clothing=str(e["clothing"]),
            frame=str(e["frame"]),
            pose_path=str(e.get("pose", "")),
            image_path=str(e.get("image", "")),
        )
        for e in obj["entries"]
    )
    return EvalManifest(entries, int(obj.get("seed", 0)))


def _entry_json(e: EvalEntry) -> dict:
    return {
        "subject": e.subject,
        "clothing": e.clothing,
        "frame": e.frame,
        "pose": e.pose_path,
        "image": e.image_path,
    }


def save_manifest(manifest: EvalManifest) -> bytes:
    obj = {
        "seed": manifest.seed,
        "entries": [_entry_json(e) for e in manifest.entries],
    }
    return json.dumps(obj).encode("utf-8")


def sample_eval_pairs(
    manifest: EvalManifest, n: int = 10000, seed: int | None = None
) -> list[tuple[EvalEntry, EvalEntry]]:
    """Draw ``n`` (source, target) frame pairs, reproducibly.

    Same manifest + same seed gives the same pair list. Raises when no
    clothing id has at least two frames.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    groups: dict[str, list[EvalEntry]] = {}
    for entry in manifest.entries:
        groups.setdefault(entry.clothing, []).append(entry)
    keys = list(groups)
    if max(len(v) for v in groups.values()) < 2:
        raise ValueError("no clothing id has two or more frames")
    rng = SplitMix64(manifest.seed if seed is None else seed)
    pairs = []
    while len(pairs) < n:
        frames = groups[keys[rng.next_below(len(keys))]]
        if len(frames) < 2:
            continue
        i = rng.next_below(len(frames))
        j = rng.next_below(len(frames) - 1)
        if j >= i:
            j += 1
        pairs.append((frames[i], frames[j]))
    return pairs
