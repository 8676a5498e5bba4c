from dataclasses import dataclass
from typing import Dict, Sequence, Tuple

import numpy as np

# payload (bpv) -> integer steps, each paired with a layer count
PRESETS: Dict[str, Tuple[int, ...]] = {
    "1.5": (0, 1),
    "3": (-1, 0, 1, 2),
    "4.5": tuple(range(-3, 5)),
    "6": tuple(range(-7, 9)),
    "table": tuple(range(-6, 7)),
}


@dataclass(frozen=True)
class ChangeSet:
    """Admissible integer steps padded to 2^Q entries; padded entries get probability 0."""
    steps: np.ndarray
    padded: np.ndarray
    q: int

    @property
    def original(self) -> np.ndarray:
        return self.steps[~self.padded]

    @property
    def size(self) -> int:
        return int(self.steps.size)


def determine_q(size: int) -> int:
    """Smallest Q with size <= 2^Q."""
    if size < 2:
        raise ValueError(f"Change set needs at least 2 entries, got {size}")
    return int(size - 1).bit_length()


def normalize_steps(steps: Sequence[int]) -> np.ndarray:
    values = sorted(set(int(s) for s in steps))
    if 0 not in values:
        raise ValueError("Change set must contain 0")
    if len(values) != len(list(steps)):
        raise ValueError("Change set has duplicate steps")
    return np.array(values, dtype=np.int64)


def pad_changeset(steps: Sequence[int], q: int = None) -> ChangeSet:
    """
    Fill every residue mod 2^Q not hit by the steps with the smallest-magnitude
    integer in that class (positive on ties).
    """
    original = normalize_steps(steps)
    q = determine_q(original.size) if q is None else q
    modulus = 1 << q
    if original.size > modulus:
        raise ValueError(f"{original.size} steps do not fit in {modulus} slots")
    residues = original % modulus
    if np.unique(residues).size != residues.size:
        raise ValueError(f"Steps collide modulo 2^{q}; layered embedding cannot separate them")
    taken = set(residues.tolist())
    fillers = []
    for r in range(modulus):
        if r in taken:
            continue
        fillers.append(r if r <= modulus - r else r - modulus)
    all_steps = np.concatenate([original, np.array(fillers, dtype=np.int64)])
    padded = np.concatenate([np.zeros(original.size, bool), np.ones(len(fillers), bool)])
    order = np.argsort(all_steps, kind="stable")
    return ChangeSet(all_steps[order], padded[order], q)


def preset_steps(alpha: float) -> Tuple[int, ...]:
    """Change set listed for the given payload, or the smallest preset that can carry it."""
    key = f"{alpha:g}"
    if key in PRESETS:
        return PRESETS[key]
    for name in ("1.5", "3", "4.5", "6"):
        if alpha <= float(name):
            return PRESETS[name]
    raise ValueError(f"No change-set preset carries {alpha} bpv; pass explicit changes")


def parse_steps(text: str) -> Tuple[int, ...]:
    """'-1,0,1,2' or a preset name."""
    text = text.strip()
    if text in PRESETS:
        return PRESETS[text]
    if ".." in text:
        lo, hi = text.split("..")
        return tuple(range(int(lo), int(hi) + 1))
    return tuple(int(t) for t in text.split(",") if t.strip())
