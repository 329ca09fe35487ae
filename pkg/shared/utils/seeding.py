"""
Splittable seeds: every random stream in a run derives from one root seed
and a path of labels, so streams never depend on call order.
"""
import hashlib
from typing import Union

import numpy as np

Label = Union[str, int]


def _label_word(label: Label) -> int:
    if isinstance(label, int):
        return label & 0xFFFFFFFF
    digest = hashlib.blake2b(label.encode("utf-8"), digest_size=4).digest()
    return int.from_bytes(digest, "little")


def seed_sequence(root: int, *labels: Label) -> np.random.SeedSequence:
    return np.random.SeedSequence(
        entropy=root, spawn_key=tuple(_label_word(label) for label in labels)
    )


def derive_seed(root: int, *labels: Label) -> int:
    """63-bit integer seed, usable by numpy and torch alike"""
    high, low = seed_sequence(root, *labels).generate_state(2, dtype=np.uint32)
    return ((int(high) << 32) | int(low)) & 0x7FFFFFFFFFFFFFFF


def derive_rng(root: int, *labels: Label) -> np.random.Generator:
    return np.random.default_rng(seed_sequence(root, *labels))
