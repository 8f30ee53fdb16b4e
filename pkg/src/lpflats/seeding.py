"""Deterministic, platform-stable derivation of child seeds.

Python's builtin hash is salted per process, so child seeds are produced
by hashing the base seed and indices with blake2b instead.  Identical
inputs give identical seeds on every platform and run.
"""

from __future__ import annotations

import hashlib


def derive_seed(base: int, *indices: int) -> int:
    """A 63-bit seed determined by (base, *indices)."""
    text = ":".join(str(int(v)) for v in (base, *indices))
    digest = hashlib.blake2b(text.encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big") >> 1
