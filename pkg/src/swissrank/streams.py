"""Deterministic random-stream derivation.

Parallel simulation wants one independent stream per instance, addressable
by (root seed, instance index) alone so that results do not depend on which
worker ran which chunk. Streams are derived counter-style: the root seed and
the index path are hashed with SHA-256 and the digest seeds a stdlib
Mersenne Twister. Identical (seed, path) pairs always yield identical
streams, on any platform, in any process.
"""

from __future__ import annotations

import hashlib
import random

MAX_SEED = 2**64 - 1

_NAMESPACE = b"swissrank.stream.v1"


def _digest(root_seed: int, path: tuple[int | str, ...]) -> bytes:
    parts = [_NAMESPACE, root_seed.to_bytes(8, "little")]
    for part in path:
        if isinstance(part, int):
            parts.append(b"i")
            parts.append(part.to_bytes(8, "little"))
        else:
            encoded = part.encode("utf-8")
            parts.append(b"s")
            parts.append(len(encoded).to_bytes(4, "little"))
            parts.append(encoded)
    return hashlib.sha256(b"".join(parts)).digest()


def check_seed(seed: int) -> int:
    if not isinstance(seed, int) or not 0 <= seed <= MAX_SEED:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed!r}")
    return seed


def derive_seed(root_seed: int, *path: int | str) -> int:
    """Derive a child 64-bit seed from a root seed and an index path."""
    return int.from_bytes(_digest(check_seed(root_seed), path)[:8], "little")


def stream_state(root_seed: int, *path: int | str) -> int:
    """128-bit generator state for (root seed, path); feed to Random.seed."""
    return int.from_bytes(_digest(check_seed(root_seed), path)[:16], "little")


def derive_rng(root_seed: int, *path: int | str) -> random.Random:
    """Return an independent random stream for (root seed, path).

    Re-seeding an existing generator with :func:`stream_state` yields the
    identical stream; hot loops use that form to skip per-instance
    allocation.
    """
    return random.Random(stream_state(root_seed, *path))
