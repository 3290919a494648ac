"""Counter-keyed random streams for reproducible (and parallel) sampling.

Every random draw in a study comes from its own Philox generator whose
256-bit key packs (master_seed, domain, index, subindex).  Streams are
therefore a pure function of those integers: the same key yields the same
draws no matter which thread, process, or iteration order consumed it, and
distinct keys yield non-overlapping streams.

Domains separate the independent uses so, e.g., the 3rd alternative
distribution and the 3rd null distribution never share a stream.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "DOMAIN_DIRICHLET",
    "DOMAIN_TABLE",
    "DOMAIN_NULL_MARGINS",
    "DOMAIN_NULL_TABLE",
    "substream_key",
    "substream_generator",
]

DOMAIN_DIRICHLET = 1  # alternative-distribution draws
DOMAIN_TABLE = 2  # multinomial replicates under an alternative
DOMAIN_NULL_MARGINS = 3  # margin draws for the null-calibration batch
DOMAIN_NULL_TABLE = 4  # multinomial replicates under a null

_MAX_SEED = 2**64
_MAX_DOMAIN = 2**8
_MAX_INDEX = 2**24
_MAX_SUBINDEX = 2**32


def substream_key(master_seed: int, domain: int, index: int, subindex: int = 0) -> tuple[int, int]:
    """Pack (seed, domain, index, subindex) into a 2x64-bit Philox key."""
    if not 0 <= master_seed < _MAX_SEED:
        raise ValueError(f"master_seed must be a 64-bit unsigned integer, got {master_seed}")
    if not 0 <= domain < _MAX_DOMAIN:
        raise ValueError(f"domain must be in [0, {_MAX_DOMAIN}), got {domain}")
    if not 0 <= index < _MAX_INDEX:
        raise ValueError(f"index must be in [0, {_MAX_INDEX}), got {index}")
    if not 0 <= subindex < _MAX_SUBINDEX:
        raise ValueError(f"subindex must be in [0, {_MAX_SUBINDEX}), got {subindex}")
    return (master_seed, (domain << 56) | (index << 32) | subindex)


def substream_generator(
    master_seed: int, domain: int, index: int, subindex: int = 0
) -> np.random.Generator:
    """Fresh generator for the given key; identical keys replay identically."""
    return np.random.Generator(np.random.Philox(key=substream_key(master_seed, domain, index, subindex)))
