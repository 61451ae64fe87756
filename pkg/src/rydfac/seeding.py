"""Deterministic seed derivation for reproducible parallel sweeps.

Every stochastic run derives its generator from
``SeedSequence([master_seed, blake2b(label), index])``, so a sweep cell is
identified by the (master seed, subcommand/label, cell index) triple and
its output is independent of worker scheduling.
"""

from __future__ import annotations

import hashlib

import numpy as np

__all__ = ["label_entropy", "seed_sequence", "rng_for", "derive_run_seed"]


def label_entropy(label: str) -> int:
    """Stable 64-bit entropy word for a textual label."""
    digest = hashlib.blake2b(label.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def seed_sequence(master_seed: int, label: str = "", index: int = 0) -> np.random.SeedSequence:
    return np.random.SeedSequence([int(master_seed) & (2**64 - 1),
                                   label_entropy(label), int(index)])


def rng_for(master_seed: int, label: str = "", index: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed_sequence(master_seed, label, index)))


def derive_run_seed(master_seed: int, label: str, index: int = 0) -> int:
    """64-bit run-level seed of one sweep cell."""
    return int(seed_sequence(master_seed, label, index).generate_state(1, np.uint64)[0])
