"""Deterministic, splittable random streams.

Every randomized routine takes an integer seed and derives its own stream
from ``(seed, label, ...)``.  ``random.Random`` seeds string inputs through
SHA-512, so streams are stable across processes and independent of
``PYTHONHASHSEED``.
"""

import random


def derive_rng(seed, *labels):
    return random.Random("/".join([str(int(seed))] + [str(x) for x in labels]))


def derive_seed(seed, *labels):
    return derive_rng(seed, *labels).getrandbits(63)
