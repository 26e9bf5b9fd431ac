"""Synthetic documents for benchmarks.

All generators are deterministic in ``seed`` and return exactly ``n`` bytes.
"""

import random

_WORD = b"abcdefghijklmnopqrstuvwxyz"


def _word(rng, lo, hi):
    return bytes(rng.choice(_WORD) for _ in range(rng.randint(lo, hi)))


def email_document(n: int, seed: int = 0, density: float = 0.01) -> bytes:
    """Space-separated words with email-like tokens planted at ``density`` per byte."""
    rng = random.Random(seed)
    out = bytearray()
    next_email = rng.expovariate(density) if density > 0 else float("inf")
    while len(out) < n:
        if out:
            out.append(0x20)
        if len(out) >= next_email:
            out += _word(rng, 2, 8) + b"@" + _word(rng, 2, 8)
            next_email = len(out) + rng.expovariate(density)
        else:
            out += _word(rng, 1, 9)
    del out[n:]
    return bytes(out)


def uniform_document(n: int, seed: int = 0, alphabet: bytes = _WORD + b" ") -> bytes:
    """Independent uniform bytes from ``alphabet`` (no '@' by default, so no emails)."""
    rng = random.Random(seed)
    return bytes(rng.choice(alphabet) for _ in range(n))


def adversarial_document(n: int, seed: int = 0, token: int = 2000) -> bytes:
    """Very long tokens with a rare email, so most levels carry no marker at all."""
    rng = random.Random(seed)
    out = bytearray()
    while len(out) < n:
        if out:
            out.append(0x20)
        if rng.random() < 0.1:
            half = max(1, token // 2)
            out += b"a" * half + b"@" + b"b" * half
        else:
            out += b"a" * token
    del out[n:]
    return bytes(out)


GENERATORS = {
    "email": email_document,
    "uniform": uniform_document,
    "adversarial": adversarial_document,
}
