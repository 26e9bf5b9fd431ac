"""Scaling measurements: preprocessing cost and output delay against document size."""

import time
from typing import NamedTuple

from .generators import GENERATORS
from .pipeline import prepare
from .samples import EMAIL_PATTERN


class BenchRecord(NamedTuple):
    n: int
    preprocessing_steps: int
    outputs: int
    max_delay_steps: int
    peak_stack: int
    peak_memory_words: int
    preprocessing_seconds: float
    enumeration_seconds: float


def run_bench(pattern=EMAIL_PATTERN, sizes=(10**4, 10**5), generator="email", seed=0,
              mode="auto", **generator_options) -> list:
    """One :class:`BenchRecord` per size, sorted by size."""
    if generator not in GENERATORS:
        raise ValueError(f"unknown generator {generator!r}; choose from {sorted(GENERATORS)}")
    make = GENERATORS[generator]
    records = []
    for n in sorted(sizes):
        if n < 0:
            raise ValueError("sizes must be nonnegative")
        doc = make(n, seed=seed, **generator_options)
        prep = prepare(pattern, doc, mode=mode)
        stream = prep.enumerate()
        start = time.perf_counter()
        for _ in stream:
            pass
        elapsed = time.perf_counter() - start
        records.append(BenchRecord(
            n=n,
            preprocessing_steps=prep.preprocessing_steps,
            outputs=stream.outputs,
            max_delay_steps=stream.max_delay,
            peak_stack=stream.peak_stack,
            peak_memory_words=stream.peak_memory,
            preprocessing_seconds=round(prep.seconds, 4),
            enumeration_seconds=round(elapsed, 4),
        ))
    return records


def linear_fit(xs, ys):
    """Least-squares ``(a, b)`` for ``y = a*x + b`` and the relative residual at each point."""
    n = len(xs)
    mx = sum(xs) / n
    my = sum(ys) / n
    sxx = sum((x - mx) ** 2 for x in xs)
    a = sum((x - mx) * (y - my) for x, y in zip(xs, ys)) / sxx if sxx else 0.0
    b = my - a * mx
    residuals = [abs(y - (a * x + b)) / abs(y) if y else 0.0 for x, y in zip(xs, ys)]
    return a, b, residuals
