"""Shared corpus and bookkeeping for the test suite."""

from __future__ import annotations

import functools
import time

from rectbar import fixture_h_sphere, fixture_heart_circle, fixture_torus, random_complex

FIXTURES = {
    "torus": fixture_torus,
    "heart": fixture_heart_circle,
    "h_sphere": fixture_h_sphere,
}

# one line per acceptance criterion, filled in as the tests run
RESULTS = {}


def corpus_params(seed: int):
    """Sizes for the seeded random corpus: up to 12 generators in up to 4
    degrees, with every fifth complex drawn with repeated values."""
    return dict(n_generators=4 + seed % 9, n_degrees=1 + seed % 4, ties=seed % 5 == 0)


@functools.lru_cache(maxsize=None)
def corpus(n: int):
    return tuple(random_complex(s, **corpus_params(s)) for s in range(n))


def fixtures():
    return [(name, make()) for name, make in FIXTURES.items()]


def criterion(number: int, title: str):
    """Record PASS/FAIL and wall time of an acceptance test."""

    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            t0 = time.perf_counter()
            try:
                fn(*args, **kwargs)
            except BaseException:
                RESULTS[number] = ("FAIL", title, time.perf_counter() - t0)
                raise
            RESULTS[number] = ("PASS", title, time.perf_counter() - t0)

        return run

    return wrap
