import random

import pytest

from tausync.text import PackedText


def make_text(rng: random.Random, n: int, sigma: int, kind: str) -> list[int]:
    """Corpus text generators: random, periodic, run-heavy, adversarial."""
    sigma = max(1, min(sigma, max(1, n)))
    if kind == "random":
        return [rng.randrange(sigma) for _ in range(n)]
    if kind == "periodic":
        base = [rng.randrange(sigma) for _ in range(rng.randint(1, 5))]
        return (base * (n // len(base) + 1))[:n]
    if kind == "rle":
        out: list[int] = []
        while len(out) < n:
            out.extend([rng.randrange(sigma)] * rng.randint(1, 9))
        return out[:n]
    raise ValueError(kind)


def adversarial_text(rng: random.Random, tau: int, blocks: int) -> tuple[list[int], list[int]]:
    """Planted-offset family: block i is 0^(2*tau+s-1) 1 0^(tau-s)."""
    planted = [rng.randrange(tau) for _ in range(blocks)]
    out: list[int] = []
    for s in planted:
        out.extend([0] * (2 * tau + s - 1))
        out.append(1)
        out.extend([0] * (tau - s))
    return out, planted


@pytest.fixture
def rng():
    return random.Random(0xC0FFEE)


def packed(symbols, sigma, **kw) -> PackedText:
    return PackedText(symbols, sigma, **kw)
