from math import gcd

import pytest

from conftest import make_text
from tausync.errors import InvalidArgument
from tausync.oracle import brute_all_runs, brute_period, brute_runs
from tausync import runs as rn
from tausync.text import PackedText


def test_period_examples():
    t = PackedText([0, 1, 0, 1, 0, 1], 2)
    assert rn.period(t, 0, 6) == 2
    t2 = PackedText([0, 1, 2], 3)
    assert rn.period(t2, 0, 3) == 3
    with pytest.raises(InvalidArgument):
        rn.period(t, 3, 3)


def test_period_matches_brute(rng):
    for _ in range(40):
        n = rng.randint(1, 60)
        syms = make_text(rng, n, rng.choice([1, 2, 3]), "random")
        t = PackedText(syms, 3)
        for _ in range(10):
            i = rng.randrange(n)
            j = rng.randint(i + 1, n)
            assert rn.period(t, i, j) == brute_period(syms[i:j])


def test_run_extend_examples():
    t = PackedText([0, 0, 1, 0, 0], 2)
    assert rn.run_extend(t, 0, 2) == rn.Run(0, 2, 1)
    t2 = PackedText([0, 1, 0, 1, 0, 1, 0], 2)
    assert rn.run_extend(t2, 1, 5) == rn.Run(0, 7, 2)
    t3 = PackedText([0, 1, 2], 3)
    assert rn.run_extend(t3, 0, 3) is None


def test_lce_providers_agree(rng):
    for sigma in (2, 4, 150):
        syms = make_text(rng, 70, sigma, "rle")
        t = PackedText(syms, sigma)
        direct = rn.DirectLce(t)
        packed = rn.PackedLce(t)
        for _ in range(150):
            a, b = rng.randrange(t.n), rng.randrange(t.n)
            assert direct.lce(a, b) == packed.lce(a, b)
            assert direct.lce_back(a, b) == packed.lce_back(a, b)


def test_enumerate_runs_p0_empty():
    t = PackedText([0, 0, 0, 0], 1)
    assert rn.enumerate_runs(t, 0, 0) == []


def test_enumerate_runs_uniform_text():
    n = 40
    t = PackedText([0] * n, 1)
    got = rn.enumerate_runs(t, n, n // 2)
    assert [(r.start, r.end, r.period) for r in got] == [(0, n, 1)]


def test_enumerate_requires_ell_ge_2p():
    t = PackedText([0, 1] * 8, 2)
    with pytest.raises(InvalidArgument):
        rn.enumerate_runs(t, 3, 2)


def test_enumerate_matches_brute(rng):
    for _ in range(50):
        n = rng.randint(1, 70)
        sigma = rng.choice([1, 2, 3, 4])
        syms = make_text(rng, n, sigma, rng.choice(["random", "periodic", "rle"]))
        t = PackedText(syms, max(1, sigma))
        lce = rn.PackedLce(t)
        for _ in range(6):
            p = rng.randint(0, n // 2)
            ell = rng.randint(max(2 * p, 1), n + 1)
            got = [(r.start, r.end, r.period)
                   for r in rn.enumerate_runs(t, ell, p, lce)]
            assert got == brute_runs(syms, ell, p)
            for a, b in zip(got, got[1:]):
                assert a[0] < b[0] and a[1] < b[1]


def test_overlap_fact_on_all_runs(rng):
    syms = make_text(rng, 80, 2, "rle")
    runs = brute_all_runs(syms)
    for i, (b1, e1, p1) in enumerate(runs):
        for b2, e2, p2 in runs[i + 1:]:
            inter = min(e1, e2) - max(b1, b2)
            if inter > 0:
                assert inter < p1 + p2 - gcd(p1, p2)


def test_runs_bitmask_zero_period():
    t = PackedText([0, 1] * 10, 2)
    mask = rn.runs_bitmask(t, 4, 0)
    assert mask.to01() == "0" * 17


def test_runs_bitmask_interval_equivalence(rng):
    """Maximal all-one intervals [b..e-ell] correspond exactly to the runs."""
    for _ in range(20):
        n = rng.randint(4, 80)
        syms = make_text(rng, n, 2, rng.choice(["periodic", "rle"]))
        t = PackedText(syms, 2)
        p = rng.randint(1, max(1, n // 4))
        ell = rng.randint(2 * p, n)
        mask = rn.runs_bitmask(t, ell, p)
        bits = [mask.get_bit(i) for i in range(n - ell + 1)]
        intervals = []
        i = 0
        while i < len(bits):
            if bits[i]:
                j = i
                while j + 1 < len(bits) and bits[j + 1]:
                    j += 1
                intervals.append((i, j + ell))
                i = j + 1
            i += 1
        got = [(r.start, r.end) for r in rn.enumerate_runs(t, ell, p)]
        assert intervals == got


def test_runs_bitmask_matches_periods(rng):
    for _ in range(25):
        n = rng.randint(1, 60)
        syms = make_text(rng, n, 2, "random")
        t = PackedText(syms, 2, table_n=rng.choice([1 << 4, 1 << 16, 1 << 24]))
        p = rng.randint(1, max(1, n // 2))
        ell = rng.randint(p + 1, n + 1)
        if ell > n:
            continue
        mask = rn.runs_bitmask(t, ell, p)
        for i in range(n - ell + 1):
            assert mask.get_bit(i) == (brute_period(syms[i:i + ell]) <= p)


def test_runs_bitmask_packed_table_path():
    # wide table budget routes short windows through the dictionary scan
    syms = [0, 0, 1, 0, 0, 1, 0, 0, 0, 1] * 6
    t = PackedText(syms, 2, table_n=1 << 24)
    mask = rn.runs_bitmask(t, 6, 3)
    for i in range(t.n - 6 + 1):
        assert mask.get_bit(i) == (brute_period(syms[i:i + 6]) <= 3)


def test_tau_runs_wrapper():
    syms = [0] * 30
    t = PackedText(syms, 1)
    assert rn.runs_tau(t, 9) == rn.enumerate_runs(t, 9, 3)
    assert rn.runs_tau(t, 2) == []  # period bound 0
