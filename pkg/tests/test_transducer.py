import random

import pytest

from tausync.errors import InvalidArgument
from tausync.oracle import run_reference_by_runs, run_reference_transducer
from tausync import sparsecodec as sc
from tausync import transducer as td


def random_spec(rng, q, sigma, arity=1):
    memo = {}
    seed = rng.randrange(1 << 30)

    def delta(state, *xs):
        key = (state,) + xs
        if key not in memo:
            r = random.Random((seed, key).__hash__())
            memo[key] = (r.randrange(q), r.randrange(sigma))
        return memo[key]

    return td.TransducerSpec(q, rng.randrange(q), arity, delta)


def random_input(rng, n, sigma, zero_bias=0.55):
    vals = []
    while len(vals) < n:
        if rng.random() < zero_bias:
            vals.extend([0] * rng.randint(1, 25))
        else:
            vals.append(rng.randint(1, sigma - 1) if sigma > 1 else 0)
    return vals[:n]


def test_run_naive_examples():
    dec = td.TransducerSpec(1, 0, 1, lambda s, x: (0, max(0, x - 1)))
    assert td.run_naive(dec, [[2, 0, 1]]) == [1, 0, 0]
    ident = td.TransducerSpec(1, 0, 1, lambda s, x: (0, x))
    assert td.run_naive(ident, [[4, 0, 9]]) == [4, 0, 9]
    assert td.run_naive(ident, [[]]) == []
    with pytest.raises(InvalidArgument):
        td.run_naive(ident, [[1], [2]])


def test_jump_path():
    js = td.jump_structure([1, 2, None])
    assert js.jump(0, 2) == 2
    assert js.jump(0, 3) is None
    assert js.furthest(0) == 2


def test_jump_cycle():
    js = td.jump_structure([1, 2, 0])
    for v in range(3):
        assert js.furthest(v) == td.JumpStructure.INF
    assert js.jump(1, 10 ** 9) == (1 + 10 ** 9) % 3


def test_jump_random_vs_walk(rng):
    for _ in range(120):
        q = rng.randint(1, 10)
        succ = [rng.choice([None] + list(range(q))) for _ in range(q)]
        js = td.jump_structure(succ)
        for v in range(q):
            u = v
            for d in range(25):
                assert js.jump(v, d) == u
                if succ[u] is None:
                    assert js.furthest(v) == d
                    assert js.jump(v, d + 1) is None
                    break
                u = succ[u]
            else:
                assert js.furthest(v) == td.JumpStructure.INF


def test_accelerated_equals_naive(rng):
    for trial in range(60):
        spec = random_spec(rng, rng.randint(1, 8), rng.randint(1, 16))
        accel = td.SingleStreamAccelerator(
            spec, table_n=rng.choice([16, 1 << 8, 1 << 16]))
        for _ in range(4):
            vals = random_input(rng, rng.randint(0, 150), 16)
            got = accel.run(sc.senc_encode(vals))
            want = sc.senc_encode(
                run_reference_transducer(spec.delta, spec.start, [vals]))
            assert got.stream == want.stream
            assert got.decoded_len == want.decoded_len


def test_zero_preserving_spec_long_run():
    def delta(s, x):
        if x == 0:
            return (s + 1) % 5, 0
        return (s + x) % 5, (x + s) % 7

    spec = td.TransducerSpec(5, 0, 1, delta)
    accel = td.SingleStreamAccelerator(spec, 1 << 16)
    n = 2 * 10 ** 6 + 1
    enc = sc.senc_from_list(n, [(10 ** 6, 5)])
    got = accel.run(enc)
    out_runs = run_reference_by_runs(delta, 0, [(0, 10 ** 6), (5, 1),
                                                (0, 10 ** 6)])
    pos = 0
    pairs = []
    for sym, cnt in out_runs:
        if sym:
            pairs.extend((pos + i, sym) for i in range(cnt))
        pos += cnt
    want = sc.senc_from_list(pos, pairs)
    assert got.stream == want.stream and got.decoded_len == want.decoded_len
    assert accel.last_stats.macro_steps <= 5


def test_all_zero_input_zero_preserving():
    spec = td.TransducerSpec(3, 0, 1,
                             lambda s, x: ((s + 1) % 3, 0 if x == 0 else x))
    accel = td.SingleStreamAccelerator(spec, 1 << 16)
    got = accel.run(sc.senc_encode([0] * 5000))
    assert got.stream.to01() == sc.senc_encode([0] * 5000).stream.to01()


def test_decrement_over_huge_zero_runs():
    spec = td.TransducerSpec(1, 0, 1, lambda s, x: (0, x - 1 if x else 0),
                             key="test:decrement")
    big = 10 ** 6
    enc = sc.senc_from_list(2 * big + 1, [(big, 5)])
    got = td.run_sparse(spec, enc)
    want = sc.senc_from_list(2 * big + 1, [(big, 4)])
    assert got.stream == want.stream and got.decoded_len == want.decoded_len


def test_macro_step_progress(rng):
    spec = random_spec(rng, 4, 8)
    accel = td.SingleStreamAccelerator(spec, 1 << 16)
    vals = random_input(rng, 600, 8, zero_bias=0.4)
    accel.run(sc.senc_encode(vals), collect_stats=True)
    positions = accel.last_stats.macro_bit_positions
    for a, b in zip(positions, positions[2:]):
        assert b - a > accel.lg_m


def test_zip_pair_example_and_unzip():
    a1, a2 = [0, 3, 0], [0, 0, 2]
    enc = td.zip_pair(sc.senc_encode(a1), sc.senc_encode(a2))
    zipped = sc.senc_decode(enc)
    assert zipped[0] == 0
    assert td.unzip_symbol(zipped[1], 2) == (3, 0)
    assert td.unzip_symbol(zipped[2], 2) == (0, 2)


def test_zip_all_zero():
    e = sc.senc_encode([0] * 64)
    got = td.zip_pair(e, e)
    assert got.stream == e.stream


def test_zip_pair_matches_naive(rng):
    for trial in range(150):
        n = rng.randint(0, 90)
        sigma = rng.choice([2, 5, 40])
        a1 = random_input(rng, n, sigma)
        a2 = random_input(rng, n, sigma)
        got = td.zip_pair(sc.senc_encode(a1), sc.senc_encode(a2),
                          rng.choice([16, 1 << 10, 1 << 16]))
        want = sc.senc_encode(td.zip_naive([a1, a2]))
        assert got.stream == want.stream, (a1, a2)


def test_zip_length_mismatch():
    with pytest.raises(InvalidArgument):
        td.zip_pair(sc.senc_encode([1]), sc.senc_encode([1, 2]))


def test_zip_multi_single_stream_relabels():
    vals = [0, 4, 0, 0, 1]
    got = sc.senc_decode(td.zip_multi([sc.senc_encode(vals)]))
    want = [0 if v == 0 else td.zip_symbol((v,)) for v in vals]
    assert got == want


def test_zip_multi_inverts(rng):
    for trial in range(40):
        t = rng.randint(1, 4)
        n = rng.randint(0, 60)
        streams = [random_input(rng, n, 6) for _ in range(t)]
        enc = td.zip_multi([sc.senc_encode(s) for s in streams], 1 << 12)
        vals = sc.senc_decode(enc)
        for i in range(n):
            assert td.unzip_symbol(vals[i], t) == tuple(s[i] for s in streams)


def test_run_multi_majority(rng):
    spec = td.TransducerSpec(1, 0, 3,
                             lambda s, a, b, c: (0, 1 if a + b + c >= 2 else 0))
    for _ in range(15):
        n = rng.randint(0, 150)
        masks = [[rng.randrange(2) for _ in range(n)] for _ in range(3)]
        got = td.run_multi(spec, [sc.senc_encode(m) for m in masks])
        want = sc.senc_encode(run_reference_transducer(spec.delta, 0, masks))
        assert got.stream == want.stream


def test_run_multi_random(rng):
    for trial in range(40):
        arity = rng.randint(1, 3)
        spec = random_spec(rng, rng.randint(1, 6), rng.randint(2, 8), arity)
        n = rng.randint(0, 70)
        streams = [random_input(rng, n, 8) for _ in range(arity)]
        got = td.run_multi(spec, [sc.senc_encode(s) for s in streams], 1 << 12)
        want = sc.senc_encode(
            run_reference_transducer(spec.delta, spec.start, streams))
        assert got.stream == want.stream


def test_zip_size_law_reported(rng, capsys):
    ratios = []
    for _ in range(30):
        n = rng.randint(1, 120)
        streams = [random_input(rng, n, 8) for _ in range(3)]
        encs = [sc.senc_encode(s) for s in streams]
        zipped = td.zip_multi(encs)
        total_in = sum(len(e.stream) for e in encs)
        ratios.append(len(zipped.stream) / max(1, total_in))
    print(f"zip size ratio: max {max(ratios):.2f} mean "
          f"{sum(ratios) / len(ratios):.2f}")
