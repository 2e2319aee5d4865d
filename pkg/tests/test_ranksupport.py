from bisect import bisect_left, bisect_right

import pytest

from tausync.bitstream import BitStream
from tausync.errors import InvalidArgument
from tausync import ranksupport as rs
from tausync import sparsecodec as sc


def prefix_sums(bits):
    out = [0]
    for b in bits:
        out.append(out[-1] + b)
    return out


def test_bitvector_rank_select(rng):
    for _ in range(30):
        n = rng.randrange(0, 400)
        bits = [rng.randrange(2) for _ in range(n)]
        bv = rs.BitVectorRS(BitStream.from01("".join(map(str, bits))))
        pref = prefix_sums(bits)
        for j in range(n + 1):
            assert bv.rank(j) == pref[j]
        ones = [i for i, b in enumerate(bits) if b]
        for j, pos in enumerate(ones, start=1):
            assert bv.select(j) == pos


def test_decompose_all_zero():
    enc = sc.senc_encode([0] * 500)
    d = rs.decompose(enc)
    assert d.h == 1 and d.p == [0, 500] and d.r == [0, 0]


def test_decompose_single_distant_bit():
    bits = [0] * (10 ** 6) + [1] + [0] * 3
    enc = sc.senc_encode(bits)
    d = rs.decompose(enc)
    assert d.p[-1] == len(bits) and d.r[-1] == 1
    # the long run is its own piece; the literal sits in a short piece
    widths = [d.e[i + 1] - d.e[i] for i in range(d.h)]
    assert max(widths) > 16


def test_decompose_reassembles(rng):
    for _ in range(40):
        n = rng.randrange(0, 300)
        bits = [1 if rng.random() < rng.choice([0.05, 0.4]) else 0
                for _ in range(n)]
        enc = sc.senc_encode(bits)
        d = rs.decompose(enc, 1 << 12)
        whole = BitStream()
        for i in range(d.h):
            whole.append_stream(d.piece_bits(i))
        assert whole == enc.stream
        # consecutive tuples advance the encoding
        for i in range(d.h):
            assert d.e[i + 1] > d.e[i]
        lg = (1 << 12).bit_length() - 1
        for i in range(d.h - 1):
            assert d.e[i + 2] - d.e[i] > lg


def test_select_examples():
    enc = sc.senc_encode([0, 1, 0, 1])
    sel = rs.build_select(enc)
    assert sel.select(1) == 1 and sel.select(2) == 3
    with pytest.raises(InvalidArgument):
        sel.select(3)
    with pytest.raises(InvalidArgument):
        sel.select(0)


def test_select_matches_naive(rng):
    for _ in range(60):
        n = rng.randrange(0, 300)
        bits = [1 if rng.random() < rng.choice([0.03, 0.3, 0.8]) else 0
                for _ in range(n)]
        sel = rs.build_select(sc.senc_encode(bits), rng.choice([16, 1 << 16]))
        ones = [i for i, b in enumerate(bits) if b]
        assert sel.count == len(ones)
        for j, pos in enumerate(ones, start=1):
            assert sel.select(j) == pos


def test_veb_examples():
    v = rs.build_veb([3, 7, 10])
    assert v.pred(8) == 7
    assert v.rank(8) == 2
    assert v.pred(2) is None
    assert v.rank(3) == 0
    empty = rs.build_veb([])
    assert empty.pred(4) is None and empty.rank(4) == 0


def test_veb_rejects_unsorted():
    with pytest.raises(InvalidArgument):
        rs.build_veb([4, 4])
    with pytest.raises(InvalidArgument):
        rs.build_veb([5, 1])


def test_veb_matches_binary_search(rng):
    for trial in range(150):
        ubits = rng.choice([3, 8, 16, 30, 48])
        size = rng.randint(0, 250)
        keys = sorted(rng.sample(range(1 << ubits), min(size, 1 << ubits)))
        v = rs.build_veb(keys, universe_bits=ubits,
                         m=rng.choice([None, 4 * size + 1]),
                         word_bits=rng.choice([None, 3, 4, 8]))
        for _ in range(40):
            x = rng.randrange((1 << ubits) + 3)
            i = bisect_right(keys, x)
            assert v.pred(x) == (keys[i - 1] if i else None)
            assert v.rank(x) == bisect_left(keys, x)


def test_rank_handle(rng):
    for _ in range(50):
        n = rng.randrange(0, 250)
        bits = [1 if rng.random() < rng.choice([0.05, 0.5]) else 0
                for _ in range(n)]
        enc = sc.senc_encode(bits)
        rk = rs.build_rank(enc, rng.choice([16, 1 << 16]))
        pref = prefix_sums(bits)
        assert rk.rank(0) == 0 and rk.rank(n) == pref[n]
        for j in range(n + 1):
            assert rk.rank(j) == pref[j]
        with pytest.raises(InvalidArgument):
            rk.rank(n + 1)


def test_rank_m_floor_enforced():
    enc = sc.senc_encode([1] * 500)
    with pytest.raises(InvalidArgument):
        rs.build_rank(enc, 1 << 16, m=1)


def test_select_after_rank_identity(rng):
    bits = [1 if rng.random() < 0.25 else 0 for _ in range(300)]
    enc = sc.senc_encode(bits)
    sel = rs.build_select(enc)
    rk = rs.build_rank(enc)
    for pos in range(300):
        nxt = next((i for i in range(pos, 300) if bits[i]), None)
        if nxt is not None:
            assert sel.select(rk.rank(pos) + 1) == nxt
