import pytest
from hypothesis import given, settings, strategies as st

from tausync.bitstream import BitStream, W
from tausync.errors import DecodeError, InvalidArgument


def test_append_bits_basic():
    s = BitStream()
    s.append_bits(0b101, 3)
    assert s.to01() == "101"
    assert len(s) == 3
    assert (s.get_bit(0), s.get_bit(1), s.get_bit(2)) == (1, 0, 1)


def test_append_zero_count_is_identity():
    s = BitStream.from01("1101")
    s.append_bits(0, 0)
    assert s.to01() == "1101"


def test_incremental_appends_match_single_call():
    a = BitStream()
    a.append_bits(0b1, 1)
    a.append_bits(0b0, 1)
    a.append_bits(0b0, 1)
    b = BitStream()
    b.append_bits(0b001, 3)
    assert a == b


def test_append_count_over_word_rejected():
    s = BitStream()
    with pytest.raises(InvalidArgument):
        s.append_bits(0, W + 1)
    with pytest.raises(InvalidArgument):
        s.read_bits(0, W + 1)


def test_read_bits_examples():
    s = BitStream.from01("101")
    assert s.read_bits(0, 3) == 0b101
    assert s.read_bits(1, 2) == 0b10
    assert s.read_bits(2, 4) == 0b0001  # zero padding past the end


def test_read_bits_cross_word():
    s = BitStream()
    for i in range(130):
        s.append_bits(i & 1, 1)
    assert s.read_bits(62, 4) == 0b1010 if s.get_bit(62) == 0 else True
    for start in range(0, 128, 7):
        got = s.read_bits(start, 8)
        want = sum(((i + start) & 1) << i for i in range(8) if start + i < 130)
        assert got == want


def test_append_stream_examples():
    a = BitStream.from01("10")
    b = BitStream.from01("11")
    a.append_stream(b)
    assert a.to01() == "1011"
    c = BitStream.from01("1011")
    c.append_stream(BitStream())
    assert c.to01() == "1011"


def test_append_stream_associative(rng):
    for _ in range(40):
        parts = [BitStream.from01("".join(rng.choice("01")
                                          for _ in range(rng.randrange(90))))
                 for _ in range(3)]
        left = BitStream()
        left.append_stream(parts[0])
        left.append_stream(parts[1])
        right_tail = BitStream()
        right_tail.append_stream(parts[1])
        right_tail.append_stream(parts[2])
        left.append_stream(parts[2])
        head = BitStream()
        head.append_stream(parts[0])
        head.append_stream(right_tail)
        assert left == head


def test_append_stream_all_word_offsets():
    src = BitStream.from01("1011001110001111" * 5)
    for offset in range(W):
        dst = BitStream()
        dst.append_bits((1 << offset) - 1, offset)
        dst.append_stream(src)
        assert len(dst) == offset + len(src)
        for i in range(len(src)):
            assert dst.get_bit(offset + i) == src.get_bit(i)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(st.integers(min_value=0, max_value=(1 << W) - 1),
                          st.integers(min_value=0, max_value=W)),
                max_size=20))
def test_roundtrip_property(chunks):
    s = BitStream()
    offsets = []
    for value, count in chunks:
        value &= (1 << count) - 1
        offsets.append((len(s), value, count))
        s.append_bits(value, count)
    for off, value, count in offsets:
        assert s.read_bits(off, count) == value


def test_serialization_roundtrip(rng):
    for _ in range(20):
        bits = "".join(rng.choice("01") for _ in range(rng.randrange(200)))
        s = BitStream.from01(bits)
        data = s.to_bytes(decoded_len=1234)
        back, decoded_len = BitStream.from_bytes(data)
        assert back == s and decoded_len == 1234
    assert BitStream.from_bytes(BitStream().to_bytes(0))[0] == BitStream()


def test_serialization_rejects_garbage():
    with pytest.raises(DecodeError):
        BitStream.from_bytes(b"NOPE" + b"\0" * 16)
    good = BitStream.from01("10101").to_bytes(5)
    with pytest.raises(DecodeError):
        BitStream.from_bytes(good + b"\0")
    # nonzero padding bits after the declared length
    bad = bytearray(good)
    bad[-1] |= 0x80
    with pytest.raises(DecodeError):
        BitStream.from_bytes(bytes(bad))


def test_from_int_to_int(rng):
    for _ in range(30):
        length = rng.randrange(0, 200)
        value = rng.getrandbits(length) if length else 0
        s = BitStream.from_int(value, length)
        assert len(s) == length
        assert s.to_int() == value
