"""Elias-gamma codes and the sparse encoding of integer sequences.

A non-negative integer sequence is encoded left to right as a stream of
tokens: a positive symbol ``u`` becomes a literal token ``1 . gamma(u)``,
and each maximal run ``0^x`` becomes a zero-run token ``0 . gamma(x)``.
``gamma(x)`` is ``floor(lg x)`` zero bits followed by the binary digits of
``x``, most significant first.  Two zero-run tokens can never be adjacent
in a valid encoding.

Table-accelerated paths take the table parameter ``N``; tables are built
lazily and memoized, and degrade to token-at-a-time processing with
identical outputs when windows do not fit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .bitstream import BitStream
from .errors import DecodeError, InvalidArgument

DEFAULT_TABLE_N = 1 << 16

# Block size for leading-zero scans while decoding gamma codes.
_SCAN_BLOCK = 32


def gamma_bits(x: int) -> int:
    """Length of gamma(x) in bits: 2*floor(lg x) + 1."""
    if x < 1:
        raise InvalidArgument("gamma code requires x >= 1")
    return 2 * (x.bit_length() - 1) + 1


# LSB-first bit pattern of gamma(x) and its width, cached for small values
_gamma_cache: dict[int, tuple[int, int]] = {}


def _gamma_pattern(x: int) -> tuple[int, int]:
    entry = _gamma_cache.get(x)
    if entry is None:
        ell = x.bit_length() - 1
        rev = int(f"{x:b}"[::-1], 2)
        entry = (rev << ell, 2 * ell + 1)
        if x < (1 << 20):
            _gamma_cache[x] = entry
    return entry


def gamma_append(stream: BitStream, x: int) -> None:
    """Append gamma(x): floor(lg x) zeros, then binary(x) MSB-first."""
    if x < 1:
        raise InvalidArgument("gamma code requires x >= 1")
    pattern, nbits = _gamma_pattern(x)
    stream.append_bits_wide(pattern, nbits)


def gamma_encode(x: int) -> BitStream:
    s = BitStream()
    gamma_append(s, x)
    return s


def _reverse_bits(value: int, width: int) -> int:
    return int(f"{value:0{width}b}"[::-1], 2)


def gamma_decode(stream: BitStream, offset: int) -> tuple[int, int]:
    """Decode a gamma code at `offset`; returns (x, bits_consumed)."""
    end = len(stream)
    if offset >= end:
        raise DecodeError("gamma code starts past end of stream", offset)
    # fast path: the whole code fits one word read
    chunk = stream.read_bits(offset, min(64, end - offset))
    if chunk:
        z = (chunk & -chunk).bit_length() - 1
        width = 2 * z + 1
        if width <= 64 and offset + width <= end:
            payload = (chunk >> z) & ((1 << (z + 1)) - 1)
            return _reverse_bits(payload, z + 1), width
    pos = offset
    z = 0
    while True:
        take = min(_SCAN_BLOCK, end - pos)
        if take <= 0:
            raise DecodeError("gamma code has no terminating 1-bit", offset)
        block = stream.read_bits(pos, take)
        if block:
            z += (block & -block).bit_length() - 1
            break
        z += take
        pos += take
    start = offset + z
    if start + z + 1 > end:
        raise DecodeError("truncated gamma code", offset)
    payload = stream.read_bits_wide(start, z + 1)
    return _reverse_bits(payload, z + 1), 2 * z + 1


def append_literal(stream: BitStream, u: int) -> None:
    if u < 1:
        raise InvalidArgument("literal token requires a positive value")
    pattern, nbits = _gamma_pattern(u)
    stream.append_bits_wide((pattern << 1) | 1, nbits + 1)


def append_zero_run(stream: BitStream, x: int) -> None:
    if x < 1:
        raise InvalidArgument("zero-run token requires a positive length")
    pattern, nbits = _gamma_pattern(x)
    stream.append_bits_wide(pattern << 1, nbits + 1)


def token_bits(x: int) -> int:
    """Bits contributed by one token for value/run-length x: 2*floor(lg x)+2."""
    return gamma_bits(x) + 1


@dataclass(frozen=True)
class SparseEncoding:
    """A token stream plus the cached length of the decoded sequence."""

    stream: BitStream
    decoded_len: int

    def __len__(self) -> int:
        return len(self.stream)

    def bits(self) -> int:
        return len(self.stream)


def _tokens_of(values: Iterable[int]):
    """Yield (is_literal, x) tokens for a dense sequence."""
    run = 0
    for v in values:
        if v < 0:
            raise InvalidArgument("sparse encoding requires non-negative entries")
        if v == 0:
            run += 1
            continue
        if run:
            yield False, run
            run = 0
        yield True, v
    if run:
        yield False, run


def tokens_to_stream(tokens: Iterable[tuple[bool, int]]) -> BitStream:
    s = BitStream()
    for is_literal, x in tokens:
        if is_literal:
            append_literal(s, x)
        else:
            append_zero_run(s, x)
    return s


def senc_encode(values: Sequence[int]) -> SparseEncoding:
    """Sparse-encode a dense sequence; the empty sequence encodes to no bits."""
    return SparseEncoding(tokens_to_stream(_tokens_of(values)), len(values))


def senc_size(values: Sequence[int]) -> int:
    """Exact encoded size in bits, by the per-token formula."""
    return sum(token_bits(x) for _, x in _tokens_of(values))


def decode_token_stream(stream: BitStream, offset: int = 0,
                        end: int | None = None) -> list[int]:
    """Decode a whole token stream into the dense sequence.

    Rejects adjacent zero-run tokens and tokens that overrun `end`.
    """
    if end is None:
        end = len(stream)
    values: list[int] = []
    pos = offset
    last_zero_run = False
    while pos < end:
        indicator = stream.get_bit(pos)
        x, used = gamma_decode(stream, pos + 1)
        if pos + 1 + used > end:
            raise DecodeError("token overruns encoding", pos)
        if indicator:
            values.append(x)
            last_zero_run = False
        else:
            if last_zero_run:
                raise DecodeError("adjacent zero-run tokens", pos)
            values.extend([0] * x)
            last_zero_run = True
        pos += 1 + used
    return values


def senc_decode(enc: SparseEncoding) -> list[int]:
    values = decode_token_stream(enc.stream)
    if len(values) != enc.decoded_len:
        raise DecodeError(
            f"decoded length {len(values)} != declared {enc.decoded_len}")
    return values


def senc_from_list(n: int, pairs: Sequence[tuple[int, int]]) -> SparseEncoding:
    """Encode from (position, value) pairs with strictly increasing positions."""
    s = BitStream()
    prev = -1
    for pos, value in pairs:
        if pos <= prev:
            raise InvalidArgument("positions must be strictly increasing")
        if not 0 <= pos < n:
            raise InvalidArgument("position out of range")
        if value <= 0:
            raise InvalidArgument("listed values must be positive")
        gap = pos - prev - 1
        if gap:
            append_zero_run(s, gap)
        append_literal(s, value)
        prev = pos
    if n - prev - 1:
        append_zero_run(s, n - prev - 1)
    return SparseEncoding(s, n)


def senc_to_list(enc: SparseEncoding) -> tuple[int, list[tuple[int, int]]]:
    """Inverse of senc_from_list: (n, sorted (position, value) pairs)."""
    pairs = []
    pos = 0
    stream, bit = enc.stream, 0
    end = len(stream)
    last_zero_run = False
    while bit < end:
        indicator = stream.get_bit(bit)
        x, used = gamma_decode(stream, bit + 1)
        if bit + 1 + used > end:
            raise DecodeError("token overruns encoding", bit)
        if indicator:
            pairs.append((pos, x))
            pos += 1
            last_zero_run = False
        else:
            if last_zero_run:
                raise DecodeError("adjacent zero-run tokens", bit)
            pos += x
            last_zero_run = True
        bit += 1 + used
    if pos != enc.decoded_len:
        raise DecodeError(f"decoded length {pos} != declared {enc.decoded_len}")
    return pos, pairs


class DeferredEncoder:
    """Splits encoding into an O(n) build pass and a fast emit pass."""

    def __init__(self, values: Sequence[int]):
        self._tokens = list(_tokens_of(values))
        self._n = len(values)

    def emit(self) -> SparseEncoding:
        return SparseEncoding(tokens_to_stream(self._tokens), self._n)

    def emit_into(self, stream: BitStream) -> None:
        for is_literal, x in self._tokens:
            if is_literal:
                append_literal(stream, x)
            else:
                append_zero_run(stream, x)


def deferred_encoder(values: Sequence[int]) -> DeferredEncoder:
    return DeferredEncoder(values)


@dataclass(frozen=True)
class ParseInfo:
    """Longest-valid-prefix parse of an encoding window.

    ``b`` is the largest prefix length (within the requested limit) that is
    a complete sparse encoding; the remaining fields describe the decoded
    length-``a`` sequence.
    """

    b: int
    a: int
    a_plus: int
    max_val: int
    values: tuple[int, ...]
    nonzero_mask: int      # bit j set iff values[j] > 0
    literal_start_mask: int  # over b bits: starting positions of literal tokens
    ranks: tuple[int, ...]   # ranks[j] = number of non-zeros before position j
    selects: tuple[int, ...]  # selects[j-1] = position of j-th non-zero

    def rank(self, j: int) -> int:
        return self.ranks[j]

    def select(self, j: int) -> int:
        return self.selects[j - 1]


_EMPTY_PARSE = ParseInfo(0, 0, 0, 0, (), 0, 0, (), ())


class ParseTables:
    """Memoized window parser for a table parameter N.

    Window width is ceil(lg N) bits; short windows are padded with an
    incomplete literal token so parsing never runs past the real data.
    """

    def __init__(self, table_n: int = DEFAULT_TABLE_N):
        if table_n < 2:
            raise InvalidArgument("table parameter must be at least 2")
        self.table_n = table_n
        self.window_bits = max(2, (table_n - 1).bit_length())
        self._memo: dict[tuple[int, int], ParseInfo] = {}

    def parse_window(self, window: int, limit: int) -> ParseInfo:
        key = (window, limit)
        info = self._memo.get(key)
        if info is None:
            info = self._parse(window, limit)
            self._memo[key] = info
        return info

    def parse_stream(self, stream: BitStream, offset: int, limit: int) -> ParseInfo:
        """Parse the window at `offset`; limit is clamped to remaining bits."""
        k = self.window_bits
        avail = max(0, len(stream) - offset)
        limit = min(limit, k, avail)
        if avail >= k:
            window = stream.read_bits_wide(offset, k)
        else:
            # pad with an incomplete literal token
            window = stream.read_bits_wide(offset, avail) | (1 << avail)
        return self.parse_window(window, limit)

    def _parse(self, window: int, limit: int) -> ParseInfo:
        values: list[int] = []
        literal_starts: list[int] = []
        pos = 0
        b = 0
        last_zero_run = False
        while pos < limit:
            indicator = (window >> pos) & 1
            rest = window >> (pos + 1)
            if rest == 0:
                break
            z = (rest & -rest).bit_length() - 1
            token_end = pos + 2 * z + 2
            if token_end > limit:
                break
            payload = (window >> (pos + 1 + z)) & ((1 << (z + 1)) - 1)
            x = int(f"{payload:0{z + 1}b}"[::-1], 2)
            if indicator:
                literal_starts.append(pos)
                values.append(x)
            else:
                if last_zero_run:
                    break
                values.extend([0] * x)
            last_zero_run = not indicator
            pos = b = token_end
        if b == 0:
            return _EMPTY_PARSE
        nz_mask = 0
        lit_mask = 0
        ranks = []
        selects = []
        count = 0
        for j, v in enumerate(values):
            ranks.append(count)
            if v:
                nz_mask |= 1 << j
                selects.append(j)
                count += 1
        for p in literal_starts:
            lit_mask |= 1 << p
        return ParseInfo(b, len(values), count, max(values, default=0),
                         tuple(values), nz_mask, lit_mask,
                         tuple(ranks), tuple(selects))


_default_tables: dict[int, ParseTables] = {}


def parse_tables(table_n: int = DEFAULT_TABLE_N) -> ParseTables:
    tables = _default_tables.get(table_n)
    if tables is None:
        tables = ParseTables(table_n)
        _default_tables[table_n] = tables
    return tables


def prefix_parse(window: BitStream, ell: int,
                 table_n: int = DEFAULT_TABLE_N) -> ParseInfo:
    """Longest prefix of `window` (at most `ell` bits) that is a sparse encoding."""
    tables = parse_tables(table_n)
    if ell > tables.window_bits:
        raise InvalidArgument(
            f"ell {ell} exceeds window width {tables.window_bits}")
    return tables.parse_stream(window, 0, ell)


# -- integer view of encodings (used for zipped symbols) ---------------------

def stream_to_msb_int(stream: BitStream) -> int:
    """Interpret stream bits as MSB-first digits, prefixed by a sentinel 1.

    The sentinel preserves leading zero bits, so the mapping is injective
    and the result is always positive.
    """
    nbits = len(stream)
    out = 1
    for start in range(0, nbits, 63):
        take = min(63, nbits - start)
        chunk = stream.read_bits(start, take)
        rev = int(f"{chunk:0{take}b}"[::-1], 2)
        out = (out << take) | rev
    return out


def msb_int_to_stream(value: int) -> BitStream:
    """Inverse of stream_to_msb_int."""
    if value < 1:
        raise DecodeError("sentinel-coded value must be positive")
    nbits = value.bit_length() - 1
    s = BitStream()
    remaining = nbits
    while remaining > 0:
        take = min(63, remaining)
        chunk = (value >> (remaining - take)) & ((1 << take) - 1)
        s.append_bits(_reverse_bits(chunk, take), take)
        remaining -= take
    return s
