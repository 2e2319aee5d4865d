"""Growable bit streams with a fixed LSB-first bit order.

Bit ``i`` of a stream lives in storage word ``i // W`` at intra-word
position ``i % W``, least-significant bit first.  Every bitmask in the
package (boundary masks, run masks, sparse encodings) uses this order, as
does the serialized container format.

Streams are single-writer: build one by appending, then share it
read-only across threads.
"""

from __future__ import annotations

import struct

from .errors import DecodeError, InvalidArgument

#: Machine word width used for chunked append/read operations.
W = 64

_WORD_MASK = (1 << W) - 1

MAGIC = b"SSB1"


class BitStream:
    """A growable sequence of bits packed into 64-bit words."""

    __slots__ = ("_words", "_len")

    def __init__(self):
        self._words: list[int] = []
        self._len = 0

    def __len__(self) -> int:
        return self._len

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitStream):
            return NotImplemented
        return self._len == other._len and self._words == other._words

    def __hash__(self):
        return hash((self._len, tuple(self._words)))

    def __repr__(self) -> str:
        if self._len <= 80:
            return f"BitStream({self.to01()!r})"
        return f"BitStream(len={self._len})"

    # -- construction helpers ------------------------------------------------

    @classmethod
    def from01(cls, bits: str) -> "BitStream":
        """Build a stream from a left-to-right "0101..." string."""
        s = cls()
        for ch in bits:
            if ch not in "01":
                raise InvalidArgument(f"not a bit: {ch!r}")
            s.append_bits(int(ch), 1)
        return s

    @classmethod
    def from_int(cls, value: int, length: int) -> "BitStream":
        """Build a length-`length` stream whose bit i is bit i of value."""
        if value < 0 or value >> length:
            raise InvalidArgument("value does not fit in length bits")
        s = cls()
        full, rem = divmod(length, W)
        for _ in range(full):
            s.append_bits(value & _WORD_MASK, W)
            value >>= W
        if rem:
            s.append_bits(value, rem)
        return s

    def to01(self) -> str:
        return "".join("1" if self.get_bit(i) else "0" for i in range(self._len))

    def to_int(self) -> int:
        """The whole stream as one integer, bit i of the result = bit i."""
        out = 0
        for wi in range(len(self._words) - 1, -1, -1):
            out = (out << W) | self._words[wi]
        return out & ((1 << self._len) - 1) if self._len else 0

    # -- core operations -----------------------------------------------------

    def append_bits(self, value: int, count: int) -> None:
        """Append the `count` low bits of `value`, bit j at old_len + j."""
        if count > W or count < 0:
            raise InvalidArgument(f"count {count} not in [0..{W}]")
        if value >> count or value < 0:
            raise InvalidArgument("value has bits above count")
        if count == 0:
            return
        pos = self._len
        words = self._words
        wi = pos >> 6
        off = pos & 63
        if wi == len(words):
            # off is 0 here: a fresh word starts exactly at the write position
            words.append(value)
        else:
            words[wi] |= (value << off) & _WORD_MASK
            if count > W - off:
                words.append(value >> (W - off))
        self._len = pos + count

    def get_bit(self, i: int) -> int:
        if i < 0:
            raise InvalidArgument("negative bit index")
        if i >= self._len:
            return 0
        return (self._words[i // W] >> (i % W)) & 1

    def read_bits(self, start: int, count: int) -> int:
        """Read `count` bits at [start..start+count), LSB-first.

        Positions at or beyond the stream length contribute 0.
        """
        if count > W or count < 0:
            raise InvalidArgument(f"count {count} not in [0..{W}]")
        if start < 0:
            raise InvalidArgument("negative start")
        if count == 0:
            return 0
        words = self._words
        wi = start >> 6
        off = start & 63
        nwords = len(words)
        lo = words[wi] >> off if wi < nwords else 0
        got = W - off
        if got < count and wi + 1 < nwords:
            lo |= words[wi + 1] << got
        value = lo & ((1 << count) - 1)
        end = start + count
        if end > self._len:
            valid = self._len - start
            if valid <= 0:
                return 0
            value &= (1 << valid) - 1
        return value

    def read_bits_wide(self, start: int, count: int) -> int:
        """Like read_bits but without the word-width cap (internal use)."""
        if count <= W:
            return self.read_bits(start, count)
        out = 0
        shift = 0
        while count > 0:
            take = count if count < W else W
            out |= self.read_bits(start, take) << shift
            start += take
            shift += take
            count -= take
        return out

    def append_bits_wide(self, value: int, count: int) -> None:
        """Append `count` bits of arbitrary-width `value` (internal use)."""
        if count <= W:
            self.append_bits(value, count)
            return
        while count > 0:
            take = count if count < W else W
            self.append_bits(value & _WORD_MASK if count > W else value, take)
            value >>= take
            count -= take

    def append_stream(self, src: "BitStream") -> None:
        """Append all of `src`; runs in O(len(src)/W + 1) word steps."""
        remaining = src._len
        start = 0
        while remaining > 0:
            take = min(remaining, W)
            self.append_bits(src.read_bits(start, take), take)
            start += take
            remaining -= take

    def slice_bits(self, start: int, count: int) -> "BitStream":
        """A new stream holding bits [start..start+count)."""
        out = BitStream()
        while count > 0:
            take = min(count, W)
            out.append_bits(self.read_bits(start, take), take)
            start += take
            count -= take
        return out

    def count_ones(self) -> int:
        return sum(w.bit_count() for w in self._words)

    # -- serialization -------------------------------------------------------

    def to_bytes(self, decoded_len: int) -> bytes:
        """Container format: magic, decoded length, bit count, payload.

        Bit i is stored at byte i // 8, bit i % 8.
        """
        nbytes = (self._len + 7) // 8
        payload = bytearray(nbytes)
        for bi in range(nbytes):
            payload[bi] = self.read_bits(8 * bi, min(8, self._len - 8 * bi))
        return MAGIC + struct.pack("<QQ", decoded_len, self._len) + bytes(payload)

    @classmethod
    def from_bytes(cls, data: bytes) -> tuple["BitStream", int]:
        """Parse a container; returns (stream, decoded_len)."""
        if len(data) < 20 or data[:4] != MAGIC:
            raise DecodeError("bad container magic")
        decoded_len, nbits = struct.unpack("<QQ", data[4:20])
        nbytes = (nbits + 7) // 8
        if len(data) != 20 + nbytes:
            raise DecodeError("container payload length mismatch")
        s = cls()
        for bi in range(nbytes):
            take = min(8, nbits - 8 * bi)
            byte = data[20 + bi]
            if byte >> take:
                raise DecodeError("nonzero padding bits in container", 8 * bi + take)
            s.append_bits(byte, take)
        return s, decoded_len
