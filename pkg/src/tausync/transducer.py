"""Deterministic finite-state transducers over integer alphabets, with
table-accelerated execution directly on sparse encodings.

The accelerated runner keeps the invariant (input bits consumed, symbols
consumed, current state, trailing-zero count, emitted prefix) and
advances in macro-steps of up to lg M encoding bits via lazily built
per-state window tables.  Long zero-run tokens are crossed by alternating
flexible micro-steps (pseudoforest jumps through transitions that read
and write zero) and fixed micro-steps of M^(1/4) symbols.

Multi-stream execution zips the inputs positionwise: a zipped symbol is 0
where all streams are 0 and otherwise carries a sentinel 1 bit followed
by the sparse encoding of the symbol tuple (the sentinel keeps leading
zero bits of the inner encoding, making the integer view unambiguous).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import isqrt
from typing import Callable, Optional, Sequence

from .bitstream import BitStream
from .errors import DecodeError, InvalidArgument
from . import sparsecodec as sc
from .sparsecodec import SparseEncoding

DEFAULT_TABLE_N = sc.DEFAULT_TABLE_N


@dataclass(frozen=True)
class TransducerSpec:
    """q states over [0..q), an initial state, t input streams, and a total
    transition function (state, s_1..s_t) -> (state, output)."""

    num_states: int
    start: int
    arity: int
    delta: Callable
    key: Optional[str] = None   # stable identity for table caching


def run_naive(spec: TransducerSpec, inputs: Sequence[Sequence[int]]) -> list[int]:
    """Sequential evaluation over dense inputs."""
    if len(inputs) != spec.arity:
        raise InvalidArgument(
            f"expected {spec.arity} input streams, got {len(inputs)}")
    if not inputs:
        return []
    n = len(inputs[0])
    for s in inputs:
        if len(s) != n:
            raise InvalidArgument("input streams must share one length")
    state = spec.start
    delta = spec.delta
    out = []
    for i in range(n):
        state, symbol = delta(state, *(s[i] for s in inputs))
        out.append(symbol)
    return out


# -- pseudoforest jumps --------------------------------------------------------

class JumpStructure:
    """Jump queries on a functional graph with out-degree at most one.

    jump(v, d) follows exactly d edges (or returns None); furthest(v) is
    the largest feasible d, infinity when v reaches a cycle.
    """

    INF = float("inf")

    def __init__(self, successor: Sequence[Optional[int]]):
        n = len(successor)
        self.succ = list(successor)
        self.depth = [0] * n           # distance to cycle or to a sink
        self.on_cycle = [False] * n
        self.cycle_id = [-1] * n
        self.cycle_pos = [0] * n
        self.cycles: list[list[int]] = []
        color = [0] * n                # 0 unvisited, 1 in progress, 2 done
        for v in range(n):
            if color[v]:
                continue
            path = []
            u = v
            while u is not None and color[u] == 0:
                color[u] = 1
                path.append(u)
                u = self.succ[u]
            if u is not None and color[u] == 1:
                # found a new cycle along the current path
                cid = len(self.cycles)
                idx = path.index(u)
                cycle = path[idx:]
                self.cycles.append(cycle)
                for pos, w in enumerate(cycle):
                    self.on_cycle[w] = True
                    self.cycle_id[w] = cid
                    self.cycle_pos[w] = pos
                    self.depth[w] = 0
                    color[w] = 2
                path = path[:idx]
            for w in reversed(path):
                nxt = self.succ[w]
                if nxt is None:
                    self.depth[w] = 0
                else:
                    self.depth[w] = self.depth[nxt] + 1
                    if self.cycle_id[nxt] >= 0 and not self.on_cycle[w]:
                        self.cycle_id[w] = self.cycle_id[nxt]
                color[w] = 2
        # binary lifting over the tail edges
        self._up: list[list[Optional[int]]] = [list(self.succ)]
        max_depth = max(self.depth, default=0)
        level = 1
        while (1 << level) <= max(1, max_depth):
            prev = self._up[-1]
            self._up.append([None if prev[v] is None else prev[prev[v]]
                             for v in range(n)])
            level += 1

    def reaches_cycle(self, v: int) -> bool:
        return self.cycle_id[v] >= 0 or self.on_cycle[v]

    def furthest(self, v: int):
        return self.INF if self.reaches_cycle(v) else self.depth[v]

    def _lift(self, v: int, steps: int) -> int:
        level = 0
        while steps:
            if steps & 1:
                v = self._up[level][v]
            steps >>= 1
            level += 1
        return v

    def jump(self, v: int, d: int) -> Optional[int]:
        if d < 0:
            raise InvalidArgument("jump distance must be non-negative")
        if not self.reaches_cycle(v):
            return None if d > self.depth[v] else self._lift(v, d)
        tail = 0 if self.on_cycle[v] else min(d, self.depth[v])
        v = self._lift(v, tail)
        rest = d - tail
        if rest == 0:
            return v
        cycle = self.cycles[self.cycle_id[v]]
        return cycle[(self.cycle_pos[v] + rest) % len(cycle)]


def jump_structure(successor: Sequence[Optional[int]]) -> JumpStructure:
    return JumpStructure(successor)


# -- single-stream acceleration ------------------------------------------------

@dataclass
class _WindowEntry:
    b: int                    # encoding bits consumed
    a: int                    # symbols consumed
    state: int                # state reached
    z1: int                   # leading zeros of the output
    z2: int                   # trailing zeros of the output
    mid_tokens: tuple         # deferred tokens for output[z1..a-z2)


@dataclass
class RunStats:
    macro_steps: int = 0
    micro_steps: int = 0
    macro_bit_positions: list[int] = field(default_factory=list)


class SingleStreamAccelerator:
    """Runs a single-stream transducer directly on sparse encodings."""

    def __init__(self, spec: TransducerSpec, table_n: int = DEFAULT_TABLE_N):
        if spec.arity != 1:
            raise InvalidArgument("single-stream accelerator requires arity 1")
        self.spec = spec
        self.table_n = table_n
        self.lg_m = max(2, (max(4, table_n).bit_length() - 1) // 4)
        self.m_quarter = max(1, isqrt(isqrt(1 << self.lg_m)))
        self._tables = sc.ParseTables(table_n)
        self._window_entries: dict[tuple[int, int, int], _WindowEntry] = {}
        self._zero_entries: dict[tuple[int, int], _WindowEntry] = {}
        succ: list[Optional[int]] = []
        for s in range(spec.num_states):
            s2, out = spec.delta(s, 0)
            succ.append(s2 if out == 0 else None)
        self._jumps = JumpStructure(succ)
        self.last_stats = RunStats()

    # table construction -------------------------------------------------------

    def _entry(self, state: int, window: int, limit: int) -> _WindowEntry:
        key = (state, window, limit)
        entry = self._window_entries.get(key)
        if entry is None:
            info = self._tables.parse_window(window, limit)
            entry = self._simulate(state, info.values, info.b)
            self._window_entries[key] = entry
        return entry

    def _zero_entry(self, state: int, count: int) -> _WindowEntry:
        key = (state, count)
        entry = self._zero_entries.get(key)
        if entry is None:
            entry = self._simulate(state, (0,) * count, sc.token_bits(count))
            self._zero_entries[key] = entry
        return entry

    def _simulate(self, state: int, symbols: tuple, b: int) -> _WindowEntry:
        delta = self.spec.delta
        out = []
        for x in symbols:
            state, y = delta(state, x)
            out.append(y)
        a = len(out)
        z1 = 0
        while z1 < a and out[z1] == 0:
            z1 += 1
        z2 = 0
        while z2 < a - z1 and out[a - 1 - z2] == 0:
            z2 += 1
        mid = tuple(sc._tokens_of(out[z1:a - z2]))
        return _WindowEntry(b, a, state, z1, z2, mid)

    # output assembly ----------------------------------------------------------

    @staticmethod
    def _flush(y: BitStream, zeros: int, entry: _WindowEntry) -> int:
        """Append pending zeros and the entry's middle part; new z value."""
        if entry.a == entry.z1:
            return zeros + entry.a
        if zeros + entry.z1:
            sc.append_zero_run(y, zeros + entry.z1)
        for is_literal, x in entry.mid_tokens:
            if is_literal:
                sc.append_literal(y, x)
            else:
                sc.append_zero_run(y, x)
        return entry.z2

    # main loop ----------------------------------------------------------------

    def run(self, enc: SparseEncoding,
            collect_stats: bool = False) -> SparseEncoding:
        spec = self.spec
        stream = enc.stream
        total_bits = len(stream)
        lg_m = self.lg_m
        x = 0
        n = 0
        state = spec.start
        z = 0
        y = BitStream()
        stats = RunStats()
        while x < total_bits:
            stats.macro_steps += 1
            if collect_stats:
                stats.macro_bit_positions.append(x)
            avail = total_bits - x
            if avail >= lg_m:
                window = stream.read_bits_wide(x, lg_m)
            else:
                window = stream.read_bits_wide(x, avail) | (1 << avail)
            entry = self._entry(state, window, min(lg_m, avail))
            if entry.b > 0:
                z = self._flush(y, z, entry)
                state = entry.state
                x += entry.b
                n += entry.a
                continue
            # long token: decode it directly
            indicator = stream.get_bit(x)
            value, used = sc.gamma_decode(stream, x + 1)
            token_bits = 1 + used
            if indicator:
                state, out = spec.delta(state, value)
                if out == 0:
                    z += 1
                else:
                    if z:
                        sc.append_zero_run(y, z)
                    sc.append_literal(y, out)
                    z = 0
                n += 1
            else:
                yleft = value
                while yleft:
                    stats.micro_steps += 1
                    d = self._jumps.furthest(state)
                    step = yleft if d == JumpStructure.INF else min(yleft, d)
                    if step:
                        state = self._jumps.jump(state, step)
                        z += step
                        n += step
                        yleft -= step
                    if not yleft:
                        break
                    stats.micro_steps += 1
                    fixed = min(yleft, self.m_quarter)
                    entry = self._zero_entry(state, fixed)
                    z = self._flush(y, z, entry)
                    state = entry.state
                    n += fixed
                    yleft -= fixed
            x += token_bits
        if z:
            sc.append_zero_run(y, z)
        self.last_stats = stats
        return SparseEncoding(y, n)


_accel_cache: dict[tuple[str, int], SingleStreamAccelerator] = {}


def accelerate_single(spec: TransducerSpec,
                      table_n: int = DEFAULT_TABLE_N) -> SingleStreamAccelerator:
    """Accelerator for a single-stream spec; cached when spec.key is set."""
    if spec.key is None:
        return SingleStreamAccelerator(spec, table_n)
    cache_key = (spec.key, table_n)
    accel = _accel_cache.get(cache_key)
    if accel is None:
        accel = SingleStreamAccelerator(spec, table_n)
        _accel_cache[cache_key] = accel
    return accel


def run_sparse(spec: TransducerSpec, enc: SparseEncoding,
               table_n: int = DEFAULT_TABLE_N) -> SparseEncoding:
    return accelerate_single(spec, table_n).run(enc)


# -- zipped symbols ------------------------------------------------------------

_zip_symbol_cache: dict[tuple[int, ...], int] = {}
_unzip_cache: dict[tuple[int, int], tuple[int, ...]] = {}


def zip_symbol(values: Sequence[int]) -> int:
    """0 when all values are 0, else sentinel-prefixed senc of the tuple."""
    key = tuple(values)
    out = _zip_symbol_cache.get(key)
    if out is None:
        if all(v == 0 for v in key):
            out = 0
        else:
            out = sc.stream_to_msb_int(sc.senc_encode(key).stream)
        if len(_zip_symbol_cache) < (1 << 20):
            _zip_symbol_cache[key] = out
    return out


def unzip_symbol(x: int, arity: int) -> tuple[int, ...]:
    if x == 0:
        return (0,) * arity
    key = (x, arity)
    out = _unzip_cache.get(key)
    if out is None:
        values = sc.decode_token_stream(sc.msb_int_to_stream(x))
        if len(values) != arity:
            raise DecodeError(
                f"zipped symbol decodes to {len(values)} values, "
                f"expected {arity}")
        out = tuple(values)
        if len(_unzip_cache) < (1 << 20):
            _unzip_cache[key] = out
    return out


def zip_naive(inputs: Sequence[Sequence[int]]) -> list[int]:
    if not inputs:
        raise InvalidArgument("zip needs at least one stream")
    n = len(inputs[0])
    for s in inputs:
        if len(s) != n:
            raise InvalidArgument("zip inputs must share one length")
    return [zip_symbol([s[i] for s in inputs]) for i in range(n)]


# -- pair zip over encodings ---------------------------------------------------

@dataclass
class _ZipEntry:
    b1: int
    b2: int
    z1: int          # trailing zeros of X not yet encoded
    z2: int
    lead: int        # shared leading zeros (joins the pending output run)
    r: int           # symbols fully merged into the emitted chunk
    tokens: tuple    # senc tokens of zip(X[lead..r), Y[lead..r))


class PairZipper:
    """Merges two sparse encodings into the encoding of their zip."""

    def __init__(self, table_n: int = DEFAULT_TABLE_N):
        self.table_n = table_n
        self.lg_m = max(2, (max(4, table_n).bit_length() - 1) // 4)
        self.z_cap = 1 << self.lg_m
        self._tables = sc.ParseTables(table_n)
        self._entries: dict[tuple[int, int, int, int], _ZipEntry] = {}

    # -- table construction ----------------------------------------------------

    def _parses(self, window: int, limit: int) -> list[tuple[int, tuple]]:
        """All (bits, decoded values) sparse-encoding prefixes of the window."""
        out = [(0, ())]
        pos = 0
        values: list[int] = []
        last_zero_run = False
        while pos < limit:
            indicator = (window >> pos) & 1
            rest = window >> (pos + 1)
            if rest == 0:
                break
            zbits = (rest & -rest).bit_length() - 1
            token_end = pos + 2 * zbits + 2
            if token_end > limit:
                break
            payload = (window >> (pos + 1 + zbits)) & ((1 << (zbits + 1)) - 1)
            v = int(f"{payload:0{zbits + 1}b}"[::-1], 2)
            if indicator:
                values.append(v)
                last_zero_run = False
            else:
                if last_zero_run:
                    break
                values.extend([0] * v)
                last_zero_run = True
            pos = token_end
            out.append((pos, tuple(values)))
        return out

    @staticmethod
    def _trailing_zeros(seq: tuple) -> int:
        z = 0
        for v in reversed(seq):
            if v:
                break
            z += 1
        return z

    def _entry(self, w1: int, limit1: int, w2: int, limit2: int,
               z1: int, z2: int) -> _ZipEntry:
        z1c = min(z1, self.z_cap)
        z2c = min(z2, self.z_cap)
        key = (w1 | (limit1 << self.lg_m), w2 | (limit2 << self.lg_m), z1c, z2c)
        entry = self._entries.get(key)
        if entry is None:
            entry = self._build_entry(w1, limit1, w2, limit2, z1c, z2c)
            self._entries[key] = entry
        if z1 > z1c or z2 > z2c:
            entry = _ZipEntry(entry.b1, entry.b2,
                              entry.z1 + (z1 - z1c), entry.z2 + (z2 - z2c),
                              entry.lead, entry.r, entry.tokens)
        return entry

    def _build_entry(self, w1: int, limit1: int, w2: int, limit2: int,
                     z1: int, z2: int) -> _ZipEntry:
        best = None
        parses1 = self._parses(w1, limit1)
        parses2 = self._parses(w2, limit2)
        for b1, vals1 in parses1:
            lx = z1 + len(vals1)
            tz1 = len(vals1) if not vals1 else self._trailing_zeros(vals1)
            for b2, vals2 in parses2:
                ly = z2 + len(vals2)
                # dangling symbols of the longer side must be zeros
                if lx < ly:
                    tz = (z2 + self._trailing_zeros(vals2)
                          if self._trailing_zeros(vals2) == len(vals2)
                          else self._trailing_zeros(vals2))
                    if ly - lx > tz:
                        continue
                elif ly < lx:
                    tz = (z1 + tz1 if tz1 == len(vals1) else tz1)
                    if lx - ly > tz:
                        continue
                score = (b1 + b2, b1)
                if best is None or score > best[0]:
                    best = (score, b1, vals1, b2, vals2)
        _, b1, vals1, b2, vals2 = best
        xs = (0,) * z1 + vals1
        ys = (0,) * z2 + vals2
        lx, ly = len(xs), len(ys)
        common = min(lx, ly)
        lead = 0
        while lead < common and xs[lead] == 0 and ys[lead] == 0:
            lead += 1
        r = common
        while r > 0 and all(v == 0 for v in xs[r - 1:]) \
                and all(v == 0 for v in ys[r - 1:]):
            r -= 1
        if r == 0:
            return _ZipEntry(b1, b2, lx, ly, lead, 0, ())
        zipped = [zip_symbol((xs[i], ys[i])) for i in range(lead, r)]
        tokens = tuple(sc._tokens_of(zipped))
        return _ZipEntry(b1, b2, lx - r, ly - r, lead, r, tokens)

    # -- merge loop --------------------------------------------------------------

    def zip(self, e1: SparseEncoding, e2: SparseEncoding) -> SparseEncoding:
        if e1.decoded_len != e2.decoded_len:
            raise InvalidArgument("zip inputs must share one decoded length")
        s1, s2 = e1.stream, e2.stream
        len1, len2 = len(s1), len(s2)
        b1 = b2 = 0
        a = z1 = z2 = z3 = 0
        out = BitStream()
        lg_m = self.lg_m

        def window(stream, pos, total):
            avail = total - pos
            if avail >= lg_m:
                return stream.read_bits_wide(pos, lg_m), lg_m
            return stream.read_bits_wide(pos, avail) | (1 << avail), avail

        while b1 < len1 or b2 < len2:
            shared = min(z1, z2)
            if shared:
                z1 -= shared
                z2 -= shared
                a += shared
                z3 += shared
            w1, lim1 = window(s1, b1, len1)
            w2, lim2 = window(s2, b2, len2)
            entry = self._entry(w1, lim1, w2, lim2, z1, z2)
            if entry.b1 or entry.b2:
                b1 += entry.b1
                b2 += entry.b2
                z1 = entry.z1
                z2 = entry.z2
                if entry.r:
                    if z3 + entry.lead:
                        sc.append_zero_run(out, z3 + entry.lead)
                    for is_literal, v in entry.tokens:
                        if is_literal:
                            sc.append_literal(out, v)
                        else:
                            sc.append_zero_run(out, v)
                    a += entry.r
                    z3 = 0
                continue
            # large-token fallbacks
            if b1 < len1 and s1.get_bit(b1) == 0:
                v, used = sc.gamma_decode(s1, b1 + 1)
                b1 += 1 + used
                z1 += v
                continue
            if b2 < len2 and s2.get_bit(b2) == 0:
                v, used = sc.gamma_decode(s2, b2 + 1)
                b2 += 1 + used
                z2 += v
                continue
            # both fronts are literal tokens too large for the window
            if z3:
                sc.append_zero_run(out, z3)
                z3 = 0
            v1 = v2 = 0
            if z1 == 0:
                if b1 >= len1:
                    raise DecodeError("first encoding exhausted early", b1)
                v1, used = sc.gamma_decode(s1, b1 + 1)
                b1 += 1 + used
            else:
                z1 -= 1
            if z2 == 0:
                if b2 >= len2:
                    raise DecodeError("second encoding exhausted early", b2)
                v2, used = sc.gamma_decode(s2, b2 + 1)
                b2 += 1 + used
            else:
                z2 -= 1
            sc.append_literal(out, zip_symbol((v1, v2)))
            a += 1
        shared = min(z1, z2)
        z1 -= shared
        z2 -= shared
        a += shared
        z3 += shared
        if z1 or z2:
            raise DecodeError("zip inputs decode to different lengths")
        if z3:
            sc.append_zero_run(out, z3)
        return SparseEncoding(out, a)


_zipper_cache: dict[int, PairZipper] = {}


def _zipper(table_n: int) -> PairZipper:
    z = _zipper_cache.get(table_n)
    if z is None:
        z = PairZipper(table_n)
        _zipper_cache[table_n] = z
    return z


def zip_pair(e1: SparseEncoding, e2: SparseEncoding,
             table_n: int = DEFAULT_TABLE_N) -> SparseEncoding:
    return _zipper(table_n).zip(e1, e2)


def _relabel_spec() -> TransducerSpec:
    def delta(state, x):
        return 0, 0 if x == 0 else zip_symbol((x,))
    return TransducerSpec(1, 0, 1, delta, key="zip:relabel")


def _flatten_spec(arity: int) -> TransducerSpec:
    def delta(state, x):
        if x == 0:
            return 0, 0
        inner, last = unzip_symbol(x, 2)
        front = unzip_symbol(inner, arity - 1)
        return 0, zip_symbol(front + (last,))
    return TransducerSpec(1, 0, 1, delta, key=f"zip:flatten:{arity}")


def zip_multi(encodings: Sequence[SparseEncoding],
              table_n: int = DEFAULT_TABLE_N) -> SparseEncoding:
    """senc(zip(A_1..A_t)) from the individual encodings, recursively."""
    t = len(encodings)
    if t < 1:
        raise InvalidArgument("zip needs at least one stream")
    if t > 6:
        raise InvalidArgument("zip supports at most 6 streams")
    if t == 1:
        return accelerate_single(_relabel_spec(), table_n).run(encodings[0])
    acc = encodings[0]
    arity = 1
    for enc in encodings[1:]:
        pair = zip_pair(acc, enc, table_n)
        arity += 1
        if arity == 2:
            acc = pair
        else:
            acc = accelerate_single(_flatten_spec(arity), table_n).run(pair)
    return acc


def _reduced_spec(spec: TransducerSpec) -> TransducerSpec:
    if spec.arity == 1:
        return spec
    delta = spec.delta
    arity = spec.arity

    def delta1(state, x):
        return delta(state, *unzip_symbol(x, arity))

    key = None if spec.key is None else f"{spec.key}:reduced"
    return TransducerSpec(spec.num_states, spec.start, 1, delta1, key)


def run_multi(spec: TransducerSpec, encodings: Sequence[SparseEncoding],
              table_n: int = DEFAULT_TABLE_N) -> SparseEncoding:
    """Accelerated multi-stream execution: zip, then run the reduced spec."""
    if len(encodings) != spec.arity:
        raise InvalidArgument(
            f"expected {spec.arity} encodings, got {len(encodings)}")
    if spec.arity == 1:
        return accelerate_single(spec, table_n).run(encodings[0])
    zipped = zip_multi(encodings, table_n)
    return accelerate_single(_reduced_spec(spec), table_n).run(zipped)
