"""Sparse-output query path: level arrays, run markers, stream shifting,
and the transducer that emits the synchronizing-set mask directly as a
sparse encoding, optionally with rank/select support.

The per-text handle precomputes the boundary-level arrays (value at
position i = how many more levels keep i as a boundary) as sparse
encodings, plus run tables split by period scale: geometric length ranges
for large tau and per-position run descriptors for small tau.  A tau
query then runs a fixed five-stream transducer over shifted markers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .bitstream import BitStream
from .errors import InvalidArgument
from . import recompress as rc
from . import sparsecodec as sc
from . import transducer as td
from .ranksupport import RankSupport, SelectSupport
from .runs import DirectLce, PackedLce, enumerate_runs
from .sparsecodec import SparseEncoding
from .syncset import SyncIndex, build_sync_explicit
from .text import PackedText

RUNS_LENGTH_FACTOR = 2          # queried run lengths stay within [tau..2*tau]
_TRUNC = 4 * RUNS_LENGTH_FACTOR  # descriptor lengths truncated at 8 * P


def default_small_runs_limit(table_n: int, bits_per_symbol: int) -> int:
    lg_n = max(1, table_n.bit_length() - 1)
    return max(1, lg_n // ((16 * RUNS_LENGTH_FACTOR + 4) * bits_per_symbol))


# -- level arrays ---------------------------------------------------------------

def level_array(chain_max_level: dict[int, int], n: int, j: int) -> list[int]:
    """Dense level array: 0 at position 0, else max(0, maxlevel(i) - j + 1)."""
    out = [0] * n
    for i, k in chain_max_level.items():
        if i >= 1:
            out[i] = max(0, k - j + 1)
    if n:
        out[0] = 0
    return out


_DECREMENT = td.TransducerSpec(
    1, 0, 1, lambda s, x: (0, x - 1 if x > 0 else 0), key="level:decrement")


def _combine_spec(K: int) -> td.TransducerSpec:
    def delta(s, x, y):
        return 0, x if y == 0 else y + K
    return td.TransducerSpec(1, 0, 2, delta, key=f"level:combine:{K}")


def build_level0(t: PackedText, recomp: rc.RecompressionIndex,
                 table_n: int) -> SparseEncoding:
    """senc of the full level array, blockwise when contexts are available."""
    n = t.n
    max_level = recomp.chain.max_level()
    if recomp.contexts is None or n == 0:
        return sc.senc_encode(level_array(max_level, n, 0))
    K = recomp.contexts.K
    capped = _capped_levels_blockwise(t, recomp.contexts, K)
    pairs = sorted((i, k - K + 1) for i, k in max_level.items()
                   if k >= K and i >= 1)
    high = sc.senc_from_list(n, pairs)
    return td.run_multi(_combine_spec(K), [capped, high], table_n)


def _capped_levels_blockwise(t: PackedText, contexts: rc.ContextSets,
                             K: int) -> SparseEncoding:
    """senc of min(K, level + 1) per position, assembled from block tables."""
    n = t.n
    a_k = rc.alpha(K)
    sets = contexts.sets
    alphas = [rc.alpha(j) for j in range(K)]
    memo: dict = {}
    out = BitStream()

    def h_values(block: tuple[int, ...], central_len: int) -> list[int]:
        vals = []
        for i in range(central_len):
            h = 0
            for j in range(K, 0, -1):
                aj = alphas[j - 1]
                if block[i + a_k - aj:i + a_k + aj] in sets[j - 1]:
                    h = j
                    break
            vals.append(h)
        return vals

    blocks = -(-n // a_k)
    for h in range(blocks):
        start = (h - 1) * a_k
        end = min(n + a_k, (h + 2) * a_k)
        central_len = min(n, (h + 1) * a_k) - h * a_k
        block = t.symbols(start, end - start)
        if h == 0:
            vals = h_values(block, central_len)
            vals[0] = 0
            tokens = tuple(sc._tokens_of(vals))
        else:
            key = (block, central_len)
            tokens = memo.get(key)
            if tokens is None:
                tokens = tuple(sc._tokens_of(h_values(block, central_len)))
                memo[key] = tokens
        for is_literal, x in tokens:
            if is_literal:
                sc.append_literal(out, x)
            else:
                sc.append_zero_run(out, x)
    return SparseEncoding(out, n)


def derive_levels(level0: SparseEncoding, table_n: int) -> list[SparseEncoding]:
    """senc of every level array from level 0 down to the all-zero level."""
    n = level0.decoded_len
    zero = sc.senc_from_list(n, [])
    out = [level0]
    accel = td.accelerate_single(_DECREMENT, table_n)
    while out[-1].stream != zero.stream:
        out.append(accel.run(out[-1]))
    return out


# -- stream shifting -------------------------------------------------------------

def _shift_spec() -> td.TransducerSpec:
    def delta(s, x1, x2, x3):
        if x2:
            return 0, 1
        if x3:
            return 0, 0
        return 0, x1
    return td.TransducerSpec(1, 0, 3, delta, key="shift:mask")


def shift_truncate(enc: SparseEncoding, ell: int,
                   table_n: int = sc.DEFAULT_TABLE_N) -> SparseEncoding:
    """senc(V[ell..n) . 0^ell) from senc(V), by the three-stream rewrite."""
    n = enc.decoded_len
    if not 1 <= ell < n:
        raise InvalidArgument(f"shift {ell} outside [1..{n})")
    ones = BitStream()
    for _ in range(ell):
        sc.append_literal(ones, 1)
    v1 = BitStream()
    v1.append_stream(enc.stream)
    v1.append_stream(ones)
    v2 = BitStream()
    v2.append_stream(ones)
    sc.append_zero_run(v2, n)
    v3 = BitStream()
    sc.append_zero_run(v3, n)
    v3.append_stream(ones)
    streams = [SparseEncoding(v1, n + ell), SparseEncoding(v2, n + ell),
               SparseEncoding(v3, n + ell)]
    shifted = td.run_multi(_shift_spec(), streams, table_n)
    return SparseEncoding(shifted.stream.slice_bits(2 * ell,
                                                    len(shifted.stream) - 2 * ell),
                          n)


# -- run markers -----------------------------------------------------------------

# descriptor literal standing for "no relevant run here": code of senc([0])
_NO_RUN = sc.stream_to_msb_int(sc.senc_encode([0]).stream)


def _descriptor(pairs: Sequence[tuple[int, int]]) -> int:
    """Sentinel-coded senc of p1 l1 p2 l2 ... (or of [0] when empty)."""
    if not pairs:
        return _NO_RUN
    flat: list[int] = []
    for p, l in pairs:
        flat.append(p)
        flat.append(l)
    return sc.stream_to_msb_int(sc.senc_encode(flat).stream)


def _decode_descriptor(value: int) -> list[tuple[int, int]]:
    if value == _NO_RUN:
        return []
    vals = sc.decode_token_stream(sc.msb_int_to_stream(value))
    return [(vals[i], vals[i + 1]) for i in range(0, len(vals), 2)]


def _window_runs(window: tuple[int, ...]) -> list[tuple[int, int, int]]:
    """Maximal repetitions of the window string (definitional scan)."""
    n = len(window)
    found = []
    for p in range(1, n // 2 + 1):
        i = 0
        while i < n - p:
            if window[i] != window[i + p]:
                i += 1
                continue
            j = i
            while j < n - p and window[j] == window[j + p]:
                j += 1
            length = (j + p) - i
            if length >= 2 * p:
                # smallest-period check: reject if a shorter period fits
                frag = window[i:j + p]
                if all(not all(frag[x] == frag[x + q] for x in range(length - q))
                       for q in range(1, p)):
                    found.append((i, j + p, p))
            i = j + 1
    return found


class RunTables:
    """Start/end marker machinery for RUNS_{ell, tau//3} queries."""

    def __init__(self, t: PackedText, table_n: int,
                 small_limit: Optional[int] = None, lce=None):
        self.t = t
        self.table_n = table_n
        self.small_limit = (small_limit if small_limit is not None
                            else default_small_runs_limit(table_n,
                                                          t.bits_per_symbol))
        self.lce = lce if lce is not None else DirectLce(t)
        # exact thresholds floor(1.1^j) via integer scaling
        self.ranges: list[tuple[int, int]] = []
        j = 0
        while True:
            lo = 11 ** j // 10 ** j
            if lo > max(1, t.n):
                break
            self.ranges.append((lo, j))
            j += 1
        self._large: dict[int, tuple] = {}
        self._small: tuple | None = None

    # -- large-tau ranges ------------------------------------------------------

    def _range_of(self, tau: int) -> int:
        for lo, j in reversed(self.ranges):
            if lo <= tau:
                return j
        raise InvalidArgument(f"no run range covers tau={tau}")

    def _large_tables(self, j: int) -> tuple:
        entry = self._large.get(j)
        if entry is None:
            ell = 11 ** j // 10 ** j
            p = 4 * 11 ** j // (10 ** j * 10)
            runs = (enumerate_runs(self.t, ell, p, self.lce) if p >= 1 else [])
            n = self.t.n
            s_pairs = [(r.start, (r.period, r.end - r.start)) for r in runs]
            e_pairs = [(r.end - 1, (r.period, r.end - r.start)) for r in runs]
            entry = (
                runs,
                sc.senc_from_list(n, [(i, v[0]) for i, v in s_pairs]),
                sc.senc_from_list(n, [(i, v[1]) for i, v in s_pairs]),
                sc.senc_from_list(n, sorted((i, v[0]) for i, v in e_pairs)),
                sc.senc_from_list(n, sorted((i, v[1]) for i, v in e_pairs)),
            )
            self._large[j] = entry
        return entry

    # -- small-tau descriptor arrays --------------------------------------------

    def _small_tables(self) -> tuple:
        if self._small is None:
            self._small = self._build_small()
        return self._small

    def _build_small(self) -> tuple:
        t = self.t
        n = t.n
        P = self.small_limit
        trunc = _TRUNC * P
        start_memo: dict = {}
        end_memo: dict = {}

        def start_values(window: tuple[int, ...], central: int) -> tuple[int, ...]:
            # window covers absolute [base..), centrals at window index [1..central]
            per_pos: dict[int, list[tuple[int, int]]] = {}
            for wb, we, q in _window_runs(window):
                if q >= P or wb < 1 or wb > central:
                    continue
                obs = we - wb
                if we < len(window) and obs < 3 * q:
                    continue   # fully visible but too short to be relevant
                per_pos.setdefault(wb, []).append((q, min(obs, trunc)))
            return tuple(_descriptor(sorted(per_pos.get(i + 1, [])))
                         for i in range(central))

        def end_values(window: tuple[int, ...], central_lo: int,
                       central: int) -> tuple[int, ...]:
            # central closed ends live at window indices [central_lo..+central)
            per_pos: dict[int, list[tuple[int, int]]] = {}
            for wb, we, q in _window_runs(window):
                if q >= P or we > len(window) - 1:
                    continue
                idx = we - 1 - central_lo
                if not 0 <= idx < central:
                    continue
                obs = we - wb
                if wb > 0 and obs < 3 * q:
                    continue
                per_pos.setdefault(idx, []).append((q, min(obs, trunc)))
            return tuple(_descriptor(sorted(per_pos.get(i, [])))
                         for i in range(central))

        starts: list[int] = []
        ends: list[int] = []
        blocks = -(-n // P) if n else 0
        for x in range(blocks):
            central = min(n, (x + 1) * P) - x * P
            w_start = x * P - 1
            w_end = min((x + 1) * P + trunc, 2 * n)
            w = t.symbols(w_start, w_end - w_start)
            key = (w, central)
            vals = start_memo.get(key)
            if vals is None:
                vals = start_memo[key] = start_values(w, central)
            starts.extend(vals)
            w2_start = max(x * P - trunc, -n)
            w2_end = min((x + 1) * P + 1, 2 * n)
            w2 = t.symbols(w2_start, w2_end - w2_start)
            key2 = (w2, x * P - w2_start, central)
            vals2 = end_memo.get(key2)
            if vals2 is None:
                vals2 = end_memo[key2] = end_values(w2, x * P - w2_start, central)
            ends.extend(vals2)
        start_r0 = self._strip_no_run(sc.senc_encode(starts))
        end_r0 = self._strip_no_run(sc.senc_encode(ends))
        return self._filter_chain(start_r0), self._filter_chain(end_r0)

    def _strip_no_run(self, enc: SparseEncoding) -> SparseEncoding:
        def delta(s, x):
            return 0, 0 if x == _NO_RUN else x
        spec = td.TransducerSpec(1, 0, 1, delta, key="runs:strip")
        return td.accelerate_single(spec, self.table_n).run(enc)

    def _filter_chain(self, r0: SparseEncoding) -> list[SparseEncoding]:
        chain = [r0]
        P = self.small_limit
        j = 1
        while (1 << j) < max(2, P):
            bound = 3 * (1 << j)
            memo: dict[int, int] = {}

            def delta(s, x, bound=bound, memo=memo):
                if x == 0:
                    return 0, 0
                y = memo.get(x)
                if y is None:
                    kept = [(p, l) for p, l in _decode_descriptor(x) if l >= bound]
                    y = memo[x] = _descriptor(kept) if kept else 0
                return 0, y

            spec = td.TransducerSpec(1, 0, 1, delta,
                                     key=f"runs:filter:{P}:{j}")
            chain.append(td.accelerate_single(spec, self.table_n).run(chain[-1]))
            j += 1
        return chain

    # -- queries -----------------------------------------------------------------

    def markers(self, tau: int, ell: int) -> tuple[SparseEncoding, SparseEncoding]:
        """senc(S), senc(E): start and closed-end masks of RUNS_{ell, tau//3}."""
        t = self.t
        n = t.n
        if not 1 <= tau <= n:
            raise InvalidArgument(f"tau {tau} outside [1..{n}]")
        if not tau <= ell <= RUNS_LENGTH_FACTOR * tau:
            raise InvalidArgument("ell must lie in [tau..2*tau]")
        p = tau // 3
        empty = sc.senc_from_list(n, [])
        if p < 1 or n == 0:
            return empty, empty
        if p < self.small_limit:
            return self._small_query(tau, ell)
        return self._large_query(tau, ell)

    def _large_query(self, tau: int, ell: int):
        n = self.t.n
        j = self._range_of(tau)
        runs, s_per, s_len, e_per, e_len = self._large_tables(j)
        p = tau // 3
        lg2 = max(1, n.bit_length() - 1)
        if tau * tau * lg2 * lg2 > n:
            keep = [r for r in runs if r.end - r.start >= ell and r.period <= p]
            s = sc.senc_from_list(n, [(r.start, 1) for r in keep])
            e = sc.senc_from_list(n, sorted((r.end - 1, 1) for r in keep))
            return s, e

        def delta(state, xp, xl, p=p, ell=ell):
            return 0, 1 if xp and xp <= p and xl >= ell else 0

        spec = td.TransducerSpec(1, 0, 2, delta,
                                 key=f"runs:large:{j}:{tau}:{ell}")
        s = td.run_multi(spec, [s_per, s_len], self.table_n)
        e = td.run_multi(spec, [e_per, e_len], self.table_n)
        return s, e

    def _small_query(self, tau: int, ell: int):
        start_chain, end_chain = self._small_tables()
        p = tau // 3
        j = min(p.bit_length() - 1, len(start_chain) - 1)
        memo: dict[int, int] = {}

        def delta(s, x, p=p, ell=ell, memo=memo):
            if x == 0:
                return 0, 0
            y = memo.get(x)
            if y is None:
                y = memo[x] = (1 if any(q <= p and l >= ell
                                        for q, l in _decode_descriptor(x))
                               else 0)
            return 0, y

        spec = td.TransducerSpec(1, 0, 1, delta,
                                 key=f"runs:small:{self.small_limit}:{j}:{tau}:{ell}")
        accel = td.accelerate_single(spec, self.table_n)
        return accel.run(start_chain[j]), accel.run(end_chain[j])


# -- the sync transducer -----------------------------------------------------------

def _sync_spec() -> td.TransducerSpec:
    def delta(state, s_tau, e_tau, s_2tau, e_2tau, level):
        if s_2tau:
            return 1, 0
        if e_2tau:
            return 0, 1
        if s_tau or e_tau:
            return state, 1
        if state:
            return 1, 0
        return 0, 1 if level > 0 else 0

    return td.TransducerSpec(2, 0, 5, delta, key="sync:main")


def _and_spec() -> td.TransducerSpec:
    def delta(state, x, d):
        return 0, x if d else 0

    return td.TransducerSpec(1, 0, 2, delta, key="sync:domain")


@dataclass
class SyncSupport:
    """A sparse-encoded synchronizing set with rank/select support."""

    encoding: SparseEncoding
    select_support: SelectSupport
    rank_support: RankSupport

    @property
    def size(self) -> int:
        return self.select_support.count

    def select(self, j: int) -> int:
        return self.select_support.select(j)

    def rank(self, j: int) -> int:
        return self.rank_support.rank(j)


class FastSyncIndex:
    """Preprocessed handle answering sparse-output tau queries."""

    def __init__(self, t: PackedText, table_n: Optional[int] = None,
                 threshold: int = 256, small_runs_limit: Optional[int] = None,
                 force_linear: bool = False):
        self.t = t
        self.table_n = table_n if table_n is not None else t.table_n
        self.recomp = rc.RecompressionIndex(t, threshold=threshold,
                                            force_linear=force_linear)
        self.sync_index = SyncIndex(t, recomp=self.recomp)
        lce = (PackedLce(t) if t.bits_per_symbol * 4 <= 64 else DirectLce(t))
        self.runs = RunTables(t, self.table_n, small_runs_limit, lce)
        if t.n:
            level0 = build_level0(t, self.recomp, self.table_n)
            self.levels = derive_levels(level0, self.table_n)
        else:
            self.levels = [sc.senc_from_list(0, [])]

    def level_encoding(self, j: int) -> SparseEncoding:
        if j < len(self.levels):
            return self.levels[j]
        return sc.senc_from_list(self.t.n, [])

    def sync_sparse(self, tau: int) -> SparseEncoding:
        t = self.t
        n = t.n
        if tau < 1 or tau > n // 2:
            raise InvalidArgument(f"tau {tau} outside [1..{n // 2}]")
        lg2 = max(1, n.bit_length() - 1)
        if tau * tau * lg2 * lg2 > n:
            # explicit construction is affordable at this tau
            members = build_sync_explicit(self.sync_index, tau)
            return sc.senc_from_list(n, [(i, 1) for i in members])
        level = self.level_encoding(self.sync_index.k_of_tau(tau))
        b_hat = shift_truncate(level, tau, self.table_n)
        s1, e1 = self.runs.markers(tau, tau)
        s2, e2 = self.runs.markers(tau, 2 * tau)
        s1_hat = shift_truncate(s1, 1, self.table_n)
        if tau > 1:
            e1_hat = shift_truncate(e1, 2 * tau - 2, self.table_n)
            e2_hat = shift_truncate(e2, 2 * tau - 2, self.table_n)
        else:
            e1_hat, e2_hat = e1, e2
        mask = td.run_multi(_sync_spec(), [s1_hat, e1_hat, s2, e2_hat, b_hat],
                            self.table_n)
        domain_bits = BitStream()
        for _ in range(n - 2 * tau + 1):
            sc.append_literal(domain_bits, 1)
        if 2 * tau - 1:
            sc.append_zero_run(domain_bits, 2 * tau - 1)
        domain = SparseEncoding(domain_bits, n)
        return td.run_multi(_and_spec(), [mask, domain], self.table_n)

    def sync_with_support(self, tau: int) -> SyncSupport:
        enc = self.sync_sparse(tau)
        n = max(1, self.t.n)
        lg_n = max(1, n.bit_length() - 1)
        lg_tau = max(1, tau.bit_length() - 1)
        m = (len(enc.stream) // max(1, self.table_n.bit_length() - 1)
             + max(1, n * lg_tau // (tau * lg_n)))
        return SyncSupport(enc, SelectSupport(enc, self.table_n),
                           RankSupport(enc, self.table_n, m))

    def sync_handle(self, tau: int, with_support: bool = False):
        """Sparse-representation SyncSetHandle for one tau."""
        from .syncset import SyncSetHandle
        payload = (self.sync_with_support(tau) if with_support
                   else self.sync_sparse(tau))
        return SyncSetHandle("sparse", tau, self.t.n, payload)


def preprocess_fast(t: PackedText, **kwargs) -> FastSyncIndex:
    return FastSyncIndex(t, **kwargs)
