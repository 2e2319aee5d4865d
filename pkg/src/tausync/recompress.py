"""Restricted recompression: the descending boundary chain B_0 >= B_1 >= ... >= B_q.

Even rounds merge runs of identical short phrases; odd rounds merge
adjacent short-phrase pairs across an approximate maximum directed cut.
Two construction paths produce bit-identical chains:

* the linear path operates on explicit boundary/name/length arrays;
* the packed path simulates the initial rounds on boundary-context sets
  (one entry per distinct context), then switches to the linear rounds.

Both paths share the cut approximation and order its nodes by the
canonical (length, content) key, which pins down the whole chain.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .bitstream import BitStream
from .errors import InvalidArgument
from .text import PackedText, SubstringCounter, DEFAULT_FALLBACK_THRESHOLD


# -- phrase-length schedule ---------------------------------------------------

@lru_cache(maxsize=None)
def lambda_frac(k: int) -> tuple[int, int]:
    """lambda_k = (8/7)^(k//2) as an exact (numerator, denominator) pair."""
    h = k // 2
    return 8 ** h, 7 ** h


def lambda_floor(k: int) -> int:
    num, den = lambda_frac(k)
    return num // den


def lambda_ceil(k: int) -> int:
    num, den = lambda_frac(k)
    return -(-num // den)


def lambda_value(k: int) -> Fraction:
    num, den = lambda_frac(k)
    return Fraction(num, den)


@lru_cache(maxsize=None)
def alpha(k: int) -> int:
    """Context radius: alpha_0 = 1, alpha_k = alpha_{k-1} + floor(lambda_{k-1})."""
    if k == 0:
        return 1
    return alpha(k - 1) + lambda_floor(k - 1)


def len_le_lambda(length: int, k: int) -> bool:
    num, den = lambda_frac(k)
    return length * den <= num


def len_le_seven_quarters_lambda(length: int, k: int) -> bool:
    num, den = lambda_frac(k)
    return 4 * length * den <= 7 * num


def lambda_exceeds_4n(k: int, n: int) -> bool:
    num, den = lambda_frac(k)
    return num > 4 * n * den


def packed_round_count(n: int, bits_per_symbol: int,
                       threshold: int = DEFAULT_FALLBACK_THRESHOLD) -> int | None:
    """Number of context-simulated rounds K, or None when packing is off.

    K = 2 * floor(log_{8/7}(log_sigma(n) / threshold)), capped so contexts
    stay inside the padded text.
    """
    if n < 2 or threshold < 1:
        return None
    lg_n = n.bit_length() - 1
    # largest h with (8/7)^h <= lg(n) / (threshold * bits)
    h = -1
    while (8 ** (h + 1)) * threshold * bits_per_symbol <= (7 ** (h + 1)) * lg_n:
        h += 1
    if h < 0:
        return None
    k = 2 * h
    while k >= 0 and alpha(k + 1) > n:
        k -= 1
    return k if k >= 0 else None


# -- approximate maximum directed cut ----------------------------------------

def max_dicut(nodes: list, edges: dict) -> tuple[set, set]:
    """Partition nodes so edges from L to R carry >= 1/4 of total weight.

    Derandomized conditional expectations: nodes are placed in the given
    order on the side maximizing the expected cut, undecided endpoints
    counting as fair coins; ties go to L.  Deterministic for a fixed node
    order and weight map.
    """
    out_edges: dict = {u: [] for u in nodes}
    in_edges: dict = {u: [] for u in nodes}
    for (u, v), w in edges.items():
        if u == v:
            raise InvalidArgument("self-loop in cut instance")
        out_edges[u].append((v, w))
        in_edges[v].append((u, w))
    side: dict = {}
    L: set = set()
    R: set = set()
    for u in nodes:
        # doubled scores keep the comparison integral
        score_l = 0
        score_r = 0
        for v, w in out_edges[u]:
            sv = side.get(v)
            if sv is None:
                score_l += w
            elif sv == "R":
                score_l += 2 * w
        for v, w in in_edges[u]:
            sv = side.get(v)
            if sv is None:
                score_r += w
            elif sv == "L":
                score_r += 2 * w
        if score_l >= score_r:
            side[u] = "L"
            L.add(u)
        else:
            side[u] = "R"
            R.add(u)
    return L, R


# -- explicit levels ----------------------------------------------------------

@dataclass
class Level:
    """Boundary set B_k with aligned phrase names and lengths.

    ``boundaries`` lists the interior boundaries f_1 < ... < f_m; phrase i
    spans [f_i..f_{i+1}) with f_0 = 0 and f_{m+1} = n.
    """

    boundaries: list[int]
    names: list[int]
    lens: list[int]


class PhraseNamer:
    """O(1) exact window identity over one text via doubling ranks.

    Rank rows for power-of-two widths are built on demand; two windows get
    the same id iff they match symbol for symbol (no hashing involved).
    """

    def __init__(self, t: PackedText):
        self._text = t.text()
        self._n = t.n
        order = {v: r for r, v in enumerate(sorted(set(self._text)))}
        self._rows = [[order[v] for v in self._text]]

    def _row(self, level: int) -> list[int]:
        while len(self._rows) <= level:
            prev = self._rows[-1]
            width = 1 << (len(self._rows) - 1)
            pairs = [(prev[i], prev[i + width])
                     for i in range(self._n - 2 * width + 1)]
            remap = {p: r for r, p in enumerate(sorted(set(pairs)))}
            self._rows.append([remap[p] for p in pairs])
        return self._rows[level]

    def window_id(self, start: int, length: int):
        if length == 0:
            return ()
        level = length.bit_length() - 1
        row = self._row(level)
        return (row[start], row[start + length - (1 << level)])


def phrase_key(t: PackedText, start: int, length: int, k: int) -> tuple:
    """Canonical (length, truncated content) key; injective per round k.

    Truncation at 2*ceil(lambda_k) symbols is safe: longer phrases are
    periodic with root <= lambda_k, so the prefix pins them down.
    """
    trunc = min(length, 2 * lambda_ceil(k))
    return (length, t.symbols(start, trunc))


def _names_for(t: PackedText, boundaries: list[int], k: int,
               namer: PhraseNamer | None = None) -> tuple[list[int], list[int]]:
    n = t.n
    cuts = [0] + boundaries + [n]
    lens = [cuts[i + 1] - cuts[i] for i in range(len(cuts) - 1)]
    if namer is None:
        keys = [phrase_key(t, cuts[i], lens[i], k) for i in range(len(lens))]
    else:
        trunc = 2 * lambda_ceil(k)
        keys = [(lens[i], namer.window_id(cuts[i], min(lens[i], trunc)))
                for i in range(len(lens))]
    order = {key: rank for rank, key in enumerate(sorted(set(keys)))}
    return [order[key] for key in keys], lens


def level0(t: PackedText) -> Level:
    boundaries = list(range(1, t.n))
    names, lens = _names_for(t, boundaries, 0)
    return Level(boundaries, names, lens)


def round_even(t: PackedText, level: Level, k: int,
               namer: PhraseNamer | None = None) -> Level:
    """Even round: drop f_i iff both neighbor phrases are short and equal."""
    if k % 2:
        raise InvalidArgument("round_even requires even k")
    keep = []
    bounds = level.boundaries
    names, lens = level.names, level.lens
    for i, f in enumerate(bounds, start=1):
        short = (len_le_lambda(lens[i - 1], k)
                 and len_le_lambda(lens[i], k))
        if not short or names[i - 1] != names[i]:
            keep.append(f)
    new_names, new_lens = _names_for(t, keep, k + 1, namer)
    return Level(keep, new_names, new_lens)


def round_odd(t: PackedText, level: Level, k: int,
              namer: PhraseNamer | None = None) -> Level:
    """Odd round: drop f_i iff left phrase lands in L and right in R.

    Cut nodes are the distinct short phrases in canonical (length,
    content) order; each distinct phrase is materialized once.
    """
    if k % 2 == 0:
        raise InvalidArgument("round_odd requires odd k")
    bounds = level.boundaries
    lens = level.lens
    cuts = [0] + bounds + [t.n]
    short = [len_le_lambda(l, k) for l in lens]
    canon: dict = {}
    keys = [None] * len(lens)

    def key_of(i: int):
        key = keys[i]
        if key is None:
            if namer is None:
                key = phrase_key(t, cuts[i], lens[i], k)
            else:
                gid = (lens[i], namer.window_id(cuts[i], lens[i]))
                key = canon.get(gid)
                if key is None:
                    key = canon[gid] = (lens[i], t.symbols(cuts[i], lens[i]))
            keys[i] = key
        return key

    edges: dict = {}
    for i in range(1, len(cuts) - 1):
        if short[i - 1] and short[i]:
            e = (key_of(i - 1), key_of(i))
            edges[e] = edges.get(e, 0) + 1
    nodes = sorted({u for e in edges for u in e})
    L, R = max_dicut(nodes, edges)
    keep = []
    for i, f in enumerate(bounds, start=1):
        if short[i - 1] and short[i] and key_of(i - 1) in L and key_of(i) in R:
            continue
        keep.append(f)
    new_names, new_lens = _names_for(t, keep, k + 1, namer)
    return Level(keep, new_names, new_lens)


def next_level(t: PackedText, level: Level, k: int,
               namer: PhraseNamer | None = None) -> Level:
    if k % 2 == 0:
        return round_even(t, level, k, namer)
    return round_odd(t, level, k, namer)


class ChainHandle:
    """The full chain B_0 >= B_1 >= ... >= B_q = empty in explicit form."""

    def __init__(self, levels: list[list[int]], n: int):
        self.levels = levels          # levels[k] = sorted boundary list
        self.n = n
        self.q = len(levels) - 1      # first empty level

    def boundaries(self, k: int) -> list[int]:
        if k < 0:
            raise InvalidArgument("level must be non-negative")
        if k >= len(self.levels):
            return []
        return self.levels[k]

    def max_level(self) -> dict[int, int]:
        """Map position -> largest k with the position in B_k."""
        out: dict[int, int] = {}
        for k, bounds in enumerate(self.levels):
            for f in bounds:
                out[f] = k
        return out


def build_chain_linear(t: PackedText) -> ChainHandle:
    """Run all rounds explicitly until the boundary set empties."""
    namer = PhraseNamer(t) if t.n else None
    level = level0(t)
    levels = [list(level.boundaries)]
    k = 0
    while level.boundaries:
        level = next_level(t, level, k, namer)
        k += 1
        levels.append(list(level.boundaries))
    return ChainHandle(levels, t.n)


def continue_chain(t: PackedText, boundaries: list[int], k: int) -> list[list[int]]:
    """Levels B_{k+1}.. from an explicit B_k, via the linear rounds."""
    namer = PhraseNamer(t) if t.n else None
    names, lens = _names_for(t, boundaries, k, namer)
    level = Level(list(boundaries), names, lens)
    out = []
    while level.boundaries:
        level = next_level(t, level, k, namer)
        k += 1
        out.append(list(level.boundaries))
    return out


# -- packed path: boundary-context sets ---------------------------------------

class ContextSets:
    """Per-round sets C_k of boundary contexts, keyed by symbol tuples.

    A string of length 2*alpha_k is in C_k iff it matches the context
    T[i - alpha_k..i + alpha_k) of some i in B_k or an endpoint {0, n}.
    """

    def __init__(self, t: PackedText, K: int):
        self.t = t
        self.K = K
        pad = 2 * alpha(K)
        padded = ([t.sentinel] * pad) + t.text() + ([t.sentinel] * pad)
        self.counter = SubstringCounter(padded, b=max(1, 2 * alpha(K)))
        self.sets: list[set[tuple[int, ...]]] = []
        self._build()

    def _candidates(self, k: int) -> list[tuple[int, ...]]:
        """Distinct contexts of centers [0..n] at radius alpha_k, minus all-$."""
        t = self.t
        a = alpha(k)
        sentinel = t.sentinel
        seen = set()
        out = []
        for i in range(t.n + 1):
            ctx = t.symbols(i - a, 2 * a)
            if ctx in seen:
                continue
            seen.add(ctx)
            if all(s == sentinel for s in ctx):
                continue
            out.append(ctx)
        return out

    def _build(self) -> None:
        t = self.t
        if t.n == 0:
            self.sets = [set() for _ in range(self.K + 1)]
            return
        c0 = set(self._candidates(0))
        self.sets.append(c0)
        for k in range(self.K):
            self.sets.append(self._next_set(k))

    def _next_set(self, k: int) -> set[tuple[int, ...]]:
        ck = self.sets[k]
        a_k = alpha(k)
        a_next = alpha(k + 1)
        lam = lambda_floor(k)
        new_set: set[tuple[int, ...]] = set()
        pending: list[tuple[tuple[int, ...], int, int]] = []  # (S, ell, r)
        for ctx in self._candidates(k + 1):
            central = ctx[lam:lam + 2 * a_k]
            if central not in ck:
                continue
            ell = next((d for d in range(1, lam + 1)
                        if ctx[lam - d:lam + 2 * a_k - d] in ck), None)
            r = next((d for d in range(1, lam + 1)
                      if ctx[lam + d:lam + 2 * a_k + d] in ck), None)
            if ell is None or r is None:
                new_set.add(ctx)
            else:
                pending.append((ctx, ell, r))
        if k % 2 == 0:
            for ctx, ell, r in pending:
                if ctx[a_next - ell:a_next] != ctx[a_next:a_next + r]:
                    new_set.add(ctx)
        else:
            edges: dict = {}
            occ: dict = {}
            for ctx, ell, r in pending:
                left = ctx[a_next - ell:a_next]
                right = ctx[a_next:a_next + r]
                s = occ.get(ctx)
                if s is None:
                    s = occ[ctx] = self.counter.count(ctx)
                e = ((len(left), left), (len(right), right))
                edges[e] = edges.get(e, 0) + s
            nodes = sorted({u for e in edges for u in e})
            L, R = max_dicut(nodes, edges)
            for ctx, ell, r in pending:
                left = ctx[a_next - ell:a_next]
                right = ctx[a_next:a_next + r]
                if (len(left), left) in L and (len(right), right) in R:
                    continue
                new_set.add(ctx)
        return new_set

    def contains(self, k: int, ctx: tuple[int, ...]) -> bool:
        return ctx in self.sets[k]

    def membership_oracle(self, k: int):
        ck = self.sets[k]
        return lambda window: window in ck


def build_context_sets(t: PackedText,
                       threshold: int = DEFAULT_FALLBACK_THRESHOLD) -> ContextSets | None:
    """C_0..C_K for the packed rounds; None when the fallback applies."""
    K = packed_round_count(t.n, t.bits_per_symbol, threshold)
    if K is None:
        return None
    return ContextSets(t, K)


# -- bitmask reporting ---------------------------------------------------------

def oracle_bitmask(symbols, ell: int, oracle) -> BitStream:
    """Mark offsets i with symbols[i..i+ell) in the oracle's set, blockwise.

    Processes the sequence in blocks of 2*ell - 1 overlapping by ell - 1
    and memoizes the per-block mask by block content.
    """
    if ell < 1:
        raise InvalidArgument("window length must be positive")
    total = len(symbols)
    out = BitStream()
    if total < ell:
        return out
    memo: dict[tuple[int, ...], tuple[int, int]] = {}
    syms = tuple(symbols)
    for j in range(0, total // ell + (1 if total % ell else 0)):
        block = syms[j * ell:min(j * ell + 2 * ell - 1, total)]
        if len(block) < ell:
            break
        entry = memo.get(block)
        if entry is None:
            width = len(block) - ell + 1
            mask = 0
            for i in range(width):
                if oracle(block[i:i + ell]):
                    mask |= 1 << i
            entry = memo[block] = (mask, width)
        mask, width = entry
        take = min(width, total - ell + 1 - j * ell)
        out.append_bits_wide(mask & ((1 << take) - 1), take)
    return out


def context_to_bitmask(t: PackedText, oracle, ell: int,
                       start: int = 0, end: int | None = None) -> BitStream:
    """Oracle bitmask over the logical index range [start..end) of T."""
    if end is None:
        end = t.n
    return oracle_bitmask(t.symbols(start, end - start), ell, oracle)


_CHUNK_BITS = 16
_chunk_positions: list[tuple[int, ...]] | None = None


def bitmask_to_list(mask: BitStream) -> list[int]:
    """Set-bit positions in increasing order via a per-chunk lookup table."""
    global _chunk_positions
    if _chunk_positions is None:
        table = []
        for value in range(1 << _CHUNK_BITS):
            positions = []
            v = value
            while v:
                b = v & -v
                positions.append(b.bit_length() - 1)
                v ^= b
            table.append(tuple(positions))
        _chunk_positions = table
    table = _chunk_positions
    out = []
    n = len(mask)
    for base in range(0, n, _CHUNK_BITS):
        chunk = mask.read_bits(base, min(_CHUNK_BITS, n - base))
        if chunk:
            out.extend(base + p for p in table[chunk])
    return out


# -- public level reporting ----------------------------------------------------

class RecompressionIndex:
    """Preprocessed access to every level, in list or bitmask form."""

    def __init__(self, t: PackedText,
                 threshold: int = DEFAULT_FALLBACK_THRESHOLD,
                 force_linear: bool = False):
        self.t = t
        self.contexts = None if force_linear else build_context_sets(t, threshold)
        if self.contexts is None:
            self.chain = build_chain_linear(t)
        else:
            K = self.contexts.K
            levels = [self._level_from_context(k) for k in range(K + 1)]
            if levels[-1]:
                levels.extend(continue_chain(t, levels[-1], K))
            else:
                # trim to the first empty level
                while len(levels) > 1 and not levels[-2]:
                    levels.pop()
            self.chain = ChainHandle(levels, t.n)

    def _level_from_context(self, k: int) -> list[int]:
        mask = self.level_bitmask_packed(k)
        return bitmask_to_list(mask)

    def level_bitmask_packed(self, k: int) -> BitStream:
        """B_k as an n-bit mask from C_k, via the padded-text window scan."""
        t = self.t
        ctxs = self.contexts
        a = alpha(k)
        pad = [t.sentinel] * a
        symbols = pad + t.text() + pad
        mask = oracle_bitmask(symbols, 2 * a, ctxs.membership_oracle(k))
        # positions 0..n mark centers; drop 0 and n, keep interior as bit i
        out = BitStream()
        out.append_bits(0, 1)
        for i in range(1, t.n):
            out.append_bits(mask.get_bit(i), 1)
        return out

    def level_list(self, k: int) -> list[int]:
        if lambda_exceeds_4n(k, self.t.n):
            return []
        return self.chain.boundaries(k)

    def level_bitmask(self, k: int) -> BitStream:
        out = BitStream()
        n = self.t.n
        if n == 0:
            return out
        bits = [0] * n
        for f in self.level_list(k):
            bits[f] = 1
        for b in bits:
            out.append_bits(b, 1)
        return out


def preprocess_explicit(t: PackedText, **kwargs) -> RecompressionIndex:
    return RecompressionIndex(t, **kwargs)


def bk_explicit(index: RecompressionIndex, k: int) -> list[int]:
    return index.level_list(k)


def bk_bitmask(t: PackedText, k: int,
               index: RecompressionIndex | None = None, **kwargs) -> BitStream:
    if index is None:
        index = RecompressionIndex(t, **kwargs)
    return index.level_bitmask(k)
