"""Truncated-bitmap encoding of sorted id sets.

Three packed tiers: off (per-set start), idx (word ordinals), val (32-bit
words). Ordinal i covers ids [32*i, 32*i+31]; bit j of a word marks id
32*idx[t] + j. Empty words are never stored, so idx is strictly increasing
within a set and popcounts sum to the set cardinality.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass

import numpy as np

MAGIC = b"HTBDUMP1"
WORD_BITS = 32


class HtbSlice:
    """View of one encoded set: idx/val lists plus a [lo, hi) window.

    Slices over scratch buffers are reused in place; hi is the only field
    an intersection mutates.
    """

    __slots__ = ("idx", "val", "lo", "hi")

    def __init__(self, idx: list[int], val: list[int], lo: int = 0, hi: int | None = None):
        self.idx = idx
        self.val = val
        self.lo = lo
        self.hi = len(idx) if hi is None else hi

    def __len__(self) -> int:
        return self.hi - self.lo

    def cardinality(self) -> int:
        val = self.val
        return sum(val[t].bit_count() for t in range(self.lo, self.hi))

    def decode(self) -> list[int]:
        out = []
        idx, val = self.idx, self.val
        for t in range(self.lo, self.hi):
            base = idx[t] * WORD_BITS
            w = val[t]
            while w:
                low = w & -w
                out.append(base + low.bit_length() - 1)
                w ^= low
        return out

    @classmethod
    def from_ids(cls, ids) -> "HtbSlice":
        h = htb_build([ids])
        return h.slice(0)

    @classmethod
    def empty(cls) -> "HtbSlice":
        return cls([], [], 0, 0)


@dataclass
class Htb:
    """A family of encoded sets sharing one idx/val arena."""

    off: list[int]
    idx: list[int]
    val: list[int]

    @property
    def n_sets(self) -> int:
        return len(self.off) - 1

    @property
    def n_words(self) -> int:
        return len(self.idx)

    def slice(self, s: int) -> HtbSlice:
        if not 0 <= s < self.n_sets:
            raise IndexError(f"set index {s} out of range [0, {self.n_sets})")
        return HtbSlice(self.idx, self.val, self.off[s], self.off[s + 1])

    def decode(self, s: int) -> list[int]:
        return self.slice(s).decode()


def _encode_one(ids, idx_out: list[int], val_out: list[int]) -> None:
    a = np.asarray(ids, dtype=np.int64)
    if a.size == 0:
        return
    if a[0] < 0:
        raise ValueError("ids must be non-negative")
    if a.size > 1 and not (np.diff(a) > 0).all():
        raise ValueError("input set must be sorted and duplicate-free")
    word = a >> 5
    bit = (np.uint32(1) << (a & 31).astype(np.uint32))
    cut = np.flatnonzero(np.r_[True, word[1:] != word[:-1]])
    idx_out.extend(word[cut].tolist())
    val_out.extend(np.bitwise_or.reduceat(bit, cut).tolist())


def htb_build(sets) -> Htb:
    """Encode a family of sorted duplicate-free id lists.

    Raises ValueError on unsorted or duplicated input.
    """
    off = [0]
    idx: list[int] = []
    val: list[int] = []
    for s in sets:
        _encode_one(s, idx, val)
        off.append(len(idx))
    return Htb(off, idx, val)


def htb_decode(h: Htb, s: int) -> list[int]:
    return h.decode(s)


def htb_intersect(a: HtbSlice, b: HtbSlice, out: HtbSlice) -> HtbSlice:
    """Intersect two slices into caller-owned scratch.

    Walks the shorter idx, binary-searching the longer; matched words are
    ANDed and zero results dropped. Writes from out.lo, sets out.hi, and
    returns out. Scratch capacity past out.lo must be at least
    min(len(a), len(b)) words.
    """
    if a.hi - a.lo > b.hi - b.lo:
        a, b = b, a
    ai, av, t, ahi = a.idx, a.val, a.lo, a.hi
    bi, bv, blo, bhi = b.idx, b.val, b.lo, b.hi
    oi, ov = out.idx, out.val
    pos = out.lo
    if len(oi) - pos < ahi - t:
        raise ValueError("scratch capacity below min(len(a), len(b)) words")
    while t < ahi:
        w = ai[t]
        j = bisect_left(bi, w, blo, bhi)
        if j == bhi:
            break
        if bi[j] == w:
            x = av[t] & bv[j]
            if x:
                oi[pos] = w
                ov[pos] = x
                pos += 1
            blo = j + 1
        else:
            blo = j
        t += 1
    out.hi = pos
    return out


def htb_intersect_count(a: HtbSlice, b: HtbSlice, early_exit_at: int | None = None) -> int:
    """Popcount of the intersection without materializing it.

    With early_exit_at set, may return any value >= early_exit_at as soon
    as the threshold is met.
    """
    if a.hi - a.lo > b.hi - b.lo:
        a, b = b, a
    ai, av, t, ahi = a.idx, a.val, a.lo, a.hi
    bi, bv, blo, bhi = b.idx, b.val, b.lo, b.hi
    n = 0
    while t < ahi:
        w = ai[t]
        j = bisect_left(bi, w, blo, bhi)
        if j == bhi:
            break
        if bi[j] == w:
            x = av[t] & bv[j]
            if x:
                n += x.bit_count()
                if early_exit_at is not None and n >= early_exit_at:
                    return n
            blo = j + 1
        else:
            blo = j
        t += 1
    return n


def dump_htb(h: Htb, path) -> None:
    """Write off/idx/val as little-endian u32 behind an 8-byte magic."""
    with open(path, "wb") as f:
        f.write(MAGIC)
        np.asarray([h.n_sets, h.n_words], dtype="<u4").tofile(f)
        np.asarray(h.off, dtype="<u4").tofile(f)
        np.asarray(h.idx, dtype="<u4").tofile(f)
        np.asarray(h.val, dtype="<u4").tofile(f)


def load_htb(path) -> Htb:
    with open(path, "rb") as f:
        if f.read(8) != MAGIC:
            raise ValueError(f"{path}: not a bitmap dump (bad magic)")
        n_sets, n_words = np.fromfile(f, dtype="<u4", count=2)
        off = np.fromfile(f, dtype="<u4", count=int(n_sets) + 1)
        idx = np.fromfile(f, dtype="<u4", count=int(n_words))
        val = np.fromfile(f, dtype="<u4", count=int(n_words))
    if len(off) != n_sets + 1 or len(idx) != n_words or len(val) != n_words:
        raise ValueError(f"{path}: truncated dump")
    return Htb(off.tolist(), idx.tolist(), val.tolist())
