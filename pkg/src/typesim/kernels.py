"""Edit-distance kernels: numba-jitted hot paths with a pure-numpy fallback.

The level-2 autocorrection scans every dictionary word on each space press,
which makes the Damerau-Levenshtein distance the hot inner loop of large
simulation batches.  Both kernels exist twice: an @njit version and a
vectorized numpy version.  Set TYPESIM_PURE_NUMPY=1 to force the numpy
path (the numba path is used whenever numba imports and the flag is unset).

Strings enter as int32 code-point arrays (see encode/encode_words).
``benchmarks/bench_kernels.py`` compares the two paths.
"""

from __future__ import annotations

import os

import numpy as np

_FORCE_NUMPY = os.environ.get("TYPESIM_PURE_NUMPY", "") not in ("", "0")

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAS_NUMBA = False

USE_NUMBA = HAS_NUMBA and not _FORCE_NUMPY

_BIG = np.int64(1) << 30


def encode(word: str) -> np.ndarray:
    """Unicode code points of a word as an int32 array."""
    return np.fromiter(map(ord, word), dtype=np.int32, count=len(word))


def encode_words(words: list[str]) -> tuple[np.ndarray, np.ndarray]:
    """Pack a word list into a padded int32 matrix plus a length vector."""
    n = len(words)
    maxlen = max((len(w) for w in words), default=0)
    codes = np.zeros((n, max(maxlen, 1)), dtype=np.int32)
    lens = np.zeros(n, dtype=np.int32)
    for i, w in enumerate(words):
        lens[i] = len(w)
        for j, ch in enumerate(w):
            codes[i, j] = ord(ch)
    return codes, lens


# -- scalar kernel ----------------------------------------------------------

def _dl_distance_impl(a, b, cap):
    """Restricted Damerau-Levenshtein distance between two code arrays.

    Returns cap + 1 as soon as the distance provably exceeds cap.  A
    transposition can skip a DP row, so the early exit requires two
    consecutive row minima above the cap.
    """
    n = a.shape[0]
    m = b.shape[0]
    if n - m > cap or m - n > cap:
        return cap + 1
    if n == 0:
        return m
    if m == 0:
        return n
    prev2 = np.zeros(m + 1, dtype=np.int64)
    prev = np.empty(m + 1, dtype=np.int64)
    cur = np.empty(m + 1, dtype=np.int64)
    for j in range(m + 1):
        prev[j] = j
    prev_best = np.int64(0)
    for i in range(1, n + 1):
        cur[0] = i
        best = cur[0]
        for j in range(1, m + 1):
            cost = 0 if a[i - 1] == b[j - 1] else 1
            v = prev[j - 1] + cost
            if prev[j] + 1 < v:
                v = prev[j] + 1
            if cur[j - 1] + 1 < v:
                v = cur[j - 1] + 1
            if (i > 1 and j > 1 and a[i - 1] == b[j - 2]
                    and a[i - 2] == b[j - 1]):
                if prev2[j - 2] + 1 < v:
                    v = prev2[j - 2] + 1
            cur[j] = v
            if v < best:
                best = v
        if best > cap and prev_best > cap:
            return cap + 1
        prev_best = best
        for j in range(m + 1):
            prev2[j] = prev[j]
            prev[j] = cur[j]
    if prev[m] > cap:
        return cap + 1
    return prev[m]


# -- numpy fallback ---------------------------------------------------------

def _dl_distance_numpy(a, b, cap):
    """Row-vectorized restricted Damerau-Levenshtein distance."""
    n, m = len(a), len(b)
    if abs(n - m) > cap:
        return cap + 1
    if n == 0 or m == 0:
        return max(n, m)
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    cols = np.arange(m + 1, dtype=np.int64)
    prev2 = np.zeros(m + 1, dtype=np.int64)
    prev = cols.copy()
    prev_best = 0
    for i in range(1, n + 1):
        base = np.empty(m + 1, dtype=np.int64)
        base[0] = i
        cand = np.minimum(prev[:-1] + (a[i - 1] != b), prev[1:] + 1)
        if i > 1:
            tr_ok = np.zeros(m, dtype=bool)
            tr_ok[1:] = (b[:-1] == a[i - 1]) & (b[1:] == a[i - 2])
            tr_val = np.full(m, _BIG)
            tr_val[1:] = prev2[:m - 1] + 1
            cand = np.minimum(cand, np.where(tr_ok, tr_val, _BIG))
        base[1:] = cand
        # closed form of the left-to-right insertion relaxation
        cur = np.minimum.accumulate(base - cols) + cols
        best = int(cur.min())
        if best > cap and prev_best > cap:
            return cap + 1
        prev_best = best
        prev2, prev = prev, cur
    return int(min(prev[m], cap + 1))


def _dl_scan_numpy(word, codes, lens, cap):
    """Batch DP over every dictionary word at once."""
    n_words, maxlen = codes.shape
    wlen = len(word)
    feasible = np.abs(lens.astype(np.int64) - wlen) <= cap
    if wlen == 0 or not feasible.any():
        return -1, cap + 1
    word = np.asarray(word, dtype=np.int64)
    codes = codes.astype(np.int64, copy=False)
    cols = np.arange(maxlen + 1, dtype=np.int64)
    prev2 = np.zeros((n_words, maxlen + 1), dtype=np.int64)
    prev = np.broadcast_to(cols, (n_words, maxlen + 1)).copy()
    for i in range(1, wlen + 1):
        base = np.empty((n_words, maxlen + 1), dtype=np.int64)
        base[:, 0] = i
        cand = np.minimum(prev[:, :-1] + (codes != word[i - 1]), prev[:, 1:] + 1)
        if i > 1:
            tr_ok = np.zeros((n_words, maxlen), dtype=bool)
            tr_ok[:, 1:] = (codes[:, :-1] == word[i - 1]) & (codes[:, 1:] == word[i - 2])
            tr_val = np.full((n_words, maxlen), _BIG)
            tr_val[:, 1:] = prev2[:, :maxlen - 1] + 1
            cand = np.minimum(cand, np.where(tr_ok, tr_val, _BIG))
        base[:, 1:] = cand
        cur = np.minimum.accumulate(base - cols[None, :], axis=1) + cols[None, :]
        prev2, prev = prev, cur
    dists = prev[np.arange(n_words), lens]
    dists = np.where(feasible, dists, _BIG)
    best_idx = int(np.argmin(dists))  # argmin takes the first minimum: tie -> earliest entry
    best_dist = int(dists[best_idx])
    if best_dist > cap:
        return -1, cap + 1
    return best_idx, best_dist


if USE_NUMBA:
    _dl_distance = njit(cache=True)(_dl_distance_impl)

    @njit(cache=True)
    def _dl_scan_numba(word, codes, lens, cap):
        # First dictionary index achieving the minimal distance <= cap.
        # Dictionary order resolves ties; stopping at distance 1 is safe
        # because callers handle exact membership before scanning.
        best_idx = -1
        best_dist = cap + 1
        wlen = word.shape[0]
        for i in range(codes.shape[0]):
            dl = lens[i] - wlen
            if dl > cap or -dl > cap:
                continue
            d = _dl_distance(word, codes[i, :lens[i]], cap)
            if d < best_dist:
                best_dist = d
                best_idx = i
                if best_dist <= 1:
                    break
        return best_idx, best_dist

    _dl_scan = _dl_scan_numba
else:
    _dl_distance = _dl_distance_numpy
    _dl_scan = _dl_scan_numpy


def dl_distance(a: str | np.ndarray, b: str | np.ndarray,
                cap: int = 1 << 20) -> int:
    """Restricted Damerau-Levenshtein distance (adjacent swap = one edit).

    Distances above cap come back as cap + 1.
    """
    ca = encode(a) if isinstance(a, str) else a
    cb = encode(b) if isinstance(b, str) else b
    return int(_dl_distance(ca, cb, cap))


def dl_scan(word: str, codes: np.ndarray, lens: np.ndarray,
            cap: int = 2) -> tuple[int, int]:
    """Nearest dictionary entry to a word within the distance cap.

    Returns (index, distance), index -1 when nothing is within cap.  Ties
    resolve to the earliest dictionary entry.  Callers must handle exact
    membership (distance 0) themselves before scanning.
    """
    idx, dist = _dl_scan(encode(word), codes, lens, cap)
    return int(idx), int(dist)


def active_backend() -> str:
    return "numba" if USE_NUMBA else "numpy"
