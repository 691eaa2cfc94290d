"""Compare the numba and pure-numpy edit-distance kernels.

Times the dictionary scan (the level-2 autocorrection hot path) and the
single-pair distance on the bundled word list.  Run directly:

    python benchmarks/bench_kernels.py

The active backend in normal use follows TYPESIM_PURE_NUMPY; here both
implementations are exercised explicitly.
"""

import random
import time


from typesim.bench import builtin_dictionary
from typesim.kernels import (_dl_distance_impl, _dl_distance_numpy,
                             _dl_scan_numpy, HAS_NUMBA, encode)


def _timeit(fn, n_iter):
    t0 = time.perf_counter()
    for _ in range(n_iter):
        fn()
    return (time.perf_counter() - t0) / n_iter


def main():
    dictionary = builtin_dictionary()
    codes, lens = dictionary.codes, dictionary.lens
    rng = random.Random(0)
    words = [w[:-1] + rng.choice("abcdefgh") for w in
             rng.sample(dictionary.words, 50) if len(w) > 3]
    encoded = [encode(w) for w in words]
    pair_a = encode("administration")
    pair_b = encode("administrative")

    rows = []

    def scan_numpy():
        for e in encoded:
            _dl_scan_numpy(e, codes, lens, 2)

    numpy_scan = _timeit(scan_numpy, 3) / len(encoded)
    rows.append(("dictionary scan (%d words)" % len(dictionary),
                 "numpy", numpy_scan))

    numpy_pair = _timeit(lambda: _dl_distance_numpy(pair_a, pair_b, 1 << 20),
                         200)
    rows.append(("pair distance (14 chars)", "numpy", numpy_pair))

    if HAS_NUMBA:
        from numba import njit
        dl = njit(cache=True)(_dl_distance_impl)

        @njit(cache=True)
        def scan_one(word, codes, lens, cap):
            best_idx = -1
            best = cap + 1
            wlen = word.shape[0]
            for i in range(codes.shape[0]):
                dlen = lens[i] - wlen
                if dlen > cap or -dlen > cap:
                    continue
                d = dl(word, codes[i, :lens[i]], cap)
                if d < best:
                    best = d
                    best_idx = i
                    if best <= 1:
                        break
            return best_idx, best

        scan_one(encoded[0], codes, lens, 2)  # compile
        dl(pair_a, pair_b, 1 << 20)

        def scan_numba():
            for e in encoded:
                scan_one(e, codes, lens, 2)

        numba_scan = _timeit(scan_numba, 20) / len(encoded)
        rows.append(("dictionary scan (%d words)" % len(dictionary),
                     "numba", numba_scan))
        numba_pair = _timeit(lambda: dl(pair_a, pair_b, 1 << 20), 2000)
        rows.append(("pair distance (14 chars)", "numba", numba_pair))

    print(f"{'kernel':<32}{'backend':<10}{'time':>12}")
    print("-" * 54)
    for name, backend, secs in rows:
        print(f"{name:<32}{backend:<10}{secs * 1e6:>10.1f}us")
    if HAS_NUMBA:
        print(f"\nscan speedup numba vs numpy: {numpy_scan / numba_scan:.1f}x")
    else:
        print("\nnumba unavailable: numpy path only")


if __name__ == "__main__":
    main()
