"""Independent brute-force oracles the test suite checks the library against.

The alignment oracle enumerates every minimal edit script by exhaustive
depth-first search (pruned only by an independently computed cost-to-go)
and then applies the documented preference to pick the canonical script.
It shares no code with the production alignment.
"""

from functools import lru_cache

ORACLE_OP_RANK = {"sub": 0, "tra": 1, "omi": 2, "ins": 3}


def oracle_all_scripts(s: str, t: str) -> list[tuple]:
    """Every minimal-cost edit script from s to t, as (op, i, j) tuples."""

    @lru_cache(maxsize=None)
    def cost(i: int, j: int) -> int:
        if i == len(s) and j == len(t):
            return 0
        cands = []
        if i < len(s) and j < len(t):
            step = cost(i + 1, j + 1)
            cands.append(step if s[i] == t[j] else step + 1)
        if (i + 1 < len(s) and j + 1 < len(t)
                and s[i] == t[j + 1] and s[i + 1] == t[j]):
            cands.append(cost(i + 2, j + 2) + 1)
        if i < len(s):
            cands.append(cost(i + 1, j) + 1)
        if j < len(t):
            cands.append(cost(i, j + 1) + 1)
        return min(cands)

    scripts: list[tuple] = []
    acc: list = []

    def dfs(i: int, j: int) -> None:
        if i == len(s) and j == len(t):
            scripts.append(tuple(acc))
            return
        here = cost(i, j)
        if i < len(s) and j < len(t):
            if s[i] == t[j] and cost(i + 1, j + 1) == here:
                dfs(i + 1, j + 1)
            if s[i] != t[j] and cost(i + 1, j + 1) + 1 == here:
                acc.append(("sub", i, j))
                dfs(i + 1, j + 1)
                acc.pop()
        if (i + 1 < len(s) and j + 1 < len(t) and s[i] == t[j + 1]
                and s[i + 1] == t[j] and cost(i + 2, j + 2) + 1 == here):
            acc.append(("tra", i, j))
            dfs(i + 2, j + 2)
            acc.pop()
        if i < len(s) and cost(i + 1, j) + 1 == here:
            acc.append(("omi", i, j))
            dfs(i + 1, j)
            acc.pop()
        if j < len(t) and cost(i, j + 1) + 1 == here:
            acc.append(("ins", i, j))
            dfs(i, j + 1)
            acc.pop()

    dfs(0, 0)
    return scripts


def oracle_script_key(script: tuple) -> tuple:
    """The documented canonical preference among cost-equal scripts."""
    subs = sum(1 for op, _, _ in script if op == "sub")
    tras = sum(1 for op, _, _ in script if op == "tra")
    return (-subs, -tras,
            tuple((i, ORACLE_OP_RANK[op], j) for op, i, j in script))


def oracle_align(s: str, t: str) -> dict:
    """Counts of the canonical minimal edit script, by exhaustive search."""
    scripts = oracle_all_scripts(s, t)
    chosen = min(scripts, key=oracle_script_key)
    counts = {"insertions": 0, "omissions": 0, "substitutions": 0,
              "transpositions": 0}
    for op, _, _ in chosen:
        counts[{"ins": "insertions", "omi": "omissions",
                "sub": "substitutions", "tra": "transpositions"}[op]] += 1
    counts["distance"] = len(chosen)
    return counts


def canonical_pair(s: str, t: str) -> tuple[str, str]:
    """Relabel letters by first appearance: alignment counts are invariant
    under a consistent bijective relabeling, so oracle results can be
    shared across the orbit."""
    mapping: dict[str, str] = {}
    fresh = iter("abcdefghijklmnopqrstuvwxyz")
    out = []
    for ch in s + "\x00" + t:
        if ch == "\x00":
            out.append(ch)
            continue
        if ch not in mapping:
            mapping[ch] = next(fresh)
        out.append(mapping[ch])
    joined = "".join(out)
    cs, ct = joined.split("\x00")
    return cs, ct


def all_strings(alphabet: str, max_len: int) -> list[str]:
    out = [""]
    frontier = [""]
    for _ in range(max_len):
        frontier = [w + ch for w in frontier for ch in alphabet]
        out.extend(frontier)
    return out
