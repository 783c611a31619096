"""Independent brute-force references used by the tests.

Nothing here calls the row reduction in ``mbqcorder.gf2``; independence is
decided by enumerating spans, reachability by graph search.
"""

from __future__ import annotations

import itertools
from collections import deque

import numpy as np


def span(vectors):
    """Set of all XOR combinations of packed vectors."""
    out = {0}
    for v in vectors:
        out |= {x ^ v for x in out}
    return out


def independent(vectors) -> bool:
    return len(span(vectors)) == 1 << len(vectors)


def rank(rows) -> int:
    basis = []
    for r in rows:
        if r not in span(basis):
            basis.append(r)
    return len(basis)


def columns(stacked):
    """Columns of a BitMatrix as packed ints over rows."""
    return [sum(((r >> j) & 1) << i for i, r in enumerate(stacked.rows)) for j in range(stacked.ncols)]


def basis_count(g) -> int:
    cols = columns(g.stacked)
    return sum(1 for c in itertools.combinations(cols, g.n) if independent(c))


def bases(g):
    cols = columns(g.stacked)
    return [idx for idx in itertools.combinations(range(2 * g.n), g.n) if independent([cols[i] for i in idx])]


def closure(t):
    """``out[a][b]`` iff b is reachable from a along edges a -> b (T[b, a] == 1)."""
    n = t.nrows
    succ = {a: [b for b in range(n) if t[b, a]] for a in range(n)}
    out = [[False] * n for _ in range(n)]
    for a in range(n):
        queue = deque(succ[a])
        while queue:
            b = queue.popleft()
            if out[a][b]:
                continue
            out[a][b] = True
            queue.extend(succ[b])
    return out


def gaugeable(g, a, ig, oc) -> bool:
    """Exhaustive search over all group elements for the gauge template at ``a``."""
    for _, word in g.elements():
        ok = (word.w >> (a - 1)) & 1 and not (word.v >> (a - 1)) & 1
        for b in range(1, g.n + 1):
            if b == a or not ok:
                continue
            w, v = (word.w >> (b - 1)) & 1, (word.v >> (b - 1)) & 1
            if b in ig and b not in oc:
                ok = not w and not v
            elif b not in ig and b not in oc:
                ok = not v
            elif b in ig and b in oc:
                ok = not w
        if ok:
            return True
    return False


# -- independent state construction -------------------------------------------


def plus_state(n):
    return np.full(1 << n, 2 ** (-n / 2), dtype=complex)


def graph_state_vector(edges, n):
    """CZ on every edge applied to |+>^n; qubit 1 most significant."""
    vec = plus_state(n)
    for b in range(1 << n):
        sign = 1
        for a, c in edges:
            if (b >> (n - a)) & 1 and (b >> (n - c)) & 1:
                sign = -sign
        vec[b] *= sign
    return vec


def fidelity(u, v) -> float:
    return abs(np.vdot(u, v)) ** 2
