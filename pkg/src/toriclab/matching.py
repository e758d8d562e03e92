"""Exact minimum-weight perfect matching, the rough test, and the 2D failure oracle.

The matcher is a depth-first branch and bound over pairings: it always
extends the lowest unmatched vertex, tries partners in ascending index
order and prunes with an admissible nearest-partner bound, so the first
optimum found is the lexicographically smallest pair list among optimal
matchings.  Large instances fall back to blossom matching (networkx),
which is deterministic but does not enforce the lexicographic tie-break.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from .lattice import ContractViolation, Torus2D

try:
    from numba import njit

    _HAVE_NUMBA = True
except Exception:  # pragma: no cover - numba is expected to be present
    _HAVE_NUMBA = False

    def njit(*a, **k):
        def deco(f):
            return f
        return deco if not (len(a) == 1 and callable(a[0])) else a[0]


_BB_NODE_CAP = 400_000


@njit(cache=True)
def _bb_match(D: np.ndarray, node_cap: int):
    """Lex-min optimal perfect matching on a dense distance matrix.

    Returns (weight, partner array, nodes_used).  nodes_used == -1 signals
    the node cap was hit and the result is unreliable.
    """
    n = D.shape[0]
    half = n // 2
    partner = np.full(n, -1, np.int64)
    best_partner = np.full(n, -1, np.int64)
    best = np.inf
    sv = np.empty(half, np.int64)
    sj = np.empty(half, np.int64)
    sw = np.empty(half, np.float64)
    depth = 0
    cum = 0.0
    v = 0
    j = 0
    nodes = 0
    while True:
        found = False
        j += 1
        while j < n:
            if partner[j] < 0:
                w = D[v, j]
                if cum + w < best:
                    partner[v] = j
                    partner[j] = v
                    # admissible bound: half the sum of nearest free partners
                    lb = 0.0
                    for a in range(n):
                        if partner[a] < 0:
                            m = np.inf
                            for bq in range(n):
                                if bq != a and partner[bq] < 0:
                                    if D[a, bq] < m:
                                        m = D[a, bq]
                            lb += m
                    if cum + w + 0.5 * lb < best:
                        found = True
                        break
                    partner[v] = -1
                    partner[j] = -1
            j += 1
        nodes += 1
        if nodes > node_cap:
            return best, best_partner, -1
        if found:
            sv[depth] = v
            sj[depth] = j
            sw[depth] = cum
            cum += D[v, j]
            depth += 1
            if depth == half:
                best = cum
                best_partner[:] = partner
                depth -= 1
                v = sv[depth]
                j = sj[depth]
                cum = sw[depth]
                partner[v] = -1
                partner[j] = -1
            else:
                v2 = 0
                while partner[v2] >= 0:
                    v2 += 1
                v = v2
                j = v2
        else:
            if depth == 0:
                break
            depth -= 1
            v = sv[depth]
            j = sj[depth]
            cum = sw[depth]
            partner[v] = -1
            partner[j] = -1
    return best, best_partner, nodes


def _blossom_match(D: np.ndarray):
    """Exact min-weight perfect matching via blossom on the complete graph."""
    import networkx as nx

    n = D.shape[0]
    cmax = float(D.max()) + 1.0
    g = nx.Graph()
    for i in range(n):
        for j in range(i + 1, n):
            g.add_edge(i, j, weight=cmax - float(D[i, j]))
    mate = nx.max_weight_matching(g, maxcardinality=True)
    partner = np.full(n, -1, np.int64)
    for a, b in mate:
        partner[a] = b
        partner[b] = a
    weight = sum(float(D[a, partner[a]]) for a in range(n) if a < partner[a])
    return weight, partner


def match_partners(D: np.ndarray) -> Tuple[float, np.ndarray]:
    """Optimal partner array for an even set of points given their distances."""
    n = D.shape[0]
    if n == 0:
        return 0.0, np.empty(0, np.int64)
    if n % 2:
        raise ContractViolation(f"perfect matching needs an even vertex count, got {n}")
    if n == 2:
        return float(D[0, 1]), np.array([1, 0], np.int64)
    w, partner, nodes = _bb_match(np.asarray(D, np.float64), _BB_NODE_CAP)
    if nodes == -1:
        return _blossom_match(D)
    return float(w), partner


# ---------------------------------------------------------------------------
# metrics and the public matching API
# ---------------------------------------------------------------------------

def torus_taxicab(a, b, L: int) -> int:
    dx = abs(a[0] - b[0])
    dy = abs(a[1] - b[1])
    return min(dx, L - dx) + min(dy, L - dy)


def distance_matrix(points: Sequence, metric: str, L: int | None = None) -> np.ndarray:
    pts = np.asarray(points, dtype=np.float64)
    n = len(pts)
    D = np.zeros((n, n))
    if metric == "torus-taxicab":
        if L is None:
            raise ContractViolation("torus metric needs L")
        for i in range(n):
            for j in range(i + 1, n):
                D[i, j] = D[j, i] = torus_taxicab(pts[i], pts[j], L)
    elif metric == "euclidean":
        diff = pts[:, None, :] - pts[None, :, :]
        D = np.sqrt((diff * diff).sum(axis=2))
    else:
        raise ContractViolation(f"unknown metric {metric!r}")
    return D


@dataclass
class Pairing:
    pairs: List[Tuple[int, int]]
    total_weight: float


def mwm(defects: Sequence, metric: str = "torus-taxicab", L: int | None = None) -> Pairing:
    """Exact minimum-weight perfect matching of defect positions.

    `defects` is a sequence of coordinate tuples; pairs are returned as
    index pairs (i, j) with i < j, sorted, lexicographically smallest among
    optimal matchings (for instances within the branch-and-bound regime).
    """
    if len(defects) % 2:
        raise ContractViolation("odd defect count has no perfect matching")
    if not len(defects):
        return Pairing([], 0.0)
    D = distance_matrix(defects, metric, L)
    weight, partner = match_partners(D)
    pairs = sorted((i, int(partner[i])) for i in range(len(defects)) if i < partner[i])
    return Pairing(pairs, weight)


def shortest_wrap_steps(a: int, b: int, L: int) -> int:
    """Signed step count from a to b along the shorter wrap; east/north on ties."""
    fwd = (b - a) % L
    if fwd * 2 <= L:
        return fwd
    return fwd - L


def correction_from_pairing(defects: Sequence, pairing: Pairing, L: int) -> np.ndarray:
    """Edge chain realizing each pair as a minimal-wrap x-then-y path."""
    out = np.zeros((L, L, 2), np.uint8)
    for i, j in pairing.pairs:
        ax, ay = defects[i]
        bx, by = defects[j]
        sx = shortest_wrap_steps(ax, bx, L)
        x = ax
        for _ in range(abs(sx)):
            if sx > 0:
                out[x % L, ay % L, 0] ^= 1
                x += 1
            else:
                x -= 1
                out[x % L, ay % L, 0] ^= 1
        sy = shortest_wrap_steps(ay, by, L)
        y = ay
        for _ in range(abs(sy)):
            if sy > 0:
                out[bx % L, y % L, 1] ^= 1
                y += 1
            else:
                y -= 1
                out[bx % L, y % L, 1] ^= 1
    return out


# ---------------------------------------------------------------------------
# rough test and the failure oracle
# ---------------------------------------------------------------------------

def rough_test(error: np.ndarray, L: int) -> bool:
    """True (pass) unless more than L/2 rows or columns have odd error parity.

    Row r counts the L direction-x edges at height r; column c counts the
    L direction-y edges at abscissa c.  The inequality is strict.
    """
    odd_rows = int((error[:, :, 0].sum(axis=0) & 1).sum())
    odd_cols = int((error[:, :, 1].sum(axis=1) & 1).sum())
    return not (2 * odd_rows > L or 2 * odd_cols > L)


def mwm_failure(error: np.ndarray, L: int) -> bool:
    """Perfect-knowledge matching oracle: does E + R wind the torus?"""
    torus = Torus2D(L)
    synd = torus.syndrome(error)
    defects = [(int(x), int(y)) for x, y in zip(*np.nonzero(synd))]
    pairing = mwm(defects, "torus-taxicab", L)
    recovery = correction_from_pairing(defects, pairing, L)
    return any(torus.homology_bits(error ^ recovery))


def logical_failure_2d(error: np.ndarray, L: int, preselect: bool = True) -> bool:
    """Failure test run after every cycle: rough test preselects full matching."""
    if preselect and rough_test(error, L):
        return False
    return mwm_failure(error, L)
