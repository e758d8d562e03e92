"""Local decoders for the 4D toric code: box decoder, Toom rule, DKLP rule.

The box decoder works per hypercubic box of side l: restrict the syndrome,
match odd-incidence vertices under the Euclidean metric, connect matched
pairs by least-deviating monotone paths, close the loops, and apply the
minimum-weight correction surface found by exact GF(2) optimization
(kernel enumeration for small instances, an integer program otherwise).

The sweep decoders partition the 6 plane orientations in fixed order
(xy, xz, xw, yz, yw, zw) and update the effective syndrome between
groups; DKLP additionally splits each plane into a fixed checkerboard.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .lattice import FACE_PAIRS_4D, ContractViolation, Torus4D
from .matching import distance_matrix, match_partners

try:
    from numba import njit

    _HAVE_NUMBA = True
except Exception:  # pragma: no cover
    _HAVE_NUMBA = False

    def njit(*a, **k):
        def deco(f):
            return f
        return deco if not (len(a) == 1 and callable(a[0])) else a[0]


# ---------------------------------------------------------------------------
# configs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HastingsConfig:
    l: int = 3
    m: int = 5   # random box repositionings per QEC cycle

    def __post_init__(self):
        if self.l < 2:
            raise ContractViolation(f"box side must be >= 2, got {self.l}")
        if self.m < 1:
            raise ContractViolation(f"rounds must be >= 1, got {self.m}")

    def validate_for(self, L: int):
        if L // (self.l + 1) < 1:
            raise ContractViolation(f"no box of side {self.l} fits in L={L}")


@dataclass(frozen=True)
class SweepConfig:
    rule: str = "toom"
    repeats_per_plane: int = 1

    def __post_init__(self):
        if self.rule not in ("toom", "dklp"):
            raise ContractViolation(f"unknown sweep rule {self.rule!r}")
        if self.repeats_per_plane < 1:
            raise ContractViolation("repeats_per_plane must be >= 1")


def box_face_count(l: int) -> int:
    """Faces fully contained in a closed box of side l."""
    return 6 * l**4 + 12 * l**3 + 6 * l**2


@dataclass(frozen=True)
class Box:
    anchor: Tuple[int, int, int, int]
    l: int


def partition_boxes(L: int, l: int, offset: Sequence[int]) -> List[Box]:
    """Disjoint grid of floor(L/(l+1))^4 boxes of side l, translated by offset."""
    if l + 1 > L:
        raise ContractViolation(f"box side {l} does not fit in L={L}")
    off = tuple(int(o) % L for o in offset)
    if len(off) != 4:
        raise ContractViolation("offset must have 4 coordinates")
    g = L // (l + 1)
    anchors = [tuple((off[i] + (l + 1) * j[i]) % L for i in range(4))
               for j in product(range(g), repeat=4)]
    return [Box(a, l) for a in anchors]


# ---------------------------------------------------------------------------
# box-local complex
# ---------------------------------------------------------------------------

class BoxGeometry:
    """Cell tables for the closed box [0,l]^4 and its embedding in the torus."""

    def __init__(self, l: int):
        self.l = l
        n = l + 1
        self.n = n
        self.nv = n**4

        vid = np.arange(self.nv).reshape(n, n, n, n)
        self.vert_coord = np.array(list(np.ndindex(n, n, n, n)), np.int64)

        edge_base, edge_dir, edge_verts = [], [], []
        self.edge_id = np.full((n, n, n, n, 4), -1, np.int64)
        for base in np.ndindex(n, n, n, n):
            for d in range(4):
                if base[d] + 1 >= n:
                    continue
                other = list(base)
                other[d] += 1
                self.edge_id[base + (d,)] = len(edge_base)
                edge_base.append(base)
                edge_dir.append(d)
                edge_verts.append((vid[base], vid[tuple(other)]))
        self.ne = len(edge_base)
        self.edge_base = np.array(edge_base, np.int64)
        self.edge_dir = np.array(edge_dir, np.int64)
        self.edge_verts = np.array(edge_verts, np.int64)

        face_base, face_pair, face_edges = [], [], []
        for base in np.ndindex(n, n, n, n):
            for p, (mu, nu) in enumerate(FACE_PAIRS_4D):
                if base[mu] + 1 >= n or base[nu] + 1 >= n:
                    continue
                sh_mu = list(base)
                sh_mu[mu] += 1
                sh_nu = list(base)
                sh_nu[nu] += 1
                es = (self.edge_id[base + (mu,)],
                      self.edge_id[tuple(sh_nu) + (mu,)],
                      self.edge_id[base + (nu,)],
                      self.edge_id[tuple(sh_mu) + (nu,)])
                face_base.append(base)
                face_pair.append(p)
                face_edges.append(es)
        self.nf = len(face_base)
        self.face_base = np.array(face_base, np.int64)
        self.face_pair = np.array(face_pair, np.int64)
        self.face_edges = np.array(face_edges, np.int64)
        assert self.nf == box_face_count(l)

        # doubled midpoints for taxicab distances between cells
        self.edge_mid2 = 2 * self.edge_base.copy()
        self.edge_mid2[np.arange(self.ne), self.edge_dir] += 1
        self.face_mid2 = 2 * self.face_base.copy()
        for p, (mu, nu) in enumerate(FACE_PAIRS_4D):
            sel = self.face_pair == p
            self.face_mid2[sel, mu] += 1
            self.face_mid2[sel, nu] += 1

        # edge membership bitsets per face, packed for the GF(2) solver
        self.words = (self.nf + 63) // 64
        self._col_word = self.face_edges  # face -> 4 edge rows

    def global_edge_indices(self, anchor, L: int) -> np.ndarray:
        """Flat indices of the box edges in an (L,L,L,L,4) lattice array."""
        c = (self.edge_base + np.asarray(anchor)) % L
        flat = ((c[:, 0] * L + c[:, 1]) * L + c[:, 2]) * L + c[:, 3]
        return flat * 4 + self.edge_dir

    def global_face_indices(self, anchor, L: int) -> np.ndarray:
        c = (self.face_base + np.asarray(anchor)) % L
        flat = ((c[:, 0] * L + c[:, 1]) * L + c[:, 2]) * L + c[:, 3]
        return flat * 6 + self.face_pair


_GEOMS: dict[int, BoxGeometry] = {}


def box_geometry(l: int) -> BoxGeometry:
    if l not in _GEOMS:
        _GEOMS[l] = BoxGeometry(l)
    return _GEOMS[l]


def box_intersection_vertices(syndrome: np.ndarray, box: Box) -> List[Tuple[int, ...]]:
    """Vertices of the box incident to an odd number of in-box syndrome edges."""
    L = syndrome.shape[0]
    geom = box_geometry(box.l)
    s_loc = syndrome.ravel()[geom.global_edge_indices(box.anchor, L)]
    v_loc = _odd_vertices(s_loc, geom)
    return [tuple((geom.vert_coord[v] + np.asarray(box.anchor)) % L) for v in v_loc]


def _odd_vertices(s_loc: np.ndarray, geom: BoxGeometry) -> np.ndarray:
    inc = np.bincount(geom.edge_verts[s_loc.astype(bool)].ravel(), minlength=geom.nv)
    return np.nonzero(inc & 1)[0]


# ---------------------------------------------------------------------------
# least-deviating monotone paths
# ---------------------------------------------------------------------------

def _path_nodes_cost(u: np.ndarray, v: np.ndarray):
    """DP arrays over the monotone sub-box from u to v."""
    delta = v - u
    sgn = np.sign(delta)
    dims = np.abs(delta) + 1
    w = delta.astype(np.float64)
    ww = float(w @ w)
    grid = np.indices(dims).reshape(4, -1).T  # steps taken per axis
    pos = grid * sgn  # relative position
    proj = (pos @ w)
    cost = (pos * pos).sum(axis=1) - (proj * proj) / ww if ww else np.zeros(len(pos))
    return dims, sgn, cost.reshape(tuple(dims))


def least_deviating_path(u, v, geom: BoxGeometry, rng=None,
                         deterministic: bool = False) -> np.ndarray:
    """Edge ids of a minimal monotone path from u to v inside the box.

    Among all shortest (taxicab) monotone paths the one minimizing the sum
    of squared vertex distances to the straight u-v segment is returned;
    co-minimal paths are sampled uniformly unless deterministic, which
    picks the lexicographically first.
    """
    u = np.asarray(u, np.int64)
    v = np.asarray(v, np.int64)
    if np.array_equal(u, v):
        return np.empty(0, np.int64)
    dims, sgn, node_cost = _path_nodes_cost(u, v)
    best = np.full(tuple(dims), np.inf)
    count = np.zeros(tuple(dims), np.float64)
    best[(0,) * 4] = node_cost[(0,) * 4]
    count[(0,) * 4] = 1.0
    for idx in np.ndindex(tuple(dims)):
        if idx == (0, 0, 0, 0):
            continue
        m = np.inf
        c = 0.0
        for a in range(4):
            if idx[a] == 0:
                continue
            prev = list(idx)
            prev[a] -= 1
            pb = best[tuple(prev)]
            if pb < m - 1e-12:
                m = pb
                c = count[tuple(prev)]
            elif abs(pb - m) <= 1e-12:
                c += count[tuple(prev)]
        best[idx] = m + node_cost[idx]
        count[idx] = c
    # walk back from v sampling predecessors proportional to path counts
    edges = []
    idx = tuple(int(d - 1) for d in dims)
    while idx != (0, 0, 0, 0):
        opts = []
        m = np.inf
        for a in range(4):
            if idx[a] == 0:
                continue
            prev = list(idx)
            prev[a] -= 1
            pb = best[tuple(prev)]
            if pb < m - 1e-12:
                m = pb
                opts = [(a, tuple(prev))]
            elif abs(pb - m) <= 1e-12:
                opts.append((a, tuple(prev)))
        if len(opts) == 1 or deterministic:
            a, prev = opts[0]
        else:
            weights = np.array([count[p] for _, p in opts])
            pick = int(rng.choice(len(opts), p=weights / weights.sum()))
            a, prev = opts[pick]
        pos_now = u + np.array(idx) * sgn
        pos_prev = u + np.array(prev) * sgn
        lower = np.minimum(pos_now, pos_prev)
        edges.append(int(geom.edge_id[tuple(lower) + (a,)]))
        idx = prev
    return np.array(edges[::-1], np.int64)


# ---------------------------------------------------------------------------
# GF(2) minimum-weight surface
# ---------------------------------------------------------------------------

_ENUM_MAX = 17  # kernel dimensions up to this are enumerated exactly


@njit(cache=True)
def _popcount_words(words):
    total = 0
    for i in range(words.shape[0]):
        x = words[i]
        x = x - ((x >> np.uint64(1)) & np.uint64(0x5555555555555555))
        x = (x & np.uint64(0x3333333333333333)) + ((x >> np.uint64(2)) & np.uint64(0x3333333333333333))
        x = (x + (x >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
        total += int((x * np.uint64(0x0101010101010101)) >> np.uint64(56))
    return total


@njit(cache=True)
def _lex_smaller(a, b):
    """True if bitset a is lexicographically smaller than same-weight b.

    Equal-weight supports compare by their sorted index tuples, which for
    equal cardinality reduces to: the set containing the lowest differing
    index wins.
    """
    for i in range(a.shape[0]):
        d = a[i] ^ b[i]
        if d != np.uint64(0):
            low = d & (~d + np.uint64(1))
            return (a[i] & low) != np.uint64(0)
    return False


@njit(cache=True)
def _coset_minimum(particular, kernel):
    """Min-weight (then lex-min) element of particular + span(kernel)."""
    W = particular.shape[0]
    dk = kernel.shape[0]
    best = particular.copy()
    bw = _popcount_words(best)
    cur = particular.copy()
    g_prev = np.uint64(0)
    for i in range(1, 2 ** dk):
        g = np.uint64(i ^ (i >> 1))
        diff = g ^ g_prev
        g_prev = g
        b = 0
        while (diff >> np.uint64(b)) & np.uint64(1) == np.uint64(0):
            b += 1
        for w in range(W):
            cur[w] ^= kernel[b, w]
        cw = _popcount_words(cur)
        if cw < bw or (cw == bw and _lex_smaller(cur, best)):
            bw = cw
            for w in range(W):
                best[w] = cur[w]
    return best


def _gf2_solve(face_ids: np.ndarray, rows: np.ndarray,
               b: np.ndarray, geom: BoxGeometry):
    """Reduced row echelon solve of boundary(faces) = b over the given rows.

    Returns (particular, kernel_basis) as packed bitsets over the local
    column order face_ids, or None if infeasible.
    """
    m = face_ids.size
    words = (m + 63) // 64
    col_of = {int(f): i for i, f in enumerate(face_ids)}
    nrows = rows.size
    A = np.zeros((nrows, words), np.uint64)
    row_of = {int(e): i for i, e in enumerate(rows)}
    for ci, f in enumerate(face_ids):
        for e in geom.face_edges[f]:
            r = row_of.get(int(e))
            if r is not None:
                A[r, ci >> 6] ^= np.uint64(1) << np.uint64(ci & 63)
    bb = b.astype(np.uint8).copy()

    pivot_rows: list[int] = []
    pivot_cols: list[int] = []
    r0 = 0
    for c in range(m):
        wi, sh = c >> 6, np.uint64(c & 63)
        colbits = (A[:, wi] >> sh) & np.uint64(1)
        pivot = -1
        for r in range(r0, nrows):
            if colbits[r]:
                pivot = r
                break
        if pivot < 0:
            continue
        if pivot != r0:
            A[[r0, pivot]] = A[[pivot, r0]]
            bb[[r0, pivot]] = bb[[pivot, r0]]
        hit = np.nonzero((A[:, wi] >> sh) & np.uint64(1))[0]
        for r in hit:
            if r != r0:
                A[r] ^= A[r0]
                bb[r] ^= bb[r0]
        pivot_rows.append(r0)
        pivot_cols.append(c)
        r0 += 1
        if r0 == nrows:
            break
    for r in range(r0, nrows):
        if bb[r]:
            return None
    particular = np.zeros(words, np.uint64)
    for pr, pc in zip(pivot_rows, pivot_cols):
        if bb[pr]:
            particular[pc >> 6] |= np.uint64(1) << np.uint64(pc & 63)
    piv_set = set(pivot_cols)
    free_cols = [c for c in range(m) if c not in piv_set]
    kernel = np.zeros((len(free_cols), words), np.uint64)
    for ki, fc in enumerate(free_cols):
        kernel[ki, fc >> 6] |= np.uint64(1) << np.uint64(fc & 63)
        wi, sh = fc >> 6, np.uint64(fc & 63)
        for pr, pc in zip(pivot_rows, pivot_cols):
            if (A[pr, wi] >> sh) & np.uint64(1):
                kernel[ki, pc >> 6] ^= np.uint64(1) << np.uint64(pc & 63)
    return particular, kernel


def _unpack(bits: np.ndarray, m: int) -> np.ndarray:
    out = np.zeros(m, np.uint8)
    for c in range(m):
        if (bits[c >> 6] >> np.uint64(c & 63)) & np.uint64(1):
            out[c] = 1
    return out


def _milp_min_weight(face_ids: np.ndarray, rows: np.ndarray, b: np.ndarray,
                     geom: BoxGeometry) -> np.ndarray:
    """Exact integer program: min |x| with boundary parity constraints."""
    from scipy.optimize import Bounds, LinearConstraint, milp
    from scipy.sparse import lil_matrix

    m = face_ids.size
    nrows = rows.size
    row_of = {int(e): i for i, e in enumerate(rows)}
    A = lil_matrix((nrows, m + nrows))
    for ci, f in enumerate(face_ids):
        for e in geom.face_edges[f]:
            r = row_of.get(int(e))
            if r is not None:
                A[r, ci] = 1
    for r in range(nrows):
        A[r, m + r] = -2
    c = np.concatenate([np.ones(m), np.zeros(nrows)])
    res = milp(c=c, constraints=LinearConstraint(A.tocsc(), b, b),
               integrality=np.ones(m + nrows),
               bounds=Bounds(np.zeros(m + nrows),
                             np.concatenate([np.ones(m), np.full(nrows, 3.0)])))
    if not res.success:
        raise RuntimeError(f"integer program failed: {res.message}")
    return (np.asarray(res.x[:m]) > 0.5).astype(np.uint8)


def min_surface(s_correct: np.ndarray, geom: BoxGeometry,
                restrict: bool = True) -> np.ndarray:
    """Minimum-weight face set of the box whose boundary equals s_correct.

    s_correct is a local edge bit vector that must be a cycle of the box.
    The search is restricted to faces within taxicab distance l of the
    support (with a full-box retry if that ever proves infeasible); ties
    in weight resolve to the lexicographically smallest support in local
    face order, except on the integer-program fallback path.
    """
    out = np.zeros(geom.nf, np.uint8)
    supp = np.nonzero(s_correct)[0]
    if supp.size == 0:
        return out
    inc = np.bincount(geom.edge_verts[supp].ravel(), minlength=geom.nv)
    if (inc & 1).any():
        raise ContractViolation("s_correct has odd incidence: not a box cycle")

    comp = _edge_components(supp, geom)
    groups = _candidate_groups(supp, comp, geom, restrict)
    for cand, edge_rows in groups:
        b = s_correct[edge_rows]
        solved = _gf2_solve(cand, edge_rows, b, geom)
        if solved is None:
            if restrict:
                return min_surface(s_correct, geom, restrict=False)
            raise ContractViolation("no surface matches s_correct")
        particular, kernel = solved
        dk = kernel.shape[0]
        if dk == 0:
            x = _unpack(particular, cand.size)
        elif dk <= _ENUM_MAX:
            x = _unpack(_coset_minimum(particular, kernel), cand.size)
        else:
            x = _milp_min_weight(cand, edge_rows, b, geom)
        out[cand[x.astype(bool)]] ^= 1
    return out


def _edge_components(supp: np.ndarray, geom: BoxGeometry) -> np.ndarray:
    """Connected-component label per support edge (shared endpoints)."""
    parent = {}

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    vert_comp = {}
    for i, e in enumerate(supp):
        parent[i] = i
        for v in geom.edge_verts[e]:
            v = int(v)
            if v in vert_comp:
                ra, rb = find(vert_comp[v]), find(i)
                if ra != rb:
                    parent[rb] = ra
            else:
                vert_comp[v] = i
    return np.array([find(i) for i in range(len(supp))])


def _candidate_groups(supp: np.ndarray, comp: np.ndarray, geom: BoxGeometry,
                      restrict: bool):
    """(candidate faces, constraint edge rows) per merged component group."""
    if not restrict:
        cand = np.arange(geom.nf)
        return [(cand, np.arange(geom.ne))]
    l2 = 2 * geom.l
    groups = []
    for label in np.unique(comp):
        mids = geom.edge_mid2[supp[comp == label]]
        d = np.abs(geom.face_mid2[:, None, :] - mids[None, :, :]).sum(axis=2).min(axis=1)
        groups.append(np.nonzero(d <= l2)[0])
    # merge groups whose edge footprints intersect
    foots = []
    for cand in groups:
        fp = np.zeros(geom.ne, bool)
        fp[geom.face_edges[cand].ravel()] = True
        foots.append(fp)
    merged: list[tuple[np.ndarray, np.ndarray]] = []
    used = [False] * len(groups)
    for i in range(len(groups)):
        if used[i]:
            continue
        cand = np.zeros(geom.nf, bool)
        cand[groups[i]] = True
        fp = foots[i].copy()
        used[i] = True
        changed = True
        while changed:
            changed = False
            for j in range(len(groups)):
                if not used[j] and (fp & foots[j]).any():
                    cand[groups[j]] = True
                    fp |= foots[j]
                    used[j] = True
                    changed = True
        merged.append((np.nonzero(cand)[0], np.nonzero(fp)[0]))
    return merged


# ---------------------------------------------------------------------------
# per-box decode and the Hastings cycle
# ---------------------------------------------------------------------------

def _co_optimal_matchings(D: np.ndarray, weight: float, cap: int = 24):
    """All optimal pairings, in lexicographic order, up to cap."""
    n = D.shape[0]
    tol = 1e-9 * max(1.0, abs(weight))
    results: list[list[tuple[int, int]]] = []

    def rec(unmatched: list, cum: float, pairs: list):
        if len(results) >= cap:
            return
        if not unmatched:
            results.append(list(pairs))
            return
        i = unmatched[0]
        rest0 = unmatched[1:]
        for j in rest0:
            w = D[i, j]
            rest = [x for x in rest0 if x != j]
            if rest:
                sub = D[np.ix_(rest, rest)]
                wr, _ = match_partners(sub)
            else:
                wr = 0.0
            if cum + w + wr <= weight + tol:
                pairs.append((i, j))
                rec(rest, cum + w, pairs)
                pairs.pop()

    rec(list(range(n)), 0.0, [])
    return results


def _match_in_box(coords: np.ndarray, s_loc: np.ndarray, geom: BoxGeometry,
                  rng) -> list:
    """Euclidean matching of intersection vertices.

    Among co-optimal matchings the one leaving the smallest closed-loop
    set (most cancellation with the measured strings) is preferred, so
    locally minimal strings are left untouched; remaining ties take the
    lexicographically smallest pairing.
    """
    D = distance_matrix(coords, "euclidean")
    weight, partner = match_partners(D)
    pairs = sorted((i, int(partner[i])) for i in range(len(coords)) if i < partner[i])
    n = len(coords)
    if n > 10:
        return pairs
    cands = _co_optimal_matchings(D, weight)
    if len(cands) <= 1:
        return pairs
    best_pairs, best_size = None, None
    for cand in cands:
        s = s_loc.copy()
        for i, j in cand:
            path = least_deviating_path(coords[i], coords[j], geom, deterministic=True)
            s[path] ^= 1
        size = int(s.sum())
        if best_size is None or size < best_size:
            best_pairs, best_size = cand, size
    return best_pairs


def decode_box(syndrome_flat: np.ndarray, anchor, L: int, geom: BoxGeometry, rng):
    """One box decode: returns (edge ids, s_correct, face ids, R) or None."""
    eids = geom.global_edge_indices(anchor, L)
    s_loc = syndrome_flat[eids]
    if not s_loc.any():
        return None
    v_loc = _odd_vertices(s_loc, geom)
    s_corr = s_loc.copy()
    if v_loc.size:
        coords = geom.vert_coord[v_loc]
        for i, j in _match_in_box(coords, s_loc, geom, rng):
            path = least_deviating_path(coords[i], coords[j], geom, rng)
            s_corr[path] ^= 1
    if not s_corr.any():
        return None
    r = min_surface(s_corr, geom)
    if not r.any():
        return None
    fids = geom.global_face_indices(anchor, L)
    return eids, s_corr, fids, r


class HastingsDecoder:
    """Box decoder over m random repositionings per QEC cycle."""

    deterministic = False

    def __init__(self, L: int, config: HastingsConfig):
        config.validate_for(L)
        self.L = L
        self.config = config
        self.torus = Torus4D(L)
        self.geom = box_geometry(config.l)

    def cycle(self, measured: np.ndarray, rng) -> np.ndarray:
        """Decode one measured syndrome; returns the face flips to apply."""
        L = self.L
        eff = measured.astype(np.uint8).copy()
        eff_flat = eff.ravel()
        total = self.torus.empty_error()
        total_flat = total.ravel()
        for _ in range(self.config.m):
            offset = rng.integers(0, L, size=4)
            for box in partition_boxes(L, self.config.l, offset):
                res = decode_box(eff_flat, box.anchor, L, self.geom, rng)
                if res is None:
                    continue
                eids, s_corr, fids, r = res
                total_flat[fids[r.astype(bool)]] ^= 1
                eff_flat[eids] ^= s_corr  # boundary of r equals s_corr exactly
        return total


# ---------------------------------------------------------------------------
# Toom and DKLP sweeps
# ---------------------------------------------------------------------------

def _plane_edge_views(eff: np.ndarray, mu: int, nu: int):
    north = np.roll(eff[..., mu], -1, axis=nu)
    east = np.roll(eff[..., nu], -1, axis=mu)
    south = eff[..., mu]
    west = eff[..., nu]
    return north, east, south, west


def _apply_plane_flips(eff: np.ndarray, flips: np.ndarray, mu: int, nu: int):
    eff[..., mu] ^= flips ^ np.roll(flips, 1, axis=nu)
    eff[..., nu] ^= flips ^ np.roll(flips, 1, axis=mu)


def toom_sweep(eff: np.ndarray, total: np.ndarray):
    """One pass of the NE rule over the 6 plane groups, updating eff between
    groups; the north/east edges are those meeting at the face corner with
    the largest coordinates."""
    for slot, (mu, nu) in enumerate(FACE_PAIRS_4D):
        north, east, _, _ = _plane_edge_views(eff, mu, nu)
        flips = north & east
        if flips.any():
            total[..., slot] ^= flips
            _apply_plane_flips(eff, flips, mu, nu)


def dklp_sweep(eff: np.ndarray, total: np.ndarray, rng, parity_grids):
    """One pass of the DKLP majority rule over the 6 plane groups.

    Each plane group is split into a fixed checkerboard; a face flips with
    probability 1 on three or more non-trivial edges, 1/2 on exactly two,
    and never otherwise.  The effective syndrome updates between subsets.
    """
    shape = eff.shape[:4]
    for slot, (mu, nu) in enumerate(FACE_PAIRS_4D):
        for par in (0, 1):
            north, east, south, west = _plane_edge_views(eff, mu, nu)
            counts = (north.astype(np.uint8) + east + south + west)
            coin = rng.random(shape) < 0.5
            flips = ((counts >= 3) | ((counts == 2) & coin)) & (parity_grids[slot] == par)
            flips = flips.astype(np.uint8)
            if flips.any():
                total[..., slot] ^= flips
                _apply_plane_flips(eff, flips, mu, nu)


def checkerboard_grids(L: int) -> list:
    """Per plane orientation, the in-plane coordinate-sum parity of each face."""
    coords = np.indices((L, L, L, L))
    return [(coords[mu] + coords[nu]) % 2 for (mu, nu) in FACE_PAIRS_4D]


class SweepDecoder:
    """Toom or DKLP rule applied to every plane repeats_per_plane times."""

    def __init__(self, L: int, config: SweepConfig):
        self.L = L
        self.config = config
        self.torus = Torus4D(L)
        self.deterministic = config.rule == "toom"
        self._parity = checkerboard_grids(L) if config.rule == "dklp" else None

    def cycle(self, measured: np.ndarray, rng) -> np.ndarray:
        eff = measured.astype(np.uint8).copy()
        total = self.torus.empty_error()
        for _ in range(self.config.repeats_per_plane):
            if self.config.rule == "toom":
                toom_sweep(eff, total)
            else:
                dklp_sweep(eff, total, rng, self._parity)
        return total


def make_decoder(L: int, config):
    if isinstance(config, HastingsConfig):
        return HastingsDecoder(L, config)
    if isinstance(config, SweepConfig):
        return SweepDecoder(L, config)
    raise ContractViolation(f"unknown 4D decoder config {config!r}")
