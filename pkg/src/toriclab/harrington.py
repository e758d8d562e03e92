"""Hierarchical cellular-automaton decoder for the 2D toric code.

Level-0 cells sit on vertices and follow a three-step rule each tick:
annihilate with a nearest-neighbor defect, else with a next-nearest
(diagonal) defect, else step toward the colony center.  Q x Q colonies act
as level-1 cells whose syndrome is aggregated over a work period U from
the colony-center record; the same rule then runs on the coarse grid, with
corrections realized as straight qubit paths between colony centers,
delayed by the communication time and applied at work-period ends.

Direction indices are N=0, E=1, S=2, W=3 (also the tie-break priority) and
diagonals NE=0, NW=1, SE=2, SW=3.  x grows east, y grows north.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

try:
    from numba import njit

    _HAVE_NUMBA = True
except Exception:  # pragma: no cover
    _HAVE_NUMBA = False

N, E, S, W = 0, 1, 2, 3
NE, NW, SE, SW = 0, 1, 2, 3
DIR_VEC = ((0, 1), (1, 0), (0, -1), (-1, 0))
DIAG_VEC = ((1, 1), (-1, 1), (1, -1), (-1, -1))

# Quadrant / corridor arrow sets for step 1 (flip directions toward center).
_REGION_ARROWS = {
    "center": (),
    "WC": (E,), "EC": (W,), "SC": (N,), "NC": (S,),
    "SWQ": (E, N), "NWQ": (E, S), "SEQ": (W, N), "NEQ": (W, S),
}

# Both-components-away ties in step 2 resolve west, north, south, east.
_AWAY_TIE_ORDER = (W, N, S, E)


class ConfigError(ValueError):
    pass


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x)
    return Fraction(str(x))


@dataclass(frozen=True)
class HarringtonConfig:
    """Decoder parameters; defaults are the optimal non-division set."""

    Q: int = 3
    U: int = 10
    f_c: Fraction = Fraction(9, 10)
    f_n: Fraction = Fraction(4, 10)
    strategy: str = "non-division"
    b: Optional[int] = None
    tau: float = 1  # CA steps per QEC cycle; math.inf allowed for q=0 runs

    def __post_init__(self):
        object.__setattr__(self, "f_c", _as_fraction(self.f_c))
        object.__setattr__(self, "f_n", _as_fraction(self.f_n))
        if self.Q < 3 or self.Q % 2 == 0:
            raise ConfigError(f"Q must be odd and >= 3, got {self.Q}")
        if self.U < self.Q:
            raise ConfigError(f"U must be >= Q, got U={self.U} Q={self.Q}")
        for name, f in (("f_c", self.f_c), ("f_n", self.f_n)):
            if not (0 < f < 1):
                raise ConfigError(f"{name} must lie in (0,1), got {f}")
        if self.strategy not in ("non-division", "division"):
            raise ConfigError(f"unknown strategy {self.strategy!r}")
        if self.strategy == "division":
            if self.b is None or self.b * self.b != self.U:
                raise ConfigError("division strategy requires U = b^2")
        if self.tau != math.inf and (int(self.tau) != self.tau or self.tau < 1):
            raise ConfigError(f"tau must be a positive integer or inf, got {self.tau}")


def hierarchy_levels(L: int, Q: int) -> int:
    """k with L = Q^k, or raise."""
    k, m = 0, 1
    while m < L:
        m *= Q
        k += 1
    if m != L:
        raise ConfigError(f"L={L} is not a power of Q={Q}")
    return k


def classify_region(position_in_colony, Q: int) -> str:
    """One of the 8 colony parts or 'center' for a position in [0,Q)^2."""
    px, py = position_in_colony
    if not (0 <= px < Q and 0 <= py < Q):
        raise ConfigError(f"position {position_in_colony} outside colony of size {Q}")
    c = Q // 2
    if px == c and py == c:
        return "center"
    if py == c:
        return "WC" if px < c else "EC"
    if px == c:
        return "SC" if py < c else "NC"
    if px < c:
        return "SWQ" if py < c else "NWQ"
    return "SEQ" if py < c else "NEQ"


# ---------------------------------------------------------------------------
# rule tables
# ---------------------------------------------------------------------------

@dataclass
class RuleTables:
    """Per-cell flip rules for a G x G grid of cells in colonies of side Q."""

    G: int
    Q: int
    allowed1: np.ndarray    # (G,G,4) bool: step-1 flip directions
    key1: np.ndarray        # (G,G,4) uint8: step-1 target priority
    edge2: np.ndarray       # (G,G,4) int8: step-2 flip edge per diagonal, -1 = wait
    key2: np.ndarray        # (G,G,4) uint8
    move3: np.ndarray       # (G,G) int8: step-3 direction, -1 = hold (center)


def _step2_edge_choice(px, py, Q, allowed2, dx, dy):
    """Edge (N/E/S/W) flipped for a responded diagonal, or -1."""
    hd = E if dx > 0 else W
    vd = N if dy > 0 else S
    h_ok = hd in allowed2
    v_ok = vd in allowed2
    if not h_ok and not v_ok:
        return -1
    if h_ok != v_ok:
        return hd if h_ok else vd
    c = Q // 2
    tx, ty = c - px, c - py
    toward_h = tx != 0 and (1 if tx > 0 else -1) == dx
    toward_v = ty != 0 and (1 if ty > 0 else -1) == dy
    if toward_h and toward_v:
        if abs(tx) > abs(ty):
            return hd
        return vd  # vertical preferred on ties
    if toward_h:
        return hd
    if toward_v:
        return vd
    for d in _AWAY_TIE_ORDER:
        if d in (hd, vd):
            return d
    raise AssertionError


def build_rule_tables(G: int, Q: int) -> RuleTables:
    """Tables for a periodic G x G cell grid grouped into Q x Q colonies."""
    if G % Q != 0 and G != Q:
        raise ConfigError(f"grid size {G} not a multiple of colony size {Q}")
    c = Q // 2
    allowed1 = np.zeros((G, G, 4), bool)
    key1 = np.zeros((G, G, 4), np.uint8)
    edge2 = np.full((G, G, 4), -1, np.int8)
    key2 = np.zeros((G, G, 4), np.uint8)
    move3 = np.full((G, G), -1, np.int8)

    for x in range(G):
        for y in range(G):
            px, py = x % Q, y % Q
            region = classify_region((px, py), Q)
            arrows = set(_REGION_ARROWS[region])
            if px == 0:
                arrows.add(W)
            if py == 0:
                arrows.add(S)
            for d in arrows:
                allowed1[x, y, d] = True
            on_border = {N: py == Q - 1, E: px == Q - 1, S: py == 0, W: px == 0}
            for d in range(4):
                if on_border[d]:
                    cls = 0          # cross-colony annihilation first
                elif d not in arrows:
                    cls = 1          # then partners we cannot flip toward
                else:
                    cls = 2
                key1[x, y, d] = cls * 4 + d

            # Step 2: all outer cells may also flip across any of their
            # colony borders ("the exception now being all outer 0-cells").
            arrows2 = set(arrows)
            if px == Q - 1:
                arrows2.add(E)
            if py == Q - 1:
                arrows2.add(N)
            for g, (dx, dy) in enumerate(DIAG_VEC):
                edge2[x, y, g] = _step2_edge_choice(px, py, Q, arrows2, dx, dy)
                crosses = (on_border[E] and dx > 0) or (on_border[W] and dx < 0) \
                    or (on_border[N] and dy > 0) or (on_border[S] and dy < 0)
                if crosses:
                    cls = 0
                elif edge2[x, y, g] < 0:
                    cls = 1
                else:
                    cls = 2
                key2[x, y, g] = cls * 4 + g

            # Step 3: corridors move along the corridor; quadrants move
            # toward the furthest corridor, north/south preferred on ties.
            if region == "center":
                move3[x, y] = -1
            elif region in ("WC", "EC", "SC", "NC"):
                move3[x, y] = _REGION_ARROWS[region][0]
            else:
                hd = E if px < c else W
                vd = N if py < c else S
                if abs(c - px) > abs(c - py):
                    move3[x, y] = hd
                else:
                    move3[x, y] = vd
    return RuleTables(G, Q, allowed1, key1, edge2, key2, move3)


# ---------------------------------------------------------------------------
# one CA step (shared by level 0 and the coarse levels)
# ---------------------------------------------------------------------------

def _neighbor_stacks(bits: np.ndarray):
    nn = np.stack([
        np.roll(bits, -1, axis=1),   # N neighbor value
        np.roll(bits, -1, axis=0),   # E
        np.roll(bits, 1, axis=1),    # S
        np.roll(bits, 1, axis=0),    # W
    ], axis=2)
    dg = np.stack([
        np.roll(bits, (-1, -1), axis=(0, 1)),  # NE
        np.roll(bits, (1, -1), axis=(0, 1)),   # NW
        np.roll(bits, (-1, 1), axis=(0, 1)),   # SE
        np.roll(bits, (1, 1), axis=(0, 1)),    # SW
    ], axis=2)
    return nn, dg


def select_actions(own: np.ndarray, nn: np.ndarray, dg: np.ndarray,
                   tables: RuleTables):
    """Flip direction per cell (-1 none) and mask of cells that committed.

    `own` marks cells holding a defect; `nn`/`dg` are their beliefs about
    the 4 nearest and 4 diagonal neighbors.  A cell that pairs with a
    neighbor it cannot flip toward commits without flipping (the partner
    is expected to flip); holding still at the colony center is not a
    commitment.
    """
    own = own.astype(bool)
    has_nn = nn.any(axis=2) & own
    has_dg = dg.any(axis=2) & own & ~has_nn
    step3 = own & ~has_nn & ~has_dg

    flip_dir = np.full(own.shape, -1, np.int8)

    k1 = np.where(nn, tables.key1, np.uint8(255))
    choice1 = np.argmin(k1, axis=2)
    ok1 = np.take_along_axis(tables.allowed1, choice1[..., None], axis=2)[..., 0]
    flip_dir[has_nn & ok1] = choice1[has_nn & ok1]

    k2 = np.where(dg, tables.key2, np.uint8(255))
    choice2 = np.argmin(k2, axis=2)
    edge = np.take_along_axis(tables.edge2, choice2[..., None], axis=2)[..., 0]
    sel2 = has_dg & (edge >= 0)
    flip_dir[sel2] = edge[sel2]

    sel3 = step3 & (tables.move3 >= 0)
    flip_dir[sel3] = tables.move3[sel3]

    committed = has_nn | has_dg | sel3
    return flip_dir, committed


def flips_from_dirs(flip_dir: np.ndarray):
    """Scatter per-cell flip directions to (horizontal, vertical) edge arrays."""
    fh = (flip_dir == E).astype(np.uint8)
    fh ^= np.roll((flip_dir == W).astype(np.uint8), -1, axis=0)
    fv = (flip_dir == N).astype(np.uint8)
    fv ^= np.roll((flip_dir == S).astype(np.uint8), -1, axis=1)
    return fh, fv


def defect_delta(fh: np.ndarray, fv: np.ndarray) -> np.ndarray:
    """Vertex toggles produced by a set of edge flips."""
    return fh ^ np.roll(fh, 1, axis=0) ^ fv ^ np.roll(fv, 1, axis=1)


def level0_step(defects: np.ndarray, tables: RuleTables):
    """One tick of the local rules against a defect array; returns edge flips."""
    nn, dg = _neighbor_stacks(defects.astype(bool))
    flip_dir, _ = select_actions(defects, nn, dg, tables)
    return flips_from_dirs(flip_dir)


if _HAVE_NUMBA:

    @njit(cache=True)
    def _ca_step_kernel(eff, allowed1, key1, edge2, key2, move3, fh, fv, dirs):
        """In-place CA tick: flips XOR into fh/fv, defects toggled in eff.

        Scalar twin of level0_step + defect_delta for the hot loop; the
        vectorized version is the reference it is tested against.
        """
        L = eff.shape[0]
        for x in range(L):
            for y in range(L):
                dirs[x, y] = -1
                if eff[x, y] == 0:
                    continue
                xe = x + 1 if x + 1 < L else 0
                xw = x - 1 if x > 0 else L - 1
                yn = y + 1 if y + 1 < L else 0
                ys = y - 1 if y > 0 else L - 1
                n0 = eff[x, yn]
                n1 = eff[xe, y]
                n2 = eff[x, ys]
                n3 = eff[xw, y]
                if n0 or n1 or n2 or n3:
                    bk = 255
                    bd = -1
                    if n0 and key1[x, y, 0] < bk:
                        bk = key1[x, y, 0]
                        bd = 0
                    if n1 and key1[x, y, 1] < bk:
                        bk = key1[x, y, 1]
                        bd = 1
                    if n2 and key1[x, y, 2] < bk:
                        bk = key1[x, y, 2]
                        bd = 2
                    if n3 and key1[x, y, 3] < bk:
                        bk = key1[x, y, 3]
                        bd = 3
                    if allowed1[x, y, bd]:
                        dirs[x, y] = bd
                    continue
                d0 = eff[xe, yn]
                d1 = eff[xw, yn]
                d2 = eff[xe, ys]
                d3 = eff[xw, ys]
                if d0 or d1 or d2 or d3:
                    bk = 255
                    bg = -1
                    if d0 and key2[x, y, 0] < bk:
                        bk = key2[x, y, 0]
                        bg = 0
                    if d1 and key2[x, y, 1] < bk:
                        bk = key2[x, y, 1]
                        bg = 1
                    if d2 and key2[x, y, 2] < bk:
                        bk = key2[x, y, 2]
                        bg = 2
                    if d3 and key2[x, y, 3] < bk:
                        bk = key2[x, y, 3]
                        bg = 3
                    dirs[x, y] = edge2[x, y, bg]
                    continue
                dirs[x, y] = move3[x, y]
        for x in range(L):
            for y in range(L):
                d = dirs[x, y]
                if d < 0:
                    continue
                if d == 0:  # N: vertical edge at (x, y)
                    fv[x, y] ^= 1
                    yn = y + 1 if y + 1 < L else 0
                    eff[x, y] ^= 1
                    eff[x, yn] ^= 1
                elif d == 1:  # E: horizontal edge at (x, y)
                    fh[x, y] ^= 1
                    xe = x + 1 if x + 1 < L else 0
                    eff[x, y] ^= 1
                    eff[xe, y] ^= 1
                elif d == 2:  # S: vertical edge at (x, y-1)
                    ys = y - 1 if y > 0 else L - 1
                    fv[x, ys] ^= 1
                    eff[x, y] ^= 1
                    eff[x, ys] ^= 1
                else:  # W: horizontal edge at (x-1, y)
                    xw = x - 1 if x > 0 else L - 1
                    fh[xw, y] ^= 1
                    eff[x, y] ^= 1
                    eff[xw, y] ^= 1


def level0_flip_decisions(defects: np.ndarray, Q: int):
    """Per-cell decisions as (issuing vertex, edge) pairs, for inspection.

    The edge is given as (x, y, o) with o=0 the edge east of (x, y) and
    o=1 the edge north of it.
    """
    L = defects.shape[0]
    tables = build_rule_tables(L, Q)
    nn, dg = _neighbor_stacks(defects.astype(bool))
    flip_dir, _ = select_actions(defects, nn, dg, tables)
    out = []
    for x, y in zip(*np.nonzero(flip_dir >= 0)):
        d = int(flip_dir[x, y])
        if d == N:
            edge = (int(x), int(y), 1)
        elif d == S:
            edge = (int(x), int((y - 1) % L), 1)
        elif d == E:
            edge = (int(x), int(y), 0)
        else:
            edge = (int((x - 1) % L), int(y), 0)
        out.append(((int(x), int(y)), edge))
    return out


# ---------------------------------------------------------------------------
# syndrome aggregation
# ---------------------------------------------------------------------------

def aggregate_own_defect(record, config: HarringtonConfig) -> int:
    """Work-period record of U bits -> level defect bit, at-least semantics."""
    bits = np.asarray(record, dtype=np.uint8)
    if bits.size != config.U:
        raise ConfigError(f"record length {bits.size} != U={config.U}")
    return _aggregate(bits, config.f_c, config)


def aggregate_neighbor_defect(record, f_n, config: Optional[HarringtonConfig] = None) -> int:
    """Same thresholding as the own-defect decision but with f_n."""
    f_n = _as_fraction(f_n)
    bits = np.asarray(record, dtype=np.uint8)
    if config is None:
        config = HarringtonConfig(U=max(bits.size, 3), f_n=f_n)
    if bits.size != config.U:
        raise ConfigError(f"record length {bits.size} != U={config.U}")
    return _aggregate(bits, f_n, config)


def _aggregate(bits: np.ndarray, frac: Fraction, config: HarringtonConfig) -> int:
    if config.strategy == "non-division":
        return int(int(bits.sum()) * frac.denominator >= frac.numerator * config.U)
    b = config.b
    blocks = bits.reshape(b, b).sum(axis=1)
    good = int((blocks * frac.denominator >= frac.numerator * b).sum())
    return int(good * frac.denominator >= frac.numerator * b)


# ---------------------------------------------------------------------------
# the hierarchy
# ---------------------------------------------------------------------------

@dataclass
class _Level:
    i: int
    G: int
    period: int          # U^i
    child_period: int    # U^(i-1)
    lag_samples: int     # ceil(Q^i / U^(i-1)): neighbor-stream delay in samples
    span: int            # Q^i: physical cell distance between representatives
    tables: RuleTables
    buf: np.ndarray      # (G,G,buflen) ring of child-center defect samples
    buflen: int
    defect: np.ndarray   # (G,G) current decided level-i defect
    masked_until: np.ndarray  # (G,G) absolute step until which records read 0
    child_idx: Optional[tuple] = None  # grid positions of child centers


@dataclass
class PendingCorrection:
    apply_at: int
    level: int
    h_edges: np.ndarray  # flat indices into an (L,L) horizontal-edge array
    v_edges: np.ndarray
    endpoints: np.ndarray  # flat vertex indices whose defects toggle


class HarringtonDecoder:
    """Stateful decoder; one instance per trial.

    run_cycle() consumes one measured syndrome, executes tau CA steps
    against it, and returns the physical edge flips applied during the
    cycle (including any scheduled colony corrections falling due).
    """

    def __init__(self, L: int, config: HarringtonConfig, trace=None):
        self.L = L
        self.config = config
        self.k = hierarchy_levels(L, config.Q)
        self.tables0 = build_rule_tables(L, config.Q)
        self.t = 0
        self.trace = trace
        self._pending: dict[int, list[PendingCorrection]] = {}
        self._use_kernel = _HAVE_NUMBA
        self._a1 = self.tables0.allowed1.astype(np.uint8)
        self._k1 = self.tables0.key1
        self._e2 = self.tables0.edge2
        self._k2 = self.tables0.key2
        self._m3 = self.tables0.move3
        self._dirs = np.empty((L, L), np.int8)

        Q, U = config.Q, config.U
        self.levels: list[_Level] = []
        for i in range(1, self.k):
            G = L // Q**i
            period = U**i
            child_period = U ** (i - 1)
            lag = -(-(Q**i) // child_period)
            buflen = U * child_period + lag * child_period + 1
            # ring stores one slot per child period tick
            nslots = U + lag + 1
            lvl = _Level(
                i=i, G=G, period=period, child_period=child_period,
                lag_samples=lag, span=Q**i,
                tables=build_rule_tables(G, Q),
                buf=np.zeros((G, G, nslots), np.uint8), buflen=nslots,
                defect=np.zeros((G, G), np.uint8),
                masked_until=np.zeros((G, G), np.int64),
            )
            half = (Q**i) // 2
            reps = np.arange(G) * Q**i + half
            if i == 1:
                lvl.child_idx = np.ix_(reps, reps)
            else:
                childs = np.arange(G) * Q + Q // 2
                lvl.child_idx = np.ix_(childs, childs)
            self.levels.append(lvl)

        num_c, den_c = config.f_c.numerator, config.f_c.denominator
        num_n, den_n = config.f_n.numerator, config.f_n.denominator
        self._fc = (num_c, den_c)
        self._fn = (num_n, den_n)

    # -- per-step hierarchy bookkeeping ------------------------------------

    def _threshold(self, counts: np.ndarray, frac, n: int) -> np.ndarray:
        num, den = frac
        return (counts.astype(np.int64) * den >= num * n).astype(np.uint8)

    def _window_counts(self, lvl: _Level, end_tick: int, frac) -> np.ndarray:
        """Thresholded bit per cell over the U samples ending at end_tick."""
        U = self.config.U
        idx = (end_tick - U + 1 + np.arange(U)) % lvl.buflen
        window = lvl.buf[:, :, idx]
        if self.config.strategy == "non-division":
            return self._threshold(window.sum(axis=2), frac, U)
        b = self.config.b
        blocks = window.reshape(lvl.G, lvl.G, b, b).sum(axis=3)
        good = (blocks.astype(np.int64) * frac[1] >= frac[0] * b).sum(axis=2)
        return self._threshold(good, frac, b)

    def _apply_due(self, eff: np.ndarray, fh_acc: np.ndarray, fv_acc: np.ndarray):
        due = self._pending.pop(self.t, None)
        if not due:
            return
        for cor in due:
            fh_acc.ravel()[cor.h_edges] ^= 1
            fv_acc.ravel()[cor.v_edges] ^= 1
            eff.ravel()[cor.endpoints] ^= 1
            if self.trace is not None:
                self.trace.correction_applied(self.t, cor)

    def _schedule(self, lvl: _Level, gx: int, gy: int, d: int):
        """Straight path of Q^i qubit flips from this cell's representative."""
        L, span = self.L, lvl.span
        half = span // 2
        rx, ry = gx * span + half, gy * span + half
        steps = np.arange(span)
        if d == E:
            xs, ys = (rx + steps) % L, np.full(span, ry)
            h = True
        elif d == W:
            xs, ys = (rx - 1 - steps) % L, np.full(span, ry)
            h = True
        elif d == N:
            xs, ys = np.full(span, rx), (ry + steps) % L
            h = False
        else:
            xs, ys = np.full(span, rx), (ry - 1 - steps) % L
            h = False
        flat = xs * L + ys
        dx, dy = DIR_VEC[d]
        end = ((rx + dx * span) % L) * L + (ry + dy * span) % L
        endpoints = np.array([rx * L + ry, end])
        cor = PendingCorrection(
            apply_at=self.t + lvl.period, level=lvl.i,
            h_edges=flat if h else np.empty(0, np.int64),
            v_edges=flat if not h else np.empty(0, np.int64),
            endpoints=endpoints,
        )
        self._pending.setdefault(cor.apply_at, []).append(cor)
        if self.trace is not None:
            self.trace.correction_scheduled(self.t, cor)

    def _level_decisions(self, lvl: _Level, tick: int):
        """Work-period end: decide defects, run the coarse rule, schedule."""
        masked = lvl.masked_until >= self.t
        own = self._window_counts(lvl, tick, self._fc)
        own[masked] = 0
        lvl.defect = own
        nb = self._window_counts(lvl, tick - lvl.lag_samples, self._fn)
        nb[masked] = 0
        nn, dg = _neighbor_stacks(nb.astype(bool))
        flip_dir, committed = select_actions(own, nn, dg, lvl.tables)
        for gx, gy in zip(*np.nonzero(committed)):
            d = int(flip_dir[gx, gy])
            if d >= 0:
                self._schedule(lvl, int(gx), int(gy), d)
            lvl.masked_until[gx, gy] = self.t + lvl.period

    def _hierarchy_tick(self, eff: np.ndarray, fh_acc: np.ndarray, fv_acc: np.ndarray):
        self._apply_due(eff, fh_acc, fv_acc)
        for lvl in self.levels:
            if self.t % lvl.child_period:
                continue
            tick = self.t // lvl.child_period
            if lvl.i == 1:
                sample = eff[lvl.child_idx]
            else:
                sample = self.levels[lvl.i - 2].defect[lvl.child_idx]
            lvl.buf[:, :, tick % lvl.buflen] = sample
            if self.t % lvl.period == 0:
                self._level_decisions(lvl, tick)

    # -- public API ---------------------------------------------------------

    def has_pending(self) -> bool:
        return bool(self._pending)

    def run_cycle(self, measured: np.ndarray) -> np.ndarray:
        """Execute tau CA steps against one measured syndrome.

        Returns the (L, L, 2) edge flips applied during the cycle; the
        caller folds them into the true error.  The effective syndrome
        seen by the cells is the measured one updated by this cycle's own
        flips.
        """
        L = self.L
        eff = measured.astype(np.uint8).copy()
        fh_acc = np.zeros((L, L), np.uint8)
        fv_acc = np.zeros((L, L), np.uint8)
        tau = self.config.tau
        if tau == math.inf:
            cap = 500 + 50 * self.config.U ** max(1, self.k - 1)
            seen = set() if self.k == 1 else None
            steps = 0
            while eff.any():
                if seen is not None:
                    key = eff.tobytes()
                    if key in seen:
                        break
                    seen.add(key)
                self._step(eff, fh_acc, fv_acc)
                steps += 1
                if steps >= cap:
                    break
        else:
            for _ in range(int(tau)):
                self._step(eff, fh_acc, fv_acc)
        return np.stack([fh_acc, fv_acc], axis=2)

    def _step(self, eff, fh_acc, fv_acc):
        self.t += 1
        if self._use_kernel and self.trace is None:
            _ca_step_kernel(eff, self._a1, self._k1, self._e2, self._k2,
                            self._m3, fh_acc, fv_acc, self._dirs)
        else:
            fh, fv = level0_step(eff, self.tables0)
            if self.trace is not None and (fh.any() or fv.any()):
                self.trace.flips(self.t, fh, fv)
            fh_acc ^= fh
            fv_acc ^= fv
            eff ^= defect_delta(fh, fv)
        if self.levels or self._pending:
            self._hierarchy_tick(eff, fh_acc, fv_acc)
