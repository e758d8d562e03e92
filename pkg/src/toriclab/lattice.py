"""Torus lattice geometry for the 2D and 4D toric codes.

The 2D code lives on an L x L torus with qubits on the 2L^2 edges; the 4D
code lives on an L^4 hypertorus with qubits on the 6L^4 faces.  Chains of
cells are stored as flat uint8 bit vectors in a fixed dense order
(coordinates row-major, orientation fastest), so XOR of supports is chain
addition over GF(2).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence, Tuple

import numpy as np

# Orientation tables: direction subsets in lexicographic order.
FACE_PAIRS_4D = tuple(combinations(range(4), 2))   # (0,1),(0,2),(0,3),(1,2),(1,3),(2,3)
CUBE_TRIPLES_4D = tuple(combinations(range(4), 3))


class ContractViolation(ValueError):
    """A lattice operation was called outside its stated domain."""


@dataclass(frozen=True)
class TorusDims:
    """Periodic lattice descriptor: `dimension` in {2, 4}, linear size `L`."""

    dimension: int
    L: int

    def __post_init__(self):
        if self.dimension not in (2, 4):
            raise ContractViolation(f"dimension must be 2 or 4, got {self.dimension}")
        if self.L < 2:
            raise ContractViolation(f"L must be >= 2, got {self.L}")

    def cell_count(self, cell_dimension: int) -> int:
        L = self.L
        if self.dimension == 2:
            counts = {0: L * L, 1: 2 * L * L, 2: L * L}
        else:
            counts = {0: L**4, 1: 4 * L**4, 2: 6 * L**4, 3: 4 * L**4}
        if cell_dimension not in counts:
            raise ContractViolation(
                f"no {cell_dimension}-cells on a {self.dimension}D torus"
            )
        return counts[cell_dimension]

    def orientations(self, cell_dimension: int) -> Tuple[Tuple[int, ...], ...]:
        """Direction subsets of cells of the given dimension, in dense order."""
        n = self.dimension
        return tuple(combinations(range(n), cell_dimension))


@dataclass(frozen=True)
class CellIndex:
    """A lattice cell: base vertex plus the strictly increasing direction set."""

    dims: TorusDims
    base_vertex: Tuple[int, ...]
    orientation: Tuple[int, ...]

    def __post_init__(self):
        n = self.dims.dimension
        if len(self.base_vertex) != n:
            raise ContractViolation("base_vertex arity does not match dimension")
        if any(not (0 <= c < self.dims.L) for c in self.base_vertex):
            raise ContractViolation(f"coordinates out of range: {self.base_vertex}")
        if tuple(sorted(set(self.orientation))) != self.orientation:
            raise ContractViolation(f"orientation not strictly increasing: {self.orientation}")
        if any(not (0 <= d < n) for d in self.orientation):
            raise ContractViolation(f"orientation directions out of range: {self.orientation}")

    @property
    def cell_dimension(self) -> int:
        return len(self.orientation)

    def dense_index(self) -> int:
        dims = self.dims
        L = dims.L
        coord_rank = 0
        for c in self.base_vertex:
            coord_rank = coord_rank * L + c
        orients = dims.orientations(self.cell_dimension)
        return coord_rank * len(orients) + orients.index(self.orientation)


def cell_from_dense(dims: TorusDims, cell_dimension: int, index: int) -> CellIndex:
    """Inverse of CellIndex.dense_index."""
    orients = dims.orientations(cell_dimension)
    coord_rank, o = divmod(index, len(orients))
    coords = []
    for _ in range(dims.dimension):
        coord_rank, c = divmod(coord_rank, dims.L)
        coords.append(c)
    coords.reverse()
    return CellIndex(dims, tuple(coords), orients[o])


@dataclass
class Chain:
    """A GF(2) chain: flat bit vector over all cells of one dimension."""

    dims: TorusDims
    cell_dimension: int
    support: np.ndarray

    def __post_init__(self):
        expected = self.dims.cell_count(self.cell_dimension)
        self.support = np.ascontiguousarray(self.support, dtype=np.uint8).ravel()
        if self.support.size != expected:
            raise ContractViolation(
                f"support length {self.support.size} != cell count {expected}"
            )

    @classmethod
    def zeros(cls, dims: TorusDims, cell_dimension: int) -> "Chain":
        return cls(dims, cell_dimension, np.zeros(dims.cell_count(cell_dimension), np.uint8))

    @classmethod
    def from_cells(cls, dims: TorusDims, cells: Iterable[CellIndex]) -> "Chain":
        cells = list(cells)
        if not cells:
            raise ContractViolation("from_cells needs at least one cell")
        d = cells[0].cell_dimension
        ch = cls.zeros(dims, d)
        for c in cells:
            if c.cell_dimension != d:
                raise ContractViolation("mixed cell dimensions in one chain")
            ch.support[c.dense_index()] ^= 1
        return ch

    def __xor__(self, other: "Chain") -> "Chain":
        if (self.dims, self.cell_dimension) != (other.dims, other.cell_dimension):
            raise ContractViolation("chain shape mismatch in XOR")
        return Chain(self.dims, self.cell_dimension, self.support ^ other.support)

    def weight(self) -> int:
        return int(self.support.sum())

    def cells(self) -> list:
        return [
            cell_from_dense(self.dims, self.cell_dimension, int(i))
            for i in np.flatnonzero(self.support)
        ]


# ---------------------------------------------------------------------------
# incidence (boundary / coboundary of a single cell)
# ---------------------------------------------------------------------------

def incident_cells(cell: CellIndex, target_dimension: int) -> list:
    """Cells of dimension one above or below that are incident to `cell`.

    Boundary (target one lower): for each direction d in the orientation,
    the two sub-cells at the base vertex and at base + d.  Coboundary
    (target one higher): for each direction d not in the orientation, the
    super-cells based at the vertex and at base - d.
    """
    d = cell.cell_dimension
    if abs(target_dimension - d) != 1:
        raise ContractViolation(
            f"target dimension {target_dimension} not adjacent to {d}"
        )
    dims = cell.dims
    L = dims.L
    out = []
    if target_dimension == d - 1:
        for k in cell.orientation:
            rest = tuple(x for x in cell.orientation if x != k)
            out.append(CellIndex(dims, cell.base_vertex, rest))
            shifted = list(cell.base_vertex)
            shifted[k] = (shifted[k] + 1) % L
            out.append(CellIndex(dims, tuple(shifted), rest))
    else:
        for k in range(dims.dimension):
            if k in cell.orientation:
                continue
            new_or = tuple(sorted(cell.orientation + (k,)))
            out.append(CellIndex(dims, cell.base_vertex, new_or))
            shifted = list(cell.base_vertex)
            shifted[k] = (shifted[k] - 1) % L
            out.append(CellIndex(dims, tuple(shifted), new_or))
    return out


# ---------------------------------------------------------------------------
# 2D torus
# ---------------------------------------------------------------------------

class Torus2D:
    """L x L torus; qubits on edges, X-checks on vertices, Z-checks on faces.

    Edge arrays have shape (L, L, 2): [..., 0] is the edge from (x, y) to
    (x+1, y) and [..., 1] the edge from (x, y) to (x, y+1).  x grows east,
    y grows north.
    """

    def __init__(self, L: int):
        self.dims = TorusDims(2, L)
        self.L = L

    def empty_error(self) -> np.ndarray:
        return np.zeros((self.L, self.L, 2), np.uint8)

    def syndrome(self, error: np.ndarray) -> np.ndarray:
        """Vertex-defect array: boundary over GF(2) of an edge array."""
        h = error[:, :, 0]
        v = error[:, :, 1]
        return h ^ np.roll(h, 1, axis=0) ^ v ^ np.roll(v, 1, axis=1)

    def is_cycle(self, error: np.ndarray) -> bool:
        return not self.syndrome(error).any()

    def homology_bits(self, cycle: np.ndarray) -> Tuple[int, int]:
        """Winding parities of an edge-cycle.

        Bit 0: parity of the L direction-x edges at x = 0 (the cut at the
        x = 0 column of horizontal edges); bit 1 likewise for direction-y
        edges at y = 0.
        """
        if not self.is_cycle(cycle):
            raise ContractViolation("homology_bits called on a non-cycle")
        bx = int(cycle[0, :, 0].sum()) & 1
        by = int(cycle[:, 0, 1].sum()) & 1
        return (bx, by)

    def chain_from_array(self, arr: np.ndarray, cell_dimension: int = 1) -> Chain:
        return Chain(self.dims, cell_dimension, arr.ravel())

    def array_from_chain(self, chain: Chain) -> np.ndarray:
        if chain.cell_dimension == 1:
            return chain.support.reshape(self.L, self.L, 2).copy()
        return chain.support.reshape(self.L, self.L).copy()


# ---------------------------------------------------------------------------
# 4D hypertorus
# ---------------------------------------------------------------------------

class Torus4D:
    """L^4 hypertorus; qubits on faces, X-checks on edges, Z-checks on cubes.

    Face arrays have shape (L, L, L, L, 6) with the orientation axis indexed
    by FACE_PAIRS_4D; edge arrays have shape (L, L, L, L, 4).
    """

    def __init__(self, L: int):
        self.dims = TorusDims(4, L)
        self.L = L
        # Static map: for edge direction d, the three partner directions and
        # the face-orientation slot each (d, partner) pair lives in.
        self._edge_faces = []
        for d in range(4):
            partners = []
            for nu in range(4):
                if nu == d:
                    continue
                pair = (min(d, nu), max(d, nu))
                partners.append((nu, FACE_PAIRS_4D.index(pair)))
            self._edge_faces.append(tuple(partners))

    def empty_error(self) -> np.ndarray:
        return np.zeros((self.L,) * 4 + (6,), np.uint8)

    def empty_syndrome(self) -> np.ndarray:
        return np.zeros((self.L,) * 4 + (4,), np.uint8)

    def syndrome(self, error: np.ndarray) -> np.ndarray:
        """Edge-defect array: 1-boundary of a face array over GF(2).

        Edge (v, d) is incident to faces (d, nu) based at v and v - nu for
        the three directions nu != d, six faces in total.
        """
        out = self.empty_syndrome()
        for d in range(4):
            acc = out[..., d]
            for nu, slot in self._edge_faces[d]:
                f = error[..., slot]
                acc ^= f ^ np.roll(f, 1, axis=nu)
        return out

    def face_boundary_update(self, syndrome: np.ndarray, flips: np.ndarray) -> None:
        """XOR the boundary of face flips into an edge array, in place."""
        syndrome ^= self.syndrome(flips)

    def is_cycle(self, error: np.ndarray) -> bool:
        return not self.syndrome(error).any()

    def homology_bits(self, cycle: np.ndarray) -> Tuple[int, ...]:
        """Six winding parities of a face-cycle, one per orientation pair.

        Bit for pair (mu, nu): parity of that orientation's support on the
        L^2 faces whose two transverse coordinates are 0.
        """
        if not self.is_cycle(cycle):
            raise ContractViolation("homology_bits called on a non-cycle")
        bits = []
        for slot, (mu, nu) in enumerate(FACE_PAIRS_4D):
            sl = [0, 0, 0, 0, slot]
            sl[mu] = slice(None)
            sl[nu] = slice(None)
            bits.append(int(cycle[tuple(sl)].sum()) & 1)
        return tuple(bits)

    def chain_from_array(self, arr: np.ndarray, cell_dimension: int = 2) -> Chain:
        return Chain(self.dims, cell_dimension, arr.ravel())

    def array_from_chain(self, chain: Chain) -> np.ndarray:
        shape = {1: (self.L,) * 4 + (4,), 2: (self.L,) * 4 + (6,)}[chain.cell_dimension]
        return chain.support.reshape(shape).copy()


def syndrome_of(error: Chain) -> Chain:
    """Boundary of a qubit-dimension chain (edges in 2D, faces in 4D)."""
    if error.dims.dimension == 2:
        if error.cell_dimension != 1:
            raise ContractViolation("2D errors live on edges")
        t = Torus2D(error.dims.L)
        arr = error.support.reshape(t.L, t.L, 2)
        return Chain(error.dims, 0, t.syndrome(arr).ravel())
    if error.cell_dimension != 2:
        raise ContractViolation("4D errors live on faces")
    t = Torus4D(error.dims.L)
    arr = error.support.reshape((t.L,) * 4 + (6,))
    return Chain(error.dims, 1, t.syndrome(arr).ravel())


def homology_class(cycle: Chain) -> Tuple[int, ...]:
    """Winding class of a boundaryless qubit chain; all zeros iff a boundary."""
    if cycle.dims.dimension == 2:
        t2 = Torus2D(cycle.dims.L)
        return t2.homology_bits(cycle.support.reshape(t2.L, t2.L, 2))
    t4 = Torus4D(cycle.dims.L)
    return t4.homology_bits(cycle.support.reshape((t4.L,) * 4 + (6,)))
