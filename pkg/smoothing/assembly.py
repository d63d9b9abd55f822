"""
Element iteration matrices and the assembled Jacobi operator.

Each element matrix maps the current coordinates of an element's nodes to the
positions each node would take, alone, to make the element equilateral
(triangles) or square (quads). Assembly sums the element rows per node and
scales node i's rows by 1/e_i, so one application of the operator moves every
node to the mean of its single-element targets.

target_oracle recomputes the same step element by element from the target
formulas and is kept independent of the matrices on purpose: tests compare
the two.
"""
import logging
import math
import os
from functools import lru_cache
from typing import Dict, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator
from scipy import sparse

from smoothing.constants import QUAD_MATRIX_2D, QUAD_MATRIX_3D, TRI_MATRIX_2D, TRI_MATRIX_3D
from smoothing.exceptions import ElementMatrixError, UnsupportedElementError, VectorLengthError
from smoothing.models import Adjacency, ElementType, Mesh

logging.basicConfig(level=os.environ.get("LOGLEVEL", "INFO"))
logger = logging.getLogger(__name__)

SQRT3_HALF = math.sqrt(3) / 2

# (next, previous) coupling weight of the rotated difference term
ROTATION_WEIGHT = {
    ElementType.TRI: SQRT3_HALF,
    ElementType.QUAD: 0.5,
}


class ElementMatrix(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    element_type: ElementType
    dim: int
    entries: np.ndarray

    @model_validator(mode="after")
    def check_blocks(self):
        k = 3 if self.element_type == ElementType.TRI else 4
        size = k * self.dim
        if self.entries.shape != (size, size):
            raise ValueError(f"{self.element_type} matrix for dim {self.dim} must be {size}x{size}")
        for a in range(k):
            block = self.entries[a * self.dim:(a + 1) * self.dim, a * self.dim:(a + 1) * self.dim]
            if np.any(block != 0):
                raise ValueError(f"self-coupling block of local node {a} is not zero")
        # each row: like-coordinate coefficients sum to 1, unlike ones to 0
        for row in range(size):
            axis = row % self.dim
            for col_axis in range(self.dim):
                total = self.entries[row, col_axis::self.dim].sum()
                expected = 1.0 if col_axis == axis else 0.0
                if abs(total - expected) > 1e-12:
                    raise ValueError(f"row {row} sums to {total} on axis {col_axis}, expected {expected}")
        return self

    @property
    def size(self) -> int:
        return self.entries.shape[0]


def cyclic_extension(matrix_2d: np.ndarray) -> np.ndarray:
    """
    Build the 3D matrix from a 2D one by cycling X -> Y -> Z -> X: every 2x2
    node block [[a, b], [-b, a]] becomes a 3x3 block with a on the diagonal,
    b on (X, Y), (Y, Z), (Z, X) and -b on the transposed positions.
    """
    k = matrix_2d.shape[0] // 2
    out = np.zeros((3 * k, 3 * k))
    for i in range(k):
        for j in range(k):
            block = matrix_2d[2 * i:2 * i + 2, 2 * j:2 * j + 2]
            a, b, b_t = block[0, 0], block[0, 1], block[1, 0]
            for p in range(3):
                out[3 * i + p, 3 * j + p] = a
            for p, q in ((0, 1), (1, 2), (2, 0)):
                out[3 * i + p, 3 * j + q] = b
                out[3 * i + q, 3 * j + p] = b_t
    return out


@lru_cache(maxsize=None)
def _printed_matrices() -> Dict[Tuple[ElementType, int], np.ndarray]:
    printed = {
        (ElementType.TRI, 2): TRI_MATRIX_2D,
        (ElementType.TRI, 3): TRI_MATRIX_3D,
        (ElementType.QUAD, 2): QUAD_MATRIX_2D,
        (ElementType.QUAD, 3): QUAD_MATRIX_3D,
    }
    for element_type in (ElementType.TRI, ElementType.QUAD):
        derived = cyclic_extension(printed[(element_type, 2)])
        mismatch = np.argwhere(np.abs(derived - printed[(element_type, 3)]) > 1e-15)
        if len(mismatch):
            row, col = mismatch[0]
            logger.error(f"3D {element_type.label} matrix disagrees with the cyclic rule at ({row}, {col})")
            raise ElementMatrixError(
                f"3D {element_type.label.lower()} matrix entry ({row}, {col}) is "
                f"{printed[(element_type, 3)][row, col]}, cyclic rule gives {derived[row, col]}"
            )
    return printed


def _element_matrix(element_type: ElementType, dim: int) -> ElementMatrix:
    if dim not in (2, 3):
        raise ValueError(f"dim must be 2 or 3, got {dim}")
    return ElementMatrix(element_type=element_type, dim=dim, entries=_printed_matrices()[(element_type, dim)].copy())


def tri_element_matrix(dim: int) -> ElementMatrix:
    return _element_matrix(ElementType.TRI, dim)


def quad_element_matrix(dim: int) -> ElementMatrix:
    return _element_matrix(ElementType.QUAD, dim)


def fixed_point_residual(matrix: ElementMatrix, points: np.ndarray) -> float:
    """Largest coordinate change when the element matrix is applied to the given corner points."""
    x = np.asarray(points, dtype=float).reshape(-1)
    return float(np.max(np.abs(matrix.entries @ x - x)))


def _rotate(v: np.ndarray) -> np.ndarray:
    # 2D: quarter turn (x, y) -> (y, -x); 3D: the same rule cycled over the
    # three coordinate planes, i.e. v x (1, 1, 1)
    if v.shape[-1] == 2:
        return np.array([v[1], -v[0]])
    return np.cross(v, np.ones(3))


def element_target(mesh: Mesh, element_id: int, local_node: int, coords: np.ndarray = None) -> np.ndarray:
    """Where local_node would go, on its own, to make the element ideal."""
    coords = mesh.nodes if coords is None else np.asarray(coords).reshape(mesh.nodes.shape)
    element = mesh.elements[element_id]
    k = len(element)
    following = coords[element[(local_node + 1) % k]]
    preceding = coords[element[(local_node - 1) % k]]
    weight = ROTATION_WEIGHT[mesh.element_type(element_id)]
    return 0.5 * (following + preceding) + weight * _rotate(following - preceding)


def target_oracle(mesh: Mesh, adj: Adjacency, coords) -> np.ndarray:
    coords = np.asarray(coords, dtype=float).reshape(mesh.nodes.shape)
    out = coords.copy()
    for node, incident in enumerate(adj.incident):
        if not incident:
            continue
        targets = [element_target(mesh, eid, slot, coords) for eid, slot in incident]
        out[node] = np.mean(targets, axis=0)
    return out.reshape(-1)


class JacobiMatrix(BaseModel):
    """
    D*K in sparse row form: row (i, axis) is stored at i*dim + axis and already
    carries the 1/e_i factor. Isolated nodes get identity rows.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n: int
    dim: int
    operator: sparse.csr_matrix
    scale: np.ndarray

    def row(self, node: int, axis: int) -> Dict[Tuple[int, int], float]:
        start, stop = self.operator.indptr[node * self.dim + axis], self.operator.indptr[node * self.dim + axis + 1]
        return {
            (int(col) // self.dim, int(col) % self.dim): float(value)
            for col, value in zip(self.operator.indices[start:stop], self.operator.data[start:stop])
        }


def assemble(mesh: Mesh, adj: Adjacency) -> JacobiMatrix:
    for eid, element in enumerate(mesh.elements):
        if len(element) not in (3, 4):
            raise UnsupportedElementError(f"element {eid} has {len(element)} nodes, only triangles and quads are supported")

    dim, n = mesh.dimension, mesh.n_nodes
    rows, cols, values = [], [], []
    for element_type, elements in ((ElementType.TRI, mesh.tris), (ElementType.QUAD, mesh.quads)):
        if len(elements) == 0:
            continue
        entries = _element_matrix(element_type, dim).entries
        size = entries.shape[0]
        dofs = (elements[:, :, None] * dim + np.arange(dim)).reshape(len(elements), size)
        row_index = np.broadcast_to(dofs[:, :, None], (len(elements), size, size))
        col_index = np.broadcast_to(dofs[:, None, :], (len(elements), size, size))
        coupled = np.broadcast_to(entries != 0, row_index.shape)
        rows.append(row_index[coupled])
        cols.append(col_index[coupled])
        values.append(np.broadcast_to(entries, row_index.shape)[coupled])

    if rows:
        rows, cols, values = np.concatenate(rows), np.concatenate(cols), np.concatenate(values)
    else:
        rows = cols = np.zeros(0, dtype=np.int64)
        values = np.zeros(0)
    stiffness = sparse.coo_matrix((values, (rows, cols)), shape=(dim * n, dim * n)).tocsr()
    stiffness.sum_duplicates()

    counts = np.asarray(adj.counts, dtype=float)
    scale = np.zeros(n)
    scale[counts > 0] = 1.0 / counts[counts > 0]
    isolated = np.repeat(counts == 0, dim).astype(float)
    operator = (sparse.diags(np.repeat(scale, dim)) @ stiffness + sparse.diags(isolated)).tocsr()
    operator.eliminate_zeros()
    operator.sort_indices()

    logger.debug(f"Assembled {dim * n}x{dim * n} Jacobi operator with {operator.nnz} entries")
    return JacobiMatrix(n=n, dim=dim, operator=operator, scale=scale)


def apply(jm: JacobiMatrix, coords) -> np.ndarray:
    x = np.asarray(coords, dtype=float).reshape(-1)
    if x.shape[0] != jm.dim * jm.n:
        raise VectorLengthError(f"coordinate vector has length {x.shape[0]}, operator expects {jm.dim * jm.n}")
    return jm.operator @ x
