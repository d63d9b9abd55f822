"""
Surface helpers for feature-preserving smoothing: face and vertex normals,
corner/ridge classification from the eigenvalues of A = N^T W N, projection
of a relocated node back onto the original faces, and the inverted-face test.
"""
import logging
import os
from typing import Iterable, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from smoothing.constants import AREA_EPS, BARYCENTRIC_SLACK
from smoothing.mesh_core import boundary_nodes, build_adjacency
from smoothing.models import Adjacency, Mesh, NodeClassification, NodeLabel, WeightMode

logging.basicConfig(level=os.environ.get("LOGLEVEL", "INFO"))
logger = logging.getLogger(__name__)


class VertexNormals(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    # (n, 3) unit normals; zero rows for nodes without a usable face
    vectors: np.ndarray
    degenerate: Tuple[int, ...] = ()


def _face_cross(points: np.ndarray) -> np.ndarray:
    """Unnormalised normal of a tri (edge cross product) or quad (diagonal cross product); |result| = 2 * area."""
    points = np.asarray(points, dtype=float)
    if points.shape[-1] == 2:
        points = np.concatenate([points, np.zeros(points.shape[:-1] + (1,))], axis=-1)
    if points.shape[-2] == 3:
        return np.cross(points[..., 1, :] - points[..., 0, :], points[..., 2, :] - points[..., 0, :])
    return np.cross(points[..., 2, :] - points[..., 0, :], points[..., 3, :] - points[..., 1, :])


def face_normals(mesh: Mesh, coords: Optional[np.ndarray] = None) -> Tuple[np.ndarray, np.ndarray]:
    """Unit normal and area of every element, in element order; degenerate faces get a zero normal."""
    coords = mesh.nodes if coords is None else coords
    normals = np.zeros((mesh.n_elements, 3))
    areas = np.zeros(mesh.n_elements)
    for ids, connectivity in ((mesh.tri_ids, mesh.tris), (mesh.quad_ids, mesh.quads)):
        if len(ids) == 0:
            continue
        cross = _face_cross(coords[connectivity])
        length = np.linalg.norm(cross, axis=1)
        ok = length > 0
        normals[ids[ok]] = cross[ok] / length[ok, None]
        areas[ids] = 0.5 * length
    return normals, areas


def _incidence(mesh: Mesh) -> Tuple[np.ndarray, np.ndarray]:
    nodes = np.array([node for element in mesh.elements for node in element], dtype=np.int64)
    elements = np.array([eid for eid, element in enumerate(mesh.elements) for _ in element], dtype=np.int64)
    return nodes, elements


def _feature_matrices(mesh: Mesh, normals: np.ndarray, weights: np.ndarray) -> np.ndarray:
    nodes, elements = _incidence(mesh)
    outer = normals[elements, :, None] * normals[elements, None, :] * weights[elements, None, None]
    matrices = np.zeros((mesh.n_nodes, 3, 3))
    np.add.at(matrices, nodes, outer)
    return matrices


def estimate_normals(mesh: Mesh, coords: Optional[np.ndarray] = None) -> VertexNormals:
    """
    Per node, the least-squares solution of N x = 1 over the unit normals of
    its non-degenerate incident faces, normalised. The minimum-norm solution
    is taken through the pseudo-inverse of N^T N, which handles the usual
    rank-deficient systems (flat regions, ridges).
    """
    coords = mesh.nodes if coords is None else coords
    normals, areas = face_normals(mesh, coords)
    valid = (areas > 0).astype(float)
    nodes, elements = _incidence(mesh)

    gram = _feature_matrices(mesh, normals, valid)
    rhs = np.zeros((mesh.n_nodes, 3))
    np.add.at(rhs, nodes, normals[elements] * valid[elements, None])
    solution = np.einsum("nij,nj->ni", np.linalg.pinv(gram, rcond=1e-10, hermitian=True), rhs)

    length = np.linalg.norm(solution, axis=1)
    vectors = np.zeros((mesh.n_nodes, 3))
    ok = length > 1e-12
    vectors[ok] = solution[ok] / length[ok, None]

    # rank 0 or a cancelling system: fall back to the area-weighted face normal
    if not np.all(ok):
        weighted = np.zeros((mesh.n_nodes, 3))
        np.add.at(weighted, nodes, normals[elements] * areas[elements, None])
        weighted_length = np.linalg.norm(weighted, axis=1)
        fallback = ~ok & (weighted_length > 0)
        vectors[fallback] = weighted[fallback] / weighted_length[fallback, None]
        ok |= fallback

    degenerate = tuple(int(i) for i in np.flatnonzero(~ok))
    if degenerate:
        logger.warning(f"{len(degenerate)} node(s) without a usable normal, they will be kept fixed")
    return VertexNormals(vectors=vectors, degenerate=degenerate)


def eigen_ratios(mesh: Mesh, weight_mode: WeightMode = WeightMode.IDENTITY, coords: Optional[np.ndarray] = None):
    """(lambda3 / lambda1, lambda2 / lambda1) per node, plus a mask of nodes with lambda1 > 0."""
    coords = mesh.nodes if coords is None else coords
    normals, areas = face_normals(mesh, coords)
    weights = (areas > 0).astype(float)
    if weight_mode == WeightMode.FACE_AREA:
        weights = areas
    eigenvalues = np.clip(np.linalg.eigvalsh(_feature_matrices(mesh, normals, weights)), 0.0, None)
    # eigvalsh sorts ascending: lambda3, lambda2, lambda1
    largest = eigenvalues[:, 2]
    defined = largest > 0
    corner = np.zeros(mesh.n_nodes)
    ridge = np.zeros(mesh.n_nodes)
    corner[defined] = eigenvalues[defined, 0] / largest[defined]
    ridge[defined] = eigenvalues[defined, 1] / largest[defined]
    return corner, ridge, defined


def classify(mesh: Mesh, normals: Optional[VertexNormals], cfg, adj: Optional[Adjacency] = None) -> NodeClassification:
    """
    Boundary nodes first, then corner if lambda3/lambda1 >= chi_c, ridge if
    lambda2/lambda1 >= chi_r, smooth otherwise. Nodes without a valid face
    (lambda1 = 0, or no usable normal) are labelled corner so they stay fixed.
    """
    adj = adj or build_adjacency(mesh)
    corner, ridge, defined = eigen_ratios(mesh, cfg.weight_mode)
    boundary = boundary_nodes(mesh, adj)
    degenerate = set(normals.degenerate) if normals is not None else set()

    labels = []
    for node in range(mesh.n_nodes):
        if node in boundary:
            labels.append(NodeLabel.BOUNDARY)
        elif not defined[node] or node in degenerate or corner[node] >= cfg.chi_c:
            labels.append(NodeLabel.CORNER)
        elif ridge[node] >= cfg.chi_r:
            labels.append(NodeLabel.RIDGE)
        else:
            labels.append(NodeLabel.SMOOTH)
    return NodeClassification(
        labels=tuple(labels),
        corner_ratios=tuple(float(r) for r in corner),
        ridge_ratios=tuple(float(r) for r in ridge),
    )


def _triangles_of(mesh: Mesh, faces: Iterable[int]) -> np.ndarray:
    """(t, 3) node ids; quads split along their (0, 2) diagonal."""
    triangles = []
    for eid in faces:
        element = mesh.elements[eid]
        if len(element) == 3:
            triangles.append(element)
        else:
            triangles.append((element[0], element[1], element[2]))
            triangles.append((element[0], element[2], element[3]))
    return np.array(triangles, dtype=np.int64).reshape(-1, 3)


def project(original: Mesh, node: np.ndarray, normal: np.ndarray, neighborhood: Iterable[int]) -> Tuple[Optional[np.ndarray], int]:
    """
    Intersect the line through `node` along +-`normal` with the neighbourhood
    faces of the original mesh. Returns the hit nearest to `node` (or None
    when nothing is hit) and the number of hits.
    """
    triangles = _triangles_of(original, neighborhood)
    if len(triangles) == 0:
        return None, 0
    corners = original.nodes[triangles]
    origin = np.asarray(node, dtype=float)
    direction = np.asarray(normal, dtype=float)

    # Moller-Trumbore over all triangles at once, line instead of ray
    edge1 = corners[:, 1] - corners[:, 0]
    edge2 = corners[:, 2] - corners[:, 0]
    pvec = np.cross(direction, edge2)
    det = np.einsum("ij,ij->i", edge1, pvec)
    scale = np.linalg.norm(edge1, axis=1) * np.linalg.norm(edge2, axis=1)
    usable = np.abs(det) > 1e-12 * scale
    if not np.any(usable):
        return None, 0

    inv_det = np.zeros_like(det)
    inv_det[usable] = 1.0 / det[usable]
    tvec = origin - corners[:, 0]
    u = np.einsum("ij,ij->i", tvec, pvec) * inv_det
    qvec = np.cross(tvec, edge1)
    v = (qvec @ direction) * inv_det
    t = np.einsum("ij,ij->i", edge2, qvec) * inv_det

    hit = (
        usable
        & (u >= -BARYCENTRIC_SLACK)
        & (v >= -BARYCENTRIC_SLACK)
        & (u + v <= 1.0 + BARYCENTRIC_SLACK)
    )
    count = int(hit.sum())
    if count == 0:
        return None, 0
    points = origin + t[hit, None] * direction
    nearest = int(np.argmin(np.abs(t[hit])))
    return points[nearest], count


def is_inverted(face_before: np.ndarray, face_after: np.ndarray) -> bool:
    """True when the face normal flips (dot <= 0) or the face collapses."""
    before = _face_cross(face_before)
    after = _face_cross(face_after)
    points = np.asarray(face_after, dtype=float)
    longest = np.max(np.linalg.norm(points - np.roll(points, -1, axis=0), axis=1))
    if np.linalg.norm(after) <= AREA_EPS * longest * longest:
        return True
    return float(np.dot(before, after)) <= 0.0
