"""
Element distortion metrics and mesh-level indicators.

Triangles are scored with alpha (1 for equilateral, 0 for collinear corners),
convex quadrilaterals with lambda (1 for a square, 0 when three corners are
collinear or the quad is not convex). Both work on 2D and 3D points; planar
points are embedded at z = 0 so that cross products are 3-vectors.

MQ is the mean element quality per element type and MSE the root mean square
of (1 - q) per element type.
"""
import math
from typing import Optional, Tuple

import numpy as np

from smoothing.models import Mesh, QualitySummary

ALPHA_FACTOR = 2.0 * math.sqrt(3.0)


def _as_3d(points: np.ndarray) -> np.ndarray:
    points = np.asarray(points, dtype=float)
    if points.shape[-1] == 3:
        return points
    pad = np.zeros(points.shape[:-1] + (3 - points.shape[-1],))
    return np.concatenate([points, pad], axis=-1)


def tri_alphas(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Vectorised alpha over (m, dim) corner arrays."""
    a, b, c = _as_3d(a), _as_3d(b), _as_3d(c)
    ca, cb, ab, bc = a - c, b - c, b - a, c - b
    cross = np.linalg.norm(np.cross(ca, cb), axis=-1)
    denominator = (ca * ca).sum(-1) + (ab * ab).sum(-1) + (bc * bc).sum(-1)
    alpha = np.zeros_like(denominator)
    ok = denominator > 0
    alpha[ok] = ALPHA_FACTOR * cross[ok] / denominator[ok]
    return np.minimum(alpha, 1.0)


def quad_lambdas(a: np.ndarray, b: np.ndarray, c: np.ndarray, d: np.ndarray) -> np.ndarray:
    """Vectorised lambda over (m, dim) corner arrays; 0 for non-convex quads."""
    corners = [_as_3d(p) for p in (a, b, c, d)]
    crosses, denominators = [], []
    for i, p in enumerate(corners):
        to_next = corners[(i + 1) % 4] - p
        to_prev = corners[(i - 1) % 4] - p
        crosses.append(np.cross(to_next, to_prev))
        denominators.append((to_next * to_next).sum(-1) + (to_prev * to_prev).sum(-1))

    reference = sum(crosses)
    convex = np.ones(reference.shape[:-1], dtype=bool)
    for cross in crosses:
        convex &= (cross * reference).sum(-1) > 0

    numerator = np.prod([np.linalg.norm(cross, axis=-1) for cross in crosses], axis=0)
    denominator = np.prod(denominators, axis=0)
    lam = np.zeros_like(numerator)
    ok = convex & (denominator > 0)
    lam[ok] = 2.0 * np.sqrt(np.sqrt(numerator[ok] / denominator[ok]))
    return np.minimum(lam, 1.0)


def tri_alpha(a, b, c) -> float:
    return float(tri_alphas(np.atleast_2d(a), np.atleast_2d(b), np.atleast_2d(c))[0])


def quad_lambda(a, b, c, d) -> float:
    return float(quad_lambdas(np.atleast_2d(a), np.atleast_2d(b), np.atleast_2d(c), np.atleast_2d(d))[0])


def quality_arrays(mesh: Mesh, coords: Optional[np.ndarray] = None) -> Tuple[np.ndarray, np.ndarray]:
    """Alpha of every triangle and lambda of every quad, each in element order."""
    coords = mesh.nodes if coords is None else coords
    tris, quads = mesh.tris, mesh.quads
    alphas = tri_alphas(coords[tris[:, 0]], coords[tris[:, 1]], coords[tris[:, 2]])
    lambdas = quad_lambdas(coords[quads[:, 0]], coords[quads[:, 1]], coords[quads[:, 2]], coords[quads[:, 3]])
    return alphas, lambdas


def _mq_mse(qualities: np.ndarray) -> Tuple[Optional[float], Optional[float]]:
    if len(qualities) == 0:
        return None, None
    deviation = 1.0 - qualities
    return float(np.mean(qualities)), float(np.sqrt(np.mean(deviation * deviation)))


def summarize(mesh: Mesh, coords: Optional[np.ndarray] = None) -> QualitySummary:
    alphas, lambdas = quality_arrays(mesh, coords)
    mq_tri, mse_tri = _mq_mse(alphas)
    mq_quad, mse_quad = _mq_mse(lambdas)
    return QualitySummary(
        mq_tri=mq_tri,
        mse_tri=mse_tri,
        mq_quad=mq_quad,
        mse_quad=mse_quad,
        n_tri=len(alphas),
        n_quad=len(lambdas),
    )
