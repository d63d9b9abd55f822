import logging
import os
from typing import Iterable, Optional

import numpy as np
from pydantic import BaseModel, Field

from smoothing.constants import DEFAULT_TOL, PLANAR_MAX_ITER
from smoothing.exceptions import DimensionError, OrientationError
from smoothing.mesh_core import boundary_nodes, build_adjacency, inverted_elements, validate_orientation
from smoothing.models import Adjacency, Mesh, Method, ReportRecord, SmoothResult
from smoothing.quality import summarize
from smoothing.relocators import get_relocator, laplacian_operator

logging.basicConfig(level=os.environ.get("LOGLEVEL", "INFO"))
logger = logging.getLogger(__name__)


class PlanarConfig(BaseModel):
    # stop once no node moves further than this; a fraction of the bounding
    # box diagonal unless tol_absolute is set
    tol: float = Field(default=DEFAULT_TOL, gt=0)
    tol_absolute: bool = False
    max_iter: int = Field(default=PLANAR_MAX_ITER, ge=1)
    method: Method = Method.MDM
    fix_boundary: bool = True

    def tolerance_for(self, mesh: Mesh) -> float:
        if self.tol_absolute:
            return self.tol
        diagonal = mesh.bbox_diagonal()
        return self.tol * diagonal if diagonal > 0 else self.tol


def laplacian_step(mesh: Mesh, adj: Adjacency, fixed: Iterable[int], coords: Optional[np.ndarray] = None) -> np.ndarray:
    """Move every free node to the centroid of its edge neighbours, reading only the given coordinates."""
    coords = mesh.nodes if coords is None else np.asarray(coords, dtype=float)
    moved = laplacian_operator(mesh, adj) @ coords
    out = moved.copy()
    fixed = list(fixed)
    out[fixed] = coords[fixed]
    return out


def smooth_planar(mesh: Mesh, cfg: Optional[PlanarConfig] = None) -> SmoothResult:
    cfg = cfg or PlanarConfig()
    if mesh.dimension != 2:
        raise DimensionError(f"planar smoothing needs a 2D mesh, got dimension {mesh.dimension}")

    offending = validate_orientation(mesh)
    if offending:
        logger.error(f"{len(offending)} clockwise element(s), refusing to smooth")
        raise OrientationError(offending)

    adj = build_adjacency(mesh)
    fixed = boundary_nodes(mesh, adj) if cfg.fix_boundary else set()
    free = np.ones(mesh.n_nodes, dtype=bool)
    free[list(fixed)] = False
    relocator = get_relocator(cfg.method, mesh, adj)
    tol = cfg.tolerance_for(mesh)

    logger.info(
        f"Planar {relocator.name} smoothing: {mesh.n_nodes} nodes, {mesh.n_elements} elements, "
        f"{int(free.sum())} free, tol {tol:.3e}"
    )

    coords = mesh.nodes.copy()
    initial = ReportRecord.from_summary(0, summarize(mesh))
    history = []
    converged = False
    for iteration in range(1, cfg.max_iter + 1):
        relocated = relocator.relocate(coords)
        updated = coords.copy()
        updated[free] = relocated[free]
        max_disp = float(np.max(np.linalg.norm(updated - coords, axis=1))) if mesh.n_nodes else 0.0
        coords = updated

        record = ReportRecord.from_summary(iteration, summarize(mesh, coords), max_disp)
        history.append(record)
        logger.debug(f"iteration {iteration}: max displacement {max_disp:.3e}, mq_tri {record.mq_tri}, mq_quad {record.mq_quad}")

        if max_disp <= tol:
            converged = True
            break

    result = mesh.with_nodes(coords)
    inverted = inverted_elements(result)
    if inverted:
        logger.warning(f"{len(inverted)} element(s) inverted after smoothing: {inverted[:10]}")
    if converged:
        logger.info(f"Converged after {len(history)} iteration(s)")
    else:
        logger.warning(f"No convergence within {cfg.max_iter} iterations (last max displacement {history[-1].max_disp:.3e})")

    return SmoothResult(mesh=result, iterations=len(history), converged=converged, history=history, initial=initial)
