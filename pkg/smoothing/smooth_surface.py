import logging
import os
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field, model_validator

from smoothing.constants import (
    DEFAULT_CHI_C,
    DEFAULT_CHI_R,
    DEFAULT_EPS_MQ,
    DEFAULT_EPS_MSE,
    EPSILON_PRESETS,
    SURFACE_MAX_ITER,
)
from smoothing.exceptions import DimensionError, OrientationError
from smoothing.mesh_core import build_adjacency, validate_orientation
from smoothing.models import Mesh, MeshKind, Method, ReportRecord, SmoothResult, WeightMode
from smoothing.quality import summarize
from smoothing.relocators import get_relocator
from smoothing.surface import classify, estimate_normals, is_inverted, project

logging.basicConfig(level=os.environ.get("LOGLEVEL", "INFO"))
logger = logging.getLogger(__name__)


class SurfaceConfig(BaseModel):
    eps_mq: float = Field(default=DEFAULT_EPS_MQ, gt=0)
    eps_mse: float = Field(default=DEFAULT_EPS_MSE, gt=0)
    chi_c: float = Field(default=DEFAULT_CHI_C, gt=0, le=1)
    chi_r: float = Field(default=DEFAULT_CHI_R, gt=0, le=1)
    max_iter: int = Field(default=SURFACE_MAX_ITER, ge=1)
    weight_mode: WeightMode = WeightMode.IDENTITY
    method: Method = Method.MDM
    threads: int = Field(default=1, ge=1)

    @model_validator(mode="after")
    def corner_test_is_stricter(self):
        if self.chi_c < self.chi_r:
            raise ValueError(f"chi_c ({self.chi_c}) must be at least chi_r ({self.chi_r})")
        return self

    @classmethod
    def from_preset(cls, kind: MeshKind, **overrides) -> "SurfaceConfig":
        eps_mq, eps_mse = EPSILON_PRESETS[MeshKind(kind)]
        return cls(**{"eps_mq": eps_mq, "eps_mse": eps_mse, **overrides})


def should_stop(history: Sequence[ReportRecord], cfg: SurfaceConfig) -> bool:
    """
    Stop when the last two records differ by less than eps_mq in MQ and
    eps_mse in MSE, for every element type present. Never stop right after an
    iteration that had to recover from an inverted element.
    """
    if len(history) < 2:
        return False
    previous, last = history[-2], history[-1]
    if last.inversions_recovered > 0:
        return False
    for kind in ("tri", "quad"):
        mq_now, mq_before = getattr(last, f"mq_{kind}"), getattr(previous, f"mq_{kind}")
        if mq_now is None or mq_before is None:
            continue
        mse_now, mse_before = getattr(last, f"mse_{kind}"), getattr(previous, f"mse_{kind}")
        if abs(mq_now - mq_before) >= cfg.eps_mq or abs(mse_now - mse_before) >= cfg.eps_mse:
            return False
    return True


class _NodeUpdater:
    """Relocate-project-check for single nodes; reads step-k data only."""

    def __init__(self, original: Mesh, incident: List[List[int]], coords, relocated, normals):
        self.original = original
        self.incident = incident
        self.coords = coords
        self.relocated = relocated
        self.normals = normals

    def update(self, node: int) -> Tuple[np.ndarray, bool, bool]:
        """New position, whether an inversion was recovered, whether projection missed."""
        current = self.coords[node]
        mapped, hits = project(self.original, self.relocated[node], self.normals[node], self.incident[node])
        if mapped is None:
            return current, False, True
        for eid in self.incident[node]:
            element = list(self.original.elements[eid])
            before = self.coords[element]
            after = before.copy()
            after[element.index(node)] = mapped
            if is_inverted(before, after):
                return current, True, False
        return mapped, False, False

    def update_all(self, nodes: Sequence[int]) -> List[Tuple[np.ndarray, bool, bool]]:
        return [self.update(node) for node in nodes]


def _chunks(items: List[int], count: int) -> List[List[int]]:
    size = max(1, -(-len(items) // count))
    return [items[i:i + size] for i in range(0, len(items), size)]


def smooth_surface(mesh: Mesh, cfg: Optional[SurfaceConfig] = None) -> SmoothResult:
    cfg = cfg or SurfaceConfig()
    if mesh.dimension != 3:
        raise DimensionError(f"surface smoothing needs a 3D mesh, got dimension {mesh.dimension}")

    offending = validate_orientation(mesh)
    if offending:
        logger.error(f"{len(offending)} element(s) with inconsistent winding, refusing to smooth")
        raise OrientationError(offending)

    adj = build_adjacency(mesh)
    incident = [adj.elements_of(node) for node in range(mesh.n_nodes)]
    classification = classify(mesh, estimate_normals(mesh), cfg, adj)
    constrained = classification.constrained | {node for node, count in enumerate(adj.counts) if count == 0}
    free_nodes = [node for node in range(mesh.n_nodes) if node not in constrained]
    relocator = get_relocator(cfg.method, mesh, adj)

    logger.info(
        f"Surface {relocator.name} smoothing: {mesh.n_nodes} nodes, {mesh.n_elements} elements, "
        f"{len(free_nodes)} free, {len(constrained)} constrained"
    )

    coords = mesh.nodes.copy()
    initial = ReportRecord.from_summary(0, summarize(mesh))
    history: List[ReportRecord] = []
    converged = False
    executor = ThreadPoolExecutor(max_workers=cfg.threads) if cfg.threads > 1 else None
    try:
        for iteration in range(1, cfg.max_iter + 1):
            normals = estimate_normals(mesh, coords)
            relocated = relocator.relocate(coords)
            skipped = set(normals.degenerate)
            movable = [node for node in free_nodes if node not in skipped]

            updater = _NodeUpdater(mesh, incident, coords, relocated, normals.vectors)
            if executor is not None and len(movable) > 1:
                # chunks come back in submission order, so the batch is identical for any thread count
                outcomes = [
                    outcome
                    for chunk in executor.map(updater.update_all, _chunks(movable, cfg.threads))
                    for outcome in chunk
                ]
            else:
                outcomes = updater.update_all(movable)

            updated = coords.copy()
            recovered = missed = 0
            for node, (position, inverted, miss) in zip(movable, outcomes):
                updated[node] = position
                recovered += inverted
                missed += miss
            max_disp = float(np.max(np.linalg.norm(updated - coords, axis=1))) if mesh.n_nodes else 0.0
            coords = updated

            record = ReportRecord.from_summary(iteration, summarize(mesh, coords), max_disp, recovered)
            history.append(record)
            logger.debug(
                f"iteration {iteration}: max displacement {max_disp:.3e}, {recovered} recovered, "
                f"{missed} projection miss(es), mq_tri {record.mq_tri}, mq_quad {record.mq_quad}"
            )

            if should_stop([initial, *history], cfg):
                converged = True
                break
    finally:
        if executor is not None:
            executor.shutdown()

    if converged:
        logger.info(f"Converged after {len(history)} iteration(s)")
    else:
        logger.warning(f"No convergence within {cfg.max_iter} iterations")

    return SmoothResult(
        mesh=mesh.with_nodes(coords),
        iterations=len(history),
        converged=converged,
        history=history,
        initial=initial,
        classification=classification,
    )
