"""
Deterministic synthetic meshes.

Random numbers come from splitmix64 (64-bit state, increment
0x9E3779B97F4A7C15, finaliser constants 0xBF58476D1CE4E5B9 and
0x94D049BB133111EB); a double in [0, 1) is the top 53 bits of an output times
2**-53. Draw order is part of the contract so fixtures are reproducible:

  1. two draws (dx, dy) per grid node in node-id order, boundary nodes
     included even though they are never moved;
  2. one draw per cell, in cell order, for the mixed constructions.

Grids have unit cells, node (i, j) sits at (i, j) and has id j * nx + i.
"""
import logging
import os
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field, model_validator

from smoothing.constants import DEFAULT_MIXED_FRACTION, LIFT_FUNCTIONS, LIFT_SCALE
from smoothing.mesh_core import inverted_elements
from smoothing.models import GenKind, Mesh

logging.basicConfig(level=os.environ.get("LOGLEVEL", "INFO"))
logger = logging.getLogger(__name__)

MASK64 = (1 << 64) - 1


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def next_float(self) -> float:
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))


class GenSpec(BaseModel):
    kind: GenKind
    nx: int = Field(ge=2)
    ny: int = Field(default=2, ge=2)
    perturb: float = Field(default=0.0, ge=0, lt=0.5)
    seed: int = Field(default=0, ge=0, le=MASK64)
    lift: Optional[str] = None
    # share of cells given the minority element type in the mixed kinds
    mixed_fraction: float = Field(default=DEFAULT_MIXED_FRACTION, ge=0, le=1)

    @model_validator(mode="after")
    def check_lift(self):
        if self.lift is not None and self.lift not in LIFT_FUNCTIONS:
            raise ValueError(f"unknown lift '{self.lift}', expected one of {sorted(LIFT_FUNCTIONS)}")
        if self.lift is not None and self.kind == GenKind.CUBE_SHELL:
            raise ValueError("a cube shell is already a surface and cannot be lifted")
        return self


def _grid_nodes(spec: GenSpec, rng: SplitMix64) -> np.ndarray:
    nodes = []
    for j in range(spec.ny):
        for i in range(spec.nx):
            dx = (2.0 * rng.next_float() - 1.0) * spec.perturb
            dy = (2.0 * rng.next_float() - 1.0) * spec.perturb
            interior = 0 < i < spec.nx - 1 and 0 < j < spec.ny - 1
            nodes.append((i + dx, j + dy) if interior else (float(i), float(j)))
    return np.array(nodes)


def _cells(spec: GenSpec):
    for j in range(spec.ny - 1):
        for i in range(spec.nx - 1):
            a = j * spec.nx + i
            # counterclockwise corners of the cell
            yield a, a + 1, a + 1 + spec.nx, a + spec.nx


def _grid_elements(spec: GenSpec, nodes: np.ndarray, rng: SplitMix64) -> Tuple[np.ndarray, List[Tuple[int, ...]]]:
    extra = []
    elements = []
    for a, b, c, d in _cells(spec):
        if spec.kind == GenKind.QUAD_GRID:
            elements.append((a, b, c, d))
        elif spec.kind == GenKind.TRI_GRID:
            elements.extend([(a, b, c), (a, c, d)])
        elif spec.kind == GenKind.QUAD_DOMINANT:
            # pair the two triangles of the cell into a quad unless drawn to stay split
            if rng.next_float() < spec.mixed_fraction:
                elements.extend([(a, b, c), (a, c, d)])
            else:
                elements.append((a, b, c, d))
        else:
            # tri-dominant: a drawn share of cells becomes one quad and two
            # triangles around a new node at the centroid of triangle (a, c, d)
            if rng.next_float() < spec.mixed_fraction:
                m = len(nodes) + len(extra)
                extra.append(nodes[[a, c, d]].mean(axis=0))
                elements.extend([(a, b, c, m), (a, m, d), (m, c, d)])
            else:
                elements.extend([(a, b, c), (a, c, d)])
    if extra:
        nodes = np.vstack([nodes, np.array(extra)])
    return nodes, elements


def _repair(spec: GenSpec, nodes: np.ndarray, elements: List[Tuple[int, ...]]) -> np.ndarray:
    """Undo the perturbation of nodes of inverted elements until every element is counterclockwise."""
    base = np.array([(i, j) for j in range(spec.ny) for i in range(spec.nx)], dtype=float)
    n_grid = spec.nx * spec.ny
    mesh = Mesh(dimension=2, nodes=nodes, elements=elements)
    offending = inverted_elements(mesh)
    while offending:
        nodes = nodes.copy()
        for eid in offending:
            for node in elements[eid]:
                if node < n_grid:
                    nodes[node] = base[node]
        # centroid nodes follow their (possibly restored) corners
        for element in elements:
            if len(element) == 3 and element[0] >= n_grid:
                m, c, d = element
                a = next(e[0] for e in elements if len(e) == 4 and e[3] == m)
                nodes[m] = nodes[[a, c, d]].mean(axis=0)
        logger.debug(f"restored {len(offending)} inverted element(s) to unperturbed positions")
        mesh = mesh.with_nodes(nodes)
        offending = inverted_elements(mesh)
    return nodes


def _lift(spec: GenSpec, nodes: np.ndarray) -> np.ndarray:
    extent = max(spec.nx - 1, spec.ny - 1)
    u = nodes[:, 0] / (spec.nx - 1)
    v = nodes[:, 1] / (spec.ny - 1)
    z = LIFT_SCALE * extent * LIFT_FUNCTIONS[spec.lift](u, v)
    return np.column_stack([nodes, z])


# (origin, u axis, v axis) per face; u x v points out of the cube
CUBE_FACES = (
    ((0, 0, 0), (0, 1, 0), (1, 0, 0)),
    ((0, 0, 1), (1, 0, 0), (0, 1, 0)),
    ((0, 0, 0), (1, 0, 0), (0, 0, 1)),
    ((0, 1, 0), (0, 0, 1), (1, 0, 0)),
    ((0, 0, 0), (0, 0, 1), (0, 1, 0)),
    ((1, 0, 0), (0, 1, 0), (0, 0, 1)),
)


def _cube_shell(spec: GenSpec, rng: SplitMix64) -> Mesh:
    n = spec.nx - 1
    ids = {}
    nodes = []
    elements = []

    def node_id(origin, u, v, a, b):
        key = tuple(n * o + a * du + b * dv for o, du, dv in zip(origin, u, v))
        if key not in ids:
            ids[key] = len(nodes)
            nodes.append(key)
        return ids[key]

    for origin, u, v in CUBE_FACES:
        for b in range(n):
            for a in range(n):
                elements.append((
                    node_id(origin, u, v, a, b),
                    node_id(origin, u, v, a + 1, b),
                    node_id(origin, u, v, a + 1, b + 1),
                    node_id(origin, u, v, a, b + 1),
                ))

    coords = np.array(nodes, dtype=float)
    if spec.perturb > 0:
        # in-face moves for nodes strictly inside a face
        for node in range(len(coords)):
            du = (2.0 * rng.next_float() - 1.0) * spec.perturb
            dv = (2.0 * rng.next_float() - 1.0) * spec.perturb
            on_face = (coords[node] == 0) | (coords[node] == n)
            if on_face.sum() == 1:
                free_axes = np.flatnonzero(~on_face)
                coords[node, free_axes[0]] += du
                coords[node, free_axes[1]] += dv
    return Mesh(dimension=3, nodes=coords, elements=elements)


def generate(spec: GenSpec) -> Mesh:
    rng = SplitMix64(spec.seed)
    if spec.kind == GenKind.CUBE_SHELL:
        mesh = _cube_shell(spec, rng)
    else:
        nodes = _grid_nodes(spec, rng)
        nodes, elements = _grid_elements(spec, nodes, rng)
        if spec.perturb > 0:
            nodes = _repair(spec, nodes, elements)
        if spec.lift is not None:
            nodes = _lift(spec, nodes)
        mesh = Mesh(dimension=3 if spec.lift else 2, nodes=nodes, elements=elements)
    logger.info(f"Generated {spec.kind.label.lower()}: {mesh.n_nodes} nodes, {mesh.n_elements} elements")
    return mesh
