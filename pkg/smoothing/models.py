from functools import cached_property
from typing import List, Optional, Tuple

import numpy as np
from django.db import models
from pydantic import BaseModel, ConfigDict, field_validator, model_validator


class ElementType(models.TextChoices):
    TRI = "tri", "Triangle"
    QUAD = "quad", "Quadrilateral"


class NodeLabel(models.TextChoices):
    SMOOTH = "smooth", "Free to move on the surface"
    RIDGE = "ridge", "On a ridge between two smooth patches"
    CORNER = "corner", "At a corner where three or more patches meet"
    BOUNDARY = "boundary", "On an edge used by a single element"


class Method(models.TextChoices):
    MDM = "mdm", "Modified direct method"
    LAPLACIAN = "laplacian", "Laplacian smoothing"


class WeightMode(models.TextChoices):
    IDENTITY = "identity", "Unit weight for every incident face"
    FACE_AREA = "area", "Incident faces weighted by their area"


class GenKind(models.TextChoices):
    TRI_GRID = "tri_grid", "Grid of cells split along one diagonal"
    QUAD_GRID = "quad_grid", "Grid of quadrilateral cells"
    TRI_DOMINANT = "tri_dominant", "Triangle grid with some cells split into a quad and two triangles"
    QUAD_DOMINANT = "quad_dominant", "Quad grid with some cells split into two triangles"
    CUBE_SHELL = "cube_shell", "Closed quad shell of a cube"


class MeshKind(models.TextChoices):
    TRI = "tri", "Triangles only"
    QUAD = "quad", "Quadrilaterals only"
    TRI_DOMINANT = "tri_dominant", "Mostly triangles"
    QUAD_DOMINANT = "quad_dominant", "Mostly quadrilaterals"


class MeshFormat(models.TextChoices):
    OBJ = "obj", "Wavefront OBJ"
    OFF = "off", "Object File Format"


class ReportFormat(models.TextChoices):
    JSON = "json", "JSON array of records"
    CSV = "csv", "CSV with a header row"


class Mesh(BaseModel):
    """
    Node coordinates plus a single list of triangles and quadrilaterals.
    Node ids are dense and 0-based. Elements are stored in one heterogeneous
    list; the element type is the number of nodes it references.
    Winding is checked separately (mesh_core.validate_orientation) so that
    badly oriented input can be reported rather than rejected outright.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    dimension: int
    nodes: np.ndarray
    elements: Tuple[Tuple[int, ...], ...]

    @field_validator("dimension")
    @classmethod
    def dimension_is_2_or_3(cls, value):
        if value not in (2, 3):
            raise ValueError(f"dimension must be 2 or 3, got {value}")
        return value

    @field_validator("nodes", mode="before")
    @classmethod
    def nodes_as_array(cls, value, info):
        nodes = np.array(value, dtype=float)
        dimension = info.data.get("dimension")
        if nodes.size == 0 and dimension is not None:
            nodes = nodes.reshape(0, dimension)
        if nodes.ndim != 2:
            raise ValueError(f"nodes must be a 2-dimensional array, got shape {nodes.shape}")
        if not np.all(np.isfinite(nodes)):
            raise ValueError("node coordinates must be finite")
        nodes.setflags(write=False)
        return nodes

    @field_validator("elements", mode="before")
    @classmethod
    def elements_as_tuples(cls, value):
        return tuple(tuple(int(i) for i in element) for element in value)

    @model_validator(mode="after")
    def check_connectivity(self):
        if self.nodes.shape[1] != self.dimension:
            raise ValueError(
                f"nodes have {self.nodes.shape[1]} coordinates but dimension is {self.dimension}"
            )
        n = self.nodes.shape[0]
        for eid, element in enumerate(self.elements):
            if len(element) not in (3, 4):
                raise ValueError(f"element {eid} has {len(element)} nodes, only triangles and quads are supported")
            if len(set(element)) != len(element):
                raise ValueError(f"element {eid} repeats a node id: {element}")
            for node in element:
                if node < 0 or node >= n:
                    raise ValueError(f"element {eid} references node {node}, mesh has {n} nodes")
        return self

    def __eq__(self, other):
        if not isinstance(other, Mesh):
            return NotImplemented
        return (
            self.dimension == other.dimension
            and self.elements == other.elements
            and np.array_equal(self.nodes, other.nodes)
        )

    @property
    def n_nodes(self) -> int:
        return self.nodes.shape[0]

    @property
    def n_elements(self) -> int:
        return len(self.elements)

    def element_type(self, eid: int) -> ElementType:
        return ElementType.TRI if len(self.elements[eid]) == 3 else ElementType.QUAD

    @cached_property
    def tri_ids(self) -> np.ndarray:
        return np.array([eid for eid, e in enumerate(self.elements) if len(e) == 3], dtype=np.int64)

    @cached_property
    def quad_ids(self) -> np.ndarray:
        return np.array([eid for eid, e in enumerate(self.elements) if len(e) == 4], dtype=np.int64)

    @cached_property
    def tris(self) -> np.ndarray:
        """(m, 3) node ids of the triangles, in element order."""
        return np.array([self.elements[eid] for eid in self.tri_ids], dtype=np.int64).reshape(-1, 3)

    @cached_property
    def quads(self) -> np.ndarray:
        """(m, 4) node ids of the quadrilaterals, in element order."""
        return np.array([self.elements[eid] for eid in self.quad_ids], dtype=np.int64).reshape(-1, 4)

    def bbox_diagonal(self, coords: Optional[np.ndarray] = None) -> float:
        coords = self.nodes if coords is None else coords
        if len(coords) == 0:
            return 0.0
        return float(np.linalg.norm(coords.max(axis=0) - coords.min(axis=0)))

    def with_nodes(self, coords) -> "Mesh":
        """Same connectivity, new coordinates."""
        nodes = np.array(coords, dtype=float)
        if nodes.shape != self.nodes.shape:
            raise ValueError(f"expected coordinates of shape {self.nodes.shape}, got {nodes.shape}")
        nodes.setflags(write=False)
        return self.model_copy(update={"nodes": nodes})


class Adjacency(BaseModel):
    """Per node: the incident (element id, local slot) pairs and their count e_i."""

    model_config = ConfigDict(frozen=True)

    incident: Tuple[Tuple[Tuple[int, int], ...], ...]
    counts: Tuple[int, ...]

    @model_validator(mode="after")
    def counts_match_incident(self):
        if len(self.counts) != len(self.incident):
            raise ValueError("counts and incident lists cover a different number of nodes")
        for node, (count, inc) in enumerate(zip(self.counts, self.incident)):
            if count != len(inc):
                raise ValueError(f"node {node}: count {count} but {len(inc)} incident elements")
        return self

    def elements_of(self, node: int) -> List[int]:
        return [eid for eid, _ in self.incident[node]]


class NodeClassification(BaseModel):
    model_config = ConfigDict(frozen=True)

    labels: Tuple[NodeLabel, ...]
    # lambda3 / lambda1 and lambda2 / lambda1 per node (0 when undefined)
    corner_ratios: Tuple[float, ...] = ()
    ridge_ratios: Tuple[float, ...] = ()

    @property
    def constrained(self) -> frozenset:
        return frozenset(i for i, label in enumerate(self.labels) if label != NodeLabel.SMOOTH)

    def nodes_with(self, label: NodeLabel) -> List[int]:
        return [i for i, lab in enumerate(self.labels) if lab == label]


class QualitySummary(BaseModel):
    model_config = ConfigDict(frozen=True)

    mq_tri: Optional[float] = None
    mse_tri: Optional[float] = None
    mq_quad: Optional[float] = None
    mse_quad: Optional[float] = None
    n_tri: int = 0
    n_quad: int = 0

    @model_validator(mode="after")
    def fields_follow_counts(self):
        for kind, count in (("tri", self.n_tri), ("quad", self.n_quad)):
            mq, mse = getattr(self, f"mq_{kind}"), getattr(self, f"mse_{kind}")
            if (count > 0) != (mq is not None) or (count > 0) != (mse is not None):
                raise ValueError(f"{kind} quality must be present iff the mesh has {kind} elements")
            if mq is not None and not (0.0 <= mq <= 1.0):
                raise ValueError(f"mq_{kind} out of [0, 1]: {mq}")
            if mse is not None and mse < 0.0:
                raise ValueError(f"mse_{kind} negative: {mse}")
        return self


class ReportRecord(BaseModel):
    iter: int
    mq_tri: Optional[float] = None
    mse_tri: Optional[float] = None
    mq_quad: Optional[float] = None
    mse_quad: Optional[float] = None
    max_disp: float = 0.0
    inversions_recovered: int = 0

    @classmethod
    def from_summary(cls, iteration: int, summary: QualitySummary, max_disp: float = 0.0, inversions_recovered: int = 0):
        return cls(
            iter=iteration,
            mq_tri=summary.mq_tri,
            mse_tri=summary.mse_tri,
            mq_quad=summary.mq_quad,
            mse_quad=summary.mse_quad,
            max_disp=max_disp,
            inversions_recovered=inversions_recovered,
        )


class SmoothResult(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    mesh: Mesh
    iterations: int
    converged: bool
    history: List[ReportRecord]
    # quality of the input mesh, iteration 0
    initial: ReportRecord
    classification: Optional[NodeClassification] = None

    @model_validator(mode="after")
    def history_matches_iterations(self):
        if len(self.history) != self.iterations:
            raise ValueError(f"history has {len(self.history)} records for {self.iterations} iterations")
        return self

    @property
    def report(self) -> List[ReportRecord]:
        return [self.initial, *self.history]
