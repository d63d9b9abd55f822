from abc import ABC, abstractmethod
import inspect
import logging
import os
import sys

import numpy as np
from scipy import sparse

from smoothing.assembly import JacobiMatrix, apply, assemble
from smoothing.mesh_core import edge_neighbors
from smoothing.models import Adjacency, Mesh

logging.basicConfig(level=os.environ.get("LOGLEVEL", "INFO"))
logger = logging.getLogger(__name__)


class Relocator(ABC):
    """
    A Jacobi-style relocation rule: every call reads only the coordinates it
    is given and returns where every node wants to go. Constraints (fixed
    nodes, projection) are applied by the smoother, not here.
    """

    def __init__(self, mesh: Mesh, adj: Adjacency):
        self.mesh = mesh
        self.adj = adj

    @property
    def name(self):
        longname = self.__class__.__name__
        return longname[len("Relocator_"):]

    @abstractmethod
    def relocate(self, coords: np.ndarray) -> np.ndarray:
        """
        Take (n, dim) coordinates at step k and return the (n, dim) relocated
        coordinates of step k+1 for all nodes.
        """
        raise NotImplementedError


class Relocator_Mdm(Relocator):
    def __init__(self, mesh: Mesh, adj: Adjacency):
        super().__init__(mesh, adj)
        self.jacobi: JacobiMatrix = assemble(mesh, adj)

    def relocate(self, coords: np.ndarray) -> np.ndarray:
        return apply(self.jacobi, coords).reshape(coords.shape)


class Relocator_Laplacian(Relocator):
    def __init__(self, mesh: Mesh, adj: Adjacency):
        super().__init__(mesh, adj)
        self.operator = laplacian_operator(mesh, adj)

    def relocate(self, coords: np.ndarray) -> np.ndarray:
        return self.operator @ coords


def laplacian_operator(mesh: Mesh, adj: Adjacency) -> sparse.csr_matrix:
    """n x n averaging operator over edge-connected neighbours; isolated nodes map to themselves."""
    rows, cols, values = [], [], []
    for node, ring in enumerate(edge_neighbors(mesh, adj)):
        if not ring:
            rows.append(node)
            cols.append(node)
            values.append(1.0)
            continue
        rows.extend([node] * len(ring))
        cols.extend(ring)
        values.extend([1.0 / len(ring)] * len(ring))
    return sparse.csr_matrix((values, (rows, cols)), shape=(mesh.n_nodes, mesh.n_nodes))


def get_relocator(name, mesh: Mesh, adj: Adjacency) -> Relocator:
    fullname = "Relocator_" + str(name).capitalize()

    # find all class names in this module
    current_module = sys.modules[__name__]
    clsnames = [x[0] for x in inspect.getmembers(current_module, inspect.isclass)]

    if fullname not in clsnames:
        raise ValueError(f"unknown relocation method '{name}'")
    return getattr(current_module, fullname)(mesh, adj)
