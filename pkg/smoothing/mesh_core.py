import logging
import os
from collections import Counter, defaultdict
from typing import Iterable, List, Set, Tuple

import numpy as np

from smoothing.constants import AREA_EPS
from smoothing.models import Adjacency, Mesh

logging.basicConfig(level=os.environ.get("LOGLEVEL", "INFO"))
logger = logging.getLogger(__name__)


def element_edges(element: Tuple[int, ...]) -> List[Tuple[int, int]]:
    """Directed edges of an element, following its winding."""
    return [(element[i], element[(i + 1) % len(element)]) for i in range(len(element))]


def undirected_edge_counts(mesh: Mesh) -> Counter:
    counts = Counter()
    for element in mesh.elements:
        for u, v in element_edges(element):
            counts[(min(u, v), max(u, v))] += 1
    return counts


def build_adjacency(mesh: Mesh) -> Adjacency:
    incident = [[] for _ in range(mesh.n_nodes)]
    # element ids ascend because elements are visited in order
    for eid, element in enumerate(mesh.elements):
        for slot, node in enumerate(element):
            incident[node].append((eid, slot))
    return Adjacency(
        incident=tuple(tuple(inc) for inc in incident),
        counts=tuple(len(inc) for inc in incident),
    )


def signed_areas(mesh: Mesh, coords: np.ndarray = None) -> np.ndarray:
    """Shoelace area of every element of a planar mesh, positive when counterclockwise."""
    coords = mesh.nodes if coords is None else coords
    areas = np.zeros(mesh.n_elements)
    for eid, element in enumerate(mesh.elements):
        pts = coords[list(element), :2]
        x, y = pts[:, 0], pts[:, 1]
        areas[eid] = 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))
    return areas


def _longest_edges(mesh: Mesh, coords: np.ndarray) -> np.ndarray:
    lengths = np.zeros(mesh.n_elements)
    for eid, element in enumerate(mesh.elements):
        pts = coords[list(element)]
        lengths[eid] = np.max(np.linalg.norm(pts - np.roll(pts, -1, axis=0), axis=1))
    return lengths


def inverted_elements(mesh: Mesh, coords: np.ndarray = None) -> List[int]:
    """Planar elements with negative signed area (zero-area elements are not reported)."""
    coords = mesh.nodes if coords is None else coords
    areas = signed_areas(mesh, coords)
    scale = _longest_edges(mesh, coords) ** 2
    return [int(eid) for eid in np.flatnonzero(areas < -AREA_EPS * scale)]


def validate_orientation(mesh: Mesh) -> List[int]:
    """
    Element ids whose winding is wrong.
    In 2D these are the clockwise elements. In 3D every element that traverses
    a directed edge also traversed by another element is reported, so both
    elements of a badly wound pair show up.
    """
    if mesh.dimension == 2:
        return inverted_elements(mesh)

    users = defaultdict(list)
    for eid, element in enumerate(mesh.elements):
        for edge in element_edges(element):
            users[edge].append(eid)
    offending = set()
    for eids in users.values():
        if len(eids) > 1:
            offending.update(eids)
    return sorted(offending)


def boundary_nodes(mesh: Mesh, adj: Adjacency) -> Set[int]:
    edge_counts = undirected_edge_counts(mesh)
    boundary = set()
    for node, incident in enumerate(adj.incident):
        for eid, slot in incident:
            element = mesh.elements[eid]
            k = len(element)
            for other in (element[(slot + 1) % k], element[(slot - 1) % k]):
                if edge_counts[(min(node, other), max(node, other))] == 1:
                    boundary.add(node)
                    break
            if node in boundary:
                break
    return boundary


def reverse_elements(mesh: Mesh, element_ids: Iterable[int]) -> Mesh:
    """Flip the winding of the given elements, keeping node 0 and the (0, 2) diagonal in place."""
    flip = set(element_ids)
    elements = [
        (element[0],) + tuple(reversed(element[1:])) if eid in flip else element
        for eid, element in enumerate(mesh.elements)
    ]
    return Mesh(dimension=mesh.dimension, nodes=mesh.nodes, elements=elements)


def edge_neighbors(mesh: Mesh, adj: Adjacency) -> List[List[int]]:
    """Distinct nodes connected to each node by an element edge, sorted by id."""
    neighbors = []
    for node, incident in enumerate(adj.incident):
        ring = set()
        for eid, slot in incident:
            element = mesh.elements[eid]
            k = len(element)
            ring.add(element[(slot + 1) % k])
            ring.add(element[(slot - 1) % k])
        neighbors.append(sorted(ring))
    return neighbors
