"""Mesh builders shared by the smoothing tests."""
import math

import numpy as np

from smoothing.meshgen import GenSpec, generate
from smoothing.models import GenKind, Mesh


def unit_square_pair() -> Mesh:
    # 3 --- 2
    # |  /  |
    # 0 --- 1
    return Mesh(
        dimension=2,
        nodes=[[0, 0], [1, 0], [1, 1], [0, 1]],
        elements=[(0, 1, 2), (0, 2, 3)],
    )


def hexagon_fan(center=(0.0, 0.0)) -> Mesh:
    """Six unit equilateral triangles around node 0; ring nodes 1..6 counterclockwise."""
    ring = [(math.cos(k * math.pi / 3), math.sin(k * math.pi / 3)) for k in range(6)]
    elements = [(0, k + 1, (k + 1) % 6 + 1) for k in range(6)]
    return Mesh(dimension=2, nodes=[center, *ring], elements=elements)


def equilateral_tiling(n: int = 5) -> Mesh:
    """n x n lattice of unit equilateral triangles, counterclockwise."""
    h = math.sqrt(3) / 2

    def node(i, j):
        return j * n + i

    nodes = [(i + 0.5 * j, j * h) for j in range(n) for i in range(n)]
    elements = []
    for j in range(n - 1):
        for i in range(n - 1):
            elements.append((node(i, j), node(i + 1, j), node(i, j + 1)))
            elements.append((node(i + 1, j), node(i + 1, j + 1), node(i, j + 1)))
    return Mesh(dimension=2, nodes=nodes, elements=elements)


def grid(kind: GenKind, n: int = 6, perturb: float = 0.0, seed: int = 0, lift=None, **kwargs) -> Mesh:
    return generate(GenSpec(kind=kind, nx=n, ny=n, perturb=perturb, seed=seed, lift=lift, **kwargs))


def cube(n: int = 4, perturb: float = 0.0, seed: int = 0) -> Mesh:
    return generate(GenSpec(kind=GenKind.CUBE_SHELL, nx=n, perturb=perturb, seed=seed))


def as_flat_surface(mesh: Mesh) -> Mesh:
    """The planar mesh embedded at z = 0."""
    return Mesh(dimension=3, nodes=np.column_stack([mesh.nodes, np.zeros(mesh.n_nodes)]), elements=mesh.elements)


def random_rotation(rng: np.random.Generator, dim: int) -> np.ndarray:
    if dim == 2:
        theta = rng.uniform(0, 2 * math.pi)
        return np.array([[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]])
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def random_meshes(count: int, seed: int = 7):
    """Seeded small meshes covering tri, quad and mixed connectivity in 2D and 3D."""
    rng = np.random.default_rng(seed)
    kinds = [GenKind.TRI_GRID, GenKind.QUAD_GRID, GenKind.TRI_DOMINANT, GenKind.QUAD_DOMINANT]
    meshes = []
    for index in range(count):
        kind = kinds[index % len(kinds)]
        nx, ny = int(rng.integers(2, 6)), int(rng.integers(2, 6))
        lift = "sinx_cosy" if index % 2 else None
        spec = GenSpec(
            kind=kind,
            nx=nx,
            ny=ny,
            perturb=float(rng.uniform(0, 0.4)),
            seed=int(rng.integers(0, 2**32)),
            lift=lift,
            mixed_fraction=0.5,
        )
        meshes.append(generate(spec))
    return meshes
