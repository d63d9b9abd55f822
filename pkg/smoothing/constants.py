import math

import numpy as np

from smoothing.models import GenKind, MeshKind


H = 0.5
S = math.sqrt(3) / 2

# Element iteration matrices, node-major ordering (A, B, C[, D]) x (X, Y[, Z]).
TRI_MATRIX_2D = np.array(
    [
        [0, 0, H, S, H, -S],
        [0, 0, -S, H, S, H],
        [H, -S, 0, 0, H, S],
        [S, H, 0, 0, -S, H],
        [H, S, H, -S, 0, 0],
        [-S, H, S, H, 0, 0],
    ],
    dtype=float,
)

TRI_MATRIX_3D = np.array(
    [
        [0, 0, 0, H, S, -S, H, -S, S],
        [0, 0, 0, -S, H, S, S, H, -S],
        [0, 0, 0, S, -S, H, -S, S, H],
        [H, -S, S, 0, 0, 0, H, S, -S],
        [S, H, -S, 0, 0, 0, -S, H, S],
        [-S, S, H, 0, 0, 0, S, -S, H],
        [H, S, -S, H, -S, S, 0, 0, 0],
        [-S, H, S, S, H, -S, 0, 0, 0],
        [S, -S, H, -S, S, H, 0, 0, 0],
    ],
    dtype=float,
)

QUAD_MATRIX_2D = np.array(
    [
        [0, 0, H, H, 0, 0, H, -H],
        [0, 0, -H, H, 0, 0, H, H],
        [H, -H, 0, 0, H, H, 0, 0],
        [H, H, 0, 0, -H, H, 0, 0],
        [0, 0, H, -H, 0, 0, H, H],
        [0, 0, H, H, 0, 0, -H, H],
        [H, H, 0, 0, H, -H, 0, 0],
        [-H, H, 0, 0, H, H, 0, 0],
    ],
    dtype=float,
)

QUAD_MATRIX_3D = np.array(
    [
        [0, 0, 0, H, H, -H, 0, 0, 0, H, -H, H],
        [0, 0, 0, -H, H, H, 0, 0, 0, H, H, -H],
        [0, 0, 0, H, -H, H, 0, 0, 0, -H, H, H],
        [H, -H, H, 0, 0, 0, H, H, -H, 0, 0, 0],
        [H, H, -H, 0, 0, 0, -H, H, H, 0, 0, 0],
        [-H, H, H, 0, 0, 0, H, -H, H, 0, 0, 0],
        [0, 0, 0, H, -H, H, 0, 0, 0, H, H, -H],
        [0, 0, 0, H, H, -H, 0, 0, 0, -H, H, H],
        [0, 0, 0, -H, H, H, 0, 0, 0, H, -H, H],
        [H, H, -H, 0, 0, 0, H, -H, H, 0, 0, 0],
        [-H, H, H, 0, 0, 0, H, H, -H, 0, 0, 0],
        [H, -H, H, 0, 0, 0, -H, H, H, 0, 0, 0],
    ],
    dtype=float,
)

# Relative tolerance of the default planar stopping distance (x bbox diagonal)
DEFAULT_TOL = 1e-6
PLANAR_MAX_ITER = 1000
SURFACE_MAX_ITER = 200

DEFAULT_EPS_MQ = 1e-6
DEFAULT_EPS_MSE = 1e-4
DEFAULT_CHI_C = 0.7
DEFAULT_CHI_R = 0.1

# A line-face hit is accepted within this barycentric slack
BARYCENTRIC_SLACK = 1e-9

# Fraction of grid cells given the minority element type in the mixed meshes
DEFAULT_MIXED_FRACTION = 0.2

# Orientation checks treat |signed area| below this (x edge length squared) as zero
AREA_EPS = 1e-14

# Stopping thresholds (eps_mq, eps_mse) used for the published surface runs
EPSILON_PRESETS = {
    MeshKind.TRI: (1e-6, 1e-4),
    MeshKind.QUAD: (1e-6, 1e-4),
    MeshKind.TRI_DOMINANT: (1e-5, 1e-5),
    MeshKind.QUAD_DOMINANT: (1e-5, 1e-4),
}

# Height functions over the unit square, scaled by a quarter of the grid extent
LIFT_FUNCTIONS = {
    "sinx_cosy": lambda u, v: np.sin(np.pi * u) * np.cos(np.pi * v),
    "paraboloid": lambda u, v: (u - 0.5) ** 2 + (v - 0.5) ** 2,
}
LIFT_SCALE = 0.25

CLI_GEN_KINDS = {
    "tri-grid": GenKind.TRI_GRID,
    "quad-grid": GenKind.QUAD_GRID,
    "tri-dominant": GenKind.TRI_DOMINANT,
    "quad-dominant": GenKind.QUAD_DOMINANT,
    "cube-shell": GenKind.CUBE_SHELL,
}

CLI_LIFTS = {
    "none": None,
    "sinx-cosy": "sinx_cosy",
    "paraboloid": "paraboloid",
}
