import math

import numpy as np
from django.test import SimpleTestCase

from smoothing.models import GenKind, Mesh, NodeLabel, WeightMode
from smoothing.smooth_surface import SurfaceConfig
from smoothing.surface import classify, eigen_ratios, estimate_normals, face_normals, is_inverted, project
from smoothing.tests.fixtures import as_flat_surface, cube, grid, random_rotation

N = 3


def cube_labels_expected(mesh: Mesh):
    """Geometric label of every node of an unperturbed-frame cube shell with edge length N."""
    labels = []
    for point in np.round(mesh.nodes, 9):
        on_faces = int(np.sum((np.abs(point) < 1e-9) | (np.abs(point - N) < 1e-9)))
        labels.append({3: NodeLabel.CORNER, 2: NodeLabel.RIDGE, 1: NodeLabel.SMOOTH}[on_faces])
    return labels


class NormalTests(SimpleTestCase):
    def test_face_normal_and_area(self):
        mesh = Mesh(dimension=3, nodes=[[0, 0, 0], [2, 0, 0], [2, 1, 0], [0, 1, 0]], elements=[(0, 1, 2, 3)])
        normals, areas = face_normals(mesh)
        np.testing.assert_allclose(normals, [[0, 0, 1]])
        np.testing.assert_allclose(areas, [2.0])

    def test_degenerate_face_has_zero_normal(self):
        mesh = Mesh(dimension=3, nodes=[[0, 0, 0], [1, 0, 0], [2, 0, 0]], elements=[(0, 1, 2)])
        normals, areas = face_normals(mesh)
        np.testing.assert_array_equal(normals, [[0, 0, 0]])
        self.assertEqual(areas[0], 0.0)

    def test_cube_vertex_normals(self):
        mesh = cube(n=N + 1)
        normals = estimate_normals(mesh)
        self.assertEqual(normals.degenerate, ())
        origin = int(np.flatnonzero(np.all(mesh.nodes == 0, axis=1))[0])
        np.testing.assert_allclose(normals.vectors[origin], -np.ones(3) / math.sqrt(3), atol=1e-12)
        # a node on the x = 0, y = 0 edge
        ridge = int(np.flatnonzero(np.all(mesh.nodes == [0, 0, 1], axis=1))[0])
        np.testing.assert_allclose(normals.vectors[ridge], [-1 / math.sqrt(2), -1 / math.sqrt(2), 0], atol=1e-12)
        # a node inside the z = N face
        top = int(np.flatnonzero(np.all(mesh.nodes == [1, 1, N], axis=1))[0])
        np.testing.assert_allclose(normals.vectors[top], [0, 0, 1], atol=1e-12)

    def test_isolated_node_is_degenerate(self):
        mesh = Mesh(dimension=3, nodes=[[0, 0, 0], [1, 0, 0], [0, 1, 0], [3, 3, 3]], elements=[(0, 1, 2)])
        with self.assertLogs("smoothing.surface", level="WARNING"):
            normals = estimate_normals(mesh)
        self.assertEqual(normals.degenerate, (3,))
        np.testing.assert_array_equal(normals.vectors[3], [0, 0, 0])


class ClassificationTests(SimpleTestCase):
    def test_cube_features(self):
        mesh = cube(n=N + 1, perturb=0.2, seed=31)
        classification = classify(mesh, estimate_normals(mesh), SurfaceConfig())
        self.assertEqual(list(classification.labels), cube_labels_expected(mesh))
        self.assertEqual(len(classification.nodes_with(NodeLabel.CORNER)), 8)
        self.assertEqual(len(classification.nodes_with(NodeLabel.RIDGE)), 12 * (N - 1))

    def test_area_weighting_keeps_cube_features(self):
        mesh = cube(n=N + 1, perturb=0.05, seed=32)
        cfg = SurfaceConfig(weight_mode=WeightMode.FACE_AREA)
        classification = classify(mesh, estimate_normals(mesh), cfg)
        self.assertEqual(list(classification.labels), cube_labels_expected(mesh))

    def test_invariant_under_rigid_motion(self):
        mesh = cube(n=N + 1, perturb=0.2, seed=33)
        rng = np.random.default_rng(4)
        moved = mesh.with_nodes(mesh.nodes @ random_rotation(rng, 3).T + rng.uniform(-5, 5, size=3))
        corner, ridge, _ = eigen_ratios(mesh)
        moved_corner, moved_ridge, _ = eigen_ratios(moved)
        np.testing.assert_allclose(moved_corner, corner, atol=1e-9)
        np.testing.assert_allclose(moved_ridge, ridge, atol=1e-9)
        cfg = SurfaceConfig()
        self.assertEqual(
            classify(moved, estimate_normals(moved), cfg).labels,
            classify(mesh, estimate_normals(mesh), cfg).labels,
        )

    def test_open_patch_boundary(self):
        mesh = as_flat_surface(grid(GenKind.QUAD_GRID, n=3))
        classification = classify(mesh, estimate_normals(mesh), SurfaceConfig())
        self.assertEqual(classification.nodes_with(NodeLabel.SMOOTH), [4])
        self.assertEqual(len(classification.nodes_with(NodeLabel.BOUNDARY)), 8)
        self.assertEqual(classification.constrained, frozenset({0, 1, 2, 3, 5, 6, 7, 8}))

    def test_fold_is_a_ridge(self):
        # four faces around the edge 0-1, pairwise coplanar, in two perpendicular planes
        mesh = Mesh(
            dimension=3,
            nodes=[[0, 0, 0], [1, 0, 0], [0.5, 1, 0], [0.5, 0, 1], [0.5, -1, 0], [0.5, 0, -1]],
            elements=[(0, 1, 2), (1, 0, 3), (0, 4, 1), (1, 5, 0)],
        )
        corner, ridge, defined = eigen_ratios(mesh)
        self.assertTrue(defined[0])
        self.assertAlmostEqual(corner[0], 0.0, delta=1e-12)
        self.assertAlmostEqual(ridge[0], 1.0, delta=1e-12)


class ProjectionTests(SimpleTestCase):
    def setUp(self):
        self.plane = Mesh(
            dimension=3,
            nodes=[[0, 0, 0], [2, 0, 0], [2, 2, 0], [0, 2, 0]],
            elements=[(0, 1, 2, 3)],
        )

    def test_projects_along_normal(self):
        point, hits = project(self.plane, np.array([0.5, 1.5, 0.3]), np.array([0, 0, 1.0]), [0])
        np.testing.assert_allclose(point, [0.5, 1.5, 0.0], atol=1e-15)
        self.assertEqual(hits, 1)

    def test_line_not_ray(self):
        point, _ = project(self.plane, np.array([0.5, 0.5, -0.7]), np.array([0, 0, 1.0]), [0])
        np.testing.assert_allclose(point, [0.5, 0.5, 0.0], atol=1e-15)

    def test_point_on_split_diagonal_counts_both_halves(self):
        point, hits = project(self.plane, np.array([1.0, 1.0, 0.2]), np.array([0, 0, 1.0]), [0])
        np.testing.assert_allclose(point, [1.0, 1.0, 0.0], atol=1e-15)
        self.assertEqual(hits, 2)

    def test_miss(self):
        point, hits = project(self.plane, np.array([3.0, 1.0, 0.2]), np.array([0, 0, 1.0]), [0])
        self.assertIsNone(point)
        self.assertEqual(hits, 0)

    def test_parallel_line_misses(self):
        point, hits = project(self.plane, np.array([1.0, 1.0, 0.2]), np.array([1.0, 0, 0]), [0])
        self.assertIsNone(point)

    def test_nearest_hit_wins(self):
        mesh = cube(n=N + 1)
        faces = list(range(mesh.n_elements))
        # the line x = 1.3, y = 1.6 crosses the bottom face (z = 0) and the top face (z = N)
        point, hits = project(mesh, np.array([1.3, 1.6, 2.6]), np.array([0, 0, 1.0]), faces)
        self.assertEqual(hits, 2)
        np.testing.assert_allclose(point, [1.3, 1.6, N], atol=1e-12)


class InversionTests(SimpleTestCase):
    def test_small_move_is_fine(self):
        before = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0]], dtype=float)
        after = before.copy()
        after[0] = [0.2, 0.1, 0.05]
        self.assertFalse(is_inverted(before, after))

    def test_flip(self):
        before = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0]], dtype=float)
        after = before.copy()
        after[0] = [1.0, 1.0, 0.0]
        self.assertTrue(is_inverted(before, after))

    def test_collapse(self):
        before = np.array([[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0]], dtype=float)
        after = before.copy()
        after[2] = [0.0, 0.0, 0.0]
        after[3] = [0.5, 0.0, 0.0]
        self.assertTrue(is_inverted(before, after))
