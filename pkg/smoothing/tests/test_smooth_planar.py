import numpy as np
from django.test import SimpleTestCase
from pydantic import ValidationError

from smoothing.exceptions import DimensionError, OrientationError
from smoothing.mesh_core import boundary_nodes, build_adjacency, inverted_elements, reverse_elements
from smoothing.models import GenKind, Method
from smoothing.relocators import get_relocator
from smoothing.smooth_planar import PlanarConfig, laplacian_step, smooth_planar
from smoothing.tests.fixtures import cube, grid, hexagon_fan, unit_square_pair


class PlanarConfigTests(SimpleTestCase):
    def test_defaults(self):
        cfg = PlanarConfig()
        self.assertEqual(cfg.method, Method.MDM)
        self.assertTrue(cfg.fix_boundary)
        self.assertEqual(cfg.max_iter, 1000)

    def test_relative_tolerance(self):
        mesh = grid(GenKind.QUAD_GRID, n=4)
        self.assertAlmostEqual(PlanarConfig(tol=1e-3).tolerance_for(mesh), 1e-3 * np.sqrt(18), delta=1e-15)
        self.assertEqual(PlanarConfig(tol=1e-3, tol_absolute=True).tolerance_for(mesh), 1e-3)

    def test_rejects_non_positive_values(self):
        with self.assertRaises(ValidationError):
            PlanarConfig(tol=0)
        with self.assertRaises(ValidationError):
            PlanarConfig(max_iter=0)


class SmoothPlanarTests(SimpleTestCase):
    def test_rejects_surface_mesh(self):
        with self.assertRaises(DimensionError):
            smooth_planar(cube())

    def test_rejects_clockwise_elements(self):
        mesh = reverse_elements(grid(GenKind.TRI_GRID, n=4), [2, 5])
        with self.assertRaises(OrientationError) as ctx:
            smooth_planar(mesh)
        self.assertEqual(ctx.exception.element_ids, [2, 5])

    def test_boundary_nodes_fixed(self):
        mesh = grid(GenKind.TRI_DOMINANT, n=7, perturb=0.3, seed=8, mixed_fraction=0.5)
        result = smooth_planar(mesh)
        boundary = sorted(boundary_nodes(mesh, build_adjacency(mesh)))
        np.testing.assert_array_equal(result.mesh.nodes[boundary], mesh.nodes[boundary])

    def test_history_and_report(self):
        mesh = grid(GenKind.QUAD_GRID, n=6, perturb=0.3, seed=1)
        result = smooth_planar(mesh, PlanarConfig(max_iter=50))
        self.assertEqual(len(result.history), result.iterations)
        self.assertEqual([record.iter for record in result.report], list(range(result.iterations + 1)))
        self.assertEqual(result.report[0].max_disp, 0.0)
        self.assertIsNone(result.initial.mq_tri)
        self.assertIsNone(result.classification)

    def test_converges_and_improves_quality(self):
        for kind in (GenKind.TRI_GRID, GenKind.QUAD_GRID):
            mesh = grid(kind, n=6, perturb=0.3, seed=12)
            result = smooth_planar(mesh)
            self.assertTrue(result.converged)
            self.assertLessEqual(result.history[-1].max_disp, PlanarConfig().tolerance_for(mesh))
            self.assertEqual(inverted_elements(result.mesh), [])

    def test_quality_trend_on_large_perturbed_grids(self):
        for kind, field in ((GenKind.TRI_GRID, "tri"), (GenKind.QUAD_GRID, "quad")):
            mesh = grid(kind, n=20, perturb=0.3, seed=2024)
            result = smooth_planar(mesh, PlanarConfig(max_iter=5))
            mq = [getattr(record, f"mq_{field}") for record in result.report]
            mse = [getattr(record, f"mse_{field}") for record in result.report]
            self.assertTrue(all(b > a for a, b in zip(mq, mq[1:])), mq)
            self.assertTrue(all(b < a for a, b in zip(mse, mse[1:])), mse)

    def test_not_converged_within_max_iter(self):
        mesh = grid(GenKind.QUAD_GRID, n=8, perturb=0.3, seed=3)
        with self.assertLogs("smoothing.smooth_planar", level="WARNING"):
            result = smooth_planar(mesh, PlanarConfig(max_iter=2))
        self.assertFalse(result.converged)
        self.assertEqual(result.iterations, 2)

    def test_free_boundary_moves_boundary(self):
        mesh = grid(GenKind.QUAD_GRID, n=5, perturb=0.3, seed=4)
        result = smooth_planar(mesh, PlanarConfig(fix_boundary=False, max_iter=3))
        self.assertFalse(np.array_equal(result.mesh.nodes[1], mesh.nodes[1]))

    def test_laplacian_method(self):
        mesh = grid(GenKind.TRI_DOMINANT, n=6, perturb=0.3, seed=6, mixed_fraction=0.3)
        result = smooth_planar(mesh, PlanarConfig(method=Method.LAPLACIAN))
        self.assertTrue(result.converged)
        self.assertGreater(result.history[-1].mq_tri, result.initial.mq_tri)


class LaplacianStepTests(SimpleTestCase):
    def test_perturbed_hexagon_centre_returns_to_middle(self):
        mesh = hexagon_fan(center=(0.3, 0.2))
        ring = set(range(1, 7))
        step = laplacian_step(mesh, build_adjacency(mesh), ring)
        np.testing.assert_allclose(step[0], [0.0, 0.0], rtol=0, atol=1e-15)
        np.testing.assert_array_equal(step[1:], mesh.nodes[1:])

    def test_reads_given_coordinates(self):
        mesh = unit_square_pair()
        moved = mesh.nodes.copy()
        moved[1] = [2.0, 0.0]
        step = laplacian_step(mesh, build_adjacency(mesh), {1, 2, 3}, moved)
        np.testing.assert_allclose(step[0], [1.0, 2.0 / 3.0], rtol=0, atol=1e-15)

    def test_matches_relocator_on_free_nodes(self):
        mesh = grid(GenKind.QUAD_DOMINANT, n=5, perturb=0.3, seed=9, mixed_fraction=0.5)
        adj = build_adjacency(mesh)
        fixed = boundary_nodes(mesh, adj)
        step = laplacian_step(mesh, adj, fixed)
        relocated = get_relocator(Method.LAPLACIAN, mesh, adj).relocate(mesh.nodes)
        free = sorted(set(range(mesh.n_nodes)) - fixed)
        np.testing.assert_array_equal(step[sorted(fixed)], mesh.nodes[sorted(fixed)])
        np.testing.assert_allclose(step[free], relocated[free], atol=1e-15)

    def test_unknown_relocator(self):
        mesh = grid(GenKind.QUAD_GRID, n=3)
        with self.assertRaises(ValueError):
            get_relocator("jacobi", mesh, build_adjacency(mesh))
