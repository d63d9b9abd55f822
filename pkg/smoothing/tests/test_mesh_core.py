import numpy as np
from django.test import SimpleTestCase
from pydantic import ValidationError

from smoothing.mesh_core import (
    boundary_nodes,
    build_adjacency,
    edge_neighbors,
    inverted_elements,
    reverse_elements,
    signed_areas,
    validate_orientation,
)
from smoothing.models import GenKind, Mesh
from smoothing.tests.fixtures import cube, grid, hexagon_fan, unit_square_pair


class MeshModelTests(SimpleTestCase):
    def test_rejects_pentagon(self):
        with self.assertRaises(ValidationError):
            Mesh(dimension=2, nodes=np.zeros((5, 2)), elements=[(0, 1, 2, 3, 4)])

    def test_rejects_repeated_node(self):
        with self.assertRaises(ValidationError):
            Mesh(dimension=2, nodes=np.zeros((3, 2)), elements=[(0, 1, 1)])

    def test_rejects_out_of_range_node(self):
        with self.assertRaises(ValidationError):
            Mesh(dimension=2, nodes=np.zeros((3, 2)), elements=[(0, 1, 3)])

    def test_rejects_wrong_coordinate_count(self):
        with self.assertRaises(ValidationError):
            Mesh(dimension=3, nodes=np.zeros((3, 2)), elements=[(0, 1, 2)])

    def test_nodes_are_read_only(self):
        mesh = unit_square_pair()
        with self.assertRaises(ValueError):
            mesh.nodes[0, 0] = 5.0

    def test_with_nodes_keeps_connectivity(self):
        mesh = unit_square_pair()
        moved = mesh.with_nodes(mesh.nodes + 1.0)
        self.assertEqual(moved.elements, mesh.elements)
        np.testing.assert_array_equal(moved.nodes, mesh.nodes + 1.0)

    def test_mixed_element_views(self):
        mesh = Mesh(dimension=2, nodes=[[0, 0], [1, 0], [1, 1], [0, 1], [2, 0]], elements=[(0, 1, 2, 3), (1, 4, 2)])
        self.assertEqual(mesh.quad_ids.tolist(), [0])
        self.assertEqual(mesh.tri_ids.tolist(), [1])
        self.assertEqual(mesh.tris.tolist(), [[1, 4, 2]])


class AdjacencyTests(SimpleTestCase):
    def test_counts_and_slots(self):
        adj = build_adjacency(unit_square_pair())
        self.assertEqual(adj.counts, (2, 1, 2, 1))
        self.assertEqual(adj.incident[2], ((0, 2), (1, 1)))
        self.assertEqual(adj.elements_of(0), [0, 1])

    def test_interior_of_six_triangle_fan(self):
        adj = build_adjacency(hexagon_fan())
        self.assertEqual(adj.counts, (6, 2, 2, 2, 2, 2, 2))

    def test_node_shared_by_two_quads_and_a_triangle(self):
        mesh = Mesh(
            dimension=2,
            nodes=[[0, 0], [1, 0], [1, 1], [0, 1], [-1, 0], [-1, 1], [0, -1]],
            elements=[(0, 1, 2, 3), (4, 0, 3, 5), (4, 6, 0)],
        )
        adj = build_adjacency(mesh)
        self.assertEqual(adj.counts[0], 3)
        self.assertEqual(adj.incident[0], ((0, 0), (1, 1), (2, 2)))

    def test_element_order_does_not_change_counts(self):
        mesh = grid(GenKind.QUAD_DOMINANT, n=6, perturb=0.2, seed=3, mixed_fraction=0.4)
        adj = build_adjacency(mesh)
        order = np.random.default_rng(11).permutation(mesh.n_elements)
        shuffled = Mesh(dimension=2, nodes=mesh.nodes, elements=[mesh.elements[k] for k in order])
        shuffled_adj = build_adjacency(shuffled)
        self.assertEqual(shuffled_adj.counts, adj.counts)
        for node in range(mesh.n_nodes):
            mapped = sorted((int(order[eid]), slot) for eid, slot in shuffled_adj.incident[node])
            self.assertEqual(mapped, list(adj.incident[node]))

    def test_isolated_node(self):
        mesh = Mesh(dimension=2, nodes=[[0, 0], [1, 0], [0, 1], [5, 5]], elements=[(0, 1, 2)])
        adj = build_adjacency(mesh)
        self.assertEqual(adj.counts[3], 0)

    def test_edge_neighbors_sorted(self):
        mesh = unit_square_pair()
        neighbors = edge_neighbors(mesh, build_adjacency(mesh))
        self.assertEqual(neighbors[0], [1, 2, 3])
        self.assertEqual(neighbors[1], [0, 2])

    def test_boundary_of_quad_grid(self):
        mesh = grid(GenKind.QUAD_GRID, n=3)
        self.assertEqual(boundary_nodes(mesh, build_adjacency(mesh)), {0, 1, 2, 3, 5, 6, 7, 8})

    def test_closed_shell_has_no_boundary(self):
        mesh = cube()
        self.assertEqual(boundary_nodes(mesh, build_adjacency(mesh)), set())


class OrientationTests(SimpleTestCase):
    def test_signed_area_of_unit_square(self):
        mesh = Mesh(dimension=2, nodes=[[0, 0], [1, 0], [1, 1], [0, 1]], elements=[(0, 1, 2, 3), (0, 3, 2, 1)])
        np.testing.assert_allclose(signed_areas(mesh), [1.0, -1.0])

    def test_clockwise_element_reported(self):
        mesh = Mesh(dimension=2, nodes=[[0, 0], [1, 0], [1, 1], [0, 1]], elements=[(0, 1, 2), (0, 3, 2)])
        self.assertEqual(validate_orientation(mesh), [1])

    def test_reversing_reported_elements_fixes_planar_mesh(self):
        mesh = grid(GenKind.QUAD_DOMINANT, n=5, perturb=0.2, seed=3, mixed_fraction=0.5)
        flipped = reverse_elements(mesh, [0, 4, 7])
        offending = validate_orientation(flipped)
        self.assertEqual(offending, [0, 4, 7])
        self.assertEqual(validate_orientation(reverse_elements(flipped, offending)), [])

    def test_reverse_keeps_first_node(self):
        mesh = unit_square_pair()
        self.assertEqual(reverse_elements(mesh, [1]).elements, ((0, 1, 2), (0, 3, 2)))

    def test_same_direction_shared_edge_in_3d(self):
        mesh = Mesh(
            dimension=3,
            nodes=[[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0]],
            elements=[(0, 1, 2), (0, 1, 3)],
        )
        self.assertEqual(validate_orientation(mesh), [0, 1])

    def test_consistent_shell(self):
        self.assertEqual(validate_orientation(cube(perturb=0.2, seed=5)), [])

    def test_degenerate_element_is_not_inverted(self):
        mesh = Mesh(dimension=2, nodes=[[0, 0], [1, 0], [2, 0]], elements=[(0, 1, 2)])
        self.assertEqual(inverted_elements(mesh), [])
