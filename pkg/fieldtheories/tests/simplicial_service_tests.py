from django.test import SimpleTestCase, override_settings

from fieldtheories.exceptions import IndexRangeError, ResourceLimitError, UnsupportedSpaceError
from fieldtheories.services.simplicial_service import (
    Face,
    Simplex,
    SimplexRef,
    SimplicialSet,
    check_simplicial_map,
    degeneracy_of,
    disjoint_union,
    face_of,
    guard_cells,
    pi0,
    prism,
    realization_map,
    space_fingerprint,
    standard,
    surjection_to_word,
    validate,
    validate_realization,
    word_to_surjection,
)
from fieldtheories.services.superalg_service import SuperPolynomial


def counts(space):
    return [len(space.refs(dim)) for dim in range(space.dimension + 1)]


class StandardSpaceTestCase(SimpleTestCase):
    """Unit tests for the named standard spaces"""

    def test_delta2_counts_and_identities(self):
        """Test Δ² has 3 vertices, 3 edges, 1 triangle and satisfies the identities"""
        space = standard("delta2")
        self.assertEqual(counts(space), [3, 3, 1])
        self.assertTrue(validate(space)["valid"])

    def test_boundary3_counts(self):
        """Test ∂Δ³ drops the top simplex"""
        space = standard("boundary3")
        self.assertEqual(counts(space), [4, 6, 4])
        self.assertTrue(validate(space)["valid"])

    def test_spheres_are_valid(self):
        """Test the minimal spheres S¹, S², S³ satisfy the simplicial identities"""
        for n in (1, 2, 3):
            with self.subTest(n=n):
                space = standard(f"sphere{n}")
                self.assertEqual(space.cell_count, 2)
                self.assertTrue(validate(space)["valid"])

    def test_torus_is_valid(self):
        """Test the minimal torus has 1 vertex, 3 edges, 2 triangles"""
        space = standard("torus")
        self.assertEqual(counts(space), [1, 3, 2])
        self.assertTrue(validate(space)["valid"])

    def test_point_aliases_delta0(self):
        """Test that 'point' is Δ⁰"""
        self.assertEqual(standard("point"), standard("delta0"))

    def test_unsupported_name(self):
        """Test that an unknown name raises UnsupportedSpaceError"""
        with self.assertRaises(UnsupportedSpaceError):
            standard("klein")
        with self.assertRaises(UnsupportedSpaceError):
            standard("delta9")

    def test_fingerprint_ignores_name(self):
        """Test that the fingerprint depends only on the structure"""
        a = standard("delta1")
        b = SimplicialSet.build({0: ["0", "1"], 1: ["01"]}, {
            SimplexRef(1, "01"): [Face(SimplexRef(0, "1")), Face(SimplexRef(0, "0"))],
        }, "interval")
        self.assertEqual(space_fingerprint(a), space_fingerprint(b))


class ValidationTestCase(SimpleTestCase):
    """Unit tests for simplicial identity validation"""

    def test_unknown_face_reported(self):
        """Test that a face naming a missing simplex is a violation"""
        space = SimplicialSet.build({0: ["v"], 1: ["a"]}, {
            SimplexRef(1, "a"): [Face(SimplexRef(0, "v")), Face(SimplexRef(0, "w"))],
        })
        report = validate(space)
        self.assertFalse(report["valid"])
        self.assertIn("unknown simplex 0/w", report["violations"][0])

    def test_wrong_face_count_reported(self):
        """Test that an edge with one face is a violation"""
        space = SimplicialSet.build({0: ["v"], 1: ["a"]}, {SimplexRef(1, "a"): [Face(SimplexRef(0, "v"))]})
        self.assertFalse(validate(space)["valid"])

    def test_permuted_faces_break_identities(self):
        """Test that swapping two faces of Δ² breaks d_i d_j = d_(j-1) d_i"""
        ref = lambda dim, ident: SimplexRef(dim, ident)
        faces = {
            ref(1, "01"): [Face(ref(0, "1")), Face(ref(0, "0"))],
            ref(1, "02"): [Face(ref(0, "2")), Face(ref(0, "0"))],
            ref(1, "12"): [Face(ref(0, "2")), Face(ref(0, "1"))],
            ref(2, "012"): [Face(ref(1, "02")), Face(ref(1, "12")), Face(ref(1, "01"))],
        }
        space = SimplicialSet.build({0: ["0", "1", "2"], 1: ["01", "02", "12"], 2: ["012"]}, faces)
        self.assertFalse(validate(space)["valid"])

    def test_degeneracy_word_round_trip(self):
        """Test that s_0 on an edge is the surjection (0, 0, 1)"""
        self.assertEqual(word_to_surjection((0,), 1), (0, 0, 1))
        self.assertEqual(surjection_to_word((0, 0, 1)), (0,))

    def test_face_of_degenerate_simplex(self):
        """Test d_0 s_0 and d_1 s_0 are the identity"""
        space = standard("delta1")
        edge = Simplex.of(SimplexRef(1, "01"))
        degenerate = degeneracy_of(edge, 0)
        self.assertFalse(degenerate.is_nondegenerate)
        self.assertEqual(face_of(space, degenerate, 0), edge)
        self.assertEqual(face_of(space, degenerate, 1), edge)

    def test_face_index_out_of_range(self):
        """Test that d_2 of an edge raises IndexRangeError"""
        with self.assertRaises(IndexRangeError):
            face_of(standard("delta1"), Simplex.of(SimplexRef(1, "01")), 2)


class ConstructionTestCase(SimpleTestCase):
    """Unit tests for unions, components, prisms and the algebraic realization"""

    def test_pi0(self):
        """Test connected components"""
        self.assertEqual(pi0(standard("points3")), 3)
        self.assertEqual(pi0(standard("delta2")), 1)
        self.assertEqual(pi0(disjoint_union([standard("delta1"), standard("point")])), 2)

    def test_prism_of_interval(self):
        """Test Δ¹ × Δ¹ is the square with 4 vertices, 5 edges and 2 triangles"""
        result = prism(standard("delta1"))
        self.assertEqual(counts(result.space), [4, 5, 2])
        self.assertTrue(validate(result.space)["valid"])

    def test_prism_of_circle(self):
        """Test S¹ × Δ¹ is a cylinder with Euler characteristic 0"""
        result = prism(standard("sphere1"))
        self.assertEqual(counts(result.space), [2, 4, 2])
        self.assertTrue(validate(result.space)["valid"])

    def test_prism_maps_are_simplicial(self):
        """Test the end inclusions and the projection commute with faces"""
        result = prism(standard("delta2"))
        for mapping in (result.f0, result.f1, result.projection):
            self.assertTrue(check_simplicial_map(mapping)["valid"])

    @override_settings(SUPERPOINT_MAX_CELLS=3)
    def test_cell_guard(self):
        """Test that spaces above SUPERPOINT_MAX_CELLS are refused"""
        with self.assertRaises(ResourceLimitError):
            guard_cells(standard("delta2"))

    def test_realization_identities(self):
        """Test the cosimplicial identities hold on the coordinate rings"""
        report = validate_realization(3)
        self.assertTrue(report["valid"])
        self.assertGreater(report["checked"], 0)

    def test_coface_pullbacks_on_interval(self):
        """Test x1 restricts to 1 at vertex 1 and to 0 at vertex 0"""
        at_one = realization_map("coface", 0, 1).map
        at_zero = realization_map("coface", 1, 1).map
        self.assertEqual(at_one.image("x1"), SuperPolynomial.constant(at_one.target, 1))
        self.assertTrue(at_zero.image("x1").is_zero)
        self.assertTrue(at_one.image("dx1").is_zero)

    def test_realization_index_range(self):
        """Test that out-of-range operators raise"""
        with self.assertRaises(IndexRangeError):
            realization_map("coface", 3, 2)
        with self.assertRaises(IndexRangeError):
            realization_map("shuffle", 0, 1)
