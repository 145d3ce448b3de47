from django.test import SimpleTestCase, override_settings

from fieldtheories.exceptions import (
    ConstraintViolationError,
    DegreeMismatchError,
    RepresentationError,
)
from fieldtheories.services.fieldtheory_service import (
    FieldTheoryQuery,
    Geometry,
    TwistSpec,
    basic_twist_coinvariance,
    bordism_generators,
    check_group_like,
    check_query,
    check_twist_parameters,
    degree_representation,
    degree_twist_membership,
    differential_twist_spec,
    evaluate_polynomial,
    general_twist_check,
    general_twist_membership,
    geometry_bialgebra,
    geometry_coaction,
    representation_table,
    twisted_differential,
    untwisted_membership,
    verify_geometry_chain,
)
from fieldtheories.services.forms_service import (
    SullivanForm,
    degree_component,
    differential,
    is_closed,
    random_form,
    subtract,
    wedge,
)
from fieldtheories.services.simplicial_service import SimplexRef, coordinate_table, operator_map, standard
from fieldtheories.services.superalg_service import SuperPolynomial


def fundamental_form():
    circle = standard("sphere1")
    return SullivanForm.build(circle, {SimplexRef(1, "top"): SuperPolynomial.generator(coordinate_table(1), "dx1")})


def interval_coordinate():
    """The function x1 on Δ¹, which is 0 at vertex 0 and 1 at vertex 1."""
    interval = standard("delta1")
    return SullivanForm.build(interval, {
        SimplexRef(0, "1"): SuperPolynomial.constant(coordinate_table(0), 1),
        SimplexRef(1, "01"): SuperPolynomial.generator(coordinate_table(1), "x1"),
    })


def simplex_form(name, top_value):
    """Extend a value on the top simplex of Δⁿ to all faces by restriction."""
    space = standard(name)
    top = max(space.all_refs(), key=lambda ref: ref.dim)
    return SullivanForm.build(space, {
        ref: operator_map(tuple(int(v) for v in ref.id), top.dim)(top_value) for ref in space.all_refs()
    })


class GeometryTestCase(SimpleTestCase):
    """Unit tests for the five geometries"""

    def test_parse(self):
        """Test geometry names parse with dashes or underscores"""
        self.assertIs(Geometry.parse("Oriented-Euclidean"), Geometry.ORIENTED_EUCLIDEAN)
        with self.assertRaises(ConstraintViolationError):
            Geometry.parse("conformal")

    def test_chain_of_submonoids(self):
        """Test each geometry restricts the previous one"""
        report = verify_geometry_chain()
        self.assertTrue(report["valid"])
        self.assertEqual(len(report["links"]), 5)

    def test_bialgebra_quotients(self):
        """Test the Euclidean quotient evaluates x at ±1"""
        quotient = geometry_bialgebra("euclidean")
        x = SuperPolynomial.generator(representation_table(), "x")
        images = quotient.quotients(x ** 3)
        self.assertEqual([p.constant_term() for p in images], [1, -1])

    def test_coaction_structure(self):
        """Test the structure each geometry keeps"""
        self.assertEqual(geometry_coaction("pretopological").description, "N grading + odd differential")
        self.assertEqual(geometry_coaction("euclidean").description, "Z/2 grading + odd differential")
        self.assertEqual(geometry_coaction("oriented_euclidean").description, "odd differential")
        self.assertEqual(geometry_coaction("fully_rigid").description, "no structure")


class MembershipTestCase(SimpleTestCase):
    """Unit tests for untwisted and degree-twisted theories"""

    def setUp(self):
        self.circle = standard("sphere1")
        self.fundamental = fundamental_form()
        self.constant = SullivanForm.constant(self.circle, 3)

    def test_untwisted(self):
        """Test which geometries admit the constant function and dx1 as untwisted theories"""
        self.assertTrue(untwisted_membership(self.circle, "pretopological", self.constant))
        self.assertFalse(untwisted_membership(self.circle, "pretopological", self.fundamental))
        self.assertFalse(untwisted_membership(self.circle, "euclidean", self.fundamental))
        self.assertTrue(untwisted_membership(self.circle, "oriented_euclidean", self.fundamental))
        self.assertTrue(untwisted_membership(self.circle, "fully_rigid", self.fundamental))

    def test_degree_twist(self):
        """Test dx1 is a degree 1 twisted theory, and a degree 3 one in the Euclidean geometry"""
        self.assertTrue(degree_twist_membership(self.circle, "topological", 1, self.fundamental))
        self.assertFalse(degree_twist_membership(self.circle, "topological", 2, self.fundamental))
        self.assertTrue(degree_twist_membership(self.circle, "euclidean", 3, self.fundamental))

    def test_membership_on_random_forms(self):
        """Test membership is closedness plus the geometry's degree condition on seeded mixed forms"""
        for name in ("sphere1", "delta2", "torus"):
            space = standard(name)
            top = space.dimension + 1
            for seed in range(100):
                form = random_form(space, seed % top, 1, seed)
                if seed % 3 == 0:
                    form = form + random_form(space, (seed + 1) % top, 1, seed + 1000)
                closed = is_closed(form)
                even_part = sum((degree_component(form, k) for k in range(0, top, 2)), SullivanForm.zero(space))
                with self.subTest(space=name, seed=seed):
                    self.assertEqual(untwisted_membership(space, "pretopological", form),
                                     closed and form == degree_component(form, 0))
                    self.assertEqual(untwisted_membership(space, "euclidean", form), closed and form == even_part)
                    self.assertEqual(untwisted_membership(space, "oriented_euclidean", form), closed)
                    for n in range(3):
                        shifted_part = even_part if n % 2 == 0 else form - even_part
                        self.assertEqual(degree_twist_membership(space, "topological", n, form),
                                         closed and form == degree_component(form, n))
                        self.assertEqual(degree_twist_membership(space, "euclidean", n, form),
                                         closed and form == shifted_part)

    def test_incompatible_form_rejected(self):
        """Test membership refuses a form that is not a compatible family"""
        form = SullivanForm.build(self.circle, {SimplexRef(1, "top"): SuperPolynomial.generator(coordinate_table(1), "x1")})
        with self.assertRaises(ConstraintViolationError):
            untwisted_membership(self.circle, "pretopological", form)


class BasicTwistTestCase(SimpleTestCase):
    """Unit tests for twists given by a representation ρ of the endomorphism monoid"""

    def setUp(self):
        self.circle = standard("sphere1")
        self.fundamental = fundamental_form()

    def test_group_like(self):
        """Test x^n is group-like and 1 + e is not"""
        check_group_like(degree_representation(3))
        table = representation_table()
        with self.assertRaises(RepresentationError):
            check_group_like(SuperPolynomial.constant(table, 1) + SuperPolynomial.generator(table, "e"))

    def test_degree_representation(self):
        """Test dx1 transforms by x but not by x²"""
        self.assertTrue(basic_twist_coinvariance(self.circle, "pretopological", degree_representation(1), self.fundamental))
        self.assertFalse(basic_twist_coinvariance(self.circle, "pretopological", degree_representation(2), self.fundamental))

    def test_euclidean_sees_parity_only(self):
        """Test x and x³ agree after passing to the Euclidean quotient"""
        self.assertTrue(basic_twist_coinvariance(self.circle, "euclidean", degree_representation(3), self.fundamental))

    def test_trivial_representation_on_functions(self):
        """Test constant functions are invariant"""
        constant = SullivanForm.constant(self.circle, 2)
        self.assertTrue(basic_twist_coinvariance(self.circle, "topological", degree_representation(0), constant))


class GeneralTwistTestCase(SimpleTestCase):
    """Unit tests for the general twist families"""

    def setUp(self):
        self.interval = standard("delta1")
        self.omega = interval_coordinate()
        self.alpha = differential(self.omega)

    def spec(self, row, **params):
        return TwistSpec(Geometry.parse(params.pop("geometry", "pretopological")), "general", row, **params)

    def test_f_row(self):
        """Test dω = a ω^m ∧ α with k=0, m=0, n=1"""
        spec = self.spec("f", k=0, n=1, m=0, a=1)
        self.assertTrue(general_twist_membership(self.interval, spec, self.omega, self.alpha))
        report = general_twist_check(self.interval, self.spec("f", k=0, n=1, m=0, a=2), self.omega, self.alpha)
        self.assertFalse(report["valid"])
        self.assertIn("dω = a ω^m ∧ α", report["violations"])

    def test_g_row_with_zero_scalar(self):
        """Test a = 0 reduces the g row to two closed forms"""
        alpha = random_form(self.interval, 1, 1, 4)
        constant = SullivanForm.constant(self.interval, 1)
        spec = self.spec("g", k=1, n=0, m=1, a=0)
        self.assertFalse(general_twist_membership(self.interval, spec, alpha, self.omega))
        self.assertTrue(general_twist_membership(self.interval, spec, alpha, constant))

    def test_constraint_k_plus_one(self):
        """Test k+1 = n+mk is enforced"""
        with self.assertRaises(ConstraintViolationError):
            check_twist_parameters(self.spec("f", k=1, n=1, m=0))

    def test_constraint_n_plus_one(self):
        """Test n+1 = km is enforced"""
        with self.assertRaises(ConstraintViolationError):
            check_twist_parameters(self.spec("g", k=2, n=0, m=1))

    def test_euclidean_constraints(self):
        """Test the parity constraints on f and the a f = 0 condition"""
        with self.assertRaises(ConstraintViolationError):
            check_twist_parameters(self.spec("odd_f", geometry="euclidean", f=(0, 1)))
        with self.assertRaises(ConstraintViolationError):
            check_twist_parameters(self.spec("odd_g", geometry="euclidean", f=(1,)))
        with self.assertRaises(ConstraintViolationError):
            check_twist_parameters(self.spec("even_f", geometry="euclidean", a=1, f=(1,)))

    def test_unknown_row(self):
        """Test a row the geometry does not have is rejected"""
        with self.assertRaises(ConstraintViolationError):
            check_twist_parameters(self.spec("even_f"))

    @override_settings(SUPERPOINT_TWIST_DEGREE_CAP=2)
    def test_degree_cap(self):
        """Test polynomial parameters above the configured cap are rejected"""
        with self.assertRaises(ConstraintViolationError):
            check_twist_parameters(self.spec("g", geometry="oriented_euclidean", f=(0, 0, 0, 1)))

    def test_evaluate_polynomial(self):
        """Test f(ω) = 1 + ω² on a constant form"""
        constant = SullivanForm.constant(self.interval, 2)
        self.assertEqual(evaluate_polynomial((1, 0, 1), constant), SullivanForm.constant(self.interval, 5))


class TwistedDifferentialTestCase(SimpleTestCase):
    """Unit tests for twisted differentials and the differential twist"""

    def test_twisted_differential_squares_to_zero(self):
        """Test (d - ∧α)² = 0 for closed odd α on S¹ and Δ²"""
        for name in ("sphere1", "delta2"):
            space = standard(name)
            alpha = random_form(space, 1, 2, 5)
            if name == "delta2":
                alpha = differential(random_form(space, 0, 2, 5))
            beta = random_form(space, 0, 2, 6)
            with self.subTest(space=name):
                once = twisted_differential(alpha, beta)
                self.assertTrue(twisted_differential(alpha, once).is_zero)

    def test_general_row_f_pair_is_twisted_closed(self):
        """Test ω = x2 dx1 + dx2, α = dx1 on Δ² satisfies row f with m = 1 and d_α ω = 0"""
        table = coordinate_table(2)
        x2, dx1, dx2 = (SuperPolynomial.generator(table, name) for name in ("x2", "dx1", "dx2"))
        omega = simplex_form("delta2", x2 * dx1 + dx2)
        alpha = simplex_form("delta2", dx1)
        spec = TwistSpec(Geometry.TOPOLOGICAL, "general", "f", k=1, n=1, m=1, a=1)
        self.assertTrue(general_twist_check(omega.space, spec, omega, alpha)["valid"])
        self.assertTrue(twisted_differential(alpha, omega, 1).is_zero)
        # the left-multiplied twist differs by the sign of ω
        self.assertFalse(subtract(differential(omega), wedge(alpha, omega)).is_zero)

    def test_twisting_form_must_be_odd(self):
        """Test an even twisting form is rejected"""
        space = standard("sphere1")
        with self.assertRaises(DegreeMismatchError):
            twisted_differential(SullivanForm.constant(space, 1), SullivanForm.constant(space, 1))

    def test_differential_twist_rows(self):
        """Test which general row realizes the differential twist in each geometry"""
        spec, swapped = differential_twist_spec("topological", 2)
        self.assertEqual((spec.row, spec.k, spec.n, swapped), ("f", 1, 2, False))
        self.assertEqual(differential_twist_spec("euclidean", 1)[0].row, "even_f")
        self.assertEqual(differential_twist_spec("euclidean", 2)[0].row, "odd_f")
        self.assertTrue(differential_twist_spec("oriented_euclidean", 1)[1])
        with self.assertRaises(ConstraintViolationError):
            differential_twist_spec("fully_rigid", 1)

    def test_differential_twist_queries(self):
        """Test (ω, dω) is a differential-twisted theory in every geometry that has one"""
        space = standard("delta1")
        omega = interval_coordinate()
        for geometry in ("pretopological", "topological", "euclidean", "oriented_euclidean"):
            with self.subTest(geometry=geometry):
                query = FieldTheoryQuery(space, TwistSpec(Geometry.parse(geometry), "differential", n=1), omega)
                self.assertTrue(check_query(query)["valid"])

    def test_untwisted_query(self):
        """Test the untwisted query report"""
        space = standard("sphere1")
        query = FieldTheoryQuery(space, TwistSpec(Geometry.PRETOPOLOGICAL, "untwisted"), SullivanForm.constant(space, 1))
        report = check_query(query)
        self.assertTrue(report["valid"])
        self.assertIn("equation", report)

    def test_general_query_needs_pair(self):
        """Test a general twist query without α is refused"""
        space = standard("delta1")
        spec = TwistSpec(Geometry.PRETOPOLOGICAL, "general", "closed")
        with self.assertRaises(ConstraintViolationError):
            check_query(FieldTheoryQuery(space, spec, interval_coordinate()))


class BordismTestCase(SimpleTestCase):
    """Unit tests for the bordism monoid bookkeeping"""

    def test_symmetric_power(self):
        """Test the k = 2 piece is a symmetric square"""
        report = bordism_generators(standard("sphere1"), 2)
        self.assertEqual(report["symmetric_group_order"], 2)
        self.assertTrue(report["piece"].startswith("Sym^2("))

    def test_negative_k(self):
        """Test k must be a natural number"""
        with self.assertRaises(ConstraintViolationError):
            bordism_generators(standard("point"), -1)
