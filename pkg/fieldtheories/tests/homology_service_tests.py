from django.test import SimpleTestCase
from sympy.polys.domains import QQ

from fieldtheories.exceptions import ConstraintViolationError, DegreeMismatchError, NotClosedError, WitnessError
from fieldtheories.services.forms_service import SullivanForm, combine, differential, evaluate_endpoint, random_form
from fieldtheories.services.homology_service import (
    NOTIONS,
    betti_numbers,
    check_prism_witness,
    closed_form_basis,
    cochain_concordance_witness,
    cohomology_class,
    coboundary_of,
    concordance_check,
    exactness_witness,
    field_theory_class_rank,
    form_cohomology_rank,
    integrate,
    integration_cochain,
    is_exact,
    periodic_cohomology,
    simplicial_cohomology,
)
from fieldtheories.services.simplicial_service import SimplexRef, coordinate_table, standard
from fieldtheories.services.superalg_service import SuperPolynomial


def circle_form(*terms):
    """A 1-form p(x1) dx1 on S¹ from (coefficient, power) pairs."""
    circle = standard("sphere1")
    value = SuperPolynomial.from_terms(coordinate_table(1), [(c, (k,), (0,)) for c, k in terms])
    return SullivanForm.build(circle, {SimplexRef(1, "top"): value})


class CohomologyTestCase(SimpleTestCase):
    """Unit tests for rational simplicial cohomology"""

    def test_betti_numbers(self):
        """Test the Betti numbers of the standard spaces"""
        cases = {
            "point": [1],
            "points3": [3],
            "delta2": [1, 0, 0],
            "sphere1": [1, 1],
            "sphere2": [1, 0, 1],
            "boundary2": [1, 1],
            "boundary3": [1, 0, 1],
            "torus": [1, 2, 1],
        }
        for name, expected in cases.items():
            with self.subTest(space=name):
                self.assertEqual(betti_numbers(standard(name)), expected)

    def test_representatives(self):
        """Test H^1(S¹) is represented by the cochain on the top edge"""
        result = simplicial_cohomology(standard("sphere1"), 1)
        self.assertEqual(result.betti, 1)
        self.assertEqual(len(result.representatives), 1)
        self.assertEqual(simplicial_cohomology(standard("sphere1"), 5).betti, 0)

    def test_periodic_cohomology(self):
        """Test the mod-2 periodic ranks of the torus"""
        torus = standard("torus")
        self.assertEqual(periodic_cohomology(torus, 0), 2)
        self.assertEqual(periodic_cohomology(torus, 1), 2)

    def test_cohomology_class(self):
        """Test class coordinates of a cocycle and of a non-cocycle"""
        interval = standard("delta1")
        self.assertIsNone(cohomology_class(interval, 0, {SimplexRef(0, "0"): 1}))
        circle = standard("sphere1")
        coordinates = cohomology_class(circle, 1, {SimplexRef(1, "top"): 2})
        self.assertEqual(len(coordinates), 1)
        self.assertNotEqual(coordinates[0], 0)


class IntegrationTestCase(SimpleTestCase):
    """Unit tests for integration over standard simplices"""

    def test_integrals(self):
        """Test ∫Δ¹ dx1 = 1, ∫Δ² dx1dx2 = 1/2, ∫Δ² x1 dx1dx2 = 1/6"""
        edge, triangle = SimplexRef(1, "01"), SimplexRef(2, "012")
        one, two = coordinate_table(1), coordinate_table(2)
        self.assertEqual(integrate(edge, SuperPolynomial.generator(one, "dx1")), QQ(1))
        dx1dx2 = SuperPolynomial.from_terms(two, [("1", (0, 0), (0, 1))])
        self.assertEqual(integrate(triangle, dx1dx2), QQ(1, 2))
        x1dx1dx2 = SuperPolynomial.from_terms(two, [("1", (1, 0), (0, 1))])
        self.assertEqual(integrate(triangle, x1dx1dx2), QQ(1, 6))

    def test_integrate_wrong_degree(self):
        """Test integrating a function over an edge raises"""
        with self.assertRaises(DegreeMismatchError):
            integrate(SimplexRef(1, "01"), SuperPolynomial.constant(coordinate_table(1), 1))

    def test_stokes(self):
        """Test ∫ dη equals the coboundary of ∫ η on random forms"""
        for name, polydeg in (("delta2", 2), ("delta3", 1), ("sphere2", 2), ("torus", 2)):
            space = standard(name)
            for k in range(space.dimension):
                for seed in range(4):
                    eta = random_form(space, k, polydeg, seed)
                    with self.subTest(space=name, degree=k, seed=seed):
                        self.assertEqual(
                            integration_cochain(differential(eta), k + 1),
                            coboundary_of(space, integration_cochain(eta, k), k),
                        )


class ExactnessTestCase(SimpleTestCase):
    """Unit tests for exactness decisions and witnesses"""

    def test_fundamental_class_not_exact(self):
        """Test dx1 on S¹ integrates to 1 and is not exact"""
        form = circle_form(("1", 0))
        self.assertEqual(integration_cochain(form, 1)[SimplexRef(1, "top")], QQ(1))
        self.assertFalse(is_exact(form))

    def test_exact_form_has_witness(self):
        """Test (2 x1 - 1) dx1 on S¹ is d of a compatible function"""
        form = circle_form(("2", 1), ("-1", 0))
        self.assertTrue(is_exact(form))
        witness = exactness_witness(form, 2)
        self.assertIsNotNone(witness)
        self.assertEqual(differential(witness), form)

    def test_witness_bound_too_small(self):
        """Test the witness search reports None below the needed degree"""
        form = circle_form(("3", 2), ("-1", 0))
        self.assertTrue(is_exact(form))
        self.assertIsNone(exactness_witness(form, 1))

    def test_not_closed(self):
        """Test exactness of a non-closed form raises"""
        triangle = standard("delta2")
        form = SullivanForm.build(triangle, {
            SimplexRef(2, "012"): SuperPolynomial.generator(coordinate_table(2), "x1"),
        })
        with self.assertRaises(NotClosedError):
            is_exact(form)

    def test_form_cohomology_rank(self):
        """Test closed polynomial forms see H^1 of S¹ and of ∂Δ²"""
        self.assertEqual(form_cohomology_rank(standard("sphere1"), 1, 1), 1)
        self.assertEqual(form_cohomology_rank(standard("boundary2"), 1, 1), 1)
        self.assertEqual(form_cohomology_rank(standard("sphere1"), 0, 1), 1)

    def test_form_cohomology_matches_betti_numbers(self):
        """Test form cohomology ranks equal the simplicial Betti numbers in every degree"""
        for name in ("boundary3", "sphere2", "torus"):
            space = standard(name)
            for k, betti in enumerate(betti_numbers(space)):
                with self.subTest(space=name, degree=k):
                    self.assertEqual(form_cohomology_rank(space, k, 1), betti)


class ConcordanceTestCase(SimpleTestCase):
    """Unit tests for the four concordance notions"""

    def setUp(self):
        self.fundamental = circle_form(("1", 0))
        self.shifted = circle_form(("2", 1))
        self.zero = SullivanForm.zero(standard("sphere1"))

    def test_cohomologous(self):
        """Test dx1 and 2 x1 dx1 differ by an exact form"""
        verdict = concordance_check("cohomologous", self.fundamental, self.shifted, 2)
        self.assertTrue(verdict.holds)
        self.assertEqual(differential(verdict.alpha), self.fundamental - self.shifted)

    def test_not_cohomologous(self):
        """Test the fundamental class is not concordant to zero"""
        for notion in ("cohomologous", "cochain", "algebraic", "simplicial"):
            with self.subTest(notion=notion):
                self.assertFalse(concordance_check(notion, self.fundamental, self.zero, 2).holds)

    def test_cochain_and_algebraic(self):
        """Test the cylinder witness t ω1 + (1 - t) ω0 - dt ∧ α is found"""
        for notion in ("cochain", "algebraic"):
            with self.subTest(notion=notion):
                verdict = concordance_check(notion, self.fundamental, self.shifted, 2)
                self.assertTrue(verdict.holds)
                self.assertTrue(verdict.witness.cylinder)

    def test_simplicial(self):
        """Test the witness transports to a form on S¹ × Δ¹"""
        verdict = concordance_check("simplicial", self.fundamental, self.shifted, 2)
        self.assertTrue(verdict.holds, verdict.detail)

    def test_prism_transport(self):
        """Test the cylinder witness becomes a closed compatible form on S¹ × Δ¹ with the right ends"""
        alpha = concordance_check("cohomologous", self.fundamental, self.shifted, 2).alpha
        witness = cochain_concordance_witness(self.fundamental, self.shifted, alpha)
        report = check_prism_witness(witness, self.fundamental, self.shifted)
        self.assertTrue(report["valid"], report)

    def compare_notions(self, omega0, omega1, bound):
        """All four notions agree and every positive verdict carries a witness that re-verifies."""
        verdicts = {notion: concordance_check(notion, omega0, omega1, bound) for notion in NOTIONS}
        self.assertEqual(len({verdict.holds for verdict in verdicts.values()}), 1, verdicts)
        if not verdicts["cohomologous"].holds:
            return False
        for verdict in verdicts.values():
            self.assertFalse(verdict.witness_missing)
        self.assertEqual(differential(verdicts["cohomologous"].alpha), omega0 - omega1)
        for notion in ("cochain", "algebraic"):
            witness = verdicts[notion].witness
            self.assertEqual((evaluate_endpoint(witness, 0), evaluate_endpoint(witness, 1)), (omega0, omega1))
        self.assertTrue(check_prism_witness(verdicts["simplicial"].witness, omega0, omega1)["valid"])
        return True

    def test_exact_pair_beyond_bound(self):
        """Test (3 x1² - 1) dx1 and 0 hold in every notion with the witness reported missing at bound 1"""
        form = circle_form(("3", 2), ("-1", 0))
        for notion in NOTIONS:
            with self.subTest(notion=notion):
                verdict = concordance_check(notion, form, self.zero, 1)
                self.assertTrue(verdict.holds)
                self.assertTrue(verdict.witness_missing)
                self.assertIsNone(verdict.alpha)
                self.assertIsNone(verdict.witness)
        self.assertTrue(self.compare_notions(form, self.zero, 3))

    def test_plain_form_as_witness(self):
        """Test a supplied witness that is not a cylinder form fails with a reason"""
        for notion in ("cochain", "algebraic", "simplicial"):
            with self.subTest(notion=notion):
                verdict = concordance_check(notion, self.fundamental, self.shifted, 2, self.fundamental)
                self.assertFalse(verdict.holds)
                self.assertEqual(verdict.detail, "witness is not a cylinder form")

    def test_supplied_witness(self):
        """Test a correct cylinder witness is accepted and a swapped one is refused"""
        witness = concordance_check("cochain", self.fundamental, self.shifted, 2).witness
        self.assertTrue(concordance_check("simplicial", self.fundamental, self.shifted, 2, witness).holds)
        self.assertFalse(concordance_check("algebraic", self.shifted, self.fundamental, 2, witness).holds)

    def test_random_pairs_on_circle(self):
        """Test the four notions agree on seeded pairs over S¹"""
        circle = standard("sphere1")
        for seed in range(12):
            omega0 = random_form(circle, 1, 1, seed)
            eta = random_form(circle, 0, 2, seed + 100)
            for shift, expected in ((differential(eta), True), (self.fundamental + differential(eta), False)):
                with self.subTest(seed=seed, concordant=expected):
                    self.assertEqual(self.compare_notions(omega0, omega0 + shift, 2), expected)

    def test_random_pairs_on_torus(self):
        """Test the four notions agree on seeded pairs of closed 1-forms over the torus"""
        torus = standard("torus")
        basis = closed_form_basis(torus, 1, 1)
        nonexact = next(form for form in basis if not is_exact(form))
        for seed in range(10):
            omega0 = combine(torus, basis, [(seed * 7 + 3 * i) % 5 - 2 for i in range(len(basis))])
            eta = random_form(torus, 0, 1, seed + 100)
            for shift, expected in ((differential(eta), True), (nonexact + differential(eta), False)):
                with self.subTest(seed=seed, concordant=expected):
                    self.assertEqual(self.compare_notions(omega0, omega0 + shift, 1), expected)

    def test_bad_alpha(self):
        """Test the cylinder witness refuses α with the wrong differential"""
        alpha = SullivanForm.zero(standard("sphere1"))
        with self.assertRaises(WitnessError):
            cochain_concordance_witness(self.fundamental, self.shifted, alpha)

    def test_unknown_notion(self):
        """Test an unknown notion raises ConstraintViolationError"""
        with self.assertRaises(ConstraintViolationError):
            concordance_check("homotopic", self.fundamental, self.shifted)

    def test_field_theory_class_rank(self):
        """Test concordance classes of theories over S¹"""
        circle = standard("sphere1")
        self.assertEqual(field_theory_class_rank(circle, "topological", 1, 1), 1)
        self.assertEqual(field_theory_class_rank(circle, "euclidean", 0, 1), 1)
        self.assertEqual(field_theory_class_rank(circle, "oriented_euclidean", 0, 1), 2)
        with self.assertRaises(ConstraintViolationError):
            field_theory_class_rank(circle, "fully_rigid", 0, 1)
