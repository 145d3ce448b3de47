from django.test import SimpleTestCase, override_settings
from sympy.polys.domains import QQ

from fieldtheories.exceptions import ConstraintViolationError, SearchBoundError
from fieldtheories.services.classify_service import (
    ActionCandidate,
    ActionFamily,
    Monoid,
    conjugate_action,
    enumerate_families,
    exhaustive_search,
    f1_allowed,
    g1_allowed,
    match_family,
    monomial_lemma_check,
    normalize_action,
    verify_action,
)
from fieldtheories.services.superalg_service import SuperPolynomial, VariableTable


class VerifyActionTestCase(SimpleTestCase):
    """Unit tests for the action axioms on A^(1|1)"""

    def test_identity_is_an_action(self):
        """Test the trivial action for all three monoids"""
        for monoid in Monoid:
            with self.subTest(monoid=monoid.value):
                self.assertTrue(verify_action(ActionCandidate.identity(), monoid)["valid"])

    def test_scaling_action(self):
        """Test y -> x y, e -> x e with f1 = x y (k = n = m = 1)"""
        candidate = ActionCandidate.from_coefficients({(1, 1): 1}, {(1, 1): 1}, {(1, 0): 1})
        self.assertTrue(verify_action(candidate, "full")["valid"])

    def test_g1_family(self):
        """Test y -> x y, e -> x e + y² d (n + 1 = k m with k = 1, m = 2)"""
        candidate = ActionCandidate.from_coefficients({(1, 1): 1}, {}, {(1, 0): 1}, {(1, 2): 1})
        self.assertTrue(verify_action(candidate, "full")["valid"])

    def test_f1_and_g1_together_fail(self):
        """Test f1 and g1 cannot both be nonzero"""
        candidate = ActionCandidate.from_coefficients({(1, 1): 1}, {(1, 1): 1}, {(1, 0): 1}, {(1, 2): 1})
        self.assertFalse(verify_action(candidate, "full")["valid"])

    def test_unit_failure(self):
        """Test y -> 2y fails the unit condition first"""
        report = verify_action(ActionCandidate.from_coefficients({(0, 1): 2}, {}, {(0, 0): 1}), "full")
        self.assertFalse(report["valid"])
        self.assertFalse(report["unit"])
        self.assertTrue(report["discrepancy"].startswith("unit y"))

    def test_coassociativity_failure(self):
        """Test y -> y + x - 1 is unital but not coassociative"""
        candidate = ActionCandidate.from_coefficients({(0, 1): 1, (1, 0): 1, (0, 0): -1}, {}, {(0, 0): 1})
        report = verify_action(candidate, "full")
        self.assertTrue(report["unit"])
        self.assertFalse(report["coassociative"]["y"])
        self.assertTrue(report["discrepancy"].startswith("y:"))

    def test_odd_monoid_has_no_x(self):
        """Test candidates involving x are refused for the odd monoid"""
        candidate = ActionCandidate.from_coefficients({(1, 1): 1}, {}, {(0, 0): 1})
        self.assertFalse(verify_action(candidate, "odd")["valid"])

    def test_z2_reduces_powers_of_x(self):
        """Test y -> x² y is an action of both monoids and reduces to k = 0 for Z/2"""
        candidate = ActionCandidate.from_coefficients({(2, 1): 1}, {}, {(0, 0): 1})
        self.assertTrue(verify_action(candidate, "z2")["valid"])
        self.assertTrue(verify_action(candidate, "full")["valid"])
        self.assertEqual(match_family(candidate, "z2").k, 0)

    def test_unknown_monoid(self):
        """Test an unknown monoid name raises"""
        with self.assertRaises(ConstraintViolationError):
            Monoid.parse("affine")


class ConjugationTestCase(SimpleTestCase):
    """Unit tests for conjugation by y -> y + c"""

    def test_conjugate_is_an_action(self):
        """Test conjugating the scaling action stays an action and normalizes back"""
        family = ActionCandidate.from_coefficients({(1, 1): 1}, {(1, 1): 1}, {(1, 0): 1})
        conjugated = conjugate_action(family, 3)
        self.assertNotEqual(conjugated, family)
        self.assertTrue(verify_action(conjugated, "full")["valid"])
        normalized, shift = normalize_action(conjugated)
        self.assertEqual(normalized, family)
        self.assertEqual(shift, QQ(-3))

    def test_match_after_shift(self):
        """Test a shifted family member is still recognized"""
        conjugated = conjugate_action(ActionCandidate.from_coefficients({(1, 1): 1}, {}, {(0, 0): 1}), -2)
        match = match_family(conjugated, "full")
        self.assertEqual((match.kind, match.k, match.n), ("degree", 1, 0))
        self.assertEqual(match.shift, QQ(2))


class FamilyTestCase(SimpleTestCase):
    """Unit tests for the closed-form families"""

    def test_exponent_relations(self):
        """Test k+1 = n+mk for f1 and n+1 = km for g1"""
        self.assertTrue(f1_allowed(Monoid.FULL, 1, 1, 1))
        self.assertFalse(f1_allowed(Monoid.FULL, 1, 0, 1))
        self.assertTrue(g1_allowed(Monoid.FULL, 1, 1, 2))
        self.assertTrue(f1_allowed(Monoid.Z2, 1, 1, 3))
        self.assertFalse(g1_allowed(Monoid.Z2, 1, 1, 1))

    def test_family_instances_are_actions(self):
        """Test every enumerated family instance passes verify_action and matches itself"""
        for monoid, max_m in (("full", 3), ("z2", 2), ("odd", 2)):
            for family in enumerate_families(monoid, 2, 2, max_m):
                with self.subTest(family=family.describe(), monoid=monoid):
                    candidate = family.candidate()
                    self.assertTrue(verify_action(candidate, monoid)["valid"])
                    match = match_family(candidate, monoid)
                    self.assertIsNotNone(match)
                    self.assertEqual((match.kind, match.k, match.n), (family.kind, family.k, family.n))

    def test_z2_odd_odd_case(self):
        """Test the Z/2 family with k = n = 1, f1 odd in y"""
        family = ActionFamily(Monoid.Z2, "f1", 1, 1, ((1, 1), (3, -1)))
        self.assertTrue(verify_action(family.candidate(), "z2")["valid"])

    def test_k_zero_allows_any_f1(self):
        """Test f1 may be any polynomial in y when k = 0 and n = 1"""
        family = ActionFamily(Monoid.FULL, "f1", 0, 1, ((0, 1), (1, -1), (2, 1)))
        self.assertTrue(verify_action(family.candidate(), "full")["valid"])

    def test_describe(self):
        """Test the family description"""
        family = ActionFamily(Monoid.FULL, "f1", 1, 1, ((1, 1),))
        self.assertEqual(family.describe(), "y -> x^1 y, e -> x^1 e, f1 = x^1 * (1*y^1)")


class MonomialLemmaTestCase(SimpleTestCase):
    """Unit tests for p(x1 x2) = p(x1) p(x2)"""

    def setUp(self):
        self.table = VariableTable(("x",))
        self.x = SuperPolynomial.generator(self.table, "x")

    def test_monomial_is_multiplicative(self):
        """Test x^3 and 1 are multiplicative"""
        self.assertTrue(monomial_lemma_check(self.x ** 3))
        self.assertTrue(monomial_lemma_check(SuperPolynomial.constant(self.table, 1)))

    def test_non_monomials(self):
        """Test 1 + x and 2x are not multiplicative"""
        self.assertFalse(monomial_lemma_check(self.x + 1))
        self.assertFalse(monomial_lemma_check(2 * self.x))

    def test_one_variable_only(self):
        """Test polynomials in two variables are refused"""
        table = VariableTable(("x", "y"))
        with self.assertRaises(ConstraintViolationError):
            monomial_lemma_check(SuperPolynomial.generator(table, "x"))


class ExhaustiveSearchTestCase(SimpleTestCase):
    """Unit tests for the bounded exhaustive search"""

    def test_prime_field_degree_one(self):
        """Test the full monoid over F_5 with degree ≤ 1 has 76 actions, all in the families"""
        report = exhaustive_search("full", 1, field=5)
        self.assertEqual(report.total, 76)
        self.assertEqual(report.unmatched, ())
        self.assertTrue(all(space.family for space in report.spaces))

    def test_grid_degree_one(self):
        """Test the full monoid with coefficients in {-1, 0, 1} and degree ≤ 1"""
        report = exhaustive_search("full", 1, grid=(-1, 0, 1))
        self.assertEqual(report.total, 28)
        self.assertEqual(len(report.candidates), 28)
        self.assertEqual(report.unmatched, ())
        for candidate in report.candidates:
            self.assertTrue(verify_action(candidate, "full")["valid"])

    def test_prime_field_degree_two(self):
        """Test every action of degree ≤ 2 over F_101 lies in a normalized family"""
        report = exhaustive_search("full", 2, field=101)
        self.assertGreater(report.total, 0)
        self.assertEqual(report.unmatched, ())
        self.assertTrue(all(space.family for space in report.spaces))

    def test_grid_degree_two(self):
        """Test the grid search of degree ≤ 2 finds only verified family members"""
        report = exhaustive_search("full", 2, grid=(-1, 0, 1))
        self.assertEqual(report.unmatched, ())
        self.assertEqual(report.total, len(report.candidates))
        self.assertGreater(report.total, 28)
        for candidate in report.candidates:
            self.assertTrue(verify_action(candidate, "full")["valid"])
            self.assertIsNotNone(match_family(candidate, "full"))

    def test_degree_zero(self):
        """Test degree 0 leaves only the trivial action"""
        report = exhaustive_search("full", 0, grid=(-1, 0, 1))
        self.assertEqual([c.as_dict() for c in report.candidates], [ActionCandidate.identity().as_dict()])

    def test_odd_monoid_search(self):
        """Test the odd monoid search matches the families"""
        report = exhaustive_search("odd", 1, grid=(0, 1))
        self.assertEqual(report.unmatched, ())
        self.assertGreater(report.total, 1)

    def test_bounds(self):
        """Test degree and field guards"""
        with self.assertRaises(SearchBoundError):
            exhaustive_search("full", -1, field=5)
        with self.assertRaises(SearchBoundError):
            exhaustive_search("full", 1, field=4)
        with self.assertRaises(SearchBoundError):
            exhaustive_search("full", 2, field=2)

    @override_settings(SUPERPOINT_SEARCH_MAX_DEGREE=1)
    def test_configured_max_degree(self):
        """Test the degree cap comes from settings"""
        with self.assertRaises(SearchBoundError):
            exhaustive_search("full", 2, field=5)

    def test_report_payload(self):
        """Test the serializable report"""
        data = exhaustive_search("full", 0, field=3).as_dict()
        self.assertEqual(data["monoid"], "full")
        self.assertEqual(data["field"], 3)
        self.assertEqual(data["total"], 1)
