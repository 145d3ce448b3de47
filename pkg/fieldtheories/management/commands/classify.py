from rest_framework.exceptions import ValidationError
from sympy.polys.domains import QQ

from ...serializers import CandidateSerializer
from ...services.classify_service import (
    Monoid,
    enumerate_families,
    exhaustive_search,
    match_family,
    monomial_lemma_check,
    verify_action,
)
from ...services.superalg_service import SuperPolynomial, VariableTable, parse_coefficient, render
from ...utils import load_json
from ._base import CheckFailed, ReportCommand

MONOIDS = [m.value for m in Monoid]


def parse_integers(text, flag):
    try:
        return tuple(int(part) for part in text.split(","))
    except ValueError:
        raise ValidationError({flag: [f"Expected comma-separated integers, got '{text}'"]})


class Command(ReportCommand):
    help = "Actions of the superpoint monoids on A^(1|1): verify, enumerate and search."

    def add_actions(self, subparsers):
        action = self.add_action(subparsers, "verify", "Check that a candidate is an action")
        action.add_argument("--candidate", required=True, help="Candidate JSON file")
        action.add_argument("--monoid", choices=MONOIDS, default="full", help="Acting monoid")
        action = self.add_action(subparsers, "search", "Bounded exhaustive search for actions")
        action.add_argument("--degree", type=int, required=True, help="Degree bound in x and in y")
        action.add_argument("--field", type=int, help="Search over F_p (default from settings)")
        action.add_argument("--grid", help="Search integer coefficients in this set instead, e.g. --grid=-1,0,1")
        action.add_argument("--monoid", choices=MONOIDS, default="full", help="Acting monoid")
        action = self.add_action(subparsers, "families", "List the closed-form families and verify each")
        action.add_argument("--monoid", choices=MONOIDS, default="full", help="Acting monoid")
        action.add_argument("--max-k", type=int, default=2, help="Bound on the power of x in f0")
        action.add_argument("--max-n", type=int, default=2, help="Bound on the power of x in g0")
        action.add_argument("--max-m", type=int, default=2, help="Bound on the power of y in f1, g1")
        action = self.add_action(subparsers, "lemma", "Check whether p(x1 x2) = p(x1) p(x2)")
        action.add_argument("--coefficients", required=True, help="Coefficients of p(x) from the constant term up")

    def handle_verify(self, options):
        serializer = CandidateSerializer(data=load_json(options["candidate"], "--candidate"))
        serializer.is_valid(raise_exception=True)
        candidate = serializer.save()
        report = verify_action(candidate, options["monoid"])
        report["candidate"] = candidate.as_dict()
        match = match_family(candidate, options["monoid"]) if report["valid"] else None
        report["family"] = None if match is None else {
            "kind": match.kind, "k": match.k, "n": match.n, "shift": str(candidate.domain.to_sympy(match.shift)),
            "powers": list(match.powers),
        }
        if not report["valid"]:
            raise CheckFailed(f"Not an action: {report['discrepancy']}", report)
        return report, f"Action of the {options['monoid']} monoid"

    def handle_search(self, options):
        grid = parse_integers(options["grid"], "--grid") if options.get("grid") else None
        result = exhaustive_search(options["monoid"], options["degree"], options.get("field"), grid)
        data = result.as_dict()
        if result.unmatched:
            raise CheckFailed(f"{len(result.unmatched)} solutions outside the known families", data)
        return data, f"{result.total} actions, all in the known families"

    def handle_families(self, options):
        families = enumerate_families(options["monoid"], options["max_k"], options["max_n"], options["max_m"])
        rows, failed = [], []
        for family in families:
            report = verify_action(family.candidate(), options["monoid"])
            rows.append({"family": family.describe(), "valid": report["valid"]})
            if not report["valid"]:
                failed.append(family.describe())
        data = {"count": len(rows), "families": rows}
        if failed:
            raise CheckFailed(f"{len(failed)} family instances are not actions", data)
        return data, f"{len(rows)} family instances verified"

    def handle_lemma(self, options):
        table = VariableTable(("x",))
        try:
            coefficients = [parse_coefficient(c) for c in options["coefficients"].split(",")]
        except ValueError as error:
            raise ValidationError({"--coefficients": [str(error)]})
        p = SuperPolynomial.from_terms(table, [(c, (i,), ()) for i, c in enumerate(coefficients)], QQ)
        multiplicative = monomial_lemma_check(p)
        data = {"polynomial": render(p), "multiplicative": multiplicative}
        if not multiplicative:
            raise CheckFailed(f"{render(p)} is not multiplicative", data)
        return data, f"{render(p)} is multiplicative"
