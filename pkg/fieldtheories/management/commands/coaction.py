from ...serializers import CoactionSerializer
from ...services.coaction_service import (
    canonical_coaction,
    coaction_to_cdga,
    mapping_space_cdga,
    verify_bialgebra,
    verify_coaction,
)
from ...services.forms_service import mapping_space_ring
from ...utils import load_json
from ._base import CheckFailed, ReportCommand


def structure_payload(structure) -> dict:
    return {
        name: {"degree": degree, "d": str(structure.differential_map[name])}
        for name, degree in structure.degrees
    }


class Command(ReportCommand):
    help = "Coactions of the superpoint endomorphism monoid."

    def add_actions(self, subparsers):
        action = self.add_action(subparsers, "verify", "Check a coaction (a file, or the canonical one)")
        action.add_argument("--coaction", help="Coaction JSON file")
        action.add_argument("--n", type=int, default=1, help="Even target dimension of the canonical coaction")
        action.add_argument("--q", type=int, default=0, help="Odd target dimension of the canonical coaction")
        action = self.add_action(subparsers, "cdga", "Read the grading and differential off the canonical coaction")
        action.add_argument("--n", type=int, default=1, help="Even target dimension")
        action.add_argument("--q", type=int, default=0, help="Odd target dimension")
        self.add_action(subparsers, "bialgebra", "Check the bialgebra axioms of Q[x, e]")

    def _coaction(self, options):
        if options.get("coaction"):
            serializer = CoactionSerializer(data=load_json(options["coaction"], "--coaction"))
            serializer.is_valid(raise_exception=True)
            return serializer.save()
        return canonical_coaction(mapping_space_ring(options["n"], options["q"]))

    def handle_verify(self, options):
        coaction = self._coaction(options)
        report = verify_coaction(coaction)
        if not report["valid"]:
            raise CheckFailed(f"Not a coaction: {', '.join(report['failures'])}", report)
        return report, f"Coaction {coaction.name} is coassociative and counital"

    def handle_cdga(self, options):
        ring = mapping_space_ring(options["n"], options["q"])
        structure = coaction_to_cdga(canonical_coaction(ring))
        expected = mapping_space_cdga(ring)
        data = {
            "generators": structure_payload(structure),
            "matches_forms": structure.degree_map == expected.degree_map
            and structure.differential_map == expected.differential_map,
        }
        if not data["matches_forms"]:
            raise CheckFailed("Coaction grading and differential differ from those of forms", data)
        return data, f"cdga of A^({options['n']}|{options['q']}) read off the coaction"

    def handle_bialgebra(self, options):
        report = verify_bialgebra()
        if not report["valid"]:
            raise CheckFailed("Bialgebra axioms fail", report)
        return report, "Q[x, e] is a bialgebra"
