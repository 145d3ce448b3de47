from ...serializers import FormSerializer
from ...services.homology_service import NOTIONS, concordance_check
from ._base import CheckFailed, SingleReportCommand, load_form, load_space


class Command(SingleReportCommand):
    help = "Decide whether two closed forms are concordant."

    def add_options(self, parser):
        parser.add_argument("--notion", choices=NOTIONS, default="cohomologous", help="Concordance notion")
        parser.add_argument("--space", required=True, help="Space JSON file")
        parser.add_argument("--form0", required=True, help="Form JSON file for ω0")
        parser.add_argument("--form1", required=True, help="Form JSON file for ω1")
        parser.add_argument("--polydeg-bound", type=int, help="Coefficient degree bound for witness search")
        parser.add_argument("--witness", help="Cylinder form JSON file to check instead of searching")

    def handle_report(self, options):
        space = load_space(options["space"])
        omega0 = load_form(options["form0"], space, "--form0")
        omega1 = load_form(options["form1"], space, "--form1")
        witness = load_form(options["witness"], space, "--witness") if options.get("witness") else None
        verdict = concordance_check(options["notion"], omega0, omega1, options.get("polydeg_bound"), witness)
        data = {
            "notion": verdict.notion,
            "holds": verdict.holds,
            "witness_missing": verdict.witness_missing,
            "polydeg_bound": verdict.bound,
            "detail": verdict.detail,
            "alpha": FormSerializer.payload(verdict.alpha) if verdict.alpha is not None else None,
            "witness": FormSerializer.payload(verdict.witness) if verdict.witness is not None else None,
        }
        if not verdict.holds:
            raise CheckFailed(f"Not {verdict.notion} concordant", data)
        if verdict.witness_missing:
            return data, f"{verdict.notion.capitalize()} concordant, no witness up to degree {verdict.bound}"
        return data, f"{verdict.notion.capitalize()} concordant"
