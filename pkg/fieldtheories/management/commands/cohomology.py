from ...services.homology_service import (
    betti_numbers,
    form_cohomology_rank,
    periodic_cohomology,
    simplicial_cohomology,
)
from ._base import SingleReportCommand, load_space


class Command(SingleReportCommand):
    help = "Simplicial cohomology of a space over Q."

    def add_options(self, parser):
        parser.add_argument("--space", required=True, help="Space JSON file")
        parser.add_argument("--degree", type=int, help="Cohomological degree (all degrees when omitted)")
        parser.add_argument("--periodic", action="store_true", help="Report the rank of the mod-2 periodic sum")
        parser.add_argument(
            "--compare-forms",
            action="store_true",
            help="Also compute the rank from closed polynomial forms via integration",
        )
        parser.add_argument("--polydeg-bound", type=int, help="Coefficient degree bound for --compare-forms")

    def handle_report(self, options):
        space = load_space(options["space"])
        degree = options.get("degree")
        if degree is None:
            return {"betti": betti_numbers(space)}, f"Cohomology of {space}"
        if options["periodic"]:
            data = {"degree": degree, "periodic_rank": periodic_cohomology(space, degree)}
        else:
            data = simplicial_cohomology(space, degree).as_dict()
        if options["compare_forms"]:
            data["form_rank"] = form_cohomology_rank(space, degree, options.get("polydeg_bound"))
        return data, f"H^{degree}({space})"
