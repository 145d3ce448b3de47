from ...serializers import TwistSpecSerializer
from ...services.fieldtheory_service import (
    GEOMETRY_CHAIN,
    FieldTheoryQuery,
    bordism_generators,
    check_query,
    geometry_bialgebra,
    geometry_coaction,
    verify_geometry_chain,
)
from ...utils import load_json
from ._base import CheckFailed, ReportCommand, load_form, load_space


def load_twist(path):
    serializer = TwistSpecSerializer(data=load_json(path, "--twist"))
    serializer.is_valid(raise_exception=True)
    return serializer.save()


class Command(ReportCommand):
    help = "Membership of candidate 0|1-dimensional field theories over a space."

    def add_actions(self, subparsers):
        action = self.add_action(subparsers, "check", "Check a form (or pair of forms) against a twist")
        action.add_argument("--space", required=True, help="Space JSON file")
        action.add_argument("--twist", required=True, help="Twist JSON file")
        action.add_argument("--form", required=True, help="Form JSON file for ω")
        action.add_argument("--alpha", help="Form JSON file for α (pair twists)")
        action = self.add_action(subparsers, "geometry", "Describe the geometries and check their chain")
        action.add_argument("--geometry", help="Restrict the report to one geometry")
        action = self.add_action(subparsers, "bordism", "Generators of the k-th bordism piece over a space")
        action.add_argument("--space", required=True, help="Space JSON file")
        action.add_argument("--k", type=int, default=1, help="Number of superpoints")

    def handle_check(self, options):
        space = load_space(options["space"])
        twist = load_twist(options["twist"])
        omega = load_form(options["form"], space)
        alpha = load_form(options["alpha"], space, "--alpha") if options.get("alpha") else None
        report = check_query(FieldTheoryQuery(space, twist, omega, alpha))
        if not report["valid"]:
            raise CheckFailed("Not a field theory for this twist", report)
        return report, "Field theory"

    def handle_geometry(self, options):
        chain = verify_geometry_chain()
        geometries = GEOMETRY_CHAIN
        if options.get("geometry"):
            geometries = [geometry_bialgebra(options["geometry"]).geometry]
        data = {
            geometry.value: {
                "bialgebra": geometry_bialgebra(geometry).description,
                "structure": geometry_coaction(geometry).description,
            }
            for geometry in geometries
        }
        data["chain_valid"] = chain["valid"]
        if not chain["valid"]:
            raise CheckFailed("Geometry chain is inconsistent", {**data, "links": chain["links"]})
        return data, "Geometries"

    def handle_bordism(self, options):
        space = load_space(options["space"])
        return bordism_generators(space, options["k"]), f"Bordism piece k={options['k']}"
