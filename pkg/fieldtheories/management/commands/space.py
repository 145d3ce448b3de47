from ...serializers import SimplicialSetSerializer
from ...services.simplicial_service import (
    check_simplicial_map,
    guard_cells,
    pi0,
    prism,
    space_fingerprint,
    standard,
    validate,
    validate_realization,
)
from ._base import CheckFailed, ReportCommand, load_space


class Command(ReportCommand):
    help = "Load, generate and inspect finite simplicial sets."

    def add_actions(self, subparsers):
        action = self.add_action(subparsers, "validate", "Check the simplicial identities of a space file")
        action.add_argument("--space", required=True, help="Space JSON file")
        action = self.add_action(subparsers, "standard", "Print a standard space as JSON")
        action.add_argument("name", help="point, points<k>, delta<n>, boundary<n>, sphere<n> or torus")
        action = self.add_action(subparsers, "info", "Summarize a space")
        action.add_argument("--space", required=True, help="Space JSON file")
        action = self.add_action(subparsers, "prism", "Build X x Δ¹ and check it")
        action.add_argument("--space", required=True, help="Space JSON file")
        action = self.add_action(subparsers, "realization", "Check the cosimplicial identities of the coordinate maps")
        action.add_argument("--n-max", type=int, default=3, help="Largest simplex dimension (at most 5)")

    def handle_validate(self, options):
        space = load_space(options["space"], check=False)
        report = validate(space)
        if not report["valid"]:
            raise CheckFailed(f"{space} violates the simplicial identities", report)
        return report, f"{space} is a valid simplicial set"

    def handle_standard(self, options):
        space = standard(options["name"])
        return SimplicialSetSerializer.payload(space), f"Standard space {options['name']}"

    def handle_info(self, options):
        space = guard_cells(load_space(options["space"]))
        data = {
            "name": space.name,
            "dimension": space.dimension,
            "cells": space.cell_count,
            "counts": {str(dim): len(level) for dim, level in enumerate(space.simplices)},
            "pi0": pi0(space),
            "fingerprint": space_fingerprint(space),
        }
        return data, f"{space}"

    def handle_prism(self, options):
        space = load_space(options["space"])
        product = prism(space)
        report = {
            "cells": product.space.cell_count,
            "valid": validate(product.space)["valid"],
            "f0": check_simplicial_map(product.f0)["valid"],
            "f1": check_simplicial_map(product.f1)["valid"],
            "projection": check_simplicial_map(product.projection)["valid"],
            "pi0": pi0(product.space),
        }
        if not all(value for key, value in report.items() if key not in ("cells", "pi0")):
            raise CheckFailed(f"Prism over {space} failed its checks", report)
        return report, f"{product.space} is valid"

    def handle_realization(self, options):
        report = validate_realization(options["n_max"])
        if not report["valid"]:
            raise CheckFailed("Coordinate maps violate the cosimplicial identities", report)
        return report, f"Cosimplicial identities hold up to dimension {options['n_max']}"
