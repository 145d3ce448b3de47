from ...serializers import FormSerializer
from ...services.forms_service import (
    check_compatibility,
    differential,
    global_functions_ring_check,
    is_closed,
    random_form,
)
from ._base import CheckFailed, ReportCommand, load_form, load_space


class Command(ReportCommand):
    help = "Check, generate and differentiate Sullivan forms."

    def add_actions(self, subparsers):
        action = self.add_action(subparsers, "check", "Check that a form file is a compatible family")
        action.add_argument("--space", required=True, help="Space JSON file")
        action.add_argument("--form", required=True, help="Form JSON file")
        action = self.add_action(subparsers, "random", "Print a seeded random compatible form")
        action.add_argument("--space", required=True, help="Space JSON file")
        action.add_argument("--degree", type=int, required=True, help="Form degree")
        action.add_argument("--polydeg-bound", type=int, help="Bound on the polynomial degree of the coefficients")
        action.add_argument("--cylinder", action="store_true", help="Draw from forms on X x Δ¹ (variables t, dt)")
        action = self.add_action(subparsers, "differential", "Print the differential of a form")
        action.add_argument("--space", required=True, help="Space JSON file")
        action.add_argument("--form", required=True, help="Form JSON file")
        action = self.add_action(subparsers, "ring", "Check that compatible families form a ring closed under d")
        action.add_argument("--space", required=True, help="Space JSON file")
        action.add_argument("--polydeg-bound", type=int, default=1, help="Coefficient degree of the generators")

    def handle_check(self, options):
        space = load_space(options["space"])
        form = load_form(options["form"], space)
        report = check_compatibility(form)
        report["degrees"] = sorted(form.degrees())
        report["closed"] = is_closed(form)
        if not report["compatible"]:
            raise CheckFailed("Form is not compatible with the face maps", report)
        return report, "Form is a compatible family"

    def handle_random(self, options):
        space = load_space(options["space"])
        form = random_form(space, options["degree"], options["polydeg_bound"], options["seed"], options["cylinder"])
        return FormSerializer.payload(form), f"Random {options['degree']}-form on {space} (seed {options['seed']})"

    def handle_differential(self, options):
        space = load_space(options["space"])
        form = load_form(options["form"], space)
        return FormSerializer.payload(differential(form)), "Differential of the form"

    def handle_ring(self, options):
        space = load_space(options["space"])
        report = global_functions_ring_check(space, options["polydeg_bound"])
        if not report["valid"]:
            raise CheckFailed("Compatible families are not closed under the ring operations", report)
        return report, f"Compatible families on {space} form a cdga"
