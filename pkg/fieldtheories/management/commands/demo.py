from sympy.polys.domains import QQ

from ...services.coaction_service import canonical_coaction, coaction_to_cdga, verify_coaction
from ...services.fieldtheory_service import twisted_differential
from ...services.forms_service import SullivanForm, is_closed, mapping_space_ring, random_form
from ...services.homology_service import betti_numbers, integration_cochain, is_exact
from ...services.simplicial_service import SimplexRef, coordinate_table, standard
from ...services.superalg_service import SuperPolynomial
from ._base import CheckFailed, ReportCommand
from .coaction import structure_payload


def fundamental_class():
    """The 1-form dx1 on the top edge of S¹ = Δ¹/∂Δ¹."""
    circle = standard("sphere1")
    top = SimplexRef(1, "top")
    form = SullivanForm.build(circle, {top: SuperPolynomial.generator(coordinate_table(1), "dx1")})
    return circle, top, form


class Command(ReportCommand):
    help = "Executable examples: fundamental class of S¹, torus cohomology, coaction calculus, twisted twists."

    def add_actions(self, subparsers):
        self.add_action(subparsers, "s1-fundamental-class", "The fundamental 1-form on S¹ is closed but not exact")
        self.add_action(subparsers, "torus-cohomology", "Betti numbers of the minimal torus")
        self.add_action(subparsers, "coaction-calculus", "The canonical coaction on A^(1|0) and its cdga")
        self.add_action(subparsers, "twisted-twist", "The twisted differential d - ∧α squares to zero on S¹")

    def handle_s1_fundamental_class(self, options):
        circle, top, form = fundamental_class()
        integral = integration_cochain(form, 1)[top]
        exact = is_exact(form)
        data = {
            "form": {str(top): str(form.value(top))},
            "closed": is_closed(form),
            "integral": str(QQ.to_sympy(integral)),
            "exact": exact,
        }
        if exact or integral != 1:
            raise CheckFailed("The fundamental form should integrate to 1 and not be exact", data)
        return data, "not exact"

    def handle_torus_cohomology(self, options):
        betti = betti_numbers(standard("torus"))
        if betti != [1, 2, 1]:
            raise CheckFailed("Unexpected torus cohomology", {"betti": betti})
        return {"betti": betti}, "H*(T²) has ranks 1, 2, 1"

    def handle_coaction_calculus(self, options):
        ring = mapping_space_ring(1)
        coaction = canonical_coaction(ring)
        report = verify_coaction(coaction)
        data = {
            "images": {name: str(coaction.image(name)) for name in ring.table.generators},
            "valid": report["valid"],
            "cdga": structure_payload(coaction_to_cdga(coaction)),
        }
        if not report["valid"]:
            raise CheckFailed("Canonical coaction fails its axioms", data)
        return data, "x1 has degree 0 and d(x1) = dx1"

    def handle_twisted_twist(self, options):
        circle = standard("sphere1")
        seed = options["seed"]
        alpha = random_form(circle, 1, 2, seed)
        beta = random_form(circle, 0, 2, seed + 1)
        once = twisted_differential(alpha, beta)
        twice = twisted_differential(alpha, once)
        data = {
            "alpha": {str(ref): str(value) for ref, value in alpha.value_data},
            "beta": {str(ref): str(value) for ref, value in beta.value_data},
            "d_alpha_beta": {str(ref): str(value) for ref, value in once.value_data},
            "squares_to_zero": twice.is_zero,
        }
        if not twice.is_zero:
            raise CheckFailed("The twisted differential does not square to zero", data)
        return data, "(d - ∧α)² = 0"
