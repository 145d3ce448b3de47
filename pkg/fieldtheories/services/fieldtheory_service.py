"""Geometries on the superpoint and (twisted) field theories over a simplicial set.

A field theory over X with a given geometry is a form on X that is
coinvariant for the geometry's submonoid of End(A^{0|1}); twisted theories
are pairs of forms satisfying the differential equations of their twist.
"""
from dataclasses import dataclass
from enum import Enum
from math import factorial
from typing import Dict, List, Optional, Sequence, Tuple

from django.conf import settings

from ..exceptions import (
    ConstraintViolationError,
    DegreeMismatchError,
    NotClosedError,
    RepresentationError,
    SpaceMismatchError,
)
from ..logging_utils import log_info, log_warning
from .coaction_service import END_EVEN, END_ODD, coaction_on_forms, end_bialgebra
from .forms_service import (
    SullivanForm,
    add,
    check_compatibility,
    differential,
    is_closed,
    scale,
    subtract,
    wedge,
)
from .simplicial_service import SimplicialSet
from .superalg_service import AlgebraMap, Monomial, SuperPolynomial, VariableTable, specialize, substitute


class Geometry(Enum):
    PRETOPOLOGICAL = "pretopological"
    TOPOLOGICAL = "topological"
    EUCLIDEAN = "euclidean"
    ORIENTED_EUCLIDEAN = "oriented_euclidean"
    FULLY_RIGID = "fully_rigid"

    @classmethod
    def parse(cls, value) -> "Geometry":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower().replace("-", "_"))
        except ValueError:
            choices = ", ".join(g.value for g in cls)
            raise ConstraintViolationError(f"Unknown geometry '{value}' (expected one of {choices})") from None


# Largest submonoid first; each geometry restricts the previous one.
GEOMETRY_CHAIN = (
    Geometry.PRETOPOLOGICAL,
    Geometry.TOPOLOGICAL,
    Geometry.EUCLIDEAN,
    Geometry.ORIENTED_EUCLIDEAN,
    Geometry.FULLY_RIGID,
)


@dataclass(frozen=True)
class GeometryBialgebra:
    """The quotient of Q[x, e] attached to a geometry.

    ``x_values`` is None when x stays a variable (inverted for the
    topological geometry); otherwise the quotient is the product of copies
    of Q[e] (or Q) indexed by the allowed values of x.
    """

    geometry: Geometry
    x_values: Optional[Tuple[int, ...]]
    invert_x: bool
    keeps_e: bool
    description: str

    def quotients(self, p: SuperPolynomial) -> List[SuperPolynomial]:
        """Images of ``p`` (over a table containing x and e) in each factor of the quotient."""
        if self.x_values is None:
            return [p]
        images = []
        for value in self.x_values:
            assignments = {END_EVEN: value}
            if not self.keeps_e:
                assignments[END_ODD] = 0
            images.append(specialize(p, assignments))
        return images


def geometry_bialgebra(geometry) -> GeometryBialgebra:
    geometry = Geometry.parse(geometry)
    return {
        Geometry.PRETOPOLOGICAL: GeometryBialgebra(geometry, None, False, True, "Q[x, e]"),
        Geometry.TOPOLOGICAL: GeometryBialgebra(geometry, None, True, True, "Q[x, 1/x, e]"),
        Geometry.EUCLIDEAN: GeometryBialgebra(geometry, (1, -1), False, True, "(Q x Q)[e]"),
        Geometry.ORIENTED_EUCLIDEAN: GeometryBialgebra(geometry, (1,), False, True, "Q[e]"),
        Geometry.FULLY_RIGID: GeometryBialgebra(geometry, (1,), False, False, "Q"),
    }[geometry]


def verify_geometry_chain() -> dict:
    """Each quotient factors through the previous one and is compatible with m*."""
    links = []
    previous = None
    for geometry in GEOMETRY_CHAIN:
        quotient = geometry_bialgebra(geometry)
        values = quotient.x_values
        multiplicative = values is None or all(a * b in values for a in values for b in values)
        unital = values is None or 1 in values
        if previous is None:
            restricts = True
        elif previous.x_values is None:
            restricts = True
        else:
            restricts = set(values or ()) <= set(previous.x_values) and (previous.keeps_e or not quotient.keeps_e)
        links.append({
            "geometry": geometry.value,
            "bialgebra": quotient.description,
            "submonoid": multiplicative and unital,
            "restricts_previous": restricts,
        })
        previous = quotient
    valid = all(link["submonoid"] and link["restricts_previous"] for link in links)
    return {"valid": valid, "links": links}


@dataclass(frozen=True)
class GeometryStructure:
    geometry: Geometry
    grading: Optional[str]
    differential: bool

    @property
    def description(self) -> str:
        parts = []
        if self.grading:
            parts.append(f"{self.grading} grading")
        if self.differential:
            parts.append("odd differential")
        return " + ".join(parts) if parts else "no structure"


def geometry_coaction(geometry) -> GeometryStructure:
    """What the geometry's coaction retains of the forms' cdga structure."""
    geometry = Geometry.parse(geometry)
    grading = {
        Geometry.PRETOPOLOGICAL: "N",
        Geometry.TOPOLOGICAL: "Z",
        Geometry.EUCLIDEAN: "Z/2",
    }.get(geometry)
    return GeometryStructure(geometry, grading, geometry is not Geometry.FULLY_RIGID)


def _require_form(space: SimplicialSet, form: SullivanForm, label: str = "form"):
    if form.space != space:
        raise SpaceMismatchError(f"{label} does not live on {space}")
    report = check_compatibility(form)
    if not report["compatible"]:
        raise ConstraintViolationError(f"{label} is not a compatible family", violations=report["violations"])


def untwisted_membership(space: SimplicialSet, geometry, form: SullivanForm) -> bool:
    geometry = Geometry.parse(geometry)
    _require_form(space, form)
    if geometry is Geometry.FULLY_RIGID:
        return True
    if not is_closed(form):
        return False
    degrees = form.degrees()
    if geometry in (Geometry.PRETOPOLOGICAL, Geometry.TOPOLOGICAL):
        return degrees <= {0}
    if geometry is Geometry.EUCLIDEAN:
        return all(k % 2 == 0 for k in degrees)
    return True


def degree_twist_membership(space: SimplicialSet, geometry, n: int, form: SullivanForm) -> bool:
    geometry = Geometry.parse(geometry)
    _require_form(space, form)
    if geometry is Geometry.FULLY_RIGID:
        return True
    if not is_closed(form):
        return False
    degrees = form.degrees()
    if geometry in (Geometry.PRETOPOLOGICAL, Geometry.TOPOLOGICAL):
        return degrees <= {n}
    if geometry is Geometry.EUCLIDEAN:
        return all((k - n) % 2 == 0 for k in degrees)
    return True


# --- basic twists ------------------------------------------------------------------


def representation_table() -> VariableTable:
    return end_bialgebra().table


def check_group_like(rho: SuperPolynomial) -> None:
    """ρ must define a monoid map to A^1: m*(ρ) = ρ ⊗ ρ and counit(ρ) = 1."""
    bialgebra = end_bialgebra()
    if rho.table != bialgebra.table:
        raise RepresentationError(f"ρ must be a polynomial in {bialgebra.table.describe()}")
    double = bialgebra.double
    first = AlgebraMap.from_mapping(bialgebra.table, double, {
        END_EVEN: SuperPolynomial.generator(double, "x1"), END_ODD: SuperPolynomial.generator(double, "e1"),
    })
    second = AlgebraMap.from_mapping(bialgebra.table, double, {
        END_EVEN: SuperPolynomial.generator(double, "x2"), END_ODD: SuperPolynomial.generator(double, "e2"),
    })
    if substitute(bialgebra.comultiplication, rho) != first(rho) * second(rho):
        raise RepresentationError(f"ρ = {rho} is not multiplicative under m*")
    if substitute(bialgebra.counit, rho).constant_term() != 1:
        raise RepresentationError(f"ρ = {rho} does not send the unit to 1")


def basic_twist_coinvariance(space: SimplicialSet, geometry, rho: SuperPolynomial, form: SullivanForm,
                             label: str = "L") -> bool:
    """Whether ``form`` (valued in the rank one module ``label``) satisfies μ*(a) = ρ·a.

    Both sides are compared after passing to the geometry's quotient of Q[x, e].
    """
    geometry = Geometry.parse(geometry)
    _require_form(space, form)
    try:
        check_group_like(rho)
    except RepresentationError:
        log_warning(f"Twist representation {rho} is not group-like", {"geometry": geometry.value, "module": label})
        raise
    quotient = geometry_bialgebra(geometry)
    image = coaction_on_forms(space, form)
    for ref, value in image.images:
        target = value.table
        lifted_rho = AlgebraMap.from_mapping(rho.table, target, {})(rho)
        base = form.values[ref]
        lifted_form = SuperPolynomial(target, {
            Monomial(m.evens + (0,), m.odds): c for m, c in base.terms.items()
        }, base.domain)
        expected = lifted_rho * lifted_form
        for left, right in zip(quotient.quotients(value), quotient.quotients(expected)):
            if left != right:
                return False
    return True


def degree_representation(n: int) -> SuperPolynomial:
    table = representation_table()
    return SuperPolynomial.generator(table, END_EVEN) ** n


# --- general twists ----------------------------------------------------------------------

GENERAL_TWIST_ROWS: Dict[Geometry, Dict[str, str]] = {
    Geometry.PRETOPOLOGICAL: {
        "closed": "ω ∈ Ω^k, α ∈ Ω^n; dω = 0, dα = 0",
        "f": "ω ∈ Ω^k, α ∈ Ω^n; dω = a ω^m ∧ α, dα = 0; k+1 = n+mk; k, m, n ≥ 0",
        "g": "ω ∈ Ω^k, α ∈ Ω^n; dα = a ω^m, dω = 0; n+1 = km; k, m, n ≥ 0",
    },
    Geometry.TOPOLOGICAL: {
        "closed": "ω ∈ Ω^k, α ∈ Ω^n; dω = 0, dα = 0",
        "f": "ω ∈ Ω^k, α ∈ Ω^n; dω = a ω^m ∧ α, dα = 0; k+1 = n+mk; m ≥ 0",
        "g": "ω ∈ Ω^k, α ∈ Ω^n; dα = a ω^m, dω = 0; n+1 = km; m ≥ 0",
    },
    Geometry.EUCLIDEAN: {
        "closed": "ω ∈ Ω^{k mod 2}, α ∈ Ω^{n mod 2}; dω = 0, dα = 0",
        "even_f": "ω even, α odd; dω = f(ω) ∧ α, dα = a; a f = 0",
        "odd_f": "ω odd, α even; dω = f(ω) ∧ α, dα = 0; f ∈ Q[y^2]",
        "even_g": "ω even, α odd; dω = 0, dα = f(ω)",
        "odd_g": "ω odd, α even; dω = 0, dα = f(ω); f odd",
    },
    Geometry.ORIENTED_EUCLIDEAN: {
        "g": "ω, α ∈ Ω^*; dα = g(ω), dω = 0",
        "f": "ω, α ∈ Ω^*; dω = f(ω), dα = a; a f = 0",
    },
}


@dataclass(frozen=True)
class TwistSpec:
    """A twist: geometry plus family (untwisted, degree, basic, differential or general)."""

    geometry: Geometry
    family: str
    row: str = ""
    k: int = 0
    n: int = 0
    m: int = 0
    a: object = 0
    f: Tuple = ()
    rho: Optional[SuperPolynomial] = None
    label: str = "L"

    def polynomial(self) -> Tuple:
        return tuple(self.f)


def check_twist_parameters(spec: TwistSpec) -> None:
    """Raise ConstraintViolationError when the row's parameter constraints fail."""
    family = spec.family
    if family in ("untwisted", "degree", "basic"):
        if family == "basic" and spec.rho is None:
            raise ConstraintViolationError("A basic twist needs a representation ρ")
        return
    if family == "differential":
        if spec.n < 1:
            raise ConstraintViolationError("A differential twist needs n >= 1")
        return
    if family != "general":
        raise ConstraintViolationError(f"Unknown twist family '{family}'")
    rows = GENERAL_TWIST_ROWS.get(spec.geometry, {})
    if spec.row not in rows:
        raise ConstraintViolationError(
            f"Geometry {spec.geometry.value} has no general twist row '{spec.row}'", rows=sorted(rows)
        )
    f = spec.polynomial()
    cap = settings.SUPERPOINT_TWIST_DEGREE_CAP
    if len(f) - 1 > cap:
        raise ConstraintViolationError(f"Polynomial degree {len(f) - 1} exceeds the cap {cap}")
    k, n, m = spec.k, spec.n, spec.m
    if spec.geometry in (Geometry.PRETOPOLOGICAL, Geometry.TOPOLOGICAL):
        if m < 0 or (spec.geometry is Geometry.PRETOPOLOGICAL and min(k, n) < 0):
            raise ConstraintViolationError(f"Parameters k={k}, m={m}, n={n} out of range")
        if spec.row == "f" and k + 1 != n + m * k:
            raise ConstraintViolationError(f"k+1 = n+mk fails for k={k}, m={m}, n={n}")
        if spec.row == "g" and n + 1 != k * m:
            raise ConstraintViolationError(f"n+1 = km fails for k={k}, m={m}, n={n}")
        return
    nonzero_f = any(f)
    if spec.row in ("even_f", "f") and spec.a and nonzero_f:
        raise ConstraintViolationError("a f = 0 fails")
    if spec.row == "odd_f" and any(c for i, c in enumerate(f) if i % 2):
        raise ConstraintViolationError("f must lie in Q[y^2]")
    if spec.row == "odd_g" and any(c for i, c in enumerate(f) if i % 2 == 0):
        raise ConstraintViolationError("f must be an odd polynomial")


def wedge_power(form: SullivanForm, exponent: int) -> SullivanForm:
    result = SullivanForm.constant(form.space, 1, form.cylinder)
    for _ in range(exponent):
        result = wedge(result, form)
    return result


def evaluate_polynomial(coefficients: Sequence, form: SullivanForm) -> SullivanForm:
    """f(ω) = Σ c_i ω^i with wedge powers."""
    result = SullivanForm.zero(form.space, form.cylinder)
    power = SullivanForm.constant(form.space, 1, form.cylinder)
    for coeff in coefficients:
        if coeff:
            result = add(result, scale(power, coeff))
        power = wedge(power, form)
    return result


def _degree_violation(form: SullivanForm, label: str, allowed) -> Optional[str]:
    bad = sorted(k for k in form.degrees() if not allowed(k))
    if bad:
        return f"{label} has components in degrees {bad}"
    return None


def general_twist_check(space: SimplicialSet, spec: TwistSpec, omega: SullivanForm, alpha: SullivanForm) -> dict:
    """Evaluate the row's equations exactly; failing equations are listed."""
    check_twist_parameters(spec)
    _require_form(space, omega, "ω")
    _require_form(space, alpha, "α")
    geometry, row, a = spec.geometry, spec.row, spec.a
    d_omega, d_alpha = differential(omega), differential(alpha)
    zero = SullivanForm.zero(space)
    violations = []

    def require(label, left, right):
        if left != right:
            violations.append(label)

    if geometry in (Geometry.PRETOPOLOGICAL, Geometry.TOPOLOGICAL):
        violations.extend(filter(None, (
            _degree_violation(omega, "ω", lambda d: d == spec.k),
            _degree_violation(alpha, "α", lambda d: d == spec.n),
        )))
        if row == "closed":
            require("dω = 0", d_omega, zero)
            require("dα = 0", d_alpha, zero)
        elif row == "f":
            require("dω = a ω^m ∧ α", d_omega, scale(wedge(wedge_power(omega, spec.m), alpha), a))
            require("dα = 0", d_alpha, zero)
        else:
            require("dα = a ω^m", d_alpha, scale(wedge_power(omega, spec.m), a))
            require("dω = 0", d_omega, zero)
    elif geometry is Geometry.EUCLIDEAN:
        f = spec.polynomial()
        if row == "closed":
            omega_parity, alpha_parity = spec.k % 2, spec.n % 2
        else:
            omega_parity = 0 if row.startswith("even") else 1
            alpha_parity = 1 - omega_parity
        violations.extend(filter(None, (
            _degree_violation(omega, "ω", lambda d: d % 2 == omega_parity),
            _degree_violation(alpha, "α", lambda d: d % 2 == alpha_parity),
        )))
        if row == "closed":
            require("dω = 0", d_omega, zero)
            require("dα = 0", d_alpha, zero)
        elif row == "even_f":
            require("dω = f(ω) ∧ α", d_omega, wedge(evaluate_polynomial(f, omega), alpha))
            require("dα = a", d_alpha, SullivanForm.constant(space, a))
        elif row == "odd_f":
            require("dω = f(ω) ∧ α", d_omega, wedge(evaluate_polynomial(f, omega), alpha))
            require("dα = 0", d_alpha, zero)
        else:
            require("dω = 0", d_omega, zero)
            require("dα = f(ω)", d_alpha, evaluate_polynomial(f, omega))
    else:
        f = spec.polynomial()
        if row == "g":
            require("dα = g(ω)", d_alpha, evaluate_polynomial(f, omega))
            require("dω = 0", d_omega, zero)
        else:
            require("dω = f(ω)", d_omega, evaluate_polynomial(f, omega))
            require("dα = a", d_alpha, SullivanForm.constant(space, a))
    return {"valid": not violations, "violations": violations}


def general_twist_membership(space: SimplicialSet, spec: TwistSpec, omega: SullivanForm, alpha: SullivanForm) -> bool:
    return general_twist_check(space, spec, omega, alpha)["valid"]


# --- twisted and differential twists ------------------------------------------------------


def twisted_differential(alpha: SullivanForm, beta: SullivanForm, a=1) -> SullivanForm:
    """d_α(β) = dβ - a β ∧ α for a closed form α of odd degree, the order used by the general twist rows."""
    if alpha.space != beta.space:
        raise SpaceMismatchError("α and β live on different spaces")
    if not is_closed(alpha):
        raise NotClosedError("The twisting form must be closed")
    if any(k % 2 == 0 for k in alpha.degrees()):
        raise DegreeMismatchError("The twisting form must have odd degree")
    return subtract(differential(beta), scale(wedge(beta, alpha), a))


def differential_twist(omega: SullivanForm) -> Tuple[SullivanForm, SullivanForm]:
    """ω -> (ω, dω), the pair picked out by the differential twist."""
    return omega, differential(omega)


def differential_twist_spec(geometry, n: int) -> Tuple[TwistSpec, bool]:
    """The general twist row realizing the degree n differential twist.

    Returns the row and whether (ω, dω) enters it as (α, ω).
    """
    geometry = Geometry.parse(geometry)
    if geometry is Geometry.EUCLIDEAN:
        return TwistSpec(geometry, "general", "even_f" if n % 2 else "odd_f", k=n - 1, n=n, a=0, f=(1,)), False
    if geometry is Geometry.ORIENTED_EUCLIDEAN:
        return TwistSpec(geometry, "general", "g", f=(0, 1)), True
    if geometry is Geometry.FULLY_RIGID:
        raise ConstraintViolationError("The fully rigid geometry has no differential twist")
    return TwistSpec(geometry, "general", "f", k=n - 1, n=n, m=0, a=1), False


# --- queries -------------------------------------------------------------------


@dataclass(frozen=True)
class FieldTheoryQuery:
    space: SimplicialSet
    twist: TwistSpec
    omega: SullivanForm
    alpha: Optional[SullivanForm] = None


def check_query(query: FieldTheoryQuery) -> dict:
    """Membership report for a candidate theory under its twist."""
    space, spec = query.space, query.twist
    check_twist_parameters(spec)
    family = spec.family
    if family == "untwisted":
        valid = untwisted_membership(space, spec.geometry, query.omega)
        equation = "closed, degree 0 component only"
    elif family == "degree":
        valid = degree_twist_membership(space, spec.geometry, spec.n, query.omega)
        equation = f"closed, degree twist n={spec.n}"
    elif family == "basic":
        valid = basic_twist_coinvariance(space, spec.geometry, spec.rho, query.omega, spec.label)
        equation = f"μ*(a) = ({spec.rho})·a"
    else:
        if query.alpha is None:
            if family != "differential":
                raise ConstraintViolationError("This twist needs a pair (ω, α)")
            omega, alpha = differential_twist(query.omega)
        else:
            omega, alpha = query.omega, query.alpha
        row_spec, swapped = (differential_twist_spec(spec.geometry, spec.n) if family == "differential"
                             else (spec, False))
        if swapped:
            omega, alpha = alpha, omega
        report = general_twist_check(space, row_spec, omega, alpha)
        valid = report["valid"]
        equation = "; ".join(report["violations"]) or GENERAL_TWIST_ROWS[row_spec.geometry][row_spec.row]
    log_info(
        f"Field theory check {'passed' if valid else 'failed'}",
        {"space": space.name, "geometry": spec.geometry.value, "family": family},
    )
    result = {"valid": valid, "geometry": spec.geometry.value, "family": family}
    result["equation" if valid else "violated"] = equation
    return result


def bordism_generators(space: SimplicialSet, k: int) -> dict:
    """Bookkeeping for the k-th piece of the free commutative bordism monoid over X."""
    if k < 0:
        raise ConstraintViolationError("k must be a natural number")
    generator = f"Map(A^(0|1), {space.name or 'X'})/M"
    if k == 0:
        piece = "unit component (empty bordism)"
    elif k == 1:
        piece = generator
    else:
        piece = f"Sym^{k}({generator})"
    return {
        "k": k,
        "piece": piece,
        "generator": generator,
        "generator_ring": f"Omega({space.name or 'X'})",
        "symmetric_group_order": factorial(k),
    }
