"""Coactions of the superpoint endomorphism monoid.

The bialgebra of functions on End(A^{0|1}) is Q[x, e] with x even and e odd.
A coaction on an algebra A is an algebra map A -> A ⊗ Q[x, e], encoded by
adjoining ``x`` and ``e`` to A's variable table. A coaction of the shape

    a -> a x^k + D(a) x^k e

is the same thing as a grading (a has degree k) together with a degree one
derivation D with D∘D = 0. Moving ``e`` past factors makes D a right
derivation: D(ab) = a D(b) + (-1)^{|b|} D(a) b.
"""
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Mapping, Tuple

from ..exceptions import CoactionShapeError, GradingError, SpaceMismatchError, TableMismatchError
from ..logging_utils import log_info, log_warning
from .forms_service import (
    MappingSpaceRing,
    SullivanForm,
    check_compatibility,
    mapping_space_ring,
    polynomial_differential,
)
from .simplicial_service import SimplexRef, SimplicialSet
from .superalg_service import (
    AlgebraMap,
    Monomial,
    Parity,
    SuperPolynomial,
    VariableTable,
    odd_derivation,
    parity_component,
    split_terms,
    substitute,
)

END_EVEN, END_ODD = "x", "e"
FIRST_LEG, SECOND_LEG = ("x'", "e'"), ("x''", "e''")


@dataclass(frozen=True)
class EndBialgebra:
    table: VariableTable
    double: VariableTable
    comultiplication: AlgebraMap
    counit: AlgebraMap


def end_bialgebra() -> EndBialgebra:
    table = VariableTable((END_EVEN,), (END_ODD,))
    double = VariableTable(("x1", "x2"), ("e1", "e2"))
    x1, x2, e1, e2 = (SuperPolynomial.generator(double, name) for name in ("x1", "x2", "e1", "e2"))
    comultiplication = AlgebraMap.from_mapping(table, double, {"x": x1 * x2, "e": e1 + x1 * e2})
    counit = AlgebraMap.from_mapping(table, VariableTable(), {"x": 1, "e": 0})
    return EndBialgebra(table, double, comultiplication, counit)


def verify_bialgebra(bialgebra: EndBialgebra = None) -> dict:
    """Coassociativity and both counit triangles, checked on x and e."""
    bialgebra = bialgebra or end_bialgebra()
    table, double = bialgebra.table, bialgebra.double
    triple = VariableTable(("x1", "x2", "x3"), ("e1", "e2", "e3"))

    def gen(name):
        return SuperPolynomial.generator(triple, name)

    # (m ⊗ 1) and (1 ⊗ m) as maps from the double table into the triple one
    split_first = AlgebraMap.from_mapping(double, triple, {
        "x1": gen("x1") * gen("x2"), "e1": gen("e1") + gen("x1") * gen("e2"), "x2": gen("x3"), "e2": gen("e3"),
    })
    split_second = AlgebraMap.from_mapping(double, triple, {
        "x1": gen("x1"), "e1": gen("e1"), "x2": gen("x2") * gen("x3"), "e2": gen("e2") + gen("x2") * gen("e3"),
    })
    x, e = SuperPolynomial.generator(table, "x"), SuperPolynomial.generator(table, "e")
    left_unit = AlgebraMap.from_mapping(double, table, {"x1": 1, "e1": 0, "x2": x, "e2": e})
    right_unit = AlgebraMap.from_mapping(double, table, {"x1": x, "e1": e, "x2": 1, "e2": 0})
    m = bialgebra.comultiplication
    report = {}
    for name in table.generators:
        image = m.image(name)
        report[name] = {
            "comultiplication": str(image),
            "coassociative": split_first(image) == split_second(image),
            "counital": left_unit(image) == SuperPolynomial.generator(table, name)
            and right_unit(image) == SuperPolynomial.generator(table, name),
        }
    valid = all(entry["coassociative"] and entry["counital"] for entry in report.values())
    return {"valid": valid, "generators": report}


def coaction_table(algebra: VariableTable) -> VariableTable:
    return algebra.extend((END_EVEN,), (END_ODD,))


@dataclass(frozen=True)
class Coaction:
    """Generator images of a coaction, over ``algebra`` with ``x``/``e`` adjoined.

    Images are kept unvalidated so that malformed coactions can be reported.
    """

    algebra: VariableTable
    images: Tuple[SuperPolynomial, ...]
    name: str = field(default="", compare=False)

    @classmethod
    def from_mapping(cls, algebra: VariableTable, images: Mapping[str, SuperPolynomial], name: str = "") -> "Coaction":
        target = coaction_table(algebra)
        ordered = []
        for generator in algebra.generators:
            image = images.get(generator, SuperPolynomial.generator(target, generator))
            if image.table != target:
                raise TableMismatchError(f"Image of {generator} is not over {target.describe()}")
            ordered.append(image)
        return cls(algebra, tuple(ordered), name)

    @cached_property
    def target(self) -> VariableTable:
        return coaction_table(self.algebra)

    def image(self, generator: str) -> SuperPolynomial:
        return self.images[self.algebra.generators.index(generator)]

    def as_map(self) -> AlgebraMap:
        return AlgebraMap(self.algebra, self.target, self.images)

    def __call__(self, p: SuperPolynomial) -> SuperPolynomial:
        return substitute(self.as_map(), p)


def trivial_coaction(algebra: VariableTable) -> Coaction:
    return Coaction.from_mapping(algebra, {}, "trivial")


def canonical_coaction(ring: MappingSpaceRing) -> Coaction:
    """x_i -> x_i + dx_i e,  dx_i -> dx_i x,  e_j -> e_j + de_j e,  de_j -> de_j x."""
    target = coaction_table(ring.table)
    x, e = SuperPolynomial.generator(target, END_EVEN), SuperPolynomial.generator(target, END_ODD)
    images = {}
    for i in range(1, ring.n + 1):
        images[f"x{i}"] = SuperPolynomial.generator(target, f"x{i}") + SuperPolynomial.generator(target, f"dx{i}") * e
        images[f"dx{i}"] = SuperPolynomial.generator(target, f"dx{i}") * x
    for j in range(1, ring.q + 1):
        images[f"e{j}"] = SuperPolynomial.generator(target, f"e{j}") + SuperPolynomial.generator(target, f"de{j}") * e
        images[f"de{j}"] = SuperPolynomial.generator(target, f"de{j}") * x
    return Coaction.from_mapping(ring.table, images, f"canonical({ring.n}|{ring.q})")


def verify_coaction(c: Coaction) -> dict:
    """Check parity, coassociativity and the counit on every generator."""
    algebra, target = c.algebra, c.target
    failures = []
    generators = {}
    parities_ok = True
    for name, image in zip(algebra.generators, c.images):
        ok = image.is_zero or image.parity is algebra.parity_of(name)
        generators[name] = {"image": str(image), "parity": ok}
        if not ok:
            parities_ok = False
            failures.append(name)
    if not parities_ok:
        log_warning(f"Coaction {c.name or ''} violates parity", {"generators": failures})
        return {"valid": False, "failures": failures, "generators": generators}

    triple = algebra.extend((FIRST_LEG[0], SECOND_LEG[0]), (FIRST_LEG[1], SECOND_LEG[1]))

    def leg(name):
        return SuperPolynomial.generator(triple, name)

    # μ applied again to the algebra factor, the old x/e becoming the outer leg
    rename = AlgebraMap.from_mapping(target, triple, {END_EVEN: leg(FIRST_LEG[0]), END_ODD: leg(FIRST_LEG[1])})
    mu_then_mu = AlgebraMap.from_mapping(target, triple, {
        **{name: rename(image) for name, image in zip(algebra.generators, c.images)},
        END_EVEN: leg(SECOND_LEG[0]),
        END_ODD: leg(SECOND_LEG[1]),
    })
    mu_then_m = AlgebraMap.from_mapping(target, triple, {
        END_EVEN: leg(FIRST_LEG[0]) * leg(SECOND_LEG[0]),
        END_ODD: leg(FIRST_LEG[1]) + leg(FIRST_LEG[0]) * leg(SECOND_LEG[1]),
    })
    counit = AlgebraMap.from_mapping(target, algebra, {END_EVEN: 1, END_ODD: 0})
    for name, image in zip(algebra.generators, c.images):
        entry = generators[name]
        entry["coassociative"] = mu_then_mu(image) == mu_then_m(image)
        entry["counital"] = counit(image) == SuperPolynomial.generator(algebra, name)
        if not (entry["coassociative"] and entry["counital"]):
            failures.append(name)
    return {"valid": not failures, "failures": failures, "generators": generators}


def right_derivation(images: Mapping[str, SuperPolynomial], p: SuperPolynomial) -> SuperPolynomial:
    """D(ab) = a D(b) + (-1)^{|b|} D(a) b, extended from generator images."""
    table = p.table
    # a right derivation is (-1)^{|a|} times the left one whose odd-generator images are negated
    left_images = {
        name: (-image if table.parity_of(name) is Parity.ODD else image) for name, image in images.items()
    }
    even = odd_derivation(left_images, parity_component(p, Parity.EVEN))
    odd = odd_derivation(left_images, parity_component(p, Parity.ODD))
    return even - odd


@dataclass(frozen=True)
class CdgaStructure:
    """A connective grading by generator plus the derivation's generator images."""

    table: VariableTable
    degrees: Tuple[Tuple[str, int], ...]
    differential: Tuple[Tuple[str, SuperPolynomial], ...]

    @cached_property
    def degree_map(self) -> Dict[str, int]:
        return dict(self.degrees)

    @cached_property
    def differential_map(self) -> Dict[str, SuperPolynomial]:
        return dict(self.differential)

    def monomial_degree(self, monomial: Monomial) -> int:
        degrees = self.degree_map
        total = sum(e * degrees[name] for name, e in zip(self.table.evens, monomial.evens))
        return total + sum(degrees[self.table.odds[i]] for i in monomial.odds)

    def apply(self, p: SuperPolynomial) -> SuperPolynomial:
        return right_derivation(self.differential_map, p)


def check_cdga(structure: CdgaStructure) -> dict:
    problems = []
    for name, k in structure.degrees:
        if k < 0:
            problems.append(f"{name}: negative degree {k}")
    for name, image in structure.differential:
        k = structure.degree_map[name]
        wrong = [m for m in image.terms if structure.monomial_degree(m) != k + 1]
        if wrong:
            problems.append(f"d({name}) is not of degree {k + 1}")
        if not structure.apply(image).is_zero:
            problems.append(f"d(d({name})) != 0")
    return {"valid": not problems, "problems": problems}


def coaction_to_cdga(c: Coaction) -> CdgaStructure:
    """Read off degree and derivation image per generator from images g x^k + D(g) x^k e."""
    algebra = c.algebra
    degrees, differential = [], []
    for name, image in zip(algebra.generators, c.images):
        generator = SuperPolynomial.generator(algebra, name)
        parts = split_terms(image, algebra)
        plain = [m for m in parts if not m.odds]
        if len(plain) != 1 or parts[plain[0]] != generator:
            raise CoactionShapeError(f"Image of {name} is not of the form {name}*x^k + D({name})*x^k*e", generator=name)
        k = plain[0].evens[0]
        x_power, x_power_e = Monomial((k,), ()), Monomial((k,), (0,))
        if set(parts) - {x_power, x_power_e}:
            raise CoactionShapeError(f"Image of {name} has terms outside x^{k} and x^{k}*e", generator=name)
        degrees.append((name, k))
        differential.append((name, parts.get(x_power_e, SuperPolynomial.zero(algebra))))
    structure = CdgaStructure(algebra, tuple(degrees), tuple(differential))
    report = check_cdga(structure)
    if not report["valid"]:
        raise GradingError("; ".join(report["problems"]))
    log_info(f"Coaction {c.name} is of cdga type", {"degrees": dict(degrees)})
    return structure


def cdga_to_coaction(structure: CdgaStructure, name: str = "") -> Coaction:
    report = check_cdga(structure)
    if not report["valid"]:
        raise GradingError("; ".join(report["problems"]))
    target = coaction_table(structure.table)
    x, e = SuperPolynomial.generator(target, END_EVEN), SuperPolynomial.generator(target, END_ODD)
    images = {}
    for generator, k in structure.degrees:
        lifted = SuperPolynomial.generator(target, generator)
        d_lifted = _lift(structure.differential_map.get(generator, SuperPolynomial.zero(structure.table)), target)
        images[generator] = (lifted + d_lifted * e) * x ** k
    return Coaction.from_mapping(structure.table, images, name)


def _lift(p: SuperPolynomial, target: VariableTable) -> SuperPolynomial:
    return SuperPolynomial(target, {Monomial(m.evens + (0,), m.odds): c for m, c in p.terms.items()}, p.domain)


def mapping_space_cdga(ring: MappingSpaceRing) -> CdgaStructure:
    """Forms grading and de Rham differential on a mapping-space ring."""
    degrees = tuple((name, ring.degree_of(name)) for name in ring.table.generators)
    differential = tuple(
        (name, polynomial_differential(SuperPolynomial.generator(ring.table, name))) for name in ring.table.generators
    )
    return CdgaStructure(ring.table, degrees, differential)


@dataclass(frozen=True)
class FormCoaction:
    """Simplexwise image of a form, split into x^k and x^k e components."""

    form: SullivanForm
    images: Tuple[Tuple[SimplexRef, SuperPolynomial], ...]
    components: Tuple[Tuple[Monomial, SullivanForm], ...]
    compatible: bool

    def component(self, k: int, with_e: bool = False) -> SullivanForm:
        key = Monomial((k,), (0,) if with_e else ())
        return dict(self.components).get(key, SullivanForm.zero(self.form.space))


def coaction_on_forms(space: SimplicialSet, form: SullivanForm) -> FormCoaction:
    """Apply the canonical coaction simplexwise and check the result is a compatible family."""
    if form.space != space:
        raise SpaceMismatchError(f"Form does not live on {space}")
    if form.cylinder:
        raise SpaceMismatchError("The canonical coaction acts on plain forms, not cylinder forms")
    images = []
    split: Dict[Monomial, Dict[SimplexRef, SuperPolynomial]] = {}
    for ref, value in form.value_data:
        image = canonical_coaction(mapping_space_ring(ref.dim))(value)
        images.append((ref, image))
        for key, part in split_terms(image, value.table).items():
            split.setdefault(key, {})[ref] = part
    components = tuple(
        (key, SullivanForm.build(form.space, values)) for key, values in sorted(split.items(), key=lambda kv: (kv[0].evens, kv[0].odds))
    )
    compatible = all(check_compatibility(component)["compatible"] for _, component in components)
    if not compatible:
        log_warning("Coaction image of a form is not a compatible family", {"space": form.space.name})
    return FormCoaction(form, tuple(images), components, compatible)


def grading_degree(c: Coaction, p: SuperPolynomial):
    """k if ``p`` is homogeneous of degree k for the coaction, else None."""
    parts = split_terms(c(p), c.algebra)
    plain = [m for m in parts if not m.odds and not parts[m].is_zero]
    if len(plain) == 1 and parts[plain[0]] == p:
        return plain[0].evens[0]
    return None


def max_form_degree(n_max: int) -> int:
    """Largest grading degree present on the rings of A^{n|0}, n ≤ n_max."""
    best = 0
    for n in range(n_max + 1):
        ring = mapping_space_ring(n)
        top = SuperPolynomial.constant(ring.table, 1)
        for i in range(1, n + 1):
            top = top * SuperPolynomial.generator(ring.table, f"dx{i}")
        best = max(best, grading_degree(canonical_coaction(ring), top))
    return best
