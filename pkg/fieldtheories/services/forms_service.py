"""Sullivan polynomial forms on finite simplicial sets.

A form stores one polynomial per nondegenerate simplex, over
``coordinate_table(dim)`` (or the cylinder table with ``t``/``dt``).
Compatibility with faces is checked, not enforced, except for forms built
from :func:`compatible_form_basis`.
"""
import random
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from itertools import combinations, product
from typing import Dict, Iterable, List, Mapping, Tuple

from django.conf import settings
from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

from ..exceptions import DegreeMismatchError, InfeasibleDegreeError, SpaceMismatchError
from ..logging_utils import log_duration, log_info
from .simplicial_service import (
    Simplex,
    SimplexRef,
    SimplicialMap,
    SimplicialSet,
    coface_array,
    coordinate_table,
    face_of,
    guard_cells,
    operator_map,
)
from .superalg_service import (
    Monomial,
    SuperPolynomial,
    VariableTable,
    odd_derivation,
    specialize,
)


@dataclass(frozen=True)
class MappingSpaceRing:
    """Functions on maps from the superpoint into A^{n|q}."""

    n: int
    q: int
    table: VariableTable

    def degree_of(self, name: str) -> int:
        return 1 if name.startswith("dx") or name.startswith("de") else 0


def mapping_space_ring(n: int, q: int = 0) -> MappingSpaceRing:
    evens = tuple(f"x{i}" for i in range(1, n + 1)) + tuple(f"de{j}" for j in range(1, q + 1))
    odds = tuple(f"dx{i}" for i in range(1, n + 1)) + tuple(f"e{j}" for j in range(1, q + 1))
    return MappingSpaceRing(n, q, VariableTable(evens, odds))


@dataclass(frozen=True)
class SullivanForm:
    space: SimplicialSet
    value_data: Tuple[Tuple[SimplexRef, SuperPolynomial], ...]
    cylinder: bool = False
    name: str = field(default="", compare=False)

    @classmethod
    def build(cls, space: SimplicialSet, values: Mapping[SimplexRef, SuperPolynomial], cylinder: bool = False, name: str = ""):
        data = []
        for ref in space.all_refs():
            table = coordinate_table(ref.dim, cylinder)
            value = values.get(ref)
            if value is None:
                value = SuperPolynomial.zero(table)
            elif value.table != table:
                raise SpaceMismatchError(f"Value on {ref} is not over {table.describe()}")
            data.append((ref, value))
        unknown = set(values) - set(space.all_refs())
        if unknown:
            raise SpaceMismatchError(f"Values given for unknown simplices: {', '.join(map(str, sorted(unknown)))}")
        return cls(space, tuple(data), cylinder, name)

    @classmethod
    def zero(cls, space: SimplicialSet, cylinder: bool = False) -> "SullivanForm":
        return cls.build(space, {}, cylinder)

    @classmethod
    def constant(cls, space: SimplicialSet, value=1, cylinder: bool = False) -> "SullivanForm":
        return cls.build(space, {
            ref: SuperPolynomial.constant(coordinate_table(ref.dim, cylinder), value) for ref in space.all_refs()
        }, cylinder)

    @cached_property
    def values(self) -> Dict[SimplexRef, SuperPolynomial]:
        return dict(self.value_data)

    def value(self, ref: SimplexRef) -> SuperPolynomial:
        return self.values[ref]

    @property
    def is_zero(self) -> bool:
        return all(value.is_zero for _, value in self.value_data)

    def degrees(self) -> set:
        return set().union(*(value.odd_count_set() for _, value in self.value_data))

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return subtract(self, other)

    def __neg__(self):
        return scale(self, -1)

    def __rmul__(self, factor):
        return scale(self, factor)


def _check_same_space(a: SullivanForm, b: SullivanForm):
    if a.space != b.space:
        raise SpaceMismatchError(f"Forms live on different spaces ({a.space} vs {b.space})")
    if a.cylinder != b.cylinder:
        raise SpaceMismatchError("Cannot combine a cylinder form with a plain form")


def _simplexwise(form: SullivanForm, operation) -> SullivanForm:
    return SullivanForm(form.space, tuple((ref, operation(value)) for ref, value in form.value_data), form.cylinder)


def add(a: SullivanForm, b: SullivanForm) -> SullivanForm:
    _check_same_space(a, b)
    return SullivanForm(a.space, tuple((ref, value + b.values[ref]) for ref, value in a.value_data), a.cylinder)


def scale(a: SullivanForm, factor) -> SullivanForm:
    return _simplexwise(a, lambda value: value * factor)


def subtract(a: SullivanForm, b: SullivanForm) -> SullivanForm:
    return add(a, scale(b, -1))


def wedge(a: SullivanForm, b: SullivanForm) -> SullivanForm:
    _check_same_space(a, b)
    return SullivanForm(a.space, tuple((ref, value * b.values[ref]) for ref, value in a.value_data), a.cylinder)


def polynomial_differential(value: SuperPolynomial) -> SuperPolynomial:
    table = value.table
    # x_i -> dx_i, t -> dt, e_j -> de_j
    images = {name: SuperPolynomial.generator(table, f"d{name}", value.domain)
              for name in table.generators if f"d{name}" in table}
    return odd_derivation(images, value)


def differential(a: SullivanForm) -> SullivanForm:
    return _simplexwise(a, polynomial_differential)


def degree_component(a: SullivanForm, k: int) -> SullivanForm:
    def component(value):
        return SuperPolynomial(value.table, {m: c for m, c in value.terms.items() if len(m.odds) == k}, value.domain)
    return _simplexwise(a, component)


def homogeneous_degree(a: SullivanForm) -> int:
    """The form degree of a nonzero homogeneous form; 0 for the zero form."""
    degrees = a.degrees()
    if len(degrees) > 1:
        raise DegreeMismatchError(f"Form mixes degrees {sorted(degrees)}")
    return degrees.pop() if degrees else 0


def is_closed(a: SullivanForm) -> bool:
    return differential(a).is_zero


def value_on(form: SullivanForm, simplex: Simplex) -> SuperPolynomial:
    """The form evaluated on a general simplex, pulled back along its degeneracy part."""
    value = form.values[simplex.core]
    if simplex.is_nondegenerate:
        return value
    return operator_map(simplex.eta, simplex.core.dim, form.cylinder)(value)


def restrict_to_face(form: SullivanForm, ref: SimplexRef, index: int) -> SuperPolynomial:
    return operator_map(coface_array(index, ref.dim), ref.dim, form.cylinder)(form.values[ref])


def check_compatibility(a: SullivanForm) -> dict:
    violations = []
    checked = 0
    for ref in a.space.all_refs():
        for i in range(ref.dim + 1 if ref.dim else 0):
            checked += 1
            restricted = restrict_to_face(a, ref, i)
            expected = value_on(a, face_of(a.space, Simplex.of(ref), i))
            if restricted != expected:
                violations.append({
                    "simplex": str(ref),
                    "face": i,
                    "restricted": str(restricted),
                    "face_value": str(expected),
                })
    return {"compatible": not violations, "checked": checked, "violations": violations}


def pullback(form: SullivanForm, mapping: SimplicialMap) -> SullivanForm:
    """Pull ``form`` on ``mapping.target`` back to ``mapping.source``."""
    if mapping.target != form.space:
        raise SpaceMismatchError("Map target is not the space of the form")
    values = {ref: value_on(form, mapping.images[ref]) for ref in mapping.source.all_refs()}
    return SullivanForm.build(mapping.source, values, form.cylinder)


def evaluate_endpoint(form: SullivanForm, end: int) -> SullivanForm:
    """Restrict a cylinder form to t = end (and dt = 0)."""
    if not form.cylinder:
        raise SpaceMismatchError("evaluate_endpoint needs a cylinder form")
    values = {ref: specialize(value, {"t": end, "dt": 0}) for ref, value in form.value_data}
    return SullivanForm.build(form.space, values)


def extend_to_cylinder(form: SullivanForm) -> SullivanForm:
    """The same form with the cylinder variables adjoined (constant in t)."""
    if form.cylinder:
        return form
    values = {}
    for ref, value in form.value_data:
        table = coordinate_table(ref.dim, True)
        values[ref] = SuperPolynomial(table, {
            Monomial(m.evens + (0,), m.odds): c for m, c in value.terms.items()
        }, value.domain)
    return SullivanForm.build(form.space, values, cylinder=True)


def monomial_basis(table: VariableTable, k: int, polydeg: int) -> List[Monomial]:
    """Monomials with exactly k odd factors and even degree at most ``polydeg``."""
    if k > len(table.odds):
        return []
    evens = [e for e in product(range(polydeg + 1), repeat=len(table.evens)) if sum(e) <= polydeg]
    return [Monomial(tuple(e), odds) for e in evens for odds in combinations(range(len(table.odds)), k)]


@lru_cache(maxsize=64)
def compatible_form_basis(space: SimplicialSet, k: int, polydeg: int, cylinder: bool = False) -> Tuple[SullivanForm, ...]:
    """A basis of the compatible k-forms whose coefficients have degree ≤ ``polydeg``.

    The compatibility conditions are linear in the coefficients; the basis is
    the exact rational nullspace of that system.
    """
    guard_cells(space)
    unknowns: List[Tuple[SimplexRef, Monomial]] = []
    for ref in space.all_refs():
        unknowns.extend((ref, m) for m in monomial_basis(coordinate_table(ref.dim, cylinder), k, polydeg))
    if not unknowns:
        return ()
    column = {unknown: position for position, unknown in enumerate(unknowns)}
    rows: Dict[tuple, Dict[int, object]] = {}

    def record(key, value: SuperPolynomial, position: int, sign: int):
        for monomial, coeff in value.terms.items():
            row = rows.setdefault(key + (monomial,), {})
            row[position] = row.get(position, QQ.zero) + (coeff if sign > 0 else -coeff)

    with log_duration("compatible_form_basis", {"space": space.name, "degree": k, "polydeg": polydeg}):
        for ref in space.all_refs():
            table = coordinate_table(ref.dim, cylinder)
            for i in range(ref.dim + 1 if ref.dim else 0):
                face = face_of(space, Simplex.of(ref), i)
                restrict = operator_map(coface_array(i, ref.dim), ref.dim, cylinder)
                extend = operator_map(face.eta, face.core.dim, cylinder)
                for monomial in monomial_basis(table, k, polydeg):
                    unit = SuperPolynomial(table, {monomial: QQ.one})
                    record((ref, i), restrict(unit), column[(ref, monomial)], 1)
                face_table = coordinate_table(face.core.dim, cylinder)
                for monomial in monomial_basis(face_table, k, polydeg):
                    unit = SuperPolynomial(face_table, {monomial: QQ.one})
                    record((ref, i), extend(unit), column[(face.core, monomial)], -1)

        width = len(unknowns)
        dense = [[entries.get(c, QQ.zero) for c in range(width)] for entries in rows.values()]
        dense = [row for row in dense if any(row)]
        if dense:
            kernel = DomainMatrix(dense, (len(dense), width), QQ).nullspace().to_list()
        else:
            kernel = [[QQ.one if r == c else QQ.zero for c in range(width)] for r in range(width)]

    basis = []
    for vector in kernel:
        values: Dict[SimplexRef, dict] = {}
        for position, coeff in enumerate(vector):
            if coeff:
                ref, monomial = unknowns[position]
                values.setdefault(ref, {})[monomial] = coeff
        basis.append(SullivanForm.build(space, {
            ref: SuperPolynomial(coordinate_table(ref.dim, cylinder), terms) for ref, terms in values.items()
        }, cylinder))
    log_info(
        f"Compatible {k}-forms on {space} up to degree {polydeg}: dimension {len(basis)}",
        {"space": space.name, "degree": k, "polydeg": polydeg, "dimension": len(basis)},
    )
    return tuple(basis)


def combine(space: SimplicialSet, basis: Iterable[SullivanForm], coefficients: Iterable, cylinder: bool = False) -> SullivanForm:
    result = SullivanForm.zero(space, cylinder)
    for form, coeff in zip(basis, coefficients):
        if coeff:
            result = add(result, scale(form, coeff))
    return result


def random_form(space: SimplicialSet, degree: int, polydeg_bound: int = None, seed=0, cylinder: bool = False) -> SullivanForm:
    """A seeded compatible form: integer combination (entries in [-3, 3]) of the compatible basis."""
    if degree < 0:
        raise InfeasibleDegreeError(f"Form degree {degree} is negative")
    if polydeg_bound is None:
        polydeg_bound = settings.SUPERPOINT_POLYDEG_BOUND
    if degree > space.dimension + (1 if cylinder else 0):
        return SullivanForm.zero(space, cylinder)
    rng = random.Random(seed)
    basis = compatible_form_basis(space, degree, polydeg_bound, cylinder)
    return combine(space, basis, [rng.randint(-3, 3) for _ in basis], cylinder)


def global_functions_ring_check(space: SimplicialSet, polydeg: int = 1) -> dict:
    """Check that compatible families are closed under add, wedge and d.

    Uses every pair of basis forms of degree ≤ 1 with coefficients of
    degree ≤ ``polydeg``.
    """
    generators = []
    for k in range(min(space.dimension, 1) + 1):
        generators.extend(compatible_form_basis(space, k, polydeg))
    closure = {"add": True, "wedge": True, "differential": True}
    violations = []
    for a in generators:
        if not check_compatibility(differential(a))["compatible"]:
            closure["differential"] = False
            violations.append("differential")
        for b in generators:
            for operation, combined in (("add", add(a, b)), ("wedge", wedge(a, b))):
                if not check_compatibility(combined)["compatible"]:
                    closure[operation] = False
                    violations.append(operation)
    functions = len(compatible_form_basis(space, 0, 0))
    return {
        "space": space.name,
        "generators": len(generators),
        "constant_functions": functions,
        "closed_under": closure,
        "valid": all(closure.values()),
        "violations": sorted(set(violations)),
    }
