"""Actions of the superpoint monoids on A^{1|1} = Spec Q[y, e].

An action of a monoid with function ring Q[x, d] (x even, d odd) is
determined by

    μ*(y) = f0(x, y) + f1(x, y) d e,    μ*(e) = g0(x, y) e + g1(x, y) d

and must satisfy coassociativity and the unit condition. Three monoids are
covered: the full one (m*(x) = x1 x2, m*(d) = d1 + x1 d2), its Z/2 quotient
(x^2 = 1) and the odd line (x = 1, m*(d) = d1 + d2).

The closed-form families and a bounded exhaustive search that confirms them
live here too.
"""
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

from django.conf import settings
from sympy import isprime
from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

from ..exceptions import ConstraintViolationError, SearchBoundError
from ..logging_utils import log_duration, log_info, log_warning
from .superalg_service import (
    AlgebraMap,
    Monomial,
    SuperPolynomial,
    VariableTable,
    prime_field,
    render,
    specialize,
    split_terms,
)

CANDIDATE_TABLE = VariableTable(("x", "y"))
SOLVER_NODE_LIMIT = 20000
PROJECTIVE_POINT_LIMIT = 2000
GRID_POINT_LIMIT = 50000


class Monoid(Enum):
    FULL = "full"
    Z2 = "z2"
    ODD = "odd"

    @classmethod
    def parse(cls, value) -> "Monoid":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ConstraintViolationError(f"Unknown monoid '{value}' (expected full, z2 or odd)") from None


@dataclass(frozen=True)
class ActionCandidate:
    f0: SuperPolynomial
    f1: SuperPolynomial
    g0: SuperPolynomial
    g1: SuperPolynomial

    @property
    def domain(self):
        return self.f0.domain

    @classmethod
    def from_coefficients(cls, f0: Dict, f1: Dict = None, g0: Dict = None, g1: Dict = None, domain=QQ):
        """Build from ``{(i, j): coeff}`` maps for the coefficient of x^i y^j."""
        return cls(*(candidate_polynomial(terms or {}, domain) for terms in (f0, f1, g0, g1)))

    @classmethod
    def identity(cls, domain=QQ) -> "ActionCandidate":
        return cls.from_coefficients({(0, 1): 1}, {}, {(0, 0): 1}, {}, domain)

    def polynomials(self) -> Tuple[SuperPolynomial, ...]:
        return self.f0, self.f1, self.g0, self.g1

    def sort_key(self):
        return tuple(render(p) for p in self.polynomials())

    def as_dict(self) -> dict:
        return {name: render(p) for name, p in zip(("f0", "f1", "g0", "g1"), self.polynomials())}


def candidate_polynomial(terms: Dict[Tuple[int, int], object], domain=QQ) -> SuperPolynomial:
    return SuperPolynomial.from_terms(CANDIDATE_TABLE, [(coeff, exps, ()) for exps, coeff in terms.items()], domain)


def coefficient(p: SuperPolynomial, i: int, j: int):
    """Coefficient of x^i y^j in a polynomial whose last two evens are x, y."""
    prefix = (0,) * (len(p.table.evens) - 2)
    return p.terms.get(Monomial(prefix + (i, j), ()), p.domain.zero)


def reduce_x(p: SuperPolynomial, names: Sequence[str]) -> SuperPolynomial:
    """Reduce the exponents of the named even variables modulo 2 (x^2 = 1)."""
    positions = [p.table.evens.index(name) for name in names if name in p.table.evens]
    reduced: Dict[Monomial, object] = {}
    for monomial, coeff in p.terms.items():
        evens = list(monomial.evens)
        for position in positions:
            evens[position] %= 2
        key = Monomial(tuple(evens), monomial.odds)
        reduced[key] = reduced.get(key, p.domain.zero) + coeff
    return SuperPolynomial(p.table, reduced, p.domain)


@lru_cache(maxsize=32)
def _tables(params: Tuple[str, ...]):
    candidate = VariableTable(params + ("x", "y"))
    action = VariableTable(params + ("y", "x"), ("e", "d"))
    triple = VariableTable(params + ("y", "x1", "x2"), ("e", "d1", "d2"))
    unit = VariableTable(params + ("y",), ("e",))
    return candidate, action, triple, unit


@dataclass(frozen=True)
class ActionDefects:
    y: SuperPolynomial
    e: SuperPolynomial
    unit_y: SuperPolynomial
    unit_e: SuperPolynomial

    @property
    def coassociative(self) -> bool:
        return self.y.is_zero and self.e.is_zero

    @property
    def unital(self) -> bool:
        return self.unit_y.is_zero and self.unit_e.is_zero


def action_defects(f0, f1, g0, g1, monoid: Monoid, params: Tuple[str, ...] = ()) -> ActionDefects:
    """Both coassociativity paths minus each other, plus the unit defects.

    The polynomials may carry extra even ``params`` (unknown coefficients);
    they pass through every map unchanged.
    """
    domain = f0.domain
    candidate, action, triple, unit = _tables(tuple(params))

    def gen(table, name):
        return SuperPolynomial.generator(table, name, domain)

    lift = AlgebraMap.from_mapping(candidate, action, {}, domain)
    mu_y = lift(f0) + lift(f1) * gen(action, "d") * gen(action, "e")
    mu_e = lift(g0) * gen(action, "e") + lift(g1) * gen(action, "d")
    if monoid is Monoid.ODD:
        x1 = x2 = x12 = 1
        split_d = gen(triple, "d1") + gen(triple, "d2")
    else:
        x1, x2 = gen(triple, "x1"), gen(triple, "x2")
        x12 = x1 * x2
        split_d = gen(triple, "d1") + x1 * gen(triple, "d2")
    # (1 ⊗ m*) after μ*
    comultiplied = AlgebraMap.from_mapping(action, triple, {"x": x12, "d": split_d}, domain)
    # (μ* ⊗ 1) after μ*: the inner action uses the first leg
    first_leg = AlgebraMap.from_mapping(action, triple, {"x": x1, "d": gen(triple, "d1")}, domain)
    iterated = AlgebraMap.from_mapping(action, triple, {
        "y": first_leg(mu_y), "e": first_leg(mu_e), "x": x2, "d": gen(triple, "d2"),
    }, domain)
    defect_y = iterated(mu_y) - comultiplied(mu_y)
    defect_e = iterated(mu_e) - comultiplied(mu_e)
    if monoid is Monoid.Z2:
        defect_y, defect_e = reduce_x(defect_y, ("x1", "x2")), reduce_x(defect_e, ("x1", "x2"))
    counit = AlgebraMap.from_mapping(action, unit, {"x": 1, "d": 0}, domain)
    return ActionDefects(
        defect_y,
        defect_e,
        counit(mu_y) - gen(unit, "y"),
        counit(mu_e) - gen(unit, "e"),
    )


def verify_action(candidate: ActionCandidate, monoid) -> dict:
    """Expand both coassociativity paths and the unit condition; report the first discrepancy."""
    monoid = Monoid.parse(monoid)
    if monoid is Monoid.ODD and any(m.evens[0] for p in candidate.polynomials() for m in p.terms):
        return {"valid": False, "coassociative": {"y": False, "e": False}, "unit": False,
                "discrepancy": "x does not occur for the odd monoid"}
    defects = action_defects(*candidate.polynomials(), monoid)
    discrepancy = None
    for label, defect in (("unit y", defects.unit_y), ("unit e", defects.unit_e), ("y", defects.y), ("e", defects.e)):
        if not defect.is_zero:
            discrepancy = f"{label}: {render(defect)} != 0"
            break
    return {
        "valid": discrepancy is None,
        "coassociative": {"y": defects.y.is_zero, "e": defects.e.is_zero},
        "unit": defects.unital,
        "discrepancy": discrepancy,
    }


def conjugate_action(candidate: ActionCandidate, shift, monoid=Monoid.FULL) -> ActionCandidate:
    """Conjugate by y -> y + shift: μ'(g) = ψ(μ*(φ(g))) with φ(y) = y + shift, ψ(y) = y - shift."""
    domain = candidate.domain
    y = SuperPolynomial.generator(CANDIDATE_TABLE, "y", domain)
    back = AlgebraMap.from_mapping(CANDIDATE_TABLE, CANDIDATE_TABLE, {"y": y - shift}, domain)
    f0, f1, g0, g1 = (back(p) for p in candidate.polynomials())
    result = ActionCandidate(f0 + shift, f1, g0, g1)
    if Monoid.parse(monoid) is Monoid.Z2:
        result = ActionCandidate(*(reduce_x(p, ("x",)) for p in result.polynomials()))
    return result


def normalize_action(candidate: ActionCandidate, monoid=Monoid.FULL) -> Tuple[ActionCandidate, object]:
    """Conjugate so that f0 has no constant term; returns the candidate and the shift c."""
    shift = -coefficient(candidate.f0, 0, 0)
    return conjugate_action(candidate, shift, monoid), shift


# --- families ---------------------------------------------------------------------


def f1_allowed(monoid: Monoid, k: int, n: int, m: int) -> bool:
    if monoid is Monoid.FULL:
        return k + 1 == n + m * k
    if monoid is Monoid.Z2:
        return (k + 1 - n - m * k) % 2 == 0
    return True


def g1_allowed(monoid: Monoid, k: int, n: int, m: int) -> bool:
    if monoid is Monoid.FULL:
        return n + 1 == k * m
    if monoid is Monoid.Z2:
        return (n + 1 - k * m) % 2 == 0
    return True


@dataclass(frozen=True)
class ActionFamily:
    """A closed-form action: f0 = x^k y, g0 = x^n and at most one of f1, g1.

    ``terms`` lists (m, coefficient) for f1 = x^k Σ a_m y^m or
    g1 = x^n Σ b_m y^m, depending on ``kind``.
    """

    monoid: Monoid
    kind: str
    k: int
    n: int
    terms: Tuple[Tuple[int, object], ...] = ()

    def candidate(self, domain=QQ) -> ActionCandidate:
        f1 = {(self.k, m): c for m, c in self.terms} if self.kind == "f1" else {}
        g1 = {(self.n, m): c for m, c in self.terms} if self.kind == "g1" else {}
        return ActionCandidate.from_coefficients({(self.k, 1): 1}, f1, {(self.n, 0): 1}, g1, domain)

    def describe(self) -> str:
        text = f"y -> x^{self.k} y, e -> x^{self.n} e"
        if self.kind == "f1":
            text += f", f1 = x^{self.k} * ({' + '.join(f'{c}*y^{m}' for m, c in self.terms)})"
        elif self.kind == "g1":
            text += f", g1 = x^{self.n} * ({' + '.join(f'{c}*y^{m}' for m, c in self.terms)})"
        return text


def _exponent_range(monoid: Monoid, bound: int) -> range:
    if monoid is Monoid.ODD:
        return range(1)
    if monoid is Monoid.Z2:
        return range(min(bound, 1) + 1)
    return range(bound + 1)


def enumerate_families(monoid, max_k: int = 3, max_n: int = 3, max_m: int = 3, scalars: Sequence = (1, -1)) -> List[ActionFamily]:
    """All family instances within the bounds.

    The full monoid uses single monomials (k+1 = n+mk, n+1 = km); for the
    Z/2 and odd monoids every polynomial in the allowed powers of y with
    coefficients from ``scalars`` is listed.
    """
    monoid = Monoid.parse(monoid)
    scalars = [s for s in scalars if s]
    families = []
    for k in _exponent_range(monoid, max_k):
        for n in _exponent_range(monoid, max_n):
            families.append(ActionFamily(monoid, "degree", k, n))
            for kind, allowed in (("f1", f1_allowed), ("g1", g1_allowed)):
                powers = [m for m in range(max_m + 1) if allowed(monoid, k, n, m)]
                if monoid is Monoid.FULL:
                    families.extend(ActionFamily(monoid, kind, k, n, ((m, s),)) for m in powers for s in scalars)
                    continue
                for choice in product([0] + scalars, repeat=len(powers)):
                    terms = tuple((m, c) for m, c in zip(powers, choice) if c)
                    if terms:
                        families.append(ActionFamily(monoid, kind, k, n, terms))
    log_info(f"Enumerated {len(families)} {monoid.value} action families", {"monoid": monoid.value})
    return families


@dataclass(frozen=True)
class FamilyMatch:
    kind: str
    k: int
    n: int
    shift: object
    powers: Tuple[int, ...]


def _single_term(p: SuperPolynomial) -> Optional[Tuple[int, int]]:
    if len(p.terms) != 1:
        return None
    (monomial, coeff), = p.terms.items()
    if coeff != p.domain.one:
        return None
    return monomial.evens[0], monomial.evens[1]


def match_family(candidate: ActionCandidate, monoid) -> Optional[FamilyMatch]:
    """Match a candidate, after normalizing y -> y + c, against the closed-form families."""
    monoid = Monoid.parse(monoid)
    if monoid is Monoid.Z2:
        candidate = ActionCandidate(*(reduce_x(p, ("x",)) for p in candidate.polynomials()))
    normalized, shift = normalize_action(candidate, monoid)
    f0_shape, g0_shape = _single_term(normalized.f0), _single_term(normalized.g0)
    if f0_shape is None or f0_shape[1] != 1 or g0_shape is None or g0_shape[1] != 0:
        return None
    k, n = f0_shape[0], g0_shape[0]
    f1, g1 = normalized.f1, normalized.g1
    if not f1.is_zero and not g1.is_zero:
        return None
    if not f1.is_zero:
        kind, exponent, polynomial, allowed = "f1", k, f1, f1_allowed
    elif not g1.is_zero:
        kind, exponent, polynomial, allowed = "g1", n, g1, g1_allowed
    else:
        return FamilyMatch("degree", k, n, shift, ())
    powers = []
    for monomial in polynomial.terms:
        i, m = monomial.evens
        if i != exponent or not allowed(monoid, k, n, m):
            return None
        powers.append(m)
    return FamilyMatch(kind, k, n, shift, tuple(sorted(powers)))


def monomial_lemma_check(p: SuperPolynomial) -> bool:
    """Whether p(x1 x2) = p(x1) p(x2); a nonzero multiplicative p must be a monomial x^n."""
    if len(p.table.evens) != 1 or p.table.odds:
        raise ConstraintViolationError("monomial_lemma_check takes a polynomial in one even variable")
    domain = p.domain
    source = p.table
    (name,) = source.evens
    double = VariableTable((f"{name}1", f"{name}2"))
    x1, x2 = (SuperPolynomial.generator(double, n, domain) for n in double.evens)
    product_map = AlgebraMap(source, double, (x1 * x2,), domain)
    left_map = AlgebraMap(source, double, (x1,), domain)
    right_map = AlgebraMap(source, double, (x2,), domain)
    multiplicative = product_map(p) == left_map(p) * right_map(p)
    if multiplicative and not p.is_zero:
        if len(p.terms) != 1 or next(iter(p.terms.values())) != domain.one:
            raise ConstraintViolationError(f"{render(p)} is multiplicative but not a monomial")
    return multiplicative


# --- bounded exhaustive search ----------------------------------------------------


@dataclass(frozen=True)
class PartialSolution:
    assignment: Tuple[Tuple[str, object], ...]
    free: Tuple[str, ...]


def _variables(p: SuperPolynomial) -> set:
    return {p.table.evens[i] for m in p.terms for i, e in enumerate(m.evens) if e}


def _evaluate_univariate(p: SuperPolynomial, value):
    total = p.domain.zero
    for monomial, coeff in p.terms.items():
        total += coeff * value ** sum(monomial.evens)
    return total


def solve_system(groups: Sequence[SuperPolynomial], unknowns: Sequence[str], values: Sequence) -> List[PartialSolution]:
    """All assignments from ``values`` annihilating every group polynomial.

    Univariate groups are solved by evaluation and propagated first;
    unknowns that end up in no group are reported as free.
    """
    results: List[PartialSolution] = []
    visited = [0]

    def descend(pending: List[SuperPolynomial], assignment: Dict[str, object]):
        visited[0] += 1
        if visited[0] > SOLVER_NODE_LIMIT:
            raise SearchBoundError(f"Search exceeded {SOLVER_NODE_LIMIT} solver nodes")
        live = []
        for group in pending:
            if group.is_zero:
                continue
            if not _variables(group):
                return
            live.append(group)
        choice = None
        for group in live:
            names = _variables(group)
            if len(names) != 1:
                continue
            roots = [v for v in values if not _evaluate_univariate(group, v)]
            if not roots:
                return
            if len(roots) == len(values):
                continue
            if choice is None or len(roots) < len(choice[1]):
                choice = (names.pop(), roots)
            if len(roots) == 1:
                break
        if choice is None:
            counts = Counter(name for group in live for name in sorted(_variables(group)))
            if not counts:
                free = tuple(name for name in unknowns if name not in assignment)
                results.append(PartialSolution(tuple(sorted(assignment.items())), free))
                return
            choice = (counts.most_common(1)[0][0], list(values))
        name, roots = choice
        for value in roots:
            descend([specialize(group, {name: value}) for group in live], {**assignment, name: value})

    descend(list(groups), {})
    return results


def _groups(defects: Sequence[SuperPolynomial], params: Tuple[str, ...]) -> List[SuperPolynomial]:
    unknown_table = VariableTable(params)
    groups = []
    for defect in defects:
        groups.extend(split_terms(defect, unknown_table).values())
    return groups


def _unit_polynomial(prefix: str, slots_x: range, slots_y: range, unit_value, params: Tuple[str, ...], domain):
    """Σ c_ij x^i y^j with unknown c_ij (i ≥ 1); c_0j is fixed by p(1, y) = unit_value(j)."""
    table = _tables(params)[0]

    def gen(name):
        return SuperPolynomial.generator(table, name, domain)

    x, y = gen("x"), gen("y")
    total = SuperPolynomial.zero(table, domain)
    for j in slots_y:
        rest = SuperPolynomial.constant(table, unit_value(j), domain)
        for i in slots_x:
            if i == 0:
                continue
            term = gen(f"{prefix}_{i}_{j}")
            rest = rest - term
            total = total + term * x ** i * y ** j
        total = total + rest * y ** j
    return total


def _unknown_names(prefix: str, slots_x: range, slots_y: range, skip_zero: bool) -> Tuple[str, ...]:
    return tuple(f"{prefix}_{i}_{j}" for j in slots_y for i in slots_x if not (skip_zero and i == 0))


def _lift(p: SuperPolynomial, params: Tuple[str, ...]) -> SuperPolynomial:
    return AlgebraMap.from_mapping(CANDIDATE_TABLE, _tables(params)[0], {}, p.domain)(p)


def _expand_free(solution: PartialSolution, values: Sequence) -> List[Dict[str, object]]:
    if len(values) ** len(solution.free) > GRID_POINT_LIMIT:
        raise SearchBoundError(f"{len(solution.free)} free coefficients are too many to enumerate")
    base = dict(solution.assignment)
    return [{**base, **dict(zip(solution.free, choice))} for choice in product(values, repeat=len(solution.free))]


def _in_grid(p: SuperPolynomial, grid: Sequence) -> bool:
    return all(c in grid for c in p.terms.values())


@dataclass(frozen=True)
class SolutionSpace:
    """Actions with fixed f0, g0 and f1, g1 ranging over spans.

    ``exclusive`` marks spaces where f1 ranges over its span minus zero
    and g1 = 0. ``count`` already includes the shift orbit of f0.
    """

    f0: SuperPolynomial
    g0: SuperPolynomial
    f1_basis: Tuple[SuperPolynomial, ...]
    g1_basis: Tuple[SuperPolynomial, ...]
    orbit_size: int
    count: int
    exclusive: bool = False
    family: Optional[str] = None

    def as_dict(self) -> dict:
        return {
            "f0": render(self.f0),
            "g0": render(self.g0),
            "f1_span": [render(p) for p in self.f1_basis],
            "g1_span": [render(p) for p in self.g1_basis],
            "f1_nonzero": self.exclusive,
            "shift_orbit": self.orbit_size,
            "count": self.count,
            "family": self.family,
        }


@dataclass(frozen=True)
class SearchReport:
    monoid: Monoid
    degree: int
    field: Optional[int]
    grid: Optional[Tuple[int, ...]]
    spaces: Tuple[SolutionSpace, ...]
    candidates: Tuple[ActionCandidate, ...]
    total: int
    unmatched: Tuple[str, ...]

    def as_dict(self) -> dict:
        return {
            "monoid": self.monoid.value,
            "degree": self.degree,
            "field": self.field,
            "grid": list(self.grid) if self.grid else None,
            "total": self.total,
            "spaces": [space.as_dict() for space in self.spaces],
            "candidates": [candidate.as_dict() for candidate in self.candidates],
            "unmatched": list(self.unmatched),
        }


def _bounds(monoid: Monoid, degree: int) -> Tuple[range, range]:
    # y-degree at least 1 so that the identity action is representable
    return _exponent_range(monoid, degree), range(max(degree, 1) + 1)


def _solve_f0(monoid, slots_x, slots_y, values, domain) -> List[PartialSolution]:
    names = _unknown_names("a", slots_x, slots_y, skip_zero=True)
    f0 = _unit_polynomial("a", slots_x, slots_y, lambda j: 1 if j == 1 else 0, names, domain)
    zero = SuperPolynomial.zero(f0.table, domain)
    one = SuperPolynomial.constant(f0.table, 1, domain)
    defects = action_defects(f0, zero, one, zero, monoid, names)
    return [(f0, solution) for solution in solve_system(_groups([defects.y], names), names, values)]


def _solve_g0(monoid, f0: SuperPolynomial, slots_x, slots_y, values, domain):
    names = _unknown_names("b", slots_x, slots_y, skip_zero=True)
    g0 = _unit_polynomial("b", slots_x, slots_y, lambda j: 1 if j == 0 else 0, names, domain)
    zero = SuperPolynomial.zero(g0.table, domain)
    defects = action_defects(_lift(f0, names), zero, g0, zero, monoid, names)
    return g0, solve_system(_groups([defects.e], names), names, values)


@dataclass
class _LinearSystem:
    f1_names: Tuple[str, ...]
    g1_names: Tuple[str, ...]
    rows_f: List[List]
    rows_g: List[List]
    bilinear: List[List[List]]


def _linear_system(monoid, f0, g0, slots_x, slots_y, domain) -> Optional[_LinearSystem]:
    """Equations on f1 (unknowns u) and g1 (unknowns w) once f0 and g0 are fixed."""
    u_names = _unknown_names("u", slots_x, slots_y, skip_zero=False)
    w_names = _unknown_names("w", slots_x, slots_y, skip_zero=False)
    params = u_names + w_names
    table = _tables(params)[0]
    x, y = (SuperPolynomial.generator(table, name, domain) for name in ("x", "y"))

    def generic(prefix):
        total = SuperPolynomial.zero(table, domain)
        for j in slots_y:
            for i in slots_x:
                total = total + SuperPolynomial.generator(table, f"{prefix}_{i}_{j}", domain) * x ** i * y ** j
        return total

    f1, g1 = generic("u"), generic("w")
    defects = action_defects(_lift(f0, params), f1, _lift(g0, params), g1, monoid, params)
    n_u = len(u_names)
    rows_f, rows_g, bilinear = [], [], []
    for group in _groups([defects.y, defects.e], params):
        linear_u = [domain.zero] * n_u
        linear_w = [domain.zero] * len(w_names)
        pairs = [[domain.zero] * len(w_names) for _ in range(n_u)]
        constant = domain.zero
        for monomial, coeff in group.terms.items():
            used = [(i, e) for i, e in enumerate(monomial.evens) if e]
            if not used:
                constant = coeff
            elif len(used) == 1 and used[0][1] == 1 and used[0][0] < n_u:
                linear_u[used[0][0]] = coeff
            elif len(used) == 1 and used[0][1] == 1:
                linear_w[used[0][0] - n_u] = coeff
            elif len(used) == 2 and all(e == 1 for _, e in used) and used[0][0] < n_u <= used[1][0]:
                pairs[used[0][0]][used[1][0] - n_u] = coeff
            else:
                raise SearchBoundError("f1/g1 equations are not bilinear")
        has_u, has_w, has_pair = any(linear_u), any(linear_w), any(any(row) for row in pairs)
        if constant:
            return None
        if has_pair and (has_u or has_w) or (has_u and has_w):
            raise SearchBoundError("Mixed f1/g1 equation rows are outside the search envelope")
        if has_u:
            rows_f.append(linear_u)
        elif has_w:
            rows_g.append(linear_w)
        elif has_pair:
            bilinear.append(pairs)
    return _LinearSystem(u_names, w_names, rows_f, rows_g, bilinear)


def _nullspace(rows: List[List], width: int, domain) -> List[List]:
    if not width:
        return []
    if not rows:
        return [[domain.one if r == c else domain.zero for c in range(width)] for r in range(width)]
    return DomainMatrix(rows, (len(rows), width), domain).nullspace().to_list()


def _from_vector(names: Tuple[str, ...], vector: Sequence, domain) -> SuperPolynomial:
    terms = {}
    for name, value in zip(names, vector):
        if value:
            _, i, j = name.split("_")
            terms[(int(i), int(j))] = value
    return candidate_polynomial(terms, domain)


def _combine(basis: Sequence[Sequence], coordinates: Sequence, width: int, domain) -> List:
    vector = [domain.zero] * width
    for row, c in zip(basis, coordinates):
        if c:
            vector = [v + c * r for v, r in zip(vector, row)]
    return vector


def _bilinear_value(system: _LinearSystem, row: List[List], u: Sequence, w: Sequence, domain):
    total = domain.zero
    for a, u_a in enumerate(u):
        if u_a:
            for b, w_b in enumerate(w):
                if w_b and row[a][b]:
                    total += row[a][b] * u_a * w_b
    return total


def _projective_points(dimension: int, values: Sequence, domain):
    one = domain.one
    for lead in range(dimension):
        for tail in product(values, repeat=dimension - lead - 1):
            yield [domain.zero] * lead + [one] + list(tail)


def _field_spaces(system: _LinearSystem, f0, g0, orbit: int, p: int, domain) -> List[SolutionSpace]:
    u_width, w_width = len(system.f1_names), len(system.g1_names)
    V_f = _nullspace(system.rows_f, u_width, domain)
    V_g = _nullspace(system.rows_g, w_width, domain)
    f_basis = tuple(_from_vector(system.f1_names, v, domain) for v in V_f)
    g_basis = tuple(_from_vector(system.g1_names, v, domain) for v in V_g)
    spaces = [SolutionSpace(f0, g0, (), g_basis, orbit, orbit * p ** len(V_g))]
    if not V_f:
        return spaces
    if not V_g or not system.bilinear:
        if not V_g:
            return [SolutionSpace(f0, g0, f_basis, (), orbit, orbit * p ** len(V_f))]
        return [SolutionSpace(f0, g0, f_basis, g_basis, orbit, orbit * p ** (len(V_f) + len(V_g)))]
    count = (p ** len(V_f) - 1) // (p - 1)
    if count > PROJECTIVE_POINT_LIMIT:
        raise SearchBoundError(f"{count} projective points exceed the search envelope")
    values = [domain.convert(v) for v in range(p)]
    exclusive_lines = 0
    for point in _projective_points(len(V_f), values, domain):
        u = _combine(V_f, point, u_width, domain)
        # B(u, w) = 0 is linear in the V_g coordinates of w
        rows = [[_bilinear_value(system, row, u, w, domain) for w in V_g] for row in system.bilinear]
        kernel = _nullspace([r for r in rows if any(r)], len(V_g), domain)
        if not kernel:
            exclusive_lines += 1
            continue
        w_basis = tuple(_from_vector(system.g1_names, _combine(V_g, k, w_width, domain), domain) for k in kernel)
        spaces.append(SolutionSpace(f0, g0, (_from_vector(system.f1_names, u, domain),), w_basis, orbit,
                                    orbit * (p - 1) * p ** len(kernel)))
    if exclusive_lines == count:
        spaces.append(SolutionSpace(f0, g0, f_basis, (), orbit, orbit * (p ** len(V_f) - 1), exclusive=True))
    elif exclusive_lines:
        # lines with W_u = 0 that are not the whole projective space stay listed one by one
        for point in _projective_points(len(V_f), values, domain):
            u = _combine(V_f, point, u_width, domain)
            rows = [[_bilinear_value(system, row, u, w, domain) for w in V_g] for row in system.bilinear]
            if not _nullspace([r for r in rows if any(r)], len(V_g), domain):
                spaces.append(SolutionSpace(f0, g0, (_from_vector(system.f1_names, u, domain),), (), orbit,
                                            orbit * (p - 1), exclusive=True))
    return spaces


def _grid_vectors(basis: List[List], width: int, grid: Sequence) -> List[List]:
    """Points of span(basis) whose entries all lie in the grid."""
    if not basis:
        return [[QQ.zero] * width]
    reduced, pivots = DomainMatrix(basis, (len(basis), width), QQ).rref()
    rows = reduced.to_list()[:len(pivots)]
    if len(grid) ** len(rows) > GRID_POINT_LIMIT:
        raise SearchBoundError("Grid enumeration exceeds the search envelope")
    points = []
    for choice in product(grid, repeat=len(rows)):
        vector = _combine(rows, choice, width, QQ)
        if all(v in grid for v in vector):
            points.append(vector)
    return points


def _grid_candidates(system: _LinearSystem, f0, g0, grid: Sequence) -> List[ActionCandidate]:
    u_width, w_width = len(system.f1_names), len(system.g1_names)
    us = _grid_vectors(_nullspace(system.rows_f, u_width, QQ), u_width, grid)
    ws = _grid_vectors(_nullspace(system.rows_g, w_width, QQ), w_width, grid)
    found = []
    for u in us:
        for w in ws:
            if all(not _bilinear_value(system, row, u, w, QQ) for row in system.bilinear):
                found.append(ActionCandidate(f0, _from_vector(system.f1_names, u, QQ), g0,
                                             _from_vector(system.g1_names, w, QQ)))
    return found


def _space_family(space: SolutionSpace, monoid: Monoid) -> Optional[str]:
    """Family of every member of the space, judged on the supports of its spans."""
    if space.f1_basis and space.g1_basis:
        return None
    zero = space.f0 * 0
    samples = [ActionCandidate(space.f0, p, space.g0, zero) for p in space.f1_basis]
    samples += [ActionCandidate(space.f0, zero, space.g0, p) for p in space.g1_basis]
    samples = samples or [ActionCandidate(space.f0, zero, space.g0, zero)]
    if any(match_family(sample, monoid) is None for sample in samples):
        return None
    if space.f1_basis:
        return "f1"
    return "g1" if space.g1_basis else "degree"


def exhaustive_search(monoid, degree: int, field: int = None, grid: Sequence[int] = None) -> SearchReport:
    """All actions whose four polynomials have degree ≤ degree in x and in y.

    Over F_p the f0 solutions are folded into shift orbits and f1, g1 are
    reported as solution spaces; over an integer grid every point is listed.
    """
    monoid = Monoid.parse(monoid)
    if degree < 0 or degree > settings.SUPERPOINT_SEARCH_MAX_DEGREE:
        raise SearchBoundError(f"Degree bound {degree} outside 0..{settings.SUPERPOINT_SEARCH_MAX_DEGREE}")
    if grid is None:
        field = field or settings.SUPERPOINT_SEARCH_FIELD
        if not isprime(field) or field <= degree:
            raise SearchBoundError(f"Search field must be a prime larger than the degree bound, got {field}")
        domain = prime_field(field)
        values = [domain.convert(v) for v in range(field)]
    else:
        domain = QQ
        values = [QQ.convert(v) for v in sorted(set(grid))]
    slots_x, slots_y = _bounds(monoid, degree)
    context = {"monoid": monoid.value, "degree": degree, "field": field, "grid": str(grid)}
    spaces: List[SolutionSpace] = []
    candidates: List[ActionCandidate] = []
    unmatched: List[str] = []
    with log_duration("exhaustive_search", context):
        # f0: shift orbits over a field, explicit points on a grid
        f0_solutions: Dict[SuperPolynomial, int] = {}
        for template, solution in _solve_f0(monoid, slots_x, slots_y, values, domain):
            if grid is None:
                rep = specialize(template, {**dict(solution.assignment), **{n: 0 for n in solution.free}})
                normalized, _ = normalize_action(ActionCandidate(rep, rep * 0, rep, rep * 0), monoid)
                f0_solutions[normalized.f0] = f0_solutions.get(normalized.f0, 0) + len(values) ** len(solution.free)
            else:
                for assignment in _expand_free(solution, values):
                    point = specialize(template, assignment)
                    if _in_grid(point, values):
                        f0_solutions[point] = 1
        for f0 in sorted(f0_solutions, key=render):
            orbit = f0_solutions[f0]
            template, solutions = _solve_g0(monoid, f0, slots_x, slots_y, values, domain)
            g0_points = set()
            for solution in solutions:
                for assignment in _expand_free(solution, values):
                    point = specialize(template, assignment)
                    if grid is None or _in_grid(point, values):
                        g0_points.add(point)
            for g0 in sorted(g0_points, key=render):
                system = _linear_system(monoid, f0, g0, slots_x, slots_y, domain)
                if system is None:
                    continue
                if grid is None:
                    for space in _field_spaces(system, f0, g0, orbit, field, domain):
                        family = _space_family(space, monoid)
                        spaces.append(SolutionSpace(space.f0, space.g0, space.f1_basis, space.g1_basis,
                                                    space.orbit_size, space.count, space.exclusive, family))
                        if family is None:
                            unmatched.append(str(space.as_dict()))
                else:
                    for candidate in _grid_candidates(system, f0, g0, values):
                        candidates.append(candidate)
                        if match_family(candidate, monoid) is None:
                            unmatched.append(str(candidate.as_dict()))
    candidates.sort(key=ActionCandidate.sort_key)
    total = sum(space.count for space in spaces) if grid is None else len(candidates)
    if unmatched:
        log_warning(f"{len(unmatched)} search results match no family", context)
    log_info(f"Exhaustive search found {total} actions", {**context, "total": total})
    return SearchReport(monoid, degree, field if grid is None else None, tuple(sorted(set(grid))) if grid else None,
                        tuple(spaces), tuple(candidates), total, tuple(unmatched))
