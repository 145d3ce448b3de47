"""Rational cohomology of simplicial sets and concordance of closed forms.

Cochains are normalized: a cochain vanishes on degenerate simplices, so it
is a vector indexed by the nondegenerate simplices. The coboundary is
δf(σ) = Σ (-1)^i f(d_i σ). Integration over the standard simplex with
dx1∧...∧dxn positive makes Stokes' formula hold with that sign convention.
"""
from dataclasses import dataclass
from functools import lru_cache
from math import factorial
from typing import Dict, List, Optional, Sequence, Tuple

from django.conf import settings
from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

from ..exceptions import ConstraintViolationError, DegreeMismatchError, NotClosedError, WitnessError
from ..logging_utils import log_duration, log_info, log_warning
from .forms_service import (
    SullivanForm,
    add,
    check_compatibility,
    compatible_form_basis,
    degree_component,
    differential,
    evaluate_endpoint,
    extend_to_cylinder,
    is_closed,
    pullback,
    scale,
    subtract,
    wedge,
)
from .simplicial_service import (
    SimplexRef,
    SimplicialSet,
    barycentric_sum,
    coordinate_table,
    operator_map,
    prism,
)
from .superalg_service import AlgebraMap, SuperPolynomial

NOTIONS = ("cohomologous", "cochain", "algebraic", "simplicial")


@dataclass(frozen=True)
class CochainComplex:
    space: SimplicialSet
    bases: Tuple[Tuple[SimplexRef, ...], ...]
    coboundaries: Tuple[DomainMatrix, ...]

    def basis(self, n: int) -> Tuple[SimplexRef, ...]:
        return self.bases[n] if 0 <= n < len(self.bases) else ()

    def coboundary(self, n: int) -> DomainMatrix:
        """δ: C^n -> C^{n+1} as a (dim C^{n+1}) x (dim C^n) matrix."""
        if 0 <= n < len(self.coboundaries):
            return self.coboundaries[n]
        return DomainMatrix.zeros((len(self.basis(n + 1)), len(self.basis(n))), QQ)

    def rank(self, n: int) -> int:
        matrix = self.coboundary(n)
        if 0 in matrix.shape:
            return 0
        return matrix.rank()


@lru_cache(maxsize=32)
def cochain_complex(space: SimplicialSet) -> CochainComplex:
    bases = tuple(tuple(space.refs(n)) for n in range(space.dimension + 1))
    matrices = []
    for n in range(space.dimension):
        column = {ref: position for position, ref in enumerate(bases[n])}
        rows = []
        for ref in bases[n + 1]:
            row = [QQ.zero] * len(bases[n])
            for i, face in enumerate(space.faces[ref]):
                if face.degen:
                    continue
                row[column[face.ref]] += QQ(-1) if i % 2 else QQ.one
            rows.append(row)
        matrices.append(DomainMatrix(rows, (len(bases[n + 1]), len(bases[n])), QQ))
    return CochainComplex(space, bases, tuple(matrices))


def _matrix(columns: Sequence[Sequence], height: int) -> DomainMatrix:
    """A matrix with the given column vectors."""
    rows = [[column[r] for column in columns] for r in range(height)]
    return DomainMatrix(rows, (height, len(columns)), QQ)


def _rank_of_columns(columns: Sequence[Sequence], height: int) -> int:
    if not columns or not height:
        return 0
    return _matrix(columns, height).rank()


def _columns_of(matrix: DomainMatrix) -> List[List]:
    rows = matrix.to_list()
    height, width = matrix.shape
    return [[rows[r][c] for r in range(height)] for c in range(width)]


def solve_columns(columns: Sequence[Sequence], target: Sequence, height: int) -> Optional[List]:
    """A solution c of Σ c_i columns[i] = target (free variables set to 0), or None."""
    width = len(columns)
    if not height:
        return [QQ.zero] * width
    rows = [[column[r] for column in columns] + [target[r]] for r in range(height)]
    reduced, pivots = DomainMatrix(rows, (height, width + 1), QQ).rref()
    if width in pivots:
        return None
    entries = reduced.to_list()
    solution = [QQ.zero] * width
    for row, pivot in enumerate(pivots):
        solution[pivot] = entries[row][width]
    return solution


@dataclass(frozen=True)
class CohomologyResult:
    degree: int
    betti: int
    representatives: Tuple[Tuple[Tuple[SimplexRef, object], ...], ...]

    def as_dict(self) -> dict:
        return {
            "degree": self.degree,
            "betti": self.betti,
            "representatives": [
                {str(ref): str(QQ.to_sympy(value)) for ref, value in rep if value} for rep in self.representatives
            ],
        }


def simplicial_cohomology(space: SimplicialSet, n: int) -> CohomologyResult:
    complex_ = cochain_complex(space)
    basis = complex_.basis(n)
    if n < 0 or not basis:
        return CohomologyResult(n, 0, ())
    height = len(basis)
    boundaries = _columns_of(complex_.coboundary(n - 1)) if n > 0 else []
    delta = complex_.coboundary(n)
    if delta.shape[0]:
        cocycles = delta.nullspace().to_list()
    else:
        cocycles = [[QQ.one if r == c else QQ.zero for r in range(height)] for c in range(height)]
    # greedily keep cocycles that are independent modulo the coboundaries
    chosen = []
    rank = _rank_of_columns(boundaries, height)
    for vector in cocycles:
        candidate = _rank_of_columns(boundaries + chosen + [vector], height)
        if candidate > rank:
            chosen.append(vector)
            rank = candidate
    betti = height - complex_.rank(n) - (complex_.rank(n - 1) if n > 0 else 0)
    if betti != len(chosen):
        raise WitnessError(f"Cohomology representatives ({len(chosen)}) disagree with the rank count ({betti})")
    log_info(f"H^{n}({space}) has rank {betti}", {"space": space.name, "degree": n, "betti": betti})
    return CohomologyResult(n, betti, tuple(tuple(zip(basis, vector)) for vector in chosen))


def betti_numbers(space: SimplicialSet) -> List[int]:
    return [simplicial_cohomology(space, n).betti for n in range(space.dimension + 1)]


def periodic_cohomology(space: SimplicialSet, n: int) -> int:
    """Rank of the sum of H^k over k ≡ n (mod 2)."""
    return sum(simplicial_cohomology(space, k).betti for k in range(space.dimension + 1) if (k - n) % 2 == 0)


def cohomology_class(space: SimplicialSet, n: int, cochain: Dict[SimplexRef, object]) -> Optional[List]:
    """Coordinates of a cocycle in the basis returned by simplicial_cohomology; None if not a cocycle."""
    complex_ = cochain_complex(space)
    basis = complex_.basis(n)
    vector = _cochain_vector(space, cochain, n)
    if any(coboundary_of(space, cochain, n).values()):
        return None
    result = simplicial_cohomology(space, n)
    representatives = [[value for _, value in rep] for rep in result.representatives]
    boundaries = _columns_of(complex_.coboundary(n - 1)) if n > 0 else []
    solution = solve_columns(representatives + boundaries, vector, len(basis))
    if solution is None:
        return None
    return solution[:len(representatives)]


# --- integration -----------------------------------------------------------------


def integrate(ref: SimplexRef, value: SuperPolynomial):
    """Exact integral of a top-degree polynomial form over the standard simplex."""
    n = ref.dim
    total = QQ.zero
    for monomial, coeff in value.terms.items():
        if len(monomial.odds) != n or len(monomial.evens) != n:
            raise DegreeMismatchError(f"Only {n}-forms on {ref} can be integrated", simplex=str(ref))
        numerator = 1
        for exponent in monomial.evens:
            numerator *= factorial(exponent)
        total += coeff * QQ(numerator, factorial(n + sum(monomial.evens)))
    return total


def integration_cochain(form: SullivanForm, n: int) -> Dict[SimplexRef, object]:
    """σ -> ∫_σ of the degree n part of the form on σ."""
    part = degree_component(form, n)
    return {ref: integrate(ref, part.values[ref]) for ref in form.space.refs(n)}


def _cochain_vector(space: SimplicialSet, cochain: Dict[SimplexRef, object], n: int) -> List:
    return [QQ.convert(cochain.get(ref, 0)) for ref in space.refs(n)]


def coboundary_of(space: SimplicialSet, cochain: Dict[SimplexRef, object], n: int) -> Dict[SimplexRef, object]:
    complex_ = cochain_complex(space)
    vector = _cochain_vector(space, cochain, n)
    matrix = complex_.coboundary(n).to_list()
    return {
        ref: sum((row[c] * vector[c] for c in range(len(vector))), QQ.zero)
        for ref, row in zip(complex_.basis(n + 1), matrix)
    }


def is_coboundary(space: SimplicialSet, cochain: Dict[SimplexRef, object], n: int) -> bool:
    vector = _cochain_vector(space, cochain, n)
    if not any(vector):
        return True
    if n == 0:
        return False
    boundaries = _columns_of(cochain_complex(space).coboundary(n - 1))
    height = len(vector)
    return _rank_of_columns(boundaries + [vector], height) == _rank_of_columns(boundaries, height)


def is_exact(form: SullivanForm) -> bool:
    """Decide exactness of a closed form through its integration cochains."""
    if not is_closed(form):
        raise NotClosedError("is_exact needs a closed form")
    return all(is_coboundary(form.space, integration_cochain(form, k), k) for k in form.degrees())


def exactness_witness(form: SullivanForm, polydeg_bound: int = None) -> Optional[SullivanForm]:
    """η with dη = form, searched among compatible forms of polynomial degree ≤ polydeg_bound."""
    if not is_closed(form):
        raise NotClosedError("exactness_witness needs a closed form")
    if polydeg_bound is None:
        polydeg_bound = settings.SUPERPOINT_POLYDEG_BOUND
    space = form.space
    witness = SullivanForm.zero(space, form.cylinder)
    for k in sorted(form.degrees()):
        target = degree_component(form, k)
        if k == 0:
            log_warning("A nonzero 0-form is never exact", {"space": space.name})
            return None
        basis = compatible_form_basis(space, k - 1, polydeg_bound, form.cylinder)
        images = [differential(b) for b in basis]
        keys = sorted({(ref, m) for image in images + [target] for ref, value in image.value_data for m in value.terms},
                      key=lambda key: (key[0], key[1].order_key()))
        columns = [[image.values[ref].terms.get(m, QQ.zero) for ref, m in keys] for image in images]
        solution = solve_columns(columns, [target.values[ref].terms.get(m, QQ.zero) for ref, m in keys], len(keys))
        if solution is None:
            log_warning(
                "No exactness witness within the polynomial-degree bound",
                {"space": space.name, "degree": k, "polydeg_bound": polydeg_bound},
            )
            return None
        for b, coeff in zip(basis, solution):
            if coeff:
                witness = add(witness, scale(b, coeff))
    if differential(witness) != form:
        raise WitnessError("Exactness witness does not re-verify")
    return witness


# --- concordance -----------------------------------------------------------------


def endpoints(witness: SullivanForm) -> Tuple[SullivanForm, SullivanForm]:
    return evaluate_endpoint(witness, 0), evaluate_endpoint(witness, 1)


def cochain_concordance_witness(omega0: SullivanForm, omega1: SullivanForm, alpha: SullivanForm) -> SullivanForm:
    """t ω1 + (1 - t) ω0 - dt ∧ α on the cylinder over X; closed when dα = ω0 - ω1.

    The dt term is written -dt ∧ α rather than α ∧ dt: d(-dt ∧ α) = dt ∧ dα
    for α of either parity, while α ∧ dt fails to close the form for even α.
    """
    for label, form in (("ω0", omega0), ("ω1", omega1)):
        if not is_closed(form):
            raise NotClosedError(f"{label} is not closed")
    if differential(alpha) != subtract(omega0, omega1):
        raise WitnessError("dα must equal ω0 - ω1")
    space = omega0.space
    t = SullivanForm.build(space, {
        ref: SuperPolynomial.generator(coordinate_table(ref.dim, True), "t") for ref in space.all_refs()
    }, cylinder=True)
    dt = differential(t)
    one = SullivanForm.constant(space, 1, cylinder=True)
    c0, c1, a = extend_to_cylinder(omega0), extend_to_cylinder(omega1), extend_to_cylinder(alpha)
    witness = add(add(wedge(t, c1), wedge(subtract(one, t), c0)), scale(wedge(dt, a), -1))
    check_cylinder_witness(witness, omega0, omega1)
    return witness


def check_cylinder_witness(witness: SullivanForm, omega0: SullivanForm, omega1: SullivanForm) -> None:
    if not is_closed(witness):
        raise WitnessError("Concordance witness is not closed")
    start, end = endpoints(witness)
    if start != omega0 or end != omega1:
        raise WitnessError("Concordance witness has the wrong endpoints")


def transport_to_prism(witness: SullivanForm):
    """Pull a cylinder form on X back to an ordinary form on X × Δ¹."""
    if not witness.cylinder:
        raise WitnessError("transport_to_prism needs a cylinder form")
    product = prism(witness.space)
    values = {}
    for ref, (simplex, bits) in product.origin.items():
        k = ref.dim
        m = simplex.core.dim
        target = coordinate_table(k)
        along = operator_map(simplex.eta, m)
        mapping = {name: along.image(name) for name in along.source.generators}
        mapping["t"], mapping["dt"] = barycentric_sum(target, k, [l for l, bit in enumerate(bits) if bit])
        to_prism = AlgebraMap.from_mapping(coordinate_table(m, True), target, mapping)
        values[ref] = to_prism(witness.values[simplex.core])
    return product, SullivanForm.build(product.space, values)


def check_prism_witness(witness: SullivanForm, omega0: SullivanForm, omega1: SullivanForm) -> dict:
    product, form = transport_to_prism(witness)
    report = {
        "compatible": check_compatibility(form)["compatible"],
        "closed": is_closed(form),
        "start": pullback(form, product.f0) == omega0,
        "end": pullback(form, product.f1) == omega1,
    }
    report["valid"] = all(report.values())
    return report


@dataclass(frozen=True)
class ConcordanceVerdict:
    """Outcome of one concordance notion.

    ``holds`` is decided exactly through integration. ``witness_missing`` marks a
    positive verdict whose witness search found nothing up to ``bound``.
    """

    notion: str
    holds: bool
    bound: Optional[int] = None
    witness: Optional[SullivanForm] = None
    alpha: Optional[SullivanForm] = None
    detail: str = ""
    witness_missing: bool = False


def _check_pair(omega0: SullivanForm, omega1: SullivanForm):
    if omega0.space != omega1.space:
        raise ConstraintViolationError("Forms live on different spaces")
    for label, form in (("ω0", omega0), ("ω1", omega1)):
        if not is_closed(form):
            raise NotClosedError(f"{label} is not closed")
    if omega0.degrees() and omega1.degrees() and omega0.degrees() != omega1.degrees():
        raise DegreeMismatchError(f"Degrees differ: {sorted(omega0.degrees())} vs {sorted(omega1.degrees())}")


def _judge_witness(notion: str, witness: SullivanForm, omega0: SullivanForm, omega1: SullivanForm,
                   bound: int, alpha: SullivanForm = None) -> ConcordanceVerdict:
    if not witness.cylinder:
        return ConcordanceVerdict(notion, False, bound, witness, alpha, "witness is not a cylinder form")
    if witness.space != omega0.space:
        return ConcordanceVerdict(notion, False, bound, witness, alpha, "witness lives on a different space")
    if notion in ("cochain", "algebraic"):
        try:
            check_cylinder_witness(witness, omega0, omega1)
        except WitnessError as error:
            return ConcordanceVerdict(notion, False, bound, witness, alpha, error.message)
        return ConcordanceVerdict(notion, True, bound, witness, alpha, "closed witness with matching endpoints")
    report = check_prism_witness(witness, omega0, omega1)
    if not report["valid"]:
        failed = ", ".join(key for key, ok in report.items() if key != "valid" and not ok)
        return ConcordanceVerdict(notion, False, bound, witness, alpha, f"prism check failed: {failed}")
    return ConcordanceVerdict(notion, True, bound, witness, alpha, "witness restricts to ω0, ω1 on X × Δ¹")


def concordance_check(notion: str, omega0: SullivanForm, omega1: SullivanForm, polydeg_bound: int = None,
                      witness: SullivanForm = None) -> ConcordanceVerdict:
    """Decide one of the four concordance notions.

    Without a supplied witness every notion is decided by exactness of
    ω0 - ω1, so the four verdicts agree. Positive verdicts carry a
    re-verified witness unless none exists up to the polynomial-degree
    bound, which ``witness_missing`` reports. A supplied witness is judged
    as given.
    """
    if notion not in NOTIONS:
        raise ConstraintViolationError(f"Unknown concordance notion '{notion}'", choices=list(NOTIONS))
    _check_pair(omega0, omega1)
    if polydeg_bound is None:
        polydeg_bound = settings.SUPERPOINT_POLYDEG_BOUND
    difference = subtract(omega0, omega1)
    context = {"space": omega0.space.name, "notion": notion, "polydeg_bound": polydeg_bound}
    with log_duration("concordance_check", context):
        if witness is not None and notion != "cohomologous":
            return _judge_witness(notion, witness, omega0, omega1, polydeg_bound)
        if not is_exact(difference):
            return ConcordanceVerdict(notion, False, polydeg_bound,
                                      detail="integration cochain of ω0 - ω1 is not a coboundary")
        alpha = exactness_witness(difference, polydeg_bound)
        if alpha is None:
            log_warning("Concordant pair without a witness inside the bound", context)
            return ConcordanceVerdict(notion, True, polydeg_bound, witness_missing=True,
                                      detail=f"ω0 - ω1 is exact; no α with dα = ω0 - ω1 up to degree {polydeg_bound}")
        if notion == "cohomologous":
            return ConcordanceVerdict(notion, True, polydeg_bound, alpha=alpha,
                                      detail="integration cochain of ω0 - ω1 is a coboundary")
        witness = cochain_concordance_witness(omega0, omega1, alpha)
        return _judge_witness(notion, witness, omega0, omega1, polydeg_bound, alpha)


# --- forms versus simplicial cohomology ---------------------------------------------


def closed_form_basis(space: SimplicialSet, n: int, polydeg: int) -> List[SullivanForm]:
    basis = compatible_form_basis(space, n, polydeg)
    if not basis:
        return []
    images = [differential(b) for b in basis]
    keys = sorted({(ref, m) for image in images for ref, value in image.value_data for m in value.terms},
                  key=lambda key: (key[0], key[1].order_key()))
    if not keys:
        return list(basis)
    rows = [[image.values[ref].terms.get(m, QQ.zero) for image in images] for ref, m in keys]
    kernel = DomainMatrix(rows, (len(keys), len(basis)), QQ).nullspace().to_list()
    closed = []
    for vector in kernel:
        form = SullivanForm.zero(space)
        for b, coeff in zip(basis, vector):
            if coeff:
                form = add(form, scale(b, coeff))
        closed.append(form)
    return closed


def form_cohomology_rank(space: SimplicialSet, n: int, polydeg: int = None) -> int:
    """Rank of closed n-forms (coefficients of degree ≤ polydeg) modulo exact ones, via integration."""
    if polydeg is None:
        polydeg = settings.SUPERPOINT_POLYDEG_BOUND
    height = len(space.refs(n))
    if not height:
        return 0
    vectors = [_cochain_vector(space, integration_cochain(form, n), n) for form in closed_form_basis(space, n, polydeg)]
    boundaries = _columns_of(cochain_complex(space).coboundary(n - 1)) if n > 0 else []
    return _rank_of_columns(boundaries + vectors, height) - _rank_of_columns(boundaries, height)


def field_theory_class_rank(space: SimplicialSet, geometry, n: int, polydeg: int = None) -> int:
    """Concordance classes of degree n theories, as a rank over Q."""
    from .fieldtheory_service import Geometry

    geometry = Geometry.parse(geometry)
    degrees = range(space.dimension + 1)
    if geometry in (Geometry.PRETOPOLOGICAL, Geometry.TOPOLOGICAL):
        degrees = [n]
    elif geometry is Geometry.EUCLIDEAN:
        degrees = [k for k in degrees if (k - n) % 2 == 0]
    elif geometry is Geometry.FULLY_RIGID:
        raise ConstraintViolationError("Fully rigid theories are not classified by cohomology")
    return sum(form_cohomology_rank(space, k, polydeg) for k in degrees)
