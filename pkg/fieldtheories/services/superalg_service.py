"""Supercommutative polynomial arithmetic.

Polynomials are immutable values over a :class:`VariableTable` of even and
odd generators. Odd generators anticommute and square to zero, so a monomial
keeps its odd generators as a strictly increasing index tuple and every
product re-sorts them with the Koszul sign.

Coefficients are elements of a sympy domain: ``QQ`` everywhere except the
classification search, which runs over ``GF(p)``.
"""
import re
from dataclasses import dataclass
from enum import Enum
from functools import cached_property, lru_cache
from types import MappingProxyType
from typing import Iterable, Mapping, NamedTuple, Sequence, Tuple, Union

from sympy import Rational
from sympy.polys.domains import GF, QQ
from sympy.polys.domains.domain import Domain

from ..exceptions import ParityError, TableMismatchError, VariableTableError

COEFFICIENT_PATTERN = re.compile(r"^-?\d+(/[1-9]\d*)?$")


class Parity(Enum):
    EVEN = 0
    ODD = 1

    def __add__(self, other):
        return Parity((self.value + other.value) % 2)

    @classmethod
    def of(cls, odd_count: int) -> "Parity":
        return cls(odd_count % 2)

    def flip(self) -> "Parity":
        return Parity(1 - self.value)

    @property
    def label(self) -> str:
        return self.name.lower()


@dataclass(frozen=True)
class VariableTable:
    evens: Tuple[str, ...] = ()
    odds: Tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "evens", tuple(self.evens))
        object.__setattr__(self, "odds", tuple(self.odds))
        names = self.evens + self.odds
        if len(set(names)) != len(names):
            duplicates = sorted({name for name in names if names.count(name) > 1})
            raise VariableTableError(f"Duplicate variable names: {', '.join(duplicates)}")

    @property
    def generators(self) -> Tuple[str, ...]:
        return self.evens + self.odds

    @cached_property
    def _positions(self):
        positions = {name: (Parity.EVEN, index) for index, name in enumerate(self.evens)}
        positions.update({name: (Parity.ODD, index) for index, name in enumerate(self.odds)})
        return positions

    def __contains__(self, name) -> bool:
        return name in self._positions

    def position(self, name: str) -> Tuple[Parity, int]:
        try:
            return self._positions[name]
        except KeyError:
            raise VariableTableError(f"Unknown variable '{name}'") from None

    def parity_of(self, name: str) -> Parity:
        return self.position(name)[0]

    def extend(self, evens: Iterable[str] = (), odds: Iterable[str] = ()) -> "VariableTable":
        return VariableTable(self.evens + tuple(evens), self.odds + tuple(odds))

    def without(self, names: Iterable[str]) -> "VariableTable":
        dropped = set(names)
        return VariableTable(
            tuple(name for name in self.evens if name not in dropped),
            tuple(name for name in self.odds if name not in dropped),
        )

    def describe(self) -> str:
        return f"({', '.join(self.evens)} | {', '.join(self.odds)})"


class Monomial(NamedTuple):
    evens: Tuple[int, ...]
    odds: Tuple[int, ...]

    @property
    def parity(self) -> Parity:
        return Parity.of(len(self.odds))

    @property
    def degree(self) -> int:
        return sum(self.evens) + len(self.odds)

    def order_key(self):
        # degree first, then even exponents, then the odd index set
        return (self.degree, self.evens, self.odds)


@lru_cache(maxsize=4096)
def _merge_odds(left: Tuple[int, ...], right: Tuple[int, ...]):
    if not right:
        return 1, left
    if not left:
        return 1, right
    if set(left).intersection(right):
        return 0, ()
    inversions = sum(1 for i in left for j in right if i > j)
    return (-1 if inversions % 2 else 1), tuple(sorted(left + right))


def _sort_odds(odds: Sequence[int]):
    """Sort an odd index list, returning (sign, sorted tuple) or (0, ()) on repeats."""
    if len(set(odds)) != len(odds):
        return 0, ()
    inversions = sum(1 for a in range(len(odds)) for b in range(a + 1, len(odds)) if odds[a] > odds[b])
    return (-1 if inversions % 2 else 1), tuple(sorted(odds))


@dataclass(frozen=True, eq=False)
class SuperPolynomial:
    table: VariableTable
    terms: Mapping[Monomial, object]
    domain: Domain = QQ

    def __post_init__(self):
        cleaned = {monomial: coeff for monomial, coeff in self.terms.items() if coeff}
        object.__setattr__(self, "terms", MappingProxyType(cleaned))

    @classmethod
    def zero(cls, table: VariableTable, domain: Domain = QQ) -> "SuperPolynomial":
        return cls(table, {}, domain)

    @classmethod
    def constant(cls, table: VariableTable, value, domain: Domain = QQ) -> "SuperPolynomial":
        unit = Monomial((0,) * len(table.evens), ())
        return cls(table, {unit: domain.convert(value)}, domain)

    @classmethod
    def generator(cls, table: VariableTable, name: str, domain: Domain = QQ) -> "SuperPolynomial":
        parity, index = table.position(name)
        evens = [0] * len(table.evens)
        odds: Tuple[int, ...] = ()
        if parity is Parity.EVEN:
            evens[index] = 1
        else:
            odds = (index,)
        return cls(table, {Monomial(tuple(evens), odds): domain.one}, domain)

    @classmethod
    def from_terms(cls, table: VariableTable, terms: Iterable, domain: Domain = QQ) -> "SuperPolynomial":
        """Build from ``(coefficient, even_exponents, odd_indices)`` triples.

        Odd indices may come in any order; they are sorted with the Koszul sign.
        """
        accumulated = {}
        for coeff, evens, odds in terms:
            evens = tuple(int(e) for e in evens)
            if len(evens) != len(table.evens) or any(e < 0 for e in evens):
                raise VariableTableError(
                    f"Even exponent vector {list(evens)} does not fit table {table.describe()}"
                )
            if any(i < 0 or i >= len(table.odds) for i in odds):
                raise VariableTableError(f"Odd index list {list(odds)} does not fit table {table.describe()}")
            sign, ordered = _sort_odds(list(odds))
            if not sign:
                continue
            value = domain.convert(coeff) if not isinstance(coeff, str) else parse_coefficient(coeff, domain)
            monomial = Monomial(evens, ordered)
            accumulated[monomial] = accumulated.get(monomial, domain.zero) + (value if sign > 0 else -value)
        return cls(table, accumulated, domain)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def parity(self) -> Union[Parity, None]:
        """The parity when the polynomial is homogeneous and nonzero, else None."""
        parities = {monomial.parity for monomial in self.terms}
        return parities.pop() if len(parities) == 1 else None

    def is_homogeneous(self) -> bool:
        return len({monomial.parity for monomial in self.terms}) <= 1

    def constant_term(self):
        return self.terms.get(Monomial((0,) * len(self.table.evens), ()), self.domain.zero)

    def max_even_degree(self) -> int:
        return max((sum(monomial.evens) for monomial in self.terms), default=0)

    def odd_count_set(self):
        return {len(monomial.odds) for monomial in self.terms}

    def __eq__(self, other):
        if not isinstance(other, SuperPolynomial):
            return NotImplemented
        return self.table == other.table and self.domain == other.domain and dict(self.terms) == dict(other.terms)

    def __hash__(self):
        return hash((self.table, frozenset(self.terms.items())))

    def __repr__(self):
        return f"SuperPolynomial({render(self)})"

    def __str__(self):
        return render(self)

    def __neg__(self):
        return scale(self, -1)

    def __add__(self, other):
        return add(self, _coerce(other, self))

    __radd__ = __add__

    def __sub__(self, other):
        return add(self, -_coerce(other, self))

    def __rsub__(self, other):
        return add(_coerce(other, self), -self)

    def __mul__(self, other):
        if isinstance(other, SuperPolynomial):
            return mul(self, other)
        return scale(self, other)

    def __rmul__(self, other):
        return scale(self, other)

    def __pow__(self, exponent: int):
        return power(self, exponent)


def _coerce(value, like: SuperPolynomial) -> SuperPolynomial:
    if isinstance(value, SuperPolynomial):
        return value
    return SuperPolynomial.constant(like.table, value, like.domain)


def _check_same(p: SuperPolynomial, q: SuperPolynomial):
    if p.table != q.table:
        raise TableMismatchError(
            f"Table mismatch: {p.table.describe()} vs {q.table.describe()}"
        )
    if p.domain != q.domain:
        raise TableMismatchError(f"Coefficient domain mismatch: {p.domain} vs {q.domain}")


def _accumulate(target: dict, poly: SuperPolynomial, zero):
    for monomial, coeff in poly.terms.items():
        target[monomial] = target.get(monomial, zero) + coeff


def add(p: SuperPolynomial, q: SuperPolynomial) -> SuperPolynomial:
    _check_same(p, q)
    result = dict(p.terms)
    _accumulate(result, q, p.domain.zero)
    return SuperPolynomial(p.table, result, p.domain)


def scale(p: SuperPolynomial, factor) -> SuperPolynomial:
    value = p.domain.convert(factor)
    return SuperPolynomial(p.table, {m: c * value for m, c in p.terms.items()}, p.domain)


def mul(p: SuperPolynomial, q: SuperPolynomial) -> SuperPolynomial:
    _check_same(p, q)
    zero = p.domain.zero
    result = {}
    for left, left_coeff in p.terms.items():
        for right, right_coeff in q.terms.items():
            sign, odds = _merge_odds(left.odds, right.odds)
            if not sign:
                continue
            monomial = Monomial(tuple(a + b for a, b in zip(left.evens, right.evens)), odds)
            value = left_coeff * right_coeff
            result[monomial] = result.get(monomial, zero) + (value if sign > 0 else -value)
    return SuperPolynomial(p.table, result, p.domain)


def power(p: SuperPolynomial, exponent: int) -> SuperPolynomial:
    if exponent < 0:
        raise ValueError("Negative powers are not polynomials")
    result = SuperPolynomial.constant(p.table, 1, p.domain)
    base = p
    while exponent:
        if exponent & 1:
            result = mul(result, base)
        exponent >>= 1
        if exponent:
            base = mul(base, base)
    return result


def parity_component(p: SuperPolynomial, parity: Parity) -> SuperPolynomial:
    return SuperPolynomial(
        p.table, {m: c for m, c in p.terms.items() if m.parity is parity}, p.domain
    )


@dataclass(frozen=True)
class AlgebraMap:
    """A parity-preserving algebra homomorphism, given by generator images."""

    source: VariableTable
    target: VariableTable
    images: Tuple[SuperPolynomial, ...]
    domain: Domain = QQ

    def __post_init__(self):
        images = tuple(self.images)
        object.__setattr__(self, "images", images)
        if len(images) != len(self.source.generators):
            raise TableMismatchError(
                f"Expected {len(self.source.generators)} images, got {len(images)}"
            )
        for name, image in zip(self.source.generators, images):
            if image.table != self.target or image.domain != self.domain:
                raise TableMismatchError(f"Image of {name} is not over the target table")
            expected = self.source.parity_of(name)
            if not image.is_zero and image.parity is not expected:
                raise ParityError(f"Image of {name} is not {expected.label}")

    @classmethod
    def from_mapping(cls, source: VariableTable, target: VariableTable, mapping: Mapping, domain: Domain = QQ):
        """Images by generator name; unlisted generators go to their namesake in ``target``."""
        images = []
        for name in source.generators:
            if name in mapping:
                image = mapping[name]
                if not isinstance(image, SuperPolynomial):
                    image = SuperPolynomial.constant(target, image, domain)
            elif name in target:
                image = SuperPolynomial.generator(target, name, domain)
            else:
                raise TableMismatchError(f"No image given for '{name}' and no namesake in the target")
            images.append(image)
        return cls(source, target, tuple(images), domain)

    @classmethod
    def identity(cls, table: VariableTable, domain: Domain = QQ) -> "AlgebraMap":
        return cls.from_mapping(table, table, {}, domain)

    def image(self, name: str) -> SuperPolynomial:
        return self.images[self.source.generators.index(name)]

    def compose(self, other: "AlgebraMap") -> "AlgebraMap":
        """``self ∘ other``: apply ``other`` first."""
        if other.target != self.source:
            raise TableMismatchError("Maps are not composable")
        return AlgebraMap(other.source, self.target, tuple(substitute(self, image) for image in other.images), self.domain)

    def __call__(self, p: SuperPolynomial) -> SuperPolynomial:
        return substitute(self, p)


def substitute(f: AlgebraMap, p: SuperPolynomial) -> SuperPolynomial:
    if p.table != f.source:
        raise TableMismatchError(
            f"Polynomial over {p.table.describe()} cannot be mapped from {f.source.describe()}"
        )
    if p.domain != f.domain:
        raise TableMismatchError(f"Coefficient domain mismatch: {p.domain} vs {f.domain}")
    zero = f.domain.zero
    n_even = len(f.source.evens)
    unit = Monomial((0,) * len(f.target.evens), ())
    powers = {}
    result = {}
    for monomial, coeff in p.terms.items():
        term = SuperPolynomial(f.target, {unit: coeff}, f.domain)
        for index, exponent in enumerate(monomial.evens):
            if not exponent:
                continue
            key = (index, exponent)
            if key not in powers:
                powers[key] = power(f.images[index], exponent)
            term = mul(term, powers[key])
            if term.is_zero:
                break
        for index in monomial.odds:
            if term.is_zero:
                break
            term = mul(term, f.images[n_even + index])
        _accumulate(result, term, zero)
    return SuperPolynomial(f.target, result, f.domain)


def _aligned_images(images, table: VariableTable, domain: Domain) -> Tuple[SuperPolynomial, ...]:
    if isinstance(images, Mapping):
        return tuple(
            images.get(name, SuperPolynomial.zero(table, domain)) for name in table.generators
        )
    images = tuple(images)
    if len(images) != len(table.generators):
        raise TableMismatchError(f"Expected {len(table.generators)} derivation images, got {len(images)}")
    return images


def odd_derivation(images, p: SuperPolynomial) -> SuperPolynomial:
    """Apply the odd derivation with the given generator images to ``p``.

    ``images`` is a sequence aligned with ``p.table.generators`` or a mapping
    from generator name to image (missing names map to zero). The rule is
    d(ab) = (da)b + (-1)^{|a|} a (db).
    """
    table, domain = p.table, p.domain
    images = _aligned_images(images, table, domain)
    for name, image in zip(table.generators, images):
        if image.table != table or image.domain != domain:
            raise TableMismatchError(f"Derivation image of {name} is over another table")
        expected = table.parity_of(name).flip()
        if not image.is_zero and image.parity is not expected:
            raise ParityError(f"Derivation image of {name} must be {expected.label}")
    n_even = len(table.evens)
    no_evens = (0,) * n_even
    one = domain.one
    result = {}
    for monomial, coeff in p.terms.items():
        for index, exponent in enumerate(monomial.evens):
            image = images[index]
            if not exponent or image.is_zero:
                continue
            lowered = list(monomial.evens)
            lowered[index] -= 1
            left = SuperPolynomial(table, {Monomial(tuple(lowered), ()): coeff * exponent}, domain)
            right = SuperPolynomial(table, {Monomial(no_evens, monomial.odds): one}, domain)
            _accumulate(result, mul(mul(left, image), right), domain.zero)
        for position, index in enumerate(monomial.odds):
            image = images[n_even + index]
            if image.is_zero:
                continue
            signed = coeff if position % 2 == 0 else -coeff
            left = SuperPolynomial(table, {Monomial(monomial.evens, monomial.odds[:position]): signed}, domain)
            right = SuperPolynomial(table, {Monomial(no_evens, monomial.odds[position + 1:]): one}, domain)
            _accumulate(result, mul(mul(left, image), right), domain.zero)
    return SuperPolynomial(table, result, domain)


def specialize(p: SuperPolynomial, assignments: Mapping[str, object]) -> SuperPolynomial:
    """Set the named generators to constants; they are dropped from the table.

    Odd generators may only be set to zero.
    """
    target = p.table.without(assignments)
    mapping = {}
    for name, value in assignments.items():
        if p.table.parity_of(name) is Parity.ODD and value:
            raise ParityError(f"Odd generator {name} can only be specialized to 0")
        mapping[name] = value
    return substitute(AlgebraMap.from_mapping(p.table, target, mapping, p.domain), p)


def split_terms(p: SuperPolynomial, base: VariableTable) -> dict:
    """Split ``p`` over ``base`` extended by trailing variables.

    Returns ``{extension monomial: coefficient polynomial over base}`` with
    ``p = Σ coefficient · extension monomial``; no signs arise because the
    extension's odd generators sort after the base's.
    """
    n_even, n_odd = len(base.evens), len(base.odds)
    if p.table.evens[:n_even] != base.evens or p.table.odds[:n_odd] != base.odds:
        raise TableMismatchError(f"{p.table.describe()} does not extend {base.describe()}")
    parts = {}
    for monomial, coeff in p.terms.items():
        base_odds = tuple(i for i in monomial.odds if i < n_odd)
        extra_odds = tuple(i - n_odd for i in monomial.odds if i >= n_odd)
        key = Monomial(monomial.evens[n_even:], extra_odds)
        parts.setdefault(key, {})[Monomial(monomial.evens[:n_even], base_odds)] = coeff
    return {key: SuperPolynomial(base, terms, p.domain) for key, terms in parts.items()}


def prime_field(p: int) -> Domain:
    """The coefficient domain F_p with representatives 0..p-1."""
    return GF(p, symmetric=False)


def parse_coefficient(text: str, domain: Domain = QQ):
    text = str(text).strip()
    if not COEFFICIENT_PATTERN.match(text):
        raise ValueError(f"Invalid rational coefficient '{text}'")
    value = Rational(text)
    if domain == QQ:
        return QQ.from_sympy(value)
    denominator = domain.convert(int(value.q))
    if not denominator:
        raise ValueError(f"Coefficient '{text}' is undefined modulo {domain.mod}")
    return domain.convert(int(value.p)) / denominator


def format_coefficient(value, domain: Domain = QQ) -> str:
    return str(domain.to_sympy(value))


def _render_monomial(table: VariableTable, monomial: Monomial) -> list:
    factors = [name if exponent == 1 else f"{name}^{exponent}"
               for name, exponent in zip(table.evens, monomial.evens) if exponent]
    factors.extend(table.odds[index] for index in monomial.odds)
    return factors


def render(p: SuperPolynomial) -> str:
    """Canonical text, e.g. ``3/2*x1^2*e1*e2``; terms in descending monomial order."""
    if p.is_zero:
        return "0"
    pieces = []
    for monomial in sorted(p.terms, key=Monomial.order_key, reverse=True):
        coeff = p.domain.to_sympy(p.terms[monomial])
        factors = _render_monomial(p.table, monomial)
        if not factors:
            pieces.append(str(coeff))
        elif coeff == 1:
            pieces.append("*".join(factors))
        elif coeff == -1:
            pieces.append("-" + "*".join(factors))
        else:
            pieces.append(f"{coeff}*" + "*".join(factors))
    text = pieces[0]
    for piece in pieces[1:]:
        text += f" - {piece[1:]}" if piece.startswith("-") else f" + {piece}"
    return text


def to_terms(p: SuperPolynomial) -> list:
    """Serializable term list in canonical (descending) order."""
    return [
        {
            "coeff": format_coefficient(p.terms[monomial], p.domain),
            "even": list(monomial.evens),
            "odd": list(monomial.odds),
        }
        for monomial in sorted(p.terms, key=Monomial.order_key, reverse=True)
    ]
