"""Finite simplicial sets and their algebraic realization.

A simplicial set is presented by its nondegenerate simplices; the i-th face
of each is stored in Eilenberg-Zilber normal form, i.e. as a nondegenerate
core plus a strictly decreasing degeneracy word. Degenerate simplices are
handled as ``Simplex(core, surjection)`` pairs and never stored.

Coordinates on the geometric n-simplex are the interior coordinates
x1..xn with the barycentric x0 = 1 - Σ xi eliminated.
"""
import hashlib
import json
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from itertools import combinations
from typing import Dict, Iterable, List, Mapping, NamedTuple, Sequence, Tuple

import networkx as nx
from django.conf import settings
from sympy.polys.domains import QQ

from ..exceptions import IndexRangeError, ResourceLimitError, UnsupportedSpaceError
from ..logging_utils import log_info, log_warning
from .superalg_service import AlgebraMap, SuperPolynomial, VariableTable

MAX_STANDARD_DIMENSION = 4


@dataclass(frozen=True, order=True)
class SimplexRef:
    dim: int
    id: str

    def __str__(self):
        return f"{self.dim}/{self.id}"

    @classmethod
    def parse(cls, text: str) -> "SimplexRef":
        dim, sep, ident = str(text).partition("/")
        if not sep or not dim.isdigit() or not ident:
            raise ValueError(f"Invalid simplex reference: '{text}'")
        return cls(int(dim), ident)


class Face(NamedTuple):
    ref: SimplexRef
    degen: Tuple[int, ...] = ()


class Simplex(NamedTuple):
    """A possibly degenerate simplex: ``core`` precomposed with the surjection ``eta``."""

    core: SimplexRef
    eta: Tuple[int, ...]

    @property
    def dim(self) -> int:
        return len(self.eta) - 1

    @property
    def is_nondegenerate(self) -> bool:
        return self.dim == self.core.dim

    @classmethod
    def of(cls, ref: SimplexRef) -> "Simplex":
        return cls(ref, tuple(range(ref.dim + 1)))

    def word(self) -> Tuple[int, ...]:
        return surjection_to_word(self.eta)


@dataclass(frozen=True)
class SimplicialSet:
    simplices: Tuple[Tuple[str, ...], ...]
    face_data: Tuple[Tuple[SimplexRef, Tuple[Face, ...]], ...]
    name: str = field(default="", compare=False)

    @classmethod
    def build(cls, simplices: Mapping[int, Iterable[str]], faces: Mapping[SimplexRef, Sequence[Face]], name: str = ""):
        top = max(simplices, default=-1)
        levels = tuple(tuple(simplices.get(dim, ())) for dim in range(top + 1))
        data = tuple(sorted((ref, tuple(Face(face.ref, tuple(face.degen)) for face in entries))
                            for ref, entries in faces.items()))
        return cls(levels, data, name)

    @cached_property
    def faces(self) -> Dict[SimplexRef, Tuple[Face, ...]]:
        return dict(self.face_data)

    @property
    def dimension(self) -> int:
        return len(self.simplices) - 1

    def refs(self, dim: int) -> List[SimplexRef]:
        if dim < 0 or dim >= len(self.simplices):
            return []
        return [SimplexRef(dim, ident) for ident in self.simplices[dim]]

    def all_refs(self) -> List[SimplexRef]:
        return [ref for dim in range(len(self.simplices)) for ref in self.refs(dim)]

    @cached_property
    def _ref_set(self):
        return frozenset(self.all_refs())

    def __contains__(self, ref) -> bool:
        return ref in self._ref_set

    @property
    def cell_count(self) -> int:
        return sum(len(level) for level in self.simplices)

    def face(self, ref: SimplexRef, index: int) -> Face:
        try:
            return self.faces[ref][index]
        except (KeyError, IndexError):
            raise IndexRangeError(f"Simplex {ref} has no face {index}") from None

    def as_dict(self) -> dict:
        return {
            "dims": {str(dim): list(level) for dim, level in enumerate(self.simplices)},
            "faces": {
                str(ref): [{"ref": str(face.ref), "degen": list(face.degen)} for face in entries]
                for ref, entries in self.face_data
            },
        }

    def __str__(self):
        counts = ", ".join(str(len(level)) for level in self.simplices)
        return f"{self.name or 'space'}[{counts}]"


def space_fingerprint(space: SimplicialSet) -> str:
    payload = json.dumps(space.as_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


def guard_cells(space: SimplicialSet, label: str = "space") -> SimplicialSet:
    limit = settings.SUPERPOINT_MAX_CELLS
    if space.cell_count > limit:
        raise ResourceLimitError(
            f"{label} has {space.cell_count} nondegenerate simplices, above SUPERPOINT_MAX_CELLS={limit}"
        )
    # Warning if the space is close to the configured limit
    if space.cell_count > 0.8 * limit:
        log_warning(
            f"{label} is close to the cell limit ({space.cell_count}/{limit})",
            {"space": space.name, "cells": space.cell_count},
        )
    return space


def word_to_surjection(word: Sequence[int], core_dim: int) -> Tuple[int, ...]:
    """The surjection of s_{i1}...s_{ik} applied to a core of dimension ``core_dim``."""
    values = list(range(core_dim + len(word) + 1))
    for index in word:
        values = [v if v <= index else v - 1 for v in values]
    return tuple(values)


def surjection_to_word(eta: Sequence[int]) -> Tuple[int, ...]:
    return tuple(j for j in range(len(eta) - 2, -1, -1) if eta[j] == eta[j + 1])


def face_of(space: SimplicialSet, simplex: Simplex, index: int) -> Simplex:
    """The ``index``-th face of a general simplex, in normal form."""
    if simplex.dim < 1 or not 0 <= index <= simplex.dim:
        raise IndexRangeError(f"Face index {index} out of range for a {simplex.dim}-simplex")
    core, eta = simplex
    if simplex.is_nondegenerate:
        face = space.face(core, index)
        return Simplex(face.ref, word_to_surjection(face.degen, face.ref.dim))
    phi = eta[:index] + eta[index + 1:]
    image = sorted(set(phi))
    epi = tuple(image.index(value) for value in phi)
    result = Simplex.of(core)
    # remove the vertices the mono part misses, largest first so smaller indices stay valid
    for missing in sorted(set(range(core.dim + 1)) - set(image), reverse=True):
        result = face_of(space, result, missing)
    return Simplex(result.core, tuple(result.eta[value] for value in epi))


def degeneracy_of(simplex: Simplex, index: int) -> Simplex:
    if not 0 <= index <= simplex.dim:
        raise IndexRangeError(f"Degeneracy index {index} out of range for a {simplex.dim}-simplex")
    eta = simplex.eta
    return Simplex(simplex.core, tuple(eta[l if l <= index else l - 1] for l in range(len(eta) + 1)))


def validate(space: SimplicialSet) -> dict:
    """Check face data shape and the simplicial identities; violations are listed, not raised."""
    violations = []
    checked = 0
    for ref in space.all_refs():
        entries = space.faces.get(ref)
        if ref.dim == 0:
            if entries:
                violations.append(f"{ref}: vertices carry no faces")
            continue
        if entries is None or len(entries) != ref.dim + 1:
            violations.append(f"{ref}: expected {ref.dim + 1} faces")
            continue
        for index, face in enumerate(entries):
            checked += 1
            if face.ref not in space:
                violations.append(f"{ref} d{index}: unknown simplex {face.ref}")
                continue
            word = list(face.degen)
            if any(a <= b for a, b in zip(word, word[1:])):
                violations.append(f"{ref} d{index}: degeneracy word {word} is not strictly decreasing")
            if face.ref.dim + len(word) != ref.dim - 1:
                violations.append(f"{ref} d{index}: face has dimension {face.ref.dim + len(word)}")
            elif word and not 0 <= word[-1] <= word[0] <= ref.dim - 2:
                violations.append(f"{ref} d{index}: degeneracy indices {word} out of range")
    if violations:
        return {"valid": False, "checked": checked, "violations": violations}

    for ref in space.all_refs():
        simplex = Simplex.of(ref)
        n = ref.dim
        for j in range(n + 1):
            for i in range(j):
                checked += 1
                if n >= 2:
                    left = face_of(space, face_of(space, simplex, j), i)
                    right = face_of(space, face_of(space, simplex, i), j - 1)
                    if left != right:
                        violations.append(f"{ref}: d{i}d{j} != d{j - 1}d{i}")
        for j in range(n + 1):
            degenerate = degeneracy_of(simplex, j)
            for i in range(n + 2):
                checked += 1
                face = face_of(space, degenerate, i)
                if i in (j, j + 1):
                    expected = simplex
                elif i < j:
                    expected = degeneracy_of(face_of(space, simplex, i), j - 1)
                else:
                    expected = degeneracy_of(face_of(space, simplex, i - 1), j)
                if face != expected:
                    violations.append(f"{ref}: mixed identity d{i}s{j} fails")
    log_info(
        f"Validated {space}",
        {"space": space.name, "checked": checked, "violations": len(violations)},
    )
    return {"valid": not violations, "checked": checked, "violations": violations}


def _delta(n: int) -> Tuple[dict, dict]:
    vertices = [str(i) for i in range(n + 1)]
    simplices, faces = {}, {}
    for dim in range(n + 1):
        ids = ["".join(c) for c in combinations(vertices, dim + 1)]
        simplices[dim] = ids
        if dim:
            for ident in ids:
                faces[SimplexRef(dim, ident)] = [
                    Face(SimplexRef(dim - 1, ident[:i] + ident[i + 1:])) for i in range(dim + 1)
                ]
    return simplices, faces


def standard(name: str) -> SimplicialSet:
    """Named standard spaces: point, points<k>, delta<n>, boundary<n>, sphere<n>, torus."""
    key = name.strip().lower()
    if key == "point":
        key = "delta0"
    if key == "torus":
        vertex = SimplexRef(0, "v")
        edges = {e: SimplexRef(1, e) for e in "abc"}
        faces = {ref: [Face(vertex), Face(vertex)] for ref in edges.values()}
        faces[SimplexRef(2, "T1")] = [Face(edges["b"]), Face(edges["c"]), Face(edges["a"])]
        faces[SimplexRef(2, "T2")] = [Face(edges["a"]), Face(edges["c"]), Face(edges["b"])]
        space = SimplicialSet.build({0: ["v"], 1: ["a", "b", "c"], 2: ["T1", "T2"]}, faces, "torus")
    else:
        for prefix in ("delta", "boundary", "sphere", "points"):
            if key.startswith(prefix) and key[len(prefix):].isdigit():
                n = int(key[len(prefix):])
                break
        else:
            raise UnsupportedSpaceError(f"Unsupported space name '{name}'")
        if prefix == "points":
            space = SimplicialSet.build({0: [f"p{i}" for i in range(n)]}, {}, key)
        else:
            if n > MAX_STANDARD_DIMENSION:
                raise UnsupportedSpaceError(f"'{name}': generated families stop at dimension {MAX_STANDARD_DIMENSION}")
            if prefix == "delta":
                simplices, faces = _delta(n)
                space = SimplicialSet.build(simplices, faces, key)
            elif prefix == "boundary":
                if n < 1:
                    raise UnsupportedSpaceError("boundary needs n >= 1")
                simplices, faces = _delta(n)
                top = simplices.pop(n)[0]
                faces.pop(SimplexRef(n, top), None)
                space = SimplicialSet.build(simplices, faces, key)
            else:
                if n < 1:
                    raise UnsupportedSpaceError("sphere needs n >= 1")
                collapsed = Face(SimplexRef(0, "*"), tuple(range(n - 2, -1, -1)))
                simplices = {0: ["*"], n: ["top"]}
                for dim in range(1, n):
                    simplices[dim] = []
                space = SimplicialSet.build(simplices, {SimplexRef(n, "top"): [collapsed] * (n + 1)}, key)
    log_info(f"Built standard space {space}", {"space": space.name, "cells": space.cell_count})
    return space


def disjoint_union(spaces: Sequence[SimplicialSet], name: str = "") -> SimplicialSet:
    simplices: Dict[int, List[str]] = {}
    faces = {}
    for position, space in enumerate(spaces):
        def tag(ref, position=position):
            return SimplexRef(ref.dim, f"{position}.{ref.id}")
        for ref in space.all_refs():
            simplices.setdefault(ref.dim, []).append(tag(ref).id)
        for ref, entries in space.face_data:
            faces[tag(ref)] = [Face(tag(face.ref), face.degen) for face in entries]
    top = max(simplices, default=-1)
    for dim in range(top + 1):
        simplices.setdefault(dim, [])
    return SimplicialSet.build(simplices, faces, name or "+".join(space.name for space in spaces))


def pi0(space: SimplicialSet) -> int:
    graph = nx.Graph()
    graph.add_nodes_from(space.refs(0))
    for ref in space.refs(1):
        graph.add_edge(space.face(ref, 0).ref, space.face(ref, 1).ref)
    return nx.number_connected_components(graph)


# --- algebraic realization -------------------------------------------------


def coordinate_table(n: int, cylinder: bool = False) -> VariableTable:
    """x1..xn even with dx1..dxn odd; a cylinder adds t and dt."""
    evens = tuple(f"x{i}" for i in range(1, n + 1))
    odds = tuple(f"dx{i}" for i in range(1, n + 1))
    if cylinder:
        evens, odds = evens + ("t",), odds + ("dt",)
    return VariableTable(evens, odds)


def _barycentric(table: VariableTable, k: int, vertex: int, domain) -> Tuple[SuperPolynomial, SuperPolynomial]:
    """Barycentric coordinate ``vertex`` of the k-simplex and its differential."""
    if vertex:
        return (SuperPolynomial.generator(table, f"x{vertex}", domain),
                SuperPolynomial.generator(table, f"dx{vertex}", domain))
    coordinate = SuperPolynomial.constant(table, 1, domain)
    differential = SuperPolynomial.zero(table, domain)
    for i in range(1, k + 1):
        coordinate = coordinate - SuperPolynomial.generator(table, f"x{i}", domain)
        differential = differential - SuperPolynomial.generator(table, f"dx{i}", domain)
    return coordinate, differential


def barycentric_sum(table: VariableTable, k: int, vertices: Iterable[int], domain=QQ):
    coordinate = SuperPolynomial.zero(table, domain)
    differential = SuperPolynomial.zero(table, domain)
    for vertex in vertices:
        value, d_value = _barycentric(table, k, vertex, domain)
        coordinate, differential = coordinate + value, differential + d_value
    return coordinate, differential


def operator_map(theta: Sequence[int], m: int, cylinder: bool = False, domain=QQ) -> AlgebraMap:
    """Pullback of forms along the monotone map ``theta: [k] -> [m]``.

    Barycentric coordinate j of the m-simplex pulls back to the sum of the
    barycentric coordinates l of the k-simplex with theta(l) = j.
    """
    return _operator_map(tuple(theta), m, cylinder, domain)


@lru_cache(maxsize=1024)
def _operator_map(theta: Tuple[int, ...], m: int, cylinder: bool, domain) -> AlgebraMap:
    if any(b < a for a, b in zip(theta, theta[1:])) or any(not 0 <= v <= m for v in theta):
        raise IndexRangeError(f"{list(theta)} is not a monotone map into [{m}]")
    k = len(theta) - 1
    source, target = coordinate_table(m, cylinder), coordinate_table(k, cylinder)
    mapping = {}
    for j in range(1, m + 1):
        value, d_value = barycentric_sum(target, k, [l for l, v in enumerate(theta) if v == j], domain)
        mapping[f"x{j}"], mapping[f"dx{j}"] = value, d_value
    return AlgebraMap.from_mapping(source, target, mapping, domain)


def coface_array(i: int, n: int) -> Tuple[int, ...]:
    """δ^i: [n-1] -> [n], skipping i."""
    return tuple(v if v < i else v + 1 for v in range(n))


def codegeneracy_array(i: int, n: int) -> Tuple[int, ...]:
    """σ^i: [n+1] -> [n], hitting i twice."""
    return tuple(v if v <= i else v - 1 for v in range(n + 2))


@dataclass(frozen=True)
class CosimplicialMap:
    kind: str
    index: int
    source_dim: int
    target_dim: int
    map: AlgebraMap


def realization_map(kind: str, index: int, n: int) -> CosimplicialMap:
    """Coface: O(A^n) -> O(A^{n-1}); codegeneracy: O(A^n) -> O(A^{n+1})."""
    if kind == "coface":
        if n < 1 or not 0 <= index <= n:
            raise IndexRangeError(f"coface index {index} out of range for n={n}")
        return CosimplicialMap(kind, index, n, n - 1, operator_map(coface_array(index, n), n))
    if kind == "codegeneracy":
        if not 0 <= index <= n:
            raise IndexRangeError(f"codegeneracy index {index} out of range for n={n}")
        return CosimplicialMap(kind, index, n, n + 1, operator_map(codegeneracy_array(index, n), n))
    raise IndexRangeError(f"Unknown cosimplicial operator kind '{kind}'")


def _compose_arrays(outer: Sequence[int], inner: Sequence[int]) -> Tuple[int, ...]:
    return tuple(outer[v] for v in inner)


def _cosimplicial_identities(n_max: int):
    """Yield (label, (outer, inner, m), (outer, inner, m)) for every identity with rings up to n_max."""
    for n in range(2, n_max + 1):
        for j in range(n + 1):
            for i in range(j):
                yield (f"d^{j}d^{i}=d^{i}d^{j - 1} on [{n}]",
                       (coface_array(j, n), coface_array(i, n - 1)),
                       (coface_array(i, n), coface_array(j - 1, n - 1)))
    for n in range(0, n_max):
        for j in range(n + 1):
            for i in range(n + 2):
                lhs = (codegeneracy_array(j, n), coface_array(i, n + 1))
                if i < j:
                    rhs = (coface_array(i, n), codegeneracy_array(j - 1, n - 1))
                elif i in (j, j + 1):
                    rhs = (tuple(range(n + 1)), tuple(range(n + 1)))
                else:
                    rhs = (coface_array(i - 1, n), codegeneracy_array(j, n - 1))
                yield f"s^{j}d^{i} on [{n}]", lhs, rhs
    for n in range(0, n_max - 1):
        for j in range(n + 1):
            for i in range(j + 1):
                yield (f"s^{j}s^{i}=s^{i}s^{j + 1} on [{n}]",
                       (codegeneracy_array(j, n), codegeneracy_array(i, n + 1)),
                       (codegeneracy_array(i, n), codegeneracy_array(j + 1, n + 1)))


def validate_realization(n_max: int) -> dict:
    """Symbolically check the cosimplicial identities on the coordinate rings."""
    if n_max > 5:
        raise IndexRangeError("validate_realization supports n_max <= 5")
    violations = []
    checked = 0
    for label, (outer_l, inner_l), (outer_r, inner_r) in _cosimplicial_identities(n_max):
        checked += 1
        composite = _compose_arrays(outer_l, inner_l)
        if composite != _compose_arrays(outer_r, inner_r):
            violations.append(f"{label}: combinatorial mismatch")
            continue
        m = max(outer_l)
        # pullback of outer∘inner is inner* ∘ outer*
        left = operator_map(inner_l, max(inner_l)).compose(operator_map(outer_l, m))
        right = operator_map(inner_r, max(inner_r)).compose(operator_map(outer_r, m))
        if left != right or left != operator_map(composite, m):
            violations.append(f"{label}: pullbacks differ")
    log_info(f"Checked {checked} cosimplicial identities up to n={n_max}", {"n_max": n_max, "violations": len(violations)})
    return {"valid": not violations, "checked": checked, "violations": violations}


# --- maps and prisms ---------------------------------------------------------


@dataclass(frozen=True)
class SimplicialMap:
    source: SimplicialSet
    target: SimplicialSet
    image_data: Tuple[Tuple[SimplexRef, Simplex], ...]

    @cached_property
    def images(self) -> Dict[SimplexRef, Simplex]:
        return dict(self.image_data)

    def apply(self, simplex: Simplex) -> Simplex:
        core, eta = self.images[simplex.core]
        return Simplex(core, tuple(eta[v] for v in simplex.eta))


def check_simplicial_map(mapping: SimplicialMap) -> dict:
    violations = []
    for ref in mapping.source.all_refs():
        image = mapping.images.get(ref)
        if image is None:
            violations.append(f"{ref}: no image")
            continue
        if image.dim != ref.dim:
            violations.append(f"{ref}: image has dimension {image.dim}")
            continue
        for i in range(ref.dim + 1 if ref.dim else 0):
            left = mapping.apply(face_of(mapping.source, Simplex.of(ref), i))
            right = face_of(mapping.target, image, i)
            if left != right:
                violations.append(f"{ref}: map does not commute with d{i}")
    return {"valid": not violations, "violations": violations}


def _prism_id(core: SimplexRef, bits: Sequence[int]) -> str:
    return f"{core.dim}:{core.id}:{''.join(str(b) for b in bits)}"


@dataclass(frozen=True)
class Prism:
    """X × Δ¹ with its end inclusions and projection.

    ``origin`` sends each nondegenerate prism simplex to its X-component and
    its Δ¹-component (a monotone bit string).
    """

    base: SimplicialSet
    space: SimplicialSet
    origin_data: Tuple[Tuple[SimplexRef, Tuple[Simplex, Tuple[int, ...]]], ...]
    f0: SimplicialMap
    f1: SimplicialMap
    projection: SimplicialMap

    @cached_property
    def origin(self) -> Dict[SimplexRef, Tuple[Simplex, Tuple[int, ...]]]:
        return dict(self.origin_data)


def _normalize_pair(simplex: Simplex, bits: Tuple[int, ...]):
    """Collapse positions where both components are degenerate.

    Returns the nondegenerate pair and the degeneracy word.
    """
    repeats = [j for j in range(len(bits) - 1)
               if simplex.eta[j] == simplex.eta[j + 1] and bits[j] == bits[j + 1]]
    keep = [l for l in range(len(bits)) if l - 1 not in repeats]
    eta = tuple(simplex.eta[l] for l in keep)
    return Simplex(simplex.core, eta), tuple(bits[l] for l in keep), tuple(sorted(repeats, reverse=True))


def prism(space: SimplicialSet) -> Prism:
    guard_cells(space)
    simplices: Dict[int, List[str]] = {}
    origins: Dict[SimplexRef, Tuple[Simplex, Tuple[int, ...]]] = {}
    for core in space.all_refs():
        m = core.dim
        for jump in range(m + 2):
            bits = (0,) * jump + (1,) * (m + 1 - jump)
            origins[SimplexRef(m, _prism_id(core, bits))] = (Simplex.of(core), bits)
        for j in range(m + 1):
            eta = codegeneracy_array(j, m)
            bits = (0,) * (j + 1) + (1,) * (m + 1 - j)
            origins[SimplexRef(m + 1, _prism_id(core, bits))] = (Simplex(core, eta), bits)
    for ref in origins:
        simplices.setdefault(ref.dim, []).append(ref.id)
    faces = {}
    for ref, (simplex, bits) in origins.items():
        if ref.dim == 0:
            continue
        entries = []
        for i in range(ref.dim + 1):
            face = face_of(space, simplex, i)
            core, face_bits, word = _normalize_pair(face, bits[:i] + bits[i + 1:])
            entries.append(Face(SimplexRef(core.dim, _prism_id(core.core, face_bits)), word))
        faces[ref] = entries
    top = max(simplices, default=-1)
    for dim in range(top + 1):
        simplices.setdefault(dim, [])
    product = guard_cells(SimplicialSet.build(simplices, faces, f"{space.name or 'space'}xI"), "prism")

    def end(value):
        return SimplicialMap(space, product, tuple(
            (ref, Simplex.of(SimplexRef(ref.dim, _prism_id(ref, (value,) * (ref.dim + 1)))))
            for ref in space.all_refs()
        ))

    projection = SimplicialMap(product, space, tuple((ref, simplex) for ref, (simplex, _) in origins.items()))
    log_info(
        f"Built prism over {space}",
        {"space": space.name, "cells": product.cell_count},
    )
    return Prism(space, product, tuple(origins.items()), end(0), end(1), projection)
