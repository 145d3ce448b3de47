from rest_framework import serializers
from sympy.polys.domains import QQ

from .exceptions import SuperpointError
from .services.classify_service import CANDIDATE_TABLE, ActionCandidate
from .services.coaction_service import Coaction, coaction_table
from .services.fieldtheory_service import Geometry, TwistSpec, representation_table
from .services.forms_service import SullivanForm
from .services.simplicial_service import Face, SimplexRef, SimplicialSet, coordinate_table, space_fingerprint
from .services.superalg_service import (
    SuperPolynomial,
    VariableTable,
    parse_coefficient,
    prime_field,
    to_terms,
)


def parse_ref(text, field_name):
    try:
        return SimplexRef.parse(text)
    except ValueError:
        raise serializers.ValidationError({field_name: [f"Invalid simplex reference: '{text}'"]})


class TermSerializer(serializers.Serializer):
    coeff = serializers.CharField(help_text="Rational coefficient as 'p/q' or an integer")
    even = serializers.ListField(
        child=serializers.IntegerField(min_value=0),
        help_text="Exponent of each even variable, in table order"
    )
    odd = serializers.ListField(
        child=serializers.IntegerField(min_value=0),
        required=False,
        default=list,
        help_text="Indices of the odd variables in the monomial (any order; the Koszul sign is applied)"
    )

    def validate_coeff(self, value):
        try:
            parse_coefficient(value)
        except ValueError as error:
            raise serializers.ValidationError(str(error))
        return value


def build_polynomial(table: VariableTable, terms, field_name, domain=QQ) -> SuperPolynomial:
    """Turn validated term dicts into a polynomial over ``table``."""
    try:
        return SuperPolynomial.from_terms(
            table, [(term["coeff"], term["even"], term.get("odd", [])) for term in terms], domain
        )
    except (SuperpointError, ValueError) as error:
        message = getattr(error, "message", str(error))
        raise serializers.ValidationError({field_name: [message]})


class FaceSerializer(serializers.Serializer):
    ref = serializers.CharField(help_text="Nondegenerate core of the face as '<dim>/<id>'")
    degen = serializers.ListField(
        child=serializers.IntegerField(min_value=0),
        required=False,
        default=list,
        help_text="Degeneracy word i1 > i2 > ... applied to the core"
    )


class SimplicialSetSerializer(serializers.Serializer):
    name = serializers.CharField(required=False, allow_blank=True, default="", help_text="Display name of the space")
    dims = serializers.DictField(
        child=serializers.ListField(child=serializers.CharField()),
        help_text="Nondegenerate simplex ids per dimension, keyed by the dimension as a string"
    )
    faces = serializers.DictField(
        child=FaceSerializer(many=True),
        required=False,
        default=dict,
        help_text="Faces d_0..d_n of each positive-dimensional simplex, keyed by '<dim>/<id>'"
    )

    def validate_dims(self, value):
        levels = {}
        for key, ids in value.items():
            if not str(key).isdigit():
                raise serializers.ValidationError(f"Dimension key '{key}' is not a natural number")
            if len(set(ids)) != len(ids):
                raise serializers.ValidationError(f"Duplicate simplex ids in dimension {key}")
            levels[int(key)] = list(ids)
        return levels

    def validate(self, attrs):
        faces = {}
        for key, entries in attrs.get("faces", {}).items():
            ref = parse_ref(key, "faces")
            faces[ref] = [Face(parse_ref(entry["ref"], "faces"), tuple(entry["degen"])) for entry in entries]
        attrs["faces"] = faces
        return attrs

    def create(self, validated_data):
        return SimplicialSet.build(validated_data["dims"], validated_data["faces"], validated_data.get("name", ""))

    @staticmethod
    def payload(space: SimplicialSet) -> dict:
        return {"name": space.name, **space.as_dict()}


class FormSerializer(serializers.Serializer):
    space_fingerprint = serializers.CharField(
        required=False,
        help_text="Fingerprint of the space the form lives on; checked when present"
    )
    cylinder = serializers.BooleanField(
        required=False,
        default=False,
        help_text="Whether values carry the cylinder variables t, dt"
    )
    values = serializers.DictField(
        child=TermSerializer(many=True),
        help_text="Polynomial value on each nondegenerate simplex, keyed by '<dim>/<id>'"
    )

    def validate(self, attrs):
        space = self.context["space"]
        fingerprint = attrs.get("space_fingerprint")
        if fingerprint and fingerprint != space_fingerprint(space):
            raise serializers.ValidationError({"space_fingerprint": [f"Form was written for another space ({fingerprint})"]})
        values = {}
        for key, terms in attrs["values"].items():
            ref = parse_ref(key, "values")
            if ref not in space:
                raise serializers.ValidationError({"values": [f"{ref} is not a simplex of {space}"]})
            values[ref] = build_polynomial(coordinate_table(ref.dim, attrs["cylinder"]), terms, "values")
        attrs["values"] = values
        return attrs

    def create(self, validated_data):
        try:
            return SullivanForm.build(self.context["space"], validated_data["values"], validated_data["cylinder"])
        except SuperpointError as error:
            raise serializers.ValidationError({"values": [error.message]})

    @staticmethod
    def payload(form: SullivanForm) -> dict:
        return {
            "space_fingerprint": space_fingerprint(form.space),
            "cylinder": form.cylinder,
            "values": {str(ref): to_terms(value) for ref, value in form.value_data if not value.is_zero},
        }


class TwistFamilySerializer(serializers.Serializer):
    kind = serializers.ChoiceField(
        choices=["untwisted", "degree", "basic", "differential", "general"],
        help_text="Twist family"
    )
    row = serializers.CharField(required=False, default="", allow_blank=True, help_text="Row of the general twist family")
    k = serializers.IntegerField(required=False, default=0, help_text="Degree of ω")
    n = serializers.IntegerField(required=False, default=0, help_text="Degree of α, or of the degree twist")
    m = serializers.IntegerField(required=False, default=0, help_text="Power of ω in the twisting equation")
    a = serializers.CharField(required=False, default="0", help_text="Scalar a as 'p/q'")
    f = serializers.ListField(
        child=serializers.CharField(),
        required=False,
        default=list,
        help_text="Coefficients of f(y) from the constant term up"
    )
    rho = TermSerializer(many=True, required=False, help_text="Group-like ρ in Q[x, e] for basic twists")
    label = serializers.CharField(required=False, default="L", help_text="Name of the rank one module")

    def validate_a(self, value):
        try:
            return parse_coefficient(value)
        except ValueError as error:
            raise serializers.ValidationError(str(error))

    def validate_f(self, value):
        try:
            return tuple(parse_coefficient(c) for c in value)
        except ValueError as error:
            raise serializers.ValidationError(str(error))


class TwistSpecSerializer(serializers.Serializer):
    geometry = serializers.ChoiceField(
        choices=[g.value for g in Geometry],
        help_text="One of the five geometries"
    )
    family = TwistFamilySerializer(help_text="Family and parameters of the twist")

    def create(self, validated_data):
        family = validated_data["family"]
        rho = None
        if family.get("rho") is not None:
            rho = build_polynomial(representation_table(), family["rho"], "rho")
        return TwistSpec(
            geometry=Geometry.parse(validated_data["geometry"]),
            family=family["kind"],
            row=family["row"],
            k=family["k"],
            n=family["n"],
            m=family["m"],
            a=family["a"],
            f=family["f"],
            rho=rho,
            label=family["label"],
        )


class CandidateSerializer(serializers.Serializer):
    f0 = TermSerializer(many=True, help_text="f0(x, y) as terms with even exponents [i, j]")
    f1 = TermSerializer(many=True, required=False, default=list, help_text="f1(x, y), the coefficient of d*e")
    g0 = TermSerializer(many=True, help_text="g0(x, y), the coefficient of e")
    g1 = TermSerializer(many=True, required=False, default=list, help_text="g1(x, y), the coefficient of d")
    field = serializers.IntegerField(required=False, min_value=2, help_text="Work over F_p instead of Q")

    def create(self, validated_data):
        domain = prime_field(validated_data["field"]) if validated_data.get("field") else QQ
        polynomials = []
        for name in ("f0", "f1", "g0", "g1"):
            terms = validated_data.get(name, [])
            if any(term.get("odd") for term in terms):
                raise serializers.ValidationError({name: ["Action polynomials have no odd variables"]})
            polynomials.append(build_polynomial(CANDIDATE_TABLE, terms, name, domain))
        return ActionCandidate(*polynomials)


class CoactionSerializer(serializers.Serializer):
    evens = serializers.ListField(child=serializers.CharField(), default=list, help_text="Even generators")
    odds = serializers.ListField(child=serializers.CharField(), default=list, help_text="Odd generators")
    images = serializers.DictField(
        child=TermSerializer(many=True),
        help_text="Image of each generator over the algebra with x, e adjoined"
    )
    name = serializers.CharField(required=False, default="", allow_blank=True)

    def create(self, validated_data):
        try:
            algebra = VariableTable(validated_data["evens"], validated_data["odds"])
            target = coaction_table(algebra)
        except SuperpointError as error:
            raise serializers.ValidationError({"evens": [error.message]})
        unknown = set(validated_data["images"]) - set(algebra.generators)
        if unknown:
            raise serializers.ValidationError({"images": [f"Unknown generators: {', '.join(sorted(unknown))}"]})
        images = {
            name: build_polynomial(target, terms, "images") for name, terms in validated_data["images"].items()
        }
        return Coaction.from_mapping(algebra, images, validated_data["name"])

