"""JSON problem descriptions: schema, parsing, and construction of the math objects.

Indices in JSON are 1-based (``i < j`` for matrix entries); everything built
from a config uses 0-based coordinates, reordered so that the positive
coordinates of r come first.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Mapping

import jsonschema

from .exact import ExactScalar, ThetaMatrix
from .kms import Measure
from .wick import DynamicsSpec, ToeplitzElement, defect_projection

RATIONAL_PATTERN = r"^-?[0-9]+(/[0-9]*[1-9][0-9]*)?$"
FAMILIES = ("kms", "ground", "kms0plus", "kms0")

_rational = {"type": "string", "pattern": RATIONAL_PATTERN}
_int_vec = {"type": "array", "items": {"type": "integer", "minimum": 0}}

_measure = {
    "type": "array",
    "minItems": 1,
    "items": {
        "type": "object",
        "required": ["weight", "angles"],
        "additionalProperties": False,
        "properties": {
            "weight": {"type": "number", "exclusiveMinimum": 0},
            "angles": {"type": "array", "items": {"type": "number", "minimum": 0, "exclusiveMaximum": 1}},
        },
    },
}

SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "Toeplitz noncommutative torus problem",
    "type": "object",
    "required": ["n", "theta"],
    "additionalProperties": False,
    "properties": {
        "n": {"type": "integer", "minimum": 1},
        "theta": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["i", "j"],
                "additionalProperties": False,
                "properties": {
                    "i": {"type": "integer", "minimum": 1},
                    "j": {"type": "integer", "minimum": 2},
                    "rational": _rational,
                    "symbols": {"type": "object", "additionalProperties": _rational},
                },
            },
        },
        "bindings": {"type": "object", "additionalProperties": {"type": "number"}},
        "r": {"type": "array", "items": {"oneOf": [_rational, {"type": "number"}]}},
        "beta": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}},
        "measure": _measure,
        "invariant_measure": _measure,
        "elements": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id"],
                "additionalProperties": False,
                "properties": {
                    "id": {"type": "string", "minLength": 1},
                    "preset": {"enum": ["identity", "defect_projection"]},
                    "terms": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": ["p", "q"],
                            "additionalProperties": False,
                            "properties": {"p": _int_vec, "q": _int_vec, "re": {"type": "number"},
                                           "im": {"type": "number"}},
                        },
                    },
                },
                "oneOf": [{"required": ["preset"]}, {"required": ["terms"]}],
            },
        },
        "family": {"enum": list(FAMILIES)},
        "method": {"enum": ["closed-form", "series"]},
        "cutoff": {"type": "integer", "minimum": 1},
        "box_radius": {"type": "integer", "minimum": 0},
    },
}


class ConfigError(ValueError):
    """Malformed configuration (schema or structural)."""


class PreconditionError(ValueError):
    """Well-formed configuration that violates a mathematical requirement."""


def _canon_rational(s: str) -> str:
    return str(Fraction(s))


@dataclass(frozen=True)
class ProblemConfig:
    n: int
    theta: tuple[tuple[int, int, str, tuple[tuple[str, str], ...]], ...]
    bindings: tuple[tuple[str, float], ...] = ()
    r: tuple[str | float, ...] = ()
    beta: tuple[float, ...] = ()
    measure: tuple[tuple[float, tuple[float, ...]], ...] | None = None
    invariant_measure: tuple[tuple[float, tuple[float, ...]], ...] | None = None
    elements: tuple[tuple[str, Any], ...] = ()
    family: str = "kms"
    method: str = "closed-form"
    cutoff: int = 40
    box_radius: int | None = None

    @classmethod
    def from_json(cls, data: Mapping) -> ProblemConfig:
        try:
            jsonschema.validate(data, SCHEMA)
        except jsonschema.ValidationError as exc:
            raise ConfigError(f"schema violation at {list(exc.absolute_path)}: {exc.message}") from exc
        n = data["n"]
        entries = []
        seen = set()
        for e in data["theta"]:
            i, j = e["i"], e["j"]
            if not i < j <= n:
                raise ConfigError(f"theta entry ({i}, {j}) must satisfy 1 <= i < j <= n")
            if (i, j) in seen:
                raise ConfigError(f"theta entry ({i}, {j}) given twice")
            seen.add((i, j))
            syms = tuple(sorted((k, _canon_rational(v)) for k, v in e.get("symbols", {}).items()
                                if Fraction(v) != 0))
            entries.append((i, j, _canon_rational(e.get("rational", "0")), syms))
        r = tuple(_canon_rational(v) if isinstance(v, str) else float(v) for v in data.get("r", []))
        if r and len(r) != n:
            raise ConfigError(f"r has length {len(r)}, expected {n}")
        elements = []
        for el in data.get("elements", []):
            if "preset" in el:
                elements.append((el["id"], el["preset"]))
            else:
                terms = []
                for t in el["terms"]:
                    if len(t["p"]) != n or len(t["q"]) != n:
                        raise ConfigError(f"element {el['id']!r} has a key of the wrong length")
                    terms.append((tuple(t["p"]), tuple(t["q"]), float(t.get("re", 0.0)), float(t.get("im", 0.0))))
                elements.append((el["id"], tuple(terms)))
        ids = [e[0] for e in elements]
        if len(set(ids)) != len(ids):
            raise ConfigError("element ids must be unique")
        def atoms(key):
            if key not in data:
                return None
            return tuple((float(a["weight"]), tuple(float(x) for x in a["angles"])) for a in data[key])

        return cls(
            n=n,
            theta=tuple(sorted(entries)),
            bindings=tuple(sorted((k, float(v)) for k, v in data.get("bindings", {}).items())),
            r=r,
            beta=tuple(float(b) for b in data.get("beta", [])),
            measure=atoms("measure"),
            invariant_measure=atoms("invariant_measure"),
            elements=tuple(elements),
            family=data.get("family", "kms"),
            method=data.get("method", "closed-form"),
            cutoff=data.get("cutoff", 40),
            box_radius=data.get("box_radius"),
        )

    def to_json(self) -> dict:
        out: dict[str, Any] = {
            "n": self.n,
            "theta": [{"i": i, "j": j, "rational": rat, "symbols": dict(syms)} for i, j, rat, syms in self.theta],
            "bindings": dict(self.bindings),
            "r": list(self.r),
            "beta": list(self.beta),
            "elements": [],
            "family": self.family,
            "method": self.method,
            "cutoff": self.cutoff,
        }
        for name, body in self.elements:
            if isinstance(body, str):
                out["elements"].append({"id": name, "preset": body})
            else:
                out["elements"].append({"id": name, "terms": [
                    {"p": list(p), "q": list(q), "re": re_, "im": im} for p, q, re_, im in body]})
        for key in ("measure", "invariant_measure"):
            value = getattr(self, key)
            if value is not None:
                out[key] = [{"weight": w, "angles": list(a)} for w, a in value]
        if self.box_radius is not None:
            out["box_radius"] = self.box_radius
        return out

    # construction of math objects -------------------------------------------------

    @property
    def r_is_exact(self) -> bool:
        return all(isinstance(v, str) for v in self.r)

    def dynamics(self) -> DynamicsSpec:
        values = list(self.r) if self.r else ["0"] * self.n
        parsed = [Fraction(v) if isinstance(v, str) else v for v in values]
        if any(v < 0 for v in parsed):
            raise PreconditionError("r must have nonnegative coordinates")
        return DynamicsSpec.from_vector(parsed)

    def theta_input(self) -> ThetaMatrix:
        """Theta in the coordinates of the config file."""
        upper = {}
        for i, j, rat, syms in self.theta:
            upper[(i - 1, j - 1)] = ExactScalar(Fraction(rat), {k: Fraction(v) for k, v in syms})
        try:
            return ThetaMatrix.from_upper(self.n, upper, dict(self.bindings))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def theta_matrix(self) -> ThetaMatrix:
        """Theta reordered so that the positive coordinates of r come first."""
        return self.theta_input().permuted(self.dynamics().perm)

    def exact_r(self) -> tuple[Fraction, ...]:
        if not self.r_is_exact:
            raise PreconditionError("this computation needs r as exact rationals (strings)")
        return self.dynamics().exact or ()

    def element_list(self, theta: ThetaMatrix | None = None) -> list[tuple[str, ToeplitzElement]]:
        perm = self.dynamics().perm
        theta = self.theta_matrix() if theta is None else theta
        out = []
        for name, body in self.elements:
            if body == "identity":
                x = ToeplitzElement.identity(theta)
            elif body == "defect_projection":
                x = defect_projection(self.dynamics().k, theta)
            else:
                terms: dict = {}
                for p, q, re_, im in body:
                    key = (tuple(p[i] for i in perm), tuple(q[i] for i in perm))
                    terms[key] = terms.get(key, 0) + complex(re_, im)
                x = ToeplitzElement(theta, terms)
            out.append((name, x))
        return out

    def measure_for(self, dim: int, invariant: bool = False) -> Measure:
        """Trace parameters on T^dim; ``invariant`` selects the measure used by KMS_0."""
        atoms = self.invariant_measure if invariant else self.measure
        if atoms is None:
            return Measure.point((0.0,) * dim)
        try:
            m = Measure(atoms)
        except ValueError as exc:
            raise PreconditionError(f"invalid measure: {exc}") from exc
        if m.dim != dim:
            raise PreconditionError(f"measure lives on T^{m.dim} but this family needs T^{dim}")
        return m


def theta_to_json(theta: ThetaMatrix) -> dict:
    """Upper-triangular entries with 1-based indices, as in config files."""
    entries = []
    for i in range(theta.n):
        for j in range(i + 1, theta.n):
            e = theta.entries[i][j]
            if e.rational or e.symbols:
                entries.append({"i": i + 1, "j": j + 1, "rational": str(e.rational),
                                "symbols": {k: str(v) for k, v in e.symbols}})
    return {"n": theta.n, "theta": entries, "bindings": dict(theta.bindings)}
