"""Problem files: JSON documents describing A, B and tau = (sigma, delta).

Layout::

    {
      "name": "...",
      "field": "rational" | <prime>,
      "parameters": {"p": "1"},
      "A": {"generators": [...], "degrees": [...], "relations": [...]},
      "B": {...},
      "sigma": {"x1": [["p*x2", ...], ...], ...},
      "delta": {"x1": ["...", ...], ...},
      "resolutions": {"A": {"shifts": [...], "rows": [...]}, "B": {...}},
      "bounds": {"D": 8, "H": 6},
      "assertions": ["noetherian" | "koszul"]
    }

``delta``, ``resolutions``, ``bounds`` and ``assertions`` are optional.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from pathlib import Path

from .exactla import GF, QQ, Field
from .freealg import Alphabet, ParseError, parse_expr
from .galgebra import GradedAlgebra
from .resolution import FreeResolution, resolution_from_rows
from .twist import MatrixAlgebraHom, SigmaDerivation, TwistData

DEFAULT_D = 8
DEFAULT_H = 6


class ProblemError(ValueError):
    """Malformed problem file; ``where`` is a JSON path such as ``A.relations[1]``."""

    def __init__(self, message: str, where: str = "", offset: int | None = None, path: str = ""):
        self.message = message
        self.where = where
        self.offset = offset
        self.path = path
        loc = f"{path}:" if path else ""
        loc += where
        if offset is not None:
            loc += f" (offset {offset})"
        super().__init__(f"{loc}: {message}" if loc else message)


@dataclass
class Problem:
    name: str
    field: Field
    params: dict
    A: GradedAlgebra
    B: GradedAlgebra
    data: TwistData
    D: int
    H: int
    assertions: list
    resolutions: dict = dc_field(default_factory=dict)
    source: dict = dc_field(default_factory=dict)

    def resolution(self, which: str) -> FreeResolution | None:
        return self.resolutions.get(which)


def _field(spec) -> Field:
    if spec in (None, "rational", "rationals", "QQ"):
        return QQ
    try:
        p = int(spec)
    except (TypeError, ValueError):
        raise ProblemError(f"unknown field {spec!r}", "field") from None
    if p < 2 or any(p % q == 0 for q in range(2, int(p ** 0.5) + 1)):
        raise ProblemError(f"{p} is not a prime", "field")
    return GF(p)


def _algebra(spec, key, field, params, D) -> GradedAlgebra:
    if not isinstance(spec, dict):
        raise ProblemError("expected an object", key)
    gens = spec.get("generators")
    if not gens or not all(isinstance(g, str) for g in gens):
        raise ProblemError("generators must be a nonempty list of names", f"{key}.generators")
    degs = spec.get("degrees", [1] * len(gens))
    if len(degs) != len(gens) or not all(isinstance(d, int) and d >= 1 for d in degs):
        raise ProblemError("degrees must be positive integers, one per generator", f"{key}.degrees")
    rels = spec.get("relations", [])
    try:
        alpha = Alphabet(gens, degs)
    except ValueError as e:
        raise ProblemError(str(e), f"{key}.generators") from None
    polys = []
    for k, r in enumerate(rels):
        try:
            polys.append(parse_expr(r, alpha, field, params))
        except ParseError as e:
            raise ProblemError(str(e), f"{key}.relations[{k}]", e.offset) from None
    try:
        return GradedAlgebra(alpha, polys, D, field, name=key)
    except ValueError as e:
        raise ProblemError(str(e), f"{key}.relations") from None


def _parse_entry(A, text, params, degree, where):
    if not isinstance(text, str):
        text = str(text)
    try:
        return A.parse(text, params, degree)
    except ParseError as e:
        raise ProblemError(str(e), where, e.offset) from None


def load_problem(source, params: dict | None = None, field: str | int | None = None,
                 D: int | None = None, H: int | None = None, path: str = "") -> Problem:
    """Build a :class:`Problem` from a dict, JSON text or a file path.

    ``params``, ``field``, ``D`` and ``H`` override the file.
    """
    if isinstance(source, (str, Path)) and not str(source).lstrip().startswith("{"):
        path = path or str(source)
        try:
            text = Path(source).read_text()
        except OSError as e:
            raise ProblemError(f"cannot read file: {e.strerror}", path=path) from None
        source = text
    if isinstance(source, str):
        try:
            source = json.loads(source)
        except json.JSONDecodeError as e:
            raise ProblemError(f"invalid JSON: {e.msg}", f"line {e.lineno} column {e.colno}", path=path) from None
    try:
        return _load(source, params, field, D, H)
    except ProblemError as e:
        if path and not e.path:
            raise ProblemError(e.message, e.where, e.offset, path) from None
        raise


def _load(doc, params, field, D, H) -> Problem:
    if not isinstance(doc, dict):
        raise ProblemError("top level must be an object")
    F = _field(field if field is not None else doc.get("field"))
    raw = dict(doc.get("parameters", {}))
    raw.update(params or {})
    P = {}
    for k, v in raw.items():
        try:
            P[k] = F.parse(str(v))
        except (ValueError, ZeroDivisionError):
            raise ProblemError(f"bad value {v!r}", f"parameters.{k}") from None
    bounds = doc.get("bounds", {})
    D = D if D is not None else bounds.get("D", DEFAULT_D)
    H = H if H is not None else bounds.get("H", DEFAULT_H)
    if not isinstance(D, int) or not isinstance(H, int) or D < 2 or H < 1:
        raise ProblemError("D must be >= 2 and H >= 1", "bounds")
    for key in ("A", "B", "sigma"):
        if key not in doc:
            raise ProblemError("missing", key)
    A = _algebra(doc["A"], "A", F, P, D)
    B = _algebra(doc["B"], "B", F, P, D)
    m = B.ngens
    sig = doc["sigma"]
    if not isinstance(sig, dict):
        raise ProblemError("expected an object keyed by generators of A", "sigma")
    images = []
    for g, name in enumerate(A.alphabet.names):
        mat = sig.get(name)
        where = f"sigma.{name}"
        if mat is None:
            raise ProblemError("missing image", where)
        if len(mat) != m or any(not isinstance(r, list) or len(r) != m for r in mat):
            raise ProblemError(f"must be a {m}x{m} matrix", where)
        dg = A.alphabet.degrees[g]
        images.append([[_parse_entry(A, e, P, dg, f"{where}[{i}][{j}]") for j, e in enumerate(row)]
                       for i, row in enumerate(mat)])
    extra = set(sig) - set(A.alphabet.names)
    if extra:
        raise ProblemError(f"unknown generator {sorted(extra)[0]}", "sigma")
    try:
        sigma = MatrixAlgebraHom(A, m, images)
    except ValueError as e:
        raise ProblemError(str(e), "sigma") from None
    delta = None
    if doc.get("delta"):
        dl = doc["delta"]
        rows = []
        for g, name in enumerate(A.alphabet.names):
            vec = dl.get(name, ["0"] * m)
            where = f"delta.{name}"
            if len(vec) != m:
                raise ProblemError(f"must have {m} entries", where)
            rows.append([_parse_entry(A, e, P, A.alphabet.degrees[g] + B.alphabet.degrees[j], f"{where}[{j}]")
                         for j, e in enumerate(vec)])
        try:
            delta = SigmaDerivation(sigma, rows, B.alphabet.degrees)
        except ValueError as e:
            raise ProblemError(str(e), "delta") from None
    data = TwistData(A, B, sigma, delta)
    assertions = list(doc.get("assertions", []))
    for a in assertions:
        if a not in ("noetherian", "koszul"):
            raise ProblemError(f"unknown assertion {a!r}", "assertions")
    res = {}
    for key, spec in doc.get("resolutions", {}).items():
        alg = {"A": A, "B": B}.get(key)
        if alg is None:
            raise ProblemError("only A and B resolutions may be supplied", f"resolutions.{key}")
        try:
            res[key] = resolution_from_rows(alg, spec["shifts"], spec["rows"], H, D, P)
        except ParseError as e:
            raise ProblemError(str(e), f"resolutions.{key}", e.offset) from None
        except (KeyError, ValueError) as e:
            raise ProblemError(str(e), f"resolutions.{key}") from None
    return Problem(doc.get("name", ""), F, P, A, B, data, D, H, assertions, res, doc)
