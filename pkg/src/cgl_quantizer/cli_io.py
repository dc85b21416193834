"""Spec and presentation (de)serialization, bundled fixtures and the end-to-end pipeline."""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Tuple, Union

import jsonschema

from .commutative import compute_b, compute_level_sets, compute_y_sequence, i_sets, poisson_matrix
from .errors import BadEpsilon, CapExceeded, CGLError, InvalidInput, ParseError, SchemaError
from .ore import DEFAULT_MAX_PEEL, OrePresentation, parse_ore
from .poisson import ExtensionSpec, format_comm, parse_comm, validate_spec
from .quantizer import QuantumPresentation, from_presentation, quantize, scaled_variant
from .quantum import check_normality
from .scalars import QLaurent, format_scalar, parse_scalar

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_INPUT = 2
EXIT_CAP = 3

_INT_MATRIX = {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}}

SPEC_SCHEMA = {
    "type": "object",
    "required": ["n", "r", "lambda", "h", "h_prime"],
    "properties": {
        "name": {"type": "string"},
        "description": {"type": "string"},
        "n": {"type": "integer", "minimum": 1},
        "r": {"type": "integer", "minimum": 0},
        "lambda": _INT_MATRIX,
        "h": _INT_MATRIX,
        "h_prime": _INT_MATRIX,
        "delta": {
            "type": "object",
            "propertyNames": {"pattern": "^[1-9][0-9]*$"},
            "additionalProperties": {
                "type": "object",
                "propertyNames": {"pattern": "^[1-9][0-9]*$"},
                "additionalProperties": {"type": "string"},
            },
        },
        "expected": {"type": "object"},
    },
}

PRESENTATION_SCHEMA = {
    "type": "object",
    "required": ["n", "lambda_matrix"],
    "properties": {
        "n": {"type": "integer", "minimum": 1},
        "lambda_matrix": _INT_MATRIX,
        "delta_table": {
            "type": "object",
            "propertyNames": {"pattern": "^[1-9][0-9]*,[1-9][0-9]*$"},
            "additionalProperties": {"type": "string"},
        },
    },
}


# ---------------------------------------------------------------------------
# JSON helpers
# ---------------------------------------------------------------------------

def _load_json(text: str, source: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def _check_schema(doc, schema, source: str) -> None:
    try:
        jsonschema.validate(doc, schema)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "(root)"
        raise SchemaError(f"{source}: field {where}: {exc.message}") from None


def _read(path_or_text: Union[str, Path]) -> Tuple[str, str]:
    s = str(path_or_text)
    if s.lstrip().startswith("{"):
        return s, "<text>"
    p = Path(s)
    if not p.exists():
        bundled = _bundled_path(p)
        if bundled is None:
            raise ParseError(f"{s}: no such file")
        return bundled.read_text(), s
    return p.read_text(), s


# ---------------------------------------------------------------------------
# specs
# ---------------------------------------------------------------------------

def spec_from_json(doc: Mapping, source: str = "<spec>") -> ExtensionSpec:
    _check_schema(doc, SPEC_SCHEMA, source)
    n, r = doc["n"], doc["r"]
    for key in ("lambda", "h", "h_prime"):
        rows = doc[key]
        if len(rows) != n:
            raise SchemaError(f"{source}: field {key}: {len(rows)} rows, expected n = {n}")
        for k, row in enumerate(rows):
            if len(row) != r:
                raise SchemaError(f"{source}: field {key}/{k}: length {len(row)}, expected r = {r}")
    delta = {}
    for js, row in (doc.get("delta") or {}).items():
        j = int(js)
        for is_, text in row.items():
            i = int(is_)
            if not 1 <= i < j <= n:
                raise SchemaError(f"{source}: field delta/{js}/{is_}: need 1 <= i < j <= n")
            p = parse_comm(text, n, what=f"{source}: field delta/{js}/{is_}")
            if not p.is_polynomial():
                raise SchemaError(f"{source}: field delta/{js}/{is_}: negative exponents")
            if p:
                delta[(i, j)] = p
    return ExtensionSpec(
        n=n, r=r,
        lambdas=tuple(tuple(v) for v in doc["lambda"]),
        h=tuple(tuple(v) for v in doc["h"]),
        h_prime=tuple(tuple(v) for v in doc["h_prime"]),
        delta=delta,
        name=doc.get("name"),
    )


def parse_spec(path_or_text: Union[str, Path]) -> ExtensionSpec:
    """A spec from a JSON file path or JSON text."""
    text, source = _read(path_or_text)
    return spec_from_json(_load_json(text, source), source)


def spec_to_json(spec: ExtensionSpec) -> dict:
    delta: Dict[str, Dict[str, str]] = {}
    for (i, j), d in sorted(spec.delta.items(), key=lambda kv: (kv[0][1], kv[0][0])):
        if d:
            delta.setdefault(str(j), {})[str(i)] = format_comm(d)
    out = {}
    if spec.name:
        out["name"] = spec.name
    out.update({
        "n": spec.n, "r": spec.r,
        "lambda": [list(v) for v in spec.lambdas],
        "h": [list(v) for v in spec.h],
        "h_prime": [list(v) for v in spec.h_prime],
        "delta": delta,
    })
    return out


def print_spec(spec: ExtensionSpec) -> str:
    return json.dumps(spec_to_json(spec), indent=2)


# ---------------------------------------------------------------------------
# bundled fixtures
# ---------------------------------------------------------------------------

@dataclass
class Fixture:
    name: str
    spec: ExtensionSpec
    description: str = ""
    expected: Optional[dict] = None


def _fixture_dir():
    return resources.files("cgl_quantizer") / "fixtures"


def fixture_names() -> List[str]:
    return sorted(p.name[:-5] for p in _fixture_dir().iterdir() if p.name.endswith(".json"))


def _bundled_path(p: Path):
    """fixtures/<name>.json resolves to the bundled copy when no such file exists."""
    if p.parent.name == "fixtures" and p.suffix == ".json" and p.stem in fixture_names():
        return _fixture_dir() / p.name
    return None


def load_fixture(name: str) -> Fixture:
    if name not in fixture_names():
        raise SchemaError(f"unknown fixture {name!r}; available: {', '.join(fixture_names())}")
    doc = _load_json((_fixture_dir() / f"{name}.json").read_text(), f"fixtures/{name}.json")
    return Fixture(name, spec_from_json(doc, name), doc.get("description", ""), doc.get("expected"))


# ---------------------------------------------------------------------------
# presentations
# ---------------------------------------------------------------------------

def presentation_to_json(qp: QuantumPresentation) -> dict:
    pres, n = qp.pres, qp.n
    lam = [[0] * n for _ in range(n)]
    table = {}
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            lam[i - 1][j - 1] = pres.lam(i, j)
            lam[j - 1][i - 1] = -pres.lam(i, j)
            d = pres.relation_delta(i, j)
            if d:
                table[f"{i},{j}"] = d.to_string()
    return {
        "n": n,
        "lambda_matrix": lam,
        "delta_table": table,
        "relations": qp.relations(),
        "Y_sequence": [y.to_string() for y in qp.qys.Y],
        "epsilon": format_scalar(qp.epsilon) if qp.epsilon is not None else "1",
    }


def presentation_from_json(doc: Mapping, source: str = "<presentation>") -> OrePresentation:
    """X_i X_j = q^{-lambda_matrix[i][j]} X_j X_i + delta_table["i,j"]."""
    _check_schema(doc, PRESENTATION_SCHEMA, source)
    n = doc["n"]
    lm = doc["lambda_matrix"]
    if len(lm) != n or any(len(r) != n for r in lm):
        raise SchemaError(f"{source}: field lambda_matrix: expected an {n}x{n} matrix")
    lam = {}
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            if lm[i - 1][j - 1] != -lm[j - 1][i - 1]:
                raise SchemaError(f"{source}: field lambda_matrix: not skew-symmetric at ({i},{j})")
            lam[(i, j)] = lm[i - 1][j - 1]
    rel = {}
    for key, text in (doc.get("delta_table") or {}).items():
        i, j = (int(t) for t in key.split(","))
        if not 1 <= i < j <= n:
            raise SchemaError(f"{source}: field delta_table/{key}: need 1 <= i < j <= n")
        a = parse_ore(text, n=n, what=f"{source}: field delta_table/{key}")
        if a:
            rel[(i, j)] = a._t
    try:
        return OrePresentation.from_relations(n, lam, rel)
    except CGLError as exc:
        raise SchemaError(f"{source}: {exc}") from None


def parse_presentation(path_or_text: Union[str, Path]) -> OrePresentation:
    text, source = _read(path_or_text)
    return presentation_from_json(_load_json(text, source), source)


def parse_epsilon(text: str) -> QLaurent:
    try:
        v = parse_scalar(text)
    except InvalidInput as exc:
        raise BadEpsilon(f"epsilon {text!r}: {exc}") from None
    if not isinstance(v, QLaurent):
        raise BadEpsilon(f"epsilon {text!r} is not in Q[q, q^-1]")
    return v


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

def validation_json(spec: ExtensionSpec) -> dict:
    rep = validate_spec(spec)
    return {"ok": rep.ok, "checks": rep.to_json()}


def analysis_json(spec: ExtensionSpec) -> dict:
    ys = compute_y_sequence(spec)
    kappa = poisson_matrix(spec, ys)
    ls = compute_level_sets(ys)
    b = {}
    for k in range(1, spec.n + 1):
        if ys.p[k - 1]:
            b[str(k)] = compute_b(ys, k, kappa).to_string("y")
    return {
        "y_sequence": [format_comm(y) for y in ys.y],
        "p": list(ys.p),
        "level_sets": ls.to_json(),
        "rank": ls.rank,
        "I_sets": [list(s) for s in i_sets(ys)],
        "kappa": [list(r) for r in kappa.kappa],
        "b": b,
    }


def quantum_analysis_json(qp: QuantumPresentation) -> dict:
    normality = {}
    for j in range(1, qp.n + 1):
        ok, s = check_normality(qp.qys, j)
        normality[str(j)] = {str(i): v for i, v in s.items()}
    return {
        "Y": [y.to_string() for y in qp.qys.Y],
        "p": list(qp.qys.p),
        "l_matrix": [list(r) for r in qp.qys.l_matrix],
        "normality": normality,
    }


def audit_json(qp: QuantumPresentation) -> dict:
    return {"steps": [st.to_json(qp.n) for st in qp.steps]}


def expected_mismatches(qp: QuantumPresentation, expected: Optional[Mapping]) -> List[str]:
    """Differences between a quantization and a fixture's golden fragment."""
    if not expected:
        return []
    out = []
    pj = presentation_to_json(qp)
    if "relations" in expected and expected["relations"] != pj["relations"]:
        out.append(f"relations {pj['relations']} != expected {expected['relations']}")
    if "Y_sequence" in expected and expected["Y_sequence"] != pj["Y_sequence"]:
        out.append(f"Y_sequence {pj['Y_sequence']} != expected {expected['Y_sequence']}")
    if "l_matrix" in expected and expected["l_matrix"] != [list(r) for r in qp.qys.l_matrix]:
        out.append(f"l_matrix {qp.qys.l_matrix} != expected {expected['l_matrix']}")
    steps = {st.k: st for st in qp.steps}
    for es in expected.get("steps", []):
        st = steps.get(es["k"])
        if st is None:
            out.append(f"no step k={es['k']}")
            continue
        got = st.to_json(qp.n)
        for key, v in es.items():
            if got.get(key) != v:
                out.append(f"step k={es['k']}: {key} = {got.get(key)!r}, expected {v!r}")
    return out


# ---------------------------------------------------------------------------
# pipeline
# ---------------------------------------------------------------------------

@dataclass
class PipelineOptions:
    verify: bool = True
    seed: int = 1729
    max_peel: int = DEFAULT_MAX_PEEL
    epsilon: Optional[QLaurent] = None
    expected: Optional[dict] = None


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, InvalidInput):
        return EXIT_INPUT
    if isinstance(exc, CapExceeded):
        return EXIT_CAP
    return EXIT_VERIFY


def run_pipeline(spec: ExtensionSpec, options: Optional[PipelineOptions] = None,
                 presentation: Optional[OrePresentation] = None) -> Tuple[dict, int]:
    """validation -> analysis -> quantization -> verification, as one report and an exit code."""
    from .verifier import epsilon_check, run_verification

    opt = options or PipelineOptions()
    report: Dict = {"name": spec.name}
    val = validate_spec(spec)
    report["validation"] = {"ok": val.ok, "checks": val.to_json()}
    if not val.ok:
        report["error"] = {"type": "ValidationFailed", "message": "; ".join(
            f"{e.name}: {e.detail}" for e in val.failures())}
        return report, EXIT_INPUT
    try:
        report["analysis"] = analysis_json(spec)
        if presentation is None:
            qp = quantize(spec, opt.max_peel)
            base = qp
            if opt.epsilon is not None:
                qp = scaled_variant(qp, opt.epsilon)
        else:
            qp = base = from_presentation(spec, presentation)
        report["presentation"] = presentation_to_json(qp)
        report["quantum_analysis"] = quantum_analysis_json(qp)
        report["audit"] = audit_json(qp)
    except CGLError as exc:
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
        return report, exit_code_for(exc)
    code = EXIT_OK
    if opt.verify:
        ver = run_verification(spec, qp, opt.seed, max_peel=opt.max_peel)
        checks = ver.to_json()
        if qp is not base:
            eps = epsilon_check(base, qp)
            checks["checks"].append(eps.to_json())
            checks["ok"] = checks["ok"] and eps.passed
        report["verification"] = checks
        if not checks["ok"]:
            code = EXIT_CAP if ver.cap_exceeded else EXIT_VERIFY
    mism = expected_mismatches(qp, opt.expected) if opt.epsilon is None else []
    if opt.expected is not None:
        report["golden"] = {"ok": not mism, "mismatches": mism}
        if mism:
            code = EXIT_VERIFY
    return report, code
