"""JSON file formats: scenario input (``bellkit-scenario/1``) and report output (``bellkit-report/1``).

Complex numbers are ``[re, im]`` pairs, vectors are lists of pairs and
matrices are row-major lists of rows.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import numpy as np

from .errors import BellkitError, ParseError, ValidationError
from .hilbert import density_from_matrix, pure_density
from .measurement import OUTCOME_KEYS, make_measurement
from .scenario import (
    CATEGORY_NAMES,
    SETTING_NAMES,
    SETTINGS,
    AnalysisReport,
    JointTables,
    QuantumModel,
    scenario_probabilities,
)

SCENARIO_FORMAT = "bellkit-scenario/1"
REPORT_FORMAT = "bellkit-report/1"
PARSE_TABLE_TOL = 1e-6


def encode_complex_array(a) -> list:
    a = np.asarray(a, dtype=complex)
    if a.ndim == 0:
        return [float(a.real), float(a.imag)]
    return [encode_complex_array(x) for x in a]


def decode_complex_array(obj, shape: tuple, path: str) -> np.ndarray:
    try:
        arr = np.array(obj, dtype=float)
    except (TypeError, ValueError):
        raise ValidationError("expected nested [re, im] pairs of numbers", path) from None
    if arr.shape != shape + (2,):
        raise ValidationError(f"expected shape {shape} of [re, im] pairs, got {arr.shape[:-1] if arr.ndim else ()}", path)
    if not np.all(np.isfinite(arr)):
        raise ValidationError("non-finite number", path)
    return arr[..., 0] + 1j * arr[..., 1]


@dataclass(frozen=True, eq=False)
class ScenarioFile:
    kind: str  # "tables" or "model"
    tables: Optional[JointTables] = None
    model: Optional[QuantumModel] = None
    state_hint: Optional[Any] = None
    adjustments: Dict[str, float] = field(default_factory=dict)  # tag -> sum before renormalizing
    digest: str = ""

    def joint_tables(self) -> JointTables:
        if self.tables is not None:
            return self.tables
        return scenario_probabilities(self.model)


def _parse_tables(obj, path: str):
    if not isinstance(obj, dict):
        raise ValidationError("expected an object keyed AB, ABp, ApB, ApBp", path)
    out, adjustments = {}, {}
    for tag in SETTINGS:
        tpath = f"{path}.{tag}"
        t = obj.get(tag)
        if not isinstance(t, dict):
            raise ValidationError("missing table", tpath)
        try:
            p = np.array([float(t[k]) for k in OUTCOME_KEYS])
        except KeyError as e:
            raise ValidationError(f"missing key {e.args[0]!r}", tpath) from None
        except (TypeError, ValueError):
            raise ValidationError("probabilities must be numbers", tpath) from None
        if not np.all(np.isfinite(p)) or np.any(p < -PARSE_TABLE_TOL):
            raise ValidationError("probabilities must be finite and non-negative", tpath)
        s = float(p.sum())
        if abs(s - 1.0) > PARSE_TABLE_TOL:
            raise ValidationError(f"probabilities sum to {s!r}, not 1", tpath)
        p = np.clip(p, 0.0, None)
        if float(p.sum()) != 1.0:
            adjustments[tag] = s
            p = p / p.sum()
        out[tag] = p
    return JointTables(**out), adjustments


def _parse_state(obj, path: str):
    if not isinstance(obj, dict) or not ({"vector", "density"} & set(obj)):
        raise ValidationError('expected {"vector": ...} or {"density": ...}', path)
    try:
        if "vector" in obj:
            return pure_density(decode_complex_array(obj["vector"], (4,), f"{path}.vector"))
        return density_from_matrix(decode_complex_array(obj["density"], (4, 4), f"{path}.density"))
    except ValidationError:
        raise
    except BellkitError as e:
        raise ValidationError(str(e), path) from None


def _parse_model(doc) -> QuantumModel:
    state = _parse_state(doc.get("state"), "state")
    ms_obj = doc.get("measurements")
    if not isinstance(ms_obj, dict):
        raise ValidationError("expected an object keyed AB, ABp, ApB, ApBp", "measurements")
    ms = {}
    for tag in SETTINGS:
        mpath = f"measurements.{tag}"
        m = ms_obj.get(tag)
        if not isinstance(m, dict):
            raise ValidationError("missing measurement", mpath)
        basis = decode_complex_array(m.get("basis"), (4, 4), f"{mpath}.basis")
        labels = m.get("eigenvalues", [1, -1, -1, 1])
        if not (isinstance(labels, list) and len(labels) == 4 and all(isinstance(x, (int, float)) for x in labels)):
            raise ValidationError("expected four real eigenvalues", f"{mpath}.eigenvalues")
        try:
            ms[tag] = make_measurement(basis, labels, tag=tag)
        except BellkitError as e:
            raise ValidationError(str(e), f"{mpath}.basis") from None
    return QuantumModel(state, ms)


def canonical_digest(doc) -> str:
    text = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    return "sha256:" + hashlib.sha256(text.encode("utf-8")).hexdigest()


def parse_scenario(text: str) -> ScenarioFile:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON at line {e.lineno} column {e.colno}: {e.msg}") from None
    if not isinstance(doc, dict):
        raise ValidationError("expected a JSON object", "$")
    if doc.get("format") != SCENARIO_FORMAT:
        raise ValidationError(f"expected {SCENARIO_FORMAT!r}, got {doc.get('format')!r}", "format")
    kind = doc.get("kind")
    digest = canonical_digest(doc)
    if kind == "tables":
        tables, adjustments = _parse_tables(doc.get("tables"), "tables")
        hint = None
        if "state_hint" in doc:
            hint = _parse_state(doc["state_hint"], "state_hint")
        return ScenarioFile("tables", tables=tables, state_hint=hint, adjustments=adjustments, digest=digest)
    if kind == "model":
        return ScenarioFile("model", model=_parse_model(doc), digest=digest)
    raise ValidationError(f"expected 'tables' or 'model', got {kind!r}", "kind")


def tables_document(t: JointTables) -> dict:
    return {"format": SCENARIO_FORMAT, "kind": "tables", "tables": t.to_dict()}


def model_document(model: QuantumModel) -> dict:
    pure = model.state.pure_vector()
    state = {"vector": encode_complex_array(pure)} if pure is not None else {
        "density": encode_complex_array(model.state.matrix)
    }
    return {
        "format": SCENARIO_FORMAT,
        "kind": "model",
        "state": state,
        "measurements": {
            tag: {"basis": encode_complex_array(m.basis), "eigenvalues": list(m.eigenvalues)}
            for tag, m in model.measurements.items()
        },
    }


@dataclass(frozen=True, eq=False)
class ReportFile:
    command: str
    input_digest: str
    analysis: AnalysisReport
    adjustments: Dict[str, float] = field(default_factory=dict)
    lhv: Optional[dict] = None
    synthesis: Optional[dict] = None

    def to_dict(self) -> dict:
        return {
            "format": REPORT_FORMAT,
            "command": self.command,
            "input_digest": self.input_digest,
            "analysis": self.analysis.to_dict(),
            "normalization_adjustments": dict(self.adjustments),
            "lhv": self.lhv,
            "synthesis": self.synthesis,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ReportFile":
        if d.get("format") != REPORT_FORMAT:
            raise ValidationError(f"expected {REPORT_FORMAT!r}", "format")
        return cls(
            command=d["command"],
            input_digest=d["input_digest"],
            analysis=AnalysisReport.from_dict(d["analysis"]),
            adjustments=dict(d.get("normalization_adjustments") or {}),
            lhv=d.get("lhv"),
            synthesis=d.get("synthesis"),
        )


def parse_report(text: str) -> ReportFile:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e.msg}") from None
    return ReportFile.from_dict(doc)


def _fmt(x: float) -> str:
    return f"{x:+.6f}"


def render_report(r: ReportFile, mode: str = "text") -> str:
    if mode == "json":
        return json.dumps(r.to_dict(), indent=2) + "\n"
    a = r.analysis
    lines = [f"bellkit report ({r.command})", f"input: {r.input_digest}", ""]
    lines.append("setting    p11       p12       p21       p22       E")
    for tag in SETTINGS:
        t = a.tables[tag]
        cells = "  ".join(f"{x:.6f}" for x in t)
        lines.append(f"{SETTING_NAMES[tag]:<9}  {cells}  {_fmt(a.expectations[tag])}")
    lines.append("")
    lines.append(f"Delta = E(A'B') + E(AB') + E(A'B) - E(AB) = {a.delta:.10g}")
    lines.append(f"max |CHSH| over sign variants = {a.delta_max_sym:.10g}")
    if a.bell_expectation is not None:
        lines.append(f"<B> from the Bell operator = {a.bell_expectation:.10g}")
    lines.append("")
    lines.append("marginal law deviations:")
    for label, v in a.marginal_deviations.items():
        lines.append(f"  {label:<18} {v:.3e}")
    lines.append(f"  {'max':<18} {a.marginal_max:.3e}")
    lines.append("")
    name = CATEGORY_NAMES[a.category]
    label = name if a.category == "no-violation" else f"{a.category} {name}"
    lines.append(f"category: {label}")
    lines.append(f"entangled measurements required: {'yes' if a.entangled_measurements_required else 'no'}")
    if a.entangled_state is not None:
        lines.append(f"entangled state: {'yes' if a.entangled_state else 'no'}")
    if a.measurement_kinds:
        kinds = ", ".join(f"{SETTING_NAMES[t]}={k}" for t, k in a.measurement_kinds.items())
        lines.append(f"measurements: {kinds}")
    if r.adjustments:
        adj = ", ".join(f"{SETTING_NAMES[t]} (sum was {s!r})" for t, s in r.adjustments.items())
        lines.append(f"renormalized tables: {adj}")
    if r.lhv is not None:
        lines.append("")
        if r.lhv["feasible"]:
            lines.append(f"LHV model: feasible (reconstruction error {r.lhv['residual']:.3e})")
        else:
            kind, idx, amount = r.lhv["witness"]
            lines.append(f"LHV model: infeasible ({kind} witness {idx}, excess {amount:.6g})")
    if r.synthesis is not None:
        s = r.synthesis
        lines.append("")
        lines.append(f"synthesis: {s['method']}, residual {s['residual']:.3e}")
        lines.append(f"  target category {s['target_category']}, model category {s['model_category']}")
    return "\n".join(lines) + "\n"
