"""Bell scenarios: four joint measurements on one state, CHSH and marginal analysis.

Setting tags are ``AB``, ``ABp``, ``ApB`` and ``ApBp`` (``p`` for prime).
Each outcome table is a length-4 array ordered ``(p11, p12, p21, p22)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Mapping, Optional

import numpy as np

from .errors import DistributionError, LabelError, NormalizationError, OrthonormalityError
from .hilbert import DEFAULT_TOL, Density4, as_density, as_operator, check_hermitian
from .measurement import CHSH_LABELS, OUTCOME_KEYS, Spectral4, outcome_probabilities
from .schmidt import PRODUCT_TOL, is_product_state, measurement_kind

SETTINGS = ("AB", "ABp", "ApB", "ApBp")
SETTING_NAMES = {"AB": "AB", "ABp": "AB'", "ApB": "A'B", "ApBp": "A'B'"}
TSIRELSON = 2.0 * math.sqrt(2.0)

# Delta = E(A'B') + E(AB') + E(A'B) - E(AB); the other variants move the minus sign.
CHSH_VARIANTS = tuple(
    (minus, sign) for minus in ("AB", "ABp", "ApB", "ApBp") for sign in (1, -1)
)

# (label, table X, table Y, party, row): the party-side marginal of outcome `row`
# must agree between tables X and Y.
MARGINAL_PAIRS = (
    ("A1: AB vs AB'", "AB", "ABp", "A", 0),
    ("A2: AB vs AB'", "AB", "ABp", "A", 1),
    ("A'1: A'B vs A'B'", "ApB", "ApBp", "A", 0),
    ("A'2: A'B vs A'B'", "ApB", "ApBp", "A", 1),
    ("B1: AB vs A'B", "AB", "ApB", "B", 0),
    ("B2: AB vs A'B", "AB", "ApB", "B", 1),
    ("B'1: AB' vs A'B'", "ABp", "ApBp", "B", 0),
    ("B'2: AB' vs A'B'", "ABp", "ApBp", "B", 1),
)

CATEGORY_NAMES = {
    "no-violation": "no violation (Kolmogorovian model exists)",
    "(i)": "customary quantum situation",
    "(ii)": "nonlocal non-marginal box situation 1",
    "(iii)": "nonlocal non-marginal box situation 2",
    "(iv)": "nonlocal box situation",
}

DELTA_TOL = 1e-6
MARGINAL_TOL = 1e-7


def _table(p, tol: float, where: str) -> np.ndarray:
    arr = np.array(p, dtype=float).reshape(-1)
    if arr.shape != (4,):
        raise DistributionError(f"{where}: expected four probabilities, got {arr.shape}")
    if not np.isfinite(arr).all() or (arr < -tol).any():
        raise DistributionError(f"{where}: probabilities must be finite and non-negative")
    if abs(arr.sum() - 1.0) > tol:
        raise DistributionError(f"{where}: probabilities sum to {arr.sum()!r}, not 1")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class JointTables:
    """The four outcome distributions of a Bell test."""

    AB: np.ndarray
    ABp: np.ndarray
    ApB: np.ndarray
    ApBp: np.ndarray
    tol: float = field(default=DEFAULT_TOL, repr=False)

    def __post_init__(self):
        for tag in SETTINGS:
            object.__setattr__(self, tag, _table(getattr(self, tag), self.tol, tag))

    @classmethod
    def from_mapping(cls, tables: Mapping, tol: float = DEFAULT_TOL) -> "JointTables":
        """Accept ``{tag: [p11, p12, p21, p22]}`` or ``{tag: {"p11": ..., ...}}``."""
        out = {}
        for tag in SETTINGS:
            t = tables[tag]
            if isinstance(t, Mapping):
                t = [t[k] for k in OUTCOME_KEYS]
            out[tag] = t
        return cls(tol=tol, **out)

    def __getitem__(self, tag: str) -> np.ndarray:
        if tag not in SETTINGS:
            raise KeyError(tag)
        return getattr(self, tag)

    def items(self):
        return ((tag, getattr(self, tag)) for tag in SETTINGS)

    def as_array(self) -> np.ndarray:
        return np.stack([getattr(self, tag) for tag in SETTINGS])

    def to_dict(self) -> Dict[str, Dict[str, float]]:
        return {tag: dict(zip(OUTCOME_KEYS, map(float, t))) for tag, t in self.items()}

    def max_abs_difference(self, other: "JointTables") -> float:
        return float(np.max(np.abs(self.as_array() - other.as_array())))


def correlation(table: np.ndarray) -> float:
    """E = p11 + p22 - p12 - p21."""
    return float(table[0] - table[1] - table[2] + table[3])


def correlations(t: JointTables) -> Dict[str, float]:
    return {tag: correlation(t[tag]) for tag in SETTINGS}


def chsh_delta(t: JointTables) -> float:
    e = correlations(t)
    return e["ApBp"] + e["ABp"] + e["ApB"] - e["AB"]


_CORRELATION_WEIGHTS = np.array([1.0, -1.0, -1.0, 1.0])
# row v holds the coefficients of E(AB), E(AB'), E(A'B), E(A'B') in variant v
_VARIANT_MATRIX = np.array(
    [[-sign if tag == minus else sign for tag in SETTINGS] for minus, sign in CHSH_VARIANTS], dtype=float
)


def chsh_variants_batch(tables) -> np.ndarray:
    """CHSH variants for stacked tables of shape ``(..., 4, 4)``; returns ``(..., 8)``."""
    return (np.asarray(tables, dtype=float) @ _CORRELATION_WEIGHTS) @ _VARIANT_MATRIX.T


def chsh_variants(t: JointTables) -> np.ndarray:
    """All eight CHSH expressions, in :data:`CHSH_VARIANTS` order."""
    return chsh_variants_batch(t.as_array())


def chsh_max_sym(t: JointTables) -> float:
    return float(np.abs(chsh_variants(t)).max())


@dataclass(frozen=True)
class MarginalDeviation:
    deviations: Dict[str, float]

    @property
    def values(self) -> np.ndarray:
        return np.array(list(self.deviations.values()))

    @property
    def max(self) -> float:
        return float(max(self.deviations.values()))


def _party_marginal(table: np.ndarray, party: str) -> np.ndarray:
    p = table.reshape(2, 2)
    return p.sum(axis=1) if party == "A" else p.sum(axis=0)


def marginal_deviation(t: JointTables) -> MarginalDeviation:
    devs = {}
    for label, x, y, party, row in MARGINAL_PAIRS:
        devs[label] = float(abs(_party_marginal(t[x], party)[row] - _party_marginal(t[y], party)[row]))
    return MarginalDeviation(devs)


@dataclass(frozen=True)
class Classification:
    category: str
    entanglement_detected: bool
    entangled_measurements_required: bool

    @property
    def name(self) -> str:
        return CATEGORY_NAMES[self.category]


def classify(
    t: JointTables,
    tol: Optional[float] = None,
    *,
    delta_tol: float = DELTA_TOL,
    marginal_tol: float = MARGINAL_TOL,
) -> Classification:
    """Place tables in one of the four violating categories or "no-violation".

    A single ``tol`` overrides both thresholds.  Values sitting on a boundary
    go to the lower category.
    """
    if tol is not None:
        delta_tol = marginal_tol = tol
    d = chsh_max_sym(t)
    m = marginal_deviation(t).max
    marginal_ok = m <= marginal_tol
    if d <= 2.0 + delta_tol:
        category = "no-violation"
    elif d <= TSIRELSON + delta_tol:
        category = "(i)" if marginal_ok else "(ii)"
    else:
        category = "(iv)" if marginal_ok else "(iii)"
    required = (not marginal_ok) or d > TSIRELSON + delta_tol
    return Classification(category, d > 2.0 + delta_tol, required)


@dataclass(frozen=True, eq=False)
class QuantumModel:
    """A state plus the four tagged joint measurements."""

    state: Density4
    measurements: Dict[str, Spectral4]

    def __post_init__(self):
        object.__setattr__(self, "state", as_density(self.state))
        ms = dict(self.measurements)
        if set(ms) != set(SETTINGS):
            raise ValueError(f"measurements must be tagged exactly {SETTINGS}, got {sorted(ms)}")
        for tag, m in ms.items():
            if m.gram_deviation() > DEFAULT_TOL:
                raise OrthonormalityError(f"measurement {tag}: basis is not orthonormal")
        object.__setattr__(self, "measurements", {tag: ms[tag] for tag in SETTINGS})


def scenario_probabilities(model: QuantumModel) -> JointTables:
    return JointTables(**{tag: outcome_probabilities(m, model.state) for tag, m in model.measurements.items()})


def born_tables_batch(states, bases, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Tables of many pure-state models at once.

    ``states`` has shape ``(N, 4)``; ``bases`` has shape ``(N, 4, 4, 4)`` indexed
    ``[model, setting in SETTINGS order, outcome slot, component]``.  Returns
    ``(N, 4, 4)`` with ``out[n, s, k] = |<e_nsk|psi_n>|^2``.
    """
    states = np.asarray(states, dtype=complex)
    bases = np.asarray(bases, dtype=complex)
    n = states.shape[0]
    if states.shape != (n, 4) or bases.shape != (n, 4, 4, 4):
        raise ValueError(f"expected shapes (N, 4) and (N, 4, 4, 4), got {states.shape} and {bases.shape}")
    norm_dev = np.abs(np.einsum("ni,ni->n", states.conj(), states).real - 1.0)
    if n and norm_dev.max() > tol:
        raise NormalizationError(f"state {int(norm_dev.argmax())} is not unit norm")
    gram = np.einsum("nski,nsli->nskl", bases.conj(), bases)
    gram_dev = np.abs(gram - np.eye(4)).reshape(n, -1).max(axis=1) if n else np.zeros(0)
    if n and gram_dev.max() > tol:
        raise OrthonormalityError(f"model {int(gram_dev.argmax())}: basis is not orthonormal")
    amps = np.einsum("nski,ni->nsk", bases.conj(), states)
    return np.abs(amps) ** 2


@dataclass(frozen=True, eq=False)
class BellOperator:
    matrix: np.ndarray

    def __post_init__(self):
        m = as_operator(self.matrix, 4)
        check_hermitian(m, 1e-10, "Bell operator")
        object.__setattr__(self, "matrix", m)

    def expectation(self, state) -> float:
        return float(np.trace(as_density(state).matrix @ self.matrix).real)

    def spectrum(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)


def bell_operator(model: QuantumModel) -> BellOperator:
    """``E_A'B' + E_AB' + E_A'B - E_AB`` for measurements carrying the CHSH labels."""
    for tag, m in model.measurements.items():
        if not np.allclose(m.eigenvalues, CHSH_LABELS, rtol=0.0, atol=1e-12):
            raise LabelError(f"measurement {tag} has labels {m.eigenvalues}; expected {CHSH_LABELS}")
    e = {tag: m.observable for tag, m in model.measurements.items()}
    return BellOperator(e["ApBp"] + e["ABp"] + e["ApB"] - e["AB"])


@dataclass(frozen=True, eq=False)
class AnalysisReport:
    tables: JointTables
    expectations: Dict[str, float]
    delta: float
    delta_max_sym: float
    chsh_variants: tuple
    marginal_deviations: Dict[str, float]
    marginal_max: float
    category: str
    entanglement_detected: bool
    entangled_measurements_required: bool
    entangled_state: Optional[bool] = None
    measurement_kinds: Optional[Dict[str, str]] = None
    bell_expectation: Optional[float] = None

    @property
    def category_name(self) -> str:
        return CATEGORY_NAMES[self.category]

    def to_dict(self) -> dict:
        return {
            "tables": self.tables.to_dict(),
            "expectations": dict(self.expectations),
            "delta": self.delta,
            "delta_max_sym": self.delta_max_sym,
            "chsh_variants": list(self.chsh_variants),
            "marginal_deviations": dict(self.marginal_deviations),
            "marginal_max": self.marginal_max,
            "category": self.category,
            "category_name": self.category_name,
            "flags": {
                "entanglement_detected": self.entanglement_detected,
                "entangled_measurements_required": self.entangled_measurements_required,
                "entangled_state": self.entangled_state,
            },
            "measurement_kinds": None if self.measurement_kinds is None else dict(self.measurement_kinds),
            "bell_expectation": self.bell_expectation,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AnalysisReport":
        flags = d["flags"]
        return cls(
            tables=JointTables.from_mapping(d["tables"]),
            expectations=dict(d["expectations"]),
            delta=d["delta"],
            delta_max_sym=d["delta_max_sym"],
            chsh_variants=tuple(d["chsh_variants"]),
            marginal_deviations=dict(d["marginal_deviations"]),
            marginal_max=d["marginal_max"],
            category=d["category"],
            entanglement_detected=flags["entanglement_detected"],
            entangled_measurements_required=flags["entangled_measurements_required"],
            entangled_state=flags["entangled_state"],
            measurement_kinds=d.get("measurement_kinds"),
            bell_expectation=d.get("bell_expectation"),
        )


def analyze_tables(t: JointTables, tol: Optional[float] = None, **kwargs) -> AnalysisReport:
    c = classify(t, tol, **kwargs)
    md = marginal_deviation(t)
    return AnalysisReport(
        tables=t,
        expectations=correlations(t),
        delta=chsh_delta(t),
        delta_max_sym=chsh_max_sym(t),
        chsh_variants=tuple(float(x) for x in chsh_variants(t)),
        marginal_deviations=md.deviations,
        marginal_max=md.max,
        category=c.category,
        entanglement_detected=c.entanglement_detected,
        entangled_measurements_required=c.entangled_measurements_required,
    )


def analyze_model(model: QuantumModel, tol: Optional[float] = None, **kwargs) -> AnalysisReport:
    """Table analysis plus model-level facts: state and measurement structure, <B>."""
    report = analyze_tables(scenario_probabilities(model), tol, **kwargs)
    pure = model.state.pure_vector()
    entangled_state = None if pure is None else is_product_state(pure, PRODUCT_TOL) is None
    kinds = {tag: measurement_kind(m) for tag, m in model.measurements.items()}
    try:
        bell = bell_operator(model).expectation(model.state)
    except LabelError:
        bell = None
    return AnalysisReport(
        **{
            **report.__dict__,
            "entangled_state": entangled_state,
            "measurement_kinds": kinds,
            "bell_expectation": bell,
        }
    )
