"""Build quantum models that reproduce arbitrary target tables.

Each setting gets its own orthonormal basis chosen so that the Born
probabilities of the shared state equal that setting's target table.  For a
pure state this is always possible: the spectrum (1, 0, 0, 0) majorizes every
probability vector.  For a mixed state the target must be majorized by the
state's spectrum (Schur-Horn); otherwise a numerical refinement is tried and
the best residual reported.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy.optimize import minimize

from .errors import DistributionError, SynthesisError
from .hilbert import (
    CONSTRUCTION_TOL,
    DEFAULT_TOL,
    Density4,
    as_vector,
    check_unit,
    hermitian_eigh,
    pure_density,
)
from .measurement import Spectral4, outcome_probabilities
from .refmodels import entangled_pair
from .scenario import SETTINGS, JointTables, QuantumModel, classify, scenario_probabilities

SYNTHESIS_TOL = 1e-9


def _check_distribution(target, tol: float = DEFAULT_TOL) -> np.ndarray:
    t = np.array(target, dtype=float).reshape(-1)
    if t.shape != (4,) or not np.all(np.isfinite(t)):
        raise DistributionError(f"target must be four finite probabilities, got {target!r}")
    if np.any(t < -tol) or abs(t.sum() - 1.0) > tol:
        raise DistributionError(f"target {t.tolist()} is not a probability distribution")
    t = np.clip(t, 0.0, None)
    return t / t.sum()


def _givens_to_top(x: complex, y: complex) -> np.ndarray:
    """2x2 unitary sending (x, y) to (r, 0) with r = |(x, y)| real."""
    r = math.hypot(abs(x), abs(y))
    if r == 0.0:
        return np.eye(2, dtype=complex)
    return np.array([[np.conj(x), np.conj(y)], [-y, x]]) / r


def basis_matching_probabilities(state, target) -> np.ndarray:
    """Orthonormal basis (rows) with ``|<e_k|state>|^2 = target[k]``.

    Built as ``W = R_split @ R_collect``: two-level rotations in planes
    (2,3), (1,2), (0,1) first collect the whole state into coordinate 0, then
    real rotations in planes (0,1), (1,2), (2,3) with angles in [0, pi/2]
    spread it into amplitudes ``sqrt(target)``.  ``e_k`` is row k of ``W``
    conjugated, so ``<e_k|state> = (W state)_k``.
    """
    p = as_vector(state, 4)
    check_unit(p, CONSTRUCTION_TOL, "state")
    t = _check_distribution(target)

    w = np.eye(4, dtype=complex)
    x = p.copy()
    for k in (3, 2, 1):
        g = np.eye(4, dtype=complex)
        g[k - 1 : k + 1, k - 1 : k + 1] = _givens_to_top(x[k - 1], x[k])
        x = g @ x
        w = g @ w

    amps = np.sqrt(t)
    remaining = 1.0
    for k in range(3):
        theta = math.atan2(math.sqrt(max(remaining - t[k], 0.0)), amps[k])
        remaining = max(remaining - t[k], 0.0)
        c, s = math.cos(theta), math.sin(theta)
        g = np.eye(4, dtype=complex)
        g[k : k + 2, k : k + 2] = [[c, -s], [s, c]]
        w = g @ w
    return w.conj()


def majorizes(spectrum, target, tol: float = 1e-12) -> bool:
    """True if ``spectrum`` majorizes ``target`` (equal sums assumed)."""
    a = np.cumsum(np.sort(spectrum)[::-1])
    b = np.cumsum(np.sort(target)[::-1])
    return bool(np.all(a[:-1] >= b[:-1] - tol)) and abs(a[-1] - b[-1]) <= 1e-9


def schur_horn_basis(rho, target) -> np.ndarray:
    """Orthonormal basis (rows) with ``<e_k|rho|e_k> = target[k]`` for a density matrix.

    Raises DistributionError when the spectrum of ``rho`` does not majorize
    ``target``; no such basis exists then.
    """
    rho = rho.matrix if isinstance(rho, Density4) else np.asarray(rho, dtype=complex)
    t = _check_distribution(target)
    vals, vecs = hermitian_eigh(rho)
    vals = np.clip(vals, 0.0, None)
    vals = vals / vals.sum()
    if not majorizes(vals, t):
        raise DistributionError(f"spectrum {vals.tolist()} does not majorize target {t.tolist()}")

    # Active directions stay mutually orthogonal and rho restricted to them stays
    # diagonal, so each step is a rotation of two diagonal entries.
    active = [(float(v), vecs[:, i]) for i, v in enumerate(vals)]
    pending = sorted(range(4), key=lambda k: (t[k], k), reverse=True)
    out = np.zeros((4, 4), dtype=complex)
    while len(pending) > 1:
        k = pending.pop()  # smallest remaining target
        r = t[k]
        active.sort(key=lambda item: item[0], reverse=True)
        exact = [i for i, (d, _) in enumerate(active) if abs(d - r) <= 1e-15]
        if exact:
            _, f = active.pop(exact[0])
            out[k] = f
            continue
        j = next(i for i in range(len(active) - 1) if active[i][0] >= r >= active[i + 1][0])
        (d1, u1), (d2, u2) = active[j], active[j + 1]
        c2 = min(max((r - d2) / (d1 - d2), 0.0), 1.0)
        c, s = math.sqrt(c2), math.sqrt(1.0 - c2)
        out[k] = c * u1 + s * u2
        rest = (-s * u1 + c * u2, d1 + d2 - r)
        active[j : j + 2] = [(rest[1], rest[0])]
    out[pending[0]] = active[0][1]
    return out


@dataclass(frozen=True, eq=False)
class SynthesisRequest:
    targets: JointTables
    state_hint: Optional[Union[np.ndarray, Density4]] = None
    tolerance: float = SYNTHESIS_TOL
    seed: Optional[int] = None

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")


@dataclass(frozen=True, eq=False)
class SynthesisResult:
    model: QuantumModel
    residual: float
    method: str  # "constructive" or "optimized"
    target_category: str
    model_category: str

    def summary(self) -> dict:
        return {
            "method": self.method,
            "residual": self.residual,
            "target_category": self.target_category,
            "model_category": self.model_category,
        }


def default_state() -> np.ndarray:
    return entangled_pair(0.0, 0.0)[0]


def _resolve_state(hint):
    """Return (pure vector or None, density matrix)."""
    if hint is None:
        v = default_state()
        return v, pure_density(v)
    if isinstance(hint, Density4):
        v = hint.pure_vector()
        return (v, pure_density(v)) if v is not None else (None, hint)
    arr = np.asarray(hint, dtype=complex)
    if arr.shape == (4,):
        v = as_vector(arr)
        check_unit(v)
        return v, pure_density(v)
    d = Density4(arr)
    v = d.pure_vector()
    return (v, pure_density(v)) if v is not None else (None, d)


def _residual(model: QuantumModel, targets: JointTables) -> float:
    return scenario_probabilities(model).max_abs_difference(targets)


def _seed_from(req: SynthesisRequest) -> int:
    if req.seed is not None:
        return req.seed
    digest = hashlib.sha256(np.ascontiguousarray(req.targets.as_array()).tobytes()).digest()
    return int.from_bytes(digest[:8], "little")


def _unitary_from_params(x: np.ndarray) -> np.ndarray:
    h = np.zeros((4, 4), dtype=complex)
    iu = np.triu_indices(4, 1)
    h[np.diag_indices(4)] = x[:4]
    h[iu] = x[4:10] + 1j * x[10:16]
    h = h + np.triu(h, 1).conj().T
    vals, vecs = np.linalg.eigh(h)
    return (vecs * np.exp(1j * vals)) @ vecs.conj().T


def _refine_setting(rho: Density4, start: np.ndarray, target: np.ndarray, rng, restarts: int = 2):
    """Derivative-free search for a basis ``U(x)^T @ start`` matching ``target``."""

    def basis_of(x):
        return _unitary_from_params(x).T @ start

    def loss(x):
        p = outcome_probabilities(Spectral4(basis_of(x)), rho)
        return float(np.sum((p - target) ** 2))

    best_x, best = np.zeros(16), loss(np.zeros(16))
    for attempt in range(restarts):
        x0 = best_x if attempt == 0 else rng.normal(scale=0.5, size=16)
        res = minimize(loss, x0, method="Powell", options={"xtol": 1e-12, "ftol": 1e-24, "maxfev": 5000})
        if res.fun < best:
            best_x, best = res.x, float(res.fun)
        if best < 1e-24:
            break
    return basis_of(best_x)


def synthesize_model(req: SynthesisRequest) -> SynthesisResult:
    """Quantum model whose four tables match ``req.targets`` within ``req.tolerance``."""
    vector, rho = _resolve_state(req.state_hint)
    targets = req.targets
    bases = {}
    constructive = True
    for tag in SETTINGS:
        try:
            if vector is not None:
                bases[tag] = basis_matching_probabilities(vector, targets[tag])
            else:
                bases[tag] = schur_horn_basis(rho, targets[tag])
        except DistributionError:
            constructive = False
            bases[tag] = np.eye(4, dtype=complex)

    model = QuantumModel(rho, {tag: Spectral4(bases[tag], tag=tag) for tag in SETTINGS})
    residual = _residual(model, targets)
    method = "constructive"
    if not constructive or residual > req.tolerance:
        rng = np.random.default_rng(_seed_from(req))
        for tag in SETTINGS:
            p = outcome_probabilities(model.measurements[tag], rho)
            if np.max(np.abs(p - targets[tag])) > req.tolerance:
                bases[tag] = _refine_setting(rho, bases[tag], targets[tag], rng)
        model = QuantumModel(rho, {tag: Spectral4(bases[tag], tag=tag) for tag in SETTINGS})
        residual = _residual(model, targets)
        method = "optimized"
        if residual > req.tolerance:
            raise SynthesisError(
                f"best residual {residual:.3e} exceeds tolerance {req.tolerance:.1e}", residual
            )
    return SynthesisResult(
        model=model,
        residual=residual,
        method=method,
        target_category=classify(targets).category,
        model_category=classify(scenario_probabilities(model)).category,
    )
