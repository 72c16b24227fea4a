"""Mixtures of product states measured with product measurements.

For such mixtures every joint probability is a weighted sum of products of
local probabilities, the marginals of one party do not depend on the other
party's setting, and the CHSH quantity is a convex combination of per-component
values each bounded by 2.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Mapping

import numpy as np

from .errors import DomainError, ProductRequiredError, WeightError
from .hilbert import (
    CONSTRUCTION_TOL,
    DEFAULT_TOL,
    Density4,
    as_vector,
    check_unit,
    projector,
)
from .measurement import Spectral4
from .scenario import SETTINGS
from .schmidt import PRODUCT_TOL, is_product_measurement


@dataclass(frozen=True, eq=False)
class ProductMixture:
    """Components ``(w_i, a_i, b_i)`` representing ``sum w_i |a_i b_i><a_i b_i|``."""

    components: tuple

    def __post_init__(self):
        comps = []
        for k, (w, a, b) in enumerate(self.components):
            w = float(w)
            if not (-CONSTRUCTION_TOL <= w <= 1.0 + CONSTRUCTION_TOL):
                raise WeightError(f"component {k}: weight {w} outside [0, 1]")
            a = as_vector(a, 2)
            b = as_vector(b, 2)
            check_unit(a, CONSTRUCTION_TOL, f"component {k} left factor")
            check_unit(b, CONSTRUCTION_TOL, f"component {k} right factor")
            comps.append((w, a, b))
        object.__setattr__(self, "components", tuple(comps))

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for w, _, _ in self.components])


@dataclass(frozen=True, eq=False)
class LocalMeasurement:
    """Two-outcome measurement on C^2: ``basis`` rows with labels ``(+1, -1)`` by default."""

    basis: np.ndarray
    labels: tuple = (1.0, -1.0)

    def __post_init__(self):
        basis = np.array(self.basis, dtype=complex).reshape(2, 2)
        basis.setflags(write=False)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "labels", tuple(float(x) for x in self.labels))

    @property
    def observable(self) -> np.ndarray:
        return sum(l * np.outer(u, u.conj()) for l, u in zip(self.labels, self.basis))

    def probabilities(self, v: np.ndarray) -> np.ndarray:
        return np.abs(self.basis.conj() @ v) ** 2


def product_mixture_density(m: ProductMixture, tol: float = DEFAULT_TOL) -> Density4:
    total = float(m.weights.sum())
    if abs(total - 1.0) > tol:
        raise WeightError(f"weights sum to {total!r}, not 1")
    rho = np.zeros((4, 4), dtype=complex)
    prov = []
    for w, a, b in m.components:
        v = np.outer(a, b).ravel()
        rho += w * projector(v)
        prov.append((w, as_vector(v)))
    return Density4(rho, provenance=tuple(prov))


def mixture_joint_probabilities(m: ProductMixture, e_a: LocalMeasurement, e_b: LocalMeasurement) -> np.ndarray:
    """``p(A_i B_j) = sum_k w_k p_k(A_i) p_k(B_j)`` in ``(p11, p12, p21, p22)`` order."""
    table = np.zeros((2, 2))
    for w, a, b in m.components:
        table += w * np.outer(e_a.probabilities(a), e_b.probabilities(b))
    return table.reshape(4)


@dataclass(frozen=True)
class MixtureBellBreakdown:
    per_component: tuple
    weights: tuple
    total: float


def lemma1_check(x: float, xp: float, y: float, yp: float) -> float:
    """``x'y' + x'y + xy' - xy`` for arguments in [-1, 1]; the result lies in [-2, 2]."""
    for name, val in (("x", x), ("x'", xp), ("y", y), ("y'", yp)):
        if not (-1.0 - CONSTRUCTION_TOL <= val <= 1.0 + CONSTRUCTION_TOL):
            raise DomainError(f"{name} = {val} outside [-1, 1]")
    delta = xp * yp + xp * y + x * yp - x * y
    if abs(delta) > 2.0 + 1e-9:
        raise AssertionError(f"|Delta| = {abs(delta)} exceeds 2 for in-range arguments")
    return delta


def shared_local_observables(measurements: Mapping[str, Spectral4], tol: float = PRODUCT_TOL) -> Dict[str, np.ndarray]:
    """Recover ``E_A, E_A', E_B, E_B'`` with ``E_XY = E_X (x) E_Y`` for all four settings.

    Raises ProductRequiredError if a measurement is not a product or the four
    products do not come from one set of local observables.
    """
    local = {}
    for tag in SETTINGS:
        fac = is_product_measurement(measurements[tag], tol)
        if fac is None or fac.a_labels is None:
            raise ProductRequiredError(f"measurement {tag} is not a product of local observables")
        local[tag] = fac.local_observables()

    def aligned(ref, op):
        # local factors are fixed only up to a common sign flip
        s = np.sign(np.trace(ref @ op).real)
        if s == 0 or np.max(np.abs(s * op - ref)) > max(tol, 1e-9):
            return None
        return s

    ea, eb = local["AB"]
    ea2, ebp = local["ABp"]
    s = aligned(ea, ea2)
    if s is None:
        raise ProductRequiredError("settings AB and AB' use different A observables")
    ebp = s * ebp
    eap, eb3 = local["ApB"]
    s = aligned(eb, eb3)
    if s is None:
        raise ProductRequiredError("settings AB and A'B use different B observables")
    eap = s * eap
    if np.max(np.abs(np.kron(eap, ebp) - measurements["ApBp"].observable)) > max(tol, 1e-9):
        raise ProductRequiredError("setting A'B' is not E_A' (x) E_B'")
    return {"A": ea, "Ap": eap, "B": eb, "Bp": ebp}


def mixture_delta_breakdown(m: ProductMixture, measurements: Mapping[str, Spectral4]) -> MixtureBellBreakdown:
    """Per-component CHSH values ``delta_i`` and their convex combination."""
    obs = shared_local_observables(measurements)
    deltas = []
    for w, a, b in m.components:
        x = float(np.vdot(a, obs["A"] @ a).real)
        xp = float(np.vdot(a, obs["Ap"] @ a).real)
        y = float(np.vdot(b, obs["B"] @ b).real)
        yp = float(np.vdot(b, obs["Bp"] @ b).real)
        deltas.append(lemma1_check(x, xp, y, yp))
    weights = tuple(float(w) for w in m.weights)
    total = float(np.dot(weights, deltas))
    return MixtureBellBreakdown(tuple(deltas), weights, total)
