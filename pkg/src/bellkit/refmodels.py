"""Built-in reference constructions.

``nnmb2``
    pure entangled state with one product and three entangled measurements,
    violating both the marginal law and Tsirelson's bound (Delta = 4).
``nonlocal_box``
    equal mixture of two entangled states whose measurements leave the state
    invariant under the nonselective update; Delta = 4 with intact marginals.
``singlet``
    maximally entangled state with local analyzers (customary situation).
``pr_box_tables``
    the standard PR-box correlation tables.
"""

from __future__ import annotations

import math
from typing import Dict, Sequence, Union

import numpy as np

from .hilbert import as_vector, mixture_density, pure_density
from .measurement import make_measurement
from .scenario import JointTables, QuantumModel
from .schmidt import product_measurement

REFERENCE_KINDS = ("nnmb2", "nonlocal_box", "singlet", "pr_box_tables")

# Optimal CHSH analyzer angles (radians, measured in the real plane of the
# Bloch sphere) for the Delta = E(A'B') + E(AB') + E(A'B) - E(AB) sign pattern.
SINGLET_ANGLES = (-3 * math.pi / 4, 3 * math.pi / 4, -math.pi / 2, 0.0)  # a, a', b, b'

_S = math.sqrt(0.5)
E1, E2, E3, E4 = np.eye(4, dtype=complex)


def entangled_pair(alpha: float = 0.0, beta: float = 0.0):
    """The two vectors ``(0, s e^{ia}, +/- s e^{ib}, 0)`` with ``s = sqrt(1/2)``."""
    plus = as_vector([0, _S * np.exp(1j * alpha), _S * np.exp(1j * beta), 0])
    minus = as_vector([0, _S * np.exp(1j * alpha), -_S * np.exp(1j * beta), 0])
    return plus, minus


def nnmb2(alpha: float = 0.0, beta: float = 0.0) -> QuantumModel:
    p, q = entangled_pair(alpha, beta)
    ms = {
        "AB": make_measurement([E1, E2, E3, E4], tag="AB"),
        "ABp": make_measurement([p, q, E1, E4], tag="ABp"),
        "ApB": make_measurement([p, E1, q, E4], tag="ApB"),
        "ApBp": make_measurement([p, E1, E4, q], tag="ApBp"),
    }
    return QuantumModel(pure_density(p), ms)


def nonlocal_box(alpha: float = 0.0, beta: float = 0.0) -> QuantumModel:
    p, q = entangled_pair(alpha, beta)
    rho = mixture_density([(0.5, p), (0.5, q)])
    f_abp = [p, E1, E4, q]
    ms = {
        "AB": make_measurement([E1, E2, E3, E4], tag="AB"),
        "ABp": make_measurement(f_abp, tag="ABp"),
        "ApB": make_measurement(f_abp, tag="ApB"),
        "ApBp": make_measurement(f_abp, tag="ApBp"),
    }
    return QuantumModel(rho, ms)


def analyzer_basis(theta: float) -> np.ndarray:
    """Eigenbasis (rows, +1 outcome first) of ``cos(theta) Z + sin(theta) X``."""
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, s], [-s, c]], dtype=complex)


def singlet(angles: Sequence[float] = SINGLET_ANGLES) -> QuantumModel:
    """``(|01> - |10>)/sqrt 2`` measured with local analyzers at ``(a, a', b, b')``."""
    a, ap, b, bp = angles
    state = as_vector([0, _S, -_S, 0])
    ms = {
        "AB": product_measurement(analyzer_basis(a), analyzer_basis(b), tag="AB"),
        "ABp": product_measurement(analyzer_basis(a), analyzer_basis(bp), tag="ABp"),
        "ApB": product_measurement(analyzer_basis(ap), analyzer_basis(b), tag="ApB"),
        "ApBp": product_measurement(analyzer_basis(ap), analyzer_basis(bp), tag="ApBp"),
    }
    return QuantumModel(pure_density(state), ms)


def pr_box_tables() -> JointTables:
    """Perfect correlation on three settings, perfect anticorrelation on AB."""
    corr = [0.5, 0.0, 0.0, 0.5]
    anti = [0.0, 0.5, 0.5, 0.0]
    return JointTables(AB=anti, ABp=corr, ApB=corr, ApBp=corr)


def build_reference(kind: str, **params) -> Union[QuantumModel, JointTables]:
    builders = {
        "nnmb2": nnmb2,
        "nonlocal_box": nonlocal_box,
        "singlet": singlet,
        "pr_box_tables": pr_box_tables,
    }
    if kind not in builders:
        raise ValueError(f"unknown reference kind {kind!r}; choose from {REFERENCE_KINDS}")
    return builders[kind](**params)


def expected_report(kind: str) -> Dict:
    """Published values used as regression fixtures."""
    if kind == "nnmb2":
        return {
            "tables": {
                "AB": (0.0, 0.5, 0.5, 0.0),
                "ABp": (1.0, 0.0, 0.0, 0.0),
                "ApB": (1.0, 0.0, 0.0, 0.0),
                "ApBp": (1.0, 0.0, 0.0, 0.0),
            },
            "delta": 4.0,
            "marginal_mismatch": (0.5, 1.0),  # A1 marginal under AB vs AB'
            "category": "(iii)",
            "bell_central_block": lambda a, b: np.array(
                [[2, 2 * np.exp(1j * (a - b))], [2 * np.exp(-1j * (a - b)), 2]]
            ),
        }
    if kind == "nonlocal_box":
        return {
            "delta": 4.0,
            "density": np.diag([0.0, 0.5, 0.5, 0.0]).astype(complex),
            "observables": {
                "AB": np.diag([1.0, -1.0, -1.0, 1.0]),
                "ABp": np.diag([-1.0, 1.0, 1.0, -1.0]),
                "ApB": np.diag([-1.0, 1.0, 1.0, -1.0]),
                "ApBp": np.diag([-1.0, 1.0, 1.0, -1.0]),
            },
            "bell_operator": np.diag([-4.0, 4.0, 4.0, -4.0]),
            "lueders_fixed_point": ("AB", "ABp", "ApB", "ApBp"),
            "marginal_max": 0.0,
            "category": "(iv)",
        }
    if kind == "singlet":
        return {"delta": 2.0 * math.sqrt(2.0), "marginal_max": 0.0, "category": "(i)"}
    if kind == "pr_box_tables":
        return {"delta": 4.0, "marginal_max": 0.0, "category": "(iv)"}
    raise ValueError(f"unknown reference kind {kind!r}")
