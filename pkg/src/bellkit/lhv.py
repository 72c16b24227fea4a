"""Local hidden variable (Kolmogorovian) models for the 2-setting, 2-outcome scenario.

A table set admits a single classical probability space exactly when it is a
convex combination of the 16 deterministic strategies.  Feasibility is decided
by a non-negative least-squares fit over those 16 vertices.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
from scipy.optimize import nnls

from .scenario import (
    SETTINGS,
    JointTables,
    chsh_variants,
    marginal_deviation,
)

LHV_TOL = 1e-9


class DeterministicStrategy(NamedTuple):
    """Fixed outcome (1 or 2) for each of the settings A, A', B, B'."""

    a: int
    ap: int
    b: int
    bp: int


STRATEGIES = tuple(DeterministicStrategy(*s) for s in itertools.product((1, 2), repeat=4))


def strategy_tables(s: DeterministicStrategy) -> JointTables:
    for v in s:
        if v not in (1, 2):
            raise ValueError(f"strategy outcomes must be 1 or 2, got {s}")
    pairs = {"AB": (s.a, s.b), "ABp": (s.a, s.bp), "ApB": (s.ap, s.b), "ApBp": (s.ap, s.bp)}
    tables = {}
    for tag, (x, y) in pairs.items():
        t = np.zeros(4)
        t[2 * (x - 1) + (y - 1)] = 1.0
        tables[tag] = t
    return JointTables(**tables)


# columns are the flattened tables of each strategy
_VERTICES = np.stack([strategy_tables(s).as_array().reshape(-1) for s in STRATEGIES], axis=1)


@dataclass(frozen=True)
class LhvCertificate:
    """Either strategy weights reproducing the tables or a witness of infeasibility.

    ``witness`` is ``(kind, index, amount)`` where kind is ``"chsh"`` (index
    into :data:`CHSH_VARIANTS`, amount above 2), ``"marginal"`` (label of the
    violated marginal pair, deviation) or ``"residual"`` (fit residual).
    """

    feasible: bool
    weights: Optional[tuple]
    residual: float
    witness: Optional[tuple] = None

    def reconstruct(self) -> JointTables:
        if self.weights is None:
            raise ValueError("infeasible certificate has no weights")
        flat = _VERTICES @ np.array(self.weights)
        return JointTables(**dict(zip(SETTINGS, flat.reshape(4, 4))), tol=1e-8)

    def to_dict(self) -> dict:
        return {
            "feasible": self.feasible,
            "weights": None if self.weights is None else list(self.weights),
            "strategies": [list(s) for s in STRATEGIES],
            "residual": self.residual,
            "witness": None if self.witness is None else list(self.witness),
        }


def _witness(t: JointTables, tol: float, residual: float) -> tuple:
    values = chsh_variants(t)
    k = int(np.argmax(values))
    if values[k] > 2.0 + tol:
        return ("chsh", k, float(values[k] - 2.0))
    md = marginal_deviation(t)
    label = max(md.deviations, key=md.deviations.get)
    if md.deviations[label] > tol:
        return ("marginal", label, md.deviations[label])
    return ("residual", None, residual)


def lhv_feasible(t: JointTables, tol: float = LHV_TOL) -> LhvCertificate:
    target = t.as_array().reshape(-1)
    w, _ = nnls(_VERTICES, target)
    residual = float(np.max(np.abs(_VERTICES @ w - target)))
    if residual <= tol:
        w = w / w.sum()
        residual = float(np.max(np.abs(_VERTICES @ w - target)))
        return LhvCertificate(True, tuple(float(x) for x in w), residual)
    return LhvCertificate(False, None, residual, _witness(t, tol, residual))


@dataclass(frozen=True)
class ChshCheck:
    values: tuple
    satisfiable: bool

    @property
    def max(self) -> float:
        return max(self.values)


def fine_chsh_all(t: JointTables, tol: float = LHV_TOL) -> ChshCheck:
    """The eight CHSH expressions; all at most 2 is necessary for an LHV model
    and, for tables obeying the marginal law, also sufficient."""
    values = tuple(float(x) for x in chsh_variants(t))
    return ChshCheck(values, all(v <= 2.0 + tol for v in values))
