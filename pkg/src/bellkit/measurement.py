"""Four-outcome projective measurements on C^4.

A :class:`Spectral4` is an orthonormal basis ``e_1..e_4`` together with real
outcome labels.  Slot ``k`` of the basis carries outcome key ``OUTCOME_KEYS[k]``,
i.e. the outcomes ``(A_1 B_1, A_1 B_2, A_2 B_1, A_2 B_2)``.  The default labels
are the CHSH correlation labels ``(+1, -1, -1, +1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import OrthonormalityError
from .hilbert import DEFAULT_TOL, Density4, as_density

OUTCOME_KEYS = ("p11", "p12", "p21", "p22")
CHSH_LABELS = (1.0, -1.0, -1.0, 1.0)
_EYE4 = np.eye(4)


@dataclass(frozen=True, eq=False)
class Spectral4:
    """Spectral family: ``basis[k]`` is the k-th eigenvector, ``eigenvalues[k]`` its label."""

    basis: np.ndarray
    eigenvalues: tuple = CHSH_LABELS
    tag: str = ""
    observable: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        basis = np.array(self.basis, dtype=complex)
        if basis.shape != (4, 4):
            raise ValueError(f"basis must be four C^4 vectors, got shape {basis.shape}")
        if not np.isfinite(basis).all():
            raise ValueError("basis has non-finite entries")
        basis.setflags(write=False)
        labels = tuple(float(x) for x in self.eigenvalues)
        if len(labels) != 4 or not all(map(math.isfinite, labels)):
            raise ValueError("eigenvalues must be four finite reals")
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "eigenvalues", labels)
        obs = (basis.T * np.array(labels)) @ basis.conj()
        obs.setflags(write=False)
        object.__setattr__(self, "observable", obs)

    @property
    def projectors(self) -> np.ndarray:
        """Array of shape (4, 4, 4) holding ``|e_k><e_k|``."""
        return np.einsum("ki,kj->kij", self.basis, self.basis.conj())

    def gram_deviation(self) -> float:
        g = self.basis.conj() @ self.basis.T
        return float(np.abs(g - _EYE4).max())

    def relabel(self, eigenvalues: Sequence[float]) -> "Spectral4":
        return Spectral4(self.basis, tuple(eigenvalues), self.tag)


def make_measurement(
    basis: Sequence, eigenvalues: Sequence[float] = CHSH_LABELS, tag: str = "", tol: float = DEFAULT_TOL
) -> Spectral4:
    """Build a measurement, rejecting bases whose Gram matrix is off by more than ``tol``."""
    m = Spectral4(np.array([np.asarray(v, dtype=complex).reshape(4) for v in basis]), eigenvalues, tag)
    dev = m.gram_deviation()
    if dev > tol:
        raise OrthonormalityError(f"basis Gram matrix deviates from identity by {dev:.3e}")
    return m


def outcome_probabilities(m: Spectral4, state) -> np.ndarray:
    """Born probabilities ``Tr[rho |e_k><e_k|]`` in outcome-slot order."""
    rho = as_density(state).matrix
    p = ((m.basis.conj() @ rho) * m.basis).sum(axis=1).real
    return np.clip(p, 0.0, 1.0)


def expectation(m: Spectral4, state) -> float:
    """``Tr[rho E]`` for the observable ``E = sum lambda_k |e_k><e_k|``."""
    rho = as_density(state).matrix
    return float(np.trace(rho @ m.observable).real)


def expectation_from_probabilities(m: Spectral4, state) -> float:
    return float(np.dot(m.eigenvalues, outcome_probabilities(m, state)))


def lueders_nonselective(m: Spectral4, state) -> Density4:
    """State after the measurement when the outcome is not read: ``sum_k P_k rho P_k``."""
    rho = as_density(state).matrix
    # P_k rho P_k = <e_k|rho|e_k> |e_k><e_k|
    weights = np.einsum("ki,ij,kj->k", m.basis.conj(), rho, m.basis).real
    out = np.einsum("k,ki,kj->ij", weights, m.basis, m.basis.conj())
    return Density4(out)
