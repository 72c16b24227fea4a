"""Product versus entangled structure of states and measurements.

States are decided by their Schmidt coefficients.  A measurement counts as a
product measurement when its spectral family lives on a product grid
``{a_i (x) b_j}`` built from two orthonormal bases of C^2; the labels then
factor through local observables whenever the 2x2 label matrix has rank one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np

from .errors import NormalizationError
from .hilbert import (
    CONSTRUCTION_TOL,
    amplitude_matrix,
    as_vector,
    check_unit,
    hermitian_eigh,
)
from .measurement import Spectral4

PRODUCT_TOL = 1e-8

MeasurementKind = Literal["product", "entangled", "undecided"]


@dataclass(frozen=True, eq=False)
class SchmidtForm:
    """``v = sum_k coefficients[k] * left[k] (x) right[k]`` with descending coefficients."""

    coefficients: tuple
    left_basis: np.ndarray  # rows are ON vectors of C^2
    right_basis: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return sum(c * np.kron(u, v) for c, u, v in zip(self.coefficients, self.left_basis, self.right_basis))


def schmidt_decompose(v, tol: float = CONSTRUCTION_TOL) -> SchmidtForm:
    v = as_vector(v, 4)
    check_unit(v, tol, "state")
    u, s, vh = np.linalg.svd(amplitude_matrix(v))
    # c = U diag(s) Vh  =>  v = sum_k s_k U[:, k] (x) Vh[k, :]
    return SchmidtForm(tuple(float(x) for x in s), u.T.copy(), vh.copy())


def _second_coefficients(c: np.ndarray) -> np.ndarray:
    """Smaller Schmidt coefficients of unit vectors given as stacked 2x2 amplitude matrices.

    ``s2 = |det C| / s1`` with ``s1^2`` the larger eigenvalue of ``C C^H``; neither
    step cancels, so this is accurate both near product and near maximal entanglement.
    """
    d = np.abs(c[..., 0, 0] * c[..., 1, 1] - c[..., 0, 1] * c[..., 1, 0])
    rows = (np.abs(c) ** 2).sum(axis=-1)
    cross = (c[..., 0, :] * c[..., 1, :].conj()).sum(axis=-1)
    s1 = np.sqrt(0.5 * (rows.sum(axis=-1) + np.sqrt((rows[..., 0] - rows[..., 1]) ** 2 + 4.0 * np.abs(cross) ** 2)))
    return d / s1


def second_schmidt_coefficient(v) -> float:
    return float(_second_coefficients(np.asarray(v).reshape(2, 2)))


def _rank_one_factors(c: np.ndarray):
    """Unit ``a``, ``b`` with ``c ~ a b^T`` for stacked rank-one 2x2 matrices ``c``."""
    # b from the heavier row, then a = c b*
    weights = (np.abs(c) ** 2).sum(axis=-1)
    rows = np.take_along_axis(c, np.argmax(weights, axis=-1)[..., None, None], axis=-2)[..., 0, :]
    b = rows / np.linalg.norm(rows, axis=-1, keepdims=True)
    a = np.einsum("...ij,...j->...i", c, b.conj())
    a = a / np.linalg.norm(a, axis=-1, keepdims=True)
    return a, b


def is_product_state(v, tol: float = PRODUCT_TOL):
    """Factors ``(a, b)`` with ``v = a (x) b`` up to phase, or ``None`` if entangled."""
    v = as_vector(v, 4)
    check_unit(v, CONSTRUCTION_TOL, "state")
    c = amplitude_matrix(v)
    if _second_coefficients(c) > tol:
        return None
    a, b = _rank_one_factors(c)
    return as_vector(a), as_vector(b)


@dataclass(frozen=True, eq=False)
class ProductFactorization:
    """Local bases (rows) and local labels of a product measurement.

    ``slots[k] = (i, j)`` says that eigenvector k of the measurement is
    ``a_basis[i] (x) b_basis[j]`` up to phase.  ``a_labels``/``b_labels`` are
    local outcome values whose products reproduce the measurement's labels;
    they are ``None`` when the label matrix does not factor.
    """

    a_basis: np.ndarray
    b_basis: np.ndarray
    slots: tuple
    a_labels: Optional[tuple]
    b_labels: Optional[tuple]

    def local_observables(self):
        if self.a_labels is None:
            return None
        ea = (self.a_basis.T * np.array(self.a_labels)) @ self.a_basis.conj()
        eb = (self.b_basis.T * np.array(self.b_labels)) @ self.b_basis.conj()
        return ea, eb

    def observable(self):
        obs = self.local_observables()
        if obs is None:
            return None
        ea, eb = obs
        return np.einsum("ik,jl->ijkl", ea, eb).reshape(4, 4)


def _group_rays(vectors: np.ndarray, tol: float):
    """Split four C^2 rays (rows) into two orthogonal pairs of equal rays, or return None."""
    f = np.abs(vectors.conj() @ vectors.T) ** 2
    group = [0 if x >= 0.5 else 1 for x in f[0]]
    if group.count(0) != 2:
        return None
    firsts = [group.index(g) for g in (0, 1)]
    for k, g in enumerate(group):
        if 1.0 - f[firsts[g], k] > tol:
            return None
    if f[firsts[0], firsts[1]] > tol:
        return None
    return group, [vectors[k] for k in firsts]


def _factor_labels(label_matrix: np.ndarray, tol: float):
    """Split a real 2x2 label matrix as ``outer(a, b)`` with ``|a| = |b|``, or ``(None, None)``."""
    m = np.asarray(label_matrix, dtype=float)
    scale = math.sqrt(float((m * m).sum()))
    det = abs(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])
    # smaller singular value is det / s1 with s1 >= scale / sqrt(2)
    if scale == 0.0 or det / (scale / math.sqrt(2.0)) > tol * max(1.0, scale):
        return None, None
    b = m[int(np.argmax((m * m).sum(axis=1)))]
    a = m @ b / float(b @ b)
    r = math.sqrt(math.sqrt(float(a @ a)) / math.sqrt(float(b @ b)))
    a, b = a / r, b * r
    # keep the sign convention deterministic: first nonzero a label positive
    k = int(np.argmax(np.abs(a) > tol)) if np.any(np.abs(a) > tol) else 0
    if a[k] < 0:
        a, b = -a, -b
    return tuple(float(x) for x in a), tuple(float(x) for x in b)


def is_product_measurement(m: Spectral4, tol: float = PRODUCT_TOL) -> Optional[ProductFactorization]:
    """Local structure of ``m`` if its spectral family is a product grid, else ``None``.

    ``None`` does not distinguish "entangled" from "undecided"; use
    :func:`measurement_kind` for that.
    """
    norms = np.einsum("ki,ki->k", m.basis.conj(), m.basis).real
    if np.abs(norms - 1.0).max() > CONSTRUCTION_TOL:
        raise NormalizationError("measurement basis vectors are not unit norm")
    c = m.basis.reshape(4, 2, 2)
    if _second_coefficients(c).max() > tol:
        return None
    a_rays, b_rays = _rank_one_factors(c)
    a_split = _group_rays(a_rays, tol)
    b_split = _group_rays(b_rays, tol)
    if a_split is None or b_split is None:
        return None
    slots = tuple(zip(a_split[0], b_split[0]))
    if len(set(slots)) != 4:
        return None
    a_basis = np.array(a_split[1])
    b_basis = np.array(b_split[1])
    labels = np.zeros((2, 2))
    for (i, j), lam in zip(slots, m.eigenvalues):
        labels[i, j] = lam
    a_labels, b_labels = _factor_labels(labels, tol)
    fac = ProductFactorization(a_basis, b_basis, slots, a_labels, b_labels)
    obs = fac.observable()
    if obs is not None and np.max(np.abs(obs - m.observable)) > max(tol, 1e-10) * max(1.0, np.max(np.abs(labels))):
        return None
    return fac


def _common_eigenbasis(blocks, tol):
    """An ON basis of C^2 diagonalizing every 2x2 matrix in ``blocks``, or None.

    Returns the identity when all blocks are scalar.
    """
    traceless = [b - 0.5 * np.trace(b) * np.eye(2) for b in blocks]
    k = int(np.argmax([np.max(np.abs(t)) for t in traceless]))
    t = traceless[k]
    if np.max(np.abs(t)) <= tol:
        return np.eye(2, dtype=complex)
    herm = 0.5 * (t + t.conj().T)
    anti = 0.5 * (t - t.conj().T) / 1j
    gen = herm if np.max(np.abs(herm)) >= np.max(np.abs(anti)) else anti
    _, vecs = hermitian_eigh(gen)
    for b in blocks:
        d = vecs.conj().T @ b @ vecs
        if abs(d[0, 1]) > tol or abs(d[1, 0]) > tol:
            return None
    return vecs


def observable_has_product_eigenbasis(obs: np.ndarray, tol: float = PRODUCT_TOL) -> bool:
    """True if some grid basis ``{a_i (x) b_j}`` diagonalizes ``obs``."""
    t = np.asarray(obs).reshape(2, 2, 2, 2)  # t[i, j, k, l] = <i j| obs |k l>
    a_blocks = [t[:, j, :, l] for j in range(2) for l in range(2)]
    b_blocks = [t[i, :, k, :] for i in range(2) for k in range(2)]
    ua = _common_eigenbasis(a_blocks, tol)
    ub = _common_eigenbasis(b_blocks, tol)
    if ua is None or ub is None:
        return False
    u = np.kron(ua, ub)
    d = u.conj().T @ obs @ u
    return float(np.max(np.abs(d - np.diag(np.diag(d))))) <= tol * max(1.0, float(np.max(np.abs(obs))))


def measurement_kind(m: Spectral4, tol: float = PRODUCT_TOL) -> MeasurementKind:
    """Classify a measurement as "product", "entangled" or "undecided".

    With degenerate labels the stored basis is only one of many eigenbases of
    the observable.  If the stored family is not a product grid but the
    observable still admits one, the answer is "undecided".
    """
    if is_product_measurement(m, tol) is not None:
        return "product"
    labels = np.array(m.eigenvalues)
    gaps = np.abs(labels[:, None] - labels[None, :])[np.triu_indices(4, 1)]
    if np.all(gaps > tol):
        return "entangled"
    if observable_has_product_eigenbasis(m.observable, tol):
        return "undecided"
    return "entangled"


def product_measurement(a_basis, b_basis, labels=(1.0, -1.0, -1.0, 1.0), tag: str = "") -> Spectral4:
    """Grid measurement with eigenvector slot ``2*i + j`` equal to ``a_i (x) b_j``."""
    a_basis = np.asarray(a_basis, dtype=complex)
    b_basis = np.asarray(b_basis, dtype=complex)
    # row 2i+j is kron(a_i, b_j)
    basis = np.einsum("ik,jl->ijkl", a_basis, b_basis).reshape(4, 4)
    return Spectral4(basis, tuple(labels), tag)
