"""Small complex linear algebra on C^2, C^4 and C^2 (x) C^2.

Vectors are plain numpy ``complex128`` arrays of shape ``(2,)`` or ``(4,)``;
operators are ``(2, 2)`` or ``(4, 4)`` arrays.  The ordering of C^4 is fixed:

    index 0 <-> |1,0> (x) |1,0>      index 1 <-> |1,0> (x) |0,1>
    index 2 <-> |0,1> (x) |1,0>      index 3 <-> |0,1> (x) |0,1>

which is exactly what ``numpy.kron`` produces, so amplitude ``v[2*i + j]``
belongs to the product basis vector ``|i> (x) |j>``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DensityError, HermiticityError, NormalizationError, WeightError

DEFAULT_TOL = 1e-10
CONSTRUCTION_TOL = 1e-12


def as_vector(v, dim: Optional[int] = None) -> np.ndarray:
    """Return ``v`` as a read-only complex array, optionally checking its length."""
    arr = np.array(v, dtype=complex).reshape(-1)
    if dim is not None and arr.shape != (dim,):
        raise ValueError(f"expected a vector of length {dim}, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValueError("vector has non-finite amplitudes")
    arr.setflags(write=False)
    return arr


def as_operator(m, dim: Optional[int] = None) -> np.ndarray:
    arr = np.array(m, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {arr.shape}")
    if dim is not None and arr.shape != (dim, dim):
        raise ValueError(f"expected a {dim}x{dim} matrix, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValueError("matrix has non-finite entries")
    arr.setflags(write=False)
    return arr


def norm_deviation(v: np.ndarray) -> float:
    return abs(float(np.vdot(v, v).real) - 1.0)


def check_unit(v: np.ndarray, tol: float = CONSTRUCTION_TOL, what: str = "vector") -> None:
    dev = norm_deviation(v)
    if dev > tol:
        raise NormalizationError(f"{what} is not unit norm (|<v|v> - 1| = {dev:.3e})")


def normalize(v) -> np.ndarray:
    arr = np.array(v, dtype=complex).reshape(-1)
    n = np.linalg.norm(arr)
    if n == 0.0:
        raise NormalizationError("cannot normalize the zero vector")
    return as_vector(arr / n)


def hermiticity_deviation(m: np.ndarray) -> float:
    return float(np.abs(m - m.conj().T).max())


def check_hermitian(m: np.ndarray, tol: float = CONSTRUCTION_TOL, what: str = "operator") -> None:
    dev = hermiticity_deviation(m)
    if dev > tol:
        raise HermiticityError(f"{what} is not hermitian (max |M - M^dag| = {dev:.3e})")


def fidelity(u: np.ndarray, v: np.ndarray) -> float:
    """|<u|v>|^2, the phase-insensitive overlap used to compare rays."""
    return float(abs(np.vdot(u, v)) ** 2)


def projector(v: np.ndarray) -> np.ndarray:
    return np.outer(v, v.conj())


def tensor_state(a, b, tol: float = CONSTRUCTION_TOL) -> np.ndarray:
    """Map ``a (x) b`` in C^2 (x) C^2 to its C^4 representative."""
    a = as_vector(a, 2)
    b = as_vector(b, 2)
    check_unit(a, tol, "left factor")
    check_unit(b, tol, "right factor")
    return as_vector(np.kron(a, b))


def tensor_operator(a, b, tol: float = CONSTRUCTION_TOL) -> np.ndarray:
    """Block matrix ``[[a00*b, a01*b], [a10*b, a11*b]]`` for hermitian 2x2 factors."""
    a = as_operator(a, 2)
    b = as_operator(b, 2)
    check_hermitian(a, tol, "left factor")
    check_hermitian(b, tol, "right factor")
    return as_operator(np.kron(a, b))


def amplitude_matrix(v: np.ndarray) -> np.ndarray:
    """Reshape a C^4 vector into the 2x2 matrix ``c[i, j]`` with ``v = sum c_ij |i>|j>``."""
    return np.asarray(v).reshape(2, 2)


def hermitian_eigh(m: np.ndarray):
    """Eigenvalues (ascending) and eigenvectors of a hermitian matrix."""
    h = 0.5 * (m + m.conj().T)
    return np.linalg.eigh(h)


@dataclass(frozen=True, eq=False)
class Density4:
    """A 4x4 density operator, optionally remembering the mixture it came from.

    Construction does not validate; use :func:`validate_density` or
    :func:`density_from_matrix` when the matrix comes from outside.
    """

    matrix: np.ndarray
    provenance: Optional[tuple] = None  # ((weight, C4 vector), ...)

    def __post_init__(self):
        object.__setattr__(self, "matrix", as_operator(self.matrix, 4))

    @property
    def is_pure(self) -> bool:
        return abs(float(np.trace(self.matrix @ self.matrix).real) - 1.0) <= DEFAULT_TOL

    def pure_vector(self, tol: float = DEFAULT_TOL) -> Optional[np.ndarray]:
        """The state vector (up to phase) if the density has rank one, else ``None``."""
        vals, vecs = hermitian_eigh(self.matrix)
        if abs(vals[-1] - 1.0) > tol:
            return None
        return as_vector(vecs[:, -1])


def pure_density(v, tol: float = CONSTRUCTION_TOL) -> Density4:
    v = as_vector(v, 4)
    check_unit(v, tol, "state")
    return Density4(projector(v), provenance=((1.0, v),))


def mixture_density(components: Sequence[tuple], tol: float = CONSTRUCTION_TOL) -> Density4:
    """Density operator ``sum w_i |r_i><r_i|`` from ``(weight, vector)`` pairs."""
    comps = []
    rho = np.zeros((4, 4), dtype=complex)
    for k, (w, v) in enumerate(components):
        w = float(w)
        if w < -tol or w > 1 + tol:
            raise WeightError(f"weight {k} = {w} outside [0, 1]")
        v = as_vector(v, 4)
        check_unit(v, tol, f"component {k}")
        rho += w * projector(v)
        comps.append((w, v))
    total = sum(w for w, _ in comps)
    if abs(total - 1.0) > DEFAULT_TOL:
        raise WeightError(f"weights sum to {total}, not 1")
    return Density4(rho, provenance=tuple(comps))


def as_density(state) -> Density4:
    """Accept a Density4, a C^4 vector or a 4x4 matrix; pure states become rank one."""
    if isinstance(state, Density4):
        return state
    arr = np.asarray(state)
    if arr.shape == (4,):
        return pure_density(arr)
    return density_from_matrix(arr)


@dataclass(frozen=True)
class DensityDiagnostics:
    trace_deviation: float
    min_eigenvalue: float
    hermiticity_deviation: float
    provenance_deviation: Optional[float]
    ok: bool


def validate_density(d, tol: float = DEFAULT_TOL) -> DensityDiagnostics:
    """Report how far a matrix is from being a density operator; never raises."""
    m = d.matrix if isinstance(d, Density4) else np.asarray(d, dtype=complex)
    herm = hermiticity_deviation(m)
    trace_dev = abs(complex(np.trace(m)) - 1.0)
    min_eig = float(np.linalg.eigvalsh(0.5 * (m + m.conj().T))[0])
    prov_dev = None
    if isinstance(d, Density4) and d.provenance is not None:
        rebuilt = sum(w * projector(v) for w, v in d.provenance)
        prov_dev = float(np.abs(rebuilt - m).max())
        wsum = sum(w for w, _ in d.provenance)
        prov_dev = max(prov_dev, abs(wsum - 1.0))
    ok = herm <= tol and trace_dev <= tol and min_eig >= -tol
    if prov_dev is not None:
        ok = ok and prov_dev <= tol
    return DensityDiagnostics(trace_dev, min_eig, herm, prov_dev, ok)


def density_from_matrix(m, tol: float = DEFAULT_TOL) -> Density4:
    d = Density4(m)
    diag = validate_density(d, tol)
    if not diag.ok:
        raise DensityError(
            "not a density operator: "
            f"trace deviation {diag.trace_deviation:.3e}, "
            f"min eigenvalue {diag.min_eigenvalue:.3e}, "
            f"hermiticity deviation {diag.hermiticity_deviation:.3e}"
        )
    return d


def random_unit(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unit vector."""
    z = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return as_vector(z / np.sqrt(np.vdot(z, z).real))


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR with phase correction."""
    z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return 0.5 * (z + z.conj().T)
