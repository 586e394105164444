"""Dense qubit-register primitives.

Qubit 0 is the most significant bit of a computational-basis index, so the
three-qubit ket ``|abc>`` sits at index ``4a + 2b + c``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

VALIDATION_TOL = 1e-10
EQUALITY_TOL = 1e-12

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)


class InvalidStateError(ValueError):
    """Base class for density-matrix validation failures."""

    code = "invalid"


class NotHermitianError(InvalidStateError):
    code = "not_hermitian"


class TraceError(InvalidStateError):
    code = "trace"


class NotPositiveError(InvalidStateError):
    code = "not_positive"


class BellOutcome(enum.Enum):
    PHI_PLUS = "PhiPlus"
    PHI_MINUS = "PhiMinus"
    PSI_PLUS = "PsiPlus"
    PSI_MINUS = "PsiMinus"


_S = 1 / np.sqrt(2)
_BELL = {
    BellOutcome.PHI_PLUS: np.array([_S, 0, 0, _S], dtype=complex),
    BellOutcome.PHI_MINUS: np.array([_S, 0, 0, -_S], dtype=complex),
    BellOutcome.PSI_PLUS: np.array([0, _S, _S, 0], dtype=complex),
    BellOutcome.PSI_MINUS: np.array([0, _S, -_S, 0], dtype=complex),
}


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A validated n-qubit density matrix.

    Build instances with :func:`validate_density`; the constructor itself
    does not check the physical invariants.
    """

    mat: np.ndarray

    @property
    def n_qubits(self) -> int:
        return int(self.mat.shape[0]).bit_length() - 1

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def purity(self) -> float:
        return float(np.real(np.trace(self.mat @ self.mat)))

    def to_json(self) -> dict:
        return matrix_to_json(self.mat)


def _array(x) -> np.ndarray:
    return np.asarray(x.mat if isinstance(x, DensityMatrix) else x)


def matrix_to_json(m) -> dict:
    m = np.asarray(m, dtype=complex)
    return {
        "dim": int(m.shape[0]),
        "re": [float(v) for v in m.real.ravel()],
        "im": [float(v) for v in m.imag.ravel()],
    }


def matrix_from_json(obj: dict) -> np.ndarray:
    n = int(obj["dim"])
    re = np.asarray(obj["re"], dtype=float)
    im = np.asarray(obj["im"], dtype=float)
    if re.size != n * n or im.size != n * n:
        raise ValueError(f"expected {n * n} entries, got {re.size}/{im.size}")
    return (re + 1j * im).reshape(n, n)


def kron(*mats) -> np.ndarray:
    """Tensor product of any number of matrices or vectors, left to right."""
    out = np.asarray(_array(mats[0]), dtype=complex)
    for m in mats[1:]:
        out = np.kron(out, _array(m))
    return out


def basis_ket(bits: str) -> np.ndarray:
    """Computational-basis ket from a bit string such as ``"001"``."""
    v = np.zeros(2 ** len(bits), dtype=complex)
    v[int(bits, 2)] = 1
    return v


def projector(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def bell_state(outcome: BellOutcome) -> np.ndarray:
    return _BELL[BellOutcome(outcome)].copy()


def bloch(theta: float, phi: float) -> np.ndarray:
    """Unit vector with polar angle ``theta`` and azimuth ``phi``."""
    st = np.sin(theta)
    return np.array([st * np.cos(phi), st * np.sin(phi), np.cos(theta)])


def check_unit(n, tol: float = EQUALITY_TOL) -> np.ndarray:
    n = np.asarray(n, dtype=float)
    if n.shape != (3,) or not np.all(np.isfinite(n)):
        raise ValueError(f"Bloch vector must be 3 finite reals, got {n!r}")
    if abs(np.linalg.norm(n) - 1) > tol:
        raise ValueError(f"Bloch vector {n!r} is not unit length")
    return n


def observable_from_bloch(n) -> np.ndarray:
    """The +/-1 valued qubit observable n.sigma."""
    n = check_unit(n)
    return n[0] * SIGMA_X + n[1] * SIGMA_Y + n[2] * SIGMA_Z


def hermitian_eigvals(h, tol: float = VALIDATION_TOL) -> np.ndarray:
    """Ascending real eigenvalues of a Hermitian matrix."""
    h = np.asarray(_array(h), dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {h.shape}")
    if np.max(np.abs(h - h.conj().T), initial=0.0) > tol:
        raise NotHermitianError("matrix is not Hermitian")
    return np.linalg.eigvalsh(h)


def validate_density(m, tol: float = VALIDATION_TOL) -> DensityMatrix:
    """Check Hermiticity, unit trace and positivity, and wrap the matrix.

    Raises
    ------
    NotHermitianError, TraceError, NotPositiveError
        One class per violated invariant; all derive from ``ValueError``.
    """
    m = np.array(_array(m), dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidStateError(f"expected a square matrix, got shape {m.shape}")
    dim = m.shape[0]
    if dim < 2 or dim & (dim - 1):
        raise InvalidStateError(f"dimension {dim} is not a power of two")
    if not np.all(np.isfinite(m)):
        raise InvalidStateError("matrix has non-finite entries")
    if np.max(np.abs(m - m.conj().T)) > tol:
        raise NotHermitianError("matrix is not Hermitian")
    tr = np.trace(m)
    if abs(tr - 1) > tol:
        raise TraceError(f"trace is {tr.real:.6g}, expected 1")
    lo = np.linalg.eigvalsh(m)[0]
    if lo < -tol:
        raise NotPositiveError(f"minimum eigenvalue {lo:.3g} is negative")
    m.setflags(write=False)
    return DensityMatrix(m)


def partial_trace(rho, keep) -> DensityMatrix:
    """Reduce ``rho`` onto the qubits in ``keep``, preserving their order."""
    m = _array(rho)
    n = int(m.shape[0]).bit_length() - 1
    keep = sorted(set(int(q) for q in keep))
    if not keep or keep[0] < 0 or keep[-1] >= n:
        raise ValueError(f"invalid qubit set {keep} for a {n}-qubit state")
    letters = [chr(ord("a") + i) for i in range(2 * n)]
    row, col = letters[:n], letters[n:]
    for q in range(n):
        if q not in keep:
            col[q] = row[q]
    out = "".join(row[q] for q in keep) + "".join(col[q] for q in keep)
    k = 2 ** len(keep)
    red = np.einsum("".join(row) + "".join(col) + "->" + out, m.reshape((2,) * (2 * n)))
    return DensityMatrix(np.ascontiguousarray(red.reshape(k, k)))


def permute_qubits(m, order) -> np.ndarray:
    """Reorder qubits so that new qubit ``i`` is old qubit ``order[i]``."""
    m = _array(m)
    n = len(order)
    t = m.reshape((2,) * (2 * n))
    t = np.transpose(t, list(order) + [n + q for q in order])
    return np.ascontiguousarray(t.reshape(2 ** n, 2 ** n))


def trace_distance(a, b) -> float:
    a, b = _array(a), _array(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(0.5 * np.sum(np.abs(np.linalg.eigvalsh(a - b))))
