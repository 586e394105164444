"""Svetlichny-type genuine steering witnesses.

The witness for an untrusted party U and trusted pair (P, Q) is

    CHSH_PQ (x) Z1 + CHSH'_PQ (x) Z0,

with CHSH = P0Q0 + P0Q1 + P1Q0 - P1Q1 and CHSH' = P1Q1 + P1Q0 + P0Q1 - P0Q0,
the same facet with both trusted parties' settings relabeled.
Expectations are divided by 2 sqrt(2), so the nonlocal-hidden-state bound is
1 and the quantum maximum (GHZ) is 2. Trusted parties use orthogonal pairs of
Bloch directions; the untrusted party's two directions are unconstrained.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass

import numpy as np

from .qcore import PAULIS, EQUALITY_TOL, _array, check_unit, kron, observable_from_bloch
from .states import FamilyParams, rho4_normalizer

NORMALIZATION = 2 * np.sqrt(2)
VIOLATION_MARGIN = 1e-6
ORTHOGONALITY_TOL = 1e-9

# Weight of <P_i Q_j Z_k> in the witness, indexed [i, j, k].
WITNESS_WEIGHTS = np.zeros((2, 2, 2))
WITNESS_WEIGHTS[:, :, 1] = [[1, 1], [1, -1]]   # CHSH with Z1
WITNESS_WEIGHTS[:, :, 0] = [[-1, 1], [1, 1]]   # CHSH' with Z0


class UntrustedParty(enum.Enum):
    A = 0
    B = 1
    C = 2

    @property
    def trusted(self) -> tuple[int, int]:
        return tuple(q for q in range(3) if q != self.value)


@dataclass(frozen=True, eq=False)
class SteeringSettings:
    """Six Bloch directions: two per trusted qubit (register order), two for
    the untrusted party."""

    first: tuple
    second: tuple
    untrusted: tuple

    def __post_init__(self):
        for pair in (self.first, self.second, self.untrusted):
            if len(pair) != 2:
                raise ValueError("each party needs exactly two settings")
            for n in pair:
                check_unit(n, 1e-9)

    def trusted_orthogonal(self, tol: float = ORTHOGONALITY_TOL) -> bool:
        return all(abs(np.dot(p[0], p[1])) <= tol for p in (self.first, self.second))

    def vectors(self):
        return [np.asarray(v, dtype=float) for v in (*self.first, *self.second, *self.untrusted)]

    def to_json(self) -> list:
        return [[float(c) for c in v] for v in self.vectors()]

    @classmethod
    def from_json(cls, arr) -> "SteeringSettings":
        v = [np.asarray(x, dtype=float) for x in arr]
        if len(v) != 6:
            raise ValueError(f"expected six Bloch vectors, got {len(v)}")
        return cls((v[0], v[1]), (v[2], v[3]), (v[4], v[5]))


def chsh_facets(a0, a1, b0, b1):
    """The CHSH operator and its relabeled facet on two qubits."""
    A = [observable_from_bloch(a0), observable_from_bloch(a1)]
    B = [observable_from_bloch(b0), observable_from_bloch(b1)]
    chsh = np.kron(A[0], B[0]) + np.kron(A[0], B[1]) + np.kron(A[1], B[0]) - np.kron(A[1], B[1])
    chsh_p = np.kron(A[1], B[1]) + np.kron(A[1], B[0]) + np.kron(A[0], B[1]) - np.kron(A[0], B[0])
    return chsh, chsh_p


def _place(ops_by_qubit):
    return kron(*[ops_by_qubit[q] for q in range(3)])


def steering_operator(s: SteeringSettings, u: UntrustedParty) -> np.ndarray:
    """Raw (unnormalized) 8x8 witness operator."""
    u = UntrustedParty(u)
    p, q = u.trusted
    P = [observable_from_bloch(v) for v in s.first]
    Q = [observable_from_bloch(v) for v in s.second]
    Z = [observable_from_bloch(v) for v in s.untrusted]
    out = np.zeros((8, 8), dtype=complex)
    for i, j, k in itertools.product(range(2), repeat=3):
        w = WITNESS_WEIGHTS[i, j, k]
        out += w * _place({p: P[i], q: Q[j], u.value: Z[k]})
    return out


def steering_value(rho, s: SteeringSettings, u: UntrustedParty) -> float:
    """tr(rho W) / (2 sqrt 2); values above 1 certify genuine steering."""
    return float(np.real(np.trace(_array(rho) @ steering_operator(s, u)))) / NORMALIZATION


def correlation_tensor(rho) -> np.ndarray:
    """T[i, j, k] = tr(rho sigma_i (x) sigma_j (x) sigma_k)."""
    m = _array(rho).reshape((2,) * 6)
    P = np.stack(PAULIS)
    return np.real(np.einsum("abcdef,ida,jeb,kfc->ijk", m, P, P, P))


class WitnessObjective:
    """Fast evaluation of the normalized witness through the correlation tensor.

    Equivalent to :func:`steering_value` at fixed ``rho`` and ``u``.
    """

    def __init__(self, rho, u: UntrustedParty):
        self.party = UntrustedParty(u)
        p, q = self.party.trusted
        t = correlation_tensor(rho)
        self.tensor = np.transpose(t, (p, q, self.party.value))

    def value_vectors(self, P, Q, Z) -> float:
        corr = np.einsum("ijk,ai,bj,ck->abc", self.tensor, P, Q, Z)
        return float(np.sum(WITNESS_WEIGHTS * corr)) / NORMALIZATION

    def __call__(self, s: SteeringSettings) -> float:
        return self.value_vectors(np.asarray(s.first), np.asarray(s.second),
                                  np.asarray(s.untrusted))


def _family_angles(family, params):
    if family == 1:
        return params.p1, np.cos(2 * params.theta1), np.sin(2 * params.theta1), -1
    return params.p3, np.cos(2 * params.theta3), np.sin(2 * params.theta3), 1


def closed_S(family: int, params: FamilyParams) -> float:
    """Closed-form maxima of the normalized witness for the four families."""
    if family in (1, 3):
        p, c, s, sign = _family_angles(family, params)
        return max(2 * p * s, np.hypot(1 - p + sign * p * c, p * s) / np.sqrt(2))
    if family == 2:
        p = params.p2
        return max(2 * p, np.hypot(1 - p, p) / np.sqrt(2))
    if family == 4:
        t1, t3, p = params.theta1, params.theta3, params.p3
        norm = rho4_normalizer(t1, t3, p)
        if norm <= EQUALITY_TOL:
            raise ZeroDivisionError("output normalizer vanishes")
        first = p * np.sin(2 * t1) * np.sin(2 * t3) / norm
        num = np.sqrt(2) * np.hypot(1 - p + p * np.cos(2 * t3) - np.cos(2 * t1),
                                    p * np.sin(2 * t1) * np.sin(2 * t3))
        den = (2 - 2 * (1 - p) * np.cos(2 * t1) - p * np.cos(2 * (t1 - t3))
               - p * np.cos(2 * (t1 + t3)))
        return max(first, num / den)
    raise ValueError(f"unknown family {family!r}")


@dataclass(frozen=True)
class ViolationReport:
    violated: bool
    best: float
    party: UntrustedParty
    per_party: dict


def violates_genuine_steering(rho, cfg=None, margin: float = VIOLATION_MARGIN) -> ViolationReport:
    """Maximize the witness for each choice of untrusted party."""
    from .optimize import OptimizerConfig, maximize_settings

    cfg = cfg or OptimizerConfig()
    per_party = {}
    for u in UntrustedParty:
        per_party[u] = maximize_settings(WitnessObjective(rho, u), cfg.derive(u.value))
    party = max(per_party, key=lambda k: per_party[k].value)
    best = per_party[party].value
    return ViolationReport(best > 1 + margin, best, party, per_party)
