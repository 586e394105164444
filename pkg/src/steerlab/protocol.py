"""Sequential Bell-measurement protocol on three shared three-qubit states.

Register layout of the nine-qubit global state: qubit ``3*s + i`` holds
party ``i``'s particle of input state ``s`` (both zero-based). Each party
Bell-measures two of its three particles and keeps the third; the kept
qubits form the output state in party order.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .qcore import (EQUALITY_TOL, VALIDATION_TOL, BellOutcome, DensityMatrix, _array,
                    bell_state, kron, partial_trace, permute_qubits, trace_distance,
                    validate_density)
from .states import is_x_shaped

ZERO_PROB = 1e-14
BELL_ORDER = tuple(BellOutcome)


class ZeroProbabilityError(ArithmeticError):
    pass


def party_qubits(party: int) -> tuple[int, int, int]:
    """Global qubits owned by ``party`` (0, 1 or 2)."""
    return (party, 3 + party, 6 + party)


@dataclass(frozen=True)
class Pairing:
    """Which particle each party keeps; the other two are Bell-measured."""

    keep: tuple[int, int, int]

    def __post_init__(self):
        if len(self.keep) != 3:
            raise ValueError("need one kept qubit per party")
        for i, k in enumerate(self.keep):
            if k not in party_qubits(i):
                raise ValueError(f"qubit {k} does not belong to party {i + 1}")

    def measured(self, party: int) -> tuple[int, int]:
        return tuple(q for q in party_qubits(party) if q != self.keep[party])

    def to_json(self) -> dict:
        return {f"party{i + 1}": {"measure": list(self.measured(i)), "keep": self.keep[i]}
                for i in range(3)}

    @classmethod
    def from_json(cls, obj: dict) -> "Pairing":
        keep = []
        for i in range(3):
            entry = obj[f"party{i + 1}"]
            owned = set(party_qubits(i))
            if set(entry["measure"]) | {entry["keep"]} != owned or len(entry["measure"]) != 2:
                raise ValueError(f"party{i + 1} must measure two and keep one of {sorted(owned)}")
            keep.append(int(entry["keep"]))
        return cls(tuple(keep))


def all_pairings() -> list[Pairing]:
    """The 27 pairings, ordered lexicographically by kept qubits."""
    return [Pairing(k) for k in itertools.product(*(party_qubits(i) for i in range(3)))]


def all_outcomes() -> list[tuple[BellOutcome, BellOutcome, BellOutcome]]:
    return list(itertools.product(BELL_ORDER, repeat=3))


# First hit of search_pairings on the three input families (checked in tests).
CANONICAL_PAIRING = Pairing((0, 7, 8))
CANONICAL_OUTCOMES = (BellOutcome.PHI_PLUS,) * 3


@dataclass(frozen=True)
class ProtocolResult:
    post_state: DensityMatrix | None
    success_prob: float
    distance_to_closed: float | None
    outcomes: tuple
    pairing: Pairing

    def to_json(self) -> dict:
        return {
            "pairing": self.pairing.to_json(),
            "outcomes": [o.value for o in self.outcomes],
            "successProb": self.success_prob,
            "distanceToClosed": self.distance_to_closed,
            "postState": None if self.post_state is None else self.post_state.to_json(),
        }


def assemble_global(r1, r2, r3) -> DensityMatrix:
    """rho1 (x) rho2 (x) rho3 on nine qubits."""
    return DensityMatrix(kron(r1, r2, r3))


def post_select(global_state, pairing: Pairing, outcomes) -> tuple[np.ndarray, float]:
    """Unnormalized kept-qubit state and its probability.

    Projects each party's measured pair onto its Bell ket one pair at a time
    and traces out the measured qubits.
    """
    m = np.array(_array(global_state), dtype=complex)
    n = 9
    for party, outcome in enumerate(outcomes):
        q1, q2 = pairing.measured(party)
        proj = np.outer(bell_state(outcome), bell_state(outcome).conj())
        m = _apply_two_qubit(m, n, q1, q2, proj)
    prob = float(np.real(np.trace(m)))
    reduced = partial_trace(m, pairing.keep).mat  # ascending qubit order
    ranks = np.argsort(np.argsort(pairing.keep))
    return permute_qubits(reduced, ranks), prob


def _apply_two_qubit(m, n, q1, q2, op):
    """op_(q1,q2) m op_(q1,q2)^dagger for a 4x4 ``op``."""
    t = m.reshape((2,) * (2 * n))
    o = op.reshape(2, 2, 2, 2)
    t = np.tensordot(o, t, axes=([2, 3], [q1, q2]))
    t = np.moveaxis(t, [0, 1], [q1, q2])
    t = np.tensordot(t, o.conj(), axes=([n + q1, n + q2], [2, 3]))
    t = np.moveaxis(t, [2 * n - 2, 2 * n - 1], [n + q1, n + q2])
    return t.reshape(2 ** n, 2 ** n)


def phase_correct(rho, tol: float = VALIDATION_TOL) -> DensityMatrix:
    """Local diagonal unitaries making the anti-diagonal coherences real and
    non-negative.

    Qubit k gets diag(1, exp(i phi_k)). Coherence gamma_j picks up the phase
    ``C[j] @ phi``; up to three nonzero coherences are corrected exactly. With
    all four nonzero the phases are only fixable when consistent.
    """
    m = np.array(_array(rho), dtype=complex)
    if not is_x_shaped(m, tol):
        raise ValueError("phase correction needs an X-shaped three-qubit state")
    idx = np.arange(4)
    gamma = m[idx, 7 - idx]
    live = np.abs(gamma) > EQUALITY_TOL
    if not live.any():
        return validate_density(m, tol)
    C = np.array([[-1, -1, -1], [-1, -1, 1], [-1, 1, -1], [-1, 1, 1]], dtype=float)
    phi = np.linalg.lstsq(C[live], -np.angle(gamma[live]), rcond=None)[0]
    u = kron(*[np.diag([1, np.exp(1j * p)]) for p in phi])
    m = u @ m @ u.conj().T
    return validate_density(0.5 * (m + m.conj().T), tol)


def run_smp(global_state, pairing: Pairing, outcomes, target=None) -> ProtocolResult:
    """Post-select one outcome triple, normalize, phase-correct and compare
    with ``target`` (usually the closed-form output state)."""
    outcomes = tuple(BellOutcome(o) for o in outcomes)
    reduced, prob = post_select(global_state, pairing, outcomes)
    if prob <= ZERO_PROB:
        return ProtocolResult(None, max(prob, 0.0), None, outcomes, pairing)
    state = phase_correct(reduced / prob)
    dist = None if target is None else trace_distance(state, target)
    return ProtocolResult(state, prob, dist, outcomes, pairing)


_B = np.stack([bell_state(o) for o in BELL_ORDER]).reshape(4, 2, 2)
_LETTERS = "abcdefghijklmnopqr"


def outcome_batch(r1, r2, r3, pairing: Pairing) -> np.ndarray:
    """Unnormalized kept states for all 64 outcome triples at one pairing.

    Contracts the three factors directly, never forming the 512x512 product.
    Row ``16*o1 + 4*o2 + o3`` follows ``all_outcomes()`` order.
    """
    row, col = _LETTERS[:9], _LETTERS[9:]
    subs, args = [], []
    for s, r in enumerate((r1, r2, r3)):
        subs.append(row[3 * s:3 * s + 3] + col[3 * s:3 * s + 3])
        args.append(_array(r).reshape((2,) * 6))
    for party, o in enumerate("xyz"):
        q1, q2 = pairing.measured(party)
        subs += [o + row[q1] + row[q2], o + col[q1] + col[q2]]
        args += [_B.conj(), _B]
    keep = pairing.keep
    out = "xyz" + "".join(row[k] for k in keep) + "".join(col[k] for k in keep)
    return np.einsum(",".join(subs) + "->" + out, *args, optimize="greedy").reshape(64, 8, 8)


@dataclass(frozen=True)
class SearchHit:
    pairing: Pairing
    outcomes: tuple
    success_prob: float
    distance: float

    def to_json(self) -> dict:
        return {"pairing": self.pairing.to_json(), "outcomes": [o.value for o in self.outcomes],
                "successProb": self.success_prob, "distance": self.distance}


def search_pairings(r1, r2, r3, target, tol: float = 1e-10) -> list[SearchHit]:
    """Every (pairing, outcome triple) whose corrected output is within
    ``tol`` trace distance of ``target``, in enumeration order."""
    target = _array(target)
    target_abs = np.abs(target)
    outcomes = all_outcomes()
    hits = []
    for pairing in all_pairings():
        batch = outcome_batch(r1, r2, r3, pairing)
        probs = np.real(np.einsum("kii->k", batch))
        for k, prob in enumerate(probs):
            if prob <= ZERO_PROB:
                continue
            m = batch[k] / prob
            # Trace distance is at least half the largest entry difference, and
            # phase correction leaves entry magnitudes unchanged.
            if 0.5 * np.max(np.abs(np.abs(m) - target_abs)) > tol:
                continue
            if not is_x_shaped(m, VALIDATION_TOL):
                continue
            m = phase_correct(m).mat
            d = trace_distance(m, target)
            if d <= tol:
                hits.append(SearchHit(pairing, outcomes[k], float(prob), d))
    return hits


def outcome_probabilities(r1, r2, r3, pairing: Pairing) -> np.ndarray:
    batch = outcome_batch(r1, r2, r3, pairing)
    return np.real(np.einsum("kii->k", batch))
