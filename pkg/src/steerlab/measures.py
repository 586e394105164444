"""Genuine multipartite concurrence and the genuine steering measure."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qcore import EQUALITY_TOL, partial_trace, projector
from .states import FamilyParams, XStateParams, rho4_normalizer

# Largest normalized witness value, reached by the GHZ state.
S_MAX = 2.0


@dataclass(frozen=True)
class SteeringScore:
    s_n: float
    s_max: float
    s_gen: float


def cgm_pure(psi) -> float:
    """min over the three single-qubit cuts of sqrt(2 (1 - purity))."""
    psi = np.asarray(psi, dtype=complex).ravel()
    if psi.size != 8:
        raise ValueError(f"expected a 3-qubit ket, got {psi.size} amplitudes")
    if abs(np.linalg.norm(psi) - 1) > 1e-10:
        raise ValueError("ket is not normalized")
    rho = projector(psi)
    vals = []
    for q in range(3):
        purity = partial_trace(rho, [q]).purity()
        vals.append(np.sqrt(max(0.0, 2 * (1 - purity))))
    return float(min(vals))


def cgm_x(x: XStateParams) -> float:
    root_ab = np.sqrt(np.clip(x.a * x.b, 0, None))
    w = root_ab.sum() - root_ab
    return float(2 * max(0.0, np.max(np.abs(x.gamma) - w)))


def cgm_closed(family: int, params: FamilyParams) -> float:
    t1, t3 = params.theta1, params.theta3
    if family == 1:
        return params.p1 * np.sin(2 * t1)
    if family == 2:
        return params.p2
    if family == 3:
        return params.p3 * np.sin(2 * t3)
    if family == 4:
        norm = rho4_normalizer(t1, t3, params.p3)
        if norm <= EQUALITY_TOL:
            raise ZeroDivisionError("output normalizer vanishes")
        return params.p3 * np.sin(2 * t1) * np.sin(2 * t3) / (2 * norm)
    raise ValueError(f"unknown family {family!r}")


def s_gen(s_n: float) -> SteeringScore:
    if s_n < 0:
        raise ValueError(f"normalized witness value must be >= 0, got {s_n}")
    return SteeringScore(s_n=float(s_n), s_max=S_MAX,
                         s_gen=max(0.0, (s_n - 1) / (S_MAX - 1)))
