"""The three input state families, the protocol's output state, and
X-state parameter extraction."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .qcore import EQUALITY_TOL, VALIDATION_TOL, basis_ket, projector, validate_density

QUARTER_PI = np.pi / 4

# Upper bound on p1 at theta1 = 0.1 obtained from an external NS2-locality
# criterion; quoted, not computed here.
P1_NS2_BOUND_AT_0_1 = 0.509


@dataclass(frozen=True)
class FamilyParams:
    theta1: float = 0.1
    p1: float = 0.5
    p2: float = 0.5
    theta3: float = 0.1
    p3: float = 0.5

    def __post_init__(self):
        for name in ("theta1", "theta3"):
            _check_angle(name, getattr(self, name))
        for name in ("p1", "p2", "p3"):
            _check_prob(name, getattr(self, name))

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "FamilyParams":
        keys = cls.__dataclass_fields__
        return cls(**{k: float(v) for k, v in d.items() if k in keys})


@dataclass(frozen=True)
class XStateParams:
    """Entries of a three-qubit X state.

    ``a[j]`` sits at basis index ``j`` (|000>..|011>), ``b[j]`` at index
    ``7 - j`` (|111>..|100>) and ``gamma[j]`` couples the two.
    """

    a: np.ndarray = field(default_factory=lambda: np.zeros(4))
    b: np.ndarray = field(default_factory=lambda: np.zeros(4))
    gamma: np.ndarray = field(default_factory=lambda: np.zeros(4, dtype=complex))

    def to_matrix(self) -> np.ndarray:
        m = np.zeros((8, 8), dtype=complex)
        for j in range(4):
            m[j, j] = self.a[j]
            m[7 - j, 7 - j] = self.b[j]
            m[j, 7 - j] = self.gamma[j]
            m[7 - j, j] = np.conj(self.gamma[j])
        return m

    def check(self, tol: float = VALIDATION_TOL) -> None:
        total = np.sum(self.a) + np.sum(self.b)
        if abs(total - 1) > tol:
            raise ValueError(f"diagonal sums to {total}, expected 1")
        if np.min(self.a) < -tol or np.min(self.b) < -tol:
            raise ValueError("negative diagonal entry")
        if np.any(np.abs(self.gamma) ** 2 > self.a * self.b + tol):
            raise ValueError("coherence exceeds sqrt(a_j b_j)")

    def to_json(self) -> dict:
        return {
            "a": [float(v) for v in self.a],
            "b": [float(v) for v in self.b],
            "gamma_re": [float(v) for v in np.real(self.gamma)],
            "gamma_im": [float(v) for v in np.imag(self.gamma)],
        }


def _check_angle(name, value):
    if not (0.0 <= value <= QUARTER_PI + EQUALITY_TOL):
        raise ValueError(f"{name}={value} outside [0, pi/4]")


def _check_prob(name, value):
    if not (0.0 <= value <= 1.0):
        raise ValueError(f"{name}={value} outside [0, 1]")


def _noisy(psi, p, noise_bits):
    return validate_density(p * projector(psi) + (1 - p) * projector(basis_ket(noise_bits)))


def rho1(theta1: float, p1: float):
    """p1 |psi_f><psi_f| + (1 - p1)|001><001| with psi_f = cos|000> + sin|111>."""
    _check_angle("theta1", theta1)
    _check_prob("p1", p1)
    psi = np.cos(theta1) * basis_ket("000") + np.sin(theta1) * basis_ket("111")
    return _noisy(psi, p1, "001")


def rho2(p2: float):
    _check_prob("p2", p2)
    psi = (basis_ket("000") + basis_ket("111")) / np.sqrt(2)
    return _noisy(psi, p2, "010")


def rho3(theta3: float, p3: float):
    _check_angle("theta3", theta3)
    _check_prob("p3", p3)
    psi = np.sin(theta3) * basis_ket("000") + np.cos(theta3) * basis_ket("111")
    return _noisy(psi, p3, "100")


def rho4_normalizer(theta1: float, theta3: float, p3: float) -> float:
    return np.sin(theta1) ** 2 + p3 * np.cos(2 * theta1) * np.sin(theta3) ** 2


def rho4_closed(theta1: float, theta3: float, p3: float):
    """Post-selected protocol output in closed form.

    The unnormalized phi = cos(t1) sin(t3)|000> + sin(t1) cos(t3)|111> is mixed
    with sin(t1)^2 |100><100| and divided by the global normalizer.
    """
    _check_angle("theta1", theta1)
    _check_angle("theta3", theta3)
    _check_prob("p3", p3)
    norm = rho4_normalizer(theta1, theta3, p3)
    if norm <= EQUALITY_TOL:
        raise ZeroDivisionError(
            f"output normalizer vanishes at theta1={theta1}, theta3={theta3}, p3={p3}"
        )
    phi = (np.cos(theta1) * np.sin(theta3) * basis_ket("000")
           + np.sin(theta1) * np.cos(theta3) * basis_ket("111"))
    m = p3 * projector(phi) + (1 - p3) * np.sin(theta1) ** 2 * projector(basis_ket("100"))
    return validate_density(m / norm)


def family_state(family: int, params: FamilyParams):
    if family == 1:
        return rho1(params.theta1, params.p1)
    if family == 2:
        return rho2(params.p2)
    if family == 3:
        return rho3(params.theta3, params.p3)
    if family == 4:
        return rho4_closed(params.theta1, params.theta3, params.p3)
    raise ValueError(f"unknown family {family!r}")


_X_MASK = np.eye(8, dtype=bool) | np.fliplr(np.eye(8, dtype=bool))


def is_x_shaped(rho, tol: float = EQUALITY_TOL) -> bool:
    m = np.asarray(getattr(rho, "mat", rho))
    return m.shape == (8, 8) and np.max(np.abs(m[~_X_MASK])) <= tol


def extract_x_params(rho, tol: float = EQUALITY_TOL) -> XStateParams:
    m = np.asarray(getattr(rho, "mat", rho))
    if m.shape != (8, 8):
        raise ValueError(f"expected a 3-qubit state, got shape {m.shape}")
    if not is_x_shaped(m, tol):
        raise ValueError("state has weight outside the diagonal and anti-diagonal")
    idx = np.arange(4)
    return XStateParams(
        a=np.real(m[idx, idx]).copy(),
        b=np.real(m[7 - idx, 7 - idx]).copy(),
        gamma=m[idx, 7 - idx].copy(),
    )


def bilocal_bound(family: int, params: FamilyParams) -> bool:
    """Whether the parameters fall in the stated Svetlichny-bilocal range."""
    if family == 1:
        return params.p1 <= bilocal_limit(1, params)
    if family == 2:
        return params.p2 <= 0.5
    if family == 3:
        return params.p3 <= bilocal_limit(3, params)
    raise ValueError(f"bilocal range is stated only for families 1-3, not {family!r}")


def bilocal_limit(family: int, params: FamilyParams) -> float:
    if family == 1:
        return 1 / (1 + np.sin(2 * params.theta1))
    if family == 2:
        return 0.5
    if family == 3:
        return 1 / (1 + np.sin(2 * params.theta3))
    raise ValueError(f"bilocal range is stated only for families 1-3, not {family!r}")
