import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from steerlab import states
from steerlab.optimize import OptimizerConfig, decode_angles, settings_from_angles
from steerlab.qcore import basis_ket, bell_state, BellOutcome, hermitian_eigvals, projector
from steerlab.states import FamilyParams
from steerlab.steering import (NORMALIZATION, WITNESS_WEIGHTS, SteeringSettings, UntrustedParty,
                               WitnessObjective, chsh_facets, closed_S, steering_operator,
                               steering_value, violates_genuine_steering)

from conftest import random_density

GHZ = projector((basis_ket("000") + basis_ket("111")) / np.sqrt(2))
X, Y, Z = np.eye(3)
FAST = OptimizerConfig(multistarts=8)


def planar(angle):
    return np.array([np.cos(angle), np.sin(angle), 0.0])


# Analytic optimum for GHZ: <s_a s_b s_c> = cos(alpha + beta + gamma) in the xy plane.
GHZ_OPTIMAL = SteeringSettings((X, Y), (X, Y), (planar(5 * np.pi / 4), planar(-np.pi / 4)))


def random_settings(rng, orthogonal=True):
    s = settings_from_angles(rng.uniform(0, 2 * np.pi, 10))
    if orthogonal:
        return s
    v = rng.normal(size=(6, 3))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return SteeringSettings.from_json(v)


def test_chsh_tsirelson():
    a0, a1 = Z, X
    b0, b1 = (Z + X) / np.sqrt(2), (Z - X) / np.sqrt(2)
    chsh, _ = chsh_facets(a0, a1, b0, b1)
    phi = projector(bell_state(BellOutcome.PHI_PLUS))
    assert np.trace(phi @ chsh).real == pytest.approx(2 * np.sqrt(2))
    assert np.trace(np.eye(4) / 4 @ chsh).real == pytest.approx(0)


def test_chsh_facet_norms(rng):
    for _ in range(100):
        v = rng.normal(size=(4, 3))
        v /= np.linalg.norm(v, axis=1, keepdims=True)
        for op in chsh_facets(*v):
            assert np.max(np.abs(hermitian_eigvals(op))) <= 2 * np.sqrt(2) + 1e-12


def test_ghz_optimal_settings():
    for u in UntrustedParty:
        raw = np.trace(GHZ @ steering_operator(GHZ_OPTIMAL, u)).real
        assert raw == pytest.approx(4 * np.sqrt(2), abs=1e-12)
        assert steering_value(GHZ, GHZ_OPTIMAL, u) == pytest.approx(2, abs=1e-12)
    assert steering_value(np.eye(8) / 8, GHZ_OPTIMAL, UntrustedParty.C) == pytest.approx(0)


def test_operator_hermitian_and_bounded(rng):
    for _ in range(30):
        s = random_settings(rng, orthogonal=False)
        for u in UntrustedParty:
            op = steering_operator(s, u)
            assert np.max(np.abs(op - op.conj().T)) <= 1e-13
            assert hermitian_eigvals(op)[-1] / NORMALIZATION <= 2 + 1e-12


def test_fast_path_matches_operator(rng):
    for _ in range(20):
        rho = random_density(rng, 3)
        s = random_settings(rng, orthogonal=False)
        for u in UntrustedParty:
            assert WitnessObjective(rho, u)(s) == pytest.approx(steering_value(rho, s, u), abs=1e-13)


def test_linear_in_state(rng):
    rho, sigma = random_density(rng, 3), random_density(rng, 3)
    s = random_settings(rng)
    for p in (0.0, 0.3, 0.8):
        mixed = steering_value(p * rho + (1 - p) * sigma, s, UntrustedParty.B)
        parts = p * steering_value(rho, s, UntrustedParty.B) + (1 - p) * steering_value(
            sigma, s, UntrustedParty.B)
        assert abs(mixed - parts) <= 1e-12


def test_relabel_symmetry(rng):
    # Swapping both trusted pairs exchanges CHSH and CHSH'; swapping Z0, Z1
    # as well leaves the witness unchanged.
    rho = random_density(rng, 3)
    s = random_settings(rng)
    swapped = SteeringSettings(s.first[::-1], s.second[::-1], s.untrusted[::-1])
    for u in UntrustedParty:
        assert steering_value(rho, s, u) == pytest.approx(steering_value(rho, swapped, u), abs=1e-13)


def test_relabel_symmetry_of_maximum():
    rho = states.rho3(0.3, 0.7)
    a = violates_genuine_steering(rho, OptimizerConfig(seed=1)).best
    b = violates_genuine_steering(rho, OptimizerConfig(seed=2)).best
    assert abs(a - b) <= 1e-6


def test_trusted_orthogonality_matters():
    # Parallel trusted settings push a product state to sqrt(2), past the
    # NLHS bound; orthogonal pairs keep it at the closed-form 1/sqrt(2).
    product = projector(basis_ket("010"))
    parallel = SteeringSettings((Z, Z), (-Z, -Z), (Z, Z))
    assert not parallel.trusted_orthogonal()
    assert steering_value(product, parallel, UntrustedParty.C) == pytest.approx(np.sqrt(2))
    best = violates_genuine_steering(product, FAST).best
    assert best == pytest.approx(1 / np.sqrt(2), abs=1e-9)


def test_settings_json_roundtrip(rng):
    s = random_settings(rng)
    back = SteeringSettings.from_json(s.to_json())
    assert np.allclose(back.vectors(), s.vectors())
    assert len(s.to_json()) == 6 and all(len(v) == 3 for v in s.to_json())
    with pytest.raises(ValueError):
        SteeringSettings.from_json([[1, 0, 0]] * 5)
    with pytest.raises(ValueError):
        SteeringSettings.from_json([[1, 1, 0]] * 6)


def test_closed_form_examples():
    assert closed_S(2, FamilyParams(p2=1)) == pytest.approx(2)
    assert closed_S(4, FamilyParams(theta1=0.1, theta3=0.1, p3=0.33557)) == pytest.approx(1, abs=2e-4)
    assert closed_S(1, FamilyParams(theta1=0.1, p1=0)) == pytest.approx(1 / np.sqrt(2))
    with pytest.raises(ZeroDivisionError):
        closed_S(4, FamilyParams(theta1=0, p3=0))


def test_violation_examples():
    ghz = violates_genuine_steering(GHZ, FAST)
    assert ghz.violated and ghz.best == pytest.approx(2, abs=1e-9)
    product = violates_genuine_steering(projector(basis_ket("000")), FAST)
    assert not product.violated and product.best <= 1
    assert violates_genuine_steering(states.rho4_closed(0.1, 0.1, 0.5), FAST).violated


def test_rho2_half_no_violation():
    report = violates_genuine_steering(states.rho2(0.5), FAST)
    assert not report.violated
    assert report.best <= 1 + 1e-9


def analytic_inner_max(rho, u, P, Q):
    """Best untrusted directions in closed form: each Z_k aligns with its
    conditional correlation vector."""
    T = WitnessObjective(rho, u).tensor
    conditional = np.einsum("abc,ia,jb->ijc", T, P, Q)
    total = sum(np.linalg.norm(np.einsum("ij,ijc->c", WITNESS_WEIGHTS[:, :, k], conditional))
                for k in range(2))
    return total / NORMALIZATION


@pytest.mark.parametrize("family,params", [
    (1, FamilyParams(theta1=0.3, p1=0.6)),
    (3, FamilyParams(theta3=0.5, p3=0.4)),
    (4, FamilyParams(theta1=0.2, theta3=0.6, p3=0.7)),
])
def test_optimizer_beats_random_frames_with_exact_inner_max(rng, family, params):
    rho = states.family_state(family, params)
    report = violates_genuine_steering(rho, FAST)
    sampled = 0.0
    for _ in range(300):
        x = rng.uniform(0, 2 * np.pi, 10)
        P, Q, _ = decode_angles(x)
        for u in UntrustedParty:
            sampled = max(sampled, analytic_inner_max(rho, u, P, Q))
    assert report.best >= sampled - 1e-9
    assert report.best == pytest.approx(closed_S(family, params), abs=1e-6)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_value_never_exceeds_two(seed):
    rng = np.random.default_rng(seed)
    rho = random_density(rng, 3)
    s = random_settings(rng)
    assert steering_value(rho, s, UntrustedParty(seed % 3)) <= 2 + 1e-12
