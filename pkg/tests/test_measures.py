import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from steerlab import measures, states
from steerlab.measures import cgm_closed, cgm_pure, cgm_x, s_gen
from steerlab.qcore import basis_ket, projector
from steerlab.states import FamilyParams, extract_x_params

GHZ = (basis_ket("000") + basis_ket("111")) / np.sqrt(2)
angles = st.floats(0, np.pi / 4)
probs = st.floats(0, 1)


def test_cgm_pure_examples():
    assert cgm_pure(GHZ) == pytest.approx(1)
    assert cgm_pure(basis_ket("000")) == pytest.approx(0, abs=1e-7)
    for t in (0.1, 0.5, np.pi / 4):
        psi = np.cos(t) * basis_ket("000") + np.sin(t) * basis_ket("111")
        assert cgm_pure(psi) == pytest.approx(np.sin(2 * t), abs=1e-12)
        assert cgm_pure(psi) == pytest.approx(cgm_x(extract_x_params(projector(psi))), abs=1e-12)
    with pytest.raises(ValueError):
        cgm_pure(2 * GHZ)


def test_cgm_pure_takes_minimum_cut():
    # |0> (x) Bell is entangled across one cut only, so C_GM vanishes.
    bell = (basis_ket("00") + basis_ket("11")) / np.sqrt(2)
    assert cgm_pure(np.kron(basis_ket("0"), bell)) == pytest.approx(0, abs=1e-7)


def test_cgm_x_examples():
    for p in (0.0, 0.3, 1.0):
        assert cgm_x(extract_x_params(states.rho2(p))) == pytest.approx(p, abs=1e-14)
    assert cgm_x(extract_x_params(states.rho1(0.3, 0.7))) == pytest.approx(0.7 * np.sin(0.6))
    value = cgm_x(extract_x_params(states.rho4_closed(0.1, 0.1, 0.33557)))
    assert value == pytest.approx(0.5, abs=1e-4)


def test_cgm_closed_examples():
    assert cgm_closed(4, FamilyParams(theta1=np.pi / 4, theta3=np.pi / 4, p3=1)) == pytest.approx(1)
    assert cgm_closed(3, FamilyParams(theta3=0.1, p3=0.5)) == pytest.approx(0.099335, abs=1e-6)
    with pytest.raises(ZeroDivisionError):
        cgm_closed(4, FamilyParams(theta1=0, p3=0))


def test_cgm_closed_family4_grid():
    grid = np.linspace(0.05, np.pi / 4, 5)
    for t1 in grid:
        for t3 in grid:
            for p3 in np.linspace(0.1, 1, 5):
                p = FamilyParams(theta1=t1, theta3=t3, p3=p3)
                matrix_level = cgm_x(extract_x_params(states.family_state(4, p)))
                assert abs(cgm_closed(4, p) - matrix_level) <= 1e-10


@settings(max_examples=80, deadline=None)
@given(angles, probs, probs, angles, probs)
def test_cgm_closed_matches_matrix(t1, p1, p2, t3, p3):
    p = FamilyParams(t1, p1, p2, t3, p3)
    for f in (1, 2, 3, 4):
        if f == 4 and states.rho4_normalizer(t1, t3, p3) < 1e-6:
            continue
        c = cgm_closed(f, p)
        assert abs(c - cgm_x(extract_x_params(states.family_state(f, p)))) <= 1e-10
        assert -1e-12 <= c <= 1 + 1e-12


def test_s_gen_examples():
    assert s_gen(2).s_gen == 1
    assert s_gen(0.9).s_gen == 0
    for p, t in [(0.8, 0.6), (0.3, 0.2)]:
        assert s_gen(2 * p * np.sin(2 * t)).s_gen == pytest.approx(max(0, 2 * p * np.sin(2 * t) - 1))
    assert s_gen(1.5).s_max == 2
    with pytest.raises(ValueError):
        s_gen(-0.1)


@settings(max_examples=100, deadline=None)
@given(st.floats(0, 2))
def test_s_gen_in_unit_interval(v):
    assert 0 <= s_gen(v).s_gen <= 1


def test_enhancement_closed_form():
    from steerlab.steering import closed_S
    for p in np.linspace(0.05, 1, 20):
        for t in np.linspace(np.pi / 80, np.pi / 4, 20):
            fp = FamilyParams(theta1=t, p1=p, theta3=t, p3=p)
            g4 = measures.s_gen(closed_S(4, fp)).s_gen
            assert g4 >= measures.s_gen(closed_S(1, fp)).s_gen - 1e-9
            assert g4 >= measures.s_gen(closed_S(3, fp)).s_gen - 1e-9
