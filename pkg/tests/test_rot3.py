import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rotgroup.cyclo import CycloNum
from rotgroup.rot3 import (
    CycloMat,
    LaurentGaussian,
    Mat3,
    Rat5,
    formal_cos_sin,
    formal_rot_x,
    int_rot,
    is_identity,
    mat_inverse,
    mat_mul,
    pythagorean_cos_sin,
    pythagorean_rot,
    rot_axis,
)


def S(N, k=1):
    return CycloMat.from_int_matrix(N, int_rot("y", k))


def T(a, m, N=None):
    return rot_axis("x", a, m, N)


def float_rot(axis, theta):
    c, s = math.cos(theta), math.sin(theta)
    if axis == "x":
        return np.array([[1, 0, 0], [0, c, s], [0, -s, c]])
    if axis == "y":
        return np.array([[c, 0, s], [0, 1, 0], [-s, 0, c]])
    return np.array([[c, s, 0], [-s, c, 0], [0, 0, 1]])


# ------------------------------------------------------------------ rot_axis


@pytest.mark.parametrize("m", [1, 3, 4, 12])
def test_zero_angle_is_identity(m):
    assert rot_axis("x", 0, m).is_identity()


def test_s_matrix_rows():
    assert rot_axis("y", 1, 4).int_rows() == ((0, 0, 1), (0, 1, 0), (-1, 0, 0))
    assert (S(4) @ T(0, 4)).int_rows() == ((0, 0, 1), (0, 1, 0), (-1, 0, 0))


@pytest.mark.parametrize("a,m", [(1, 12), (5, 12), (3, 20), (7, 24)])
def test_s_times_t_layout(a, m):
    c, s = CycloNum.cos(a, m, m), CycloNum.sin(a, m, m)
    zero, one = CycloNum.zero(m), CycloNum.one(m)
    st_ = S(m) @ T(a, m)
    assert st_.to_mat3() == Mat3([[zero, -s, c], [zero, c, s], [-one, zero, zero]])
    s3t = S(m, 3) @ T(a, m)
    assert s3t.to_mat3() == Mat3([[zero, s, -c], [zero, c, s], [one, zero, zero]])


@pytest.mark.parametrize("axis", ["x", "y", "z"])
@pytest.mark.parametrize("a,m", [(1, 5), (2, 7), (3, 8), (5, 12)])
def test_rot_axis_numeric(axis, a, m):
    assert np.allclose(rot_axis(axis, a, m).numeric().real, float_rot(axis, 2 * math.pi * a / m), atol=1e-9)


def test_s4_and_tm_identity():
    assert (S(12) ** 4).is_identity()
    assert (T(1, 12) ** 12).is_identity()
    assert is_identity(mat_mul(T(5, 12), T(7, 12)))


@pytest.mark.parametrize("a", range(-6, 7))
def test_s2_conjugation_flips_t(a):
    assert S(12, 2) @ T(a, 12) @ S(12, 2) == T(-a, 12)


def test_b_conjugation_direction():
    # which conjugate of T gives the z rotation: S^3 T S, not S T S^3
    Rz = rot_axis("z", 1, 4)
    assert S(4, 3) @ T(1, 4) @ S(4, 1) == Rz
    assert S(4, 1) @ T(1, 4) @ S(4, 3) == Rz.inverse()
    assert S(12, 3) @ T(1, 12) @ S(12, 1) == rot_axis("z", 1, 12)


@settings(max_examples=80)
@given(st.integers(-40, 40), st.integers(-40, 40), st.sampled_from([5, 6, 8, 12, 20]))
def test_one_parameter_subgroup(a, b, m):
    assert T(a, m) @ T(b, m) == T(a + b, m)


def test_random_products_are_rotations():
    rng = random.Random(7)
    for _ in range(1000):
        m = rng.choice([3, 4, 5, 6, 8, 10, 12, 15])
        N = math.lcm(4, m) * rng.choice([1, 1, 3])
        if N > 60:
            N = math.lcm(4, m)
        M = CycloMat.identity(N)
        for _ in range(rng.randint(1, 5)):
            M = M @ rot_axis(rng.choice("xyz"), rng.randint(-m, m), m, N)
        assert (M @ M.transpose()).is_identity()
        assert mat_inverse(M) == M.transpose()
    # exact determinant on a sample (slower generic path)
    for _ in range(20):
        M = rot_axis("x", rng.randint(1, 11), 12, 60) @ rot_axis("z", rng.randint(1, 9), 10, 60)
        assert M.is_rotation()


@pytest.mark.parametrize("k", [2, 3, 5])
def test_conductor_embedding(k):
    M = rot_axis("x", 1, 12) @ rot_axis("z", 1, 3, 12)
    E = M.embed(k)
    assert E.N == 12 * k
    assert np.allclose(E.numeric(), M.numeric(), atol=1e-9)
    assert E == rot_axis("x", 1, 12, 12 * k) @ rot_axis("z", 1, 3, 12 * k)
    assert E == M


def test_conductor_must_admit_sines():
    with pytest.raises(ValueError):
        CycloMat.rot("x", 1, 3, 6)


# ------------------------------------------------------------------ pythagorean


def test_pythagorean_examples():
    assert pythagorean_rot("x", 0).is_identity()
    T1 = pythagorean_rot("x", 1)
    r = Rat5
    assert T1 == Mat3([[r(1), r(0), r(0)], [r(0), r(3, 1), r(4, 1)], [r(0), r(-4, 1), r(3, 1)]])
    c2, s2 = pythagorean_cos_sin(2)
    assert c2.as_fraction() == Fraction(-7, 25) and s2.as_fraction() == Fraction(24, 25)


@pytest.mark.parametrize("c", [-5, -1, 1, 2, 7, 13])
def test_pythagorean_numeric(c):
    nu = math.atan2(4, 3)
    assert np.allclose(pythagorean_rot("x", c).numeric().real, float_rot("x", c * nu), atol=1e-9)
    assert np.allclose(pythagorean_rot("z", c).numeric().real, float_rot("z", c * nu), atol=1e-9)


def test_rat5_normalized():
    x = Rat5(25, 3)
    assert (x.num, x.exp) == (1, 1)


@given(st.integers(-20, 20), st.integers(-20, 20))
def test_pythagorean_group_law(a, b):
    M = pythagorean_rot("x", a) @ pythagorean_rot("x", b)
    assert M == pythagorean_rot("x", a + b)
    assert M.is_rotation()


# ------------------------------------------------------------------ Laurent


def test_formal_rot_examples():
    assert formal_rot_x(0).is_identity()
    half = Fraction(1, 2)
    assert formal_rot_x(1)[1, 1] == LaurentGaussian({1: (half, 0), -1: (half, 0)})


@pytest.mark.parametrize("c", [1, 2, -3])
def test_s_times_formal_layout(c):
    cos, sin = formal_cos_sin(c)
    Smat = Mat3.from_ints(int_rot("y", 1), LaurentGaussian.const)
    z, one = LaurentGaussian(), LaurentGaussian.const(1)
    assert Smat @ formal_rot_x(c) == Mat3([[z, -sin, cos], [z, cos, sin], [-one, z, z]])


@pytest.mark.parametrize("c", [1, 3, -2])
def test_formal_rot_is_rotation_and_numeric(c):
    M = formal_rot_x(c)
    assert M.is_rotation()
    omega = 0.7
    num = np.array([[M[i, j].evaluate(omega) for j in range(3)] for i in range(3)])
    assert np.allclose(num, float_rot("x", c * omega), atol=1e-12)


def test_laurent_zero_terms_dropped():
    x = LaurentGaussian({2: (1, 0)}) - LaurentGaussian({2: (1, 0)})
    assert x == LaurentGaussian() and not x.terms
