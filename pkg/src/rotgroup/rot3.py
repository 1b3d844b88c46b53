"""Exact 3x3 rotation matrices over several scalar rings.

Axis conventions (fixed so that S T^a has rows (0,-s,c), (0,c,s), (-1,0,0)):

    R_x(t) = [[1, 0, 0], [0, c, s], [0, -s, c]]
    R_y(t) = [[c, 0, s], [0, 1, 0], [-s, 0, c]]
    R_z(t) = [[c, s, 0], [-s, c, 0], [0, 0, 1]]

With these, S^-1 R_x(t) S = R_z(t), so B = S^3 T^p S in G(pq,4,1), while
S T^p S^3 = R_z(-2 pi/q) is B^-1.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import reduce
from operator import or_

import numpy as np

from .cyclo import CycloInt, CycloNum, conductor_data, phi

_INT64_SAFE = 1 << 62

AXES = ("x", "y", "z")


# ---------------------------------------------------------------- generic Mat3


class Mat3:
    """3x3 matrix over any exact scalar ring with +, -, * and ==."""

    __slots__ = ("e", "_hash")

    def __init__(self, entries) -> None:
        rows = [list(r) for r in entries] if not isinstance(entries, tuple) or len(entries) != 9 else None
        if rows is not None:
            if len(rows) != 3 or any(len(r) != 3 for r in rows):
                raise ValueError("Mat3 needs 3x3 entries")
            entries = tuple(x for r in rows for x in r)
        self.e = tuple(entries)
        self._hash = None

    @classmethod
    def from_ints(cls, rows, convert) -> Mat3:
        return cls([[convert(v) for v in r] for r in rows])

    @classmethod
    def identity(cls, convert=int) -> Mat3:
        return cls.from_ints(((1, 0, 0), (0, 1, 0), (0, 0, 1)), convert)

    def __getitem__(self, ij):
        i, j = ij
        return self.e[3 * i + j]

    def rows(self):
        return [list(self.e[3 * i : 3 * i + 3]) for i in range(3)]

    def __matmul__(self, other: Mat3) -> Mat3:
        if not isinstance(other, Mat3):
            return NotImplemented
        a, b = self.e, other.e
        out = []
        for i in range(3):
            for j in range(3):
                acc = None
                for k in range(3):
                    x, y = a[3 * i + k], b[3 * k + j]
                    if not x or not y:
                        continue
                    t = x * y
                    acc = t if acc is None else acc + t
                if acc is None:
                    acc = _zero_like(a[3 * i], b[j])
                out.append(acc)
        return Mat3(tuple(out))

    __mul__ = __matmul__

    def scale(self, c) -> Mat3:
        return Mat3(tuple(c * x for x in self.e))

    def transpose(self) -> Mat3:
        e = self.e
        return Mat3((e[0], e[3], e[6], e[1], e[4], e[7], e[2], e[5], e[8]))

    T = property(transpose)

    def inverse(self) -> Mat3:
        """Inverse of a rotation (its transpose)."""
        return self.transpose()

    def map(self, f) -> Mat3:
        return Mat3(tuple(f(x) for x in self.e))

    def det(self):
        a, b, c, d, e, f, g, h, i = self.e
        return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)

    def is_identity(self) -> bool:
        return all(x == (1 if k in (0, 4, 8) else 0) for k, x in enumerate(self.e))

    def is_rotation(self) -> bool:
        return (self @ self.transpose()).is_identity() and self.det() == 1

    def __pow__(self, k: int) -> Mat3:
        base = self if k >= 0 else self.inverse()
        k = abs(k)
        result = Mat3(tuple((x - x) + (1 if i in (0, 4, 8) else 0) for i, x in enumerate(self.e)))
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, CycloMat):
            other = other.to_mat3()
        if not isinstance(other, Mat3):
            return NotImplemented
        return all(x == y for x, y in zip(self.e, other.e))

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.e)
        return self._hash

    def numeric(self) -> np.ndarray:
        return np.array([[complex(x) for x in self.e[3 * i : 3 * i + 3]] for i in range(3)])

    def __repr__(self) -> str:
        return "Mat3(" + repr(self.rows()) + ")"

    def __str__(self) -> str:
        return "\n".join("[" + ", ".join(str(x) for x in r) + "]" for r in self.rows())


def _zero_like(x, y):
    if not isinstance(x, int):
        return x - x
    if not isinstance(y, int):
        return y - y
    return 0


# ------------------------------------------------- integer (signed permutation) helpers


def int_rot(axis: str, quarter_turns: int) -> tuple[tuple[int, ...], ...]:
    """Integer rotation by quarter_turns * pi/2 about an axis."""
    c, s = ((1, 0), (0, 1), (-1, 0), (0, -1))[quarter_turns % 4]
    return _axis_rows(axis, c, s, 1, 0)


def _axis_rows(axis, c, s, one, zero):
    if axis == "x":
        return ((one, zero, zero), (zero, c, s), (zero, -s, c))
    if axis == "y":
        return ((c, zero, s), (zero, one, zero), (-s, zero, c))
    if axis == "z":
        return ((c, s, zero), (-s, c, zero), (zero, zero, one))
    raise ValueError(f"unknown axis {axis!r}")


def imat_mul(a, b):
    return tuple(tuple(sum(a[i][k] * b[k][j] for k in range(3)) for j in range(3)) for i in range(3))


def imat_T(a):
    return tuple(tuple(a[j][i] for j in range(3)) for i in range(3))


IDENTITY_INT = ((1, 0, 0), (0, 1, 0), (0, 0, 1))


# ------------------------------------------------------ packed cyclotomic matrices


class CycloMat:
    """3x3 matrix over Z[zeta_N][1/2] stored as one (3,3,phi) array over a shared 2-power.

    This is the fast path behind evaluate(); entries are exposed as CycloNum.
    """

    __slots__ = ("N", "arr", "two_exp", "_hash")

    def __init__(self, N: int, arr: np.ndarray, two_exp: int = 0) -> None:
        self.N = N
        self.arr, self.two_exp = _normalize(arr, two_exp)
        self._hash = None

    @classmethod
    def identity(cls, N: int) -> CycloMat:
        return cls.from_int_matrix(N, IDENTITY_INT)

    @classmethod
    def from_int_matrix(cls, N: int, rows) -> CycloMat:
        arr = np.zeros((3, 3, phi(N)), dtype=np.int64)
        for i in range(3):
            for j in range(3):
                arr[i, j, 0] = rows[i][j]
        return cls(N, arr, 0)

    @classmethod
    def from_mat3(cls, mat: Mat3, N: int | None = None) -> CycloMat:
        nums = [x if isinstance(x, CycloNum) else CycloNum.from_int(N, x) for x in mat.e]
        if N is None:
            N = nums[0].m
        e = max(x.two_exp for x in nums)
        arr = np.zeros((3, 3, phi(N)), dtype=object)
        for k, x in enumerate(nums):
            num = x.num if x.m == N else x.num.embed(N // x.m)
            arr[k // 3, k % 3, :] = [c << (e - x.two_exp) for c in num.coeffs]
        return cls(N, arr, e)

    @classmethod
    def rot(cls, axis: str, a: int, n: int, N: int) -> CycloMat:
        """Rotation by 2 pi a / n about axis, in conductor N (4 | N, n | N)."""
        if N % 4 or N % n:
            raise ValueError(f"conductor {N} must be divisible by 4 and {n}")
        a %= n
        if (4 * a) % n == 0:
            return cls.from_int_matrix(N, int_rot(axis, 4 * a // n))
        f = phi(N)
        cos = np.array(CycloNum.cos(a, n, N).num.coeffs, dtype=np.int64)
        sin = np.array(CycloNum.sin(a, n, N).num.coeffs, dtype=np.int64)
        two = np.zeros(f, dtype=np.int64)
        two[0] = 2
        rows = _axis_rows(axis, cos, sin, two, np.zeros(f, dtype=np.int64))
        arr = np.array(rows, dtype=np.int64)
        return cls(N, arr, 1)

    # -- arithmetic

    def __matmul__(self, other: CycloMat) -> CycloMat:
        if not isinstance(other, CycloMat):
            return NotImplemented
        if other.N != self.N:
            raise ValueError(f"conductor mismatch: {self.N} vs {other.N}")
        data = conductor_data(self.N)
        f = data.phi
        A, B = self.arr, other.arr
        bound = _maxabs(A) * _maxabs(B) * 3 * f * data.red_norm
        dtype = np.int64 if bound < _INT64_SAFE else object
        if dtype is object:
            A, B = A.astype(object), B.astype(object)
        nzA = A.any(axis=2) if dtype is np.int64 else _nonzero_mask(A)
        nzB = B.any(axis=2) if dtype is np.int64 else _nonzero_mask(B)
        width = 2 * f - 1
        out = np.zeros((3, 3, width), dtype=dtype)
        for i in range(3):
            for k in range(3):
                if not nzA[i, k]:
                    continue
                a = A[i, k]
                for j in range(3):
                    if nzB[k, j]:
                        out[i, j] += np.convolve(a, B[k, j])
        red = data.red if dtype is np.int64 else data.red_obj
        res = out.reshape(9, width).dot(red).reshape(3, 3, f)
        return CycloMat(self.N, res, self.two_exp + other.two_exp)

    __mul__ = __matmul__

    def scale(self, c: CycloNum) -> CycloMat:
        """Multiply every entry by a scalar."""
        if c.m != self.N:
            c = CycloNum(c.num.embed(self.N // c.m), c.two_exp)
        data = conductor_data(self.N)
        coeffs = np.array(c.num.coeffs, dtype=object)
        out = np.zeros((3, 3, data.phi), dtype=object)
        for i in range(3):
            for j in range(3):
                prod = np.convolve(self.arr[i, j].astype(object), coeffs)
                out[i, j] = prod.dot(data.red_obj[: len(prod)])
        return CycloMat(self.N, out, self.two_exp + c.two_exp)

    def transpose(self) -> CycloMat:
        return CycloMat(self.N, self.arr.transpose(1, 0, 2).copy(), self.two_exp)

    T = property(transpose)

    def inverse(self) -> CycloMat:
        return self.transpose()

    def __pow__(self, k: int) -> CycloMat:
        base = self if k >= 0 else self.inverse()
        result = CycloMat.identity(self.N)
        k = abs(k)
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def embed(self, k: int) -> CycloMat:
        """Same matrix in conductor k*N via zeta_N -> zeta_{kN}**k."""
        if k == 1:
            return self
        M = k * self.N
        data = conductor_data(M)
        out = np.zeros((3, 3, data.phi), dtype=object)
        for i in range(3):
            for j in range(3):
                terms = {k * idx: int(c) for idx, c in enumerate(self.arr[i, j]) if c}
                out[i, j] = data.reduce_exponents(terms)
        return CycloMat(M, out, self.two_exp)

    def entry(self, i: int, j: int) -> CycloNum:
        return CycloNum(CycloInt(self.N, [int(c) for c in self.arr[i, j]]), self.two_exp)

    def __getitem__(self, ij) -> CycloNum:
        return self.entry(*ij)

    def to_mat3(self) -> Mat3:
        return Mat3([[self.entry(i, j) for j in range(3)] for i in range(3)])

    def is_identity(self) -> bool:
        if self.two_exp:
            return False
        arr = self.arr
        for i in range(3):
            for j in range(3):
                v = arr[i, j]
                if i == j:
                    if v[0] != 1 or v[1:].any():
                        return False
                elif v.any():
                    return False
        return True

    def is_rotation(self) -> bool:
        return (self @ self.transpose()).is_identity() and self.to_mat3().det() == 1

    def is_signed_permutation(self) -> bool:
        return self.two_exp == 0 and not self.arr[:, :, 1:].any() and all(
            int(v) in (-1, 0, 1) for v in self.arr[:, :, 0].ravel()
        )

    def int_rows(self):
        """Integer rows when every entry is a rational integer."""
        if self.two_exp or self.arr[:, :, 1:].any():
            raise ValueError("matrix has non-integer entries")
        return tuple(tuple(int(self.arr[i, j, 0]) for j in range(3)) for i in range(3))

    def _key(self):
        if self.arr.dtype == np.int64:
            return (self.N, self.two_exp, self.arr.tobytes())
        return (self.N, self.two_exp, tuple(int(v) for v in self.arr.ravel()))

    def __eq__(self, other) -> bool:
        if isinstance(other, Mat3):
            return self.to_mat3() == other
        if not isinstance(other, CycloMat):
            return NotImplemented
        if self.N != other.N:
            n = math.lcm(self.N, other.N)
            return self.embed(n // self.N) == other.embed(n // other.N)
        return self.two_exp == other.two_exp and np.array_equal(self.arr, other.arr)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._key())
        return self._hash

    def numeric(self) -> np.ndarray:
        z = np.exp(2j * np.pi * np.arange(phi(self.N)) / self.N)
        vals = self.arr.astype(float) @ z
        return vals / float(2**self.two_exp)

    def __repr__(self) -> str:
        return f"CycloMat(N={self.N}, two_exp={self.two_exp}, numeric={np.round(self.numeric().real, 6).tolist()})"


def _maxabs(arr: np.ndarray) -> int:
    if arr.dtype == np.int64:
        return int(np.abs(arr).max()) if arr.size else 0
    return max((abs(int(v)) for v in arr.ravel()), default=0)


def _nonzero_mask(arr: np.ndarray) -> np.ndarray:
    return np.array([[any(arr[i, j]) for j in range(3)] for i in range(3)])


def _normalize(arr: np.ndarray, e: int):
    if arr.dtype == object:
        m = _maxabs(arr)
        if m < _INT64_SAFE:
            arr = arr.astype(np.int64)
    if e:
        if arr.dtype == np.int64:
            acc = int(np.bitwise_or.reduce(arr.ravel()))
        else:
            acc = reduce(or_, (int(v) for v in arr.ravel()), 0)
        if acc == 0:
            return arr, 0
        v = min((acc & -acc).bit_length() - 1, e)
        if v:
            arr = arr >> v if arr.dtype == np.int64 else np.array([int(x) >> v for x in arr.ravel()], dtype=object).reshape(arr.shape)
            e -= v
    return arr, e


def rot_axis(axis: str, a: int, m: int, conductor: int | None = None) -> CycloMat:
    """R_axis^(2 pi a / m) with entries in Z[zeta_N][1/2], N = lcm(m, 4) by default."""
    if m < 1:
        raise ValueError("m must be >= 1")
    N = conductor if conductor is not None else math.lcm(m, 4)
    return CycloMat.rot(axis, a, m, N)


def mat_mul(a, b):
    return a @ b


def mat_inverse(a):
    return a.inverse()


def is_identity(a) -> bool:
    return a.is_identity()


# ------------------------------------------------------------------- Rat5


class Rat5:
    """Rational number num / 5**exp, normalized so 5 does not divide num when exp > 0."""

    __slots__ = ("num", "exp")

    def __init__(self, num: int, exp: int = 0) -> None:
        if exp < 0:
            num *= 5 ** (-exp)
            exp = 0
        while exp and num % 5 == 0:
            num //= 5
            exp -= 1
        if num == 0:
            exp = 0
        self.num = num
        self.exp = exp

    @staticmethod
    def _c(x):
        if isinstance(x, int):
            return Rat5(x)
        return x if isinstance(x, Rat5) else NotImplemented

    def __add__(self, other):
        other = self._c(other)
        if other is NotImplemented:
            return other
        e = max(self.exp, other.exp)
        return Rat5(self.num * 5 ** (e - self.exp) + other.num * 5 ** (e - other.exp), e)

    __radd__ = __add__

    def __neg__(self):
        return Rat5(-self.num, self.exp)

    def __sub__(self, other):
        return self + (-self._c(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._c(other)
        if other is NotImplemented:
            return other
        return Rat5(self.num * other.num, self.exp + other.exp)

    __rmul__ = __mul__

    def __bool__(self):
        return self.num != 0

    def __eq__(self, other):
        other = self._c(other)
        if other is NotImplemented:
            return other
        return self.num == other.num and self.exp == other.exp

    def __hash__(self):
        return hash((self.num, self.exp))

    def __float__(self):
        return self.num / 5**self.exp

    def __complex__(self):
        return complex(float(self))

    def as_fraction(self) -> Fraction:
        return Fraction(self.num, 5**self.exp)

    def __repr__(self):
        return f"Rat5({self.num}, {self.exp})"

    def __str__(self):
        return f"{self.num}/5^{self.exp}" if self.exp else str(self.num)


def pythagorean_cos_sin(c: int) -> tuple[Rat5, Rat5]:
    """cos(c nu), sin(c nu) for nu = arctan(4/3), from (3 + 4i)^|c| / 5^|c|."""
    re, im = 1, 0
    for _ in range(abs(c)):
        re, im = 3 * re - 4 * im, 4 * re + 3 * im
    if c < 0:
        im = -im
    return Rat5(re, abs(c)), Rat5(im, abs(c))


def pythagorean_rot(axis: str, c: int) -> Mat3:
    """R_axis^(c nu) over Rat5."""
    if axis not in ("x", "z"):
        raise ValueError("pythagorean rotations are about x or z")
    cos, sin = pythagorean_cos_sin(c)
    return Mat3(_axis_rows(axis, cos, sin, Rat5(1), Rat5(0)))


def int_mat3(rows, convert) -> Mat3:
    return Mat3.from_ints(rows, convert)


S_ROWS = int_rot("y", 1)


# --------------------------------------------------------- Laurent polynomials


class LaurentGaussian:
    """Finite sum of c_k x^k with Gaussian-rational c_k, x a formal unit."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms=None) -> None:
        clean = {}
        for k, (re, im) in (terms or {}).items():
            re, im = Fraction(re), Fraction(im)
            if re or im:
                clean[k] = (re, im)
        self.terms = clean
        self._hash = None

    @classmethod
    def const(cls, re, im=0) -> LaurentGaussian:
        return cls({0: (re, im)})

    @classmethod
    def monomial(cls, k: int, re, im=0) -> LaurentGaussian:
        return cls({k: (re, im)})

    @staticmethod
    def _c(x):
        if isinstance(x, (int, Fraction)):
            return LaurentGaussian.const(x)
        return x if isinstance(x, LaurentGaussian) else NotImplemented

    def __add__(self, other):
        other = self._c(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for k, (re, im) in other.terms.items():
            r0, i0 = out.get(k, (0, 0))
            out[k] = (r0 + re, i0 + im)
        return LaurentGaussian(out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentGaussian({k: (-re, -im) for k, (re, im) in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._c(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._c(other)
        if other is NotImplemented:
            return other
        out: dict[int, tuple[Fraction, Fraction]] = {}
        for k1, (a, b) in self.terms.items():
            for k2, (c, d) in other.terms.items():
                r0, i0 = out.get(k1 + k2, (0, 0))
                out[k1 + k2] = (r0 + a * c - b * d, i0 + a * d + b * c)
        return LaurentGaussian(out)

    __rmul__ = __mul__

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        other = self._c(other)
        if other is NotImplemented:
            return other
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def degree(self) -> int | None:
        return max(self.terms) if self.terms else None

    def leading(self) -> tuple[int, tuple[Fraction, Fraction]] | None:
        if not self.terms:
            return None
        k = max(self.terms)
        return k, self.terms[k]

    def evaluate(self, omega: float) -> complex:
        return sum(complex(re, im) * np.exp(1j * k * omega) for k, (re, im) in self.terms.items())

    def __repr__(self):
        return f"LaurentGaussian({self.terms})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for k in sorted(self.terms, reverse=True):
            re, im = self.terms[k]
            coef = f"({re}{'+' if im >= 0 else '-'}{abs(im)}i)" if im else str(re)
            parts.append(f"{coef}*x^{k}" if k else coef)
        return " + ".join(parts)


def formal_cos_sin(c: int) -> tuple[LaurentGaussian, LaurentGaussian]:
    half = Fraction(1, 2)
    cos = LaurentGaussian({c: (half, 0)}) + LaurentGaussian({-c: (half, 0)})
    # (x^c - x^-c) / 2i = -i/2 x^c + i/2 x^-c
    sin = LaurentGaussian({c: (0, -half)}) + LaurentGaussian({-c: (0, half)})
    return cos, sin


def formal_rot_x(c: int) -> Mat3:
    """R_x^(c omega) with x = e^{i omega} kept formal."""
    cos, sin = formal_cos_sin(c)
    return Mat3(_axis_rows("x", cos, sin, LaurentGaussian.const(1), LaurentGaussian()))


def formal_rot_z(c: int) -> Mat3:
    cos, sin = formal_cos_sin(c)
    return Mat3(_axis_rows("z", cos, sin, LaurentGaussian.const(1), LaurentGaussian()))
