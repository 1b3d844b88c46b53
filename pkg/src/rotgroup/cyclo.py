"""Exact arithmetic in cyclotomic rings Z[zeta_m] and Z[zeta_m][1/2].

Elements are stored in the power basis 1, zeta, ..., zeta^(phi(m)-1) modulo
the m-th cyclotomic polynomial, so equality is coefficientwise.  The module
also carries the characteristic-2 residue fields F_2[X]/(g) used by the
maximal-ideal non-identity certificate.
"""

from __future__ import annotations

import cmath
import math
import threading
from dataclasses import dataclass
from functools import lru_cache, reduce
from operator import or_

import numpy as np

_INT64_SAFE = 1 << 62


def phi(n: int) -> int:
    """Euler's totient."""
    if n < 1:
        raise ValueError("phi requires n >= 1")
    result = n
    k, p = n, 2
    while p * p <= k:
        if k % p == 0:
            while k % p == 0:
                k //= p
            result -= result // p
        p += 1
    if k > 1:
        result -= result // k
    return result


def _poly_divexact(num: list[int], den: list[int]) -> list[int]:
    # exact division of integer polynomials, coefficient lists low -> high, den monic
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    for i in range(len(out) - 1, -1, -1):
        c = num[i + len(den) - 1]
        out[i] = c
        if c:
            for j, d in enumerate(den):
                num[i + j] -= c * d
    if any(num[: len(den) - 1]):
        raise ArithmeticError("inexact polynomial division")
    return out


@lru_cache(maxsize=None)
def cyclotomic_poly(m: int) -> tuple[int, ...]:
    """Coefficients (low to high) of the m-th cyclotomic polynomial."""
    if m < 1:
        raise ValueError("cyclotomic_poly requires m >= 1")
    num = [-1] + [0] * (m - 1) + [1]
    for d in range(1, m):
        if m % d == 0:
            num = _poly_divexact(num, list(cyclotomic_poly(d)))
    return tuple(num)


class _Conductor:
    """Per-conductor tables: reduction rows for x^j mod Phi_m."""

    def __init__(self, m: int) -> None:
        self.m = m
        self.phi = phi(m)
        self.poly = cyclotomic_poly(m)
        n_rows = max(m, 2 * self.phi - 1)
        rows = []
        cur = [0] * self.phi
        cur[0] = 1
        for _ in range(n_rows):
            rows.append(tuple(cur))
            # multiply by x and reduce
            top = cur[-1]
            cur = [0] + cur[:-1]
            if top:
                cur = [c - top * p for c, p in zip(cur, self.poly[:-1])]
        self.rows = rows
        self.red = np.array(rows[: 2 * self.phi - 1], dtype=np.int64)
        self.red_obj = self.red.astype(object)
        self.red_norm = int(np.abs(self.red).sum(axis=0).max()) if self.phi else 1

    def reduce(self, vec) -> tuple[int, ...]:
        """Reduce a coefficient vector of length <= 2*phi-1."""
        n = len(vec)
        if n <= self.phi:
            out = list(int(c) for c in vec)
            return tuple(out + [0] * (self.phi - n))
        if vec.dtype == object:
            res = vec.dot(self.red_obj[:n])
        else:
            res = vec.dot(self.red[:n])
        return tuple(int(c) for c in res)

    def reduce_exponents(self, terms: dict[int, int]) -> tuple[int, ...]:
        """Reduce sum c_k x^k for arbitrary integer exponents k."""
        out = [0] * self.phi
        for k, c in terms.items():
            if c:
                row = self.rows[k % self.m]
                for i, r in enumerate(row):
                    if r:
                        out[i] += c * r
        return tuple(out)


@lru_cache(maxsize=None)
def conductor_data(m: int) -> _Conductor:
    return _Conductor(m)


def _maxabs(coeffs) -> int:
    return max((abs(c) for c in coeffs), default=0)


def _convolve(a: tuple[int, ...], b: tuple[int, ...], bound_factor: int):
    """Exact product polynomial as numpy array, int64 when provably safe."""
    am, bm = _maxabs(a), _maxabs(b)
    if am * bm * len(a) * bound_factor < _INT64_SAFE:
        return np.convolve(np.array(a, dtype=np.int64), np.array(b, dtype=np.int64))
    return np.convolve(np.array(a, dtype=object), np.array(b, dtype=object))


class CycloInt:
    """Element of Z[zeta_m] with coefficients in the power basis."""

    __slots__ = ("m", "coeffs", "_hash")

    def __init__(self, m: int, coeffs) -> None:
        coeffs = tuple(int(c) for c in coeffs)
        if len(coeffs) != phi(m):
            raise ValueError(f"expected {phi(m)} coefficients for conductor {m}, got {len(coeffs)}")
        self.m = m
        self.coeffs = coeffs
        self._hash = None

    @classmethod
    def _raw(cls, m: int, coeffs: tuple[int, ...]) -> CycloInt:
        obj = cls.__new__(cls)
        obj.m = m
        obj.coeffs = coeffs
        obj._hash = None
        return obj

    @classmethod
    def zero(cls, m: int) -> CycloInt:
        return cls._raw(m, (0,) * phi(m))

    @classmethod
    def from_int(cls, m: int, k: int) -> CycloInt:
        c = [0] * phi(m)
        c[0] = k
        return cls._raw(m, tuple(c))

    @classmethod
    def one(cls, m: int) -> CycloInt:
        return cls.from_int(m, 1)

    @classmethod
    def zeta_power(cls, m: int, k: int) -> CycloInt:
        """zeta_m ** k for any integer k."""
        return cls._raw(m, conductor_data(m).rows[k % m])

    @classmethod
    def from_exponents(cls, m: int, terms: dict[int, int]) -> CycloInt:
        """sum c * zeta_m**k over a {k: c} mapping."""
        return cls._raw(m, conductor_data(m).reduce_exponents(terms))

    def _check(self, other: CycloInt) -> None:
        if self.m != other.m:
            raise ValueError(f"conductor mismatch: {self.m} vs {other.m}")

    def _coerce(self, other):
        if isinstance(other, int):
            return CycloInt.from_int(self.m, other)
        if isinstance(other, CycloInt):
            self._check(other)
            return other
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return CycloInt._raw(self.m, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return CycloInt._raw(self.m, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self) -> CycloInt:
        return CycloInt._raw(self.m, tuple(-a for a in self.coeffs))

    def scale(self, k: int) -> CycloInt:
        return CycloInt._raw(self.m, tuple(k * a for a in self.coeffs))

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        if not isinstance(other, CycloInt):
            return NotImplemented
        self._check(other)
        data = conductor_data(self.m)
        c = self.as_int()
        if c is not None:
            return other.scale(c)
        c = other.as_int()
        if c is not None:
            return self.scale(c)
        prod = _convolve(self.coeffs, other.coeffs, data.red_norm)
        return CycloInt._raw(self.m, data.reduce(prod))

    __rmul__ = __mul__

    def __pow__(self, k: int) -> CycloInt:
        if k < 0:
            raise ValueError("negative power of a cyclotomic integer")
        result = CycloInt.one(self.m)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def as_int(self) -> int | None:
        """The rational integer value, or None if not in Z."""
        c = self.coeffs
        if any(c[1:]):
            return None
        return c[0]

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __bool__(self) -> bool:
        return any(self.coeffs)

    def two_valuation(self) -> int:
        """Largest v with 2**v dividing every coefficient (inf-like for zero)."""
        acc = reduce(or_, self.coeffs, 0)
        if acc == 0:
            return 1 << 30
        return (acc & -acc).bit_length() - 1

    def embed(self, k: int) -> CycloInt:
        """Image under zeta_m -> zeta_{km}**k."""
        if k == 1:
            return self
        terms = {k * j: c for j, c in enumerate(self.coeffs) if c}
        return CycloInt.from_exponents(k * self.m, terms)

    def conj(self) -> CycloInt:
        return CycloInt.from_exponents(self.m, {-j: c for j, c in enumerate(self.coeffs) if c})

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            return self.as_int() == other
        if not isinstance(other, CycloInt):
            return NotImplemented
        if self.m != other.m:
            n = math.lcm(self.m, other.m)
            return self.embed(n // self.m).coeffs == other.embed(n // other.m).coeffs
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.m, self.coeffs))
        return self._hash

    def __complex__(self) -> complex:
        z = cmath.exp(2j * math.pi / self.m)
        return sum(c * z**j for j, c in enumerate(self.coeffs))

    def __repr__(self) -> str:
        return f"CycloInt({self.m}, {list(self.coeffs)})"

    def __str__(self) -> str:
        terms = [f"{c}*z^{j}" if j else str(c) for j, c in enumerate(self.coeffs) if c]
        return " + ".join(terms) if terms else "0"


class CycloNum:
    """num / 2**two_exp with num in Z[zeta_m]; normalized so num is odd when two_exp > 0."""

    __slots__ = ("num", "two_exp", "_hash")

    def __init__(self, num: CycloInt, two_exp: int = 0) -> None:
        if two_exp < 0:
            raise ValueError("two_exp must be non-negative")
        if two_exp:
            v = min(num.two_valuation(), two_exp)
            if v:
                num = CycloInt._raw(num.m, tuple(c >> v for c in num.coeffs))
                two_exp -= v
        self.num = num
        self.two_exp = two_exp
        self._hash = None

    @property
    def m(self) -> int:
        return self.num.m

    @classmethod
    def from_int(cls, m: int, k: int) -> CycloNum:
        return cls(CycloInt.from_int(m, k))

    @classmethod
    def zero(cls, m: int) -> CycloNum:
        return cls(CycloInt.zero(m))

    @classmethod
    def one(cls, m: int) -> CycloNum:
        return cls(CycloInt.one(m))

    @classmethod
    def cos(cls, a: int, n: int, m: int) -> CycloNum:
        """cos(2 pi a / n) in conductor m (n must divide m)."""
        k = a * (m // n)
        return cls(CycloInt.from_exponents(m, _add_terms({k: 1}, {-k: 1})), 1)

    @classmethod
    def sin(cls, a: int, n: int, m: int) -> CycloNum:
        """sin(2 pi a / n) in conductor m (n and 4 must divide m)."""
        if m % 4 or m % n:
            raise ValueError(f"sin(2pi*{a}/{n}) needs a conductor divisible by 4 and {n}; got {m}")
        k = a * (m // n)
        q = m // 4
        # (x^k - x^-k) / 2i  with 1/i = x^(-m/4)
        return cls(CycloInt.from_exponents(m, _add_terms({k - q: 1}, {-k - q: -1})), 1)

    def _coerce(self, other):
        if isinstance(other, int):
            return CycloNum.from_int(self.m, other)
        if isinstance(other, CycloInt):
            return CycloNum(other)
        if isinstance(other, CycloNum):
            return other
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        e1, e2 = self.two_exp, other.two_exp
        if e1 == e2:
            return CycloNum(self.num + other.num, e1)
        if e1 > e2:
            return CycloNum(self.num + other.num.scale(1 << (e1 - e2)), e1)
        return CycloNum(self.num.scale(1 << (e2 - e1)) + other.num, e2)

    __radd__ = __add__

    def __neg__(self) -> CycloNum:
        return CycloNum(-self.num, self.two_exp)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return CycloNum(self.num * other.num, self.two_exp + other.two_exp)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> CycloNum:
        return CycloNum(self.num**k, self.two_exp * k)

    def is_integral(self) -> bool:
        return self.two_exp == 0

    def __bool__(self) -> bool:
        return bool(self.num)

    def embed(self, k: int) -> CycloNum:
        return CycloNum(self.num.embed(k), self.two_exp)

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            return self.two_exp == 0 and self.num == other
        if isinstance(other, CycloInt):
            other = CycloNum(other)
        if not isinstance(other, CycloNum):
            return NotImplemented
        return self.two_exp == other.two_exp and self.num == other.num

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.num, self.two_exp))
        return self._hash

    def __complex__(self) -> complex:
        return complex(self.num) / (1 << self.two_exp)

    def __repr__(self) -> str:
        return f"CycloNum({self.num!r}, {self.two_exp})"

    def __str__(self) -> str:
        if self.two_exp:
            return f"({self.num})/2^{self.two_exp}"
        return str(self.num)


def _add_terms(a: dict[int, int], b: dict[int, int]) -> dict[int, int]:
    out = dict(a)
    for k, c in b.items():
        out[k] = out.get(k, 0) + c
    return out


def split_two_part(m: int) -> tuple[int, int]:
    """Return (s, t) with m = s * 2**t and s odd."""
    if m < 1:
        raise ValueError("m must be positive")
    t = (m & -m).bit_length() - 1
    return m >> t, t


@dataclass(frozen=True)
class ExpDecomp:
    """x**a = y**u * z**v with y = x**s, z = x**(2**t), m = s * 2**t."""

    m: int
    s: int
    t: int
    u: int
    v: int


def decompose_exponent(a: int, m: int) -> ExpDecomp:
    s, t = split_two_part(m)
    two_t = 1 << t
    # s*u + 2^t*v = a (mod m): reduce mod 2^t and mod s separately
    u = (a * pow(s, -1, two_t)) % two_t if two_t > 1 else 0
    v = (a * pow(two_t, -1, s)) % s if s > 1 else 0
    return ExpDecomp(m, s, t, u, v)


# --- polynomials over F_2, encoded as Python ints (bit i = coefficient of X^i)


def gf2_deg(a: int) -> int:
    return a.bit_length() - 1


def gf2_mul(a: int, b: int) -> int:
    if a < b:
        a, b = b, a
    c = 0
    while b:
        if b & 1:
            c ^= a
        a <<= 1
        b >>= 1
    return c


def gf2_mod(a: int, g: int) -> int:
    if g == 0:
        raise ZeroDivisionError("division by zero polynomial")
    dg = gf2_deg(g)
    while a and gf2_deg(a) >= dg:
        a ^= g << (gf2_deg(a) - dg)
    return a


def gf2_from_int_poly(coeffs) -> int:
    out = 0
    for i, c in enumerate(coeffs):
        if c & 1:
            out |= 1 << i
    return out


def gf2_coeffs(a: int) -> list[int]:
    return [(a >> i) & 1 for i in range(max(a.bit_length(), 1))]


def multiplicative_order(base: int, n: int) -> int:
    if n == 1:
        return 1
    k, acc = 1, base % n
    while acc != 1:
        acc = acc * base % n
        k += 1
    return k


class ResidueField:
    """F_2[X]/(g) for the least irreducible factor g of Phi_s mod 2.

    X is a primitive s-th root of unity in this field, which realizes R/I for a
    maximal ideal I of Z[zeta_m] containing 1 + zeta_m**s.
    """

    def __init__(self, s: int) -> None:
        if s < 1 or s % 2 == 0:
            raise ValueError("residue field needs an odd s >= 1")
        self.s = s
        phi_s = gf2_from_int_poly(cyclotomic_poly(s))
        d = multiplicative_order(2, s)
        # every degree-d divisor of Phi_s mod 2 is irreducible (all factors have degree d)
        for g in range(1 << d, 1 << (d + 1)):
            if g & 1 and gf2_mod(phi_s, g) == 0:
                break
        else:  # pragma: no cover - impossible by the factorization theorem
            raise ArithmeticError(f"no degree-{d} factor of Phi_{s} mod 2")
        self.g = g
        self.degree = d
        self.zeta = gf2_mod(0b10, g)

    def reduce(self, a: int) -> int:
        return gf2_mod(a, self.g)

    def mul(self, a: int, b: int) -> int:
        return gf2_mod(gf2_mul(a, b), self.g)

    def pow(self, a: int, k: int) -> int:
        result, base = 1, a
        while k:
            if k & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            k >>= 1
        return result

    def elem(self, bits: int) -> GF2Elem:
        return GF2Elem(self, self.reduce(bits))

    def __repr__(self) -> str:
        return f"ResidueField(s={self.s}, g={gf2_coeffs(self.g)})"


_FIELD_CACHE: dict[int, ResidueField] = {}
_FIELD_LOCK = threading.Lock()


def residue_field(s: int) -> ResidueField:
    """Memoized residue field; concurrent first use builds it once."""
    fld = _FIELD_CACHE.get(s)
    if fld is None:
        with _FIELD_LOCK:
            fld = _FIELD_CACHE.get(s)
            if fld is None:
                fld = ResidueField(s)
                _FIELD_CACHE[s] = fld
    return fld


@dataclass(frozen=True, slots=True)
class GF2Elem:
    field: ResidueField
    bits: int

    def __add__(self, other: GF2Elem) -> GF2Elem:
        return GF2Elem(self.field, self.bits ^ other.bits)

    __sub__ = __add__

    def __neg__(self) -> GF2Elem:
        return self

    def __mul__(self, other: GF2Elem) -> GF2Elem:
        return GF2Elem(self.field, self.field.mul(self.bits, other.bits))

    def __bool__(self) -> bool:
        return self.bits != 0

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            return self.bits == other
        return isinstance(other, GF2Elem) and self.field is other.field and self.bits == other.bits

    def __hash__(self) -> int:
        return hash(self.bits)


def residue_theta(m: int, fld: ResidueField) -> int:
    """Image of x = zeta_m: the power zeta_s**b with b * 2**t = 1 (mod s)."""
    s, t = split_two_part(m)
    if s != fld.s:
        raise ValueError(f"conductor {m} has odd part {s}, field is for s={fld.s}")
    b = pow(1 << t, -1, s) if s > 1 else 0
    return fld.pow(fld.zeta, b)


def residue_map(e: CycloNum | CycloInt, fld: ResidueField) -> GF2Elem:
    """Image of an integral element in R/I; kills 2 and 1 + x**s."""
    if isinstance(e, CycloNum):
        if e.two_exp:
            raise ValueError("residue_map needs an integral element (two_exp > 0); multiply by a larger F factor")
        e = e.num
    theta = residue_theta(e.m, fld)
    acc, power = 0, 1
    for c in e.coeffs:
        if c & 1:
            acc ^= power
        power = fld.mul(power, theta)
    return GF2Elem(fld, acc)
