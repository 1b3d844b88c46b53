"""Canonical forms and the word problem for G(p,q) and G(m,4,1)."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from functools import lru_cache

from .rot3 import IDENTITY_INT, imat_mul, imat_T, int_rot
from .words import GroupSpec, Gm41, Gpq, SpecMismatch, Word, rewrite_to_gm41

VARIANTS = ("L", "R", "C")
Pairs = tuple[tuple[int, int], ...]


def _centered(a: int, n: int, include_top: bool) -> int:
    """Representative of a mod n in (-n/2, n/2] (include_top) or [-n/2, n/2)."""
    r = a % n
    if 2 * r > n or (2 * r == n and not include_top):
        r -= n
    return r


def _in_open(x: int, lo_num: int, den: int) -> bool:
    """x in (-lo_num/den, lo_num/den)."""
    return -lo_num < den * x < lo_num


def _in_half_open(x: int, lo_num: int, den: int) -> bool:
    """x in (-lo_num/den, lo_num/den]."""
    return -lo_num < den * x <= lo_num


def _check_gpq(spec: GroupSpec) -> None:
    if spec.family != "gpq":
        raise ValueError(f"expected a G(p,q) word, got {spec}")
    if spec.p < 3 or spec.q < 3:
        raise ValueError(f"canonical forms need p, q >= 3; got {spec} (use explore.closure for finite cases)")


def _syllables_to_pairs(syl) -> Pairs:
    if not syl:
        return ()
    syl = list(syl)
    if syl[0][0] == "B":
        syl.insert(0, ("A", 0))
    if syl[-1][0] == "A":
        syl.append(("B", 0))
    return tuple((syl[i][1], syl[i + 1][1]) for i in range(0, len(syl), 2))


def _pairs_to_syllables(pairs: Pairs):
    out = []
    for a, b in pairs:
        out.append(("A", a))
        out.append(("B", b))
    return tuple(out)


def _swap_letters(syl):
    return tuple(("B" if g == "A" else "A", e) for g, e in syl)


# ------------------------------------------------------------------ free products


@dataclass(frozen=True)
class FreeProductForm:
    spec: GroupSpec
    pairs: Pairs

    @property
    def length(self) -> int:
        return max(1, len(self.pairs))

    def is_empty(self) -> bool:
        return not self.pairs

    def to_word(self) -> Word:
        return Word(self.spec, _pairs_to_syllables(self.pairs))

    def is_valid(self) -> bool:
        p, q = self.spec.p, self.spec.q
        n = len(self.pairs)
        for i, (a, b) in enumerate(self.pairs):
            if not (_in_open(a, p, 2) and _in_open(b, q, 2)):
                return False
            if (a == 0 and i > 0) or (b == 0 and i < n - 1):
                return False
        return self.pairs != ((0, 0),)

    def __str__(self) -> str:
        return _format_pairs(self.pairs)


def _format_pairs(pairs: Pairs) -> str:
    if not pairs:
        return "A^0 B^0"
    return " ".join(f"A^{a} B^{b}" for a, b in pairs)


def _cyclic_reduce(syl, orders: dict[str, int]):
    stack: list[list] = []
    for g, e in syl:
        e = _centered(e, orders[g], True)
        if e == 0:
            continue
        if stack and stack[-1][0] == g:
            stack[-1][1] = _centered(stack[-1][1] + e, orders[g], True)
            if stack[-1][1] == 0:
                stack.pop()
        else:
            stack.append([g, e])
    return tuple((g, e) for g, e in stack)


def normalize_free(w: Word) -> FreeProductForm:
    spec = w.spec
    _check_gpq(spec)
    if spec.p % 2 == 0 or spec.q % 2 == 0:
        raise ValueError(f"free-product form needs p and q odd; got {spec}")
    syl = _cyclic_reduce(w.syllables, {"A": spec.p, "B": spec.q})
    return FreeProductForm(spec, _syllables_to_pairs(syl))


# ------------------------------------------------------------------ L/R/C forms


@dataclass(frozen=True)
class LRCForm:
    """Canonical form for p even, q not divisible by 4.

    When `swapped` is set the form lives in G(q,p) of the original word:
    A and B of the form are the original B and A.
    """

    spec: GroupSpec
    variant: str
    pairs: Pairs
    swapped: bool = False

    @property
    def length(self) -> int:
        return max(1, len(self.pairs))

    def is_empty(self) -> bool:
        return not self.pairs

    @property
    def original_spec(self) -> GroupSpec:
        return Gpq(self.spec.q, self.spec.p) if self.swapped else self.spec

    def to_word(self) -> Word:
        """The form as a word over the group the input word lived in."""
        syl = _pairs_to_syllables(self.pairs)
        if self.swapped:
            syl = _swap_letters(syl)
        return Word(self.original_spec, syl)

    def working_word(self) -> Word:
        return Word(self.spec, _pairs_to_syllables(self.pairs))

    def is_valid(self) -> bool:
        return lrc_is_valid(self.spec.p, self.spec.q, self.variant, self.pairs)

    def __str__(self) -> str:
        s = _format_pairs(self.pairs)
        return f"{s}  [roles swapped]" if self.swapped else s


def lrc_is_valid(p: int, q: int, variant: str, pairs: Pairs) -> bool:
    """The interval and nonzero constraints of the L/R/C definitions."""
    if not pairs:
        return True
    n = len(pairs)
    if pairs == ((0, 0),):
        return False
    for i, (a, b) in enumerate(pairs):
        if (a == 0 and i > 0) or (b == 0 and i < n - 1):
            return False
    a_full = lambda a: _in_half_open(a, p, 2)  # noqa: E731
    a_quarter = lambda a: _in_half_open(a, p, 4)  # noqa: E731
    b_full = lambda b: _in_half_open(b, q, 2)  # noqa: E731
    if q % 2:
        b_inner = lambda b: _in_open(b, q, 2)  # noqa: E731
    else:
        b_inner = lambda b: _in_open(b, q, 4)  # noqa: E731
    a_s = [a for a, _ in pairs]
    b_s = [b for _, b in pairs]
    if variant == "L":
        ok = a_full(a_s[0]) and all(a_quarter(a) for a in a_s[1:])
        ok = ok and b_full(b_s[0]) and all(b_inner(b) for b in b_s[1:])
        if q % 2 == 0 and 2 * b_s[0] == q and n > 1:
            ok = False
        return ok
    if variant == "R":
        ok = a_full(a_s[-1]) and all(a_quarter(a) for a in a_s[:-1])
        if 2 * a_s[-1] == p and n > 1:
            ok = False
        return ok and b_full(b_s[-1]) and all(b_inner(b) for b in b_s[:-1])
    if variant == "C":
        ok = a_full(a_s[0]) and all(a_quarter(a) for a in a_s[1:])
        return ok and b_full(b_s[-1]) and all(b_inner(b) for b in b_s[:-1])
    raise ValueError(f"unknown variant {variant!r}")


class _Quarters:
    """Split exponents as r + delta * half with r in the quarter range.

    K = <mu = A^(p/2), gamma = B^(q/2)> is a Klein group (trivial gamma for q odd);
    mu commutes with A and inverts B, gamma commutes with B and inverts A.
    """

    def __init__(self, p: int, q: int) -> None:
        self.p, self.q = p, q
        self.order = {"A": p, "B": q}
        self.has_gamma = q % 2 == 0

    def split(self, g: str, e: int) -> tuple[int, int]:
        """Return (r, delta) with g^e = g^r * (half)^delta."""
        if g == "A":
            r = _centered(e, self.p // 2, True)  # (-p/4, p/4]
            return r, ((e - r) // (self.p // 2)) % 2
        if not self.has_gamma:
            return _centered(e, self.q, True), 0
        r = _centered(e, self.q // 2, True)  # q/2 odd, so r in (-q/4, q/4)
        return r, ((e - r) // (self.q // 2)) % 2

    def flip(self, g: str, e: int, kappa: tuple[int, int]) -> int:
        """Exponent after passing g^e through kappa = (mu, gamma)."""
        mu, gamma = kappa
        if (g == "A" and gamma) or (g == "B" and mu):
            return -e
        return e

    @staticmethod
    def toggle(kappa, g: str, delta: int):
        mu, gamma = kappa
        if g == "A":
            return (mu ^ delta, gamma)
        return (mu, gamma ^ delta)


def _lrc_sweep_left(syl, Q: _Quarters):
    """Right-to-left: g = kappa * suffix, suffix exponents in quarter ranges."""
    kappa = (0, 0)
    suffix: list[list] = []  # stored reversed: suffix[-1] is the head
    for g, e in reversed(syl):
        e = Q.flip(g, e, kappa)
        if suffix and suffix[-1][0] == g:
            e += suffix.pop()[1]
        r, delta = Q.split(g, e)
        kappa = Q.toggle(kappa, g, delta)
        if r != 0:
            suffix.append([g, r])
        elif suffix and suffix[-1][0] == g:  # cannot happen: neighbours alternate
            raise AssertionError("non-alternating suffix")
    return kappa, [tuple(x) for x in reversed(suffix)]


def _lrc_sweep_right(syl, Q: _Quarters):
    """Left-to-right: g = prefix * kappa."""
    kappa = (0, 0)
    prefix: list[list] = []
    for g, e in syl:
        e = Q.flip(g, e, kappa)
        if prefix and prefix[-1][0] == g:
            e += prefix.pop()[1]
        r, delta = Q.split(g, e)
        kappa = Q.toggle(kappa, g, delta)
        if r != 0:
            prefix.append([g, r])
    return kappa, [tuple(x) for x in prefix]


def _reduce_full(g: str, e: int, Q: _Quarters) -> int:
    return _centered(e, Q.order[g], True)


def _normalize_l(syl, Q: _Quarters):
    (mu, gamma), suf = _lrc_sweep_left(syl, Q)
    suf = [list(x) for x in suf]
    p, q = Q.p, Q.q
    if gamma:
        # gamma A^a = A^-a gamma; gamma B^b = B^(b+q/2)
        if suf and suf[0][0] == "A":
            suf[0][1] = -suf[0][1]
            if len(suf) > 1:
                suf[1][1] = _reduce_full("B", suf[1][1] + q // 2, Q)
            else:
                suf.append(["B", q // 2])
        else:
            if suf:
                suf[0][1] = _reduce_full("B", suf[0][1] + q // 2, Q)
            else:
                suf.append(["B", q // 2])
    if mu:
        if suf and suf[0][0] == "A":
            suf[0][1] = _reduce_full("A", suf[0][1] + p // 2, Q)
        else:
            suf.insert(0, ["A", p // 2])
    return tuple(tuple(x) for x in suf)


def _normalize_r(syl, Q: _Quarters):
    (mu, gamma), pre = _lrc_sweep_right(syl, Q)
    pre = [list(x) for x in pre]
    p, q = Q.p, Q.q
    if gamma:
        if pre and pre[-1][0] == "B":
            pre[-1][1] = _reduce_full("B", pre[-1][1] + q // 2, Q)
        else:
            pre.append(["B", q // 2])
    if mu:
        # ... A^a B^b mu = ... A^(a+p/2) B^-b
        if pre and pre[-1][0] == "B":
            pre[-1][1] = _reduce_full("B", -pre[-1][1], Q)
            if len(pre) > 1:
                pre[-2][1] = _reduce_full("A", pre[-2][1] + p // 2, Q)
            else:
                pre.insert(0, ["A", p // 2])
        elif pre:
            pre[-1][1] = _reduce_full("A", pre[-1][1] + p // 2, Q)
        else:
            pre.append(["A", p // 2])
    return tuple(tuple(x) for x in pre)


def _normalize_c(syl, Q: _Quarters):
    (mu, gamma), suf = _lrc_sweep_left(syl, Q)
    suf = [list(x) for x in suf]
    p, q = Q.p, Q.q
    if gamma:
        # kappa * suffix = mu * suffix' * gamma, suffix' has every A inverted
        for x in suf:
            if x[0] == "A":
                x[1] = -x[1]
        # -p/4 leaves the quarter range: A^(-p/4) = A^(p/4) mu; collect mu leftwards
        pending = 0
        for x in reversed(suf):
            if x[0] == "B":
                if pending:
                    x[1] = -x[1]
            elif 4 * x[1] == -p:
                x[1] = p // 4
                pending ^= 1
        mu ^= pending
    if mu:
        if suf and suf[0][0] == "A":
            suf[0][1] = _reduce_full("A", suf[0][1] + p // 2, Q)
        else:
            suf.insert(0, ["A", p // 2])
    if gamma:
        if suf and suf[-1][0] == "B":
            suf[-1][1] = _reduce_full("B", suf[-1][1] + q // 2, Q)
        else:
            suf.append(["B", q // 2])
    return tuple(tuple(x) for x in suf)


_VARIANT_FN = {"L": _normalize_l, "R": _normalize_r, "C": _normalize_c}


def _lrc_roles(spec: GroupSpec) -> bool:
    """True if A and B roles must be swapped to reach p even, q not divisible by 4."""
    p, q = spec.p, spec.q
    if p % 2 == 0 and q % 4:
        return False
    if q % 2 == 0 and p % 4:
        return True
    raise ValueError(f"L/R/C forms need one of p, q even and the other not divisible by 4; got {spec}")


def normalize_lrc(w: Word, variant: str = "L") -> LRCForm:
    spec = w.spec
    _check_gpq(spec)
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of L, R, C; got {variant!r}")
    swapped = _lrc_roles(spec)
    syl = w.syllables
    work = spec
    if swapped:
        syl = _swap_letters(syl)
        work = Gpq(spec.q, spec.p)
    Q = _Quarters(work.p, work.q)
    out = _VARIANT_FN[variant](syl, Q)
    # drop zero-exponent syllables created by absorption, then re-merge
    merged = _cyclic_reduce(out, Q.order)
    if merged != tuple(x for x in out if x[1] != 0):
        raise AssertionError(f"absorption produced a non-reduced word: {out}")
    return LRCForm(work, variant, _syllables_to_pairs(merged), swapped)


def convert_form(f: LRCForm, to: str) -> LRCForm:
    """Re-express an L/R/C form in another variant (same element, same length)."""
    if f.variant == to:
        return f
    return normalize_lrc(f.to_word(), to)


# ------------------------------------------------------------------ G(m,4,1)

_S = int_rot("y", 1)
_U = int_rot("x", 1)
_LINE_X, _LINE_Y, _LINE_Z = 0, 1, 2


def _imat_pow(m, k: int):
    out = IDENTITY_INT
    for _ in range(k % 4):
        out = imat_mul(out, m)
    return out


def _closure(gens) -> tuple:
    seen = {IDENTITY_INT}
    frontier = [IDENTITY_INT]
    while frontier:
        nxt = []
        for h in frontier:
            for g in gens:
                x = imat_mul(h, g)
                if x not in seen:
                    seen.add(x)
                    nxt.append(x)
        frontier = nxt
    return tuple(sorted(seen))


def _m_class(m: int) -> str:
    if m % 2:
        return "odd"
    return "twice_odd" if m % 4 else "div4"


@dataclass(frozen=True)
class HTables:
    """The finite group H, its subgroup H1, coset heads, and shortest spellings."""

    m_class: str
    H: tuple
    H1: tuple
    heads: tuple  # (label, matrix)
    spelling: dict


@lru_cache(maxsize=None)
def h_tables(m: int) -> HTables:
    cls = _m_class(m)
    S2 = _imat_pow(_S, 2)
    U2 = _imat_pow(_U, 2)
    S3 = _imat_pow(_S, 3)
    if cls == "odd":
        gens, gens1 = [_S], [S2]
        letters = [(("S", 1), _S)]
        heads = (("I", IDENTITY_INT), ("S^3", S3))
    elif cls == "twice_odd":
        gens, gens1 = [_S, U2], [S2, U2]
        letters = [(("S", 1), _S), (("T", m // 2), U2)]
        heads = (("I", IDENTITY_INT), ("S^3", S3))
    else:
        gens = [_S, _U]
        gens1 = [S2, imat_mul(imat_mul(_S, _U), S3)]
        letters = [(("S", 1), _S), (("U", 1), _U)]
        heads = (("I", IDENTITY_INT), ("S^3", S3), ("U", _U))
    H = _closure(gens)
    H1 = _closure(gens1)
    # breadth-first shortest spelling over letters and their inverses
    moves = []
    for (g, e), mat in letters:
        moves.append(((g, e), mat))
        if mat != imat_T(mat):
            moves.append(((g, -e), imat_T(mat)))
    spelling = {IDENTITY_INT: ()}
    dq = deque([IDENTITY_INT])
    while dq:
        h = dq.popleft()
        for syl, g in moves:
            x = imat_mul(h, g)
            if x not in spelling:
                spelling[x] = spelling[h] + (syl,)
                dq.append(x)
    return HTables(cls, H, H1, heads, spelling)


@dataclass(frozen=True)
class Gm41Form:
    spec: GroupSpec
    W: str
    exps: tuple[int, ...]
    E: tuple  # integer signed permutation matrix

    @property
    def length(self) -> int:
        return len(self.exps)

    def is_empty(self) -> bool:
        return not self.exps and self.W == "I" and self.E == IDENTITY_INT

    def e_word(self) -> tuple:
        return h_tables(self.spec.m).spelling[self.E]

    def to_word(self) -> Word:
        syl = list(_HEAD_WORDS[self.W])
        for a in self.exps:
            syl += [("S", 1), ("T", a)]
        syl += list(self.e_word())
        # S^3 S = 1 at the head; keep S-powers in 1..3
        out: list[list] = []
        for g, e in syl:
            if out and out[-1][0] == g:
                out[-1][1] += e
            else:
                out.append([g, e])
        return Word(self.spec, tuple((g, e % 4 if g == "S" else e) for g, e in out))

    def is_valid(self) -> bool:
        m = self.spec.m
        tbl = h_tables(m)
        if self.E not in tbl.H or self.W not in dict(tbl.heads):
            return False
        if not self.exps and self.W != "I":
            return False
        for a in self.exps:
            if a == 0:
                return False
            if tbl.m_class == "odd" and not _in_open(a, m, 2):
                return False
            if tbl.m_class != "odd" and not _in_open(a, m, 4):
                return False
        if tbl.m_class == "div4" and self.exps and not 0 < 4 * self.exps[-1] < m:
            return False
        return True

    def __str__(self) -> str:
        head = "" if self.W == "I" else self.W + " "
        body = " ".join(f"S T^{a}" for a in self.exps)
        tail = " ".join(f"{g}^{e}" for g, e in self.e_word()) or "I"
        return f"{head}{body}{' ' if body else ''}[E = {tail}]".strip()


_HEAD_WORDS = {"I": (), "S^3": (("S", 3),), "U": (("U", 1),)}


class _Gm41Builder:
    """State g = W * S T^a_1 ... S T^a_k * h, fed generator powers from the left."""

    def __init__(self, m: int) -> None:
        self.m = m
        self.tbl = h_tables(m)
        self.d = m // math.gcd(m, 4)  # T^a in H iff d | a
        self.W = "I"
        self.exps: list[int] = []
        self.h = IDENTITY_INT

    def t_int(self, a: int):
        return _imat_pow(_U, (4 * a // self.m))

    def push_h(self, x) -> None:
        self.h = imat_mul(self.h, x)

    def push_t(self, a: int) -> None:
        a %= self.m
        if a % self.d == 0:
            self.push_h(self.t_int(a))
            return
        h = self.h
        col = (h[0][0], h[1][0], h[2][0])  # h e_x
        line = next(i for i in range(3) if col[i])
        if not self.exps:
            head = {_LINE_X: "S^3", _LINE_Z: "I", _LINE_Y: "U"}[line]
            c = imat_mul(imat_T(imat_mul(_HEAD_MATS[head], _S)), h)
            self.W = head
            self.exps.append(c[0][0] * a)
            self.h = c
            self.fix_last()
        elif line == _LINE_X:
            self.exps[-1] += h[0][0] * a
            self.fix_last()
        elif line == _LINE_Z:
            c = imat_mul(imat_T(_S), h)
            self.exps.append(c[0][0] * a)
            self.h = c
            self.fix_last()
        else:
            # h = U S c and U = T^(m/4)
            c = imat_mul(imat_T(imat_mul(_U, _S)), h)
            self.h = IDENTITY_INT
            self.exps[-1] += self.m // 4
            self.fix_last()
            self.push_h(_S)
            self.push_t(c[0][0] * a)
            self.push_h(c)

    def fix_last(self) -> None:
        m = self.m
        a = self.exps[-1] % m
        if a % self.d == 0:
            self.exps.pop()
            self.h = imat_mul(imat_mul(_S, self.t_int(a)), self.h)
            if not self.exps:
                self.h = imat_mul(_HEAD_MATS[self.W], self.h)
                self.W = "I"
            return
        if m % 2:
            self.exps[-1] = _centered(a, m, True)
            return
        r = _centered(a, m // 2, True)
        self.exps[-1] = r
        self.h = imat_mul(self.t_int(a - r), self.h)

    def finish(self) -> tuple[str, tuple[int, ...], tuple]:
        if self.tbl.m_class == "div4" and self.exps and self.exps[-1] < 0:
            self.exps[-1] += self.m // 4
            self.h = imat_mul(imat_T(_U), self.h)
        return self.W, tuple(self.exps), self.h


_HEAD_MATS = {"I": IDENTITY_INT, "S^3": _imat_pow(_S, 3), "U": _U}


def normalize_gm41(w: Word) -> Gm41Form:
    spec = w.spec
    if spec.family != "gm41":
        raise ValueError(f"expected a G(m,4,1) word, got {spec}")
    m = spec.m
    b = _Gm41Builder(m)
    for g, e in w.syllables:
        if g == "S":
            b.push_h(_imat_pow(_S, e))
        elif g == "U":
            if m % 4:
                raise ValueError(f"U = R_x^(pi/2) is not in G({m},4,1) unless 4 | m")
            b.push_h(_imat_pow(_U, e))
        else:
            b.push_t(e)
    W, exps, E = b.finish()
    return Gm41Form(spec, W, exps, E)


# ------------------------------------------------------------------ dispatch


def normal_kind(spec: GroupSpec) -> str:
    if spec.family == "gm41":
        return "gm41"
    _check_gpq(spec)
    p, q = spec.p, spec.q
    if p % 2 and q % 2:
        return "free"
    if p % 4 == 0 and q % 4 == 0:
        return "gm41"
    return "lrc"


def normalize(w: Word, variant: str = "L"):
    """Canonical form of w: free-product, L/R/C, or G(m,4,1) form by the parameter case."""
    kind = normal_kind(w.spec)
    if w.spec.family == "gm41":
        return normalize_gm41(w)
    if kind == "free":
        return normalize_free(w)
    if kind == "gm41":
        return normalize_gm41(rewrite_to_gm41(w, "lcm"))
    return normalize_lrc(w, variant)


def is_identity(w: Word) -> bool:
    return normalize(w).is_empty()


def equal(w1: Word, w2: Word) -> bool:
    if w1.spec != w2.spec:
        raise SpecMismatch(f"cannot compare words over {w1.spec} and {w2.spec}")
    if w1.spec.family not in ("gpq", "gm41"):
        raise ValueError(f"no normalizer for {w1.spec}; use certify for this family")
    return is_identity(w1 * w2.inverse())
