"""Group specifications, words in generator powers, and exact evaluation."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import lru_cache

from .rot3 import CycloMat, Mat3, LaurentGaussian, Rat5, formal_rot_x, int_rot, pythagorean_rot, rot_axis

FAMILIES = ("gpq", "gm41", "gnu41", "gnufree", "gtrans")


class WordSyntaxError(ValueError):
    """Malformed word text; `offset` is the byte offset of the problem."""

    def __init__(self, message: str, offset: int) -> None:
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class SpecMismatch(ValueError):
    pass


@dataclass(frozen=True)
class GroupSpec:
    family: str
    p: int | None = None
    q: int | None = None
    m: int | None = None

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.family == "gpq" and (self.p is None or self.q is None or self.p < 1 or self.q < 1):
            raise ValueError("Gpq requires p, q >= 1")
        if self.family == "gm41" and (self.m is None or self.m < 1):
            raise ValueError("Gm41 requires m >= 1")

    @property
    def generators(self) -> tuple[str, ...]:
        if self.family == "gpq":
            return ("A", "B")
        if self.family == "gm41":
            return ("S", "T", "U")
        if self.family == "gnu41":
            return ("S", "T")
        if self.family == "gnufree":
            return ("T", "V")
        return ("X", "V")

    def order(self, gen: str) -> int | None:
        """Order of a generator, None if infinite."""
        if self.family == "gpq":
            return self.p if gen == "A" else self.q
        if gen in ("S", "U"):
            return 4
        if self.family == "gm41":
            return self.m
        return None

    @property
    def conductor(self) -> int | None:
        """Default cyclotomic conductor for evaluate(); sines need 4 | N."""
        if self.family == "gpq":
            return math.lcm(4, self.p * self.q)
        if self.family == "gm41":
            return math.lcm(4, self.m)
        return None

    def __str__(self) -> str:
        if self.family == "gpq":
            return f"G({self.p},{self.q})"
        if self.family == "gm41":
            return f"G({self.m},4,1)"
        return {"gnu41": "G(nu,4,1)", "gnufree": "G(nu,1,nu)", "gtrans": "G(omega)"}[self.family]


def Gpq(p: int, q: int) -> GroupSpec:
    return GroupSpec("gpq", p=p, q=q)


def Gm41(m: int) -> GroupSpec:
    return GroupSpec("gm41", m=m)


GNU41 = GroupSpec("gnu41")
GNUFREE = GroupSpec("gnufree")
GTRANS = GroupSpec("gtrans")


def _reduce(syllables) -> tuple[tuple[str, int], ...]:
    out: list[list] = []
    for gen, e in syllables:
        if e == 0:
            continue
        if out and out[-1][0] == gen:
            out[-1][1] += e
            if out[-1][1] == 0:
                out.pop()
        else:
            out.append([gen, e])
    return tuple((g, e) for g, e in out)


@dataclass(frozen=True)
class Word:
    spec: GroupSpec
    syllables: tuple[tuple[str, int], ...] = ()

    def __post_init__(self) -> None:
        gens = self.spec.generators
        for g, _ in self.syllables:
            if g not in gens:
                raise ValueError(f"generator {g!r} not in {self.spec} (alphabet {', '.join(gens)})")
        object.__setattr__(self, "syllables", _reduce(tuple((g, int(e)) for g, e in self.syllables)))

    @classmethod
    def identity(cls, spec: GroupSpec) -> Word:
        return cls(spec, ())

    def __len__(self) -> int:
        return len(self.syllables)

    def __mul__(self, other: Word) -> Word:
        return concat(self, other)

    def inverse(self) -> Word:
        return invert(self)

    def __str__(self) -> str:
        return format_word(self)


_TOKEN = re.compile(r"([A-Za-z])(?:\^([+-]?\d+))?")


def parse_word(text: str, spec: GroupSpec) -> Word:
    """Parse `A^2 B^-1 A` style text; the empty string (or "ε") is the identity."""
    gens = spec.generators
    syllables = []
    pos = 0
    # walk the str, report byte offsets
    while pos < len(text):
        ch = text[pos]
        if ch.isspace():
            pos += 1
            continue
        if ch == "ε":
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        offset = len(text[:pos].encode("utf-8"))
        if not m:
            raise WordSyntaxError(f"unexpected character {ch!r}", offset)
        gen, exp = m.group(1), m.group(2)
        if gen not in gens:
            raise WordSyntaxError(f"unknown generator {gen!r} for {spec}", offset)
        end = m.end()
        if exp is None and end < len(text) and text[end] == "^":
            raise WordSyntaxError("malformed exponent", len(text[:end].encode("utf-8")))
        if end < len(text) and not text[end].isspace():
            raise WordSyntaxError("tokens must be separated by whitespace", len(text[:end].encode("utf-8")))
        syllables.append((gen, int(exp) if exp is not None else 1))
        pos = end
    return Word(spec, tuple(syllables))


def format_word(w: Word) -> str:
    if not w.syllables:
        return "ε"
    return " ".join(f"{g}^{e}" for g, e in w.syllables)


def free_reduce(w: Word) -> Word:
    return Word(w.spec, w.syllables)


def invert(w: Word) -> Word:
    return Word(w.spec, tuple((g, -e) for g, e in reversed(w.syllables)))


def concat(a: Word, b: Word) -> Word:
    if a.spec != b.spec:
        raise SpecMismatch(f"cannot concatenate words over {a.spec} and {b.spec}")
    return Word(a.spec, a.syllables + b.syllables)


# ------------------------------------------------------------------ evaluation


@lru_cache(maxsize=4096)
def _cyclo_generator_power(spec: GroupSpec, gen: str, e: int, N: int) -> CycloMat:
    if spec.family == "gpq":
        return rot_axis("x", e, spec.p, N) if gen == "A" else rot_axis("z", e, spec.q, N)
    if gen == "S":
        return CycloMat.from_int_matrix(N, int_rot("y", e))
    if gen == "U":
        return CycloMat.from_int_matrix(N, int_rot("x", e))
    return rot_axis("x", e, spec.m, N)


def _s_mat(convert, e: int = 1) -> Mat3:
    return Mat3.from_ints(int_rot("y", e), convert)


def _rat5(v: int) -> Rat5:
    return Rat5(v)


def _laurent(v: int) -> LaurentGaussian:
    return LaurentGaussian.const(v)


def generator_matrix(spec: GroupSpec, gen: str, e: int, conductor: int | None = None):
    """Exact matrix of gen**e in the scalar ring of the family."""
    fam = spec.family
    if fam in ("gpq", "gm41"):
        N = conductor or spec.conductor
        need = math.lcm(4, spec.p, spec.q) if fam == "gpq" else spec.conductor
        if N % need:
            raise ValueError(f"conductor {N} is not a multiple of {need}")
        return _cyclo_generator_power(spec, gen, e, N)
    if fam in ("gnu41", "gnufree"):
        if gen == "S":
            return _s_mat(_rat5, e)
        return pythagorean_rot("x" if gen == "T" else "z", e)
    if gen == "X":
        return formal_rot_x(e)
    S = _s_mat(_laurent)
    return S.inverse() @ formal_rot_x(e) @ S


def identity_matrix(spec: GroupSpec, conductor: int | None = None):
    if spec.family in ("gpq", "gm41"):
        return CycloMat.identity(conductor or spec.conductor)
    if spec.family in ("gnu41", "gnufree"):
        return Mat3.identity(_rat5)
    return Mat3.identity(_laurent)


def evaluate(w: Word, conductor: int | None = None):
    """Exact matrix of a word (CycloMat for Gpq/Gm41, Mat3 otherwise)."""
    result = None
    for gen, e in w.syllables:
        g = generator_matrix(w.spec, gen, e, conductor)
        result = g if result is None else result @ g
    return result if result is not None else identity_matrix(w.spec, conductor)


# ------------------------------------------------------------------ rewriting


def rewrite_to_gm41(w: Word, target: str | int = "lcm") -> Word:
    """Spell a G(p,q) word in S, T of G(m,4,1): A -> T^(m/p), B -> S^3 T^(m/q) S.

    target is "lcm" (requires 4 | p and 4 | q), "pq", or an explicit multiple of lcm(p, q).
    """
    spec = w.spec
    if spec.family != "gpq":
        raise ValueError("rewrite_to_gm41 needs a G(p,q) word")
    p, q = spec.p, spec.q
    if target == "lcm":
        if p % 4 or q % 4:
            raise ValueError(f"G(p,q) = G(lcm,4,1) needs 4 | p and 4 | q; got p={p}, q={q}")
        m = math.lcm(p, q)
    elif target == "pq":
        m = p * q
    else:
        m = int(target)
        if m % p or m % q:
            raise ValueError(f"target conductor {m} must be a multiple of p={p} and q={q}")
    out = []
    for gen, e in w.syllables:
        if gen == "A":
            out.append(("T", e * (m // p)))
        else:
            out.extend((("S", 3), ("T", e * (m // q)), ("S", 1)))
    return Word(Gm41(m), tuple(out))


def random_word(spec: GroupSpec, length: int, rng, max_exp: int = 12) -> Word:
    """Seeded random word with `length` syllables (before free reduction)."""
    gens = spec.generators
    if spec.family == "gm41" and spec.m % 4:
        gens = ("S", "T")
    syl = []
    prev = None
    for _ in range(length):
        g = rng.choice([x for x in gens if x != prev] or gens)
        e = 0
        while e == 0:
            e = rng.randint(-max_exp, max_exp)
        syl.append((g, e))
        prev = g
    return Word(spec, tuple(syl))
