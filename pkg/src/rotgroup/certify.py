"""Non-identity certificates: residues modulo a maximal ideal, mod 5, and Laurent leading terms."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import prod

from .cyclo import (
    CycloInt,
    CycloNum,
    ResidueField,
    cyclotomic_poly,
    decompose_exponent,
    gf2_coeffs,
    gf2_from_int_poly,
    gf2_mod,
    multiplicative_order,
    residue_field,
    residue_map,
    split_two_part,
)
from .rot3 import (
    IDENTITY_INT,
    CycloMat,
    LaurentGaussian,
    Mat3,
    formal_rot_x,
    imat_mul,
    int_rot,
    pythagorean_cos_sin,
)
from .words import Word

IDEAL_RESIDUE = "IdealResidue"
MOD_FIVE = "ModFive"
LAURENT_LEADING = "LaurentLeading"
S_POWER = "SPower"
SIGNED_PERMUTATION = "SignedPermutation"

# entries that survive reduction for a factor S^b T^a (0-based (row, col))
FACTOR_PATTERN = frozenset({(0, 1), (0, 2), (1, 1), (1, 2)})


class CertificateError(RuntimeError):
    """A residue pattern predicted by the argument failed to appear."""


def _is_signed_permutation(mat) -> bool:
    rows = [tuple(r) for r in mat]
    if len(rows) != 3 or any(len(r) != 3 for r in rows):
        return False
    for r in rows:
        if sorted(abs(x) for x in r) != [0, 0, 1]:
            return False
    cols = [sorted(abs(rows[i][j]) for i in range(3)) for j in range(3)]
    if any(c != [0, 0, 1] for c in cols):
        return False
    # proper rotation
    (a, b, c), (d, e, f), (g, h, i) = rows
    return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g) == 1


def _s_power(k: int):
    out = IDENTITY_INT
    s = int_rot("y", 1)
    for _ in range(k % 4):
        out = imat_mul(out, s)
    return out


# ------------------------------------------------------------------ G(m,4,1)


@dataclass(frozen=True)
class SandwichWord:
    """W * S^b_1 T^a_1 ... S^b_n T^a_n * E with W, E in G(4,4,1)."""

    W: tuple
    factors: tuple[tuple[int, int], ...]
    E: tuple
    m: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "W", tuple(tuple(int(x) for x in r) for r in self.W))
        object.__setattr__(self, "E", tuple(tuple(int(x) for x in r) for r in self.E))
        object.__setattr__(self, "factors", tuple((int(b), int(a)) for b, a in self.factors))

    def violations(self) -> list[str]:
        out = []
        if not self.factors:
            out.append("factor list is empty (n > 0 required)")
        if self.m < 1:
            out.append(f"conductor must be positive, got {self.m}")
        for i, (b, a) in enumerate(self.factors):
            if b % 2 == 0:
                out.append(f"factor {i}: S exponent {b} is even")
            if (4 * a) % self.m == 0:
                out.append(f"factor {i}: 4*a = {4 * a} is 0 mod {self.m}")
        if not _is_signed_permutation(self.W):
            out.append("W is not in G(4,4,1)")
        if not _is_signed_permutation(self.E):
            out.append("E is not in G(4,4,1)")
        return out

    def promoted(self) -> SandwichWord:
        """Same element over a conductor divisible by 4."""
        if self.m % 4 == 0:
            return self
        return SandwichWord(self.W, tuple((b, 4 * a) for b, a in self.factors), self.E, 4 * self.m)

    def evaluate(self) -> CycloMat:
        N = self.m if self.m % 4 == 0 else 4 * self.m
        out = CycloMat.from_int_matrix(N, self.W)
        for b, a in self.factors:
            out = out @ CycloMat.from_int_matrix(N, _s_power(b)) @ CycloMat.rot("x", a, self.m, N)
        return out @ CycloMat.from_int_matrix(N, self.E)


def sandwich_from_word(w: Word) -> SandwichWord | None:
    """Sandwich shape of a G(m,4,1) or G(p,q) word; None when the element lies in G(4,4,1).

    G(p,q) words are first spelled in G(pq,4,1).
    """
    from .normal import normalize_gm41
    from .words import rewrite_to_gm41

    if w.spec.family == "gpq":
        w = rewrite_to_gm41(w, "pq")
    if w.spec.family != "gm41":
        raise ValueError(f"sandwich shape needs a G(p,q) or G(m,4,1) word, got {w.spec}")
    f = normalize_gm41(w)
    if not f.exps:
        return None
    from .normal import _HEAD_MATS

    return SandwichWord(_HEAD_MATS[f.W], tuple((1, a) for a in f.exps), f.E, w.spec.m)


@dataclass(frozen=True)
class FFactor:
    """Scalar clearing the dyadic denominators of one factor: 2 or (1 + y)^w."""

    kind: str  # "two" or "one_plus_y"
    w: int = 0

    def value(self, m: int) -> CycloNum:
        if self.kind == "two":
            return CycloNum.from_int(m, 2)
        s, _ = split_two_part(m)
        return CycloNum(CycloInt.from_exponents(m, {0: 1, s: 1}) ** self.w)

    def __str__(self) -> str:
        return "2" if self.kind == "two" else f"(1+y)^{self.w}"

    @classmethod
    def parse(cls, text: str) -> FFactor:
        if text == "2":
            return cls("two")
        if text.startswith("(1+y)^"):
            return cls("one_plus_y", int(text[6:]))
        raise ValueError(f"bad F descriptor {text!r}")


def choose_F(a: int, m: int, strict: bool = True) -> FFactor:
    """The factor that makes S^b T^a integral with four entries outside the ideal.

    strict=False skips the 4a != 0 check and returns the raw formula value.
    """
    if m % 4:
        raise ValueError(f"conductor {m} is not divisible by 4; promote to {4 * m} first")
    if strict and (4 * a) % m == 0:
        raise ValueError(f"4*a = {4 * a} is 0 mod {m}: T^a is a quarter-turn power, no certificate applies")
    d = decompose_exponent(a, m)
    if d.s > 1 and d.v % d.s:
        return FFactor("two")
    u = d.u % (1 << d.t)
    if u == 0:
        raise ValueError(f"a = {a} gives u = 0 mod 2^{d.t}; no finite power of (1+y) applies")
    k = (u & -u).bit_length() - 1
    return FFactor("one_plus_y", (1 << (d.t - 1)) - (1 << (k + 1)))


def _residue_matrix(mat: CycloMat, fld: ResidueField) -> tuple:
    if mat.two_exp:
        raise CertificateError("scaled matrix is not integral")
    return tuple(tuple(residue_map(mat.entry(i, j), fld).bits for j in range(3)) for i in range(3))


def _support(res) -> frozenset:
    return frozenset((i, j) for i in range(3) for j in range(3) if res[i][j])


def _gf2_matmul(a, b, fld: ResidueField):
    out = []
    for i in range(3):
        row = []
        for j in range(3):
            acc = 0
            for k in range(3):
                if a[i][k] and b[k][j]:
                    acc ^= fld.mul(a[i][k], b[k][j])
            row.append(acc)
        out.append(tuple(row))
    return tuple(out)


def _gf2_of_int(mat) -> tuple:
    return tuple(tuple(x & 1 for x in r) for r in mat)


@dataclass(frozen=True)
class Certificate:
    kind: str
    verdict: str
    conductor: int | None = None
    data: dict = field(default_factory=dict)

    def to_text(self) -> str:
        lines = ["certificate v1", f"kind {self.kind}", f"verdict {self.verdict}"]
        if self.conductor is not None:
            lines.append(f"conductor {self.conductor}")
        for key, value in self.data.items():
            lines.append(f"{key} {_encode(value)}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> Certificate:
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines or lines[0].strip() != "certificate v1":
            raise ValueError("not a certificate (missing header)")
        kind = verdict = None
        conductor = None
        data: dict = {}
        for ln in lines[1:]:
            key, _, value = ln.partition(" ")
            if key == "kind":
                kind = value
            elif key == "verdict":
                verdict = value
            elif key == "conductor":
                conductor = int(value)
            else:
                data[key] = _decode(key, value)
        if kind is None or verdict is None:
            raise ValueError("certificate lacks kind or verdict")
        return cls(kind, verdict, conductor, data)


def _encode(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, int):
        return str(value)
    if value and isinstance(value[0], (tuple, list)):
        return " ; ".join(" ".join(str(x) for x in r) for r in value)
    return " ".join(str(x) for x in value)


_MATRIX_KEYS = {"W", "E", "residue", "mod5", "factors", "element"}


def _decode(key: str, value: str):
    if key in ("F",):
        return tuple(value.split())
    if key in ("leading",):
        return value
    if key in _MATRIX_KEYS:
        if not value.strip():
            return ()
        return tuple(tuple(int(x) for x in r.split()) for r in value.split(";"))
    parts = value.split()
    if len(parts) == 1:
        return int(parts[0])
    return tuple(int(x) for x in parts)


def certify_nonidentity(sw: SandwichWord) -> Certificate:
    bad = sw.violations()
    if bad:
        raise ValueError("sandwich word precondition violated: " + "; ".join(bad))
    pw = sw.promoted()
    M = pw.m
    s, t = split_two_part(M)
    fld = residue_field(s)
    Fs = [choose_F(a, M) for _, a in pw.factors]
    if any(F.kind == "one_plus_y" and F.w <= 0 for F in Fs):  # pragma: no cover - excluded by 4a != 0
        raise CertificateError("non-positive two-adic exponent")

    W = CycloMat.from_int_matrix(M, pw.W)
    E = CycloMat.from_int_matrix(M, pw.E)
    full = W
    predicted = _gf2_of_int(pw.W)
    for (b, a), F in zip(pw.factors, Fs):
        fac = (CycloMat.from_int_matrix(M, _s_power(b)) @ CycloMat.rot("x", a, M, M)).scale(F.value(M))
        res = _residue_matrix(fac, fld)
        if _support(res) != FACTOR_PATTERN:
            raise CertificateError(f"factor S^{b} T^{a} reduces to support {sorted(_support(res))}")
        predicted = _gf2_matmul(predicted, res, fld)
        full = full @ fac
    full = full @ E
    predicted = _gf2_matmul(predicted, _gf2_of_int(pw.E), fld)
    residue = _residue_matrix(full, fld)
    if residue != predicted:
        raise CertificateError("residue of the product disagrees with the product of residues")
    if len(_support(residue)) != 4:
        raise CertificateError(f"product has {len(_support(residue))} surviving entries, expected 4")
    F_total = prod((F.value(M) for F in Fs), start=CycloNum.one(M))
    if residue_map(F_total, fld):
        raise CertificateError("F is not in the ideal")
    data = {
        "W": pw.W,
        "factors": pw.factors,
        "E": pw.E,
        "field_g": tuple(gf2_coeffs(fld.g)),
        "F": tuple(str(F) for F in Fs),
        "residue": residue,
    }
    return Certificate(IDEAL_RESIDUE, "nonidentity", M, data)


def _field_from_g(s: int, g_coeffs) -> ResidueField:
    """Rebuild and check the residue field named in a certificate."""
    g = gf2_from_int_poly(g_coeffs)
    fld = ResidueField.__new__(ResidueField)
    fld.s, fld.g = s, g
    fld.degree = len(g_coeffs) - 1
    fld.zeta = gf2_mod(0b10, g)
    if fld.degree != multiplicative_order(2, s) or gf2_mod(gf2_from_int_poly(cyclotomic_poly(s)), g):
        raise CertificateError("certificate field polynomial is not a factor of Phi_s mod 2")
    return fld


def _verify_ideal(cert: Certificate) -> bool:
    d = cert.data
    M = cert.conductor
    s, _ = split_two_part(M)
    fld = _field_from_g(s, d["field_g"])
    Fs = [FFactor.parse(x) for x in d["F"]]
    factors = d["factors"]
    if len(Fs) != len(factors) or not factors:
        return False
    # generic entrywise route, independent of the packed product
    one = CycloNum.one(M)
    conv = lambda k: CycloNum.from_int(M, k)  # noqa: E731
    full = Mat3.from_ints(d["W"], conv)
    for (b, a), F in zip(factors, Fs):
        if b % 2 == 0 or (4 * a) % M == 0:
            return False
        c, sn = CycloNum.cos(a, M, M), CycloNum.sin(a, M, M)
        Tm = Mat3(((one, one - one, one - one), (one - one, c, sn), (one - one, -sn, c)))
        fac = (Mat3.from_ints(_s_power(b), conv) @ Tm).scale(F.value(M))
        if any(x.two_exp for x in fac.e):
            return False
        full = full @ fac
    full = full @ Mat3.from_ints(d["E"], conv)
    if any(x.two_exp for x in full.e):
        return False
    res = tuple(tuple(residue_map(full[i, j], fld).bits for j in range(3)) for i in range(3))
    F_total = prod((F.value(M) for F in Fs), start=one)
    return res == tuple(d["residue"]) and len(_support(res)) == 4 and not residue_map(F_total, fld)


def verify_certificate(cert: Certificate) -> bool:
    """Re-derive a certificate's payload by an independent arithmetic route.

    Malformed or inconsistent payloads give False.
    """
    try:
        return _verify(cert)
    except (CertificateError, ValueError, KeyError, TypeError, IndexError):
        return False


def _verify(cert: Certificate) -> bool:
    if cert.kind == SIGNED_PERMUTATION:
        el = tuple(tuple(r) for r in cert.data.get("element", ()))
        return _is_signed_permutation(el) and (el == IDENTITY_INT) == (cert.verdict == "identity")
    if cert.verdict != "nonidentity":
        return cert.kind == S_POWER and cert.data.get("s_power", 0) % 4 == 0
    if cert.kind == IDEAL_RESIDUE:
        return _verify_ideal(cert)
    if cert.kind == MOD_FIVE:
        return _verify_mod5(cert)
    if cert.kind == LAURENT_LEADING:
        return _verify_laurent(cert)
    if cert.kind == S_POWER:
        return cert.data.get("s_power", 0) % 4 != 0
    return False


# ------------------------------------------------------------------ S/X sandwich


def _to_s_x_tokens(w: Word):
    """Spell a word in S and one infinite-order x-rotation (T or X); V = S^3 x S."""
    fam = w.spec.family
    if fam not in ("gnu41", "gnufree", "gtrans"):
        raise ValueError(f"expected a pinwheel or transcendental word, got {w.spec}")
    out = []
    for g, e in w.syllables:
        if g == "S":
            out.append(("S", e))
        elif g == "V":
            out.extend((("S", 3), ("X", e), ("S", 1)))
        else:
            out.append(("X", e))
    return out


def s_x_sandwich(w: Word) -> tuple[int, tuple[int, ...], int]:
    """(a, (c_1..c_n), b) with w = S^a * S X^c_1 * ... * S X^c_n * S^b and every c_j != 0.

    Uses S^2 X^c = X^-c S^2 to make every interior S-power equal to 1.
    """
    head = 0
    cs: list[int] = []
    pending = 0
    for g, e in _to_s_x_tokens(w):
        if g == "S":
            pending = (pending + e) % 4
            continue
        if e == 0:
            continue
        if not cs:
            head = (pending - 1) % 4
            cs.append(e)
            pending = 0
        elif pending % 2 == 1:
            if pending == 1:
                cs.append(e)
                pending = 0
            else:  # S^3 X^e = S X^-e S^2
                cs.append(-e)
                pending = 2
        else:
            cs[-1] += e if pending == 0 else -e
            if cs[-1] == 0:
                cs.pop()
                pending = (pending + 1) % 4  # S X^0 = S
                if not cs:
                    pending = (pending + head) % 4
                    head = 0
    if not cs:
        return 0, (), pending
    return head, tuple(cs), pending


def _imat_mod(mat, n):
    return tuple(tuple(x % n for x in r) for r in mat)


def _imul_mod(a, b, n):
    return tuple(tuple(sum(a[i][k] * b[k][j] for k in range(3)) % n for j in range(3)) for i in range(3))


def _imul(a, b):
    return tuple(tuple(sum(a[i][k] * b[k][j] for k in range(3)) for j in range(3)) for i in range(3))


def _scaled_st(c: int):
    """5^|c| * S T^c as an integer matrix."""
    cos, sin = pythagorean_cos_sin(c)
    f = abs(c)
    ci, si = cos.num * 5 ** (f - cos.exp), sin.num * 5 ** (f - sin.exp)
    T = ((5**f, 0, 0), (0, ci, si), (0, -si, ci))
    return _imul(_s_power(1), T)


def certify_pinwheel(w: Word) -> Certificate:
    """Mod-5 non-identity certificate for words in S, T (cos = 3/5) or T, V = S^-1 T S."""
    if w.spec.family not in ("gnu41", "gnufree"):
        raise ValueError(f"pinwheel certificates need a G(nu,4,1) or G(nu,1,nu) word, got {w.spec}")
    a, cs, b = s_x_sandwich(w)
    if not cs:
        return _s_power_report(a + b)
    acc = _imat_mod(_s_power(a), 5)
    for c in cs:
        fac = _imat_mod(_scaled_st(c), 5)
        if _support(fac) != FACTOR_PATTERN:
            raise CertificateError(f"factor S T^{c} reduces mod 5 to support {sorted(_support(fac))}")
        acc = _imul_mod(acc, fac, 5)
    acc = _imul_mod(acc, _imat_mod(_s_power(b), 5), 5)
    if len(_support(acc)) != 4:
        raise CertificateError(f"mod-5 product has {len(_support(acc))} nonzero entries, expected 4")
    data = {"s_head": a, "exponents": cs, "s_tail": b, "mod5": acc}
    return Certificate(MOD_FIVE, "nonidentity", 5, data)


def _as_tuple(x) -> tuple:
    return x if isinstance(x, tuple) else (x,)


def _verify_mod5(cert: Certificate) -> bool:
    d = cert.data
    cs = _as_tuple(d["exponents"])
    if not cs or any(c == 0 for c in cs):
        return False
    # exact integer product, reduced once at the end
    full = _s_power(d["s_head"])
    for c in cs:
        full = _imul(full, _scaled_st(c))
    full = _imul(full, _s_power(d["s_tail"]))
    res = _imat_mod(full, 5)
    return res == tuple(d["mod5"]) and len(_support(res)) == 4


def _s_power_report(k: int) -> Certificate:
    k %= 4
    return Certificate(S_POWER, "identity" if k == 0 else "nonidentity", None, {"s_power": k})


def _laurent_core(cs):
    S = Mat3.from_ints(_s_power(1), LaurentGaussian.const)
    acc = None
    for c in cs:
        fac = S @ formal_rot_x(c)
        acc = fac if acc is None else acc @ fac
    return acc


def expected_leading(cs) -> tuple[int, Fraction]:
    """Leading term of prod_j (x^c_j + x^-c_j) / 2: degree sum |c_j|, coefficient 2^-n."""
    return sum(abs(c) for c in cs), Fraction(1, 2 ** len(cs))


def certify_transcendental(w: Word) -> Certificate:
    """Leading-term certificate for words in X = R_x^omega and V = S^-1 X S."""
    if w.spec.family != "gtrans":
        raise ValueError(f"transcendental certificates need a G(omega) word, got {w.spec}")
    a, cs, b = s_x_sandwich(w)
    if not cs:
        return _s_power_report(a + b)
    core = _laurent_core(cs)
    lead = core[1, 1].leading()
    deg, coef = expected_leading(cs)
    if lead is None or lead[0] != deg or lead[1] != (coef, Fraction(0)):
        raise CertificateError(f"(2,2) leading term {lead} differs from x^{deg} * {coef}")
    data = {"s_head": a, "exponents": cs, "s_tail": b, "leading": f"{deg} {coef}"}
    return Certificate(LAURENT_LEADING, "nonidentity", None, data)


def _verify_laurent(cert: Certificate) -> bool:
    d = cert.data
    cs = _as_tuple(d["exponents"])
    if not cs or any(c == 0 for c in cs):
        return False
    deg_s, coef_s = d["leading"].split()
    deg, coef = expected_leading(cs)
    if int(deg_s) != deg or Fraction(coef_s) != coef:
        return False
    lead = _laurent_core(cs)[1, 1].leading()
    return lead == (deg, (coef, Fraction(0))) and deg > 0


# ------------------------------------------------------------------ two-adic sharpness arithmetic


def one_plus_y_times_cos(u: int, t: int, w: int) -> CycloInt:
    """(1 + y)^w (y^u + y^-u) in Z[y], y a primitive 2^t-th root of unity."""
    n = 1 << t
    base = CycloInt.from_exponents(n, {0: 1, 1: 1}) ** w
    return base * CycloInt.from_exponents(n, {u % n: 1, (-u) % n: 1} if (2 * u) % n else {u % n: 2})


def divisible_by_two(x: CycloInt) -> bool:
    return all(c % 2 == 0 for c in x.coeffs)


def lemma3_sharp(u: int, t: int) -> bool:
    """Divisible by 2 at the critical w, not at w - 1."""
    k = (u & -u).bit_length() - 1
    w = (1 << (t - 1)) - (1 << (k + 1))
    return divisible_by_two(one_plus_y_times_cos(u, t, w)) and not divisible_by_two(one_plus_y_times_cos(u, t, w - 1))


def binomial_facts_hold(c: int, t: int) -> bool:
    """The three mod-2 facts for (1 + y)^c with c a power of 2 in Z[y], y^(2^(t-1)) = -1."""
    n = 1 << t
    half = n // 2
    one_plus_y = CycloInt.from_exponents(n, {0: 1, 1: 1})
    mod2 = lambda x: tuple(v % 2 for v in x.coeffs)  # noqa: E731
    ok = mod2(one_plus_y**c) == mod2(CycloInt.from_exponents(n, {0: 1, c % n: 1}))
    ok = ok and divisible_by_two(one_plus_y**half)
    for sign in (1, -1):
        f = CycloInt.from_exponents(n, {0: 1, c % n: sign}) if c % n else CycloInt.from_int(n, 1 + sign)
        if half - c >= 0:
            ok = ok and divisible_by_two(f * one_plus_y ** (half - c))
        if half - c - 1 >= 0:
            ok = ok and not divisible_by_two(f * one_plus_y ** (half - c - 1))
    return ok


def certify_word(w: Word) -> Certificate:
    """Certificate for any supported word, dispatching on its family.

    G(p,q) and G(m,4,1) words whose normal form has no T factors lie in the
    finite group G(4,4,1); they get a SignedPermutation record of the element.
    """
    from .normal import _HEAD_MATS, normalize_gm41
    from .words import rewrite_to_gm41

    fam = w.spec.family
    if fam in ("gpq", "gm41"):
        sw = sandwich_from_word(w)
        if sw is not None:
            return certify_nonidentity(sw)
        f = normalize_gm41(rewrite_to_gm41(w, "pq") if fam == "gpq" else w)
        el = imat_mul(_HEAD_MATS[f.W], f.E)
        verdict = "identity" if el == IDENTITY_INT else "nonidentity"
        return Certificate(SIGNED_PERMUTATION, verdict, None, {"element": el})
    if fam in ("gnu41", "gnufree"):
        return certify_pinwheel(w)
    return certify_transcendental(w)
