"""Enumeration: balls of canonical forms, finite closures, free-product checks, substitution orbits."""

from __future__ import annotations

import itertools
import json
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources

from .normal import (
    FreeProductForm,
    Gm41Form,
    LRCForm,
    h_tables,
    lrc_is_valid,
    normal_kind,
    normalize,
)
from .words import GroupSpec, Gm41, Gpq, Word, evaluate, generator_matrix, identity_matrix, parse_word

DEFAULT_MAX_RADIUS = 6


class GuardRailError(ValueError):
    pass


# ------------------------------------------------------------------ counting


def count_formula(p: int, q: int, n: int) -> int:
    """Number of canonical forms with exactly n syllable pairs (n >= 1, p even, q not divisible by 4)."""
    if p < 3 or q < 3 or p % 2 or q % 4 == 0:
        raise ValueError(f"counting formula needs p >= 4 even and q >= 3 not divisible by 4; got ({p},{q})")
    if n < 1:
        raise ValueError("n must be at least 1")
    qf = q - 1 if q % 2 else q // 2 - 1
    return p * q * (p // 2 - 1) ** (n - 1) * qf ** (n - 1)


def free_count(p: int, q: int, n: int) -> int:
    """Number of reduced free-product forms (2.12) with exactly n pairs."""
    return p * q * (p - 1) ** (n - 1) * (q - 1) ** (n - 1)


# ------------------------------------------------------------------ balls


def _sym_range(lo_excl_num: int, den: int, hi_incl: bool):
    """Integers x with -lo/den < x < lo/den (or <= when hi_incl)."""
    top = lo_excl_num // den
    out = [x for x in range(-top - 1, top + 2) if -lo_excl_num < den * x and (den * x <= lo_excl_num if hi_incl else den * x < lo_excl_num)]
    return out


def _lrc_forms(p: int, q: int, variant: str, n: int):
    """Forms with exactly n pairs: interval products filtered by the variant's constraints."""
    a_full = _sym_range(p, 2, True)
    b_full = _sym_range(q, 2, True)
    for a_s in itertools.product(a_full, repeat=n):
        if any(4 * abs(a) > p for a in (a_s[1:] if variant != "R" else a_s[:-1])):
            continue
        for b_s in itertools.product(b_full, repeat=n):
            pairs = tuple(zip(a_s, b_s))
            if lrc_is_valid(p, q, variant, pairs):
                yield pairs


def _free_forms(p: int, q: int, n: int):
    a_all = _sym_range(p, 2, False)
    b_all = _sym_range(q, 2, False)
    a_nz = [x for x in a_all if x]
    b_nz = [x for x in b_all if x]
    a_cs = [a_all] + [a_nz] * (n - 1)
    b_cs = [b_nz] * (n - 1) + [b_all]
    for a_s in itertools.product(*a_cs):
        for b_s in itertools.product(*b_cs):
            yield tuple(zip(a_s, b_s))


def _gm41_forms(m: int, n: int):
    tbl = h_tables(m)
    if tbl.m_class == "odd":
        inner = [a for a in range(-(m // 2), m // 2 + 1) if a and 2 * abs(a) < m]
    else:
        inner = [a for a in range(-(m // 4), m // 4 + 1) if a and 4 * abs(a) < m]
    last = [a for a in inner if a > 0] if tbl.m_class == "div4" else inner
    heads = [label for label, _ in tbl.heads] if n else ["I"]
    choices = [inner] * max(n - 1, 0) + ([last] if n else [])
    for W in heads:
        for exps in itertools.product(*choices):
            for E in tbl.H:
                yield W, tuple(exps), E


@dataclass
class Ball:
    spec: GroupSpec
    radius: int
    variant: str
    forms: list
    counts_by_length: dict[int, int] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.forms)

    def matrices(self, conductor: int | None = None):
        return [evaluate(f.to_word(), conductor) for f in self.forms]


def ball(spec: GroupSpec, n: int, variant: str = "R", override: bool = False) -> Ball:
    """All canonical forms with at most n syllable pairs (identity counts as length 1)."""
    if n < 0:
        raise ValueError("radius must be non-negative")
    if n > DEFAULT_MAX_RADIUS and not override:
        raise GuardRailError(f"radius {n} exceeds the desk-scale guard rail {DEFAULT_MAX_RADIUS}; pass override")
    kind = normal_kind(spec)
    forms: list = []
    counts: dict[int, int] = {}
    if spec.family == "gm41":
        for k in range(0, n + 1):
            batch = [Gm41Form(spec, W, exps, E) for W, exps, E in _gm41_forms(spec.m, k)]
            counts[k] = len(batch)
            forms += batch
        return Ball(spec, n, "gm41", forms, counts)
    if kind == "gm41":
        raise ValueError(f"{spec} has 4 | p and 4 | q; enumerate G(lcm,4,1) forms via ball(Gm41(lcm), n)")
    if n == 0:
        empty = FreeProductForm(spec, ()) if kind == "free" else LRCForm(spec, variant, ())
        return Ball(spec, 0, variant, [empty], {0: 1})
    if kind == "free":
        for k in range(1, n + 1):
            batch = [FreeProductForm(spec, pr if pr != ((0, 0),) else ()) for pr in _free_forms(spec.p, spec.q, k)]
            counts[k] = len(batch)
            forms += batch
        return Ball(spec, n, "free", forms, counts)
    p, q = spec.p, spec.q
    swapped = not (p % 2 == 0 and q % 4)
    work = Gpq(q, p) if swapped else spec
    for k in range(1, n + 1):
        batch = []
        if k == 1:
            batch.append(LRCForm(work, variant, (), swapped))
        batch += [LRCForm(work, variant, pr, swapped) for pr in _lrc_forms(work.p, work.q, variant, k)]
        counts[k] = len(batch)
        forms += batch
    return Ball(spec, n, variant, forms, counts)


# ------------------------------------------------------------------ closure


@dataclass
class ClosureResult:
    order: int | None
    exceeded: bool
    elements: list

    def __str__(self) -> str:
        return f"order={self.order}" if not self.exceeded else f"exceeds cap ({len(self.elements)} found)"


def closure(generators: list[Word], cap: int = 10000) -> ClosureResult:
    """Breadth-first product closure with exact matrix equality."""
    if not generators:
        raise ValueError("closure needs at least one generator")
    spec = generators[0].spec
    conductor = None
    if spec.family == "gpq":
        conductor = math.lcm(4, spec.p * spec.q)
    mats = [evaluate(g, conductor) for g in generators]
    ident = identity_matrix(spec, conductor)
    seen = {ident}
    order = [ident]
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for g in mats:
                y = x @ g
                if y not in seen:
                    seen.add(y)
                    order.append(y)
                    nxt.append(y)
                    if len(seen) > cap:
                        return ClosureResult(None, True, order)
        frontier = nxt
    return ClosureResult(len(seen), False, order)


# ------------------------------------------------------------------ free-product check


@dataclass
class FreeProductReport:
    p: int
    q: int
    n: int
    words_checked: int
    collision: tuple[str, str] | None

    @property
    def free(self) -> bool:
        return self.collision is None

    def relation(self) -> str | None:
        if self.collision is None:
            return None
        spec = Gpq(self.p, self.q)
        w1, w2 = (parse_word(x, spec) for x in self.collision)
        return str(w1 * w2.inverse())

    def __str__(self) -> str:
        if self.free:
            return f"G({self.p},{self.q}) n={self.n}: no collisions among {self.words_checked} words"
        return f"G({self.p},{self.q}) n={self.n}: collision {self.collision[0]} = {self.collision[1]}"


def _restricted_ranges(p: int, q: int):
    a = _sym_range(p, 2, True)
    b = _sym_range(q, 2, True)
    return a, b


def _pairs_word(spec, pairs) -> Word:
    syl = []
    for a, b in pairs:
        syl += [("A", a), ("B", b)]
    return Word(spec, tuple(syl))


def _keys_for(args):
    """Matrix keys for a chunk of pair lists (worker for --jobs)."""
    p, q, chunk = args
    spec = Gpq(p, q)
    N = math.lcm(4, p, q)
    return [evaluate(_pairs_word(spec, pairs), N)._key() for pairs in chunk]


def verify_free_product(p: int, q: int, n: int, jobs: int = 1) -> FreeProductReport:
    """Evaluate all restricted words with at most n pairs and look for two with the same matrix.

    Words are visited by number of pairs, then lexicographically, so the first
    collision reported is one of least length.
    """
    if p < 3 or q < 3:
        raise ValueError("verify_free_product needs p, q >= 3")
    spec = Gpq(p, q)
    N = math.lcm(4, p, q)
    a_rng, b_rng = _restricted_ranges(p, q)
    a_nz = [a for a in a_rng if a]
    Amat = {a: generator_matrix(spec, "A", a, N) for a in a_rng}
    Bmat = {b: generator_matrix(spec, "B", b, N) for b in b_rng}
    seen: dict = {}
    checked = 0
    # frontier: (pairs, matrix) for words whose last B-exponent is nonzero
    frontier = [((), identity_matrix(spec, N))]
    for depth in range(1, n + 1):
        firsts = a_rng if depth == 1 else a_nz
        level = []
        for pairs, mat in frontier:
            for a in firsts:
                ma = mat @ Amat[a] if jobs <= 1 else None
                for b in b_rng:
                    level.append((pairs + ((a, b),), None if ma is None else ma @ Bmat[b]))
        if jobs > 1:
            chunks = [[pr for pr, _ in level[i::jobs]] for i in range(jobs)]
            with ProcessPoolExecutor(max_workers=jobs) as ex:
                parts = list(ex.map(_keys_for, [(p, q, c) for c in chunks]))
            keys = [None] * len(level)
            for i, part in enumerate(parts):
                keys[i::jobs] = part
        else:
            keys = [m._key() for _, m in level]
        nxt = []
        for (pairs, mat), key in zip(level, keys):
            checked += 1
            prev = seen.get(key)
            if prev is not None:
                return FreeProductReport(p, q, n, checked, (str(_pairs_word(spec, prev)), str(_pairs_word(spec, pairs))))
            seen[key] = pairs
            if pairs[-1][1] != 0 and depth < n:
                nxt.append((pairs, mat if mat is not None else evaluate(_pairs_word(spec, pairs), N)))
        frontier = nxt
    return FreeProductReport(p, q, n, checked, None)


# ------------------------------------------------------------------ substitution orbits


@dataclass
class SubstitutionTable:
    spec: GroupSpec
    rules: dict[str, list[tuple[str, Word]]]
    seed: str
    notes: list[str] = field(default_factory=list)

    @property
    def labels(self) -> list[str]:
        return sorted(self.rules)

    def words(self) -> list[Word]:
        return [w for kids in self.rules.values() for _, w in kids]


def _spec_from_header(parts: list[str]) -> GroupSpec:
    fam = parts[0].lower()
    if fam == "gpq":
        return Gpq(int(parts[1]), int(parts[2]))
    if fam == "gm41":
        return Gm41(int(parts[1]))
    return GroupSpec(fam)


def parse_table(text: str) -> SubstitutionTable:
    """Plain-text table: `group <family> [params]`, optional `seed <label>`, then `parent child word` lines."""
    spec = None
    seed = None
    rules: dict[str, list] = {}
    notes = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if raw.strip().startswith("#"):
            notes.append(raw.strip()[1:].strip())
        if not line:
            continue
        parts = line.split()
        if parts[0] == "group":
            spec = _spec_from_header(parts[1:])
            continue
        if parts[0] == "seed":
            seed = parts[1]
            continue
        if spec is None:
            raise ValueError(f"line {lineno}: child rule before the group header")
        if len(parts) < 2:
            raise ValueError(f"line {lineno}: expected `parent child word`")
        parent, child = parts[0], parts[1]
        word = parse_word(" ".join(parts[2:]), spec)
        rules.setdefault(parent, []).append((child, word))
        rules.setdefault(child, rules.get(child, []))
    if spec is None:
        raise ValueError("table has no group header")
    if seed is None:
        seed = next(iter(rules))
    if seed not in rules:
        raise ValueError(f"seed label {seed!r} has no rules")
    missing = sorted(label for label, kids in rules.items() if not kids)
    if missing:
        raise ValueError(f"labels without child rules: {', '.join(missing)}")
    return SubstitutionTable(spec, rules, seed, notes)


def load_table(name: str) -> SubstitutionTable:
    """One of the shipped illustrative tables: 'dite_kart' (G(10,4)) or 'wedge' (G(nu,4,1))."""
    text = resources.files("rotgroup").joinpath("data", f"{name}.txt").read_text()
    return parse_table(text)


@dataclass
class OrbitReport:
    spec: GroupSpec
    depth: int
    distinct_counts: list[int]
    tile_counts: list[int]
    orientations: Counter
    subgroup: str
    canonical_kinds: set = field(default_factory=set)
    representatives: dict = field(default_factory=dict)  # orientation key -> a word

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def to_dict(self) -> dict:
        return {
            "group": str(self.spec),
            "depth": self.depth,
            "distinct_counts": self.distinct_counts,
            "tile_counts": self.tile_counts,
            "orientations": [{"form": k, "multiplicity": v} for k, v in sorted(self.orientations.items())],
            "subgroup": self.subgroup,
        }


def _orientation_key(spec: GroupSpec, word: Word):
    if spec.family in ("gpq", "gm41"):
        try:
            f = normalize(word)
            return str(f), type(f).__name__
        except ValueError:
            pass
    return str(evaluate(word)), "matrix"


def substitution_orbit(table: SubstitutionTable, depth: int, cap: int = 2000) -> OrbitReport:
    """Deflate from the seed tile `depth` times, tracking each tile's orientation word."""
    if depth < 1:
        raise ValueError("depth must be at least 1")
    spec = table.spec
    level: Counter = Counter({(table.seed, Word.identity(spec)): 1})
    reps: dict = {}
    distinct, tiles = [], []
    kinds: set = set()
    orientations: Counter = Counter()
    for _ in range(depth):
        nxt: Counter = Counter()
        for (label, w), mult in level.items():
            for child, cw in table.rules[label]:
                nxt[(child, w * cw)] += mult
        # merge tiles whose orientation words define the same element
        level = Counter()
        orientations = Counter()
        representatives = {}
        for (label, w), mult in nxt.items():
            key, kind = reps.get(w) or _orientation_key(spec, w)
            reps[w] = (key, kind)
            kinds.add(kind)
            canon = _canon_word(spec, w, key)
            level[(label, canon)] += mult
            orientations[key] += mult
            representatives.setdefault(key, canon)
        distinct.append(len(orientations))
        tiles.append(sum(level.values()))
    gens = [w for w in table.words() if w.syllables] or [Word.identity(spec)]
    sub = closure(gens, cap)
    return OrbitReport(spec, depth, distinct, tiles, orientations, str(sub), kinds, representatives)


def _canon_word(spec: GroupSpec, w: Word, key) -> Word:
    if spec.family in ("gpq", "gm41"):
        try:
            return normalize(w).to_word()
        except ValueError:
            return w
    return w
