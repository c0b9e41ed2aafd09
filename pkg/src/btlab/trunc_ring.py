"""Truncated rings of integers O/m^r with canonical Teichmuller digit codes.

Every element of O/m^r is written uniquely as sum_{i<r} tau(a_i) pi^i with
a_i in the residue field and tau the multiplicative (Teichmuller) lift.  The
integer code of an element is sum a_i q^(r-1-i), so integer order on codes is
the lexicographic order on digit lists, truncation to a smaller radius is
integer division by a power of q, and tau(a) has code a*q^(r-1).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np

from . import config
from .errors import (
    BudgetExceeded,
    InvalidResidueField,
    MixedContexts,
    NonEisensteinPolynomial,
    NonUnitInverse,
    RadiusExceedsPrecision,
    SpecFormatError,
)
from .finite_field import FiniteField, field_from_poly, is_irreducible_fp
from .tower import Step, Tower, model_for


# ---------------------------------------------------------------------------
# specifications


@dataclass(frozen=True)
class ResidueField:
    p: int
    n: int
    defining_poly: tuple

    def __post_init__(self):
        poly = tuple(int(c) % self.p for c in self.defining_poly)
        object.__setattr__(self, "defining_poly", poly)
        if len(poly) != self.n + 1 or poly[-1] != 1:
            raise InvalidResidueField("defining_poly must be monic of degree n")
        if not is_irreducible_fp(list(poly), self.p):
            raise InvalidResidueField(f"{list(poly)} is reducible over F_{self.p}")

    @property
    def cardinality(self) -> int:
        return self.p**self.n

    def field(self) -> FiniteField:
        return field_from_poly(self.p, self.defining_poly)


@dataclass(frozen=True)
class LocalFieldSpec:
    """A local field K given by its residue field and an Eisenstein polynomial.

    ``eisenstein`` holds the coefficients c_0..c_{e-1} of
    T^e + sum c_i T^i, each as a tuple of residue codes (the Teichmuller digits
    of the coefficient over the unramified base).  With e = 1 it may be empty
    (uniformizer p, resp. X) or hold c_0 alone (uniformizer -c_0).
    """

    tag: str
    residue: ResidueField
    e: int = 1
    eisenstein: tuple = ()
    precision: int = 16
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if self.tag not in ("mixed_char", "equal_char"):
            raise SpecFormatError(f"unknown tag {self.tag!r}")
        if self.e < 1 or self.precision < 1:
            raise SpecFormatError("e and precision must be positive")
        coeffs = tuple(tuple(int(d) for d in c) for c in self.eisenstein)
        object.__setattr__(self, "eisenstein", coeffs)
        if self.e > 1 and len(coeffs) != self.e:
            raise NonEisensteinPolynomial(f"expected {self.e} coefficients, got {len(coeffs)}")
        if self.e == 1 and len(coeffs) > 1:
            raise NonEisensteinPolynomial("degree-one polynomial takes a single coefficient")
        for i, c in enumerate(coeffs):
            if c and c[0] != 0:
                raise NonEisensteinPolynomial(f"coefficient c_{i} is a unit")
            if i == 0 and (len(c) < 2 or c[1] == 0):
                raise NonEisensteinPolynomial("constant coefficient must have valuation exactly 1")

    @property
    def p(self) -> int:
        return self.residue.p

    @property
    def equal_char(self) -> bool:
        return self.tag == "equal_char"

    @property
    def max_radius(self) -> int:
        return self.e * self.precision

    def tower(self) -> Tower:
        return tower_from_spec(self)

    def to_json(self) -> dict:
        return {
            "tag": self.tag,
            "p": self.p,
            "n": self.residue.n,
            "res_poly": list(self.residue.defining_poly),
            "e": self.e,
            "eisenstein": [[self.residue.field().vector(d) for d in c] for c in self.eisenstein],
            "precision": self.precision,
        }


def unramified_tower(p: int, equal_char: bool, res_poly) -> Tower:
    tower = Tower(p, equal_char)
    n = len(res_poly) - 1
    if n > 1:
        tower = tower.extend(Step("unram", n, tuple((int(c) % p,) for c in res_poly[:-1])))
    return tower


@lru_cache(maxsize=None)
def tower_from_spec(spec: LocalFieldSpec) -> Tower:
    tower = unramified_tower(spec.p, spec.equal_char, spec.residue.defining_poly)
    if spec.e > 1:
        tower = tower.extend(Step("ram", spec.e, spec.eisenstein))
    elif spec.eisenstein:
        tower = tower.extend(Step("unif", 1, spec.eisenstein))
    return tower


def _residue_code(value, residue: ResidueField) -> int:
    if isinstance(value, bool):
        raise SpecFormatError("booleans are not residue elements")
    if isinstance(value, int):
        if not 0 <= value < residue.cardinality:
            raise SpecFormatError(f"residue code {value} out of range")
        return value
    if isinstance(value, (list, tuple)):
        if len(value) > residue.n:
            raise SpecFormatError(f"residue vector {value} longer than n={residue.n}")
        return sum((int(c) % residue.p) * residue.p**i for i, c in enumerate(value))
    raise SpecFormatError(f"cannot read residue element {value!r}")


def digits_from_json(value, residue: ResidueField, base_tower: Tower, length: int) -> tuple:
    """Read an exact element given as a digit list, or as an integer (image of Z)."""
    if isinstance(value, bool):
        raise SpecFormatError("booleans are not ring elements")
    if isinstance(value, int):
        ring = trunc_ring(base_tower, length)
        return tuple(ring.digits(ring.from_int(value)))
    if not isinstance(value, (list, tuple)):
        raise SpecFormatError(f"cannot read digit vector {value!r}")
    return tuple(_residue_code(d, residue) for d in value)


def spec_from_json(obj: dict) -> LocalFieldSpec:
    try:
        tag = obj["tag"]
        p = int(obj["p"])
        n = int(obj.get("n", 1))
        res_poly = obj.get("res_poly")
        if res_poly is None:
            if n != 1:
                raise SpecFormatError("res_poly is required when n > 1")
            res_poly = [0, 1]
        residue = ResidueField(p, n, tuple(int(c) for c in res_poly))
        e = int(obj.get("e", 1))
        precision = int(obj.get("precision", 16))
        base = unramified_tower(p, tag == "equal_char", residue.defining_poly)
        coeffs = tuple(
            digits_from_json(c, residue, base, precision) for c in obj.get("eisenstein", [])
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise SpecFormatError(f"malformed local field spec: {exc}") from exc
    return LocalFieldSpec(tag, residue, e, coeffs, precision, name=str(obj.get("name", "")))


# ---------------------------------------------------------------------------
# rings


class TruncRing:
    """O/m^radius for the ring described by a tower."""

    def __init__(self, tower: Tower, radius: int):
        if radius < 0:
            raise ValueError("radius must be nonnegative")
        self.tower = tower
        self.radius = radius
        self.p = tower.p
        self.equal_char = tower.equal_char
        self.e_tot = tower.e_tot
        K = max(1, -(-radius // self.e_tot))
        self.model = model = model_for(tower, K)
        self.residue: FiniteField = model.residue_field()
        self.Q = Q = self.residue.q
        self.N = N = Q**radius
        if N > config.RING_MAX:
            raise BudgetExceeded(f"ring of size {N} exceeds the limit {config.RING_MAX}")
        w = model.weights
        if self.equal_char:
            mods = np.where(w < radius, self.p, 1)
        else:
            k = np.maximum(0, -((w - radius) // self.e_tot))
            mods = self.p**k
        self._live = np.nonzero(mods > 1)[0]
        self._mods = mods[self._live].astype(np.int64)
        radix = np.ones(len(self._live), dtype=np.int64)
        for i in range(1, len(self._live)):
            radix[i] = radix[i - 1] * self._mods[i - 1]
        self._radix = radix
        L = len(self._live)
        teich = np.array([model.teichmuller(a)[self._live] for a in range(Q)], dtype=np.int64).reshape(Q, L)
        self._teich_atoms = teich % self._mods if L else teich
        codes = np.arange(N, dtype=np.int64)
        atoms = np.zeros((N, L), dtype=np.int64)
        power = model.one()
        for i in range(radius):
            digit = (codes // Q ** (radius - 1 - i)) % Q
            block = np.array(
                [model.mul(model.teichmuller(a), power)[self._live] for a in range(Q)], dtype=np.int64
            ).reshape(Q, L)
            atoms = (atoms + block[digit]) % model.modulus
            power = model.mul(power, model.uniformizer)
        atoms = atoms % self._mods if L else atoms
        akeys = atoms @ radix if L else np.zeros(N, dtype=np.int64)
        if len(np.unique(akeys)) != N:
            raise AssertionError("digit expansion is not a bijection; tower data inconsistent")
        self._akey_to_code = np.empty(N, dtype=np.int64)
        self._akey_to_code[akeys] = codes
        self.code_atoms = atoms
        self._T_live = model.T[np.ix_(self._live, self._live, self._live)] if L else None
        self.add_table = None
        self.mul_table = None
        if N <= config.TABLE_MAX:
            self._build_tables()
        self.neg_table = self._from_atoms((-self.code_atoms) % self._mods if L else self.code_atoms)
        self.val_table = np.array([self._val_uncached(c) for c in range(N)], dtype=np.int64)

    # atom helpers
    def _from_atoms(self, atoms):
        atoms = np.asarray(atoms, dtype=np.int64)
        if len(self._live) == 0:
            return np.zeros(atoms.shape[:-1], dtype=np.int64)
        atoms = atoms % self._mods
        return self._akey_to_code[atoms @ self._radix]

    def _mul_atoms(self, x, y):
        """Products of atom arrays (..., L) by (..., L)."""
        M = self.model.modulus
        w = np.einsum("...j,ijl->...il", y, self._T_live) % M
        return np.einsum("...i,...il->...l", x, w) % M

    def _build_tables(self):
        N = self.N
        A = self.code_atoms
        add = np.empty((N, N), dtype=np.int32)
        mul = np.empty((N, N), dtype=np.int32)
        if len(self._live) == 0:
            add[:] = 0
            mul[:] = 0
        else:
            W = np.einsum("bj,ijl->bil", A, self._T_live) % self.model.modulus
            chunk = max(1, 65536 // max(1, N))
            for start in range(0, N, chunk):
                rows = A[start : start + chunk]
                add[start : start + chunk] = self._from_atoms(rows[:, None, :] + A[None, :, :])
                prod = np.einsum("ai,bil->abl", rows, W) % self.model.modulus
                mul[start : start + chunk] = self._from_atoms(prod)
        self.add_table = add
        self.mul_table = mul

    # scalar operations on codes
    def add(self, a: int, b: int) -> int:
        if self.add_table is not None:
            return int(self.add_table[a, b])
        return int(self._from_atoms(self.code_atoms[a] + self.code_atoms[b]))

    def sub(self, a: int, b: int) -> int:
        return self.add(a, int(self.neg_table[b]))

    def neg(self, a: int) -> int:
        return int(self.neg_table[a])

    def mul(self, a: int, b: int) -> int:
        if self.mul_table is not None:
            return int(self.mul_table[a, b])
        return int(self._from_atoms(self._mul_atoms(self.code_atoms[a], self.code_atoms[b])))

    def pow(self, a: int, k: int) -> int:
        result = self.one
        base = a
        while k:
            if k & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            k >>= 1
        return result

    def inv(self, a: int) -> int:
        if self.radius == 0:
            return 0
        if self.val(a) != 0:
            raise NonUnitInverse("element is not a unit")
        order = (self.Q - 1) * self.Q ** (self.radius - 1)
        return self.pow(a, order - 1)

    def _val_uncached(self, code: int) -> int:
        for i, d in enumerate(self.digits(code)):
            if d:
                return i
        return self.radius

    def val(self, a: int) -> int:
        return int(self.val_table[a])

    # digits
    def digits(self, code: int):
        Q, r = self.Q, self.radius
        return [(code // Q ** (r - 1 - i)) % Q for i in range(r)]

    def from_digits(self, digits) -> int:
        digits = list(digits)
        if len(digits) > self.radius:
            digits = digits[: self.radius]
        digits = digits + [0] * (self.radius - len(digits))
        code = 0
        for d in digits:
            code = code * self.Q + int(d)
        return code

    def teich(self, a: int) -> int:
        if self.radius == 0:
            return 0
        return int(a) * self.Q ** (self.radius - 1)

    @property
    def zero(self) -> int:
        return 0

    @property
    def one(self) -> int:
        return self.teich(1) if self.radius else 0

    @property
    def unif(self) -> int:
        return self.Q ** (self.radius - 2) if self.radius >= 2 else 0

    def from_int(self, k: int) -> int:
        if len(self._live) == 0:
            return 0
        vec = self.model.scalar(k)[self._live]
        return int(self._from_atoms(vec))

    def truncate(self, code: int, radius: int) -> int:
        if radius > self.radius:
            raise ValueError("cannot truncate to a larger radius")
        return int(code) // self.Q ** (self.radius - radius)

    def lift(self, code: int, radius: int) -> int:
        """Zero-digit extension to a larger radius."""
        return int(code) * self.Q ** (radius - self.radius)

    def residue_of(self, code: int) -> int:
        return self.digits(code)[0] if self.radius else 0

    def full_vector(self, code: int):
        """Model vector (mod varpi^K) representing the element."""
        v = np.zeros(self.model.B, dtype=np.int64)
        v[self._live] = self.code_atoms[code]
        return v

    def from_vector(self, vec) -> int:
        return int(self._from_atoms(np.asarray(vec, dtype=np.int64)[self._live]))

    def characteristic(self) -> int:
        k, c = 1, self.one
        while c != 0:
            c = self.add(c, self.one)
            k += 1
        return k if self.radius else 1

    def elements(self):
        return range(self.N)

    @property
    def key(self):
        return (self.tower, self.radius)

    def __eq__(self, other):
        return isinstance(other, TruncRing) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"TruncRing(p={self.p}, q={self.Q}, e={self.e_tot}, radius={self.radius}, size={self.N})"


@lru_cache(maxsize=None)
def trunc_ring(tower: Tower, radius: int) -> TruncRing:
    return TruncRing(tower, radius)


def exact_code(ring: TruncRing, prefix_steps: int, digits) -> int:
    """Code in ``ring`` of the exact element sum tau(d_i) pi^i of a prefix ring.

    ``digits`` are Teichmuller digits with respect to the uniformizer of the
    ring described by the first ``prefix_steps`` steps of ``ring.tower``.
    """
    prefix = model_for(ring.tower.prefix(prefix_steps), ring.model.K)
    vec = ring.model.embed_from(prefix, prefix.digits_to_vector(digits))
    return ring.from_vector(vec)


def embedding_map(src: TruncRing, dst: TruncRing) -> np.ndarray:
    """Codes of src mapped into dst along a shared tower prefix (same varpi-precision)."""
    return _embedding_map(src, dst)


@lru_cache(maxsize=None)
def _embedding_map(src: TruncRing, dst: TruncRing) -> np.ndarray:
    steps = src.tower.steps
    if dst.tower.steps[: len(steps)] != steps or src.tower.p != dst.tower.p:
        raise MixedContexts("source tower is not a prefix of the target tower")
    if src.model.K != dst.model.K:
        raise MixedContexts("embedding requires equal varpi-precision")
    out = np.empty(src.N, dtype=np.int64)
    for c in range(src.N):
        out[c] = dst.from_vector(dst.model.embed_from(src.model, src.full_vector(c)))
    return out


# ---------------------------------------------------------------------------
# public element API


@dataclass(frozen=True)
class RingElem:
    ring: TruncRing
    code: int

    def _check(self, other):
        if not isinstance(other, RingElem) or other.ring != self.ring:
            raise MixedContexts("elements live in different rings")

    def __add__(self, other):
        self._check(other)
        return RingElem(self.ring, self.ring.add(self.code, other.code))

    def __sub__(self, other):
        self._check(other)
        return RingElem(self.ring, self.ring.sub(self.code, other.code))

    def __mul__(self, other):
        self._check(other)
        return RingElem(self.ring, self.ring.mul(self.code, other.code))

    def __neg__(self):
        return RingElem(self.ring, self.ring.neg(self.code))

    def __pow__(self, k: int):
        return RingElem(self.ring, self.ring.pow(self.code, k))

    @property
    def digits(self):
        return self.ring.digits(self.code)

    @property
    def val(self):
        return self.ring.val(self.code)

    def __repr__(self):
        return f"RingElem({self.digits})"


def make_ring(spec: LocalFieldSpec, r: int) -> TruncRing:
    if r < 1 or r > spec.max_radius:
        raise RadiusExceedsPrecision(f"radius {r} outside [1, {spec.max_radius}]")
    return trunc_ring(tower_from_spec(spec), r)


def elem(ring: TruncRing, value) -> RingElem:
    """Build an element from a digit list or an integer."""
    if isinstance(value, RingElem):
        if value.ring != ring:
            raise MixedContexts("element belongs to another ring")
        return value
    if isinstance(value, int):
        return RingElem(ring, ring.from_int(value))
    return RingElem(ring, ring.from_digits(value))


def ring_add(x: RingElem, y: RingElem) -> RingElem:
    return x + y


def ring_mul(x: RingElem, y: RingElem) -> RingElem:
    return x * y


def ring_neg(x: RingElem) -> RingElem:
    return -x


def ring_inv(x: RingElem) -> RingElem:
    return RingElem(x.ring, x.ring.inv(x.code))


def ring_val(x: RingElem) -> int:
    return x.val


def teichmuller(a: int, ring: TruncRing) -> RingElem:
    return RingElem(ring, ring.teich(a))


def digits(x: RingElem):
    return x.digits


def enumerate_ring(ring: TruncRing):
    for c in range(ring.N):
        yield RingElem(ring, c)


# ---------------------------------------------------------------------------
# isomorphism search


@dataclass
class IsoWitness:
    """A ring isomorphism determined by residue-generator and uniformizer images."""

    image_of_residue_generator: object
    image_of_uniformizer: object
    equivariant: bool
    source: object = field(repr=False)
    target: object = field(repr=False)
    residue_map: np.ndarray = field(repr=False)
    uniformizer_code: int = 0

    def apply_code(self, code: int) -> int:
        return _apply_digits(self.target, self.residue_map, self.uniformizer_code, self.source.digits(code))

    def apply(self, x):
        if isinstance(x, RingElem):
            return RingElem(self.target, self.apply_code(x.code))
        return self.apply_code(x)

    def code_map(self) -> np.ndarray:
        return _code_map(self)


def _powers(T, x, n):
    out = [T.one]
    for _ in range(1, n):
        out.append(T.mul(out[-1], x))
    return out


def _apply_digits(T, sigma, unif, digs, powers=None):
    if powers is None:
        powers = _powers(T, unif, T.radius)
    acc = 0
    for k, d in enumerate(digs):
        if d:
            acc = T.add(acc, T.mul(T.teich(int(sigma[d])), powers[k]))
    return acc


def _code_map(w: IsoWitness) -> np.ndarray:
    S, T = w.source, w.target
    powers = _powers(T, w.uniformizer_code, T.radius)
    out = np.empty(S.N, dtype=np.int64)
    for c in range(S.N):
        out[c] = _apply_digits(T, w.residue_map, w.uniformizer_code, S.digits(c), powers)
    return out


def _source_relations(S, equivariance):
    Q = S.Q
    carries = {}
    for a in range(Q):
        for b in range(a, Q):
            carries[(a, b)] = S.digits(S.add(S.teich(a), S.teich(b)))
    twists = [S.digits(S.mul(S.unif, S.teich(b))) for b in range(Q)]
    conj_rel = None
    if equivariance is not None:
        conj_s, _ = equivariance
        g = S.residue.generator()
        conj_rel = (g, S.digits(conj_s(S.teich(g))), S.digits(conj_s(S.unif)))
    return carries, twists, conj_rel


def _relations_hold(S, T, sigma, unif, level, rels, equivariance):
    """Check the defining relations modulo the level-th power of the target maximal ideal."""
    carries, twists, conj_rel = rels
    powers = _powers(T, unif, T.radius)

    def image(digs):
        return _apply_digits(T, sigma, unif, digs, powers)

    def agree(x, y):
        return T.digits(x)[:level] == T.digits(y)[:level]

    Q = S.Q
    for (a, b), digs in carries.items():
        lhs = T.add(T.teich(int(sigma[a])), T.teich(int(sigma[b])))
        if not agree(lhs, image(digs)):
            return False
    for b in range(Q):
        lhs = T.mul(unif, T.teich(int(sigma[b])))
        if not agree(lhs, image(twists[b])):
            return False
    if conj_rel is not None:
        _, conj_t = equivariance
        g, conj_g, conj_pi = conj_rel
        if not agree(conj_t(T.teich(int(sigma[g]))), image(conj_g)):
            return False
        if not agree(conj_t(unif), image(conj_pi)):
            return False
    return True


def residue_isomorphisms(F1: FiniteField, F2: FiniteField):
    """All field isomorphisms F1 -> F2 as code arrays, in a fixed order."""
    if F1.p != F2.p or F1.q != F2.q:
        return []
    g = F1.generator()
    poly = F1.min_poly(g)
    return [F2.embedding_from(F1, root, g) for root in F2.roots(poly)]


def digit_iso_search(S, T, equivariance=None) -> Optional[IsoWitness]:
    """Search an isomorphism between two digit rings (truncated rings or algebras).

    The residue generator is sent to each root of its minimal polynomial in
    turn; the uniformizer image is then found digit by digit, keeping a
    partial image only while the carry relations tau(a)+tau(b) = sum tau(c_k) pi^k,
    the twist relations pi tau(b) = ..., and (for pairs) the conjugation
    relations hold modulo the current level.
    """
    if S.p != T.p or S.Q != T.Q or S.radius != T.radius:
        return None
    L = S.radius
    rels = _source_relations(S, equivariance)
    for sigma in residue_isomorphisms(S.residue, T.residue):
        if L <= 1:
            if _relations_hold(S, T, sigma, 0, L, rels, equivariance):
                return _make_witness(S, T, sigma, 0, equivariance)
            continue
        found = _backtrack(S, T, sigma, [0], rels, equivariance)
        if found is not None:
            return _make_witness(S, T, sigma, T.from_digits(found), equivariance)
    return None


def _backtrack(S, T, sigma, prefix, rels, equivariance):
    level = len(prefix)  # digits 0..level-1 of the uniformizer image are fixed
    L = S.radius
    if level == L:
        return prefix
    choices = range(1, T.Q) if level == 1 else range(T.Q)
    for d in choices:
        cand = prefix + [d]
        unif = T.from_digits(cand)
        if _relations_hold(S, T, sigma, unif, level + 1, rels, equivariance):
            out = _backtrack(S, T, sigma, cand, rels, equivariance)
            if out is not None:
                return out
    return None


def _make_witness(S, T, sigma, unif, equivariance):
    g = S.residue.generator()
    gen_image = T.teich(int(sigma[g]))
    wrap = (lambda c: RingElem(T, c)) if isinstance(T, TruncRing) else (lambda c: c)
    return IsoWitness(
        image_of_residue_generator=wrap(gen_image),
        image_of_uniformizer=wrap(unif),
        equivariant=equivariance is not None,
        source=S,
        target=T,
        residue_map=np.asarray(sigma),
        uniformizer_code=unif,
    )


def verify_witness(w: IsoWitness, equivariance=None) -> bool:
    """Re-check every defining relation at full precision."""
    S, T = w.source, w.target
    if S.radius >= 2 and T.val(w.uniformizer_code) != 1:
        return False
    F1, F2 = S.residue, T.residue
    sigma = w.residue_map
    if sorted(int(x) for x in sigma) != list(range(F2.q)):
        return False
    for a in range(F1.q):
        for b in range(F1.q):
            if sigma[F1.mul(a, b)] != F2.mul(int(sigma[a]), int(sigma[b])):
                return False
            if sigma[F1.add(a, b)] != F2.add(int(sigma[a]), int(sigma[b])):
                return False
    rels = _source_relations(S, equivariance)
    return _relations_hold(S, T, sigma, w.uniformizer_code, S.radius, rels, equivariance)


def ring_iso_search(R1: TruncRing, R2: TruncRing) -> Optional[IsoWitness]:
    return digit_iso_search(R1, R2)
