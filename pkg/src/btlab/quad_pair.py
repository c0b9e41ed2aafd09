"""Quadratic extension pairs (K, L) with L = K[t]/(t^2 - alpha t + beta).

Conjugation sends t to alpha - t.  The parameters gamma and i0 control the
dyadic ramified case; valuations of base elements are normalized so that
the uniformizer of K has valuation 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
import numpy as np

from .errors import (
    InsufficientPrecision,
    KindConstraintViolated,
    MixedContexts,
    NotDyadic,
    RadiusExceedsPrecision,
    ReducibleExtension,
    SpecFormatError,
)
from .tower import Step, Tower, model_for
from .trunc_ring import (
    LocalFieldSpec,
    RingElem,
    TruncRing,
    digit_iso_search,
    digits_from_json,
    exact_code,
    spec_from_json,
    tower_from_spec,
    trunc_ring,
    verify_witness,
)

KINDS = ("unramified", "ramified_odd", "ramified_dyadic", "inseparable")


def _digit_val(digits) -> float:
    for i, d in enumerate(digits):
        if d:
            return i
    return math.inf


def _trim(digits) -> tuple:
    digits = list(digits)
    while digits and digits[-1] == 0:
        digits.pop()
    return tuple(digits)


@dataclass(frozen=True)
class QuadPair:
    kind: str
    base: LocalFieldSpec
    alpha: tuple
    beta: tuple
    name: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "alpha", _trim(int(d) for d in self.alpha))
        object.__setattr__(self, "beta", _trim(int(d) for d in self.beta))
        _validate(self)

    # derived data
    @property
    def p(self) -> int:
        return self.base.p

    @property
    def e_rel(self) -> int:
        return 1 if self.kind == "unramified" else 2

    @property
    def e_base(self) -> int:
        return self.base.e

    @property
    def alpha_val(self):
        return _digit_val(self.alpha)

    @property
    def beta_val(self):
        return _digit_val(self.beta)

    @property
    def two_val(self):
        return math.inf if self.base.equal_char else (self.base.e if self.p == 2 else 0)

    @property
    def gamma(self):
        if self.kind != "ramified_dyadic":
            return Fraction(0)
        if self.alpha:
            return Fraction(self.alpha_val, 2) - Fraction(1, 4)
        return Fraction(self.two_val, 2)

    @property
    def i0(self):
        if self.kind == "inseparable":
            return math.inf
        if self.kind != "ramified_dyadic":
            return 0
        # smallest m with m * omega(pi_L) >= gamma, omega(pi_L) = 1/2
        return math.ceil(2 * self.gamma)

    @property
    def max_radius(self) -> int:
        return self.e_rel * self.base.max_radius

    def base_tower(self) -> Tower:
        return tower_from_spec(self.base)

    def tower(self) -> Tower:
        return _pair_tower(self)

    def ring(self, r: int) -> TruncRing:
        if r < 0 or r > self.max_radius:
            raise RadiusExceedsPrecision(f"radius {r} outside [0, {self.max_radius}]")
        return trunc_ring(self.tower(), r)

    def base_ring(self, s: int) -> TruncRing:
        if s < 0 or s > self.base.max_radius:
            raise RadiusExceedsPrecision(f"radius {s} outside [0, {self.base.max_radius}]")
        return trunc_ring(self.base_tower(), s)

    def base_radius(self, r: int) -> int:
        """Radius of the base ring whose image is the conjugation-fixed part at radius r."""
        return -(-r // self.e_rel)

    def conj_context(self, r: int) -> "ConjContext":
        return _conj_context(self, r)

    def t_code(self, r: int) -> int:
        """Code of the generator t in O_L/m_L^r."""
        ring = self.ring(r)
        return _t_code(ring)

    def base_code(self, digits, r: int) -> int:
        """Image in O_L/m_L^r of an exact base element given by its digits."""
        return exact_code(self.ring(r), len(self.base_tower().steps), digits)

    def embed_base(self, x: RingElem, r: int) -> RingElem:
        """Image of an element of a base truncation in O_L/m_L^r."""
        if x.ring.tower != self.base_tower():
            raise MixedContexts("element is not in the base ring")
        if r > self.e_rel * x.ring.radius:
            raise InsufficientPrecision("base element known to too small a radius")
        return RingElem(self.ring(r), self.base_code(x.digits, r))

    def to_json(self) -> dict:
        F = self.base.residue.field()
        return {
            "kind": self.kind,
            "base": self.base.to_json(),
            "alpha": [F.vector(d) for d in self.alpha],
            "beta": [F.vector(d) for d in self.beta],
        }


def _validate(pair: QuadPair):
    kind, base = pair.kind, pair.base
    if kind not in KINDS:
        raise KindConstraintViolated(f"unknown kind {kind!r}")
    va, vb = pair.alpha_val, pair.beta_val
    if kind == "unramified":
        if vb != 0:
            raise KindConstraintViolated("unramified pairs need a unit beta")
        F = base.residue.field()
        a0 = pair.alpha[0] if pair.alpha else 0
        b0 = pair.beta[0]
        # t^2 - a0 t + b0 must have no root in the residue field
        for x in range(F.q):
            if F.add(F.add(F.mul(x, x), F.neg(F.mul(a0, x))), b0) == 0:
                raise ReducibleExtension("residue polynomial has a root")
        return
    if vb != 1:
        raise KindConstraintViolated("ramified pairs need beta of valuation 1")
    if va < 1:
        raise KindConstraintViolated("alpha must lie in the maximal ideal for a ramified pair")
    if kind == "ramified_odd":
        if base.p == 2:
            raise KindConstraintViolated("ramified_odd needs odd residue characteristic")
    elif kind == "ramified_dyadic":
        if base.p != 2:
            raise KindConstraintViolated("ramified_dyadic needs residue characteristic 2")
        if not pair.alpha and base.equal_char:
            raise KindConstraintViolated("alpha = 0 in characteristic 2 gives the inseparable pair")
        if pair.alpha and va > pair.two_val:
            raise KindConstraintViolated("alpha must satisfy omega(alpha) <= omega(2)")
    else:  # inseparable
        if not (base.equal_char and base.p == 2 and base.e == 1 and not base.eisenstein):
            raise KindConstraintViolated("inseparable pairs live over F_2^n((X)) only")
        if pair.alpha or pair.beta != (0, 1):
            raise KindConstraintViolated("the inseparable pair is t^2 = X")


@lru_cache(maxsize=None)
def _pair_tower(pair: QuadPair) -> Tower:
    base = tower_from_spec(pair.base)
    neg_alpha = ("-", pair.alpha) if pair.alpha else ()
    kind = "unram" if pair.kind == "unramified" else "ram"
    return base.extend(Step(kind, 2, (pair.beta, neg_alpha)))


def _t_code(ring: TruncRing) -> int:
    model = ring.model
    e = [0] * model.nv
    e[-1] = 1
    vec = np.zeros(model.B, dtype=np.int64)
    vec[model.index[tuple(e)]] = 1
    return ring.from_vector(vec)


@dataclass
class ConjContext:
    """Conjugation on O_L/m_L^r as a permutation of element codes."""

    pair: QuadPair
    ring: TruncRing
    table: np.ndarray = field(repr=False)

    def conj_code(self, c: int) -> int:
        return int(self.table[c])

    def conjugate(self, x: RingElem) -> RingElem:
        if x.ring != self.ring:
            raise MixedContexts("element lives in a different ring")
        return RingElem(self.ring, self.conj_code(x.code))

    def norm_code(self, c: int) -> int:
        return self.ring.mul(c, self.conj_code(c))

    def trace_code(self, c: int) -> int:
        return self.ring.add(c, self.conj_code(c))

    def norm(self, x: RingElem) -> RingElem:
        return RingElem(self.ring, self.norm_code(x.code))

    def trace(self, x: RingElem) -> RingElem:
        return RingElem(self.ring, self.trace_code(x.code))

    def fixed_codes(self) -> np.ndarray:
        return np.nonzero(self.table == np.arange(self.ring.N))[0]


@lru_cache(maxsize=None)
def _conj_context(pair: QuadPair, r: int) -> ConjContext:
    ring = pair.ring(r)
    if pair.kind == "inseparable":
        return ConjContext(pair, ring, np.arange(ring.N, dtype=np.int64))
    model = ring.model
    prefix = model_for(pair.tower().prefix(len(pair.base_tower().steps)), model.K)
    alpha_vec = model.embed_from(prefix, prefix.digits_to_vector(pair.alpha))
    M = model.modulus
    C = np.zeros((model.B, model.B), dtype=np.int64)
    for b, exps in enumerate(model.basis):
        if exps[-1] == 0:
            C[b, b] = 1
            continue
        lower = list(exps)
        lower[-1] = 0
        mono = np.zeros(model.B, dtype=np.int64)
        mono[model.index[tuple(lower)]] = 1
        # m * t -> m * alpha - m * t
        C[:, b] = (model.mul(mono, alpha_vec) - (np.arange(model.B) == b)) % M
    full = np.zeros((ring.N, model.B), dtype=np.int64)
    full[:, ring._live] = ring.code_atoms
    images = (full @ C.T) % M
    table = ring._from_atoms(images[:, ring._live])
    if sorted(table.tolist()) != list(range(ring.N)):
        raise AssertionError("conjugation is not a bijection")
    return ConjContext(pair, ring, table.astype(np.int64))


# ---------------------------------------------------------------------------
# public API


def pair_from_json(obj: dict, name: str = "") -> QuadPair:
    try:
        kind = obj["kind"]
        base = obj["base"] if isinstance(obj["base"], LocalFieldSpec) else spec_from_json(obj["base"])
        prec = base.max_radius
        base_tower = tower_from_spec(base)

        def read(v):
            if v is None:
                return ()
            return digits_from_json(v, base.residue, base_tower, prec)

        alpha = read(obj.get("alpha"))
        beta = read(obj.get("beta"))
    except (KeyError, TypeError, ValueError) as exc:
        raise SpecFormatError(f"malformed pair spec: {exc}") from exc
    if kind == "inseparable" and not beta:
        beta = (0, 1)
    return QuadPair(kind, base, alpha, beta, name=name or str(obj.get("name", "")))


def make_pair(kind: str, base: LocalFieldSpec, alpha, beta, r: int):
    """Build a pair and its conjugation context at radius r of O_L."""
    pair = QuadPair(kind, base, tuple(alpha or ()), tuple(beta or ()))
    return pair, pair.conj_context(r)


def conjugate(ctx: ConjContext, x: RingElem) -> RingElem:
    return ctx.conjugate(x)


def norm(ctx: ConjContext, x: RingElem) -> RingElem:
    return ctx.norm(x)


def trace(ctx: ConjContext, x: RingElem) -> RingElem:
    return ctx.trace(x)


def descend(pair: QuadPair, y: RingElem) -> RingElem:
    """The base element (at radius ceil(r/e)) whose image is the fixed element y."""
    r = y.ring.radius
    s = pair.base_radius(r)
    base = pair.base_ring(s)
    emb = _base_image_table(pair, s, r)
    hits = np.nonzero(emb == y.code)[0]
    if len(hits) == 0:
        raise ValueError("element is not in the image of the base ring")
    return RingElem(base, int(hits[0]))


@lru_cache(maxsize=None)
def _base_image_table(pair: QuadPair, s: int, r: int) -> np.ndarray:
    base = pair.base_ring(s)
    ring = pair.ring(r)
    n_steps = len(pair.base_tower().steps)
    return np.array([exact_code(ring, n_steps, base.digits(c)) for c in range(base.N)], dtype=np.int64)


def reduced_trace(pair: QuadPair, x: RingElem, pi_k: RingElem) -> RingElem:
    """(x + conj(x)) / pi_K^i0 for x in O_L/m_L^(2s), returned in O_K/m_K^s."""
    if pair.kind != "ramified_dyadic":
        raise NotDyadic(f"reduced trace needs a dyadic pair, not {pair.kind}")
    i0 = pair.i0
    if x.ring.tower != pair.tower() or x.ring.radius % 2:
        raise MixedContexts("x must lie in an even truncation of O_L")
    s = x.ring.radius // 2
    if pi_k.ring.tower != pair.base_tower():
        raise MixedContexts("pi_K must lie in a truncation of O_K")
    if pi_k.ring.radius < s + 1:
        raise InsufficientPrecision(f"pi_K must be known modulo m^{s + 1}")
    if pi_k.val != 1:
        raise ValueError("pi_K is not a uniformizer")
    hi = 2 * s + 2 * i0
    if hi > pair.max_radius:
        raise InsufficientPrecision("lifted level exceeds the precision cap")
    ring_hi = pair.ring(hi)
    ctx_hi = pair.conj_context(hi)
    x_hi = x.ring.lift(x.code, hi)
    y = ctx_hi.trace_code(x_hi)
    pi_digits = list(pi_k.digits) + [0] * max(0, s + i0 - pi_k.ring.radius)
    pi_hi = pair.base_code(pi_digits[: s + i0], hi)
    pi_pow = ring_hi.pow(pi_hi, i0)
    y_digits = ring_hi.digits(y)
    if any(y_digits[: 2 * i0]):
        raise AssertionError("trace has too small a valuation")
    ring_lo = pair.ring(2 * s)
    z = ring_lo.from_digits(y_digits[2 * i0 :])
    unit = ring_lo.from_digits(ring_hi.digits(pi_pow)[2 * i0 :])
    w = ring_lo.mul(z, ring_lo.inv(unit))
    return descend(pair, RingElem(ring_lo, w))


def pair_iso_search(p1: QuadPair, p2: QuadPair, r: int):
    """Conjugation-equivariant isomorphism O_L1/m^r -> O_L2/m^r, or None."""
    c1, c2 = p1.conj_context(r), p2.conj_context(r)
    return digit_iso_search(c1.ring, c2.ring, equivariance=(c1.conj_code, c2.conj_code))


def verify_pair_witness(p1: QuadPair, p2: QuadPair, w) -> bool:
    r = w.source.radius
    c1, c2 = p1.conj_context(r), p2.conj_context(r)
    return verify_witness(w, equivariance=(c1.conj_code, c2.conj_code))
