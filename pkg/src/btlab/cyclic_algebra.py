"""Truncated cyclic division algebras O_D/m_D^level.

D is generated over the unramified degree-d extension E of K by u with
x u = u sigma^h(x) and u^d = pi_K, where sigma is the Frobenius of E/K and h
the Hasse invariant.  An element is stored by its u-coordinates
sum_i u^i x_i with x_i in O_E; the coordinate x_i only matters modulo
pi^ceil((level - i)/d).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np

from . import config
from .errors import BadHasse, BadLevel, BudgetExceeded, MixedContexts, SpecFormatError
from .finite_field import smallest_irreducible_over
from .tower import Step, Tower
from .trunc_ring import (
    LocalFieldSpec,
    RingElem,
    TruncRing,
    digit_iso_search,
    embedding_map,
    ring_iso_search,
    spec_from_json,
    tower_from_spec,
    trunc_ring,
)


@dataclass(frozen=True)
class CyclicAlgebraSpec:
    base: LocalFieldSpec
    degree: int
    hasse: int
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if self.degree < 1:
            raise BadHasse("degree must be positive")
        h = self.hasse % self.degree
        object.__setattr__(self, "hasse", h)
        if self.degree > 1 and math.gcd(h, self.degree) != 1:
            raise BadHasse(f"hasse {self.hasse} is not a unit modulo {self.degree}")

    @property
    def p(self) -> int:
        return self.base.p

    @property
    def max_level(self) -> int:
        return self.degree * self.base.max_radius

    def base_tower(self) -> Tower:
        return tower_from_spec(self.base)

    def tower(self) -> Tower:
        return _e_tower(self.base, self.degree)

    def to_json(self) -> dict:
        return {"base": self.base.to_json(), "degree": self.degree, "hasse": self.hasse}


@lru_cache(maxsize=None)
def _e_tower(base: LocalFieldSpec, d: int) -> Tower:
    tower = tower_from_spec(base)
    if d == 1:
        return tower
    F = base.residue.field()
    poly = smallest_irreducible_over(F, d)
    return tower.extend(Step("unram", d, tuple((c,) if c else () for c in poly[:-1])))


def algebra_from_json(obj: dict, name: str = "") -> CyclicAlgebraSpec:
    try:
        base = obj["base"] if isinstance(obj["base"], LocalFieldSpec) else spec_from_json(obj["base"])
        return CyclicAlgebraSpec(base, int(obj["degree"]), int(obj.get("hasse", 1)), name=name or str(obj.get("name", "")))
    except (KeyError, TypeError, ValueError) as exc:
        raise SpecFormatError(f"malformed algebra spec: {exc}") from exc


class CyclicAlgebra:
    """O_D/m_D^level with elements indexed by integers.

    The index of sum u^i x_i is the mixed-radix number whose digits are the
    codes of x_0, ..., x_{d-1} (x_0 most significant), each x_i read in
    O_E/m_E^{r_i} with r_i = ceil((level - i)/d).
    """

    def __init__(self, spec: CyclicAlgebraSpec, level: int):
        if level < 0 or level > spec.max_level:
            raise BadLevel(f"level {level} outside [0, {spec.max_level}]")
        self.spec = spec
        self.level = level
        self.d = d = spec.degree
        self.h = spec.hasse
        self.p = spec.p
        self.radii = [-(-(level - i) // d) if level > i else 0 for i in range(d)]
        self.R = self.radii[0]
        self.E: TruncRing = trunc_ring(spec.tower(), self.R)
        self.QE = self.E.Q
        self.N = self.QE**level
        if self.N > config.RING_MAX:
            raise BudgetExceeded(f"algebra of size {self.N} exceeds the limit {config.RING_MAX}")
        self.sizes = [self.QE**r for r in self.radii]
        self.q_base = spec.base.residue.cardinality
        # sigma^k on O_E/m^R as digitwise residue Frobenius
        F = self.E.residue
        self._sigma = []
        for k in range(d):
            res = np.array([F.pow(a, self.q_base**k) for a in range(F.q)], dtype=np.int64)
            self._sigma.append(self._digitwise(res))
        idx = np.arange(self.N, dtype=np.int64)
        comps = []
        rest = idx.copy()
        for i in reversed(range(d)):
            comps.append(rest % self.sizes[i])
            rest //= self.sizes[i]
        comps.reverse()
        # lifted component codes at radius R
        self.comps = np.stack([comps[i] * self.QE ** (self.R - self.radii[i]) for i in range(d)], axis=1)
        self.add_table = None
        self.mul_table = None
        if self.N <= config.TABLE_MAX:
            self._build_tables()
        self.neg_table = self._index(self._neg_comps(self.comps))
        self.val_table = self._val_comps(self.comps)

    def _digitwise(self, residue_map) -> np.ndarray:
        E = self.E
        out = np.empty(E.N, dtype=np.int64)
        for c in range(E.N):
            out[c] = E.from_digits([int(residue_map[a]) for a in E.digits(c)])
        return out

    def sigma(self, code: int, power: int = 1) -> int:
        return int(self._sigma[power % self.d][code])

    # component arrays <-> indices
    def _index(self, comps) -> np.ndarray:
        comps = np.asarray(comps, dtype=np.int64)
        out = np.zeros(comps.shape[:-1], dtype=np.int64)
        for i in range(self.d):
            trunc = comps[..., i] // self.QE ** (self.R - self.radii[i])
            out = out * self.sizes[i] + trunc
        return out

    def _neg_comps(self, comps):
        return self.E.neg_table[comps]

    def _val_comps(self, comps):
        vals = np.full(comps.shape[:-1], self.level, dtype=np.int64)
        for i in range(self.d):
            v = self.E.val_table[comps[..., i]] * self.d + i
            live = comps[..., i] != 0
            vals = np.where(live, np.minimum(vals, v), vals)
        return np.minimum(vals, self.level)

    def _mul_comps(self, a, b):
        """Products of component arrays a, b with shape (..., d), at radius R."""
        E, d = self.E, self.d
        add, mul = _ring_tables(E)
        out = np.zeros(np.broadcast(a[..., 0], b[..., 0]).shape + (d,), dtype=np.int64)
        pi = E.unif if E.radius >= 2 else 0
        for i in range(d):
            for j in range(d):
                term = mul(self._sigma[(self.h * j) % d][a[..., i]], b[..., j])
                k = i + j
                if k >= d:
                    k -= d
                    term = mul(np.full_like(term, pi), term)
                out[..., k] = add(out[..., k], term)
        return out

    def _build_tables(self):
        N = self.N
        A = self.comps
        add, _ = _ring_tables(self.E)
        self.add_table = self._index(add(A[:, None, :], A[None, :, :])).astype(np.int32)
        self.mul_table = self._index(self._mul_comps(A[:, None, :], A[None, :, :])).astype(np.int32)

    # element operations on indices
    def add(self, a: int, b: int) -> int:
        if self.add_table is not None:
            return int(self.add_table[a, b])
        add, _ = _ring_tables(self.E)
        return int(self._index(add(self.comps[a], self.comps[b])))

    def mul(self, a: int, b: int) -> int:
        if self.mul_table is not None:
            return int(self.mul_table[a, b])
        return int(self._index(self._mul_comps(self.comps[a], self.comps[b])))

    def neg(self, a: int) -> int:
        return int(self.neg_table[a])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def val(self, a: int) -> int:
        return int(self.val_table[a])

    def pow(self, a: int, k: int) -> int:
        result, base = self.one, a
        while k:
            if k & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            k >>= 1
        return result

    def from_components(self, comps) -> int:
        """Index of sum u^i x_i from E-codes (at any radius >= r_i) or RingElems."""
        lifted = []
        for i, c in enumerate(comps):
            if isinstance(c, RingElem):
                ring, code = c.ring, c.code
            else:
                ring, code = self.E, int(c)
            if ring.radius >= self.R:
                code = ring.truncate(code, self.R) if ring.radius > self.R else code
            else:
                code = ring.lift(code, self.R)
            lifted.append(code)
        lifted += [0] * (self.d - len(lifted))
        return int(self._index(np.array(lifted, dtype=np.int64)))

    def components(self, a: int):
        return [int(c) for c in self.comps[a]]

    @property
    def zero(self) -> int:
        return 0

    @property
    def one(self) -> int:
        return self.from_components([self.E.one]) if self.level else 0

    @property
    def u(self) -> int:
        if self.d == 1:
            return self.from_components([self.E.unif])
        return self.from_components([0, self.E.one])

    def elements(self):
        return range(self.N)

    # matrix embedding
    def phi(self, a: int):
        """d x d matrix over O_E/m^R (codes) representing left multiplication."""
        d, E = self.d, self.E
        x = self.comps[a]
        pi = E.unif if E.radius >= 2 else 0
        M = [[0] * d for _ in range(d)]
        for i in range(d):
            for j in range(d):
                s = self._sigma[(j * self.h) % d]
                if i >= j:
                    M[i][j] = int(s[x[i - j]])
                else:
                    M[i][j] = E.mul(pi, int(s[x[d + i - j]]))
        return M

    def digit_ring(self) -> "AlgebraDigits":
        return AlgebraDigits(self)

    def __repr__(self):
        return f"CyclicAlgebra(d={self.d}, hasse={self.h}, level={self.level}, size={self.N})"


def _ring_tables(E: TruncRing):
    """Vectorized add/mul on arrays of E codes."""
    if E.add_table is not None:
        return (lambda a, b: E.add_table[a, b].astype(np.int64), lambda a, b: E.mul_table[a, b].astype(np.int64))

    def add(a, b):
        return E._from_atoms(E.code_atoms[a] + E.code_atoms[b])

    def mul(a, b):
        return E._from_atoms(E._mul_atoms(E.code_atoms[a], E.code_atoms[b]))

    return add, mul


@lru_cache(maxsize=None)
def algebra_context(spec: CyclicAlgebraSpec, level: int) -> CyclicAlgebra:
    return CyclicAlgebra(spec, level)


def make_algebra(spec: CyclicAlgebraSpec, level: int) -> CyclicAlgebra:
    if level < 1 or level % spec.degree:
        raise BadLevel(f"level {level} is not a positive multiple of {spec.degree}")
    return algebra_context(spec, level)


@dataclass(frozen=True)
class AlgebraElem:
    algebra: CyclicAlgebra
    index: int

    def _check(self, other):
        if not isinstance(other, AlgebraElem) or other.algebra is not self.algebra:
            raise MixedContexts("elements live in different algebras")

    def __add__(self, other):
        self._check(other)
        return AlgebraElem(self.algebra, self.algebra.add(self.index, other.index))

    def __mul__(self, other):
        self._check(other)
        return AlgebraElem(self.algebra, self.algebra.mul(self.index, other.index))

    def __neg__(self):
        return AlgebraElem(self.algebra, self.algebra.neg(self.index))

    def __sub__(self, other):
        self._check(other)
        return AlgebraElem(self.algebra, self.algebra.sub(self.index, other.index))

    @property
    def coords(self):
        A = self.algebra
        return [RingElem(A.E, c) for c in A.components(self.index)]

    @property
    def val(self):
        return self.algebra.val(self.index)

    def __repr__(self):
        return f"AlgebraElem({[c.digits for c in self.coords]})"


def alg_elem(A: CyclicAlgebra, comps) -> AlgebraElem:
    return AlgebraElem(A, A.from_components(comps))


def alg_mul(x: AlgebraElem, y: AlgebraElem) -> AlgebraElem:
    return x * y


def embed_matrix(x: AlgebraElem):
    """phi(x) as a d x d list of RingElems of O_E/m_E^R."""
    A = x.algebra
    return [[RingElem(A.E, c) for c in row] for row in A.phi(x.index)]


def _det(M, ring) -> int:
    """Determinant over a commutative ring by dynamic programming over column subsets."""
    n = len(M)
    dp = {0: ring.one}
    for i in range(n):
        nxt = {}
        for mask, val in dp.items():
            for c in range(n):
                if mask >> c & 1 or M[i][c] == 0:
                    continue
                above = bin(mask >> (c + 1)).count("1")
                term = ring.mul(val, M[i][c])
                if above % 2:
                    term = ring.neg(term)
                key = mask | (1 << c)
                nxt[key] = ring.add(nxt.get(key, 0), term)
        dp = nxt
    return dp.get((1 << n) - 1, 0)


def determinant(M, ring) -> int:
    return _det(M, ring)


def nrd_code(A: CyclicAlgebra, g) -> int:
    """Reduced norm of a square matrix of algebra indices, as an E code (sigma-fixed)."""
    n, d = len(g), A.d
    big = [[0] * (n * d) for _ in range(n * d)]
    for a in range(n):
        for b in range(n):
            block = A.phi(g[a][b])
            for i in range(d):
                for j in range(d):
                    big[a * d + i][b * d + j] = block[i][j]
    return _det(big, A.E)


def reduced_norm(g) -> RingElem:
    """det of the 2d x 2d image under phi, returned in O_K/m_K^R."""
    A = g[0][0].algebra
    code = nrd_code(A, [[x.index for x in row] for row in g])
    return descend_to_base(A, code)


def descend_to_base(A: CyclicAlgebra, code: int) -> RingElem:
    K = trunc_ring(A.spec.base_tower(), A.R)
    emb = embedding_map(K, A.E)
    hits = np.nonzero(emb == code)[0]
    if len(hits) == 0:
        raise ValueError("element is not in the image of O_K")
    return RingElem(K, int(hits[0]))


def hasse_equivalent(a1: CyclicAlgebraSpec, a2: CyclicAlgebraSpec) -> bool:
    if a1.degree != a2.degree:
        return False
    d = a1.degree
    if d > 1 and (a1.hasse - a2.hasse) % d and (a1.hasse + a2.hasse) % d:
        return False
    if a1.base == a2.base:
        return True
    radius = _comparison_radius(a1.base, a2.base)
    from .trunc_ring import make_ring

    return ring_iso_search(make_ring(a1.base, radius), make_ring(a2.base, radius)) is not None


def _comparison_radius(b1: LocalFieldSpec, b2: LocalFieldSpec) -> int:
    """Largest common radius within both precision caps and the ring-size limit."""
    cap = min(b1.max_radius, b2.max_radius)
    q = max(b1.residue.cardinality, b2.residue.cardinality)
    while cap > 1 and q**cap > config.RING_MAX:
        cap -= 1
    return cap


class AlgebraDigits:
    """Digit view of an algebra: elements written sum_k tau(a_k) u^k.

    Exposes the interface used by the digit-by-digit isomorphism search.
    """

    def __init__(self, A: CyclicAlgebra):
        self.A = A
        self.p = A.p
        self.residue = A.E.residue
        self.Q = A.QE
        self.radius = A.level
        self.N = A.N
        F = self.residue
        d, h = A.d, A.h
        # u tau(c) = tau(sigma^{-h}(c)) u, and u^i tau(c) pi^m has digit index i + d m
        self._unshift = [
            np.array([F.pow(c, pow(self.A.q_base, (-h * i) % d) if d > 1 else 1) for c in range(F.q)], dtype=np.int64)
            for i in range(d)
        ]
        self._shift = [np.argsort(t) for t in self._unshift]
        digits = np.zeros((self.N, self.radius), dtype=np.int64)
        E = A.E
        Edig = np.array([E.digits(c) for c in range(E.N)], dtype=np.int64).reshape(E.N, E.radius)
        for i in range(d):
            for m in range(E.radius):
                k = i + d * m
                if k < self.radius:
                    digits[:, k] = self._unshift[i][Edig[A.comps[:, i], m]]
        self._digits = digits
        weights = self.Q ** np.arange(self.radius - 1, -1, -1, dtype=np.int64)
        codes = digits @ weights
        self._from_code = np.empty(self.N, dtype=np.int64)
        self._from_code[codes] = np.arange(self.N)
        self._weights = weights

    def digits(self, a: int):
        return [int(x) for x in self._digits[a]]

    def from_digits(self, digs) -> int:
        digs = list(digs)[: self.radius] + [0] * max(0, self.radius - len(digs))
        return int(self._from_code[int(np.dot(digs, self._weights))])

    def teich(self, a: int) -> int:
        return self.from_digits([a])

    @property
    def one(self):
        return self.A.one

    @property
    def unif(self):
        return self.A.u if self.radius >= 2 else 0

    def add(self, a, b):
        return self.A.add(a, b)

    def mul(self, a, b):
        return self.A.mul(a, b)

    def val(self, a):
        return self.A.val(a)


def algebra_iso_search(A1: CyclicAlgebra, A2: CyclicAlgebra):
    """Unital ring isomorphism between two algebra truncations, or None."""
    return digit_iso_search(A1.digit_ring(), A2.digit_ring())
