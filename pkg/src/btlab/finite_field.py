"""Finite fields F_{p^n} given by structure constants over F_p.

Elements are integer codes: the coordinate vector (c_0, ..., c_{n-1}) in the
chosen F_p-basis is encoded as sum c_i p^i.  The first basis vector is 1.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product

import numpy as np

from . import linalg_fp
from .errors import InvalidResidueField


def poly_trim(poly):
    poly = list(poly)
    while poly and poly[-1] == 0:
        poly.pop()
    return poly


def poly_mod(a, b, p):
    """Remainder of a by monic-able b over F_p (low-to-high lists)."""
    a = [x % p for x in a]
    b = poly_trim([x % p for x in b])
    inv_lead = pow(b[-1], -1, p)
    db = len(b) - 1
    while len(poly_trim(a)) - 1 >= db:
        a = poly_trim(a)
        shift = len(a) - 1 - db
        factor = (a[-1] * inv_lead) % p
        for i, c in enumerate(b):
            a[shift + i] = (a[shift + i] - factor * c) % p
    return poly_trim(a)


def is_irreducible_fp(poly, p: int) -> bool:
    """Irreducibility over F_p by trial division with all monic polynomials of degree <= n/2."""
    poly = poly_trim([c % p for c in poly])
    n = len(poly) - 1
    if n < 1:
        return False
    if n == 1:
        return True
    for d in range(1, n // 2 + 1):
        for coeffs in product(range(p), repeat=d):
            divisor = list(coeffs) + [1]
            if not poly_mod(poly, divisor, p):
                return False
    return True


class FiniteField:
    """A finite field with a fixed F_p-basis whose first vector is 1."""

    def __init__(self, p: int, structure, defining_poly=None):
        self.p = p
        structure = np.asarray(structure, dtype=np.int64) % p
        self.n = structure.shape[0]
        self.q = p**self.n
        self.structure = structure
        self.defining_poly = tuple(defining_poly) if defining_poly is not None else None
        q, n = self.q, self.n
        weights = p ** np.arange(n, dtype=np.int64)
        self._weights = weights
        codes = np.arange(q, dtype=np.int64)
        self.vectors = (codes[:, None] // weights[None, :]) % p
        vec = self.vectors
        self.add_table = ((vec[:, None, :] + vec[None, :, :]) % p) @ weights
        self.neg_table = ((-vec) % p) @ weights
        # mul_matrix[a] maps coordinates of b to coordinates of a*b.
        mats = np.einsum("ai,ijk->akj", vec, structure) % p
        prod_vecs = np.einsum("akj,bj->abk", mats, vec) % p
        self.mul_table = prod_vecs @ weights
        self.inv_table = np.zeros(q, dtype=np.int64)
        for a in range(1, q):
            row = self.mul_table[a]
            self.inv_table[a] = int(np.nonzero(row == 1)[0][0])
        self._check_field()

    def _check_field(self):
        if self.q > 1:
            if int(self.mul_table[1, 1]) != 1 or np.any(self.mul_table[1] != np.arange(self.q)):
                raise InvalidResidueField("first basis vector is not the identity")
            nonzero = self.mul_table[1:, 1:]
            if np.any(nonzero == 0):
                raise InvalidResidueField("structure has zero divisors")

    @classmethod
    def from_poly(cls, p: int, poly):
        """Power basis 1, x, ..., x^{n-1} of F_p[x]/(poly)."""
        poly = poly_trim([c % p for c in poly])
        n = len(poly) - 1
        if n < 1 or poly[-1] != 1:
            raise InvalidResidueField("defining polynomial must be monic of degree >= 1")
        if not is_irreducible_fp(poly, p):
            raise InvalidResidueField(f"polynomial {poly} is reducible over F_{p}")
        structure = np.zeros((n, n, n), dtype=np.int64)
        for i in range(n):
            for j in range(n):
                mono = [0] * (i + j) + [1]
                rem = poly_mod(mono, poly, p) if i + j >= n else mono
                for k, c in enumerate(rem):
                    structure[i, j, k] = c
        return cls(p, structure, defining_poly=poly)

    # element helpers
    def code(self, vector) -> int:
        vector = [int(c) % self.p for c in vector]
        if len(vector) > self.n:
            if any(vector[self.n:]):
                raise InvalidResidueField("coordinate vector too long")
            vector = vector[: self.n]
        return sum(c * self.p**i for i, c in enumerate(vector))

    def vector(self, code: int):
        return [int(c) for c in self.vectors[code]]

    def add(self, a, b):
        return int(self.add_table[a, b])

    def mul(self, a, b):
        return int(self.mul_table[a, b])

    def neg(self, a):
        return int(self.neg_table[a])

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("zero has no inverse")
        return int(self.inv_table[a])

    def pow(self, a, k):
        result = 1
        base = a
        while k:
            if k & 1:
                result = int(self.mul_table[result, base])
            base = int(self.mul_table[base, base])
            k >>= 1
        return result

    def frobenius(self, a, times=1):
        return self.pow(a, self.p**times)

    def from_int(self, k: int) -> int:
        return k % self.p

    def eval_poly(self, coeffs, x):
        """Evaluate a polynomial with coefficients given as field codes."""
        acc = 0
        for c in reversed(list(coeffs)):
            acc = self.add(self.mul(acc, x), c)
        return acc

    def min_poly(self, a):
        """Minimal polynomial of a over F_p, monic, low-to-high integer list."""
        powers = [self.vectors[1].copy()]
        cur = 1
        for d in range(1, self.n + 1):
            cur = self.mul(cur, a)
            powers.append(self.vectors[cur].copy())
            mat = np.array(powers, dtype=np.int64).T
            ns = linalg_fp.nullspace(mat, self.p)
            if ns.shape[0]:
                v = ns[0]
                lead = int(v[d])
                if lead == 0:
                    continue
                inv = pow(lead, -1, self.p)
                return [int(c * inv) % self.p for c in v[: d + 1]]
        raise AssertionError("minimal polynomial search failed")

    def generator(self) -> int:
        """Smallest code generating the field over F_p."""
        if self.n == 1:
            return 1
        for a in range(self.q):
            if len(self.min_poly(a)) - 1 == self.n:
                return a
        raise AssertionError("no field generator found")

    def roots(self, poly):
        """Codes of the roots of an F_p-coefficient polynomial."""
        coeffs = [self.from_int(c) for c in poly]
        return [x for x in range(self.q) if self.eval_poly(coeffs, x) == 0]

    def power_coordinates(self, g):
        """Matrix C with code a = sum_i C[a][i] g^i (coordinates in the basis of powers of g)."""
        cols = []
        cur = 1
        for _ in range(self.n):
            cols.append(self.vectors[cur])
            cur = self.mul(cur, g)
        basis = np.array(cols, dtype=np.int64).T
        inv = linalg_fp.inverse(basis, self.p)
        return (self.vectors @ inv.T) % self.p

    def embedding_from(self, other: "FiniteField", image_of_generator: int, generator=None):
        """Array sending codes of `other` to codes of self, determined by the image of a generator."""
        g = other.generator() if generator is None else generator
        coords = other.power_coordinates(g)
        powers = [1]
        for _ in range(other.n - 1):
            powers.append(self.mul(powers[-1], image_of_generator))
        out = np.zeros(other.q, dtype=np.int64)
        for a in range(other.q):
            acc = 0
            for i, c in enumerate(coords[a]):
                if c:
                    acc = self.add(acc, self.mul(self.from_int(int(c)), powers[i]))
            out[a] = acc
        return out

    def __repr__(self):
        return f"FiniteField(p={self.p}, n={self.n})"


@lru_cache(maxsize=None)
def field_from_poly(p: int, poly: tuple) -> FiniteField:
    return FiniteField.from_poly(p, list(poly))


def smallest_irreducible(p: int, n: int):
    """Lexicographically smallest monic irreducible polynomial of degree n over F_p."""
    for coeffs in product(range(p), repeat=n):
        poly = list(reversed(coeffs)) + [1]
        if is_irreducible_fp(poly, p):
            return poly
    raise AssertionError("no irreducible polynomial found")


def _poly_divmod_over(F: FiniteField, a, b):
    a = list(a)
    inv_lead = F.inv(b[-1])
    quot = [0] * max(1, len(a) - len(b) + 1)
    while len(a) >= len(b) and any(a):
        if a[-1] == 0:
            a.pop()
            continue
        c = F.mul(a[-1], inv_lead)
        shift = len(a) - len(b)
        quot[shift] = c
        for i, bc in enumerate(b):
            a[shift + i] = F.add(a[shift + i], F.neg(F.mul(c, bc)))
        a.pop()
    while a and a[-1] == 0:
        a.pop()
    return quot, a


def _poly_mulmod_over(F: FiniteField, a, b, m):
    out = [0] * (len(a) + len(b))
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = F.add(out[i + j], F.mul(x, y))
    return _poly_divmod_over(F, out, m)[1]


def _poly_gcd_over(F: FiniteField, a, b):
    while b:
        a, b = b, _poly_divmod_over(F, a, b)[1]
    return a


def is_irreducible_over(F: FiniteField, poly) -> bool:
    """Irreducibility of a monic polynomial with coefficients given as codes of F."""
    d = len(poly) - 1
    if d <= 1:
        return d == 1
    x = [0, 1]
    h = x
    for _ in range(d // 2):
        # h <- h^q mod poly
        result, base, k = [1], h, F.q
        while k:
            if k & 1:
                result = _poly_mulmod_over(F, result, base, poly)
            base = _poly_mulmod_over(F, base, base, poly)
            k >>= 1
        h = result
        diff = list(h) + [0] * max(0, 2 - len(h))
        diff[1] = F.add(diff[1], F.neg(1))
        while diff and diff[-1] == 0:
            diff.pop()
        if not diff:
            return False
        g = _poly_gcd_over(F, list(poly), diff)
        if len(g) > 1:
            return False
    return True


def smallest_irreducible_over(F: FiniteField, d: int):
    """Lexicographically smallest monic irreducible degree-d polynomial over F (codes)."""
    for coeffs in product(range(F.q), repeat=d):
        poly = list(reversed(coeffs)) + [1]
        if is_irreducible_over(F, poly):
            return poly
    raise AssertionError("no irreducible polynomial found")
