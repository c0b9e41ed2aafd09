"""Towers of monogenic extensions and their finite-precision models.

A tower describes the ring of integers of a local field as a sequence of
monic steps over the coefficient ring A (Z_p, or F_p[[X]] in equal
characteristic):

* ``unram`` steps adjoin a root of a lift of an irreducible residue polynomial;
* ``ram`` steps adjoin a root of an Eisenstein polynomial;
* a ``unif`` step declares a degree-one Eisenstein root, i.e. replaces the
  current uniformizer by ``-c0`` without adding a variable.

Step coefficients are exact elements of the previous ring, written as
Teichmuller digit expansions sum tau(d_i) pi^i in the uniformizer of that
previous ring.

A ``Model`` realizes the tower modulo varpi^K (varpi = p or X) as a free
module over Z/p^K (or over F_p with X a nilpotent variable) with a monomial
basis and an integer structure tensor.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import lcm

import numpy as np

from .finite_field import FiniteField


@dataclass(frozen=True)
class Step:
    kind: str  # "unram", "ram" or "unif"
    degree: int
    coeffs: tuple  # digit tuples of the previous ring, or ("-", digits) for a negated element


@dataclass(frozen=True)
class Tower:
    p: int
    equal_char: bool
    steps: tuple = ()

    def extend(self, step: Step) -> "Tower":
        return Tower(self.p, self.equal_char, self.steps + (step,))

    def prefix(self, j: int) -> "Tower":
        return Tower(self.p, self.equal_char, self.steps[:j])

    @property
    def n_vars(self) -> int:
        return sum(1 for s in self.steps if s.kind != "unif")

    def valuations(self):
        """Valuation (relative to varpi) of each variable and of the final uniformizer."""
        vals = []
        unif = Fraction(1)
        for s in self.steps:
            if s.kind == "unram":
                vals.append(Fraction(0))
            elif s.kind == "ram":
                unif = unif / s.degree
                vals.append(unif)
        return vals, unif

    @property
    def e_tot(self) -> int:
        _, unif = self.valuations()
        return unif.denominator


class Model:
    """The tower modulo varpi^K."""

    def __init__(self, tower: Tower, K: int):
        self.tower = tower
        self.K = K
        self.p = tower.p
        self.equal_char = tower.equal_char
        self.modulus = tower.p if tower.equal_char else tower.p**K
        vals, unif_val = tower.valuations()
        self.e_tot = unif_val.denominator
        x_degree = K if tower.equal_char else 1
        self.degrees = [x_degree] + [s.degree for s in tower.steps if s.kind != "unif"]
        self.var_weights = [self.e_tot] + [int(v * self.e_tot) for v in vals]
        nv = len(self.degrees)
        # basis monomials, unit block first, constant monomial first
        exps = [()]
        for d in self.degrees:
            exps = [e + (k,) for e in exps for k in range(d)]
        self.basis = sorted(exps, key=lambda e: (self._weight(e), tuple(reversed(e))))
        self.index = {e: i for i, e in enumerate(self.basis)}
        self.B = len(self.basis)
        self.weights = np.array([self._weight(e) for e in self.basis], dtype=np.int64)
        self.nv = nv
        # relations: var index -> dict(exps -> coefficient) for the lower part
        self.relations = {}
        self._memo = {}
        self.uniformizer = self.varpi()
        var = 0
        for j, step in enumerate(tower.steps):
            prefix = model_for(tower.prefix(j), K)
            coeff_vecs = [prefix.coefficient_vector(c) for c in step.coeffs]
            if step.kind == "unif":
                self.uniformizer = self._embed_prefix(prefix, (-coeff_vecs[0]) % self.modulus)
                continue
            var += 1
            rel = {}
            for power, vec in enumerate(coeff_vecs):
                for i in np.nonzero(vec % self.modulus)[0]:
                    e = list(prefix.basis[int(i)]) + [0] * (nv - prefix.nv)
                    e[var] += power
                    rel[tuple(e)] = (rel.get(tuple(e), 0) + int(vec[i])) % self.modulus
            self.relations[var] = rel
            if step.kind == "ram":
                e = [0] * nv
                e[var] = 1
                self.uniformizer = np.zeros(self.B, dtype=np.int64)
                self.uniformizer[self.index[tuple(e)]] = 1
        self.T = self._structure_tensor()

    def _weight(self, e):
        return sum(a * w for a, w in zip(e, self.var_weights))

    def _embed_prefix(self, prefix: "Model", vec):
        out = np.zeros(self.B, dtype=np.int64)
        for i in np.nonzero(vec)[0]:
            e = tuple(prefix.basis[int(i)]) + (0,) * (self.nv - prefix.nv)
            out[self.index[e]] = (out[self.index[e]] + vec[i]) % self.modulus
        return out

    def embed_from(self, prefix: "Model", vec):
        """Embed a vector of a prefix model (same K) into this model."""
        return self._embed_prefix(prefix, np.asarray(vec) % self.modulus)

    def _reduce_mono(self, e):
        if e in self._memo:
            return self._memo[e]
        out = np.zeros(self.B, dtype=np.int64)
        if e[0] >= self.degrees[0]:
            self._memo[e] = out
            return out
        top = None
        for i in range(self.nv - 1, 0, -1):
            if e[i] >= self.degrees[i]:
                top = i
                break
        if top is None:
            out[self.index[e]] = 1
            self._memo[e] = out
            return out
        base = list(e)
        base[top] -= self.degrees[top]
        for mono, c in self.relations[top].items():
            ee = tuple(a + b for a, b in zip(base, mono))
            out = (out - c * self._reduce_mono(ee)) % self.modulus
        self._memo[e] = out
        return out

    def _structure_tensor(self):
        B = self.B
        T = np.zeros((B, B, B), dtype=np.int64)
        for a in range(B):
            ea = self.basis[a]
            for b in range(a, B):
                eb = self.basis[b]
                v = self._reduce_mono(tuple(x + y for x, y in zip(ea, eb)))
                T[a, b] = v
                T[b, a] = v
        return T

    # arithmetic on dense vectors
    def one(self):
        v = np.zeros(self.B, dtype=np.int64)
        v[0] = 1 % self.modulus
        return v

    def scalar(self, k: int):
        return (self.one() * (k % self.modulus)) % self.modulus

    def mul(self, x, y):
        w = np.tensordot(y, self.T, axes=([0], [1])) % self.modulus
        return (x @ w) % self.modulus

    def mul_matrix(self, x):
        """Matrix M with M @ y = x*y."""
        return np.tensordot(x, self.T, axes=([0], [0])).T % self.modulus

    def pow(self, x, k: int):
        result = self.one()
        base = x % self.modulus
        while k:
            if k & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            k >>= 1
        return result

    def varpi(self):
        if self.equal_char:
            v = np.zeros(self.B, dtype=np.int64)
            e = [0] * self.nv
            e[0] = 1
            if self.K > 1:
                v[self.index[tuple(e)]] = 1
            return v
        return self.scalar(self.p)

    @property
    def unit_block(self):
        return [i for i, e in enumerate(self.basis) if self.weights[i] == 0]

    def residue_field(self) -> FiniteField:
        block = self.unit_block
        n = len(block)
        structure = np.zeros((n, n, n), dtype=np.int64)
        for i, a in enumerate(block):
            for j, b in enumerate(block):
                v = self.T[a, b]
                structure[i, j] = np.array([v[k] for k in block]) % self.p
        poly = None
        unram = [s for s in self.tower.steps if s.kind == "unram"]
        if n == 1:
            poly = [0, 1]
        elif len(unram) == 1:
            poly = [_residue_digit(c, self.p) for c in unram[0].coeffs] + [1]
        return _cached_field(self.p, structure.tobytes(), n, tuple(poly) if poly else None)

    def lift_residue(self, code: int):
        """Coordinate lift of a residue code into the unit block."""
        v = np.zeros(self.B, dtype=np.int64)
        block = self.unit_block
        for k, i in enumerate(block):
            v[i] = (code // self.p**k) % self.p
        return v

    def teichmuller(self, code: int):
        """Teichmuller lift modulo varpi^K by iterating x -> x^q."""
        q = self.p ** len(self.unit_block)
        x = self.lift_residue(code)
        for _ in range(4 * self.K + 8):
            y = self.pow(x, q)
            if np.array_equal(y, x):
                return x
            x = y
        raise AssertionError("Teichmuller iteration did not converge")

    def coefficient_vector(self, coeff):
        if coeff and coeff[0] == "-":
            return (-self.digits_to_vector(coeff[1])) % self.modulus
        return self.digits_to_vector(coeff)

    def digits_to_vector(self, digits):
        """Exact element sum tau(d_i) pi^i of this ring, reduced mod varpi^K."""
        acc = np.zeros(self.B, dtype=np.int64)
        power = self.one()
        for d in digits:
            if d:
                acc = (acc + self.mul(self.teichmuller(int(d)), power)) % self.modulus
            power = self.mul(power, self.uniformizer)
        return acc


def _residue_digit(coeff, p):
    if coeff and coeff[0] == "-":
        return (-_residue_digit(coeff[1], p)) % p
    return int(coeff[0]) if coeff else 0


@lru_cache(maxsize=None)
def _cached_field(p, structure_bytes, n, poly):
    structure = np.frombuffer(structure_bytes, dtype=np.int64).reshape(n, n, n)
    return FiniteField(p, structure, defining_poly=poly)


@lru_cache(maxsize=None)
def model_for(tower: Tower, K: int) -> Model:
    return Model(tower, K)


def lcm_list(values):
    out = 1
    for v in values:
        out = lcm(out, v)
    return out
