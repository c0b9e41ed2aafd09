"""Finite matrix groups over truncated rings: membership, point stabilizers, enumeration.

Matrices are numpy arrays of element codes of a carrier ring (a truncated
ring of integers or a truncated cyclic algebra).  A matrix is identified by
the integer key sum_k entry_k * N^(size-1-k) over its row-major entries, so
key order is the lexicographic order on entries.

Families:

* ``SL2D``: SL_2 over O_D/m_D^rho, membership by reduced norm 1.
* ``SU3_unram``, ``SU3_ram_odd``: 3x3 matrices g over O_L/m_L^rho with
  det g = 1 and ^S conj(g) g = 1, where (^S M)_ij = M_{4-j,4-i}.
* ``SU3_dyadic_small``: SL_2 over O_L/m_L^rho for even rho <= 2 i0.
* ``SU3_dyadic_large``: the dyadic integral-model equations at even rho > 2 i0.
* ``SL2_insep``: SL_2 over O_L/m_L^rho for the inseparable pair.

The internal family ``SU3_dyadic_integral`` uses the large-regime equations at
any even radius; it provides the integral points used for the degeneration
map and for lifting into the large regime.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import config, kernels
from .cyclic_algebra import CyclicAlgebra, CyclicAlgebraSpec, algebra_context
from .errors import (
    BadLevel,
    BudgetExceeded,
    IncompatibleLevels,
    IndexOutOfRange,
    RegimeMismatch,
    WrongShape,
)
from .quad_pair import QuadPair
from .trunc_ring import LocalFieldSpec, TruncRing

FAMILIES = ("SL2D", "SU3_unram", "SU3_ram_odd", "SU3_dyadic_small", "SU3_dyadic_large", "SL2_insep")
INTERNAL_FAMILIES = FAMILIES + ("SU3_dyadic_integral",)

BRUTE_MAX = 1 << 22
CHUNK = 1 << 16


# ---------------------------------------------------------------------------
# carrier rings as tables


class Scalars:
    """Table view of a finite ring used as matrix coefficients."""

    def __init__(self, source, conj=None):
        self.source = source
        if isinstance(source, CyclicAlgebra):
            self.level = source.level
            self.commutative = source.d == 1
            self.Q = source.QE
        else:
            self.level = source.radius
            self.commutative = True
            self.Q = source.Q
        self.N = source.N
        if source.add_table is None:
            raise BudgetExceeded(f"carrier ring of size {self.N} exceeds the table limit {config.TABLE_MAX}")
        self.add = np.ascontiguousarray(source.add_table, dtype=np.int32)
        self.mul = np.ascontiguousarray(source.mul_table, dtype=np.int32)
        self.neg = np.asarray(source.neg_table, dtype=np.int32)
        self.val = np.asarray(source.val_table, dtype=np.int64)
        self.one = int(source.one)
        self.zero = 0
        self.conj = np.arange(self.N, dtype=np.int32) if conj is None else np.asarray(conj, dtype=np.int32)
        self.sub = self.add[np.arange(self.N)[:, None], self.neg[None, :]]

    def truncation_to(self, low: "Scalars") -> np.ndarray:
        return _truncation_map(self.source, low.source)


def _truncation_map(high, low) -> np.ndarray:
    if isinstance(high, CyclicAlgebra):
        if not isinstance(low, CyclicAlgebra) or high.spec != low.spec or low.level > high.level:
            raise IncompatibleLevels("algebras do not match")
        shift = high.QE ** (high.R - low.R)
        return low._index(high.comps // shift)
    if not isinstance(low, TruncRing) or high.tower != low.tower or low.radius > high.radius:
        raise IncompatibleLevels("rings do not match")
    return np.arange(high.N, dtype=np.int64) // high.Q ** (high.radius - low.radius)


# ---------------------------------------------------------------------------
# groups


def _as_algebra_spec(carrier) -> CyclicAlgebraSpec:
    if isinstance(carrier, CyclicAlgebraSpec):
        return carrier
    if isinstance(carrier, LocalFieldSpec):
        return CyclicAlgebraSpec(carrier, 1, 0)
    raise RegimeMismatch("SL2D needs a local field or cyclic algebra carrier")


class LocalGroup:
    """A finite local group P_0^{0,rho} with its point stabilizers P_x^{0,rho}."""

    def __init__(
        self, family: str, carrier, radius: int, t_digits=None, _internal: bool = False, literal_bounds: bool = False
    ):
        if family not in INTERNAL_FAMILIES or (family == "SU3_dyadic_integral" and not _internal):
            raise RegimeMismatch(f"unknown family {family!r}")
        self.family = family
        self.radius = radius
        self.t_digits = tuple(t_digits) if t_digits is not None else None
        self.literal_bounds = literal_bounds
        self.bound_shift = Fraction(0)
        if radius < 1:
            raise RegimeMismatch("radius must be positive")
        if family == "SL2D":
            spec = _as_algebra_spec(carrier)
            if radius % spec.degree:
                raise BadLevel(f"level {radius} is not a multiple of {spec.degree}")
            self.carrier = spec
            self.algebra = algebra_context(spec, radius)
            self.S = Scalars(self.algebra)
            self.n = 2
            self.kind = "sl2"
            self._nrd_setup()
        else:
            if not isinstance(carrier, QuadPair):
                raise RegimeMismatch(f"{family} needs a quadratic pair carrier")
            self.carrier = pair = carrier
            expected = {
                "SU3_unram": ("unramified",),
                "SU3_ram_odd": ("ramified_odd",),
                "SU3_dyadic_small": ("ramified_dyadic",),
                "SU3_dyadic_large": ("ramified_dyadic",),
                "SU3_dyadic_integral": ("ramified_dyadic",),
                "SL2_insep": ("inseparable",),
            }[family]
            if pair.kind not in expected:
                raise RegimeMismatch(f"{family} does not accept a {pair.kind} pair")
            if family.startswith("SU3_dyadic") and not _internal:
                if radius % 2:
                    raise RegimeMismatch("dyadic local models exist for even radius only")
                small = radius <= 2 * pair.i0
                if family == "SU3_dyadic_small" and not small:
                    raise RegimeMismatch(f"radius {radius} > 2 i0 = {2 * pair.i0}: use SU3_dyadic_large")
                if family == "SU3_dyadic_large" and small:
                    raise RegimeMismatch(f"radius {radius} <= 2 i0 = {2 * pair.i0}: use SU3_dyadic_small")
            ctx = pair.conj_context(radius)
            self.ring = ctx.ring
            self.S = Scalars(ctx.ring, ctx.table)
            if family in ("SU3_dyadic_small", "SL2_insep"):
                self.n = 2
                self.kind = "sl2"
            elif family in ("SU3_unram", "SU3_ram_odd"):
                self.n = 3
                self.kind = "su3"
            else:
                self.n = 3
                self.kind = "integral"
                if not literal_bounds:
                    self.bound_shift = 2 * Fraction(pair.gamma) - pair.i0
                self._integral_setup()
        self.N = self.S.N
        if float(self.N) ** (self.n * self.n) >= 2.0**62:
            raise BudgetExceeded("matrix keys do not fit in 64 bits")
        self._keys = None
        self._mats = None
        self._gens = None
        self._px_cache = {}

    # ----- setup helpers
    def _nrd_setup(self):
        A = self.algebra
        if A.d == 1:
            self._phi = None
            return
        E = A.E
        if E.add_table is None:
            raise BudgetExceeded("unramified coefficient ring too large for tables")
        self._E_add = np.ascontiguousarray(E.add_table, dtype=np.int32)
        self._E_mul = np.ascontiguousarray(E.mul_table, dtype=np.int32)
        self._E_neg = np.asarray(E.neg_table, dtype=np.int32)
        self._E_one = E.one
        self._phi = np.array([A.phi(a) for a in range(A.N)], dtype=np.int32).reshape(A.N, A.d, A.d)

    def _integral_setup(self):
        """Diagonal D = diag(1, beta^i0, 1) and the reduced trace table Tr/beta^i0."""
        pair = self.carrier
        i0 = pair.i0
        rho = self.radius
        hi = rho + 2 * i0
        if hi > pair.max_radius:
            raise BudgetExceeded(f"the reduced trace at radius {rho} needs precision {hi}")
        ring_hi = pair.ring(hi)
        ctx_hi = pair.conj_context(hi)
        if self.t_digits is None:
            t_hi = pair.t_code(hi)
        else:
            t_hi = ring_hi.from_digits(self.t_digits)
            if ring_hi.val(t_hi) != 1:
                raise RegimeMismatch("t must be a uniformizer")
        beta_hi = ctx_hi.norm_code(t_hi)
        beta_pow_hi = ring_hi.pow(beta_hi, i0)
        R = self.ring
        self.beta_pow = ring_hi.truncate(beta_pow_hi, rho)
        self.t_code = ring_hi.truncate(t_hi, rho)
        unit = R.from_digits(ring_hi.digits(beta_pow_hi)[2 * i0 :])
        unit_inv = R.inv(unit)
        table = np.empty(R.N, dtype=np.int32)
        shift = R.Q ** (2 * i0)
        for x in range(R.N):
            y = ctx_hi.trace_code(x * shift)
            digs = ring_hi.digits(y)
            if any(digs[: 2 * i0]):
                raise AssertionError("trace below the expected valuation")
            table[x] = R.mul(R.from_digits(digs[2 * i0 :]), unit_inv)
        self.redtrace = table

    # ----- vectorized arithmetic
    def matmul(self, A, B):
        return kernels.batch_matmul(A, B, self.S.add, self.S.mul, self.S.zero)

    def keys_of(self, mats) -> np.ndarray:
        return kernels.matrix_keys(mats, self.N)

    def mats_of(self, keys) -> np.ndarray:
        return kernels.keys_to_matrices(keys, self.N, self.n)

    def identity(self) -> np.ndarray:
        I = np.zeros((self.n, self.n), dtype=np.int32)
        np.fill_diagonal(I, self.S.one)
        return I

    def _det2(self, g):
        S = self.S
        return S.sub[S.mul[g[:, 0, 0], g[:, 1, 1]], S.mul[g[:, 0, 1], g[:, 1, 0]]]

    def _det3(self, g):
        S = self.S
        m, a, s = S.mul, S.add, S.sub

        def minor(r1, r2, c1, c2):
            return s[m[g[:, r1, c1], g[:, r2, c2]], m[g[:, r1, c2], g[:, r2, c1]]]

        t0 = m[g[:, 0, 0], minor(1, 2, 1, 2)]
        t1 = m[g[:, 0, 1], minor(1, 2, 0, 2)]
        t2 = m[g[:, 0, 2], minor(1, 2, 0, 1)]
        return a[s[t0, t1], t2]

    def _nrd(self, g):
        """Reduced norm (as an E code) of a batch of 2x2 algebra matrices."""
        d = self.algebra.d
        M = g.shape[0]
        big = np.zeros((M, 2 * d, 2 * d), dtype=np.int32)
        for a in range(2):
            for b in range(2):
                big[:, a * d : (a + 1) * d, b * d : (b + 1) * d] = self._phi[g[:, a, b]]
        n = 2 * d
        add, mul, neg = self._E_add, self._E_mul, self._E_neg
        dp = {0: np.full(M, self._E_one, dtype=np.int32)}
        for i in range(n):
            nxt = {}
            for mask, val in dp.items():
                for c in range(n):
                    if mask >> c & 1:
                        continue
                    term = mul[val, big[:, i, c]]
                    if bin(mask >> (c + 1)).count("1") % 2:
                        term = neg[term]
                    key = mask | (1 << c)
                    nxt[key] = add[nxt[key], term] if key in nxt else term
            dp = nxt
        return dp[(1 << n) - 1]

    def _sbar(self, g):
        """^S conj(g): entry (i, j) is conj(g[n-1-j, n-1-i])."""
        return self.S.conj[g[:, ::-1, ::-1].transpose(0, 2, 1)]

    def member_mask(self, mats) -> np.ndarray:
        g = np.asarray(mats, dtype=np.int32)
        if g.ndim == 2:
            g = g[None]
        S = self.S
        if self.kind == "sl2":
            if self.family == "SL2D" and self._phi is not None:
                return self._nrd(g) == self._E_one
            return self._det2(g) == S.one
        ok = self._det3(g) == S.one
        sb = self._sbar(g)
        if self.kind == "su3":
            prod = self.matmul(sb, g)
            return ok & np.all(prod == self.identity()[None], axis=(1, 2))
        D = self.identity()
        D[1, 1] = self.beta_pow
        sbD = sb.copy()
        sbD[:, :, 1] = S.mul[sb[:, :, 1], self.beta_pow]
        prod = self.matmul(sbD, g)
        ok &= np.all(prod == D[None], axis=(1, 2))
        c = S.conj
        tr1 = self.redtrace[S.mul[c[g[:, 2, 0]], g[:, 0, 0]]]
        n1 = S.neg[S.mul[c[g[:, 1, 0]], g[:, 1, 0]]]
        tr2 = self.redtrace[S.mul[c[g[:, 2, 2]], g[:, 0, 2]]]
        n2 = S.neg[S.mul[c[g[:, 1, 2]], g[:, 1, 2]]]
        return ok & (tr1 == n1) & (tr2 == n2)

    # ----- point stabilizers
    def bound_matrix(self, x: int):
        """Valuation lower bounds (as Fractions) defining P_x.

        In the dyadic integral coordinates the middle row and column are
        rescaled by t^(-i0) and t^(i0), so the stabilizer bounds pick up the
        shift 2*gamma - i0 (in units of the valuation of t).  With
        ``literal_bounds`` the unshifted pattern is used instead.
        """
        self._check_x(x)
        x = Fraction(x)
        if self.n == 2:
            return [[Fraction(0), -x], [x, Fraction(0)]]
        h = x / 2
        s = self.bound_shift
        return [[Fraction(0), -h - s, -x], [h + s, Fraction(0), -h + s], [x, h - s, Fraction(0)]]

    def _check_x(self, x: int):
        if not isinstance(x, (int, np.integer)) or abs(int(x)) > self.radius:
            raise IndexOutOfRange(f"vertex index {x} outside [-{self.radius}, {self.radius}]")

    def int_bounds(self, x: int) -> np.ndarray:
        return np.array([[math.ceil(b) for b in row] for row in self.bound_matrix(x)], dtype=np.int64)

    def px_mask(self, mats, x: int) -> np.ndarray:
        g = np.asarray(mats, dtype=np.int32)
        if g.ndim == 2:
            g = g[None]
        B = self.int_bounds(x)
        return np.all(self.S.val[g] >= B[None], axis=(1, 2))

    # ----- enumeration
    def step(self) -> int:
        if self.family == "SL2D":
            return self.algebra.d
        if self.kind == "integral":
            return 2
        return 1

    def predecessor(self):
        low = self.radius - self.step()
        if low < 1:
            return None
        fam = "SU3_dyadic_integral" if self.kind == "integral" else self.family
        carrier = self.carrier
        return group_context(fam, carrier, low, self.t_digits, True)

    @property
    def keys(self) -> np.ndarray:
        if self._keys is None:
            self._enumerate()
        return self._keys

    @property
    def mats(self) -> np.ndarray:
        if self._mats is None:
            self._mats = self.mats_of(self.keys)
        return self._mats

    def order(self) -> int:
        return len(self.keys)

    def _enumerate(self):
        total = self.N ** (self.n * self.n)
        pred = self.predecessor()
        if total <= BRUTE_MAX or pred is None:
            if total > 4 * BRUTE_MAX:
                raise BudgetExceeded(f"brute force over {total} matrices")
            self._keys = self._brute_force()
        else:
            self._keys = self._lift_from(pred)
        if len(self._keys) > config.budget():
            raise BudgetExceeded(f"group of order {len(self._keys)} exceeds the budget {config.budget()}")

    def _brute_force(self) -> np.ndarray:
        total = self.N ** (self.n * self.n)
        found = []
        for start in range(0, total, CHUNK):
            keys = np.arange(start, min(total, start + CHUNK), dtype=np.int64)
            mats = self.mats_of(keys)
            found.append(keys[self.member_mask(mats)])
        return np.concatenate(found)

    def _corrections(self, pred) -> tuple:
        """Truncation map, a section of it, and the codes reducing to zero."""
        trunc = self.S.truncation_to(pred.S)
        _, section = np.unique(trunc, return_index=True)
        ideal = np.nonzero(trunc == 0)[0].astype(np.int32)
        return trunc, section.astype(np.int32), ideal

    def _fiber(self, base_mat, ideal, first_only=False):
        """Members of the form base + E with every entry of E in the ideal."""
        k = len(ideal)
        size = self.n * self.n
        total = k**size
        if total > 16 * BRUTE_MAX:
            raise BudgetExceeded(f"fiber search over {total} candidates")
        found = []
        flat_base = base_mat.reshape(-1)
        for start in range(0, total, CHUNK):
            idx = np.arange(start, min(total, start + CHUNK), dtype=np.int64)
            digits = np.empty((len(idx), size), dtype=np.int64)
            rest = idx.copy()
            for pos in range(size - 1, -1, -1):
                digits[:, pos] = rest % k
                rest //= k
            cand = self.S.add[flat_base[None, :], ideal[digits]].reshape(-1, self.n, self.n)
            ok = self.member_mask(cand)
            if ok.any():
                hits = cand[ok]
                if first_only:
                    return hits[:1]
                found.append(hits)
        if not found:
            return np.zeros((0, self.n, self.n), dtype=np.int32)
        return np.concatenate(found)

    def _lift_from(self, pred) -> np.ndarray:
        trunc, section, ideal = self._corrections(pred)
        kernel = self._fiber(self.identity(), ideal)
        est = pred.order() * len(kernel)
        if est > config.budget():
            raise BudgetExceeded(f"group of order {est} exceeds the budget {config.budget()}")
        low_mats = pred.mats
        gens_idx = pred.generators()
        gen_lifts = []
        for gi in gens_idx:
            hit = self._fiber(section[low_mats[gi]], ideal, first_only=True)
            if len(hit) == 0:
                return self._lift_by_fibers(pred, section, ideal)
            gen_lifts.append(hit[0])
        lifts = self._lift_all(pred, gens_idx, gen_lifts)
        parts = []
        chunk = max(1, CHUNK // max(1, len(kernel)))
        for start in range(0, len(lifts), chunk):
            block = lifts[start : start + chunk]
            prods = self.matmul(np.repeat(block, len(kernel), axis=0), np.tile(kernel, (len(block), 1, 1)))
            parts.append(self.keys_of(prods))
        keys = np.unique(np.concatenate(parts))
        if len(keys) != est:
            raise AssertionError("lifted cosets are not disjoint")
        return keys

    def _lift_all(self, pred, gens_idx, gen_lifts) -> np.ndarray:
        """A lift of every element of pred, by breadth-first search over generators."""
        M = pred.order()
        lifts = np.zeros((M, self.n, self.n), dtype=np.int32)
        seen = np.zeros(M, dtype=bool)
        start = pred.index_of(pred.identity()[None])[0]
        lifts[start] = self.identity()
        seen[start] = True
        frontier = np.array([start])
        low_mats = pred.mats
        while len(frontier):
            new_frontier = []
            for gi, glift in zip(gens_idx, gen_lifts):
                prod_low = pred.matmul(low_mats[frontier], low_mats[gi][None])
                idx = pred.index_of(prod_low)
                fresh = ~seen[idx]
                if not fresh.any():
                    continue
                idx_f, uniq = np.unique(idx[fresh], return_index=True)
                src = frontier[fresh][uniq]
                lifts[idx_f] = self.matmul(lifts[src], glift[None])
                seen[idx_f] = True
                new_frontier.append(idx_f)
            frontier = np.unique(np.concatenate(new_frontier)) if new_frontier else np.array([], dtype=np.int64)
        if not seen.all():
            raise AssertionError("generators do not generate the lower group")
        return lifts

    def _lift_by_fibers(self, pred, section, ideal) -> np.ndarray:
        parts = [self.keys_of(self._fiber(section[g], ideal)) for g in pred.mats]
        return np.unique(np.concatenate(parts))

    def index_of(self, mats) -> np.ndarray:
        """Positions of matrices in the sorted element list, -1 if absent."""
        keys = self.keys_of(mats)
        pos = np.searchsorted(self.keys, keys)
        pos = np.minimum(pos, len(self.keys) - 1)
        return np.where(self.keys[pos] == keys, pos, -1)

    def generators(self):
        """Indices of a small generating set (deterministic seeded choice)."""
        if self._gens is None:
            rng = np.random.default_rng(0)
            order = rng.permutation(self.order())
            gens = []
            reached = self._closure([])
            for cand in order:
                if reached.all():
                    break
                if reached[cand]:
                    continue
                gens.append(int(cand))
                reached = self._closure(gens)
            self._gens = gens
        return self._gens

    def _closure(self, gens) -> np.ndarray:
        """Mask of the subgroup generated by the given element indices."""
        mats = self.mats
        reached = np.zeros(self.order(), dtype=bool)
        start = self.index_of(self.identity()[None])[0]
        reached[start] = True
        frontier = np.array([start])
        while len(frontier):
            nxt = []
            for gi in gens:
                idx = self.index_of(self.matmul(mats[frontier], mats[gi][None]))
                if np.any(idx < 0):
                    raise AssertionError("element set is not closed under multiplication")
                fresh = idx[~reached[idx]]
                if len(fresh):
                    fresh = np.unique(fresh)
                    reached[fresh] = True
                    nxt.append(fresh)
            frontier = np.concatenate(nxt) if nxt else np.array([], dtype=np.int64)
        return reached

    def closure_certificate(self) -> dict:
        """Evidence that the element set is a group: S*T inside S and S = <T>."""
        mats = self.mats
        gens = self.generators()
        closed = True
        for gi in gens:
            for start in range(0, self.order(), CHUNK):
                idx = self.index_of(self.matmul(mats[start : start + CHUNK], mats[gi][None]))
                closed &= bool(np.all(idx >= 0))
        generated = bool(self._closure(gens).all())
        return {"order": self.order(), "generators": len(gens), "closed": closed, "generated": generated}

    def px_indices(self, x: int) -> np.ndarray:
        if x not in self._px_cache:
            self._px_cache[x] = np.nonzero(self.px_mask(self.mats, x))[0]
        return self._px_cache[x]

    # ----- single elements
    def contains(self, g) -> bool:
        g = self.coerce(g)
        return bool(self.member_mask(g[None])[0])

    def coerce(self, g) -> np.ndarray:
        try:
            arr = np.array([[_entry_code(e) for e in row] for row in g], dtype=np.int64)
        except TypeError as exc:
            raise WrongShape("matrix must be a nested list") from exc
        if arr.shape != (self.n, self.n):
            raise WrongShape(f"expected a {self.n}x{self.n} matrix, got shape {arr.shape}")
        if arr.min() < 0 or arr.max() >= self.N:
            raise WrongShape("entry code out of range")
        return arr.astype(np.int32)

    def mul(self, g, h) -> np.ndarray:
        return self.matmul(np.asarray(g)[None], np.asarray(h)[None])[0]

    def inverse(self, g) -> np.ndarray:
        g = np.asarray(g, dtype=np.int32)
        if self.S.commutative:
            return self._adjugate(g)
        power = g
        ident = self.identity()
        prev = ident
        while not np.array_equal(power, ident):
            prev = power
            power = self.mul(power, g)
        return prev

    def _adjugate(self, g):
        S = self.S
        if self.n == 2:
            return np.array([[g[1, 1], S.neg[g[0, 1]]], [S.neg[g[1, 0]], g[0, 0]]], dtype=np.int32)
        out = np.zeros((3, 3), dtype=np.int32)
        for i in range(3):
            for j in range(3):
                rows = [r for r in range(3) if r != j]
                cols = [c for c in range(3) if c != i]
                a = S.mul[g[rows[0], cols[0]], g[rows[1], cols[1]]]
                b = S.mul[g[rows[0], cols[1]], g[rows[1], cols[0]]]
                cof = S.sub[a, b]
                out[i, j] = S.neg[cof] if (i + j) % 2 else cof
        return out

    def key(self, g) -> int:
        return int(self.keys_of(np.asarray(g)[None])[0])

    def __repr__(self):
        return f"LocalGroup({self.family}, radius={self.radius}, n={self.n}, ring size={self.N})"


def _entry_code(e):
    if hasattr(e, "code"):
        return int(e.code)
    if hasattr(e, "index"):
        return int(e.index)
    return int(e)


@lru_cache(maxsize=None)
def group_context(family, carrier, radius, t_digits=None, internal=False, literal_bounds=False) -> LocalGroup:
    G = LocalGroup(family, carrier, radius, t_digits, _internal=internal, literal_bounds=literal_bounds)
    if literal_bounds:
        # same element set as the default group
        G._keys = group_context(family, carrier, radius, t_digits, internal).keys
    return G


# ---------------------------------------------------------------------------
# public API


def make_group(family: str, carrier, radius: int, t_digits=None, literal_bounds: bool = False) -> LocalGroup:
    if family not in FAMILIES:
        raise RegimeMismatch(f"unknown family {family!r}")
    if family.startswith("SU3_dyadic") and isinstance(carrier, QuadPair) and carrier.kind == "ramified_dyadic":
        if not math.isfinite(carrier.i0):
            raise RegimeMismatch("dyadic families need a finite i0")
    t = tuple(t_digits) if t_digits is not None else None
    return group_context(family, carrier, radius, t, False, literal_bounds)


def dyadic_family(pair: QuadPair, radius: int) -> str:
    """The dyadic family appropriate for an even radius."""
    return "SU3_dyadic_small" if radius <= 2 * pair.i0 else "SU3_dyadic_large"


def contains(G: LocalGroup, g) -> bool:
    return G.contains(g)


def in_Px(G: LocalGroup, g, x: int) -> bool:
    G._check_x(x)
    g = G.coerce(g)
    return bool(G.px_mask(g[None], x)[0])


def enumerate_group(G: LocalGroup):
    for m in G.mats:
        yield m


def group_order(G: LocalGroup) -> int:
    return G.order()


@dataclass
class NElements:
    """Standard elements of N with their affine action nu on vertex positions."""

    group: LocalGroup
    m_std: np.ndarray
    units: list = field(repr=False)

    def h_element(self, unit: int) -> np.ndarray:
        G = self.group
        S = G.S
        inv = _ring_inverse(G, unit)
        if G.n == 2:
            return np.array([[unit, 0], [0, inv]], dtype=np.int32)
        cbar = S.conj[unit]
        mid = S.mul[inv, cbar]
        return np.array([[unit, 0, 0], [0, mid, 0], [0, 0, _ring_inverse(G, cbar)]], dtype=np.int32)

    def m_element(self, unit: int) -> np.ndarray:
        G = self.group
        S = G.S
        inv = _ring_inverse(G, unit)
        if G.n == 2:
            return np.array([[0, S.neg[unit]], [inv, 0]], dtype=np.int32)
        cbar = S.conj[unit]
        mid = S.neg[S.mul[inv, cbar]]
        return np.array([[0, 0, unit], [0, mid, 0], [_ring_inverse(G, cbar), 0, 0]], dtype=np.int32)

    def kind_of(self, g) -> str:
        g = np.asarray(g)
        n = g.shape[0]
        off = [(i, j) for i in range(n) for j in range(n) if i != j]
        anti = [(i, j) for i in range(n) for j in range(n) if i + j != n - 1]
        if all(g[i, j] == 0 for i, j in off):
            return "H"
        if all(g[i, j] == 0 for i, j in anti):
            return "M"
        raise ValueError("not an element of N")

    def nu(self, g):
        """Affine map of the real line attached to g in N."""
        if self.kind_of(g) == "H":
            return lambda x: x
        return lambda x: -x


def _ring_inverse(G: LocalGroup, unit: int) -> int:
    S = G.S
    hits = np.nonzero(S.mul[unit] == S.one)[0]
    if len(hits) == 0:
        raise ValueError("not a unit")
    return int(hits[0])


def standard_N_elements(G: LocalGroup) -> NElements:
    S = G.S
    units = [int(c) for c in np.nonzero(S.val == 0)[0]]
    if G.n == 2:
        m = np.array([[0, S.neg[S.one]], [S.one, 0]], dtype=np.int32)
    else:
        m = np.array([[0, 0, S.one], [0, S.neg[S.one], 0], [S.one, 0, 0]], dtype=np.int32)
    return NElements(G, m, units)


def _corner(mats) -> np.ndarray:
    return np.ascontiguousarray(mats[:, [0, 2]][:, :, [0, 2]])


def truncate_elem(G_high: LocalGroup, g, G_low: LocalGroup) -> np.ndarray:
    """Image of g under the truncation P_0^{0,rho'} -> P_0^{0,rho}."""
    return truncate_batch(G_high, np.asarray(g)[None], G_low)[0]


def truncate_batch(G_high: LocalGroup, mats, G_low: LocalGroup) -> np.ndarray:
    if G_low.radius > G_high.radius or G_low.carrier != G_high.carrier:
        raise IncompatibleLevels("target must be a lower truncation of the same carrier")
    mats = np.asarray(mats, dtype=np.int32)
    if G_high.n == 3 and G_low.n == 2:
        if G_high.kind != "integral" or G_low.family != "SU3_dyadic_small":
            raise IncompatibleLevels("corner map only goes from dyadic integral points to the small regime")
        mats = _corner(mats)
    elif G_high.n != G_low.n or (G_high.kind == "integral") != (G_low.kind == "integral"):
        raise IncompatibleLevels(f"cannot truncate {G_high.family} to {G_low.family}")
    trunc = G_high.S.truncation_to(G_low.S).astype(np.int32)
    return trunc[mats]


def integral_points(pair: QuadPair, s: int) -> LocalGroup:
    """Points of the dyadic integral model over O_K/m_K^s, as 3x3 matrices over O_L/m_L^2s."""
    if pair.kind != "ramified_dyadic":
        raise RegimeMismatch("integral points are defined for dyadic pairs")
    return group_context("SU3_dyadic_integral", pair, 2 * s, None, True)


def su3_degeneration(pair: QuadPair, s: int) -> dict:
    """Corner map from integral points onto SL_2(O_L/m_L^2s), for 2s <= 2 i0."""
    if pair.kind != "ramified_dyadic" or 2 * s > 2 * pair.i0:
        raise RegimeMismatch("the degeneration map needs a dyadic pair with 2s <= 2 i0")
    X = integral_points(pair, s)
    SL2 = make_group("SU3_dyadic_small", pair, 2 * s)
    corners = _corner(X.mats)
    image = np.unique(SL2.keys_of(corners))
    kernel = X.mats[np.all(corners == SL2.identity()[None], axis=(1, 2))]
    return {
        "source_order": X.order(),
        "image_order": len(image),
        "target_order": SL2.order(),
        "surjective": bool(np.array_equal(image, SL2.keys)),
        "kernel": kernel,
        "image_keys": image,
    }


# ---------------------------------------------------------------------------
# kernel spaces of the odd ramified surjectivity argument


def _additive_coordinates(ring: TruncRing):
    """F_p-coordinates for a ring of characteristic p: (basis codes, code -> vector)."""
    p = ring.p if hasattr(ring, "p") else ring.tower.p
    if ring.characteristic() != p:
        raise RegimeMismatch("additive coordinates need a ring of prime characteristic")
    add = ring.add_table
    span = {0: ()}
    basis = []
    for c in range(ring.N):
        if c in span:
            continue
        basis.append(c)
        new = {}
        for code, vec in span.items():
            acc = code
            for k in range(p):
                new[acc] = vec + (k,)
                acc = int(add[acc, c])
        span = new
    coords = np.zeros((ring.N, len(basis)), dtype=np.int64)
    for code, vec in span.items():
        coords[code] = vec
    return basis, coords


def _space_dimension(ring: TruncRing, conj, sign: int, p: int) -> int:
    """Dimension over F_p of {g in M_3(ring) : ^S conj(g) + sign*g = 0, tr g = 0}."""
    basis, coords = _additive_coordinates(ring)
    k = len(basis)
    n = 3
    size = n * n * k
    rows = []
    # one block of k equations per entry (i, j) of ^S conj(g) + sign * g
    conj_mat = np.array([coords[conj[b]] for b in basis], dtype=np.int64).T  # k x k
    eye = np.eye(k, dtype=np.int64)
    for i in range(n):
        for j in range(n):
            block = np.zeros((k, size), dtype=np.int64)
            si, sj = n - 1 - j, n - 1 - i
            src = (si * n + sj) * k
            dst = (i * n + j) * k
            block[:, src : src + k] += conj_mat
            block[:, dst : dst + k] += sign * eye
            rows.append(block % p)
    trace = np.zeros((k, size), dtype=np.int64)
    for i in range(n):
        trace[:, (i * n + i) * k : (i * n + i + 1) * k] += eye
    rows.append(trace)
    from .linalg_fp import rank

    return size - rank(np.vstack(rows), p)


def odd_kernel_dimensions(pair: QuadPair) -> dict:
    """Dimensions of the three kernel spaces for an odd ramified pair.

    ``composite``: ^S conj(g) + g = 0, tr g = 0 over O_L/m_L^2;
    ``first``: ^S g = g, tr g = 0 over the residue field;
    ``second``: ^S g + g = 0, tr g = 0 over the residue field.
    """
    if pair.kind != "ramified_odd":
        raise RegimeMismatch("the kernel identity concerns odd ramified pairs")
    p = pair.p
    ctx2 = pair.conj_context(2)
    ctx1 = pair.conj_context(1)
    ident1 = np.arange(ctx1.ring.N)
    return {
        "composite": _space_dimension(ctx2.ring, ctx2.table, 1, p),
        "first": _space_dimension(ctx1.ring, ident1, -1, p),
        "second": _space_dimension(ctx1.ring, ident1, 1, p),
        "p": p,
    }
