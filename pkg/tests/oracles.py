"""Independent reference constructions used to cross-check the library.

Nothing here imports btlab: rings are built from plain integer and
polynomial arithmetic and compared to library rings through a brute-force
isomorphism search on operation tables.
"""

from __future__ import annotations

import itertools

import numpy as np


class TableRing:
    """A finite unital ring given by addition and multiplication tables."""

    def __init__(self, add, mul, one, conj=None):
        self.add = np.asarray(add, dtype=np.int64)
        self.mul = np.asarray(mul, dtype=np.int64)
        self.N = self.add.shape[0]
        self.one = int(one)
        self.zero = int(np.nonzero(np.all(self.add == np.arange(self.N)[None, :], axis=1))[0][0])
        self.conj = None if conj is None else np.asarray(conj, dtype=np.int64)

    def characteristic(self):
        acc, k = self.one, 1
        while acc != self.zero:
            acc = int(self.add[acc, self.one])
            k += 1
        return k


def from_elements(elems, add, mul, one, conj=None):
    """Tables from a list of hashable elements and python operations."""
    index = {e: i for i, e in enumerate(elems)}
    n = len(elems)
    A = np.zeros((n, n), dtype=np.int64)
    M = np.zeros((n, n), dtype=np.int64)
    for i, a in enumerate(elems):
        for j, b in enumerate(elems):
            A[i, j] = index[add(a, b)]
            M[i, j] = index[mul(a, b)]
    c = None if conj is None else [index[conj(e)] for e in elems]
    return TableRing(A, M, index[one], c)


def integers_mod(n):
    return from_elements(list(range(n)), lambda a, b: (a + b) % n, lambda a, b: a * b % n, 1)


# ----- F_p[t]/t^r with coefficient tuples


def _poly_mul(a, b, p, r):
    out = [0] * r
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b[: r - i]):
                out[i + j] = (out[i + j] + x * y) % p
    return tuple(out)


def truncated_poly_ring(p, r, conj_image_of_t=None):
    """F_p[t]/t^r, optionally with the automorphism t -> conj_image_of_t."""
    elems = list(itertools.product(range(p), repeat=r))
    add = lambda a, b: tuple((x + y) % p for x, y in zip(a, b))
    mul = lambda a, b: _poly_mul(a, b, p, r)
    one = tuple([1] + [0] * (r - 1))
    conj = None
    if conj_image_of_t is not None:
        img = tuple(conj_image_of_t)

        def conj(a):
            acc = tuple([0] * r)
            power = one
            for c in a:
                acc = add(acc, tuple(c * x % p for x in power))
                power = mul(power, img)
            return acc

    return from_elements(elems, add, mul, one, conj)


def dyadic_equal_char_ring(i, r):
    """O_L/m_L^r for L = F_2((X))[t]/(t^2 - X^i t + X), with its conjugation.

    In characteristic 2, X = t^2 + X^i t, so O_L = F_2[[t]]; X is found as a
    fixed point and conjugation sends t to t + X^i.
    """
    one = tuple([1] + [0] * (r - 1))
    t = tuple([0, 1] + [0] * (r - 2)) if r >= 2 else (0,)
    t2 = _poly_mul(t, t, 2, r)
    X = tuple([0] * r)
    for _ in range(r + 1):
        alpha = one
        for _ in range(i):
            alpha = _poly_mul(alpha, X, 2, r)
        X = tuple((a + b) % 2 for a, b in zip(t2, _poly_mul(alpha, t, 2, r)))
    alpha = one
    for _ in range(i):
        alpha = _poly_mul(alpha, X, 2, r)
    return truncated_poly_ring(2, r, tuple((a + b) % 2 for a, b in zip(t, alpha)))


def inseparable_ring(r):
    """O_L/m_L^r for L = F_2((sqrt X)): F_2[t]/t^r with trivial conjugation."""
    return truncated_poly_ring(2, r, tuple([0, 1] + [0] * (r - 2)) if r >= 2 else (0,))


# ----- Z_p[T]/(E(T)) modulo T^r


def eisenstein_quotient(p, eisenstein, r):
    """Z_p[T]/(E) modulo T^r, built as a quotient of (Z/p^s)[T]/(E)."""
    e = len(eisenstein)
    s = -(-r // e) + 1
    mod = p**s
    elems = list(itertools.product(range(mod), repeat=e))

    def mul(a, b):
        prod = [0] * (2 * e - 1)
        for i, x in enumerate(a):
            for j, y in enumerate(b):
                prod[i + j] += x * y
        for k in range(2 * e - 2, e - 1, -1):
            c = prod[k]
            prod[k] = 0
            for i, ci in enumerate(eisenstein):
                prod[k - e + i] -= c * ci
        return tuple(x % mod for x in prod[:e])

    add = lambda a, b: tuple((x + y) % mod for x, y in zip(a, b))
    one = tuple([1] + [0] * (e - 1))
    T = tuple([0, 1] + [0] * (e - 2)) if e > 1 else (mod - eisenstein[0] % mod,)
    Tr = one
    for _ in range(r):
        Tr = mul(Tr, T)
    ideal = {mul(Tr, x) for x in elems}
    reps, cls = [], {}
    for x in elems:
        if x in cls:
            continue
        for y in ideal:
            cls[add(x, y)] = len(reps)
        reps.append(x)
    n = len(reps)
    A = np.zeros((n, n), dtype=np.int64)
    M = np.zeros((n, n), dtype=np.int64)
    for i, a in enumerate(reps):
        for j, b in enumerate(reps):
            A[i, j] = cls[add(a, b)]
            M[i, j] = cls[mul(a, b)]
    return TableRing(A, M, cls[one])


# ----- finite fields F_{2^k} as bit vectors


def gf2_mul(a, b, modulus, k):
    out = 0
    while b:
        if b & 1:
            out ^= a
        b >>= 1
        a <<= 1
        if a >> k & 1:
            a ^= modulus
    return out


def gf2_field(k, modulus):
    q = 1 << k
    mul = np.array([[gf2_mul(a, b, modulus, k) for b in range(q)] for a in range(q)], dtype=np.int64)
    add = np.array([[a ^ b for b in range(q)] for a in range(q)], dtype=np.int64)
    return add, mul


def cyclic_algebra_level2(d, hasse, k, modulus):
    """O_D/m_D^2 = F_q + F_q u with u x = x^(2^hasse) u and u^2 = 0, q = 2^k (d = k)."""
    q = 1 << k
    fadd, fmul = gf2_field(k, modulus)

    def frob(x, times):
        for _ in range(times):
            x = int(fmul[x, x])
        return x

    elems = [(a, b) for a in range(q) for b in range(q)]
    add = lambda x, y: (x[0] ^ y[0], x[1] ^ y[1])

    def mul(x, y):
        a0, a1 = x
        b0, b1 = y
        return (int(fmul[a0, b0]), int(fmul[a0, b1]) ^ int(fmul[a1, frob(b0, hasse)]))

    return from_elements(elems, add, mul, (1, 0))


# ----- brute-force isomorphism search


def _span(S: TableRing, seeds):
    cur = np.unique(np.array([S.zero, S.one] + list(seeds)))
    while True:
        nxt = np.union1d(np.unique(S.add[np.ix_(cur, cur)]), np.unique(S.mul[np.ix_(cur, cur)]))
        nxt = np.union1d(nxt, cur)
        if len(nxt) == len(cur):
            return cur
        cur = nxt


def _generators(S: TableRing):
    """Small generating set (greedy by span size) with a derivation of every element."""
    gens = []
    span = _span(S, gens)
    while len(span) < S.N:
        rest = np.setdiff1d(np.arange(S.N), span)
        best = max(rest, key=lambda c: (len(_span(S, gens + [int(c)])), -int(c)))
        gens.append(int(best))
        span = _span(S, gens)
    recipe = {S.zero: ("zero",), S.one: ("one",)}
    order = [S.zero, S.one]
    for k, g in enumerate(gens):
        if g not in recipe:
            recipe[g] = ("gen", k)
            order.append(g)
    changed = True
    while changed:
        changed = False
        for a in list(order):
            for b in list(order):
                for op, table in (("add", S.add), ("mul", S.mul)):
                    c = int(table[a, b])
                    if c not in recipe:
                        recipe[c] = (op, a, b)
                        order.append(c)
                        changed = True
    return gens, order, recipe


def ring_isomorphism(S: TableRing, T: TableRing, equivariant: bool = False):
    """An array f with f[a] the image of a, or None; unital, and conj-equivariant if asked."""
    if S.N != T.N:
        return None
    gens, order, recipe = _generators(S)
    for images in itertools.product(range(T.N), repeat=len(gens)):
        f = np.full(S.N, -1, dtype=np.int64)
        for c in order:
            rec = recipe[c]
            if rec[0] == "zero":
                f[c] = T.zero
            elif rec[0] == "one":
                f[c] = T.one
            elif rec[0] == "gen":
                f[c] = images[rec[1]]
            else:
                table = T.add if rec[0] == "add" else T.mul
                f[c] = table[f[rec[1]], f[rec[2]]]
        if len(np.unique(f)) != S.N:
            continue
        if not np.array_equal(f[S.add], T.add[f[:, None], f[None, :]]):
            continue
        if not np.array_equal(f[S.mul], T.mul[f[:, None], f[None, :]]):
            continue
        if equivariant and not np.array_equal(f[S.conj], T.conj[f]):
            continue
        return f
    return None


def agreement(make_a, make_b, cap, equivariant=False):
    """Largest m <= cap with make_a(m) isomorphic to make_b(m)."""
    agree = 0
    for m in range(1, cap + 1):
        if ring_isomorphism(make_a(m), make_b(m), equivariant) is None:
            break
        agree = m
    return agree


# ----- matrix group counts by brute force


def sl2_order(ring: TableRing):
    n = ring.N
    a, b, c, d = np.meshgrid(*[np.arange(n)] * 4, indexing="ij")
    neg = np.array([int(np.nonzero(ring.add[x] == ring.zero)[0][0]) for x in range(n)])
    det = ring.add[ring.mul[a, d], neg[ring.mul[b, c]]]
    return int(np.count_nonzero(det == ring.one))


def su3_f4_order():
    """|SU_3(F_4/F_2)| by enumerating all 4^9 matrices against the antidiagonal form."""
    add, mul = gf2_field(2, 0b111)
    conj = mul[np.arange(4), np.arange(4)]  # Frobenius x -> x^2
    codes = np.arange(4**9, dtype=np.int64)
    g = np.stack([(codes >> (2 * k)) & 3 for k in range(9)], axis=1).reshape(-1, 3, 3)
    # ^S conj(g): entry (i, j) is conj(g[2-j, 2-i])
    s = conj[g[:, ::-1, ::-1].transpose(0, 2, 1)]
    ok = np.ones(len(g), dtype=bool)
    for i in range(3):
        for j in range(3):
            acc = np.zeros(len(g), dtype=np.int64)
            for k in range(3):
                acc = add[acc, mul[s[:, i, k], g[:, k, j]]]
            ok &= acc == (1 if i == j else 0)
    cand = g[ok]
    m = lambda x, y: mul[x, y]
    det = add[
        add[
            m(cand[:, 0, 0], add[m(cand[:, 1, 1], cand[:, 2, 2]), m(cand[:, 1, 2], cand[:, 2, 1])]),
            m(cand[:, 0, 1], add[m(cand[:, 1, 0], cand[:, 2, 2]), m(cand[:, 1, 2], cand[:, 2, 0])]),
        ],
        m(cand[:, 0, 2], add[m(cand[:, 1, 0], cand[:, 2, 1]), m(cand[:, 1, 1], cand[:, 2, 0])]),
    ]
    return int(np.count_nonzero(det == 1))


def persymmetric_counts(p=3):
    """Counts of {^S g = g, tr 0} and {^S g = -g, tr 0} in M_3(F_p), by enumeration."""
    codes = np.arange(p**9, dtype=np.int64)
    g = np.stack([(codes // p**k) % p for k in range(9)], axis=1).reshape(-1, 3, 3)
    s = g[:, ::-1, ::-1].transpose(0, 2, 1)
    tr0 = (g[:, 0, 0] + g[:, 1, 1] + g[:, 2, 2]) % p == 0
    sym = np.all(s == g, axis=(1, 2)) & tr0
    anti = np.all((s + g) % p == 0, axis=(1, 2)) & tr0
    return int(sym.sum()), int(anti.sum())
