"""Finite balls of Bruhat-Tits trees as coset graphs with the group action.

The vertices at distance x from the root are the cosets P_0 / P_x (negative
positions are folded onto positive ones by the reflection m_std, which lies
in P_0).  A vertex at level x >= 1 is joined to the unique level x-1 coset
containing it.  Each coset is represented by its element of smallest key.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import config
from .errors import BudgetExceeded, IndexOutOfRange
from .local_groups import LocalGroup


@dataclass
class LocalBall:
    group: LocalGroup
    radius: int
    coset_of: list  # level -> array mapping element index to coset id
    reps: list  # level -> array of representative element indices, in id order
    parent: list  # level -> array of parent coset ids (level 0 has none)
    _offsets: list = field(default_factory=list)

    def __post_init__(self):
        self._offsets = [0]
        for r in self.reps:
            self._offsets.append(self._offsets[-1] + len(r))

    # ----- vertex bookkeeping
    @property
    def n_vertices(self) -> int:
        return self._offsets[-1]

    def sphere_sizes(self):
        return [len(r) for r in self.reps]

    def vertex_id(self, level: int, k: int) -> int:
        return self._offsets[level] + k

    def vertex_of(self, vid: int):
        level = int(np.searchsorted(self._offsets, vid, side="right") - 1)
        return level, vid - self._offsets[level]

    def vertices(self):
        return [(x, k) for x, r in enumerate(self.reps) for k in range(len(r))]

    def label(self, v) -> str:
        return f"{v[0]}:{v[1]}"

    def edges(self):
        out = []
        for x in range(1, self.radius + 1):
            for k, par in enumerate(self.parent[x]):
                out.append(((x - 1, int(par)), (x, k)))
        return out

    def neighbours(self, v):
        x, k = v
        out = []
        if x > 0:
            out.append((x - 1, int(self.parent[x][k])))
        if x < self.radius:
            out.extend((x + 1, int(c)) for c in np.nonzero(self.parent[x + 1] == k)[0])
        return out

    def degree(self, v) -> int:
        return len(self.neighbours(v))

    def degree_histogram(self):
        hist = {}
        for x in range(self.radius + 1):
            counts = np.bincount(self.parent[x + 1], minlength=len(self.reps[x])) if x < self.radius else None
            per = {}
            for k in range(len(self.reps[x])):
                d = (1 if x > 0 else 0) + (int(counts[k]) if counts is not None else 0)
                per[d] = per.get(d, 0) + 1
            hist[x] = per
        return hist

    # ----- action
    def act_batch(self, g, level: int, ks) -> np.ndarray:
        """Coset ids at a level of g times the representatives of the given cosets."""
        G = self.group
        reps = G.mats[self.reps[level][np.asarray(ks)]]
        idx = G.index_of(G.matmul(np.asarray(g, dtype=np.int32)[None], reps))
        if np.any(idx < 0):
            raise ValueError("element is not in the group")
        return self.coset_of[level][idx]

    def act(self, g, v):
        x, k = v
        return (x, int(self.act_batch(g, x, [k])[0]))

    def permutation(self, g, level: int) -> np.ndarray:
        return self.act_batch(g, level, np.arange(len(self.reps[level])))


def build_ball(G: LocalGroup, radius: int | None = None) -> LocalBall:
    """Coset graph of the ball of the given radius around the standard vertex."""
    radius = G.radius if radius is None else radius
    if radius < 0 or radius > G.radius:
        raise IndexOutOfRange(f"ball radius {radius} outside [0, {G.radius}]")
    order = G.order()
    if order > config.budget():
        raise BudgetExceeded(f"group order {order} exceeds the budget")
    coset_of = [np.zeros(order, dtype=np.int64)]
    reps = [np.array([0], dtype=np.int64)]
    parent = [np.zeros(0, dtype=np.int64)]
    for x in range(1, radius + 1):
        cid, rep = _cosets(G, G.px_indices(x))
        coset_of.append(cid)
        reps.append(rep)
        parent.append(coset_of[x - 1][rep])
    return LocalBall(G, radius, coset_of, reps, parent)


def _cosets(G: LocalGroup, sub_idx: np.ndarray):
    """Left cosets g*H, scanned in key order so each representative is the coset minimum."""
    order = G.order()
    cid = np.full(order, -1, dtype=np.int64)
    sub = G.mats[sub_idx]
    reps = []
    mats = G.mats
    for i in range(order):
        if cid[i] >= 0:
            continue
        members = G.index_of(G.matmul(mats[i][None], sub))
        cid[members] = len(reps)
        reps.append(i)
    return cid, np.array(reps, dtype=np.int64)


def act(ball: LocalBall, g, v):
    return ball.act(g, v)


def _orbits_from_perms(size: int, perms) -> list:
    parent = list(range(size))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for perm in perms:
        for a, b in enumerate(perm):
            ra, rb = find(a), find(int(b))
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    sizes = {}
    for a in range(size):
        r = find(a)
        sizes[r] = sizes.get(r, 0) + 1
    return sorted(sizes.values(), reverse=True)


def sphere_orbits(ball: LocalBall):
    """Orbit sizes of the group on each sphere, largest first."""
    G = ball.group
    gens = [G.mats[i] for i in G.generators()]
    return [
        _orbits_from_perms(len(ball.reps[x]), [ball.permutation(g, x) for g in gens])
        for x in range(ball.radius + 1)
    ]


def action_kernel(ball: LocalBall) -> np.ndarray:
    """Elements fixing every vertex of the ball (they all lie in P_radius)."""
    G = ball.group
    x = ball.radius
    cand = G.px_indices(x) if x > 0 else np.arange(G.order())
    reps = G.mats[ball.reps[x]]
    if len(cand) * len(reps) > 50 * config.budget():
        raise BudgetExceeded("kernel search too large")
    keep = []
    ids = np.arange(len(reps))
    for c in cand:
        idx = G.index_of(G.matmul(G.mats[c][None], reps))
        if np.array_equal(ball.coset_of[x][idx], ids):
            keep.append(c)
    return G.mats[np.array(keep, dtype=np.int64)]


def check_tree(ball: LocalBall) -> dict:
    """Tree invariants: sizes, edge count and distance from the root."""
    V = ball.n_vertices
    E = len(ball.edges())
    expected = [1] + [ball.group.order() // len(ball.group.px_indices(x)) for x in range(1, ball.radius + 1)]
    return {
        "vertices": V,
        "edges": E,
        "tree": E == V - 1,
        "sphere_sizes": ball.sphere_sizes(),
        "index_law": ball.sphere_sizes() == expected,
    }


def ball_isomorphic(b1: LocalBall, b2: LocalBall, group_iso):
    """Level-preserving equivariant vertex bijection compatible with group_iso, or None.

    ``group_iso`` maps a batch of matrices of the first group to matrices of
    the second one; an integer array is read as an entrywise code map.
    """
    if b1.radius != b2.radius or b1.sphere_sizes() != b2.sphere_sizes():
        return None
    if b1.degree_histogram() != b2.degree_histogram():
        return None
    G1, G2 = b1.group, b2.group
    if G1.order() != G2.order():
        return None
    fmap = _as_map(group_iso)
    image = G2.index_of(fmap(G1.mats))
    if np.any(image < 0) or len(np.unique(image)) != G1.order():
        return None
    mapping = [np.zeros(1, dtype=np.int64)]
    anchor = 0
    for x in range(1, b1.radius + 1):
        stab = image[G1.px_indices(x)]
        children = np.nonzero(b2.parent[x] == anchor)[0]
        target = None
        for w in children:
            rep = G2.mats[b2.reps[x][w]]
            idx = G2.index_of(G2.matmul(G2.mats[stab], rep[None]))
            if np.all(b2.coset_of[x][idx] == w):
                target = int(w)
                break
        if target is None:
            return None
        rep_w = G2.mats[b2.reps[x][target]]
        # vertex g*[x] goes to iso(g) * w
        imgs = G2.matmul(G2.mats[image[b1.reps[x]]], rep_w[None])
        m = b2.coset_of[x][G2.index_of(imgs)]
        if len(np.unique(m)) != len(m):
            return None
        mapping.append(m)
        anchor = target
    for x in range(1, b1.radius + 1):
        if not np.array_equal(mapping[x - 1][b1.parent[x]], b2.parent[x][mapping[x]]):
            return None
    return {(x, k): (x, int(mapping[x][k])) for x in range(b1.radius + 1) for k in range(len(mapping[x]))}


def _as_map(group_iso):
    if group_iso is None:
        return lambda m: m
    if callable(group_iso):
        return group_iso
    table = np.asarray(group_iso, dtype=np.int32)
    return lambda m: table[m]


def verify_equivariance(b1: LocalBall, b2: LocalBall, group_iso, bijection, exhaustive: bool = True) -> bool:
    """Check phi(g.v) = iso(g).phi(v) for all (or generating) g and all vertices."""
    G1 = b1.group
    fmap = _as_map(group_iso)
    elems = range(G1.order()) if exhaustive else G1.generators()
    for x in range(b1.radius + 1):
        ks = np.arange(len(b1.reps[x]))
        fwd = np.array([bijection[(x, int(k))][1] for k in ks])
        for gi in elems:
            g = G1.mats[gi]
            left = fwd[b1.act_batch(g, x, ks)]
            right = b2.act_batch(fmap(g[None])[0], x, fwd)
            if not np.array_equal(left, right):
                return False
    return True


def to_dot(ball: LocalBall, name: str = "ball") -> str:
    lines = [f"graph {name} {{"]
    for v in ball.vertices():
        style = ' [shape=doublecircle]' if v == (0, 0) else ""
        lines.append(f'  "{ball.label(v)}"{style};')
    for a, b in ball.edges():
        lines.append(f'  "{ball.label(a)}" -- "{ball.label(b)}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_json(ball: LocalBall) -> str:
    verts = [{"level": x, "id": ball.vertex_id(x, k)} for x, k in ball.vertices()]
    edges = [[ball.vertex_id(*a), ball.vertex_id(*b)] for a, b in ball.edges()]
    degrees = {str(x): {str(d): c for d, c in sorted(h.items())} for x, h in ball.degree_histogram().items()}
    return json.dumps({"vertices": verts, "edges": edges, "degrees": degrees}, sort_keys=True)
