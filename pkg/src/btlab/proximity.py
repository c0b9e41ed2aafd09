"""Krasner proximity between local fields, quadratic pairs and division algebras.

Two objects agree at level m when their rings of integers modulo m-th power
of the maximal ideal are isomorphic (conjugation-equivariantly for pairs).
The distance is 2^-m for the largest such m; it is reported as the integer
``agree`` together with the cap that was searched, so no floating point is
involved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import config
from .cyclic_algebra import CyclicAlgebraSpec, algebra_context, algebra_iso_search
from .errors import CapExceedsPrecision, MixedContexts, NoWitness, RegimeMismatch
from .local_groups import LocalGroup, make_group
from .local_tree import LocalBall, ball_isomorphic, build_ball, verify_equivariance
from .quad_pair import QuadPair, pair_iso_search
from .trunc_ring import LocalFieldSpec, make_ring, ring_iso_search

TRANSPORT_RADIUS_CAP = 4
EXHAUSTIVE_LIMIT = 10**5


@dataclass
class DistanceResult:
    agree: int
    capped: bool
    cap: int
    witness: object = field(default=None, repr=False)

    def to_json(self) -> dict:
        return {"agree": self.agree, "capped": self.capped, "cap": self.cap}


def _kind(x) -> str:
    if isinstance(x, LocalFieldSpec):
        return "field"
    if isinstance(x, QuadPair):
        return "pair"
    if isinstance(x, CyclicAlgebraSpec):
        return "algebra"
    raise MixedContexts(f"not a metric point: {x!r}")


def precision_cap(x) -> int:
    kind = _kind(x)
    if kind == "field":
        return x.max_radius
    if kind == "pair":
        return x.max_radius
    return x.max_level


def _residue_size(x) -> int:
    kind = _kind(x)
    if kind == "field":
        return x.residue.cardinality
    if kind == "pair":
        return x.ring(1).N
    return algebra_context(x, 1).N


def agreement_witness(a, b, m: int):
    """Isomorphism witness at level m, or None."""
    kind = _kind(a)
    if _kind(b) != kind:
        raise MixedContexts("cannot compare a field, a pair and an algebra with each other")
    if m == 0:
        return True
    if kind == "field":
        return ring_iso_search(make_ring(a, m), make_ring(b, m))
    if kind == "pair":
        return pair_iso_search(a, b, m)
    if a.degree != b.degree:
        return None
    return algebra_iso_search(algebra_context(a, m), algebra_context(b, m))


def krasner_distance(a, b, cap: Optional[int] = None) -> DistanceResult:
    """Largest m <= cap at which a and b agree (distance 2^-m)."""
    kind = _kind(a)
    if _kind(b) != kind:
        raise MixedContexts("cannot compare a field, a pair and an algebra with each other")
    limit = min(precision_cap(a), precision_cap(b))
    cap = limit if cap is None else cap
    if cap > limit:
        raise CapExceedsPrecision(f"cap {cap} exceeds the common precision {limit}")
    if kind == "algebra" and a.degree != b.degree:
        return DistanceResult(0, False, cap)
    if _residue_size(a) != _residue_size(b):
        return DistanceResult(0, False, cap)
    agree, witness = 0, None
    for m in range(1, cap + 1):
        w = agreement_witness(a, b, m)
        if w is None:
            break
        agree, witness = m, w
    return DistanceResult(agree, agree == cap, cap, witness)


# ---------------------------------------------------------------------------
# transport


@dataclass
class Transport:
    radius: int
    source: LocalGroup
    target: LocalGroup
    code_map: np.ndarray = field(repr=False)
    ball_source: LocalBall = field(repr=False)
    ball_target: LocalBall = field(repr=False)
    bijection: dict = field(repr=False)
    group_iso_verified: bool
    equivariance_verified: bool
    exhaustive: bool

    @property
    def verified(self) -> bool:
        return self.group_iso_verified and self.equivariance_verified

    def summary(self) -> dict:
        return {
            "radius": self.radius,
            "source_family": self.source.family,
            "target_family": self.target.family,
            "order": self.source.order(),
            "vertices": self.ball_source.n_vertices,
            "group_iso_verified": self.group_iso_verified,
            "equivariance_verified": self.equivariance_verified,
            "exhaustive": self.exhaustive,
        }


def pair_family(pair: QuadPair, radius: int) -> str:
    if pair.kind == "unramified":
        return "SU3_unram"
    if pair.kind == "ramified_odd":
        return "SU3_ram_odd"
    if pair.kind == "inseparable":
        return "SL2_insep"
    return "SU3_dyadic_small" if radius <= 2 * pair.i0 else "SU3_dyadic_large"


def transport_radius(a, m: int) -> int:
    """Radius of the local groups determined by agreement at level m."""
    if isinstance(a, QuadPair) and a.kind == "ramified_dyadic" and m > 2 * a.i0:
        return m - 2 * a.i0
    return m


def _restricted_code_map(witness, radius: int) -> np.ndarray:
    """Code map at a lower radius induced by a witness at a higher level."""
    full = witness.code_map()
    S, T = witness.source, witness.target
    top = S.radius
    if radius == top:
        return full.astype(np.int32)
    q_s, q_t = S.Q ** (top - radius), T.Q ** (top - radius)
    codes = np.arange(S.Q**radius, dtype=np.int64)
    return (full[codes * q_s] // q_t).astype(np.int32)


def transport(a, b, m: int, family: Optional[str] = None) -> Transport:
    """Group isomorphism and equivariant ball bijection induced by agreement at level m."""
    witness = agreement_witness(a, b, m)
    if witness is None or witness is True:
        raise NoWitness(f"no isomorphism at level {m}")
    kind = _kind(a)
    if kind == "pair":
        radius = transport_radius(a, m)
        fam_a = pair_family(a, radius)
        fam_b = pair_family(b, radius)
        if transport_radius(b, m) != radius or {fam_a, fam_b} - {"SU3_dyadic_small", "SL2_insep"} and fam_a != fam_b:
            raise RegimeMismatch(f"{fam_a} and {fam_b} cannot be matched at level {m}")
        if family is not None and family not in (fam_a, fam_b):
            raise RegimeMismatch(f"family {family} does not match the pair regime")
        code_map = _restricted_code_map(witness, radius)
        t_b = None
        if fam_a == "SU3_dyadic_large":
            t_b = tuple(witness.target.digits(witness.apply_code(a.t_code(m))))
        Ga = make_group(fam_a, a, radius)
        Gb = make_group(fam_b, b, radius, t_digits=t_b)
    else:
        if family not in (None, "SL2D"):
            raise RegimeMismatch("fields and algebras carry the SL2D family")
        radius = m
        code_map = _restricted_code_map(witness, radius)
        Ga = make_group("SL2D", a, radius)
        Gb = make_group("SL2D", b, radius)
    image = Gb.index_of(code_map[Ga.mats])
    group_ok = bool(np.all(image >= 0)) and len(np.unique(image)) == Ga.order() == Gb.order()
    ba, bb = build_ball(Ga), build_ball(Gb)
    bij = ball_isomorphic(ba, bb, code_map) if group_ok else None
    if bij is None:
        raise NoWitness("the induced group isomorphism does not give a ball bijection")
    exhaustive = Ga.order() * ba.n_vertices <= EXHAUSTIVE_LIMIT * 20
    equiv = verify_equivariance(ba, bb, code_map, bij, exhaustive=exhaustive)
    return Transport(radius, Ga, Gb, code_map, ba, bb, bij, group_ok, equiv, exhaustive)


# ---------------------------------------------------------------------------
# sequences and catalogs


def convergence_trace(seq, limit, cap: Optional[int] = None, family: Optional[str] = None, verify_balls: bool = True):
    """Agreement radius of each point with the limit, with a transported-ball check."""
    rows = []
    for i, point in enumerate(seq):
        d = krasner_distance(point, limit, cap)
        row = {"index": i, "agree": d.agree, "capped": d.capped, "verified": None}
        if verify_balls and d.agree > 0:
            level = min(d.agree, _transport_level_cap(point))
            try:
                row["verified"] = transport(point, limit, level, family).verified
                row["transport_level"] = level
            except RegimeMismatch:
                row["verified"] = None
        rows.append(row)
    return rows


def _transport_level_cap(point) -> int:
    if isinstance(point, QuadPair) and point.kind == "ramified_dyadic" and math.isfinite(point.i0):
        # stay in the regime where the pair is comparable with its limit
        return min(TRANSPORT_RADIUS_CAP, 2 * point.i0)
    return TRANSPORT_RADIUS_CAP


def is_non_decreasing(rows) -> bool:
    values = [r["agree"] for r in rows]
    return all(x <= y for x, y in zip(values, values[1:]))


def catalog_distances(points, cap: Optional[int] = None):
    """Symmetric matrix of DistanceResults (diagonal is capped agreement)."""
    n = len(points)
    if cap is None:
        cap = min(precision_cap(p) for p in points)
    out = [[None] * n for _ in range(n)]
    for i in range(n):
        out[i][i] = DistanceResult(cap, True, cap)
        for j in range(i + 1, n):
            d = krasner_distance(points[i], points[j], cap)
            out[i][j] = out[j][i] = d
    return out


def catalog_report(matrix) -> dict:
    n = len(matrix)
    pairs = [
        {"a": i, "b": j, "agree": matrix[i][j].agree, "capped": matrix[i][j].capped}
        for i in range(n)
        for j in range(i + 1, n)
    ]
    return {"pairs": pairs}


def ultrametric_violations(matrix):
    """Triples (i, j, k) whose triangle is not isosceles with the two longest sides equal.

    Distances are compared through agreement levels: a larger level is a
    smaller distance, and capped entries count as the cap.
    """
    n = len(matrix)
    bad = []
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                levels = sorted([matrix[i][j].agree, matrix[j][k].agree, matrix[i][k].agree])
                if levels[0] != levels[1]:
                    bad.append((i, j, k))
    return bad


def distance_fraction(result: DistanceResult):
    """The distance 2^-agree as an exact fraction (0 is never claimed; capped results give an upper bound)."""
    from fractions import Fraction

    return Fraction(1, 2**result.agree)


def budget_note() -> str:
    return f"budget {config.budget()}"
