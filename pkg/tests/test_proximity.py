from __future__ import annotations

import itertools
from fractions import Fraction

import oracles as O
import pytest
from adapters import pair_table, ring_table

import btlab.builtins as B
from btlab.errors import CapExceedsPrecision, MixedContexts, NoWitness, RegimeMismatch
from btlab.proximity import (
    DistanceResult,
    catalog_distances,
    catalog_report,
    convergence_trace,
    distance_fraction,
    is_non_decreasing,
    krasner_distance,
    transport,
    transport_radius,
    ultrametric_violations,
)
from btlab.quad_pair import QuadPair
from btlab.trunc_ring import make_ring

F2X = B.field("F2X")
EIS = {"Q2": [-2], "Q2_sqrt2": [-2, 0], "Q2_i": [2, 2], "Q2_cbrt2": [-2, 0, 0], "Q2_root4_2": [-2, 0, 0, 0]}


def _oracle_field(name):
    if name == "F2X":
        return lambda m: O.truncated_poly_ring(2, m)
    if name == "Q2":
        return lambda m: O.integers_mod(2**m)
    return lambda m: O.eisenstein_quotient(2, EIS[name], m)


# ----- distances


def test_krasner_ladder_examples():
    assert krasner_distance(B.field("Q2"), F2X, 4).agree == 1
    d = krasner_distance(B.field("Q2_sqrt2"), F2X, 4)
    assert d.to_json() == {"agree": 2, "capped": False, "cap": 4}
    assert distance_fraction(d) == Fraction(1, 4)
    assert krasner_distance(B.field("Q2_cbrt2"), F2X, 5).agree == 3


def test_self_distance_is_capped():
    for name in ("Q2", "F2X", "Q2_i"):
        d = krasner_distance(B.field(name), B.field(name), 3)
        assert d.agree == 3 and d.capped
    d = krasner_distance(B.pair("dyadic_X2"), B.pair("dyadic_X2"), 5)
    assert d.agree == 5 and d.capped


@pytest.mark.parametrize(
    "a,b",
    [("Q2", "F2X"), ("Q2_sqrt2", "F2X"), ("Q2_i", "Q2_sqrt2"), ("Q2_cbrt2", "F2X"), ("Q2_root4_2", "Q2_cbrt2"), ("Q2", "Q2_i")],
)
def test_field_distances_match_oracle(a, b):
    expected = O.agreement(_oracle_field(a), _oracle_field(b), 4)
    assert krasner_distance(B.field(a), B.field(b), 4).agree == expected


@pytest.mark.parametrize("name,i", [("dyadic_X1", 1), ("dyadic_X2", 2), ("dyadic_X3", 3)])
def test_pair_distances_match_oracle(name, i):
    cap = 2 * i + 1
    expected = O.agreement(lambda m: O.dyadic_equal_char_ring(i, m), O.inseparable_ring, cap, equivariant=True)
    assert expected == 2 * i
    assert krasner_distance(B.pair(name), B.pair("insep_F2X"), cap).agree == expected


def test_pairs_of_different_kinds():
    assert krasner_distance(B.pair("dyadic_X1"), B.pair("unram_F2X"), 4).agree == 0
    a = pair_table(B.pair("dyadic_X1"), 1)
    b = pair_table(B.pair("unram_F2X"), 1)
    assert O.ring_isomorphism(a, b, equivariant=True) is None


def test_algebra_distances():
    assert krasner_distance(B.algebra("quat_F2X"), B.algebra("quat_Q2"), 4).agree == 2
    assert krasner_distance(B.algebra("cubic_F2X_1"), B.algebra("cubic_F2X_2"), 3).agree == 1
    assert krasner_distance(B.algebra("quat_F2X"), B.algebra("cubic_F2X_1"), 3).agree == 0


def test_distance_errors():
    with pytest.raises(CapExceedsPrecision):
        krasner_distance(B.field("Q2_root4_2"), F2X, 10**3)
    with pytest.raises(MixedContexts):
        krasner_distance(B.field("Q2"), B.pair("dyadic_X1"), 2)
    with pytest.raises(MixedContexts):
        krasner_distance(B.algebra("quat_F2X"), F2X, 2)


def test_different_residue_fields_are_far():
    assert krasner_distance(B.field("Q2"), B.field("Q3"), 3).agree == 0
    assert krasner_distance(B.field("F2X"), B.field("F4X"), 3).agree == 0


def test_agreement_is_monotone():
    # agreement at m implies agreement at every lower level
    for a, b in [("Q2_i", "Q2_sqrt2"), ("Q2_cbrt2", "F2X")]:
        d = krasner_distance(B.field(a), B.field(b), 4)
        for m in range(1, d.agree + 1):
            assert O.ring_isomorphism(ring_table(make_ring(B.field(a), m)), ring_table(make_ring(B.field(b), m))) is not None


def test_witness_is_a_ring_isomorphism():
    d = krasner_distance(B.field("Q2_sqrt2"), F2X, 4)
    w = d.witness
    S, T = w.source, w.target
    f = w.code_map()
    assert S.radius == 2
    for a in range(S.N):
        for b in range(S.N):
            assert f[S.mul(a, b)] == T.mul(int(f[a]), int(f[b]))
            assert f[S.add(a, b)] == T.add(int(f[a]), int(f[b]))


# ----- catalogs


CATALOG = ["Q2", "Q2_sqrt2", "Q2_i", "Q2_cbrt2", "Q2_root4_2", "F2X"]
DEGREE = {"Q2": 1, "Q2_sqrt2": 2, "Q2_i": 2, "Q2_cbrt2": 3, "Q2_root4_2": 4}


def test_catalog_is_ultrametric_and_symmetric():
    M = catalog_distances([B.field(n) for n in CATALOG], 4)
    n = len(CATALOG)
    assert all(M[i][j].agree == M[j][i].agree for i in range(n) for j in range(n))
    assert all(M[i][i].capped and M[i][i].agree == 4 for i in range(n))
    assert ultrametric_violations(M) == []
    for i, j, k in itertools.combinations(range(n), 3):
        d = sorted([Fraction(1, 2 ** M[a][b].agree) for a, b in ((i, j), (j, k), (i, k))])
        assert d[2] == d[1] and d[0] <= max(d[1], d[2])


def test_catalog_degree_ladder():
    M = catalog_distances([B.field(n) for n in CATALOG], 4)
    for i, a in enumerate(CATALOG):
        for j, b in enumerate(CATALOG):
            if a in DEGREE and b in DEGREE and DEGREE[a] < DEGREE[b]:
                assert M[i][j].agree == DEGREE[a]


def test_three_point_example():
    M = catalog_distances([B.field("Q2"), B.field("Q2_sqrt2"), F2X], 4)
    assert M[0][1].agree == 1 and M[0][2].agree == 1 and M[1][2].agree == 2


def test_pair_catalog_is_ultrametric():
    pts = [B.pair(n) for n in ("dyadic_X1", "dyadic_X2", "dyadic_X3", "insep_F2X")]
    M = catalog_distances(pts, 7)
    assert ultrametric_violations(M) == []
    assert [M[i][3].agree for i in range(3)] == [2, 4, 6]


def test_catalog_report_format():
    M = catalog_distances([B.field("Q2"), F2X], 3)
    rep = catalog_report(M)
    assert rep == {"pairs": [{"a": 0, "b": 1, "agree": 1, "capped": False}]}


def test_ultrametric_checker_detects_violations():
    bad = [[DistanceResult(3, True, 3), DistanceResult(1, False, 3), DistanceResult(2, False, 3)]]
    bad.append([bad[0][1], DistanceResult(3, True, 3), DistanceResult(3, True, 3)])
    bad.append([bad[0][2], bad[1][2], DistanceResult(3, True, 3)])
    assert ultrametric_violations(bad) == [(0, 1, 2)]


# ----- transport


def test_transport_fields():
    tr = transport(B.field("Q2_sqrt2"), F2X, 2)
    assert tr.verified and tr.exhaustive and tr.radius == 2
    assert tr.ball_source.sphere_sizes() == [1, 3, 6]


def test_transport_dyadic_to_inseparable():
    tr = transport(B.pair("dyadic_X2"), B.pair("insep_F2X"), 4)
    assert tr.verified and tr.radius == 4
    assert tr.source.family == "SU3_dyadic_small" and tr.target.family == "SL2_insep"


def test_transport_identity():
    tr = transport(B.field("Q2"), B.field("Q2"), 3)
    assert tr.verified
    assert all(tr.bijection[v] == v for v in tr.ball_source.vertices())


def test_transport_large_regime_radius_shift():
    X1 = B.pair("dyadic_X1")
    assert transport_radius(X1, 6) == 4 and transport_radius(X1, 2) == 2
    tr = transport(X1, X1, 6)
    assert tr.radius == 4 == 6 - 2 * X1.i0
    assert tr.source.family == "SU3_dyadic_large" and tr.verified


def test_transport_algebras():
    tr = transport(B.algebra("quat_F2X"), B.algebra("quat_Q2"), 2)
    assert tr.verified and tr.ball_source.sphere_sizes() == [1, 5, 20]


def test_transport_errors():
    with pytest.raises(NoWitness):
        transport(B.field("Q2"), F2X, 2)
    with pytest.raises(RegimeMismatch):
        transport(B.pair("dyadic_X1"), B.pair("dyadic_X1"), 3)
    with pytest.raises(RegimeMismatch):
        transport(B.field("Q2"), B.field("Q2"), 2, family="SU3_unram")


# ----- traces


def test_trace_totally_ramified_ladder():
    rows = convergence_trace([B.field(n) for n in ("Q2", "Q2_sqrt2", "Q2_cbrt2")], F2X, 5)
    assert [r["agree"] for r in rows] == [1, 2, 3]
    assert all(r["verified"] for r in rows)
    assert is_non_decreasing(rows)


def test_trace_dyadic_pairs():
    rows = convergence_trace([B.pair(n) for n in ("dyadic_X1", "dyadic_X2", "dyadic_X3")], B.pair("insep_F2X"), 7)
    assert [r["agree"] for r in rows] == [2, 4, 6]
    assert all(r["verified"] for r in rows)


def test_trace_constant_sequence():
    rows = convergence_trace([B.field("Q2")] * 3, B.field("Q2"), 4, verify_balls=False)
    assert all(r["agree"] == 4 and r["capped"] for r in rows)


def test_trace_extra_dyadic_pairs_agree_with_x2():
    X2 = B.pair("dyadic_X2")
    base = F2X
    for alpha in ([0, 0, 1, 1], [0, 0, 1, 0, 1]):
        p = QuadPair("ramified_dyadic", base, alpha, [0, 1])
        assert krasner_distance(p, X2, 6).agree == 6
