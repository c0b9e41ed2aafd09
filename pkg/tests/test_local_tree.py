from __future__ import annotations

import json

import networkx as nx
import numpy as np
import pytest

import btlab.builtins as B
from btlab.errors import IndexOutOfRange
from btlab.local_groups import make_group, standard_N_elements, truncate_batch
from btlab.local_tree import (
    act,
    action_kernel,
    ball_isomorphic,
    build_ball,
    check_tree,
    sphere_orbits,
    to_dot,
    to_json,
    verify_equivariance,
)
from btlab.trunc_ring import make_ring, ring_iso_search

Q2 = B.field("Q2")

BALLS = {
    "SL2_Z2": ("SL2D", Q2, 1),
    "SL2_Z4": ("SL2D", Q2, 2),
    "SL2_Z8": ("SL2D", Q2, 3),
    "quat_F2X": ("SL2D", B.algebra("quat_F2X"), 2),
    "SU3_F4": ("SU3_unram", B.pair("unram_F2X"), 2),
    "SU3_odd": ("SU3_ram_odd", B.pair("odd_F3X"), 2),
    "dyadic_small": ("SU3_dyadic_small", B.pair("dyadic_X2"), 4),
    "dyadic_large": ("SU3_dyadic_large", B.pair("dyadic_X1"), 4),
    "insep": ("SL2_insep", B.pair("insep_F2X"), 4),
}


def _ball(name):
    fam, carrier, rho = BALLS[name]
    return build_ball(make_group(fam, carrier, rho))


def _graph(ball):
    g = nx.Graph()
    g.add_nodes_from(ball.vertices())
    g.add_edges_from(ball.edges())
    return g


def _intersection_oracle(G, radius):
    """Cosets as key sets with edges by intersection, built without the library's builder."""
    keys = G.keys
    levels = []
    for x in range(radius + 1):
        sub = G.mats[np.nonzero(G.px_mask(G.mats, x))[0]]
        seen, cosets = set(), []
        for i in range(G.order()):
            if int(keys[i]) in seen:
                continue
            members = frozenset(G.keys_of(G.matmul(G.mats[i][None], sub)).tolist())
            seen |= members
            cosets.append(members)
        levels.append(cosets)
    g = nx.Graph()
    for x, cosets in enumerate(levels):
        g.add_nodes_from((x, k) for k in range(len(cosets)))
    for x in range(radius):
        for a, ca in enumerate(levels[x]):
            for b, cb in enumerate(levels[x + 1]):
                if ca & cb:
                    g.add_edge((x, a), (x + 1, b))
    return g


# ----- shape


@pytest.mark.parametrize("name", list(BALLS))
def test_ball_is_a_tree_with_index_law(name):
    ball = _ball(name)
    info = check_tree(ball)
    assert info["tree"] and info["index_law"]
    g = _graph(ball)
    assert nx.is_tree(g)
    dist = nx.single_source_shortest_path_length(g, (0, 0))
    assert all(dist[v] == v[0] for v in g.nodes)


@pytest.mark.parametrize("name", ["SL2_Z4", "SU3_F4", "SU3_odd", "dyadic_small", "insep"])
def test_edges_match_coset_intersection(name):
    ball = _ball(name)
    oracle = _intersection_oracle(ball.group, ball.radius)
    assert set(map(frozenset, oracle.edges)) == set(frozenset(e) for e in ball.edges())


def test_spec_examples():
    b1 = _ball("SL2_Z2")
    assert b1.sphere_sizes() == [1, 3] and b1.degree((0, 0)) == 3
    b2 = _ball("SL2_Z4")
    assert b2.sphere_sizes() == [1, 3, 6] and b2.n_vertices == 10
    assert b2.degree_histogram()[1] == {3: 3}
    b3 = _ball("SU3_F4")
    assert b3.sphere_sizes() == [1, 9, 18]
    assert b3.degree((0, 0)) == 9 and b3.degree_histogram()[1] == {3: 9}


@pytest.mark.parametrize(
    "name,interior",
    [
        ("SL2_Z8", {3}),
        ("quat_F2X", {5}),
        ("SU3_odd", {4}),
        ("dyadic_small", {3}),
        ("dyadic_large", {3}),
        ("insep", {3}),
    ],
)
def test_regular_degree_laws(name, interior):
    ball = _ball(name)
    hist = ball.degree_histogram()
    for x in range(ball.radius):
        assert set(hist[x]) == interior
    assert set(hist[ball.radius]) == {1}


def test_semiregular_unramified():
    hist = _ball("SU3_F4").degree_histogram()
    p, n = 2, 1
    assert hist[0] == {p ** (3 * n) + 1: 1}
    assert set(hist[1]) == {p**n + 1}


def test_literal_dyadic_bounds_break_regularity():
    X1 = B.pair("dyadic_X1")
    shifted = build_ball(make_group("SU3_dyadic_large", X1, 4))
    literal = build_ball(make_group("SU3_dyadic_large", X1, 4, literal_bounds=True))
    assert shifted.sphere_sizes() == [1, 3, 6, 12, 24]
    assert literal.sphere_sizes() == [1, 6, 6, 24, 24]
    assert check_tree(literal)["tree"]


def test_radius_errors():
    G = make_group("SL2D", Q2, 2)
    with pytest.raises(IndexOutOfRange):
        build_ball(G, 3)
    assert build_ball(G, 0).sphere_sizes() == [1]


# ----- action


@pytest.mark.parametrize("name", ["SL2_Z4", "SU3_odd", "dyadic_small"])
def test_action_is_a_homomorphism_of_graph_automorphisms(name):
    ball = _ball(name)
    G = ball.group
    edges = set(frozenset(e) for e in ball.edges())
    rng = np.random.default_rng(0)
    picks = rng.integers(0, G.order(), size=(15, 2))
    for a, b in picks:
        g, h = G.mats[a], G.mats[b]
        gh = G.mul(g, h)
        for v in ball.vertices():
            assert act(ball, gh, v) == act(ball, g, act(ball, h, v))
        image = {frozenset({act(ball, g, u), act(ball, g, w)}) for u, w in ball.edges()}
        assert image == edges


def test_equivariance_exhaustive_small_balls():
    for name in ("SL2_Z2", "SL2_Z4"):
        ball = _ball(name)
        G = ball.group
        edges = set(frozenset(e) for e in ball.edges())
        for g in G.mats:
            assert {frozenset({act(ball, g, u), act(ball, g, w)}) for u, w in ball.edges()} == edges
            assert act(ball, g, (0, 0)) == (0, 0)


def test_act_examples():
    ball = _ball("SL2_Z4")
    G = ball.group
    m = standard_N_elements(G).m_std
    ident = G.identity()
    assert all(act(ball, ident, v) == v for v in ball.vertices())
    moved = act(ball, m, (1, 0))
    assert moved[0] == 1 and moved != (1, 0)
    assert act(ball, m, moved) == (1, 0)


# ----- orbits and kernels


@pytest.mark.parametrize("name", list(BALLS))
def test_spheres_are_single_orbits(name):
    ball = _ball(name)
    orbits = sphere_orbits(ball)
    assert [sum(o) for o in orbits] == ball.sphere_sizes()
    assert all(len(o) == 1 for o in orbits)


def _scalars(G, kernel):
    n = G.n
    return all(all(k[i, j] == 0 for i in range(n) for j in range(n) if i != j) and len(set(np.diag(k))) == 1 for k in kernel)


def test_kernel_sl2_z4_is_plus_minus_one():
    ball = _ball("SL2_Z4")
    G = ball.group
    kernel = action_kernel(ball)
    R = make_ring(Q2, 2)
    got = sorted(int(k[0, 0]) for k in kernel)
    assert _scalars(G, kernel) and got == sorted([R.from_int(1), R.from_int(-1)])


def test_kernel_sl2_f2_is_trivial():
    ball = _ball("SL2_Z2")
    kernel = action_kernel(ball)
    assert len(kernel) == 1 and np.array_equal(kernel[0], ball.group.identity())


@pytest.mark.parametrize("name", ["SL2_Z8", "insep", "quat_F2X"])
def test_kernel_sl2_families_contain_square_roots_of_one(name):
    ball = _ball(name)
    G = ball.group
    kernel_keys = set(G.keys_of(action_kernel(ball)).tolist())
    S = G.S
    roots = [c for c in range(S.N) if S.mul[c, c] == S.one and all(S.mul[c, y] == S.mul[y, c] for y in range(S.N))]
    for lam in roots:
        scalar = np.diag([lam, lam]).astype(np.int32)
        if G.contains(scalar):
            assert G.key(scalar) in kernel_keys


@pytest.mark.parametrize("name", ["SU3_F4", "SU3_odd"])
def test_kernel_su3_families_contain_unitary_cube_roots(name):
    ball = _ball(name)
    G = ball.group
    S = G.S
    kernel_keys = set(G.keys_of(action_kernel(ball)).tolist())
    roots = [
        c for c in range(S.N) if S.mul[S.mul[c, c], c] == S.one and S.mul[c, S.conj[c]] == S.one
    ]
    assert roots
    for lam in roots:
        assert G.key(np.diag([lam] * 3).astype(np.int32)) in kernel_keys


def test_kernel_sizes_recorded():
    assert len(action_kernel(_ball("SU3_F4"))) == 3
    assert len(action_kernel(_ball("SU3_odd"))) == 9
    assert len(action_kernel(_ball("dyadic_large"))) == 64


def test_kernel_is_normal():
    ball = _ball("SU3_odd")
    G = ball.group
    kernel = action_kernel(ball)
    keys = set(G.keys_of(kernel).tolist())
    rng = np.random.default_rng(6)
    for i in rng.integers(0, G.order(), size=20):
        g = G.mats[i]
        g_inv = G.inverse(g)
        for k in kernel:
            assert G.key(G.mul(G.mul(g, k), g_inv)) in keys


# ----- isomorphisms of balls


def test_ball_isomorphic_to_itself():
    ball = _ball("SU3_odd")
    bij = ball_isomorphic(ball, ball, None)
    assert bij is not None and all(bij[v] == v for v in ball.vertices())


def test_ball_isomorphic_under_ring_witness():
    A = make_group("SL2D", B.field("Q2_sqrt2"), 2)
    C = make_group("SL2D", B.field("F2X"), 2)
    w = ring_iso_search(make_ring(B.field("Q2_sqrt2"), 2), make_ring(B.field("F2X"), 2))
    code_map = w.code_map()
    ba, bc = build_ball(A), build_ball(C)
    bij = ball_isomorphic(ba, bc, code_map)
    assert bij is not None
    assert verify_equivariance(ba, bc, code_map, bij, exhaustive=True)
    for u, v in ba.edges():
        assert frozenset({bij[u], bij[v]}) in set(frozenset(e) for e in bc.edges())


def test_ball_isomorphic_degree_obstruction():
    assert ball_isomorphic(_ball("SL2_Z2"), build_ball(make_group("SU3_unram", B.pair("unram_F2X"), 1)), None) is None


def test_ball_isomorphic_rejects_non_isomorphism():
    ball = _ball("SL2_Z4")
    G = ball.group
    # a constant map is not a group isomorphism
    assert ball_isomorphic(ball, ball, lambda m: np.repeat(G.identity()[None], len(m), 0)) is None


# ----- truncation naturality


@pytest.mark.parametrize(
    "family,carrier,hi,lo",
    [("SL2D", Q2, 3, 2), ("SU3_unram", B.pair("unram_F2X"), 2, 1), ("SL2_insep", B.pair("insep_F2X"), 4, 2)],
)
def test_truncation_naturality(family, carrier, hi, lo):
    G_hi, G_lo = make_group(family, carrier, hi), make_group(family, carrier, lo)
    small_hi = build_ball(G_hi, lo)
    b_lo = build_ball(G_lo)
    image = G_lo.index_of(truncate_batch(G_hi, G_hi.mats, G_lo))
    mapping = {}
    for x in range(lo + 1):
        low_ids = b_lo.coset_of[x][image[small_hi.reps[x]]]
        assert len(set(low_ids.tolist())) == len(low_ids) == len(b_lo.reps[x])
        for k, m in enumerate(low_ids):
            mapping[(x, k)] = (x, int(m))
    assert {frozenset({mapping[a], mapping[b]}) for a, b in small_hi.edges()} == set(frozenset(e) for e in b_lo.edges())
    rng = np.random.default_rng(8)
    for i in rng.integers(0, G_hi.order(), size=10):
        g = G_hi.mats[i]
        g_lo = G_lo.mats[image[i]]
        for v in small_hi.vertices():
            assert mapping[act(small_hi, g, v)] == act(b_lo, g_lo, mapping[v])


# ----- output formats


def test_dot_output():
    dot = to_dot(_ball("SL2_Z4"))
    assert dot.startswith("graph ball {") and dot.rstrip().endswith("}")
    nodes = [line for line in dot.splitlines() if line.strip().startswith('"') and "--" not in line]
    assert len(nodes) == 10
    assert '"0:0" [shape=doublecircle];' in dot
    assert sum("--" in line for line in dot.splitlines()) == 9


def test_json_output():
    ball = _ball("SL2_Z4")
    obj = json.loads(to_json(ball))
    assert len(obj["vertices"]) == 10 and len(obj["edges"]) == 9
    assert obj["degrees"]["0"] == {"3": 1}
    assert to_json(ball) == to_json(_ball("SL2_Z4"))
