import itertools

import numpy as np
import pytest

import oracles
from tworep import grouprep as gr
from tworep import two_group as tgm

GROUPS = oracles.small_groups()

DEGREES = {"Z1": (1,), "S3": (1, 1, 2), "D4": (1, 1, 1, 1, 2), "Q8": (1, 1, 1, 1, 2)}


def linear_character_count(G):
    """Homomorphisms G -> C^x by exhaustive search over n-th roots of unity on generators."""
    n = G.order
    roots = [np.exp(2j * np.pi * k / n) for k in range(n)]
    gens = oracles._generators(G)
    count = 0
    for images in itertools.product(roots, repeat=len(gens)):
        val = {0: 1.0 + 0j}
        frontier = [0]
        ok = True
        while frontier and ok:
            nxt = []
            for a in frontier:
                for g, z in zip(gens, images):
                    b = G.mul(a, g)
                    v = val[a] * z
                    if b in val:
                        ok = ok and abs(val[b] - v) < 1e-9
                    else:
                        val[b] = v
                        nxt.append(b)
            frontier = nxt
        if ok and all(abs(val[G.mul(a, b)] - val[a] * val[b]) < 1e-9 for a in G.elements for b in G.elements):
            count += 1
    return count


def test_trivial_group():
    t = gr.irreducible_characters(GROUPS["Z1"])
    assert t.degrees == (1,) and np.allclose(t.values, [[1]])


def test_cyclic_three_has_three_linear_characters():
    t = gr.irreducible_characters(GROUPS["Z3"])
    assert t.degrees == (1, 1, 1)
    cube = {round(np.angle(v) / (2 * np.pi / 3)) % 3 for v in t.values[:, 1]}
    assert cube == {0, 1, 2}


@pytest.mark.parametrize("name", sorted(GROUPS))
def test_character_table_structure(name):
    G = GROUPS[name]
    t = gr.irreducible_characters(G)
    sizes = np.array([len(c) for c in G.conjugacy_classes])
    assert len(t.degrees) == len(G.conjugacy_classes)
    assert sum(d * d for d in t.degrees) == G.order
    assert G.order % np.lcm.reduce(t.degrees) == 0
    # row and column orthogonality
    assert np.allclose((t.values * sizes) @ t.values.conj().T / G.order, np.eye(len(sizes)), atol=1e-9)
    assert np.allclose(t.values.conj().T @ t.values, np.diag(G.order / sizes), atol=1e-9)
    if name in DEGREES:
        assert t.degrees == DEGREES[name]
    if G.is_abelian:
        assert t.degrees == (1,) * G.order
    assert t.degrees.count(1) == linear_character_count(G)


@pytest.mark.parametrize("name", sorted(GROUPS))
def test_regular_representation_decomposes_by_degree(name):
    G = GROUPS[name]
    reg = gr.regular_representation(G)
    for row, d in zip(gr.irreducible_characters(G).values, gr.irreducible_characters(G).degrees):
        assert abs(gr.char_inner_product(reg.character, row, G) - d) < 1e-9


@pytest.mark.parametrize("name", sorted(GROUPS))
def test_irreducible_representations(name):
    G = GROUPS[name]
    t = gr.irreducible_characters(G)
    reps = gr.irreducible_representations(G)
    assert len(reps) == len(t.degrees)
    for r, row in zip(reps, t.values):
        assert r.multiplicativity_violation() is None
        assert np.allclose(r.character, row, atol=1e-6)
        assert gr.is_irreducible_grouprep(r)
        assert gr.commutant_dimension(r) == 1
        for m in r.matrices:
            assert np.allclose(m @ m.conj().T, np.eye(r.dim), atol=1e-9)
    for a, b in itertools.combinations(reps, 2):
        assert gr.commutant_basis(a, b) == []


def test_commutant_of_sums_and_nonirreducible():
    S3 = GROUPS["S3"]
    one, sign, two = gr.irreducible_representations(S3)
    s = gr.direct_sum_grouprep(two, two)
    assert gr.commutant_dimension(s) == 4
    assert not gr.is_irreducible_grouprep(s)
    assert gr.commutant_dimension(gr.direct_sum_grouprep(one, sign)) == 2
    assert len(gr.commutant_basis(two, s)) == 2
    assert gr.commutant_dimension(gr.regular_representation(S3)) == 1 + 1 + 4
    assert gr.commutant_dimension(gr.trivial_rep(S3, 3)) == 9


def test_commutant_basis_solves_the_intertwining_equation():
    D4 = GROUPS["D4"]
    reps = gr.irreducible_representations(D4)
    r = gr.direct_sum_grouprep(reps[-1], gr.direct_sum_grouprep(reps[0], reps[-1]))
    for m in gr.commutant_basis(r):
        for g in D4.elements:
            assert np.allclose(r(g) @ m, m @ r(g), atol=1e-9)


def test_multiplicativity_is_checked():
    Z2 = GROUPS["Z2"]
    with pytest.raises(gr.GroupRepError):
        gr.GroupRep(Z2, [[[1]], [[2]]])
    with pytest.raises(gr.GroupRepError):
        gr.GroupRep(Z2, [[[1]]])
    gr.GroupRep(Z2, [[[1]], [[-1]]])


def test_subgroup_representations_carry_embedding():
    S3 = GROUPS["S3"]
    S, emb = S3.subgroup(next(s for s in S3.subgroups if len(s) == 2))
    r = gr.GroupRep(S, [[[1]], [[-1]]], emb)
    assert r.embedding == emb and r.character == (1, -1)


@pytest.mark.parametrize("name", ["S3", "D4", "Q8"])
def test_character_tables_of_all_subgroups(name):
    G = GROUPS[name]
    for s in G.subgroups:
        S, _ = G.subgroup(s)
        t = gr.irreducible_characters(S)
        assert sum(d * d for d in t.degrees) == S.order
        assert len(t.degrees) == oracles.conjugacy_class_count(G, s)


def test_tables_are_deterministic():
    G = tgm.dihedral(4)
    a, b = gr.irreducible_characters(G), gr.irreducible_characters(tgm.dihedral(4), seed=5)
    assert np.allclose(a.values, b.values, atol=1e-9)
