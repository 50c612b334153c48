import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from strategies import functors, seeds, spaces
from tworep import laws
from tworep import meas2cat as mc
from tworep.measure_core import FiniteMeasure, FiniteSpace, MeasureFamily, SpaceMismatch

X3 = FiniteSpace(("a", "b", "c"))
P1 = FiniteSpace(("p",))


def functor(index, base, dims, weights):
    return mc.MatrixFunctor(mc.HilbertField(index, base, np.array(dims).reshape(len(index), len(base))),
                            MeasureFamily(index, base, [FiniteMeasure(base, w) for w in weights]))


def rng_for(seed):
    return np.random.default_rng(seed)


# ---------------------------------------------------------------- apply_to_object and composition


def test_apply_identity_leaves_object_unchanged():
    assert mc.apply_to_object(mc.MatrixFunctor.identity(X3), {"a": 4, "b": 0, "c": 2}) == {"a": 4, "b": 0, "c": 2}


def test_apply_zero_family_gives_zero_object():
    assert mc.apply_to_object(mc.MatrixFunctor.zero(P1, X3), [1, 2, 3]) == {"p": 0}


def test_apply_uniform_measure_sums():
    Y = FiniteSpace(("u", "v"))
    T = functor(Y, X3, [1] * 6, [[1, 1, 1], [1, 1, 1]])
    assert mc.apply_to_object(T, [1, 2, 3]) == {"u": 6, "v": 6}


def test_apply_rejects_mismatched_object():
    with pytest.raises(SpaceMismatch):
        mc.apply_to_object(mc.MatrixFunctor.identity(X3), [1, 2])
    with pytest.raises(SpaceMismatch):
        mc.apply_to_object(mc.MatrixFunctor.identity(X3), {"z": 1})


def test_concentration_is_enforced_and_dims_are_canonical():
    with pytest.raises(mc.ConcentrationError):
        functor(P1, X3, [1, 0, 1], [[1, 1, 0]])
    T = functor(P1, X3, [2, 5, 1], [[1, 0, 3]])
    assert T.dims.tolist() == [[2, 0, 1]]


@given(st.data())
def test_identity_functor_is_a_two_sided_unit(data):
    Y, X = data.draw(spaces(0, 4, "y")), data.draw(spaces(0, 4, "x"))
    T = data.draw(functors(Y, X))
    assert mc.compose_functors(T, mc.MatrixFunctor.identity(X)) == T
    assert mc.compose_functors(mc.MatrixFunctor.identity(Y), T) == T


@given(st.data())
def test_composite_dims_match_oracle(data):
    Z, Y, X = (data.draw(spaces(0, 4, c)) for c in "zyx")
    U, T = data.draw(functors(Z, Y)), data.draw(functors(Y, X))
    C = mc.compose_functors(U, T)
    assert np.array_equal(C.dims, oracles.dims_oracle(U, T))


def test_composition_of_pullbacks():
    X = FiniteSpace(("0", "1", "2"))
    cyc = mc.Pullback(X, X, (1, 2, 0))
    H = mc.pullback_functor(cyc)
    assert mc.compose_functors(H, mc.compose_functors(H, H)) == mc.MatrixFunctor.identity(X)
    swap = mc.pullback_functor(mc.Pullback(X, X, (1, 0, 2)))
    assert mc.compose_functors(swap, swap) == mc.MatrixFunctor.identity(X)
    # H^f H^g = H^{g f}
    f, g = mc.Pullback(X, X, (1, 0, 2)), mc.Pullback(X, X, (2, 0, 1))
    assert mc.compose_functors(mc.pullback_functor(f), mc.pullback_functor(g)) == mc.pullback_functor(f.then(g))
    assert mc.pullback_functor(mc.Pullback(X, X, (0, 1, 2))) == mc.MatrixFunctor.identity(X)


def test_zero_factor_gives_zero_family():
    T = functor(P1, X3, [1, 1, 1], [[1, 2, 3]])
    Z = mc.MatrixFunctor.zero(P1, P1)
    assert mc.compose_functors(Z, T).measures.is_zero()
    assert mc.compose_functors(T, mc.MatrixFunctor.zero(X3, X3)).measures.is_zero()


def test_mismatched_chain_rejected():
    with pytest.raises(mc.ChainMismatch):
        mc.compose_functors(mc.MatrixFunctor.identity(X3), mc.MatrixFunctor.identity(P1))


def test_pullback_must_be_bijective():
    with pytest.raises(ValueError):
        mc.Pullback(X3, X3, (0, 0, 1))


# ---------------------------------------------------------------- vertical composition


def test_vertical_identity_is_neutral():
    rng = rng_for(1)
    T, Tp = laws.random_functor(rng, X3, X3), laws.random_functor(rng, X3, X3)
    a = laws.random_nattrans(rng, T, Tp)
    assert mc.vertical_compose(mc.MatrixNatTrans.identity(Tp), a).allclose(a)
    assert mc.vertical_compose(a, mc.MatrixNatTrans.identity(T)).allclose(a)


def test_vertical_prefactor_one_point():
    T, Tm, Tt = (functor(P1, P1, [1], [[c]]) for c in (1, 4, 1))
    a = mc.MatrixNatTrans(T, Tm, {("p", "p"): [[2j]]})
    b = mc.MatrixNatTrans(Tm, Tt, {("p", "p"): [[3]]})
    assert np.allclose(mc.vertical_compose(b, a)["p", "p"], [[6j]])


def test_vertical_disjoint_supports_vanish():
    X = FiniteSpace(("a", "b"))
    T, Tm, Tt = functor(P1, X, [1, 1], [[1, 1]]), functor(P1, X, [1, 1], [[1, 0]]), functor(P1, X, [1, 1], [[0, 1]])
    a = mc.MatrixNatTrans(T, Tm, {("p", "a"): [[1]]})
    b = mc.MatrixNatTrans(Tm, Tt, {})
    assert mc.vertical_compose(b, a).cells == {}


def test_vertical_rejects_mismatched_chain():
    T = functor(P1, P1, [1], [[1]])
    U = functor(P1, P1, [2], [[1]])
    a = mc.MatrixNatTrans.identity(T)
    with pytest.raises(mc.ChainMismatch):
        mc.vertical_compose(mc.MatrixNatTrans.identity(U), a)


@given(seeds)
def test_vertical_composition_is_associative(seed):
    rng = rng_for(seed)
    Y, X = laws.random_space(rng, 3, 1, "y"), laws.random_space(rng, 3, 1, "x")
    Ts = [laws.random_functor(rng, Y, X) for _ in range(4)]
    a, b, c = (laws.random_nattrans(rng, Ts[i], Ts[i + 1]) for i in range(3))
    left = mc.vertical_compose(c, mc.vertical_compose(b, a))
    right = mc.vertical_compose(mc.vertical_compose(c, b), a)
    assert left.max_difference(right) < 1e-9


# ---------------------------------------------------------------- horizontal composition and whiskering


@given(seeds)
def test_horizontal_matches_block_oracle(seed):
    rng = rng_for(seed)
    Z, Y, X = (laws.random_space(rng, 3, 0, c) for c in "zyx")
    U, Up = laws.random_functor(rng, Z, Y), laws.random_functor(rng, Z, Y)
    T, Tp = laws.random_functor(rng, Y, X), laws.random_functor(rng, Y, X)
    b, a = laws.random_nattrans(rng, U, Up), laws.random_nattrans(rng, T, Tp)
    got = mc.horizontal_compose(b, a)
    want = oracles.hcompose_oracle(b, a)
    keys = set(got.cells) | set(want)
    for k in keys:
        assert np.allclose(got.cell(*k), want.get(k, got.cell(*k) * 0), atol=1e-9)


def test_horizontal_same_functors_is_blockwise_tensor():
    rng = rng_for(3)
    Y = FiniteSpace(("y0", "y1"))
    U, T = laws.random_functor(rng, P1, Y, zero_prob=0), laws.random_functor(rng, Y, P1, zero_prob=0)
    b, a = laws.random_nattrans(rng, U, U), laws.random_nattrans(rng, T, T)
    cell = mc.horizontal_compose(b, a).cell(0, 0)
    want = np.zeros_like(cell)
    off = 0
    for yi in range(2):
        blk = np.kron(b.cell(0, yi), a.cell(yi, 0))
        want[off:off + blk.shape[0], off:off + blk.shape[1]] = blk
        off += blk.shape[0]
    assert np.allclose(cell, want, atol=1e-12)


@given(seeds)
def test_identity_horizontal_identity(seed):
    rng = rng_for(seed)
    Z, Y, X = (laws.random_space(rng, 3, 0, c) for c in "zyx")
    U, T = laws.random_functor(rng, Z, Y), laws.random_functor(rng, Y, X)
    h = mc.horizontal_compose(mc.MatrixNatTrans.identity(U), mc.MatrixNatTrans.identity(T))
    assert h.allclose(mc.MatrixNatTrans.identity(mc.compose_functors(U, T)))


@settings(max_examples=40)
@given(seeds)
def test_interchange_law(seed):
    rng = rng_for(seed)
    X, Y, Z = (laws.random_space(rng, 4, 1, c) for c in "xyz")
    Ts = [laws.random_functor(rng, Y, X) for _ in range(3)]
    Us = [laws.random_functor(rng, Z, Y) for _ in range(3)]
    a, ap = laws.random_nattrans(rng, Ts[0], Ts[1]), laws.random_nattrans(rng, Ts[1], Ts[2])
    b, bp = laws.random_nattrans(rng, Us[0], Us[1]), laws.random_nattrans(rng, Us[1], Us[2])
    left = mc.horizontal_compose(mc.vertical_compose(bp, b), mc.vertical_compose(ap, a))
    right = mc.vertical_compose(mc.horizontal_compose(bp, ap), mc.horizontal_compose(b, a))
    assert left.max_difference(right) < 1e-9


@given(seeds)
def test_whisker_equals_horizontal_with_identity(seed):
    rng = rng_for(seed)
    Z, Y, X = (laws.random_space(rng, 3, 0, c) for c in "zyx")
    U = laws.random_functor(rng, Z, Y)
    T, Tp = laws.random_functor(rng, Y, X), laws.random_functor(rng, Y, X)
    a = laws.random_nattrans(rng, T, Tp)
    assert mc.whisker(a, U, "left").allclose(mc.horizontal_compose(mc.MatrixNatTrans.identity(U), a))
    W = laws.random_functor(rng, X, Z)
    assert mc.whisker(a, W, "right").allclose(mc.horizontal_compose(a, mc.MatrixNatTrans.identity(W)))


def test_whisker_by_identity_and_zero():
    rng = rng_for(5)
    T, Tp = laws.random_functor(rng, X3, P1), laws.random_functor(rng, X3, P1)
    a = laws.random_nattrans(rng, T, Tp)
    assert mc.whisker(a, mc.MatrixFunctor.identity(X3), "left").allclose(a)
    assert mc.whisker(a, mc.MatrixFunctor.identity(P1), "right").allclose(a)
    z = mc.MatrixNatTrans.zero(T, Tp)
    assert all(not m.any() for m in mc.whisker(z, laws.random_functor(rng, P1, X3), "left").cells.values())
    with pytest.raises(ValueError):
        mc.whisker(a, mc.MatrixFunctor.identity(P1), "up")


# ---------------------------------------------------------------- pullbacks and scalar 2-automorphisms


def test_scalar_2autos_form_a_group():
    f = mc.Pullback(X3, X3, (2, 0, 1))
    H = mc.pullback_functor(f)
    assert mc.scalar_2auto(f, [1, 1, 1]).allclose(mc.MatrixNatTrans.identity(H))
    c = [2, 1j, -3]
    cbar = [1 / v for v in c]
    assert mc.vertical_compose(mc.scalar_2auto(f, cbar), mc.scalar_2auto(f, c)).allclose(mc.MatrixNatTrans.identity(H))
    d = [5, 7, 11]
    assert mc.vertical_compose(mc.scalar_2auto(f, d), mc.scalar_2auto(f, c)).allclose(
        mc.scalar_2auto(f, [x * y for x, y in zip(c, d)]))
    with pytest.raises(ValueError):
        mc.scalar_2auto(f, [1, 0, 1])


def test_horizontal_composite_of_scalar_2autos():
    # beta over g: Z -> Y after alpha over f: Y -> X gives (beta∘alpha)(z) = beta(z) alpha(g(z))
    Z, Y = FiniteSpace(("z0", "z1", "z2")), FiniteSpace(("y0", "y1", "y2"))
    f, g = mc.Pullback(Y, X3, (1, 2, 0)), mc.Pullback(Z, Y, (2, 0, 1))
    alpha, beta = mc.scalar_2auto(f, [2, 3, 5]), mc.scalar_2auto(g, [7, 11, 13])
    h = mc.horizontal_compose(beta, alpha)
    gf = g.then(f)
    for zi in range(3):
        assert np.allclose(h.cell(zi, gf.images[zi]), [[beta.cell(zi, g.images[zi])[0, 0]
                                                         * alpha.cell(g.images[zi], f.images[g.images[zi]])[0, 0]]])


@given(seeds)
def test_pullback_whisker_matches_horizontal(seed):
    rng = rng_for(seed)
    Y, X = laws.random_space(rng, 3, 1, "y"), laws.random_space(rng, 3, 1, "x")
    T, Tp = laws.random_functor(rng, Y, X), laws.random_functor(rng, Y, X)
    a = laws.random_nattrans(rng, T, Tp)
    Z = FiniteSpace(tuple(f"z{i}" for i in range(len(Y))))
    f = mc.Pullback(Z, Y, tuple(int(i) for i in rng.permutation(len(Y))))
    assert mc.pullback_whisker(a, f, "left").allclose(mc.whisker(a, mc.pullback_functor(f), "left"))
    W = FiniteSpace(tuple(f"w{i}" for i in range(len(X))))
    h = mc.Pullback(X, W, tuple(int(i) for i in rng.permutation(len(X))))
    assert mc.pullback_whisker(a, h, "right").allclose(mc.whisker(a, mc.pullback_functor(h), "right"))


# ---------------------------------------------------------------- invertibility


def test_identity_is_invertible():
    T = functor(P1, X3, [1, 2, 3], [[1, 0, 2]])
    ok, inv = mc.is_invertible_2mor(mc.MatrixNatTrans.identity(T))
    assert ok and inv.allclose(mc.MatrixNatTrans.identity(T))


def test_inequivalent_measures_not_invertible():
    X = FiniteSpace(("a", "b"))
    T, Tp = functor(P1, X, [1, 1], [[1, 0]]), functor(P1, X, [1, 1], [[1, 1]])
    assert mc.is_invertible_2mor(mc.MatrixNatTrans(T, Tp, {("p", "a"): [[1]]})) == (False, None)


def test_singular_cell_not_invertible():
    T = functor(P1, X3, [2, 1, 1], [[1, 2, 0]])
    cells = {("p", "a"): [[1, 2], [2, 4]], ("p", "b"): [[1]]}
    assert mc.is_invertible_2mor(mc.MatrixNatTrans(T, T, cells))[0] is False
    cells[("p", "a")] = [[1, 2], [2, 5]]
    assert mc.is_invertible_2mor(mc.MatrixNatTrans(T, T, cells))[0] is True


@given(seeds)
def test_inverse_composes_to_identity(seed):
    a = laws.random_invertibility_case(rng_for(seed))
    ok, inv = mc.is_invertible_2mor(a)
    if ok:
        assert mc.vertical_compose(inv, a).allclose(mc.MatrixNatTrans.identity(a.source))
        assert mc.vertical_compose(a, inv).allclose(mc.MatrixNatTrans.identity(a.target))


def test_is_equivalence_examples():
    assert mc.is_equivalence(mc.MatrixFunctor.identity(X3)) == mc.Pullback(X3, X3, (0, 1, 2))
    f = mc.Pullback(X3, X3, (2, 0, 1))
    T = functor(X3, X3, [[0, 0, 1], [1, 0, 0], [0, 1, 0]], [[0, 0, 5], [2, 0, 0], [0, 1, 0]])
    assert mc.is_equivalence(T) == f
    assert mc.is_equivalence(functor(P1, FiniteSpace(("a", "b")), [1, 1], [[1, 1]])) is None
    assert mc.is_equivalence(functor(P1, P1, [2], [[1]])) is None


@given(seeds)
def test_is_equivalence_against_search(seed):
    rng = rng_for(seed)
    T = laws.random_equivalence_candidate(rng, laws.random_space(rng, 4, 0))
    got = mc.is_equivalence(T)
    want = oracles.brute_force_bijection(T)
    assert (got is None) == (want is None)
    if got is not None:
        assert got.images == want


# ---------------------------------------------------------------- sums, tensors, coherence cells


def test_direct_sum_unit_and_doubling():
    T = functor(P1, X3, [1, 2, 3], [[1, 0, 2]])
    Z = mc.MatrixFunctor.zero(P1, X3)
    assert mc.direct_sum_functors(T, Z) == T and mc.direct_sum_functors(Z, T) == T
    assert mc.direct_sum_functors(T, T).dims.tolist() == [[2, 0, 6]]


def test_direct_sum_disjoint_supports_select():
    T, Tp = functor(P1, X3, [1, 2, 3], [[1, 0, 0]]), functor(P1, X3, [4, 5, 6], [[0, 1, 0]])
    S = mc.direct_sum_functors(T, Tp)
    assert S.dims.tolist() == [[1, 5, 0]]


def test_direct_sum_nattrans_regions():
    T = functor(P1, X3, [1, 1, 1], [[1, 1, 0]])
    Tp = functor(P1, X3, [1, 1, 1], [[0, 1, 1]])
    a = mc.MatrixNatTrans(T, T, {("p", "a"): [[2]], ("p", "b"): [[3]]})
    s = mc.direct_sum_nattrans(a, mc.MatrixNatTrans.zero(Tp, Tp))
    assert np.allclose(s["p", "a"], [[2]])                  # t only
    assert np.allclose(s["p", "b"], [[3, 0], [0, 0]])       # common support
    assert np.allclose(s["p", "c"], [[0]])                  # t' only
    ident = mc.direct_sum_nattrans(mc.MatrixNatTrans.identity(T), mc.MatrixNatTrans.identity(Tp))
    assert ident.allclose(mc.MatrixNatTrans.identity(mc.direct_sum_functors(T, Tp)))


@given(seeds)
def test_direct_sum_is_functorial(seed):
    rng = rng_for(seed)
    Y, X = laws.random_space(rng, 3, 1, "y"), laws.random_space(rng, 3, 1, "x")
    T, Tm, Tt, S, Sm, St = (laws.random_functor(rng, Y, X) for _ in range(6))
    a, b = laws.random_nattrans(rng, T, Tm), laws.random_nattrans(rng, Tm, Tt)
    ap, bp = laws.random_nattrans(rng, S, Sm), laws.random_nattrans(rng, Sm, St)
    left = mc.direct_sum_nattrans(mc.vertical_compose(b, a), mc.vertical_compose(bp, ap))
    right = mc.vertical_compose(mc.direct_sum_nattrans(b, bp), mc.direct_sum_nattrans(a, ap))
    assert left.max_difference(right) < 1e-9


def test_two_sum_with_empty_and_identities():
    T = functor(P1, X3, [1, 2, 3], [[1, 0, 2]])
    E = mc.MatrixFunctor.zero(FiniteSpace(()), FiniteSpace(()))
    S = mc.two_sum_functors(T, E)
    assert S.index.points == ("L:p",) and S.base.points == ("L:a", "L:b", "L:c")
    assert np.array_equal(S.dims, T.dims)
    P2 = FiniteSpace(("a", "b"))
    assert mc.two_sum_functors(mc.MatrixFunctor.identity(X3), mc.MatrixFunctor.identity(P2)) == \
        mc.MatrixFunctor.identity(X3.disjoint_union(P2))


@given(seeds)
def test_two_sum_decomposes_into_direct_sum(seed):
    rng = rng_for(seed)
    Y, X = laws.random_space(rng, 3, 0, "y"), laws.random_space(rng, 3, 0, "x")
    Yp, Xp = laws.random_space(rng, 3, 0, "v"), laws.random_space(rng, 3, 0, "u")
    T, Tp = laws.random_functor(rng, Y, X), laws.random_functor(rng, Yp, Xp)
    left = mc.two_sum_functors(T, mc.MatrixFunctor.zero(Yp, Xp))
    right = mc.two_sum_functors(mc.MatrixFunctor.zero(Y, X), Tp)
    assert mc.two_sum_functors(T, Tp) == mc.direct_sum_functors(left, right)


def test_tensor_examples():
    T = functor(P1, X3, [2, 2, 2], [[1, 4, 0]])
    Tp = functor(P1, X3, [3, 3, 3], [[1, 1, 1]])
    S = mc.tensor_functors(T, Tp)
    assert S.dims.tolist() == [[6, 6, 0]]
    unit = functor(P1, X3, [1, 1, 1], [[1, 4, 0]])
    assert mc.tensor_functors(T, unit) == T


@given(seeds)
def test_two_product_measures_multiply(seed):
    rng = rng_for(seed)
    T = laws.random_functor(rng, laws.random_space(rng, 2, 1, "y"), laws.random_space(rng, 3, 1, "x"))
    Tp = laws.random_functor(rng, laws.random_space(rng, 2, 1, "v"), laws.random_space(rng, 3, 1, "u"))
    P = mc.tensor_two_functors(T, Tp)
    nyp, nxp = len(Tp.index), len(Tp.base)
    for yi, ypi, xi, xpi in itertools.product(range(len(T.index)), range(nyp), range(len(T.base)), range(nxp)):
        assert P.weight(yi * nyp + ypi, xi * nxp + xpi) == T.weight(yi, xi) * Tp.weight(ypi, xpi)
        assert P.dims[yi * nyp + ypi, xi * nxp + xpi] == (
            T.dims[yi, xi] * Tp.dims[ypi, xpi] if T.weight(yi, xi) and Tp.weight(ypi, xpi) else 0)


@given(seeds)
def test_braidings_are_involutive(seed):
    rng = rng_for(seed)
    Y, X = laws.random_space(rng, 3, 1, "y"), laws.random_space(rng, 3, 1, "x")
    T, Tp = laws.random_functor(rng, Y, X), laws.random_functor(rng, Y, X)
    for braid, op in ((mc.tensor_braiding, mc.tensor_functors), (mc.direct_sum_braiding, mc.direct_sum_functors)):
        twice = mc.vertical_compose(braid(Tp, T), braid(T, Tp))
        assert twice.allclose(mc.MatrixNatTrans.identity(op(T, Tp)))


def test_commutation_matrix_swaps_factors():
    a, b = np.arange(2.0) + 1, np.arange(3.0) + 5
    assert np.allclose(mc.commutation_matrix(2, 3) @ np.kron(a, b), np.kron(b, a))


@settings(max_examples=30)
@given(seeds)
def test_associator_is_natural(seed):
    rng = rng_for(seed)
    Wsp, Z, Y, X = (laws.random_space(rng, 3, 1, c) for c in "wzyx")
    W, Wp = laws.random_functor(rng, Wsp, Z), laws.random_functor(rng, Wsp, Z)
    V, Vp = laws.random_functor(rng, Z, Y), laws.random_functor(rng, Z, Y)
    U, Up = laws.random_functor(rng, Y, X), laws.random_functor(rng, Y, X)
    c, b, a = laws.random_nattrans(rng, W, Wp), laws.random_nattrans(rng, V, Vp), laws.random_nattrans(rng, U, Up)
    left = mc.vertical_compose(mc.composition_associator(Wp, Vp, Up),
                               mc.horizontal_compose(mc.horizontal_compose(c, b), a))
    right = mc.vertical_compose(mc.horizontal_compose(c, mc.horizontal_compose(b, a)),
                                mc.composition_associator(W, V, U))
    assert left.max_difference(right) < 1e-9


@given(seeds)
def test_adjoint_identities(seed):
    rng = rng_for(seed)
    Y, X = laws.random_space(rng, 3, 1, "y"), laws.random_space(rng, 3, 1, "x")
    T, Tm, Tt = (laws.random_functor(rng, Y, X) for _ in range(3))
    a, b = laws.random_nattrans(rng, T, Tm), laws.random_nattrans(rng, Tm, Tt)
    assert mc.adjoint(mc.vertical_compose(b, a)).max_difference(
        mc.vertical_compose(mc.adjoint(a), mc.adjoint(b))) < 1e-9
    n = mc.norm(a)
    assert abs(mc.norm(mc.vertical_compose(mc.adjoint(a), a)) - n * n) <= 1e-9 * max(1.0, n * n)
