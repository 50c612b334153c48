"""The nine acceptance criteria, each timed against its budget and checked against an independent oracle."""

import itertools
import random
import time
from fractions import Fraction

import numpy as np

import conftest
import oracles
from tworep import laws
from tworep import meas2cat as mc
from tworep import rep_theory as rt
from tworep import two_group as tgm
from tworep.measure_core import (FiniteMeasure, FiniteSpace, MeasureFamily, compose_families, disintegrate,
                                 geometric_mean, reassemble, rn_derivative)
from tworep.surd import ONE, Surd

FIXTURES = laws.fixture_twogroups()


def record(n, limit, check):
    """Run ``check() -> (ok, detail)``, time it and file the outcome under criterion ``n``."""
    start = time.perf_counter()
    ok, detail = check()
    secs = time.perf_counter() - start
    passed = bool(ok) and secs < limit
    detail = f"{detail}; budget {limit}s"
    conftest.ACCEPTANCE[n] = (passed, secs, detail)
    print(f"criterion {n}: {'PASS' if passed else 'FAIL'} ({secs:.2f}s) {detail}")
    assert ok, detail
    assert secs < limit, f"took {secs:.2f}s, budget {limit}s"


def rational(rng, zero_prob=0.3):
    if rng.random() < zero_prob:
        return Fraction(0)
    return Fraction(rng.randint(1, 9), rng.randint(1, 6))


def space(n, prefix):
    return FiniteSpace(tuple(f"{prefix}{i}" for i in range(n)))


def fractions_of(m):
    return [w.to_fraction() for w in m.weights]


# ---------------------------------------------------------------- 1. measure calculus


def test_criterion_1_measure_calculus():
    def check():
        rng = random.Random(1)
        bad = []
        for case in range(1000):
            n = rng.randint(1, 6)
            X = space(n, "p")
            t, u, v = ([rational(rng) for _ in range(n)] for _ in range(3))
            T, U, V = FiniteMeasure(X, t), FiniteMeasure(X, u), FiniteMeasure(X, v)
            gtu, gtv = geometric_mean(T, U), geometric_mean(T, V)
            both = {X.points[i] for i in range(n) if t[i] and u[i]}
            # a point is gtu-null iff it is t-null or u-null
            if set(gtu.support()) != both:
                bad.append((case, "null support"))
            dtu, dut = rn_derivative(T, U), rn_derivative(U, T)
            for i, x in enumerate(X.points):
                if x in both:
                    if gtu[x].square != t[i] * u[i] or dtu[x].to_fraction() != t[i] / u[i]:
                        bad.append((case, "geometric mean or derivative", x))
                    if dtu[x] * dut[x] != ONE:
                        bad.append((case, "chain rule", x))
                elif gtu[x] != 0:
                    bad.append((case, "geometric mean off support", x))
            dvu, dvt, duv = rn_derivative(V, U), rn_derivative(V, T), rn_derivative(U, V)
            for i, x in enumerate(X.points):
                if t[i] and u[i] and v[i]:
                    lhs = gtu[x] * Surd.sqrt(dvu[x])
                    rhs = gtv[x] * Surd.sqrt(dvt[x]) * Surd.sqrt(duv[x]) * Surd.sqrt(dtu[x])
                    # both sides square to t v
                    if lhs != rhs or lhs.square != t[i] * v[i]:
                        bad.append((case, "three-measure identity", x))
        return not bad, f"1000 triples over <= 6 points, {len(bad)} exact mismatches {bad[:3]}"

    record(1, 5, check)


# ---------------------------------------------------------------- 2. family composition


def random_family(rng, index, base):
    return MeasureFamily(index, base, [FiniteMeasure(base, [rational(rng) for _ in base]) for _ in index])


def compose_oracle(u, t):
    """(ut)_z(x) = sum_y u_z(y) t_y(x) in plain fractions."""
    tw = [fractions_of(m) for m in t.members]
    return [[sum((uw[y] * tw[y][x] for y in range(len(t.index))), Fraction(0)) for x in range(len(t.base))]
            for uw in (fractions_of(m) for m in u.members)]


def test_criterion_2_family_composition():
    def check():
        rng = random.Random(2)
        bad = []
        for case in range(500):
            W, Z, Y, X = (space(rng.randint(0, 4), c) for c in "wzyx")
            v, u, t = random_family(rng, W, Z), random_family(rng, Z, Y), random_family(rng, Y, X)
            ut, k = compose_families(u, t)
            if [fractions_of(m) for m in ut.members] != compose_oracle(u, t):
                bad.append((case, "composite"))
            want = compose_oracle(u, t)
            for zi, xi, yi in itertools.product(range(len(Z)), range(len(X)), range(len(Y))):
                tot = want[zi][xi]
                kw = k.weight(zi * len(X) + xi, yi).to_fraction()
                exp = fractions_of(u.members[zi])[yi] * fractions_of(t.members[yi])[xi] / tot if tot else 0
                if kw != exp:
                    bad.append((case, "kernel"))
            if compose_families(compose_families(v, u)[0], t)[0] != compose_families(v, ut)[0]:
                bad.append((case, "associativity"))
            if compose_families(MeasureFamily.dirac(Y), t)[0] != t or compose_families(t, MeasureFamily.dirac(X))[0] != t:
                bad.append((case, "unit"))
            nu = FiniteMeasure(Y, [rational(rng) for _ in Y])
            lam = reassemble(t, nu)
            nuw = fractions_of(nu)
            if fractions_of(lam) != [nuw[y] * w for y in range(len(Y)) for w in fractions_of(t.members[y])]:
                bad.append((case, "reassemble"))
            kept = MeasureFamily(Y, X, [m if nuw[y] else FiniteMeasure.zero(X) for y, m in enumerate(t.members)])
            if disintegrate(lam, nu, Y, X) != kept or reassemble(disintegrate(lam, nu, Y, X), nu) != lam:
                bad.append((case, "round trip"))
        return not bad, f"500 triples over <= 4 points, {len(bad)} exact mismatches {bad[:3]}"

    record(2, 5, check)


# ---------------------------------------------------------------- 3. exchange law


def exchange_oracle(cm):
    """Both sides of the exchange law from raw tables, broadcast over every composable quadruple.

    A 2-morphism (g, h) runs g => ∂(h)g; only the H components can differ.
    """
    G, H = cm.G, cm.H
    gm, hm = np.asarray(G.table), np.asarray(H.table)
    act = np.asarray(cm.action)
    d = np.asarray(cm.partial)
    g2 = np.arange(G.order)[:, None, None, None, None]
    h2 = np.arange(H.order)[None, :, None, None, None]
    h2p = np.arange(H.order)[None, None, :, None, None]
    h1 = np.arange(H.order)[None, None, None, :, None]
    h1p = np.arange(H.order)[None, None, None, None, :]
    # lhs: (v2·u2)∘(v1·u1) = (g2 g1, h2'h2 · g2▷(h1'h1))
    lhs = hm[hm[h2p, h2], act[g2, hm[h1p, h1]]]
    # rhs: (v2∘v1)·(u2∘u1) = (g2 g1, h2' · (∂(h2)g2)▷h1' · h2 · g2▷h1)
    t2 = gm[d[h2], g2]
    rhs = hm[hm[hm[h2p, act[t2, h1p]], h2], act[g2, h1]]
    quadruples = G.order ** 2 * H.order ** 4
    return int((lhs != rhs).sum()) * G.order, quadruples


def test_criterion_3_exchange_law():
    def check():
        fixtures = laws.fixture_crossed_modules()
        assert "Z2>Z3 inversion" in fixtures and "Z4=Z4 identity" in fixtures
        notes, ok = [], len(fixtures) >= 5
        for name, cm in fixtures.items():
            assert cm.G.order * cm.H.order <= 64
            bad, total = exchange_oracle(cm)
            lib = tgm.exchange_law_violations(cm, limit=10 ** 9)
            # the library composites agree with the table formulas on every pair
            agree = all(
                tgm.hmul(cm, (g2, h2), (g1, h1)) == (cm.G.mul(g2, g1), cm.H.mul(h2, cm.act(g2, h1)))
                for g1, g2 in itertools.product(cm.G.elements, repeat=2)
                for h1, h2 in itertools.product(cm.H.elements, repeat=2))
            ok = ok and bad == 0 and lib == [] and agree
            notes.append(f"{name}: {total}")
        # the oracle has teeth: nonabelian H with trivial ∂ breaks the law
        S3, Z2 = tgm.symmetric(3), tgm.cyclic(2)
        broken = tgm.CrossedModule(Z2, S3, [0] * 6, [list(S3.elements)] * 2, check=False)
        teeth = exchange_oracle(broken)[0] > 0 and tgm.exchange_law_violations(broken) != []
        return ok and teeth, f"{len(fixtures)} crossed modules, quadruples " + ", ".join(notes)

    record(3, 10, check)


# ---------------------------------------------------------------- 4. interchange law


def test_criterion_4_interchange():
    def check():
        worst, oracle_worst = 0.0, 0.0
        for case in range(200):
            rng = np.random.default_rng([4, case])
            X, Y, Z = (laws.random_space(rng, 4, 1, c) for c in "xyz")
            Ts = [laws.random_functor(rng, Y, X, 3) for _ in range(3)]
            Us = [laws.random_functor(rng, Z, Y, 3) for _ in range(3)]
            a, ap = laws.random_nattrans(rng, Ts[0], Ts[1]), laws.random_nattrans(rng, Ts[1], Ts[2])
            b, bp = laws.random_nattrans(rng, Us[0], Us[1]), laws.random_nattrans(rng, Us[1], Us[2])
            va, vb = mc.vertical_compose(ap, a), mc.vertical_compose(bp, b)
            h1, h2 = mc.horizontal_compose(b, a), mc.horizontal_compose(bp, ap)
            lhs = mc.horizontal_compose(vb, va)
            rhs = mc.vertical_compose(h2, h1)
            worst = max(worst, lhs.max_difference(rhs))
            # every composite on the way agrees with the block formulas
            pairs = [(va, oracles.vcompose_oracle(ap, a)), (vb, oracles.vcompose_oracle(bp, b)),
                     (h1, oracles.hcompose_oracle(b, a)), (h2, oracles.hcompose_oracle(bp, ap)),
                     (lhs, oracles.hcompose_oracle(vb, va)), (rhs, oracles.vcompose_oracle(h2, h1))]
            for got, want in pairs:
                for key in set(got.cells) | set(want):
                    g = got.cell(*key)
                    diff = np.abs(g - want.get(key, np.zeros_like(g)))
                    oracle_worst = max(oracle_worst, float(diff.max()) if diff.size else 0.0)
        ok = worst < 1e-9 and oracle_worst < 1e-9
        return ok, f"200 grids, max |lhs - rhs| {worst:.2e}, max deviation from block oracle {oracle_worst:.2e}"

    record(4, 30, check)


# ---------------------------------------------------------------- 5. invertibility


def test_criterion_5_invertibility():
    def check():
        mismatches, invertible, inverse_err = [], 0, 0.0
        for case in range(200):
            alpha = laws.random_invertibility_case(np.random.default_rng([5, case]))
            ok, inv = mc.is_invertible_2mor(alpha)
            want = oracles.invertibility_oracle(alpha)
            if ok != (want is not None):
                mismatches.append(("2-morphism", case))
                continue
            if ok:
                invertible += 1
                for key, m in want.items():
                    inverse_err = max(inverse_err, float(np.abs(inv.cell(*key) - m).max()))
                ident = mc.MatrixNatTrans.identity(alpha.source)
                inverse_err = max(inverse_err, mc.vertical_compose(inv, alpha).max_difference(ident))
        equivalences = 0
        for case in range(100):
            rng = np.random.default_rng([55, case])
            T = laws.random_equivalence_candidate(rng, laws.random_space(rng, 4, 0))
            got, want = mc.is_equivalence(T), oracles.brute_force_bijection(T)
            if (got is None) != (want is None) or (got is not None and tuple(got.images) != tuple(want)):
                mismatches.append(("equivalence", case))
            equivalences += got is not None
        ok = not mismatches and inverse_err < 1e-9 and 0 < invertible < 200 and 0 < equivalences < 100
        return ok, (f"200 2-morphisms ({invertible} invertible, inverse error {inverse_err:.1e}), "
                    f"100 functors ({equivalences} equivalences), mismatches {mismatches[:3]}")

    record(5, 30, check)


# ---------------------------------------------------------------- 6. classification counts


def test_criterion_6_classification_counts():
    def check():
        inv = laws.inversion_z2_z3()
        counts = (len(rt.classify_irretractables(inv)), len(rt.classify_indecomposables(inv)))
        oracle_counts = (oracles.irretractable_count(inv.G, inv.H, inv.action),
                         len(oracles.indecomposable_classes(inv.G, inv.H, inv.action)))
        ok = counts == (2, 3) == oracle_counts
        swept, bad = 0, []
        for gname, G in oracles.small_groups().items():
            for factors in oracles.SMALL_ABELIAN:
                H = tgm.FiniteAbelian(factors)
                for action in oracles.homomorphisms_to_aut(G, H):
                    tg = tgm.SkeletalTwoGroup(G, H, action)
                    got = (len(rt.classify_indecomposables(tg)), len(rt.classify_irretractables(tg)))
                    want = (len(oracles.indecomposable_classes(G, H, action)), oracles.irretractable_count(G, H, action))
                    swept += 1
                    if got != want:
                        bad.append((gname, factors, got, want))
        return ok and not bad, (f"Z2 by inversion on Z3: irretractable {counts[0]}, indecomposable {counts[1]}; "
                                f"{swept} 2-groups with |G|,|H| <= 8 swept, mismatches {bad[:3]}")

    record(6, 60, check)


# ---------------------------------------------------------------- 7. intertwiner classification and Schur


def test_criterion_7_intertwiner_classification():
    def check():
        pairs, items_seen, bad = 0, 0, []
        for name, tg in FIXTURES.items():
            classes = rt.classify_indecomposables(tg)
            for a, b in itertools.product(classes, repeat=2):
                if set(tg.dual_action[a.orbit_rep]) != set(tg.dual_action[b.orbit_rep]):
                    continue
                rho1, rho2 = a.representation, b.representation
                items = rt.classify_transitive_intertwiners(rho1, rho2)
                pairs += 1
                items_seen += len(items)
                want = oracles.diagonal_orbit_oracle(rho1, rho2)
                if len(items) != sum(k for _, k in want):
                    bad.append((name, "count"))
                for orbit, k in want:
                    if sum(1 for i in items if set(i.orbit) == orbit) != k:
                        bad.append((name, "orbit", sorted(orbit)))
                for x, y in itertools.product(items, repeat=2):
                    same = x is y
                    if (rt.intertwiner_equivalent(x.intertwiner, y.intertwiner) is not None) != same:
                        bad.append((name, "equivalence"))
                    d = len(rt.hom_2intertwiners(x.intertwiner, y.intertwiner))
                    if d != int(same) or oracles.dense_hom_dimension(x.intertwiner, y.intertwiner) != d:
                        bad.append((name, "schur", d))
        return not bad, f"{pairs} representation pairs, {items_seen} classified intertwiners, failures {bad[:3]}"

    record(7, 120, check)


# ---------------------------------------------------------------- 8. implication chains


def enumerated_reps(tg):
    classes = [c.representation for c in rt.classify_indecomposables(tg)]
    out = list(classes) + [rt.null_representation(tg)]
    out += [rt.two_sum_reps(a, b) for a, b in itertools.combinations_with_replacement(classes, 2)]
    return out


def stabilizer_matrices(it, base):
    stab = rt._pair_stabilizer(it.act, base, it.G.order)
    return [np.asarray(it.cocycle[s][base]) for s in stab]


def intertwiner_oracle(it):
    """(minimal, indecomposable, irretractable, irreducible) from the support orbits and raw cocycle cells."""
    G = it.G
    support = set(it.support)
    orbits = []
    while support:
        p = min(support)
        orbit = {it.act(p, g) for g in G.elements}
        orbits.append((p, orbit))
        support -= orbit
    if len(orbits) != 1:
        return False, oracles.dense_hom_dimension(it, it) == 1, False, False
    mats = stabilizer_matrices(it, orbits[0][0])
    n = mats[0].shape[0]
    # commutant {c : M c = c M for all M}, as one linear system
    A = np.vstack([np.kron(m, np.eye(n)) - np.kron(np.eye(n), m.T) for m in mats])
    s = np.linalg.svd(A, compute_uv=False)
    commutant = n * n - int((s > 1e-8 * max(1.0, s[0])).sum())
    norm = sum(abs(np.trace(m)) ** 2 for m in mats) / len(mats)
    return True, oracles.dense_hom_dimension(it, it) == 1, commutant == 1, abs(norm - 1) < 1e-6


def test_criterion_8_implication_chains():
    def check():
        bad, reps, its = [], 0, 0
        for name, tg in FIXTURES.items():
            enumerated = enumerated_reps(tg)
            for rho in enumerated:
                reps += 1
                dec, ret, irr = rt.is_indecomposable_rep(rho), rt.is_irretractable_rep(rho), rt.is_irreducible_rep(rho)
                if (irr and not ret) or (ret and not dec):
                    bad.append((name, "rep chain"))
                if dec != oracles.brute_indecomposable(rho) or ret != oracles.brute_irretractable(rho):
                    bad.append((name, "rep criterion"))
            classes = [c.representation for c in rt.classify_indecomposables(tg)]
            intertwiners = []
            for a, b in itertools.product(classes, repeat=2):
                try:
                    items = rt.classify_transitive_intertwiners(a, b)
                except rt.ClassificationError:
                    continue
                intertwiners += [i.intertwiner for i in items]
                intertwiners += [rt.direct_sum_intertwiners(x.intertwiner, y.intertwiner)
                                 for x, y in itertools.combinations_with_replacement(items, 2)]
                intertwiners.append(rt.null_intertwiner(a, b))
            rng = np.random.default_rng([8, len(name)])
            for _ in range(10):
                rho1, rho2 = laws.random_representation(rng, tg), laws.random_representation(rng, tg)
                intertwiners.append(laws.random_intertwiner(rng, rho1, rho2))
            for it in intertwiners:
                its += 1
                st = rt.intertwiner_reduction_status(it)
                if (st.irreducible and not st.irretractable) or (st.irretractable and not st.indecomposable):
                    bad.append((name, "intertwiner chain"))
                if it.mu.is_zero():
                    if any((st.indecomposable, st.irretractable, st.irreducible)):
                        bad.append((name, "null intertwiner"))
                    continue
                if (st.minimal, st.indecomposable, st.irretractable, st.irreducible) != intertwiner_oracle(it):
                    bad.append((name, "intertwiner criterion"))
        return not bad, f"{reps} representations, {its} intertwiners, failures {bad[:3]}"

    record(8, 30, check)


# ---------------------------------------------------------------- 9. trivialization


def test_criterion_9_trivialization():
    def check():
        bad, residual = [], 0.0
        names = sorted(FIXTURES)
        for case in range(50):
            rng = np.random.default_rng([9, case])
            tg = FIXTURES[names[case % len(names)]]
            rho1, rho2 = laws.random_representation(rng, tg), laws.random_representation(rng, tg)
            it = laws.random_intertwiner(rng, rho1, rho2)
            t = rt.trivialize(it)
            new, frames = t.intertwiner, t.iso.cells
            if not rt.verify_trivialization(t):
                bad.append((case, "verify"))
            G = it.G
            for p in it.support:
                f = np.asarray(frames[p])
                if f.shape != (it.dim(p), it.dim(p)) or abs(np.linalg.det(f)) < 1e-9:
                    bad.append((case, "frame not invertible"))
                    continue
                for g in G.elements:
                    q = it.act(p, G.inv(g))
                    # hom-solve equation: Psi^g_p A_p = A_{p g^-1} Phi^g_p
                    r = new.cocycle[g][p] @ f - np.asarray(frames[q]) @ it.cocycle[g][p]
                    scale = max(1.0, float(np.abs(it.cocycle[g][p]).max()) * float(np.abs(frames[q]).max()))
                    residual = max(residual, float(np.abs(r).max()) / scale)
            for orbit in rt.support_orbits(new):
                base = orbit[0]
                if len({new.dim(p) for p in orbit}) != 1:
                    bad.append((case, "fiber not constant"))
                # every fiber is carried onto the basepoint fiber by the identity
                for p in orbit:
                    if not any(new.act(p, G.inv(g)) == base and np.allclose(new.cocycle[g][p], np.eye(new.dim(p)),
                                                                            atol=1e-9) for g in G.elements):
                        bad.append((case, "no identity transport", p))
            if oracles.dense_hom_dimension(it, new) != oracles.dense_hom_dimension(it, it):
                bad.append((case, "hom dimension"))
        ok = not bad and residual < 1e-9
        return ok, f"50 random intertwiners, max relative hom residual {residual:.1e}, failures {bad[:3]}"

    record(9, 30, check)
