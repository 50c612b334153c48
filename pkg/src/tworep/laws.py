"""Seeded random instances, fixture 2-groups and the invariant suites behind ``check-laws``."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from . import meas2cat as mc
from . import rep_theory as rt
from . import two_group as tgm
from .grouprep import GroupRep, direct_sum_grouprep, irreducible_representations
from .measure_core import (FiniteMeasure, FiniteSpace, MeasureFamily, compose_families, disintegrate,
                           geometric_mean, integral_identity_holds, lebesgue_decompose, reassemble,
                           rn_derivative)
from .surd import ONE, Surd

# ---------------------------------------------------------------- fixtures


def inversion_z2_z3() -> tgm.SkeletalTwoGroup:
    G, H = tgm.cyclic(2), tgm.FiniteAbelian([3])
    return tgm.SkeletalTwoGroup(G, H, tgm.semidirect_action(G, H, {1: [[-1]]}))


def fixture_twogroups() -> dict[str, tgm.SkeletalTwoGroup]:
    """Small skeletal 2-groups covering free, fixed and mixed dual orbits and nonabelian G."""
    out = {"Z2>Z3 inversion": inversion_z2_z3()}
    out["Z2 trivial on Z2"] = tgm.SkeletalTwoGroup(tgm.cyclic(2), tgm.FiniteAbelian([2]))
    out["S3 trivial on Z2"] = tgm.SkeletalTwoGroup(tgm.symmetric(3), tgm.FiniteAbelian([2]))
    G, H = tgm.cyclic(3), tgm.FiniteAbelian([2, 2])
    out["Z3 rotating Z2^2"] = tgm.SkeletalTwoGroup(G, H, tgm.semidirect_action(G, H, {1: [[0, 1], [1, 1]]}))
    G, H = tgm.cyclic(4), tgm.FiniteAbelian([5])
    out["Z4 on Z5 by 2"] = tgm.SkeletalTwoGroup(G, H, tgm.semidirect_action(G, H, {1: [[2]]}))
    return out


def fixture_crossed_modules() -> dict[str, tgm.CrossedModule]:
    """Crossed modules with |G|·|H| <= 64, skeletal and not."""
    out = {name: tg.as_crossed_module() for name, tg in fixture_twogroups().items()}
    Z4 = tgm.cyclic(4)
    out["Z4=Z4 identity"] = tgm.validate_crossed_module(Z4, Z4, list(Z4.elements), [list(Z4.elements)] * 4)
    S3 = tgm.symmetric(3)
    out["S3=S3 conjugation"] = tgm.validate_crossed_module(
        S3, S3, list(S3.elements), [[S3.conj(g, h) for h in S3.elements] for g in S3.elements])
    D4 = tgm.dihedral(4)
    out["D4=D4 conjugation"] = tgm.validate_crossed_module(
        D4, D4, list(D4.elements), [[D4.conj(g, h) for h in D4.elements] for g in D4.elements])
    return out


# ---------------------------------------------------------------- random instances

def random_rational(rng: np.random.Generator, zero_prob: float = 0.3, max_num: int = 9) -> Fraction:
    if rng.random() < zero_prob:
        return Fraction(0)
    return Fraction(int(rng.integers(1, max_num + 1)), int(rng.integers(1, 5)))


def random_space(rng: np.random.Generator, max_size: int, min_size: int = 0, prefix: str = "p") -> FiniteSpace:
    n = int(rng.integers(min_size, max_size + 1))
    return FiniteSpace(tuple(f"{prefix}{i}" for i in range(n)))


def random_measure(rng: np.random.Generator, space: FiniteSpace, zero_prob: float = 0.3) -> FiniteMeasure:
    return FiniteMeasure(space, [random_rational(rng, zero_prob) for _ in space])


def random_family(rng: np.random.Generator, index: FiniteSpace, base: FiniteSpace,
                  zero_prob: float = 0.4) -> MeasureFamily:
    return MeasureFamily(index, base, [random_measure(rng, base, zero_prob) for _ in index])


def random_functor(rng: np.random.Generator, index: FiniteSpace, base: FiniteSpace, max_dim: int = 3,
                   zero_prob: float = 0.4) -> mc.MatrixFunctor:
    fam = random_family(rng, index, base, zero_prob)
    dims = rng.integers(1, max_dim + 1, size=(len(index), len(base)))
    return mc.MatrixFunctor(mc.HilbertField(index, base, dims), fam)


def random_matrix(rng: np.random.Generator, m: int, n: int) -> np.ndarray:
    return rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))


def random_nattrans(rng: np.random.Generator, S: mc.MatrixFunctor, T: mc.MatrixFunctor) -> mc.MatrixNatTrans:
    cells = {p: random_matrix(rng, int(T.dims[p]), int(S.dims[p])) for p in mc.MatrixNatTrans(S, T).support()}
    return mc.MatrixNatTrans(S, T, cells, by_index=True)


def random_representation(rng: np.random.Generator, tg: tgm.SkeletalTwoGroup, max_pieces: int = 2) -> rt.Representation:
    """A 2-sum of random canonical indecomposables."""
    classes = rt.classify_indecomposables(tg)
    rho = classes[int(rng.integers(len(classes)))].representation
    for _ in range(int(rng.integers(0, max_pieces))):
        rho = rt.two_sum_reps(rho, classes[int(rng.integers(len(classes)))].representation)
    return rho


def random_stabilizer_rep(rng: np.random.Generator, S: tgm.FiniteGroup, embedding, max_pieces: int = 2) -> GroupRep:
    irreps = irreducible_representations(S)
    r = irreps[int(rng.integers(len(irreps)))]
    for _ in range(int(rng.integers(0, max_pieces))):
        r = direct_sum_grouprep(r, irreps[int(rng.integers(len(irreps)))])
    c = random_matrix(rng, r.dim, r.dim) + 3 * np.eye(r.dim)
    ci = np.linalg.inv(c)
    return GroupRep(S, [c @ m @ ci for m in r.matrices], embedding, check=False)


def _diagonal_orbits(rho1: rt.Representation, rho2: rt.Representation) -> list[tuple[tuple[int, int], ...]]:
    G = rho1.twogroup.G
    pts = [(yi, xi) for yi in range(len(rho2.space)) for xi in range(len(rho1.space)) if rho2.chi[yi] == rho1.chi[xi]]

    def act(p, g):
        return rho2.action.act_index(p[0], g), rho1.action.act_index(p[1], g)

    return rt._pair_orbits(act, pts, G.order)


def gauge(it: rt.Intertwiner, frames: dict[tuple[int, int], np.ndarray]) -> rt.Intertwiner:
    """Change of frame: Phi'^g_p = A_{p g^-1} Phi^g_p A_p^-1."""
    G = it.G
    cocycle = {}
    for g in G.elements:
        cells = {}
        for p in it.support:
            q = it.act(p, G.inv(g))
            cells[p] = frames[q] @ it.cocycle[g][p] @ np.linalg.inv(frames[p])
        cocycle[g] = cells
    return rt.make_intertwiner(it.source, it.target, it.mu, it.phi, cocycle)


def random_intertwiner(rng: np.random.Generator, rho1: rt.Representation, rho2: rt.Representation,
                       max_orbits: int = 2, scramble: bool = True) -> rt.Intertwiner:
    """Sum of transitive pieces on random diagonal orbits, with random weights and frames."""
    G = rho1.twogroup.G
    orbits = _diagonal_orbits(rho1, rho2)
    it = rt.null_intertwiner(rho1, rho2)
    if not orbits:
        return it
    k = int(rng.integers(1, min(max_orbits, len(orbits)) + 1))
    chosen = sorted(rng.choice(len(orbits), size=k, replace=False).tolist())

    def act(p, g):
        return rho2.action.act_index(p[0], g), rho1.action.act_index(p[1], g)

    for c in chosen:
        orbit = orbits[c]
        S, emb = G.subgroup(rt._pair_stabilizer(act, orbit[0], G.order))
        rep = random_stabilizer_rep(rng, S, emb)
        weights = {p: random_rational(rng, zero_prob=0.0) for p in orbit}
        piece = rt.transitive_intertwiner(rho1, rho2, orbit, rep, weights)
        it = rt.direct_sum_intertwiners(it, piece)
    if scramble:
        frames = {p: random_matrix(rng, it.dim(p), it.dim(p)) + 2 * np.eye(it.dim(p)) for p in it.support}
        it = gauge(it, frames)
    return it


# ---------------------------------------------------------------- suites

@dataclass
class LawResult:
    name: str
    cases: int = 0
    failures: int = 0
    witness: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.failures == 0

    def fail(self, witness: str) -> None:
        self.failures += 1
        if self.witness is None:
            self.witness = witness

    def to_json(self) -> dict:
        return {"law": self.name, "cases": self.cases, "failures": self.failures, "ok": self.ok,
                "witness": self.witness, "exact": self.name in EXACT_LAWS}


EXACT_LAWS = {"chain rule", "null support", "three-measure identity", "mutual decomposition",
              "family associativity", "family unit", "disintegration round trip", "exchange law",
              "equivalence criterion"}


def measure_laws(rng: np.random.Generator, cases: int, max_points: int = 6) -> list[LawResult]:
    chain, null, three, mutual = (LawResult(n) for n in
                                  ("chain rule", "null support", "three-measure identity", "mutual decomposition"))
    for i in range(cases):
        X = random_space(rng, max_points, 1)
        t, u, v = (random_measure(rng, X) for _ in range(3))
        tag = f"case {i}: t={t.to_json()} u={u.to_json()}"
        g = geometric_mean(t, u)
        dtu, dut = rn_derivative(t, u), rn_derivative(u, t)
        chain.cases += 1
        if any(dtu[x] * dut[x] != ONE for x in g.support()):
            chain.fail(tag)
        null.cases += 1
        if set(X.points) - g.support() != (set(X.points) - t.support()) | (set(X.points) - u.support()):
            null.fail(tag)
        three.cases += 1
        gtv = geometric_mean(t, v)
        dvu, dvt, duv = rn_derivative(v, u), rn_derivative(v, t), rn_derivative(u, v)
        for x in t.support() & u.support() & v.support():
            lhs = g[x] * Surd.sqrt(dvu[x])
            rhs = gtv[x] * Surd.sqrt(dvt[x]) * Surd.sqrt(duv[x]) * Surd.sqrt(dtu[x])
            if lhs != rhs:
                three.fail(tag + f" v={v.to_json()} at {x}")
                break
        mutual.cases += 1
        t_ac, t_s = lebesgue_decompose(t, u)
        u_ac, u_s = lebesgue_decompose(u, t)
        if t_ac.support() != u_ac.support() or t_s.support() & u_s.support():
            mutual.fail(tag)
    return [chain, null, three, mutual]


def family_laws(rng: np.random.Generator, cases: int, max_points: int = 4) -> list[LawResult]:
    assoc, unit, roundtrip, fubini = (LawResult(n) for n in
                                      ("family associativity", "family unit", "disintegration round trip",
                                       "integration identity"))
    for i in range(cases):
        W, Z, Y, X = (random_space(rng, max_points, 0, prefix=c) for c in "wzyx")
        v, u, t = random_family(rng, W, Z), random_family(rng, Z, Y), random_family(rng, Y, X)
        assoc.cases += 1
        left = compose_families(compose_families(v, u)[0], t)[0]
        right = compose_families(v, compose_families(u, t)[0])[0]
        if left != right:
            assoc.fail(f"case {i}")
        unit.cases += 1
        if (compose_families(t, MeasureFamily.dirac(X))[0] != t
                or compose_families(MeasureFamily.dirac(Y), t)[0] != t):
            unit.fail(f"case {i}")
        fubini.cases += 1
        if not integral_identity_holds(u, t):
            fubini.fail(f"case {i}")
        roundtrip.cases += 1
        nu = random_measure(rng, Y)
        fam = MeasureFamily(Y, X, [m if nu.weights[j] else FiniteMeasure.zero(X) for j, m in enumerate(t.members)])
        lam = reassemble(fam, nu)
        if disintegrate(lam, nu, Y, X) != fam or reassemble(disintegrate(lam, nu, Y, X), nu) != lam:
            roundtrip.fail(f"case {i}")
    return [assoc, unit, roundtrip, fubini]


def exchange_laws() -> list[LawResult]:
    res = LawResult("exchange law")
    for name, cm in fixture_crossed_modules().items():
        res.cases += 1
        bad = tgm.exchange_law_violations(cm, limit=1)
        if bad:
            res.fail(f"{name}: {bad[0]}")
    return [res]


def interchange_instance(rng: np.random.Generator, max_points: int = 4, max_dim: int = 3):
    """Random alpha: T=>T'=>T'' on X->Y and beta: U=>U'=>U'' on Y->Z; returns both sides."""
    X, Y, Z = (random_space(rng, max_points, 1, prefix=c) for c in "xyz")
    Ts = [random_functor(rng, Y, X, max_dim) for _ in range(3)]
    Us = [random_functor(rng, Z, Y, max_dim) for _ in range(3)]
    a1, a2 = random_nattrans(rng, Ts[0], Ts[1]), random_nattrans(rng, Ts[1], Ts[2])
    b1, b2 = random_nattrans(rng, Us[0], Us[1]), random_nattrans(rng, Us[1], Us[2])
    lhs = mc.horizontal_compose(mc.vertical_compose(b2, b1), mc.vertical_compose(a2, a1))
    rhs = mc.vertical_compose(mc.horizontal_compose(b2, a2), mc.horizontal_compose(b1, a1))
    return lhs, rhs


def interchange_laws(rng: np.random.Generator, cases: int) -> list[LawResult]:
    res = LawResult("interchange law")
    for i in range(cases):
        lhs, rhs = interchange_instance(rng)
        res.cases += 1
        if not lhs.allclose(rhs, 1e-9):
            res.fail(f"case {i}: max cell difference {lhs.max_difference(rhs):.3g}")
    return [res]


def random_invertibility_case(rng: np.random.Generator) -> mc.MatrixNatTrans:
    X, Y = random_space(rng, 3, 1, "x"), random_space(rng, 3, 1, "y")
    T = random_functor(rng, Y, X, 2)
    kind = rng.integers(3)
    if kind == 0:
        # same supports and dims: invertible unless a cell is made singular
        Tp = mc.MatrixFunctor(T.field, MeasureFamily(Y, X, [
            FiniteMeasure(X, [random_rational(rng, 0.0) if w else 0 for w in m.weights]) for m in T.measures.members]))
        alpha = random_nattrans(rng, T, Tp)
        if rng.random() < 0.3 and alpha.cells:
            key = sorted(alpha.cells)[0]
            c = np.array(alpha.cells[key])
            c[0] = 0
            alpha = mc.MatrixNatTrans(T, Tp, {**alpha.cells, key: c}, by_index=True)
        return alpha
    return random_nattrans(rng, T, random_functor(rng, Y, X, 2))


def invertibility_laws(rng: np.random.Generator, cases: int) -> list[LawResult]:
    inv2, equiv = LawResult("invertible 2-morphism criterion"), LawResult("equivalence criterion")
    for i in range(cases):
        alpha = random_invertibility_case(rng)
        ok, beta = mc.is_invertible_2mor(alpha)
        inv2.cases += 1
        if ok:
            one = mc.vertical_compose(beta, alpha)
            two = mc.vertical_compose(alpha, beta)
            if not (one.allclose(mc.MatrixNatTrans.identity(alpha.source))
                    and two.allclose(mc.MatrixNatTrans.identity(alpha.target))):
                inv2.fail(f"case {i}: claimed inverse fails")
        n = int(rng.integers(1, 4))
        X = FiniteSpace(tuple(f"x{j}" for j in range(n)))
        T = random_equivalence_candidate(rng, X)
        equiv.cases += 1
        if (mc.is_equivalence(T) is not None) != brute_force_equivalence(T):
            equiv.fail(f"case {i}")
    return [inv2, equiv]


def random_equivalence_candidate(rng: np.random.Generator, X: FiniteSpace) -> mc.MatrixFunctor:
    n = len(X)
    if rng.random() < 0.5:
        perm = rng.permutation(n)
        dims = np.zeros((n, n), dtype=np.int64)
        members = []
        for y, x in enumerate(perm):
            dims[y, x] = 1 if rng.random() < 0.85 else 2
            members.append(FiniteMeasure(X, [random_rational(rng, 0.0) if j == x else 0 for j in range(n)]))
        return mc.MatrixFunctor(mc.HilbertField(X, X, dims), MeasureFamily(X, X, members))
    return random_functor(rng, X, X, 2, zero_prob=0.6)


def brute_force_equivalence(T: mc.MatrixFunctor) -> bool:
    """Search all bijections f for T ≅ H^f: each t_y ~ delta_{f(y)} with a line there."""
    n = len(T.index)
    if n != len(T.base):
        return False
    for perm in itertools.permutations(range(n)):
        if all(T.measures.members[y].support_indices() == (perm[y],) and T.dims[y, perm[y]] == 1 for y in range(n)):
            return True
    return False


def intertwiner_laws(rng: np.random.Generator, cases: int) -> list[LawResult]:
    """Cocycle validity of sums and composites, trivialization, implication chain, Schur."""
    triv, chain, comp, schur = (LawResult(n) for n in
                                ("trivialization", "implication chain", "composite cocycle", "schur lemma"))
    fixtures = list(fixture_twogroups().values())
    for i in range(cases):
        tg = fixtures[int(rng.integers(len(fixtures)))]
        rho1, rho2, rho3 = (random_representation(rng, tg) for _ in range(3))
        phi = random_intertwiner(rng, rho1, rho2)
        psi = random_intertwiner(rng, rho2, rho3)
        triv.cases += 1
        try:
            t = rt.trivialize(phi)
            if not rt.verify_trivialization(t):
                triv.fail(f"case {i}")
        except ValueError as exc:
            triv.fail(f"case {i}: {exc}")
        chain.cases += 1
        st = rt.intertwiner_reduction_status(phi)
        if (st.irreducible and not st.irretractable) or (st.irretractable and not st.indecomposable):
            chain.fail(f"case {i}: {st}")
        comp.cases += 1
        try:
            rt.compose_intertwiners(psi, phi)
        except ValueError as exc:
            comp.fail(f"case {i}: {exc}")
    for name, tg in fixture_twogroups().items():
        for a, b in itertools.combinations_with_replacement(rt.classify_indecomposables(tg), 2):
            try:
                items = rt.classify_transitive_intertwiners(a.representation, b.representation)
            except rt.ClassificationError:
                continue
            for x, y in itertools.product(items, repeat=2):
                schur.cases += 1
                d = len(rt.hom_2intertwiners(x.intertwiner, y.intertwiner))
                if d != (1 if x is y else 0):
                    schur.fail(f"{name}: hom dimension {d}")
    return [triv, chain, comp, schur]


SUITES: dict[str, Callable[[np.random.Generator, int], list[LawResult]]] = {
    "measure": measure_laws,
    "family": family_laws,
    "two_group": lambda rng, n: exchange_laws() if n else [],
    "interchange": interchange_laws,
    "invertibility": invertibility_laws,
    "intertwiner": lambda rng, n: intertwiner_laws(rng, max(1, n // 10)) if n else [],
}


def run_suites(seed: int, cases: int) -> list[LawResult]:
    out = []
    for name, suite in SUITES.items():
        rng = np.random.default_rng([seed, len(name)] + [ord(c) for c in name])
        out.extend(suite(rng, cases))
    return out


def broken_cocycle_fixture() -> tuple[rt.Representation, dict]:
    """Identity-intertwiner data on the Z2 regular representation with Phi^s = 2 (not cocyclic)."""
    tg = fixture_twogroups()["Z2 trivial on Z2"]
    rho = rt.coset_representation(tg, 0, frozenset({0}))
    cells = {0: {(y, y): [[1]] for y in rho.space}, 1: {(y, y): [[2]] for y in rho.space}}
    return rho, cells
