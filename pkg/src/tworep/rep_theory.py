"""Representations of a finite skeletal 2-group on measurable categories H^X.

A representation is a right G-action on a finite set X with an equivariant
map chi: X -> H*.  An intertwiner rho1 -> rho2 is an equivariant, fiberwise
Y-indexed family of measures on X, a field of dimensions and a cocycle
Phi^g_{y,x}: phi_{y,x} -> phi_{(y,x)g^{-1}}.  A 2-intertwiner is a field of
matrices m_{y,x} with Psi^g m = m_{(y,x)g^{-1}} Phi^g.

Points of Y×X are handled as index pairs (yi, xi).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Optional, Sequence

import numpy as np

from . import meas2cat as mc
from .grouprep import (CharacterTable, GroupRep, char_inner_product, commutant_basis, commutant_dimension,
                       irreducible_characters, irreducible_representations, is_irreducible_grouprep,
                       null_space_matrices)
from .measure_core import FiniteMeasure, FiniteSpace, MeasureFamily, is_minimal_family
from .two_group import Character, FiniteGroup, SkeletalTwoGroup, character_index

TOL = 1e-9
RANK_RTOL = 1e-8

Pair = tuple[int, int]


class RepresentationError(ValueError):
    def __init__(self, message: str, witness: tuple = ()):
        super().__init__(message + (f" (witness {witness})" if witness else ""))
        self.witness = witness


class IntertwinerError(ValueError):
    def __init__(self, condition: str, witness: tuple = ()):
        super().__init__(f"{condition}" + (f" (witness {witness})" if witness else ""))
        self.condition = condition
        self.witness = witness


class ClassificationError(ValueError):
    pass


def _close(a: np.ndarray, b: np.ndarray, tol: float = TOL) -> bool:
    if a.shape != b.shape:
        return False
    if a.size == 0:
        return True
    scale = max(1.0, float(np.abs(a).max()), float(np.abs(b).max()))
    return float(np.abs(a - b).max()) <= tol * scale


def _full_rank(m: np.ndarray) -> bool:
    if m.shape[0] != m.shape[1]:
        return False
    if m.size == 0:
        return True
    s = np.linalg.svd(m, compute_uv=False)
    return bool(s[-1] > RANK_RTOL * max(float(s[0]), 1.0))


class GAction:
    """A right action x·g of a finite group on a finite space; table[x][g] = x·g."""

    def __init__(self, group: FiniteGroup, space: FiniteSpace, table):
        self.group = group
        self.space = space
        if isinstance(table, Mapping):
            rows = []
            for x in space:
                imgs = table[x]
                rows.append([space.index(v) if isinstance(v, str) else int(v) for v in imgs])
            arr = np.array(rows, dtype=np.int64).reshape(len(space), group.order)
        else:
            arr = np.array(table, dtype=np.int64).reshape(len(space), group.order)
        if arr.size and (arr.min() < 0 or arr.max() >= len(space)):
            raise RepresentationError("action table entry out of range")
        arr.setflags(write=False)
        self.table = arr
        for xi in range(len(space)):
            if arr[xi, 0] != xi:
                raise RepresentationError("x·1 != x", (space.points[xi],))
            for a in group.elements:
                for b in group.elements:
                    if arr[arr[xi, a], b] != arr[xi, group.mul(a, b)]:
                        raise RepresentationError("(x·a)·b != x·(ab)", (space.points[xi], a, b))

    @property
    def order(self) -> int:
        return self.group.order

    def act_index(self, i: int, g: int) -> int:
        return int(self.table[i, g])

    def act(self, x: str, g: int) -> str:
        return self.space.points[self.table[self.space.index(x), g]]

    def inverse(self, g: int) -> int:
        return self.group.inv(g)

    def orbits(self) -> tuple[tuple[int, ...], ...]:
        seen: set[int] = set()
        out = []
        for xi in range(len(self.space)):
            if xi not in seen:
                orb = tuple(sorted(set(int(v) for v in self.table[xi])))
                seen.update(orb)
                out.append(orb)
        return tuple(out)

    def stabilizer(self, i: int) -> frozenset[int]:
        return frozenset(g for g in self.group.elements if self.table[i, g] == i)

    def __eq__(self, other):
        return (isinstance(other, GAction) and self.group == other.group and self.space == other.space
                and np.array_equal(self.table, other.table))

    def __hash__(self):
        return hash((self.space, self.table.tobytes()))


class Representation:
    """rho = (X, ◁, chi) with chi(x·g) = chi(x)_g.  ``chi[i]`` is an index into H*."""

    def __init__(self, twogroup: SkeletalTwoGroup, action: GAction, chi: Sequence[int]):
        self.twogroup = twogroup
        self.action = action
        self.chi = tuple(int(c) for c in chi)

    @property
    def space(self) -> FiniteSpace:
        return self.action.space

    def character(self, x: str) -> Character:
        return self.twogroup.dual[self.chi[self.space.index(x)]]

    def pullback(self, g: int) -> mc.Pullback:
        """rho(g) is the pullback along x -> x·g."""
        return mc.Pullback(self.space, self.space, tuple(int(v) for v in self.action.table[:, g]))

    def rho_functor(self, g: int) -> mc.MatrixFunctor:
        return mc.pullback_functor(self.pullback(g))

    def rho_2morphism(self, g: int, h: int) -> mc.MatrixNatTrans:
        """rho(g, h): the scalar 2-automorphism x -> chi(x)[h] of rho(g)."""
        helem = self.twogroup.H.elements[h]
        c = [self.twogroup.dual[self.chi[xi]].value(helem) for xi in range(len(self.space))]
        return mc.scalar_2auto(self.pullback(g), c)

    def __eq__(self, other):
        return (isinstance(other, Representation) and self.twogroup == other.twogroup
                and self.action == other.action and self.chi == other.chi)

    def __hash__(self):
        return hash((self.action, self.chi))

    def __repr__(self):
        return f"Representation(|X|={len(self.space)})"


def _character_index(tg: SkeletalTwoGroup, c) -> int:
    if isinstance(c, Character):
        return character_index(tg.H, c)
    if isinstance(c, (int, np.integer)):
        if not 0 <= int(c) < tg.H.order:
            raise RepresentationError(f"character index {c} out of range")
        return int(c)
    return tg.H.index(tuple(c))


def make_representation(twogroup: SkeletalTwoGroup, action: GAction,
                        chi: Mapping[str, object] | Sequence[object]) -> Representation:
    if action.group != twogroup.G:
        raise RepresentationError("action is not by the 2-group's G")
    X = action.space
    vals = [chi[x] for x in X] if isinstance(chi, Mapping) else list(chi)
    if len(vals) != len(X):
        raise RepresentationError("chi needs one character per point")
    idx = [_character_index(twogroup, c) for c in vals]
    dual_act = twogroup.dual_action
    for xi in range(len(X)):
        for g in twogroup.G.elements:
            if idx[action.act_index(xi, g)] != dual_act[idx[xi], g]:
                raise RepresentationError("chi(x·g) != chi(x)_g", (X.points[xi], g))
    return Representation(twogroup, action, idx)


def null_representation(tg: SkeletalTwoGroup) -> Representation:
    return Representation(tg, GAction(tg.G, FiniteSpace(()), np.zeros((0, tg.G.order))), ())


def coset_representation(tg: SkeletalTwoGroup, chi_o: int, S: frozenset[int]) -> Representation:
    """X = S\\G with right translation and chi(Sg) = (chi_o)_g; needs S to fix chi_o."""
    G = tg.G
    if any(tg.dual_action[chi_o, s] != chi_o for s in S):
        raise RepresentationError("S does not fix the base character")
    coset_of: dict[int, int] = {}
    reps = []
    for g in G.elements:
        if g not in coset_of:
            for s in S:
                coset_of[G.mul(s, g)] = len(reps)
            reps.append(g)
    labels = tuple(G.names[r] for r in reps)
    table = [[coset_of[G.mul(r, g)] for g in G.elements] for r in reps]
    act = GAction(G, FiniteSpace(labels), table)
    return make_representation(tg, act, [int(tg.dual_action[chi_o, r]) for r in reps])


def rep_equivalent(rho1: Representation, rho2: Representation) -> Optional[dict[str, str]]:
    """An equivariant fiber-preserving bijection f: Y -> X (rho1 on X, rho2 on Y), if any."""
    if rho1.twogroup != rho2.twogroup:
        raise RepresentationError("representations of different 2-groups")
    a1, a2 = rho1.action, rho2.action
    if len(rho1.space) != len(rho2.space):
        return None
    used: set[int] = set()
    f: dict[int, int] = {}
    orbits1 = a1.orbits()
    for orb2 in a2.orbits():
        y0 = orb2[0]
        stab = a2.stabilizer(y0)
        found = None
        for k, orb1 in enumerate(orbits1):
            if k in used or len(orb1) != len(orb2):
                continue
            for x0 in orb1:
                if rho1.chi[x0] == rho2.chi[y0] and a1.stabilizer(x0) == stab:
                    found = (k, x0)
                    break
            if found:
                break
        if found is None:
            return None
        k, x0 = found
        used.add(k)
        for g in rho1.twogroup.G.elements:
            f[a2.act_index(y0, g)] = a1.act_index(x0, g)
    return {rho2.space.points[yi]: rho1.space.points[xi] for yi, xi in sorted(f.items())}


def is_indecomposable_rep(rho: Representation) -> bool:
    return len(rho.space) > 0 and len(rho.action.orbits()) == 1


def is_irretractable_rep(rho: Representation) -> bool:
    """chi is a bijection onto a single G-orbit of H*."""
    if not len(rho.space):
        return False
    orbit = set(int(v) for v in rho.twogroup.dual_action[rho.chi[0]])
    return len(set(rho.chi)) == len(rho.chi) and set(rho.chi) == orbit


def is_irreducible_rep(rho: Representation) -> bool:
    """For representations, irreducible and irretractable coincide; tested via fibers and orbits."""
    if not len(rho.space) or len(rho.action.orbits()) != 1:
        return False
    fibers: dict[int, int] = {}
    for c in rho.chi:
        fibers[c] = fibers.get(c, 0) + 1
    return all(n == 1 for n in fibers.values())


@dataclass(frozen=True)
class IndecomposableClass:
    orbit_rep: int             # index in H* of the orbit representative chi_o
    subgroup: frozenset[int]   # S ⊆ S*_o, up to conjugation in S*_o
    representation: Representation


def classify_indecomposables(tg: SkeletalTwoGroup) -> list[IndecomposableClass]:
    out = []
    for orbit in tg.dual_orbits:
        c = orbit[0]
        stab = tg.character_stabilizer(c)
        for S in tg.G.subgroup_classes(stab):
            out.append(IndecomposableClass(c, S, coset_representation(tg, c, S)))
    return out


def classify_irretractables(tg: SkeletalTwoGroup) -> list[Representation]:
    """One representation per G-orbit of H*: X is the orbit and chi the inclusion."""
    out = []
    for orbit in tg.dual_orbits:
        labels = tuple("chi(" + ",".join(map(str, tg.dual[c].exponents)) + ")" for c in orbit)
        pos = {c: i for i, c in enumerate(orbit)}
        table = [[pos[int(tg.dual_action[c, g])] for g in tg.G.elements] for c in orbit]
        out.append(make_representation(tg, GAction(tg.G, FiniteSpace(labels), table), list(orbit)))
    return out


def two_sum_reps(rho: Representation, rhop: Representation) -> Representation:
    if rho.twogroup != rhop.twogroup:
        raise RepresentationError("representations of different 2-groups")
    n = len(rho.space)
    table = np.vstack([rho.action.table, rhop.action.table + n]) if n + len(rhop.space) else rho.action.table
    act = GAction(rho.twogroup.G, rho.space.disjoint_union(rhop.space), table)
    return Representation(rho.twogroup, act, rho.chi + rhop.chi)


# ---------------------------------------------------------------- intertwiners

Cocycle = dict[int, dict[Pair, np.ndarray]]


class Intertwiner:
    """(mu, phi, Phi) between rho1 (on X) and rho2 (on Y); built by :func:`make_intertwiner`."""

    def __init__(self, source: Representation, target: Representation, mu: MeasureFamily,
                 phi: mc.HilbertField, cocycle: Cocycle):
        self.source = source
        self.target = target
        self.mu = mu
        self.functor = mc.MatrixFunctor(phi, mu)
        self.cocycle = cocycle
        self.support: tuple[Pair, ...] = mu.support_pairs()

    @property
    def phi(self) -> mc.HilbertField:
        return self.functor.field

    def dim(self, p: Pair) -> int:
        return int(self.functor.dims[p])

    def act(self, p: Pair, g: int) -> Pair:
        """(y, x)·g."""
        return self.target.action.act_index(p[0], g), self.source.action.act_index(p[1], g)

    def Phi(self, g: int, p: Pair) -> np.ndarray:
        m = self.cocycle[g].get(p)
        if m is None:
            q = self.act(p, self.G.inv(g))
            return np.zeros((self.dim(q), self.dim(p)), dtype=np.complex128)
        return m

    @property
    def G(self) -> FiniteGroup:
        return self.source.twogroup.G

    def inverse_cell(self, g: int, p: Pair) -> np.ndarray:
        """Phi^{g^{-1}}_{p g^{-1}}, which is the inverse of Phi^g_p."""
        return self.Phi(self.G.inv(g), self.act(p, self.G.inv(g)))

    def inverse_table(self) -> dict[int, dict[Pair, np.ndarray]]:
        """g -> {p: (Phi^g_p)^{-1}}, read off the cocycle rather than inverted numerically."""
        return {g: {p: self.inverse_cell(g, p) for p in self.support} for g in self.G.elements}

    def labels(self, p: Pair) -> tuple[str, str]:
        return self.target.space.points[p[0]], self.source.space.points[p[1]]

    def __repr__(self):
        return f"Intertwiner(|supp|={len(self.support)})"


def _cocycle_from_input(cocycle, rho1: Representation, rho2: Representation, support: Sequence[Pair]) -> Cocycle:
    G = rho1.twogroup.G
    out: Cocycle = {}
    for g in G.elements:
        cells = {}
        if callable(cocycle):
            for p in support:
                cells[p] = np.array(cocycle(g, p), dtype=np.complex128)
        else:
            given = cocycle.get(g, cocycle.get(str(g), {}))
            for key, m in given.items():
                if isinstance(key[0], str):
                    p = (rho2.space.index(key[0]), rho1.space.index(key[1]))
                else:
                    p = (int(key[0]), int(key[1]))
                cells[p] = np.array(m, dtype=np.complex128)
        for p, m in cells.items():
            if m.ndim == 0:
                cells[p] = m.reshape(1, 1)
        out[g] = cells
    return out


def make_intertwiner(rho1: Representation, rho2: Representation, mu: MeasureFamily,
                     phi: mc.HilbertField | Mapping, cocycle) -> Intertwiner:
    """Validate (mu, phi, Phi) and return the intertwiner rho1 -> rho2.

    ``cocycle`` maps each group element g to cells keyed by (y, x) labels
    (or index pairs), or is a callable ``(g, (yi, xi)) -> matrix``.  Cells are
    required on the support of mu, which serves as the full-mass set.
    """
    if rho1.twogroup != rho2.twogroup:
        raise IntertwinerError("representations of different 2-groups")
    X, Y = rho1.space, rho2.space
    if mu.index != Y or mu.base != X:
        raise IntertwinerError("mu must be a Y-indexed family on X")
    if not isinstance(phi, mc.HilbertField):
        phi = mc.HilbertField(Y, X, phi)
    if phi.index != Y or phi.base != X:
        raise IntertwinerError("phi must be a field on Y×X")
    G = rho1.twogroup.G
    a1, a2 = rho1.action, rho2.action
    support = mu.support_pairs()
    supp_set = set(support)
    for g in G.elements:
        for yi in range(len(Y)):
            moved = {a1.act_index(xi, g) for xi in mu.members[yi].support_indices()}
            if set(mu.members[a2.act_index(yi, g)].support_indices()) != moved:
                raise IntertwinerError("mu is not equivariant", (g, Y.points[yi]))
    for yi, xi in support:
        if rho1.chi[xi] != rho2.chi[yi]:
            raise IntertwinerError("mu is not fiberwise", (Y.points[yi], X.points[xi]))
        if phi.dims[yi, xi] <= 0:
            raise IntertwinerError("phi vanishes on the support of mu", (Y.points[yi], X.points[xi]))
    cells = _cocycle_from_input(cocycle, rho1, rho2, support)
    it = Intertwiner(rho1, rho2, mu, phi, {g: {p: m for p, m in cells[g].items() if p in supp_set}
                                            for g in G.elements})
    check_cocycle(it)
    return it


def check_cocycle(it: Intertwiner) -> None:
    G = it.G

    def lab(p):
        return it.labels(p)

    for g in G.elements:
        ginv = G.inv(g)
        for p in it.support:
            m = it.cocycle[g].get(p)
            if m is None:
                raise IntertwinerError("cocycle missing", (g, *lab(p)))
            q = it.act(p, ginv)
            if m.shape != (it.dim(q), it.dim(p)):
                raise IntertwinerError("cocycle cell has the wrong shape", (g, *lab(p)))
            if not _full_rank(m):
                raise IntertwinerError("cocycle cell is not invertible", (g, *lab(p)))
    for p in it.support:
        if not _close(it.cocycle[0][p], np.eye(it.dim(p))):
            raise IntertwinerError("Phi^1 is not the identity", (0, *lab(p)))
    for g in G.elements:
        for gp in G.elements:
            ggp = G.mul(gp, g)
            for p in it.support:
                q = it.act(p, G.inv(g))
                if not _close(it.cocycle[ggp][p], it.cocycle[gp][q] @ it.cocycle[g][p]):
                    raise IntertwinerError("cocycle condition fails", (g, gp, *lab(p)))


def identity_intertwiner(rho: Representation) -> Intertwiner:
    X = rho.space
    n = len(X)
    mu = MeasureFamily.dirac(X)
    phi = mc.HilbertField(X, X, np.eye(n, dtype=np.int64))
    return make_intertwiner(rho, rho, mu, phi, lambda g, p: np.eye(1))


def null_intertwiner(rho1: Representation, rho2: Representation) -> Intertwiner:
    mu = MeasureFamily.zero(rho2.space, rho1.space)
    phi = mc.HilbertField(rho2.space, rho1.space, np.zeros((len(rho2.space), len(rho1.space)), dtype=np.int64))
    return make_intertwiner(rho1, rho2, mu, phi, {})


def _pair_orbits(it_act: Callable[[Pair, int], Pair], points: Sequence[Pair], order: int) -> list[tuple[Pair, ...]]:
    remaining = set(points)
    out = []
    for p in sorted(points):
        if p in remaining:
            orb = tuple(sorted({it_act(p, g) for g in range(order)}))
            remaining.difference_update(orb)
            out.append(orb)
    return out


def support_orbits(it: Intertwiner) -> list[tuple[Pair, ...]]:
    return _pair_orbits(it.act, it.support, it.G.order)


def is_transitive_intertwiner(it: Intertwiner) -> Optional[tuple[tuple[str, str], ...]]:
    """The single diagonal orbit carrying mu, or None."""
    orbits = support_orbits(it)
    if len(orbits) != 1:
        return None
    return tuple(it.labels(p) for p in orbits[0])


def _section(it_act, base: Pair, orbit: Sequence[Pair], order: int) -> dict[Pair, int]:
    """sigma(p) = smallest g with base·g = p."""
    sec: dict[Pair, int] = {}
    for g in range(order):
        q = it_act(base, g)
        if q not in sec:
            sec[q] = g
    return {p: sec[p] for p in orbit}


def _pair_stabilizer(it_act, p: Pair, order: int) -> tuple[int, ...]:
    return tuple(g for g in range(order) if it_act(p, g) == p)


def compose_intertwiners(psi: Intertwiner, phi: Intertwiner) -> Intertwiner:
    """psi∘phi with cocycle [1_psi ∘ phi(g)]·[psi(g) ∘ 1_phi] (plus the re-bracketing permutations)."""
    if psi.source != phi.target:
        raise IntertwinerError("intertwiners do not chain")
    rho1, rho2, rho3 = phi.source, phi.target, psi.target
    G = rho1.twogroup.G
    F, E = psi.functor, phi.functor
    composite = mc.compose_functors(F, E)
    cocycle: Cocycle = {}
    for g in G.elements:
        P1, P2, P3 = rho1.rho_functor(g), rho2.rho_functor(g), rho3.rho_functor(g)
        phi_g = pseudonatural_component(phi, g)
        psi_g = pseudonatural_component(psi, g)
        A = mc.whisker(phi_g, F, "left")                          # F(P2 E) => F(E P1)
        B = mc.whisker(psi_g, E, "right")                         # (P3 F)E => (F P2)E
        a0 = mc.composition_associator(P3, F, E)                  # (P3 F)E => P3(F E)
        a1 = mc.composition_associator(F, P2, E)                  # (F P2)E => F(P2 E)
        a2 = mc.composition_associator(F, E, P1)                  # (F E)P1 => F(E P1)
        xi = mc.adjoint(a0)
        for step in (B, a1, A, mc.adjoint(a2)):
            xi = mc.vertical_compose(step, xi)
        cells = {}
        for (zi, xi_) in composite.measures.support_pairs():
            z_prev = rho3.action.act_index(zi, G.inv(g))
            cells[(zi, xi_)] = xi.cell(z_prev, xi_)
        cocycle[g] = cells
    return make_intertwiner(rho1, rho3, composite.measures, composite.field, cocycle)


def pseudonatural_component(it: Intertwiner, g: int) -> mc.MatrixNatTrans:
    """phi(g): rho2(g)∘phi => phi∘rho1(g), with cells Phi^g_{y·g, x}."""
    src = mc.compose_functors(it.target.rho_functor(g), it.functor)
    tgt = mc.compose_functors(it.functor, it.source.rho_functor(g))
    cells = {}
    for yi in range(len(it.target.space)):
        yg = it.target.action.act_index(yi, g)
        for xi in it.mu.members[yg].support_indices():
            cells[(yi, xi)] = it.cocycle[g][(yg, xi)]
    return mc.MatrixNatTrans(src, tgt, cells, by_index=True)


def direct_sum_intertwiners(phi: Intertwiner, phip: Intertwiner) -> Intertwiner:
    if phi.source != phip.source or phi.target != phip.target:
        raise IntertwinerError("direct sums need intertwiners with the same endpoints")
    F = mc.direct_sum_functors(phi.functor, phip.functor)
    cocycle = {g: {p: mc._block_diag(phi.Phi(g, p), phip.Phi(g, p)) for p in F.measures.support_pairs()}
               for g in phi.G.elements}
    return make_intertwiner(phi.source, phi.target, F.measures, F.field, cocycle)


def _embed_intertwiner(it: Intertwiner, source: Representation, target: Representation,
                       x_off: int, y_off: int) -> Intertwiner:
    ny, nx = len(target.space), len(source.space)
    dims = np.zeros((ny, nx), dtype=np.int64)
    dims[y_off:y_off + len(it.target.space), x_off:x_off + len(it.source.space)] = it.functor.dims
    members = []
    for yi in range(ny):
        w = [0] * nx
        j = yi - y_off
        if 0 <= j < len(it.target.space):
            for xi, v in enumerate(it.mu.members[j].weights):
                w[xi + x_off] = v
        members.append(FiniteMeasure(source.space, w))
    mu = MeasureFamily(target.space, source.space, members)
    cocycle = {g: {(yi + y_off, xi + x_off): m for (yi, xi), m in cells.items()} for g, cells in it.cocycle.items()}
    return make_intertwiner(source, target, mu, mc.HilbertField(target.space, source.space, dims), cocycle)


def two_sum_intertwiners(phi: Intertwiner, phip: Intertwiner) -> Intertwiner:
    """phi ⊞ phi' built as [phi ⊞ 0] ⊕ [0 ⊞ phi']."""
    src = two_sum_reps(phi.source, phip.source)
    tgt = two_sum_reps(phi.target, phip.target)
    left = _embed_intertwiner(phi, src, tgt, 0, 0)
    right = _embed_intertwiner(phip, src, tgt, len(phi.source.space), len(phi.target.space))
    return direct_sum_intertwiners(left, right)


def stabilizer_representation(it: Intertwiner, point: tuple[str, str] | Pair) -> GroupRep:
    """s -> Phi^s_{y,x} on the diagonal stabilizer of (y, x)."""
    p = _as_pair(it, point)
    if p not in set(it.support):
        raise IntertwinerError("point is off the support of mu", it.labels(p))
    stab = _pair_stabilizer(it.act, p, it.G.order)
    S, emb = it.G.subgroup(stab)
    return GroupRep(S, [it.cocycle[s][p] for s in emb], emb)


def _as_pair(it: Intertwiner, point) -> Pair:
    if isinstance(point[0], str):
        return it.target.space.index(point[0]), it.source.space.index(point[1])
    return int(point[0]), int(point[1])


# ---------------------------------------------------------------- 2-intertwiners

class TwoIntertwiner:
    """Cells m_{y,x}: phi_{y,x} -> psi_{y,x} with Psi^g m = m_{(y,x)g^{-1}} Phi^g."""

    def __init__(self, source: Intertwiner, target: Intertwiner, cells: Mapping[Pair, np.ndarray],
                 check: bool = True):
        if source.source != target.source or source.target != target.target:
            raise IntertwinerError("2-intertwiners need parallel intertwiners")
        self.source = source
        self.target = target
        self.nattrans = mc.MatrixNatTrans(source.functor, target.functor, cells, by_index=True)
        if check:
            bad = self.rule_violation()
            if bad is not None:
                raise IntertwinerError("intertwining rule fails", bad)

    @property
    def cells(self) -> dict[Pair, np.ndarray]:
        return self.nattrans.cells

    def cell(self, p: Pair) -> np.ndarray:
        return self.nattrans.cell(*p)

    def rule_violation(self, tol: float = TOL):
        G = self.source.G
        for p in self.nattrans.support():
            for g in G.elements:
                q = self.source.act(p, G.inv(g))
                lhs = self.target.Phi(g, p) @ self.cell(p)
                rhs = self.cell(q) @ self.source.Phi(g, p)
                if not _close(lhs, rhs, tol):
                    return (g, *self.source.labels(p))
        return None

    def is_invertible(self) -> bool:
        return mc.is_invertible_2mor(self.nattrans)[0]


def identity_2intertwiner(it: Intertwiner) -> TwoIntertwiner:
    return TwoIntertwiner(it, it, mc.MatrixNatTrans.identity(it.functor).cells)


def vcompose_2int(n: TwoIntertwiner, m: TwoIntertwiner) -> TwoIntertwiner:
    """n·m for m: phi => psi and n: psi => theta."""
    if m.target is not n.source and (m.target.functor != n.source.functor or m.target.cocycle.keys() != n.source.cocycle.keys()):
        raise IntertwinerError("2-intertwiners do not compose vertically")
    nt = mc.vertical_compose(n.nattrans, m.nattrans)
    return TwoIntertwiner(m.source, n.target, nt.cells)


def hcompose_2int(n: TwoIntertwiner, m: TwoIntertwiner, *, source: Intertwiner | None = None,
                  target: Intertwiner | None = None) -> TwoIntertwiner:
    """n∘m for m: phi => phi' (rho1 -> rho2) and n: psi => psi' (rho2 -> rho3).

    The composite intertwiners are computed unless supplied.
    """
    if n.source.source != m.source.target:
        raise IntertwinerError("2-intertwiners do not compose horizontally")
    nt = mc.horizontal_compose(n.nattrans, m.nattrans)
    src = source or compose_intertwiners(n.source, m.source)
    tgt = target or compose_intertwiners(n.target, m.target)
    return TwoIntertwiner(src, tgt, nt.cells)


def _parallel(phi: Intertwiner, psi: Intertwiner) -> None:
    if phi.source != psi.source or phi.target != psi.target:
        raise IntertwinerError("intertwiners are not parallel")


def hom_2intertwiners(phi: Intertwiner, psi: Intertwiner) -> list[TwoIntertwiner]:
    """A basis of the 2-intertwiners phi => psi.

    On each diagonal orbit of supp sqrt(mu nu) the cell at a basepoint must
    commute with the stabilizer action; other cells follow by transport.
    """
    _parallel(phi, psi)
    common = sorted(set(phi.support) & set(psi.support))
    G = phi.G
    basis = []
    for orbit in _pair_orbits(phi.act, common, G.order):
        base = orbit[0]
        stab = _pair_stabilizer(phi.act, base, G.order)
        m, n = psi.dim(base), phi.dim(base)
        rows = [np.kron(psi.Phi(s, base), np.eye(n)) - np.kron(np.eye(m), phi.Phi(s, base).T) for s in stab]
        sols = null_space_matrices(np.vstack(rows), m, n)
        sec = _section(phi.act, base, orbit, G.order)
        for mo in sols:
            cells = {}
            for p in orbit:
                gi = G.inv(sec[p])
                cells[p] = psi.Phi(gi, base) @ mo @ np.linalg.inv(phi.Phi(gi, base))
            basis.append(TwoIntertwiner(phi, psi, cells))
    return basis


def linear_combination(basis: Sequence[TwoIntertwiner], coeffs: Sequence[complex]) -> TwoIntertwiner:
    phi, psi = basis[0].source, basis[0].target
    cells: dict[Pair, np.ndarray] = {}
    for b, c in zip(basis, coeffs):
        for p, m in b.cells.items():
            cells[p] = cells.get(p, 0) + c * m
    return TwoIntertwiner(phi, psi, cells, check=False)


def intertwiner_equivalent(phi: Intertwiner, psi: Intertwiner, seed: int = 0) -> Optional[TwoIntertwiner]:
    """An invertible 2-intertwiner phi => psi, or None when there is none."""
    _parallel(phi, psi)
    for a, b in zip(phi.mu.members, psi.mu.members):
        if a.support_indices() != b.support_indices():
            return None
    if not phi.support:
        return TwoIntertwiner(phi, psi, {})
    if any(phi.dim(p) != psi.dim(p) for p in phi.support):
        return None
    orbits = support_orbits(phi)
    if len(orbits) == 1:
        r1 = stabilizer_representation(phi, orbits[0][0])
        r2 = stabilizer_representation(psi, orbits[0][0])
        if abs(char_inner_product(r1, r1) - char_inner_product(r1, r2)) > 1e-6:
            return None
    basis = hom_2intertwiners(phi, psi)
    if not basis:
        return None
    rng = np.random.default_rng(seed)
    for _ in range(8):
        coeffs = rng.standard_normal(len(basis)) + 1j * rng.standard_normal(len(basis))
        m = linear_combination(basis, coeffs)
        if all(_full_rank(m.cell(p)) for p in phi.support):
            return TwoIntertwiner(phi, psi, m.cells)
    return None


@dataclass(frozen=True)
class ReductionStatus:
    null: bool
    minimal: bool
    transitive: bool
    indecomposable: bool
    irretractable: bool
    irreducible: bool


def intertwiner_reduction_status(it: Intertwiner) -> ReductionStatus:
    """Indecomposable via End(phi), irretractable via the stabilizer commutant, irreducible via characters."""
    if it.mu.is_zero():
        return ReductionStatus(True, False, False, False, False, False)
    minimal = is_minimal_family(it.mu, it.target.action, it.source.action)
    transitive = is_transitive_intertwiner(it) is not None
    if not minimal:
        return ReductionStatus(False, False, transitive, False, False, False)
    r = stabilizer_representation(it, support_orbits(it)[0][0])
    indecomposable = len(hom_2intertwiners(it, it)) == 1
    irretractable = commutant_dimension(r) == 1
    irreducible = is_irreducible_grouprep(r)
    return ReductionStatus(False, True, transitive, indecomposable, irretractable, irreducible)


@dataclass(frozen=True)
class TransitiveClass:
    orbit: tuple[Pair, ...]         # the diagonal orbit in Y×X carrying mu
    basepoint: Pair                 # (y_o, x_o)
    fiber: tuple[str, ...]          # the S_2-orbit of x_o inside the fiber over chi_2(y_o)
    stabilizer: tuple[int, ...]     # S_o as elements of G
    rep: GroupRep
    intertwiner: Intertwiner


def transitive_intertwiner(rho1: Representation, rho2: Representation, orbit: Sequence[Pair],
                           rep: GroupRep, weights: Mapping[Pair, object] | None = None) -> Intertwiner:
    """The strict intertwiner on one diagonal orbit with stabilizer representation ``rep`` at orbit[0].

    Phi^g_p = R(sigma(p·g^{-1}) g sigma(p)^{-1}), where sigma(p) is the smallest
    g carrying the basepoint to p.
    """
    G = rho1.twogroup.G
    Y, X = rho2.space, rho1.space

    def act(p, g):
        return rho2.action.act_index(p[0], g), rho1.action.act_index(p[1], g)

    base = orbit[0]
    sec = _section(act, base, orbit, G.order)
    pos = {a: i for i, a in enumerate(rep.embedding)}
    members = []
    for yi in range(len(Y)):
        w = [0] * len(X)
        for p in orbit:
            if p[0] == yi:
                w[p[1]] = 1 if weights is None else weights[p]
        members.append(FiniteMeasure(X, w))
    mu = MeasureFamily(Y, X, members)
    dims = np.zeros((len(Y), len(X)), dtype=np.int64)
    for p in orbit:
        dims[p] = rep.dim

    def cocycle(g, p):
        q = act(p, G.inv(g))
        s = G.prod(sec[q], g, G.inv(sec[p]))
        return rep(pos[s])

    return make_intertwiner(rho1, rho2, mu, mc.HilbertField(Y, X, dims), cocycle)


def classify_transitive_intertwiners(rho1: Representation, rho2: Representation,
                                     irreducible_only: bool = True) -> list[TransitiveClass]:
    """Transitive irreducible intertwiners rho1 -> rho2 up to equivalence.

    One class per diagonal orbit in the fiber product and irreducible
    representation of its stabilizer.  Over the complex numbers the
    indecomposable classes are the same, so ``irreducible_only`` does not
    change the list.
    """
    if not (is_indecomposable_rep(rho1) and is_indecomposable_rep(rho2)):
        raise ClassificationError("both representations must be indecomposable")
    tg = rho1.twogroup
    orbit1 = set(int(v) for v in tg.dual_action[rho1.chi[0]])
    if rho2.chi[0] not in orbit1:
        raise ClassificationError("representations lie over different orbits in H*")
    G = tg.G
    fiber_product = [(yi, xi) for yi in range(len(rho2.space)) for xi in range(len(rho1.space))
                     if rho2.chi[yi] == rho1.chi[xi]]

    def act(p, g):
        return rho2.action.act_index(p[0], g), rho1.action.act_index(p[1], g)

    out = []
    for orbit in _pair_orbits(act, fiber_product, G.order):
        # basepoint: y_o is the first point of Y, x_o the smallest x over it
        base = min(p for p in orbit if p[0] == 0)
        ordered = (base,) + tuple(p for p in orbit if p != base)
        stab = _pair_stabilizer(act, base, G.order)
        S, emb = G.subgroup(stab)
        fiber = tuple(rho1.space.points[p[1]] for p in orbit if p[0] == 0)
        for r in irreducible_representations(S):
            rep = GroupRep(S, r.matrices, emb, check=False)
            it = transitive_intertwiner(rho1, rho2, ordered, rep)
            out.append(TransitiveClass(tuple(sorted(orbit)), base, fiber, emb, rep, it))
    return out


# ---------------------------------------------------------------- trivialization

@dataclass(frozen=True)
class Trivialization:
    intertwiner: Intertwiner       # constant fiber along each supporting orbit
    iso: TwoIntertwiner            # original => trivialized


def trivialize(it: Intertwiner) -> Trivialization:
    """alpha_p = Phi^{sigma(p)}_p carries phi_p to the basepoint fiber of its orbit."""
    G = it.G
    alpha: dict[Pair, np.ndarray] = {}
    for orbit in support_orbits(it):
        sec = _section(it.act, orbit[0], orbit, G.order)
        for p in orbit:
            alpha[p] = it.cocycle[sec[p]][p]
    cocycle = {}
    for g in G.elements:
        cells = {}
        for p in it.support:
            q = it.act(p, G.inv(g))
            cells[p] = alpha[q] @ it.cocycle[g][p] @ np.linalg.inv(alpha[p])
        cocycle[g] = cells
    new = make_intertwiner(it.source, it.target, it.mu, it.phi, cocycle)
    return Trivialization(new, TwoIntertwiner(it, new, alpha))


def in_span(m: TwoIntertwiner, basis: Sequence[TwoIntertwiner], tol: float = TOL) -> bool:
    """Whether m is a linear combination of ``basis`` (least squares over all cells)."""
    keys = sorted(set(m.cells).union(*(b.cells for b in basis)))
    target = np.concatenate([m.cell(p).ravel() for p in keys]) if keys else np.zeros(0)
    if not target.size:
        return True
    if not basis:
        return bool(np.abs(target).max() <= tol)
    A = np.stack([np.concatenate([b.cell(p).ravel() for p in keys]) for b in basis], axis=1)
    coeffs, *_ = np.linalg.lstsq(A, target, rcond=None)
    return bool(np.abs(A @ coeffs - target).max() <= tol * max(1.0, float(np.abs(target).max())))


def verify_trivialization(t: Trivialization, tol: float = TOL) -> bool:
    """Constant fiber dimension per orbit, the rule holds, the 2-intertwiner is invertible and lies in hom."""
    it = t.intertwiner
    for orbit in support_orbits(it):
        if len({it.dim(p) for p in orbit}) != 1:
            return False
    if t.iso.rule_violation(tol) is not None or not t.iso.is_invertible():
        return False
    return in_span(t.iso, hom_2intertwiners(t.iso.source, it), tol)


__all__ = [
    "GAction", "Representation", "Intertwiner", "TwoIntertwiner", "GroupRep", "make_representation",
    "rep_equivalent", "is_indecomposable_rep", "is_irretractable_rep", "is_irreducible_rep",
    "classify_indecomposables", "classify_irretractables", "two_sum_reps", "make_intertwiner",
    "is_transitive_intertwiner", "compose_intertwiners", "direct_sum_intertwiners", "two_sum_intertwiners",
    "stabilizer_representation", "intertwiner_equivalent", "intertwiner_reduction_status",
    "classify_transitive_intertwiners", "hom_2intertwiners", "vcompose_2int", "hcompose_2int",
    "char_inner_product", "is_irreducible_grouprep", "irreducible_characters", "irreducible_representations",
    "CharacterTable", "commutant_basis", "trivialize", "identity_intertwiner", "null_intertwiner",
    "null_representation", "coset_representation", "transitive_intertwiner", "identity_2intertwiner",
    "in_span", "verify_trivialization",
]
