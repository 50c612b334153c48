"""Linear representations of small finite groups.

Character tables come from the class-algebra eigenvector method (Burnside,
as refined by Dixon): the class sums act on the centre of the group algebra
by commuting matrices whose common eigenvectors are the central characters.
Explicit irreducible matrices are cut out of the regular representation.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .two_group import FiniteGroup

EQ_TOL = 1e-9
CHAR_TOL = 1e-6
RANK_RTOL = 1e-8


class PrecisionError(ArithmeticError):
    """Eigenstructure too close to degenerate to decide at float precision."""


class GroupRepError(ValueError):
    pass


class GroupRep:
    """R: group -> GL(dim), one matrix per element index."""

    def __init__(self, group: FiniteGroup, matrices: Sequence, embedding: Sequence[int] | None = None,
                 check: bool = True):
        self.group = group
        mats = [np.array(m, dtype=np.complex128).reshape(np.shape(m) if np.ndim(m) == 2 else (1, 1))
                for m in matrices]
        if len(mats) != group.order:
            raise GroupRepError("one matrix per group element is required")
        d = mats[0].shape[0]
        if any(m.shape != (d, d) for m in mats):
            raise GroupRepError("matrices must be square of one size")
        for m in mats:
            m.setflags(write=False)
        self.matrices = tuple(mats)
        self.dim = d
        self.embedding = tuple(embedding) if embedding is not None else tuple(group.elements)
        if check:
            bad = self.multiplicativity_violation()
            if bad is not None:
                raise GroupRepError(f"R(a)R(b) != R(ab) at {bad}")

    def multiplicativity_violation(self):
        if not np.allclose(self.matrices[0], np.eye(self.dim), atol=EQ_TOL):
            return (0, 0)
        G = self.group
        for a in G.elements:
            for b in G.elements:
                lhs = self.matrices[a] @ self.matrices[b]
                if not np.allclose(lhs, self.matrices[G.mul(a, b)], atol=EQ_TOL * max(1.0, np.abs(lhs).max(initial=0))):
                    return (a, b)
        return None

    def __call__(self, g: int) -> np.ndarray:
        return self.matrices[g]

    @property
    def character(self) -> tuple[complex, ...]:
        """Trace on each conjugacy class, in the group's class order."""
        return tuple(complex(np.trace(self.matrices[c[0]])) for c in self.group.conjugacy_classes)

    def element_character(self) -> np.ndarray:
        return np.array([np.trace(m) for m in self.matrices])


def char_inner_product(r1: GroupRep | Sequence[complex], r2: GroupRep | Sequence[complex],
                       group: FiniteGroup | None = None) -> complex:
    """<χ1, χ2> = (1/|S|) Σ_s χ1(s) conj(χ2(s)); characters are given per class."""
    if isinstance(r1, GroupRep):
        group = r1.group
        r1 = r1.character
    if isinstance(r2, GroupRep):
        group = r2.group
        r2 = r2.character
    if group is None:
        raise ValueError("group needed for bare characters")
    sizes = [len(c) for c in group.conjugacy_classes]
    return sum(n * a * np.conj(b) for n, a, b in zip(sizes, r1, r2)) / group.order


def is_irreducible_grouprep(r: GroupRep) -> bool:
    return bool(abs(char_inner_product(r, r) - 1) < CHAR_TOL)


def commutant_basis(r1: GroupRep, r2: GroupRep | None = None, elements: Sequence[int] | None = None) -> list[np.ndarray]:
    """Basis of {M : r2(g) M = M r1(g) for all g}, via an SVD null space."""
    r2 = r1 if r2 is None else r2
    n, m = r1.dim, r2.dim
    if n * m == 0:
        return []
    gens = range(r1.group.order) if elements is None else elements
    rows = [np.kron(r2(g), np.eye(n)) - np.kron(np.eye(m), r1(g).T) for g in gens]
    return null_space_matrices(np.vstack(rows), m, n)


def null_space_matrices(system: np.ndarray, m: int, n: int) -> list[np.ndarray]:
    if system.size == 0:
        return [e.reshape(m, n) for e in np.eye(m * n, dtype=np.complex128)]
    _, s, vh = np.linalg.svd(system)
    scale = max(float(s[0]) if s.size else 0.0, 1.0)
    rank = int((s > RANK_RTOL * scale).sum())
    return [vh[i].conj().reshape(m, n) for i in range(rank, m * n)]


def commutant_dimension(r: GroupRep) -> int:
    return len(commutant_basis(r))


@dataclass(frozen=True)
class CharacterTable:
    group: FiniteGroup
    classes: tuple[tuple[int, ...], ...]
    values: np.ndarray   # rows: irreducible characters; columns: classes

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(int(round(v.real)) for v in self.values[:, 0])


def _class_matrices(G: FiniteGroup) -> list[np.ndarray]:
    classes = G.conjugacy_classes
    where = {a: i for i, c in enumerate(classes) for a in c}
    r = len(classes)
    mats = []
    for i, ci in enumerate(classes):
        m = np.zeros((r, r))
        for k, ck in enumerate(classes):
            z = ck[0]
            for x in ci:
                m[where[G.mul(G.inv(x), z)], k] += 1
        mats.append(m)
    return mats


def irreducible_characters(G: FiniteGroup, seed: int = 0, attempts: int = 8) -> CharacterTable:
    """Character table by simultaneous diagonalisation of the class matrices."""
    return _irreducible_characters(G, seed, attempts)


@lru_cache(maxsize=256)
def _irreducible_characters(G: FiniteGroup, seed: int, attempts: int) -> CharacterTable:
    classes = G.conjugacy_classes
    sizes = np.array([len(c) for c in classes], dtype=float)
    r = len(classes)
    mats = _class_matrices(G)
    rng = np.random.default_rng(seed)
    for _ in range(attempts):
        coeffs = rng.standard_normal(r)
        a = sum(c * m for c, m in zip(coeffs, mats))
        vals, vecs = np.linalg.eig(a)
        gaps = np.where(np.eye(r, dtype=bool), np.inf, np.abs(vals[:, None] - vals[None, :]))
        if r > 1 and gaps.min() < CHAR_TOL * max(1.0, np.abs(vals).max()):
            continue
        table = []
        ok = True
        for j in range(r):
            w = vecs[:, j]
            if abs(w[0]) < CHAR_TOL:
                ok = False
                break
            w = w / w[0]
            norm = float(np.sum(np.abs(w) ** 2 / sizes).real)
            deg = np.sqrt(G.order / norm)
            d = int(round(deg))
            if abs(deg - d) > CHAR_TOL or d < 1:
                ok = False
                break
            table.append(w * d / sizes)
        if not ok:
            continue
        vals_t = np.array(table)
        order = sorted(range(r), key=lambda i: (round(vals_t[i, 0].real),
                                                 tuple(np.round(-vals_t[i].real, 6)),
                                                 tuple(np.round(-vals_t[i].imag, 6))))
        vals_t = vals_t[order]
        gram = (vals_t * sizes) @ vals_t.conj().T / G.order
        if not np.allclose(gram, np.eye(r), atol=CHAR_TOL):
            continue
        return CharacterTable(G, classes, vals_t)
    raise PrecisionError("class-algebra eigenvectors are ambiguous; increase precision")


def regular_representation(G: FiniteGroup) -> GroupRep:
    n = G.order
    mats = []
    for s in G.elements:
        m = np.zeros((n, n))
        for t in G.elements:
            m[G.mul(s, t), t] = 1.0
        mats.append(m)
    return GroupRep(G, mats, check=False)


def irreducible_representations(G: FiniteGroup, seed: int = 0, attempts: int = 8) -> tuple[GroupRep, ...]:
    """One unitary irreducible representation per row of the character table."""
    return _irreducible_representations(G, seed, attempts)


@lru_cache(maxsize=256)
def _irreducible_representations(G: FiniteGroup, seed: int, attempts: int) -> tuple[GroupRep, ...]:
    table = irreducible_characters(G)
    reg = regular_representation(G)
    where = {a: i for i, c in enumerate(table.classes) for a in c}
    rng = np.random.default_rng(seed)
    reps = []
    for row in table.values:
        d = int(round(row[0].real))
        chi = np.array([row[where[s]] for s in G.elements])
        proj = d / G.order * sum(np.conj(chi[s]) * reg(s) for s in G.elements)
        u, sv, _ = np.linalg.svd(proj)
        basis = u[:, : int((sv > 0.5).sum())]          # isotypic block, dimension d^2
        iso = [basis.conj().T @ reg(s) @ basis for s in G.elements]
        rep = None
        for _ in range(attempts):
            a = rng.standard_normal((d * d, d * d)) + 1j * rng.standard_normal((d * d, d * d))
            a = a + a.conj().T
            e = sum(m @ a @ m.conj().T for m in iso) / G.order
            w, v = np.linalg.eigh(e)
            # each eigenvalue of a generic commutant element has multiplicity d
            groups = [list(range(i, i + d)) for i in range(0, d * d, d)]
            spread = max(w[g[-1]] - w[g[0]] for g in groups)
            sep = min((w[groups[i + 1][0]] - w[groups[i][-1]] for i in range(len(groups) - 1)), default=np.inf)
            if spread > CHAR_TOL or sep < 1e3 * max(spread, 1e-12):
                continue
            vv = v[:, groups[0]]
            mats = [vv.conj().T @ m @ vv for m in iso]
            cand = GroupRep(G, mats, check=False)
            if cand.multiplicativity_violation() is None and np.allclose(cand.element_character(), chi, atol=CHAR_TOL):
                rep = cand
                break
        if rep is None:
            raise PrecisionError("could not isolate an irreducible block; increase precision")
        reps.append(rep)
    return tuple(reps)


def trivial_rep(G: FiniteGroup, dim: int = 1) -> GroupRep:
    return GroupRep(G, [np.eye(dim)] * G.order, check=False)


def direct_sum_grouprep(r1: GroupRep, r2: GroupRep) -> GroupRep:
    mats = []
    for a, b in zip(r1.matrices, r2.matrices):
        m = np.zeros((r1.dim + r2.dim,) * 2, dtype=np.complex128)
        m[:r1.dim, :r1.dim] = a
        m[r1.dim:, r1.dim:] = b
        mats.append(m)
    return GroupRep(r1.group, mats, r1.embedding, check=False)
