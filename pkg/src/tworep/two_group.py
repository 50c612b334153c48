"""Finite groups, crossed modules and skeletal 2-groups.

Group elements are integer indices into a Cayley table with the identity at 0.
A 2-morphism of a crossed module is a pair ``(g, h)`` of element indices.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, reduce
from typing import Iterable, Sequence

import numpy as np

MAX_ORDER = 512


class GroupError(ValueError):
    pass


@dataclass(frozen=True)
class Violation:
    axiom: str
    witness: tuple

    def __str__(self):
        return f"{self.axiom} fails at {self.witness}"


class CrossedModuleError(ValueError):
    def __init__(self, violations: Sequence[Violation]):
        self.violations = tuple(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


class FiniteGroup:
    """A group given by its Cayley table ``table[a][b] = a*b``."""

    def __init__(self, table, names: Sequence[str] | None = None, check: bool = True):
        arr = np.asarray(table, dtype=np.int64)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
            raise GroupError("Cayley table must be a nonempty square array")
        n = arr.shape[0]
        if n > MAX_ORDER:
            raise GroupError(f"order {n} exceeds the cap {MAX_ORDER}")
        arr.setflags(write=False)
        self.table = arr
        self.order = n
        self.names = tuple(names) if names is not None else tuple(str(i) for i in range(n))
        if len(self.names) != n or len(set(self.names)) != n:
            raise GroupError("names must be distinct and one per element")
        if check:
            problems = group_axiom_violations(arr)
            if problems:
                raise GroupError(str(problems[0]))
        inv = np.empty(n, dtype=np.int64)
        for a in range(n):
            inv[a] = int(np.flatnonzero(arr[a] == 0)[0])
        inv.setflags(write=False)
        self._inv = inv

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def inv(self, a: int) -> int:
        return int(self._inv[a])

    def prod(self, *elems: int) -> int:
        return reduce(self.mul, elems, 0)

    def conj(self, g: int, a: int) -> int:
        """g a g^{-1}."""
        return self.prod(g, a, self.inv(g))

    @property
    def elements(self) -> range:
        return range(self.order)

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != 0:
            x = self.mul(x, a)
            k += 1
        return k

    @cached_property
    def is_abelian(self) -> bool:
        return bool((self.table == self.table.T).all())

    def generated(self, gens: Iterable[int]) -> frozenset[int]:
        gens = list(gens)
        seen = {0}
        frontier = [0]
        while frontier:
            nxt = []
            for a in frontier:
                for g in gens:
                    b = self.mul(a, g)
                    if b not in seen:
                        seen.add(b)
                        nxt.append(b)
            frontier = nxt
        return frozenset(seen)

    @cached_property
    def subgroups(self) -> tuple[frozenset[int], ...]:
        """All subgroups, sorted by (size, sorted elements)."""
        cyclic = {self.generated([a]) for a in self.elements}
        found = set(cyclic)
        frontier = set(cyclic)
        while frontier:
            nxt = set()
            for s in frontier:
                for c in cyclic:
                    if not c <= s:
                        j = self.generated(sorted(s | c))
                        if j not in found:
                            found.add(j)
                            nxt.add(j)
            frontier = nxt
        return tuple(sorted(found, key=lambda s: (len(s), sorted(s))))

    def conjugate_subgroup(self, s: Iterable[int], g: int) -> frozenset[int]:
        """g^{-1} S g."""
        gi = self.inv(g)
        return frozenset(self.prod(gi, a, g) for a in s)

    def subgroup_classes(self, within: Iterable[int] | None = None) -> tuple[frozenset[int], ...]:
        """Representatives of subgroups of ``within`` up to conjugation by ``within``.

        The representative of each class is the first in :attr:`subgroups` order.
        """
        w = frozenset(self.elements) if within is None else frozenset(within)
        reps = []
        seen: set[frozenset[int]] = set()
        for s in self.subgroups:
            if not s <= w or s in seen:
                continue
            reps.append(s)
            seen.update(self.conjugate_subgroup(s, g) for g in w)
        return tuple(reps)

    @cached_property
    def conjugacy_classes(self) -> tuple[tuple[int, ...], ...]:
        classes = []
        seen = set()
        for a in self.elements:
            if a in seen:
                continue
            cls = sorted({self.conj(g, a) for g in self.elements})
            seen.update(cls)
            classes.append(tuple(cls))
        return tuple(classes)

    def class_of(self, a: int) -> int:
        for i, c in enumerate(self.conjugacy_classes):
            if a in c:
                return i
        raise KeyError(a)

    def subgroup(self, elems: Iterable[int]) -> tuple["FiniteGroup", tuple[int, ...]]:
        """The subgroup on ``elems`` reindexed from 0, plus the embedding into self."""
        emb = tuple(sorted(set(elems)))
        if not emb or emb[0] != 0:
            raise GroupError("a subgroup must contain the identity")
        pos = {a: i for i, a in enumerate(emb)}
        try:
            table = [[pos[self.mul(a, b)] for b in emb] for a in emb]
        except KeyError:
            raise GroupError("elements are not closed under multiplication") from None
        return FiniteGroup(table, [self.names[a] for a in emb], check=False), emb

    def __eq__(self, other):
        return isinstance(other, FiniteGroup) and np.array_equal(self.table, other.table)

    def __hash__(self):
        return hash(self.table.tobytes())

    def __repr__(self):
        return f"FiniteGroup(order={self.order})"


def group_axiom_violations(table: np.ndarray) -> list[Violation]:
    n = table.shape[0]
    if table.min() < 0 or table.max() >= n:
        return [Violation("closure", ("entry out of range",))]
    out = []
    if not (table[0] == np.arange(n)).all() or not (table[:, 0] == np.arange(n)).all():
        bad = int(np.flatnonzero((table[0] != np.arange(n)) | (table[:, 0] != np.arange(n)))[0])
        out.append(Violation("identity", (0, bad)))
    for a in range(n):
        if 0 not in table[a]:
            out.append(Violation("inverse", (a,)))
            break
    # (ab)c = a(bc), chunked over a
    for a in range(n):
        left = table[table[a]]          # left[b, c] = (a b) c
        right = table[a][table]         # right[b, c] = a (b c)
        if not (left == right).all():
            b, c = map(int, np.argwhere(left != right)[0])
            out.append(Violation("associativity", (a, b, c)))
            break
    return out


def cyclic(n: int) -> FiniteGroup:
    return FiniteGroup([[(a + b) % n for b in range(n)] for a in range(n)], check=False)


def direct_product(g1: FiniteGroup, g2: FiniteGroup) -> FiniteGroup:
    n2 = g2.order
    n = g1.order * n2
    table = [[g1.mul(a // n2, b // n2) * n2 + g2.mul(a % n2, b % n2) for b in range(n)] for a in range(n)]
    names = [f"({p},{q})" for p in g1.names for q in g2.names]
    return FiniteGroup(table, names, check=False)


def from_permutations(perms: Sequence[Sequence[int]]) -> FiniteGroup:
    """The group of a list of permutations closed under composition.

    The product ``a*b`` is "apply b, then a"; the identity must come first.
    """
    ps = [tuple(p) for p in perms]
    if ps[0] != tuple(range(len(ps[0]))):
        raise GroupError("identity permutation must be listed first")
    pos = {p: i for i, p in enumerate(ps)}
    table = [[pos[tuple(a[b[k]] for k in range(len(a)))] for b in ps] for a in ps]
    return FiniteGroup(table)


def symmetric(n: int) -> FiniteGroup:
    return from_permutations(list(itertools.permutations(range(n))))


def dihedral(n: int) -> FiniteGroup:
    """Symmetries of an n-gon, order 2n."""
    rots = [tuple((i + k) % n for i in range(n)) for k in range(n)]
    refl = [tuple((k - i) % n for i in range(n)) for k in range(n)]
    return from_permutations(rots + refl)


def quaternion() -> FiniteGroup:
    # elements ±1, ±i, ±j, ±k as (sign, unit) with unit in 1,i,j,k
    units = {("1", "1"): (1, "1"), ("1", "i"): (1, "i"), ("1", "j"): (1, "j"), ("1", "k"): (1, "k"),
             ("i", "1"): (1, "i"), ("i", "i"): (-1, "1"), ("i", "j"): (1, "k"), ("i", "k"): (-1, "j"),
             ("j", "1"): (1, "j"), ("j", "i"): (-1, "k"), ("j", "j"): (-1, "1"), ("j", "k"): (1, "i"),
             ("k", "1"): (1, "k"), ("k", "i"): (1, "j"), ("k", "j"): (-1, "i"), ("k", "k"): (-1, "1")}
    elems = [(s, u) for u in "1ijk" for s in (1, -1)]
    pos = {e: i for i, e in enumerate(elems)}
    table = []
    for s1, u1 in elems:
        row = []
        for s2, u2 in elems:
            s, u = units[(u1, u2)]
            row.append(pos[(s1 * s2 * s, u)])
        table.append(row)
    names = [("" if s > 0 else "-") + u for s, u in elems]
    return FiniteGroup(table, names)


class FiniteAbelian:
    """⊕ Z/n_i with elements as exponent tuples, indexed in lexicographic order."""

    def __init__(self, factors: Sequence[int]):
        fs = tuple(int(n) for n in factors)
        if any(n < 1 for n in fs):
            raise GroupError("cyclic factors must be positive")
        self.factors = tuple(n for n in fs if n > 1)
        self.order = math.prod(self.factors)
        if self.order > MAX_ORDER:
            raise GroupError(f"order {self.order} exceeds the cap {MAX_ORDER}")
        self.elements = tuple(itertools.product(*(range(n) for n in self.factors)))
        self._index = {e: i for i, e in enumerate(self.elements)}

    def index(self, element: Sequence[int]) -> int:
        return self._index[tuple(int(a) % n for a, n in zip(element, self.factors))]

    def add(self, a: int, b: int) -> int:
        ea, eb = self.elements[a], self.elements[b]
        return self._index[tuple((x + y) % n for x, y, n in zip(ea, eb, self.factors))]

    def neg(self, a: int) -> int:
        return self._index[tuple((-x) % n for x, n in zip(self.elements[a], self.factors))]

    def generators(self) -> tuple[int, ...]:
        k = len(self.factors)
        return tuple(self._index[tuple(1 if j == i else 0 for j in range(k))] for i in range(k))

    @cached_property
    def as_group(self) -> FiniteGroup:
        names = [",".join(map(str, e)) or "0" for e in self.elements]
        return FiniteGroup([[self.add(a, b) for b in range(self.order)] for a in range(self.order)], names, check=False)

    def __eq__(self, other):
        return isinstance(other, FiniteAbelian) and self.factors == other.factors

    def __hash__(self):
        return hash(("abelian", self.factors))

    def __repr__(self):
        return f"FiniteAbelian({list(self.factors)})"


def _prime_factors(n: int) -> list[int]:
    out, p = [], 2
    while p * p <= n:
        while n % p == 0:
            out.append(p)
            n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def abelian_decomposition(group: FiniteGroup) -> tuple[FiniteAbelian, tuple[int, ...]]:
    """Write an abelian Cayley-table group as ⊕ Z/p^k by exhaustive search.

    Returns the factor form and ``iso[i]`` = index in the factor form of element i.
    """
    if not group.is_abelian:
        raise GroupError("group is not abelian")
    n = group.order
    orders = [group.element_order(a) for a in group.elements]
    factors: list[int] = []
    for p in sorted(set(_prime_factors(n))):
        # |{x : p^j x = 0}| = p^{sum_i min(lambda_i, j)} determines the partition lambda
        counts = []
        j = 0
        while True:
            c = sum(1 for o in orders if (p ** j) % o == 0 and o > 0 and _is_p_power(o, p))
            counts.append(round(math.log(c, p)))
            if j > 0 and counts[-1] == counts[-2]:
                break
            j += 1
        parts = [counts[i + 1] - counts[i] for i in range(len(counts) - 1)]
        # parts[j] = number of lambda_i > j
        lam = [sum(1 for m in parts if m > i) for i in range(parts[0])] if parts and parts[0] else []
        factors.extend(p ** e for e in sorted(lam, reverse=True))
    target = FiniteAbelian(factors)
    gens = _find_basis(group, orders, list(target.factors))
    if gens is None:
        raise GroupError("abelian decomposition search failed")
    iso = [0] * n
    for e in target.elements:
        g = 0
        for gi, a in zip(gens, e):
            for _ in range(a):
                g = group.mul(g, gi)
        iso[g] = target.index(e)
    return target, tuple(iso)


def _is_p_power(o: int, p: int) -> bool:
    while o % p == 0:
        o //= p
    return o == 1


def _find_basis(group: FiniteGroup, orders: list[int], factors: list[int]) -> list[int] | None:
    def span(gens):
        return group.generated(gens)

    def search(chosen: list[int], rest: list[int]):
        if not rest:
            return chosen
        need = rest[0]
        size = len(span(chosen))
        for a in group.elements:
            if orders[a] == need and len(span(chosen + [a])) == size * need:
                found = search(chosen + [a], rest[1:])
                if found is not None:
                    return found
        return None

    return search([], factors)


class CrossedModule:
    """(G, H, ▷, ∂) with exhaustive validation of both compatibility equations."""

    def __init__(self, G: FiniteGroup, H: FiniteGroup, partial: Sequence[int], action,
                 H_abelian: FiniteAbelian | None = None, check: bool = True):
        self.G = G
        self.H = H
        self.partial = tuple(int(v) for v in partial)
        act = np.asarray(action, dtype=np.int64)
        act.setflags(write=False)
        self.action = act
        self.H_abelian = H_abelian
        if check:
            problems = crossed_module_violations(G, H, self.partial, act)
            if problems:
                raise CrossedModuleError(problems)

    def act(self, g: int, h: int) -> int:
        return int(self.action[g, h])

    @property
    def is_skeletal(self) -> bool:
        return all(v == 0 for v in self.partial)

    def morphisms(self) -> Iterable[tuple[int, int]]:
        return itertools.product(self.G.elements, self.H.elements)

    def target(self, u: tuple[int, int]) -> int:
        """The target of the 2-morphism (g, h): g -> ∂(h) g."""
        g, h = u
        return self.G.mul(self.partial[h], g)


def crossed_module_violations(G: FiniteGroup, H: FiniteGroup, partial: Sequence[int], action) -> list[Violation]:
    act = np.asarray(action)
    out: list[Violation] = []
    if act.shape != (G.order, H.order):
        return [Violation("action shape", (act.shape, (G.order, H.order)))]
    if len(partial) != H.order:
        return [Violation("boundary length", (len(partial), H.order))]
    if act.min() < 0 or act.max() >= H.order or min(partial) < 0 or max(partial) >= G.order:
        return [Violation("range", ("index out of range",))]
    for h in H.elements:
        for k in H.elements:
            if partial[H.mul(h, k)] != G.mul(partial[h], partial[k]):
                out.append(Violation("boundary homomorphism", (h, k)))
                break
        else:
            continue
        break
    for g in G.elements:
        if sorted(act[g]) != list(H.elements):
            out.append(Violation("action bijective", (g,)))
            return out
    if not all(act[0, h] == h for h in H.elements):
        out.append(Violation("action unit", (0,)))
    for g in G.elements:
        bad = next(((g, h, k) for h in H.elements for k in H.elements
                    if act[g, H.mul(h, k)] != H.mul(int(act[g, h]), int(act[g, k]))), None)
        if bad:
            out.append(Violation("action by automorphisms", bad))
            break
    for g in G.elements:
        bad = next(((g, g2, h) for g2 in G.elements for h in H.elements
                    if act[G.mul(g, g2), h] != act[g, act[g2, h]]), None)
        if bad:
            out.append(Violation("action law", bad))
            break
    for g in G.elements:
        bad = next(((g, h) for h in H.elements if partial[act[g, h]] != G.conj(g, partial[h])), None)
        if bad:
            out.append(Violation("comp1", bad))
            break
    bad = next(((h, k) for h in H.elements for k in H.elements
                if act[partial[h], k] != H.conj(h, k)), None)
    if bad:
        out.append(Violation("comp2", bad))
    return out


def validate_crossed_module(G: FiniteGroup, H: FiniteGroup | FiniteAbelian, partial: Sequence[int] | None = None,
                            action=None) -> CrossedModule:
    """Build a crossed module, raising :class:`CrossedModuleError` with witnesses on failure.

    ``partial`` defaults to the trivial map and ``action`` to the trivial action.
    """
    H_ab = H if isinstance(H, FiniteAbelian) else None
    Hg = H.as_group if isinstance(H, FiniteAbelian) else H
    if partial is None:
        partial = [0] * Hg.order
    if action is None:
        action = [list(Hg.elements) for _ in G.elements]
    return CrossedModule(G, Hg, partial, action, H_abelian=H_ab)


def vmul(cm: CrossedModule, u2: tuple[int, int], u1: tuple[int, int]) -> tuple[int, int]:
    """Vertical composite u2·u1 = (g, h'h), requires g' = ∂(h)g."""
    (g2, h2), (g1, h1) = u2, u1
    if g2 != cm.target(u1):
        raise ValueError(f"not vertically composable: {u2} after {u1}")
    return g1, cm.H.mul(h2, h1)


def hmul(cm: CrossedModule, u2: tuple[int, int], u1: tuple[int, int]) -> tuple[int, int]:
    """Horizontal composite u2∘u1 = (g2 g1, h2 (g2▷h1))."""
    (g2, h2), (g1, h1) = u2, u1
    return cm.G.mul(g2, g1), cm.H.mul(h2, cm.act(g2, h1))


def exchange_law_violations(cm: CrossedModule, limit: int = 1) -> list[tuple]:
    """All (or the first ``limit``) composable quadruples breaking the exchange law."""
    bad = []
    for u1 in cm.morphisms():
        for h1p in cm.H.elements:
            v1 = (cm.target(u1), h1p)
            for u2 in cm.morphisms():
                for h2p in cm.H.elements:
                    v2 = (cm.target(u2), h2p)
                    lhs = hmul(cm, vmul(cm, v2, u2), vmul(cm, v1, u1))
                    rhs = vmul(cm, hmul(cm, v2, v1), hmul(cm, u2, u1))
                    if lhs != rhs:
                        bad.append((u1, v1, u2, v2))
                        if len(bad) >= limit:
                            return bad
    return bad


class SkeletalTwoGroup:
    """G acting by automorphisms on a finite abelian H in factor form; ∂ is trivial."""

    def __init__(self, G: FiniteGroup, H: FiniteAbelian, action=None, check: bool = True):
        self.G = G
        self.H = H
        if action is None:
            action = [list(range(H.order)) for _ in G.elements]
        act = np.asarray(action, dtype=np.int64).reshape(G.order, H.order)
        act.setflags(write=False)
        self.action = act
        if check:
            problems = crossed_module_violations(G, H.as_group, [0] * H.order, act)
            if problems:
                raise CrossedModuleError(problems)

    def act(self, g: int, h: int) -> int:
        return int(self.action[g, h])

    def as_crossed_module(self) -> CrossedModule:
        return CrossedModule(self.G, self.H.as_group, [0] * self.H.order, self.action, H_abelian=self.H, check=False)

    @cached_property
    def dual(self) -> tuple["Character", ...]:
        return dual_group(self.H)

    @cached_property
    def dual_action(self) -> np.ndarray:
        """dual_action[c, g] = index of χ_c acted on by g."""
        n = len(self.dual)
        out = np.empty((n, self.G.order), dtype=np.int64)
        for c, chi in enumerate(self.dual):
            for g in self.G.elements:
                out[c, g] = character_index(self.H, act_on_character(self, chi, g))
        out.setflags(write=False)
        return out

    @cached_property
    def dual_orbits(self) -> tuple[tuple[int, ...], ...]:
        seen: set[int] = set()
        orbits = []
        for c in range(len(self.dual)):
            if c not in seen:
                orb = tuple(sorted({int(v) for v in self.dual_action[c]}))
                seen.update(orb)
                orbits.append(orb)
        return tuple(orbits)

    def character_stabilizer(self, c: int) -> frozenset[int]:
        return frozenset(g for g in self.G.elements if self.dual_action[c, g] == c)

    def __eq__(self, other):
        return (isinstance(other, SkeletalTwoGroup) and self.G == other.G and self.H == other.H
                and np.array_equal(self.action, other.action))

    def __hash__(self):
        return hash((self.G, self.H, self.action.tobytes()))

    def __repr__(self):
        return f"SkeletalTwoGroup(|G|={self.G.order}, H={list(self.H.factors)})"


@dataclass(frozen=True)
class Character:
    """χ(h) = exp(2πi Σ a_i e_i / n_i) for h = (a_1, ..., a_k)."""

    exponents: tuple[int, ...]
    factors: tuple[int, ...] = field(repr=False)

    def phase(self, h: Sequence[int]) -> Fraction:
        total = sum(Fraction(a * e, n) for a, e, n in zip(h, self.exponents, self.factors))
        return total - math.floor(total)

    def value(self, h: Sequence[int]) -> complex:
        ph = self.phase(h)
        return complex(np.exp(2j * np.pi * float(ph)))

    def __mul__(self, other: "Character") -> "Character":
        return Character(tuple((a + b) % n for a, b, n in zip(self.exponents, other.exponents, self.factors)),
                         self.factors)

    @property
    def is_trivial(self) -> bool:
        return not any(self.exponents)


def dual_group(H: FiniteAbelian) -> tuple[Character, ...]:
    return tuple(Character(e, H.factors) for e in H.elements)


def character_index(H: FiniteAbelian, chi: Character) -> int:
    return H.index(chi.exponents)


def act_on_character(tg: SkeletalTwoGroup, chi: Character, g: int) -> Character:
    """χ_g with χ_g[h] = χ[g▷h]; exponents read off on the standard generators."""
    H = tg.H
    exps = []
    for gen, n in zip(H.generators(), H.factors):
        ph = chi.phase(H.elements[tg.act(g, gen)])
        e = ph * n
        if e.denominator != 1:
            raise GroupError("acted character is not a character")
        exps.append(int(e) % n)
    return Character(tuple(exps), H.factors)


@dataclass(frozen=True)
class Skeletization:
    twogroup: SkeletalTwoGroup
    g_map: tuple[int, ...]   # G element -> Ḡ element
    h_map: tuple[int, ...]   # H element -> H̄ element (factor-form index)


def _quotient(group: FiniteGroup, normal: frozenset[int]) -> tuple[FiniteGroup, tuple[int, ...]]:
    """Coset enumeration; each coset is named by its smallest element."""
    coset_of = {}
    reps = []
    for a in group.elements:
        if a in coset_of:
            continue
        k = len(reps)
        reps.append(a)
        for s in normal:
            coset_of[group.mul(a, s)] = k
    proj = tuple(coset_of[a] for a in group.elements)
    table = [[proj[group.mul(a, b)] for b in reps] for a in reps]
    return FiniteGroup(table, [group.names[a] for a in reps]), proj


def skeletize(cm: CrossedModule) -> Skeletization:
    G, H = cm.G, cm.H
    image = frozenset(cm.partial)
    commutators = H.generated({H.prod(a, b, H.inv(a), H.inv(b)) for a in H.elements for b in H.elements})
    if len(image) == 1 and len(commutators) == 1 and cm.H_abelian is not None:
        tg = SkeletalTwoGroup(G, cm.H_abelian, cm.action, check=False)
        return Skeletization(tg, tuple(G.elements), tuple(H.elements))
    Gq, gproj = _quotient(G, image)
    Hq, hproj = _quotient(H, commutators)
    Hab, iso = abelian_decomposition(Hq)
    g_rep = [gproj.index(k) for k in range(Gq.order)]
    h_rep = [hproj.index(k) for k in range(Hq.order)]
    action = np.empty((Gq.order, Hab.order), dtype=np.int64)
    inv_iso = {v: k for k, v in enumerate(iso)}
    for gq in range(Gq.order):
        for hab in range(Hab.order):
            hq = inv_iso[hab]
            action[gq, hab] = iso[hproj[cm.act(g_rep[gq], h_rep[hq])]]
    tg = SkeletalTwoGroup(Gq, Hab, action)
    return Skeletization(tg, gproj, tuple(iso[hproj[h]] for h in H.elements))


def semidirect_action(G: FiniteGroup, H: FiniteAbelian, images: dict[int, Sequence[Sequence[int]]]) -> np.ndarray:
    """Action table from integer matrices on exponent vectors, given on generators of G.

    ``images[g]`` is a k×k integer matrix M with g▷h = M h (mod factors); the
    action is extended multiplicatively over words in the given generators.
    """
    k = len(H.factors)
    mats = {0: np.eye(k, dtype=np.int64)}
    frontier = [0]
    gens = {g: np.asarray(m, dtype=np.int64).reshape(k, k) for g, m in images.items()}
    while frontier:
        nxt = []
        for a in frontier:
            for g, m in gens.items():
                b = G.mul(a, g)
                mb = mats[a] @ m
                if b not in mats:
                    mats[b] = mb
                    nxt.append(b)
        frontier = nxt
    if len(mats) != G.order:
        raise GroupError("given elements do not generate G")
    act = np.empty((G.order, H.order), dtype=np.int64)
    for g, m in mats.items():
        for hi, h in enumerate(H.elements):
            act[g, hi] = H.index(tuple(int(v) for v in (m @ np.asarray(h, dtype=np.int64)))) if k else 0
    return act
