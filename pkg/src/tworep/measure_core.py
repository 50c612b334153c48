"""Exact measure calculus on finite labeled spaces.

Every subset of a finite space is measurable, so a measure is a weight per
point and every a.e. statement reduces to a statement about supports.
Weights are :class:`~tworep.surd.Surd` values so that geometric means stay
exact; ordinary inputs are rationals.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import chain, combinations
from typing import Iterable, Iterator, Mapping, Protocol, Sequence, Union

from .surd import ONE, ZERO, Surd

Weight = Union[int, Fraction, str, Surd]


class SpaceMismatch(ValueError):
    pass


class OutsideSupport(KeyError):
    """A density was queried at a point where it is not defined."""


class DisintegrationError(ValueError):
    def __init__(self, y: str):
        super().__init__(f"disintegration impossible: nu({y}) = 0 but lambda charges row {y}")
        self.y = y


class NotEquivariant(ValueError):
    pass


@dataclass(frozen=True)
class FiniteSpace:
    points: tuple[str, ...]

    def __post_init__(self):
        pts = tuple(str(p) for p in self.points)
        object.__setattr__(self, "points", pts)
        if len(set(pts)) != len(pts):
            seen = set()
            dup = next(p for p in pts if p in seen or seen.add(p))
            raise ValueError(f"duplicate point label {dup!r}")
        object.__setattr__(self, "_index", {p: i for i, p in enumerate(pts)})

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self) -> Iterator[str]:
        return iter(self.points)

    def __contains__(self, label) -> bool:
        return label in self._index

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise KeyError(f"{label!r} is not a point of this space") from None

    def disjoint_union(self, other: "FiniteSpace") -> "FiniteSpace":
        return FiniteSpace(tuple("L:" + p for p in self.points) + tuple("R:" + p for p in other.points))

    def product(self, other: "FiniteSpace") -> "FiniteSpace":
        return FiniteSpace(tuple(pair_label(a, b) for a in self.points for b in other.points))


def pair_label(a: str, b: str) -> str:
    return f"({a},{b})"


class FiniteMeasure:
    """A measure on a finite space, stored as one exact weight per point."""

    __slots__ = ("space", "weights")

    def __init__(self, space: FiniteSpace, weights: Mapping[str, Weight] | Sequence[Weight]):
        self.space = space
        if isinstance(weights, Mapping):
            unknown = set(weights) - set(space.points)
            if unknown:
                raise KeyError(f"weights given for unknown points {sorted(unknown)}")
            ws = tuple(Surd.of(weights.get(p, 0)) for p in space.points)
        else:
            if len(weights) != len(space):
                raise ValueError(f"expected {len(space)} weights, got {len(weights)}")
            ws = tuple(Surd.of(w) for w in weights)
        self.weights: tuple[Surd, ...] = ws

    @classmethod
    def zero(cls, space: FiniteSpace) -> "FiniteMeasure":
        return cls(space, [ZERO] * len(space))

    @classmethod
    def dirac(cls, space: FiniteSpace, point: str) -> "FiniteMeasure":
        i = space.index(point)
        return cls(space, [ONE if j == i else ZERO for j in range(len(space))])

    def __getitem__(self, point: str) -> Surd:
        return self.weights[self.space.index(point)]

    def support_indices(self) -> tuple[int, ...]:
        return tuple(i for i, w in enumerate(self.weights) if w)

    def support(self) -> frozenset[str]:
        return frozenset(self.space.points[i] for i in self.support_indices())

    def total(self) -> Surd:
        acc = ZERO
        for w in self.weights:
            acc = acc + w
        return acc

    def mass(self, subset: Iterable[str]) -> Surd:
        acc = ZERO
        for p in subset:
            acc = acc + self[p]
        return acc

    def is_zero(self) -> bool:
        return not any(self.weights)

    def __add__(self, other: "FiniteMeasure") -> "FiniteMeasure":
        _same_space(self, other)
        return FiniteMeasure(self.space, [a + b for a, b in zip(self.weights, other.weights)])

    def scale(self, c: Weight) -> "FiniteMeasure":
        c = Surd.of(c)
        return FiniteMeasure(self.space, [c * w for w in self.weights])

    def restrict(self, subset: Iterable[str]) -> "FiniteMeasure":
        keep = set(subset)
        return FiniteMeasure(self.space, [w if p in keep else ZERO for p, w in zip(self.space, self.weights)])

    def __eq__(self, other) -> bool:
        return isinstance(other, FiniteMeasure) and self.space == other.space and self.weights == other.weights

    def __hash__(self):
        return hash((self.space, self.weights))

    def __repr__(self):
        body = ", ".join(f"{p}: {w}" for p, w in zip(self.space, self.weights) if w)
        return f"FiniteMeasure({{{body}}})"

    def to_json(self) -> dict:
        return {p: w.to_json() for p, w in zip(self.space, self.weights)}


@dataclass(frozen=True)
class Density:
    """A function defined exactly on ``support``; elsewhere it has no value."""

    domain: FiniteSpace
    values: Mapping[str, Surd]

    @property
    def support(self) -> frozenset[str]:
        return frozenset(self.values)

    def __getitem__(self, point: str) -> Surd:
        if point not in self.domain:
            raise KeyError(f"{point!r} is not in the domain")
        try:
            return self.values[point]
        except KeyError:
            raise OutsideSupport(f"density undefined at {point!r}") from None

    def get(self, point: str, default=None):
        return self.values.get(point, default)

    def __mul__(self, other: "Density") -> "Density":
        if self.domain != other.domain:
            raise SpaceMismatch("densities on different spaces")
        common = [p for p in self.domain if p in self.values and p in other.values]
        return Density(self.domain, {p: self.values[p] * other.values[p] for p in common})

    def sqrt(self) -> "Density":
        return Density(self.domain, {p: Surd.sqrt(v) for p, v in self.values.items()})


def _same_space(t: FiniteMeasure, u: FiniteMeasure) -> None:
    if t.space != u.space:
        raise SpaceMismatch("measures live on different spaces")


def lebesgue_decompose(t: FiniteMeasure, u: FiniteMeasure) -> tuple[FiniteMeasure, FiniteMeasure]:
    """Split t into the part absolutely continuous w.r.t. u and the part singular to u."""
    _same_space(t, u)
    ac = [w if v else ZERO for w, v in zip(t.weights, u.weights)]
    sing = [ZERO if v else w for w, v in zip(t.weights, u.weights)]
    return FiniteMeasure(t.space, ac), FiniteMeasure(t.space, sing)


def rn_derivative(t: FiniteMeasure, u: FiniteMeasure) -> Density:
    """d t/d u, defined on support(u); the singular part of t is discarded."""
    _same_space(t, u)
    return Density(t.space, {p: w / v for p, w, v in zip(t.space, t.weights, u.weights) if v})


def geometric_mean(t: FiniteMeasure, u: FiniteMeasure) -> FiniteMeasure:
    _same_space(t, u)
    return FiniteMeasure(t.space, [Surd.sqrt(a * b) if (a and b) else ZERO for a, b in zip(t.weights, u.weights)])


def abs_continuous(t: FiniteMeasure, u: FiniteMeasure) -> bool:
    _same_space(t, u)
    return all(v or not w for w, v in zip(t.weights, u.weights))


@dataclass(frozen=True)
class MeasureRelation:
    t_ll_u: bool
    u_ll_t: bool
    equivalent: bool
    singular: bool


def compare_measures(t: FiniteMeasure, u: FiniteMeasure) -> MeasureRelation:
    _same_space(t, u)
    st, su = set(t.support_indices()), set(u.support_indices())
    return MeasureRelation(st <= su, su <= st, st == su, not (st & su))


class RightAction(Protocol):
    """What measure operations need from a group action: x·g on point indices."""

    space: FiniteSpace

    @property
    def order(self) -> int: ...

    def act_index(self, i: int, g: int) -> int: ...

    def inverse(self, g: int) -> int: ...


def transform_measure(mu: FiniteMeasure, g: int, action: RightAction) -> FiniteMeasure:
    """mu^g, the pushforward along x -> x·g."""
    if action.space != mu.space:
        raise SpaceMismatch("action is not defined on this measure's space")
    if not 0 <= g < action.order:
        raise ValueError(f"{g} is not a group element")
    out = [ZERO] * len(mu.space)
    for i, w in enumerate(mu.weights):
        out[action.act_index(i, g)] = w
    return FiniteMeasure(mu.space, out)


class MeasureFamily:
    """A Y-indexed family of measures on X."""

    __slots__ = ("index", "base", "members")

    def __init__(self, index: FiniteSpace, base: FiniteSpace,
                 members: Mapping[str, FiniteMeasure | Mapping[str, Weight]] | Sequence[FiniteMeasure]):
        self.index = index
        self.base = base
        if isinstance(members, Mapping):
            unknown = set(members) - set(index.points)
            if unknown:
                raise KeyError(f"members given for unknown index points {sorted(unknown)}")
            raw = [members.get(y) for y in index.points]
        else:
            if len(members) != len(index):
                raise ValueError(f"expected {len(index)} members, got {len(members)}")
            raw = list(members)
        ms = []
        for m in raw:
            if m is None:
                m = FiniteMeasure.zero(base)
            elif not isinstance(m, FiniteMeasure):
                m = FiniteMeasure(base, m)
            if m.space != base:
                raise SpaceMismatch("family member lives on the wrong space")
            ms.append(m)
        self.members: tuple[FiniteMeasure, ...] = tuple(ms)

    @classmethod
    def zero(cls, index: FiniteSpace, base: FiniteSpace) -> "MeasureFamily":
        return cls(index, base, [FiniteMeasure.zero(base)] * len(index))

    @classmethod
    def dirac(cls, space: FiniteSpace) -> "MeasureFamily":
        return cls(space, space, [FiniteMeasure.dirac(space, p) for p in space])

    def __getitem__(self, y: str) -> FiniteMeasure:
        return self.members[self.index.index(y)]

    def weight(self, yi: int, xi: int) -> Surd:
        return self.members[yi].weights[xi]

    def support_pairs(self) -> tuple[tuple[int, int], ...]:
        return tuple((yi, xi) for yi, m in enumerate(self.members) for xi in m.support_indices())

    def is_zero(self) -> bool:
        return all(m.is_zero() for m in self.members)

    def __add__(self, other: "MeasureFamily") -> "MeasureFamily":
        _same_family_spaces(self, other)
        return MeasureFamily(self.index, self.base, [a + b for a, b in zip(self.members, other.members)])

    def __eq__(self, other) -> bool:
        return (isinstance(other, MeasureFamily) and self.index == other.index
                and self.base == other.base and self.members == other.members)

    def __hash__(self):
        return hash((self.index, self.base, self.members))

    def __repr__(self):
        return f"MeasureFamily({ {y: m for y, m in zip(self.index, self.members)} })"

    def to_json(self) -> dict:
        return {y: m.to_json() for y, m in zip(self.index, self.members)}


def _same_family_spaces(a: MeasureFamily, b: MeasureFamily) -> None:
    if a.index != b.index or a.base != b.base:
        raise SpaceMismatch("families over different spaces")


def disintegrate(lam: FiniteMeasure, nu: FiniteMeasure, index: FiniteSpace, base: FiniteSpace) -> MeasureFamily:
    """Write lam on index×base as the nu-integral of fiber measures.

    ``lam.space`` must be ``index.product(base)`` and ``nu.space`` must be ``index``.
    Fibers over nu-null points are the zero measure.
    """
    if lam.space != index.product(base) or nu.space != index:
        raise SpaceMismatch("disintegrate needs lambda on Y×X and nu on Y")
    nx = len(base)
    members = []
    for yi, y in enumerate(index):
        row = lam.weights[yi * nx:(yi + 1) * nx]
        v = nu.weights[yi]
        if not v:
            if any(row):
                raise DisintegrationError(y)
            members.append(FiniteMeasure.zero(base))
        else:
            members.append(FiniteMeasure(base, [w / v for w in row]))
    return MeasureFamily(index, base, members)


def reassemble(family: MeasureFamily, nu: FiniteMeasure) -> FiniteMeasure:
    """Inverse of :func:`disintegrate`: sum over y of nu(y) delta_y ⊗ mu_y."""
    if nu.space != family.index:
        raise SpaceMismatch("nu must live on the family's index space")
    return FiniteMeasure(family.index.product(family.base),
                         [v * w for v, m in zip(nu.weights, family.members) for w in m.weights])


def compose_families(u: MeasureFamily, t: MeasureFamily) -> tuple[MeasureFamily, MeasureFamily]:
    """Compose u (Z-indexed on Y) after t (Y-indexed on X).

    Returns ``(ut, k)`` where ``(ut)_z = sum_y u_z(y) t_y`` and ``k`` is the
    Z×X-indexed family on Y with ``k_{z,x}(y) = u_z(y) t_y(x) / (ut)_z(x)``.
    """
    if u.base != t.index:
        raise SpaceMismatch("middle spaces do not chain")
    Z, Y, X = u.index, t.index, t.base
    ut_members = []
    k_members = []
    for um in u.members:
        terms = [[um.weights[yi] * t.members[yi].weights[xi] for yi in range(len(Y))] for xi in range(len(X))]
        totals = []
        for xi in range(len(X)):
            acc = ZERO
            for w in terms[xi]:
                acc = acc + w
            totals.append(acc)
        ut_members.append(FiniteMeasure(X, totals))
        for xi in range(len(X)):
            tot = totals[xi]
            if tot:
                k_members.append(FiniteMeasure(Y, [w / tot for w in terms[xi]]))
            else:
                k_members.append(FiniteMeasure.zero(Y))
    return MeasureFamily(Z, X, ut_members), MeasureFamily(Z.product(X), Y, k_members)


def _subsets(items: Sequence[int]) -> Iterator[tuple[int, ...]]:
    return chain.from_iterable(combinations(items, r) for r in range(len(items) + 1))


def integral_identity_holds(u: MeasureFamily, t: MeasureFamily) -> bool:
    """Check the Fubini-type identity for every indicator F on Z×Y×X.

    sum_y u_z(y) sum_x t_y(x) F(z,y,x) == sum_x (ut)_z(x) sum_y k_{z,x}(y) F(z,y,x);
    by linearity it suffices to check point indicators.
    """
    ut, k = compose_families(u, t)
    nx = len(t.base)
    for zi in range(len(u.index)):
        for yi in range(len(t.index)):
            for xi in range(nx):
                lhs = u.weight(zi, yi) * t.weight(yi, xi)
                rhs = ut.weight(zi, xi) * k.weight(zi * nx + xi, yi)
                if lhs != rhs:
                    return False
    return True


def _orbit(i: int, action: RightAction, elements: Iterable[int]) -> frozenset[int]:
    return frozenset(action.act_index(i, g) for g in elements)


def is_equivariant_family(mu: MeasureFamily, act_y: RightAction, act_x: RightAction) -> bool:
    """support(mu_{y·g}) == support(mu_y)·g for all y, g."""
    if act_y.space != mu.index or act_x.space != mu.base:
        raise SpaceMismatch("actions do not match the family's spaces")
    supports = [frozenset(m.support_indices()) for m in mu.members]
    for g in range(act_y.order):
        for yi, s in enumerate(supports):
            moved = frozenset(act_x.act_index(xi, g) for xi in s)
            if supports[act_y.act_index(yi, g)] != moved:
                return False
    return True


def is_minimal_family(mu: MeasureFamily, act_y: RightAction, act_x: RightAction) -> bool:
    """Minimal (ergodic) in the finite sense: one Y-orbit, one stabilizer orbit per fiber.

    The zero family is not minimal.
    """
    if not is_equivariant_family(mu, act_y, act_x):
        raise NotEquivariant("minimality is only defined for equivariant families")
    charged = [yi for yi, m in enumerate(mu.members) if not m.is_zero()]
    if not charged:
        return False
    orbit = _orbit(charged[0], act_y, range(act_y.order))
    if any(yi not in orbit for yi in charged):
        return False
    for yi in charged:
        stab = [g for g in range(act_y.order) if act_y.act_index(yi, g) == yi]
        supp = mu.members[yi].support_indices()
        if frozenset(supp) - _orbit(supp[0], act_x, stab):
            return False
    return True


def subsets_of(space: FiniteSpace) -> Iterator[tuple[str, ...]]:
    """All subsets of a finite space, as label tuples."""
    for combo in _subsets(range(len(space))):
        yield tuple(space.points[i] for i in combo)
