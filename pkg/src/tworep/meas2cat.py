"""Matrix functors and matrix natural transformations over finite spaces.

A matrix functor H^X -> H^Y is a field of dimensions on Y×X together with a
Y-indexed family of measures on X.  A matrix natural transformation is a
field of complex matrices, stored only where the geometric mean of source
and target measures is positive.

Direct integrals over finite spaces are direct sums over the support, so the
composite of U after T has, at (z, x), one block per y in the support of
k_{z,x}, in index order.  Scalar prefactors are square roots of ratios of
exact weights.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Literal, Mapping, Optional, Sequence

import numpy as np

from .measure_core import (FiniteMeasure, FiniteSpace, MeasureFamily, SpaceMismatch, compose_families,
                           geometric_mean)
from .surd import Surd

TOL = 1e-9
RANK_RTOL = 1e-8

Index2 = tuple[int, int]


class ConcentrationError(ValueError):
    pass


class ChainMismatch(ValueError):
    pass


class HilbertField:
    """Dimensions dim(y, x) of a field of Hilbert spaces on Y×X."""

    __slots__ = ("index", "base", "dims")

    def __init__(self, index: FiniteSpace, base: FiniteSpace, dims):
        self.index = index
        self.base = base
        if isinstance(dims, Mapping):
            arr = np.zeros((len(index), len(base)), dtype=np.int64)
            for y, row in dims.items():
                for x, d in row.items():
                    arr[index.index(y), base.index(x)] = int(d)
        else:
            arr = np.array(dims, dtype=np.int64).reshape(len(index), len(base))
        if (arr < 0).any():
            raise ValueError("dimensions must be nonnegative")
        arr.setflags(write=False)
        self.dims = arr

    def dim(self, y: str, x: str) -> int:
        return int(self.dims[self.index.index(y), self.base.index(x)])

    def __eq__(self, other):
        return (isinstance(other, HilbertField) and self.index == other.index and self.base == other.base
                and np.array_equal(self.dims, other.dims))

    def __hash__(self):
        return hash((self.index, self.base, self.dims.tobytes()))

    def to_json(self) -> dict:
        return {y: {x: int(self.dims[i, j]) for j, x in enumerate(self.base) if self.dims[i, j]}
                for i, y in enumerate(self.index)}


class MatrixFunctor:
    """(T, t): a field of dimensions and a family of measures concentrated on it.

    Dimensions off the support of t are set to zero: the field is only
    defined up to t-null sets and this is the canonical representative.
    """

    __slots__ = ("field", "measures")

    def __init__(self, field: HilbertField, measures: MeasureFamily):
        if field.index != measures.index or field.base != measures.base:
            raise SpaceMismatch("field and measure family live on different spaces")
        mask = np.zeros(field.dims.shape, dtype=bool)
        for yi, xi in measures.support_pairs():
            mask[yi, xi] = True
        if (field.dims[mask] <= 0).any():
            yi, xi = map(int, np.argwhere(mask & (field.dims <= 0))[0])
            raise ConcentrationError(
                f"measure t_{field.index.points[yi]} charges {field.base.points[xi]} where the dimension is 0")
        self.field = HilbertField(field.index, field.base, np.where(mask, field.dims, 0))
        self.measures = measures

    @property
    def index(self) -> FiniteSpace:
        return self.field.index

    @property
    def base(self) -> FiniteSpace:
        return self.field.base

    @property
    def dims(self) -> np.ndarray:
        return self.field.dims

    def weight(self, yi: int, xi: int) -> Surd:
        return self.measures.members[yi].weights[xi]

    @classmethod
    def identity(cls, space: FiniteSpace) -> "MatrixFunctor":
        return cls(HilbertField(space, space, np.eye(len(space), dtype=np.int64)), MeasureFamily.dirac(space))

    @classmethod
    def zero(cls, index: FiniteSpace, base: FiniteSpace) -> "MatrixFunctor":
        return cls(HilbertField(index, base, np.zeros((len(index), len(base)), dtype=np.int64)),
                   MeasureFamily.zero(index, base))

    def __eq__(self, other):
        return isinstance(other, MatrixFunctor) and self.field == other.field and self.measures == other.measures

    def __hash__(self):
        return hash((self.field, self.measures))

    def __repr__(self):
        return f"MatrixFunctor({len(self.base)} -> {len(self.index)})"


def apply_to_object(T: MatrixFunctor, H: Mapping[str, int] | Sequence[int]) -> dict[str, int]:
    """(T H)_y = sum over x in support(t_y) of dim T(y,x) * H(x)."""
    if isinstance(H, Mapping):
        if set(H) - set(T.base.points):
            raise SpaceMismatch("object has points outside the source space")
        h = [int(H.get(x, 0)) for x in T.base]
    else:
        if len(H) != len(T.base):
            raise SpaceMismatch("object has the wrong number of components")
        h = [int(v) for v in H]
    out = {}
    for yi, y in enumerate(T.index):
        out[y] = sum(int(T.dims[yi, xi]) * h[xi] for xi in T.measures.members[yi].support_indices())
    return out


@dataclass(frozen=True)
class Block:
    mid: int     # index of the middle point y
    offset: int
    left: int    # dim U(z, y)
    right: int   # dim T(y, x)

    @property
    def size(self) -> int:
        return self.left * self.right


@dataclass(frozen=True)
class Composite:
    functor: MatrixFunctor
    k: MeasureFamily                      # Z×X-indexed family on Y
    blocks: dict[Index2, tuple[Block, ...]]


def _compose(U: MatrixFunctor, T: MatrixFunctor) -> Composite:
    if U.base != T.index:
        raise ChainMismatch("middle spaces do not match")
    ut, k = compose_families(U.measures, T.measures)
    nz, nx = len(U.index), len(T.base)
    dims = np.zeros((nz, nx), dtype=np.int64)
    blocks: dict[Index2, tuple[Block, ...]] = {}
    for zi in range(nz):
        for xi in range(nx):
            off = 0
            bl = []
            for yi in k.members[zi * nx + xi].support_indices():
                b = Block(yi, off, int(U.dims[zi, yi]), int(T.dims[yi, xi]))
                bl.append(b)
                off += b.size
            dims[zi, xi] = off
            if bl:
                blocks[(zi, xi)] = tuple(bl)
    return Composite(MatrixFunctor(HilbertField(U.index, T.base, dims), ut), k, blocks)


def compose_functors(U: MatrixFunctor, T: MatrixFunctor) -> MatrixFunctor:
    """U∘T for T: H^X -> H^Y and U: H^Y -> H^Z."""
    return _compose(U, T).functor


class MatrixNatTrans:
    """A field of matrices alpha_{y,x}: T(y,x) -> T'(y,x), canonical off sqrt(t t')."""

    __slots__ = ("source", "target", "cells")

    def __init__(self, source: MatrixFunctor, target: MatrixFunctor, cells: Mapping | None = None,
                 *, by_index: bool = False):
        if source.index != target.index or source.base != target.base:
            raise SpaceMismatch("source and target are not parallel")
        self.source = source
        self.target = target
        out: dict[Index2, np.ndarray] = {}
        support = set(self.support())
        for key, mat in (cells or {}).items():
            if by_index:
                yi, xi = key
            else:
                yi, xi = source.index.index(key[0]), source.base.index(key[1])
            if (yi, xi) not in support:
                continue
            m = np.array(mat, dtype=np.complex128)
            if m.ndim == 0:
                m = m.reshape(1, 1)
            shape = (int(target.dims[yi, xi]), int(source.dims[yi, xi]))
            if m.shape != shape:
                raise ValueError(f"cell at {key} has shape {m.shape}, expected {shape}")
            m.setflags(write=False)
            out[(yi, xi)] = m
        self.cells = out

    def support(self) -> tuple[Index2, ...]:
        """Points where both source and target measures are positive."""
        s, t = self.source.measures, self.target.measures
        return tuple((yi, xi) for yi in range(len(s.index)) for xi in range(len(s.base))
                     if s.members[yi].weights[xi] and t.members[yi].weights[xi])

    def cell(self, yi: int, xi: int) -> np.ndarray:
        m = self.cells.get((yi, xi))
        if m is None:
            return np.zeros((int(self.target.dims[yi, xi]), int(self.source.dims[yi, xi])), dtype=np.complex128)
        return m

    def __getitem__(self, key: tuple[str, str]) -> np.ndarray:
        return self.cell(self.source.index.index(key[0]), self.source.base.index(key[1]))

    def allclose(self, other: "MatrixNatTrans", tol: float = TOL) -> bool:
        if self.source != other.source or self.target != other.target:
            return False
        keys = set(self.cells) | set(other.cells)
        return all(np.allclose(self.cell(*k), other.cell(*k), atol=tol, rtol=0) for k in keys)

    def max_difference(self, other: "MatrixNatTrans") -> float:
        keys = set(self.cells) | set(other.cells)
        diffs = [np.abs(self.cell(*k) - other.cell(*k)).max(initial=0.0) for k in keys]
        return float(max(diffs, default=0.0))

    @classmethod
    def identity(cls, T: MatrixFunctor) -> "MatrixNatTrans":
        cells = {(yi, xi): np.eye(int(T.dims[yi, xi])) for yi, xi in T.measures.support_pairs()}
        return cls(T, T, cells, by_index=True)

    @classmethod
    def zero(cls, source: MatrixFunctor, target: MatrixFunctor) -> "MatrixNatTrans":
        return cls(source, target, {})

    def __repr__(self):
        return f"MatrixNatTrans({len(self.cells)} cells)"


def _sqrt_ratio(num: Surd, den: Surd) -> float:
    r = num / den
    q = r.rational()
    if q is not None:
        return float(Surd(q))
    return math.sqrt(float(r))


def vertical_compose(beta: MatrixNatTrans, alpha: MatrixNatTrans) -> MatrixNatTrans:
    """beta·alpha for alpha: T => T', beta: T' => T''.

    cell = sqrt(dt''/dt) sqrt(dt'/dt'') sqrt(dt/dt') beta alpha on the support of
    sqrt(t t''); the prefactor is 1 where t' > 0 and the product vanishes where t' = 0.
    """
    if alpha.target != beta.source:
        raise ChainMismatch("alpha's target is not beta's source")
    T, Tm, Tt = alpha.source, alpha.target, beta.target
    out = {}
    for yi, xi in MatrixNatTrans(T, Tt).support():
        t, tm, tt = T.weight(yi, xi), Tm.weight(yi, xi), Tt.weight(yi, xi)
        if not tm:
            continue
        factor = Surd.sqrt((tt / t) * (tm / tt) * (t / tm))
        out[(yi, xi)] = float(factor) * (beta.cell(yi, xi) @ alpha.cell(yi, xi))
    return MatrixNatTrans(T, Tt, out, by_index=True)


CellFn = Callable[[int, int], Optional[np.ndarray]]


def _hcompose(Us: MatrixFunctor, Ut: MatrixFunctor, beta: CellFn,
              Ts: MatrixFunctor, Tt: MatrixFunctor, alpha: CellFn) -> MatrixNatTrans:
    src = _compose(Us, Ts)
    tgt = _compose(Ut, Tt)
    nx = len(Ts.base)
    out = {}
    for key, tblocks in tgt.blocks.items():
        sblocks = src.blocks.get(key)
        if sblocks is None:
            continue
        zi, xi = key
        m = np.zeros((int(tgt.functor.dims[key]), int(src.functor.dims[key])), dtype=np.complex128)
        by_mid = {b.mid: b for b in sblocks}
        kk = zi * nx + xi
        for tb in tblocks:
            sb = by_mid.get(tb.mid)
            if sb is None:
                continue
            yi = tb.mid
            b = beta(zi, yi)
            a = alpha(yi, xi)
            if b is None or a is None:
                continue
            factor = _sqrt_ratio(src.k.members[kk].weights[yi], tgt.k.members[kk].weights[yi])
            m[tb.offset:tb.offset + tb.size, sb.offset:sb.offset + sb.size] = factor * np.kron(b, a)
        out[key] = m
    return MatrixNatTrans(src.functor, tgt.functor, out, by_index=True)


def _cells_of(nt: MatrixNatTrans) -> CellFn:
    return lambda i, j: nt.cells.get((i, j))


def _identity_cells(T: MatrixFunctor) -> CellFn:
    def f(i, j):
        return np.eye(int(T.dims[i, j])) if T.weight(i, j) else None
    return f


def horizontal_compose(beta: MatrixNatTrans, alpha: MatrixNatTrans) -> MatrixNatTrans:
    """beta∘alpha for alpha: T => T' (X -> Y) and beta: U => U' (Y -> Z).

    At (z, x) the composite is block structured by y; the (y, y) block is
    sqrt(k_{z,x}(y) / k'_{z,x}(y)) beta_{z,y} ⊗ alpha_{y,x}, which is the
    product of the three square-root prefactors.
    """
    if beta.source.base != alpha.source.index:
        raise ChainMismatch("beta's source space is not alpha's target space")
    return _hcompose(beta.source, beta.target, _cells_of(beta), alpha.source, alpha.target, _cells_of(alpha))


def whisker(alpha: MatrixNatTrans, by: MatrixFunctor, side: Literal["left", "right"]) -> MatrixNatTrans:
    """``by``∘alpha (side='left') or alpha∘``by`` (side='right'), without building 1_by."""
    if side == "left":
        if by.base != alpha.source.index:
            raise ChainMismatch("cannot whisker: spaces do not chain")
        return _hcompose(by, by, _identity_cells(by), alpha.source, alpha.target, _cells_of(alpha))
    if side == "right":
        if alpha.source.base != by.index:
            raise ChainMismatch("cannot whisker: spaces do not chain")
        return _hcompose(alpha.source, alpha.target, _cells_of(alpha), by, by, _identity_cells(by))
    raise ValueError("side must be 'left' or 'right'")


@dataclass(frozen=True)
class Pullback:
    """A bijection f: Y -> X given on labels."""

    index: FiniteSpace   # Y
    base: FiniteSpace    # X
    images: tuple[int, ...]

    def __post_init__(self):
        if len(self.index) != len(self.base) or sorted(self.images) != list(range(len(self.base))):
            raise ValueError("pullback map is not a bijection")

    @classmethod
    def from_mapping(cls, index: FiniteSpace, base: FiniteSpace, f: Mapping[str, str]) -> "Pullback":
        if set(f) != set(index.points):
            raise ValueError("pullback map must be defined on every point")
        return cls(index, base, tuple(base.index(f[y]) for y in index))

    def as_mapping(self) -> dict[str, str]:
        return {y: self.base.points[i] for y, i in zip(self.index, self.images)}

    def then(self, g: "Pullback") -> "Pullback":
        """g∘f as a map Y -> W, where self = f: Y -> X and g: X -> W."""
        if g.index != self.base:
            raise ChainMismatch("maps do not chain")
        return Pullback(self.index, g.base, tuple(g.images[i] for i in self.images))


def pullback_functor(f: Pullback) -> MatrixFunctor:
    n = len(f.index)
    dims = np.zeros((n, n), dtype=np.int64)
    members = []
    for yi, xi in enumerate(f.images):
        dims[yi, xi] = 1
        members.append(FiniteMeasure.dirac(f.base, f.base.points[xi]))
    return MatrixFunctor(HilbertField(f.index, f.base, dims), MeasureFamily(f.index, f.base, members))


def scalar_2auto(f: Pullback, c: Mapping[str, complex] | Sequence[complex]) -> MatrixNatTrans:
    """The 2-automorphism of H^f with 1×1 cells c(y) at (y, f(y))."""
    vals = [c[y] for y in f.index] if isinstance(c, Mapping) else list(c)
    if len(vals) != len(f.index):
        raise ValueError("one scalar per point is required")
    if any(abs(v) == 0 for v in vals):
        raise ValueError("scalar 2-automorphisms need nonzero scalars")
    H = pullback_functor(f)
    return MatrixNatTrans(H, H, {(yi, xi): [[v]] for yi, (xi, v) in enumerate(zip(f.images, vals))}, by_index=True)


def pullback_whisker(alpha: MatrixNatTrans, f: Pullback, side: Literal["left", "right"]) -> MatrixNatTrans:
    """Whiskering by a pullback as a reindexing of cells.

    left:  H^f∘alpha with f: Z -> Y has cells alpha_{f(z), x};
    right: alpha∘H^f with f: X -> W has cells alpha_{y, f^{-1}(w)}.
    """
    Hf = pullback_functor(f)
    if side == "left":
        src, tgt = compose_functors(Hf, alpha.source), compose_functors(Hf, alpha.target)
        cells = {(zi, xi): alpha.cells[(f.images[zi], xi)]
                 for zi in range(len(f.index)) for xi in range(len(alpha.source.base))
                 if (f.images[zi], xi) in alpha.cells}
    elif side == "right":
        src, tgt = compose_functors(alpha.source, Hf), compose_functors(alpha.target, Hf)
        inv = {w: x for x, w in enumerate(f.images)}
        cells = {(yi, wi): alpha.cells[(yi, inv[wi])]
                 for yi in range(len(alpha.source.index)) for wi in range(len(f.base))
                 if (yi, inv[wi]) in alpha.cells}
    else:
        raise ValueError("side must be 'left' or 'right'")
    return MatrixNatTrans(src, tgt, cells, by_index=True)


def _full_rank(m: np.ndarray) -> bool:
    if m.shape[0] != m.shape[1]:
        return False
    if m.size == 0:
        return True
    s = np.linalg.svd(m, compute_uv=False)
    return bool(s[-1] > RANK_RTOL * max(s[0], 1.0))


def is_invertible_2mor(alpha: MatrixNatTrans) -> tuple[bool, Optional[MatrixNatTrans]]:
    """Invertible iff t_y ~ t'_y for every y and every cell on the support is invertible."""
    s, t = alpha.source.measures, alpha.target.measures
    for ms, mt in zip(s.members, t.members):
        if ms.support_indices() != mt.support_indices():
            return False, None
    inv = {}
    for key in s.support_pairs():
        c = alpha.cell(*key)
        if not _full_rank(c):
            return False, None
        inv[key] = np.linalg.inv(c)
    return True, MatrixNatTrans(alpha.target, alpha.source, inv, by_index=True)


def is_equivalence(T: MatrixFunctor) -> Optional[Pullback]:
    """The bijection f with t_y ~ delta_{f(y)} and dim(y, f(y)) = 1, if there is one."""
    if len(T.index) != len(T.base):
        return None
    images = []
    for yi, m in enumerate(T.measures.members):
        supp = m.support_indices()
        if len(supp) != 1 or T.dims[yi, supp[0]] != 1:
            return None
        images.append(supp[0])
    if len(set(images)) != len(images):
        return None
    return Pullback(T.index, T.base, tuple(images))


def direct_sum_functors(T: MatrixFunctor, Tp: MatrixFunctor) -> MatrixFunctor:
    """Measures add; the field is T, T' or T ⊕ T' on the t-only, t'-only and common supports."""
    if T.index != Tp.index or T.base != Tp.base:
        raise SpaceMismatch("direct sums need parallel functors")
    # canonical dims vanish off each support, so the three-region rule is a sum
    return MatrixFunctor(HilbertField(T.index, T.base, T.dims + Tp.dims), T.measures + Tp.measures)


def _block_diag(*mats: np.ndarray) -> np.ndarray:
    rows = sum(m.shape[0] for m in mats)
    cols = sum(m.shape[1] for m in mats)
    out = np.zeros((rows, cols), dtype=np.complex128)
    r = c = 0
    for m in mats:
        out[r:r + m.shape[0], c:c + m.shape[1]] = m
        r += m.shape[0]
        c += m.shape[1]
    return out


def direct_sum_nattrans(alpha: MatrixNatTrans, alphap: MatrixNatTrans) -> MatrixNatTrans:
    """Four-region rule: alpha ⊕ alpha', alpha, alpha' or 0 by membership in C_y and C'_y."""
    src = direct_sum_functors(alpha.source, alphap.source)
    tgt = direct_sum_functors(alpha.target, alphap.target)
    cells = {}
    for key in MatrixNatTrans(src, tgt).support():
        cells[key] = _block_diag(alpha.cell(*key), alphap.cell(*key))
    return MatrixNatTrans(src, tgt, cells, by_index=True)


def _two_sum_family(t: MeasureFamily, tp: MeasureFamily) -> MeasureFamily:
    Y, X = t.index.disjoint_union(tp.index), t.base.disjoint_union(tp.base)
    zx, zxp = [0] * len(tp.base), [0] * len(t.base)
    members = [FiniteMeasure(X, list(m.weights) + zx) for m in t.members]
    members += [FiniteMeasure(X, zxp + list(m.weights)) for m in tp.members]
    return MeasureFamily(Y, X, members)


def two_sum_functors(T: MatrixFunctor, Tp: MatrixFunctor) -> MatrixFunctor:
    """Block-diagonal functor H^{X⊔X'} -> H^{Y⊔Y'}; labels get 'L:'/'R:' prefixes."""
    dims = np.zeros((len(T.index) + len(Tp.index), len(T.base) + len(Tp.base)), dtype=np.int64)
    dims[:len(T.index), :len(T.base)] = T.dims
    dims[len(T.index):, len(T.base):] = Tp.dims
    fam = _two_sum_family(T.measures, Tp.measures)
    return MatrixFunctor(HilbertField(fam.index, fam.base, dims), fam)


def two_sum_nattrans(alpha: MatrixNatTrans, alphap: MatrixNatTrans) -> MatrixNatTrans:
    src = two_sum_functors(alpha.source, alphap.source)
    tgt = two_sum_functors(alpha.target, alphap.target)
    ny, nx = len(alpha.source.index), len(alpha.source.base)
    cells = dict(alpha.cells)
    cells.update({(yi + ny, xi + nx): m for (yi, xi), m in alphap.cells.items()})
    return MatrixNatTrans(src, tgt, cells, by_index=True)


def tensor_functors(T: MatrixFunctor, Tp: MatrixFunctor) -> MatrixFunctor:
    """Measures sqrt(t_y t'_y), dimensions multiply."""
    if T.index != Tp.index or T.base != Tp.base:
        raise SpaceMismatch("tensor products need parallel functors")
    fam = MeasureFamily(T.index, T.base, [geometric_mean(a, b) for a, b in zip(T.measures.members, Tp.measures.members)])
    return MatrixFunctor(HilbertField(T.index, T.base, T.dims * Tp.dims), fam)


def tensor_nattrans(alpha: MatrixNatTrans, alphap: MatrixNatTrans) -> MatrixNatTrans:
    src = tensor_functors(alpha.source, alphap.source)
    tgt = tensor_functors(alpha.target, alphap.target)
    cells = {k: np.kron(alpha.cell(*k), alphap.cell(*k)) for k in MatrixNatTrans(src, tgt).support()}
    return MatrixNatTrans(src, tgt, cells, by_index=True)


def tensor_two_functors(T: MatrixFunctor, Tp: MatrixFunctor) -> MatrixFunctor:
    """H^{X×X'} -> H^{Y×Y'} with product measures t_y ⊗ t'_{y'}."""
    Y, X = T.index.product(Tp.index), T.base.product(Tp.base)
    members = [FiniteMeasure(X, [a * b for a in m.weights for b in mp.weights])
               for m in T.measures.members for mp in Tp.measures.members]
    dims = np.einsum("ac,bd->abcd", T.dims, Tp.dims).reshape(len(Y), len(X))
    return MatrixFunctor(HilbertField(Y, X, dims), MeasureFamily(Y, X, members))


def tensor_two_nattrans(alpha: MatrixNatTrans, alphap: MatrixNatTrans) -> MatrixNatTrans:
    src = tensor_two_functors(alpha.source, alphap.source)
    tgt = tensor_two_functors(alpha.target, alphap.target)
    nyp, nxp = len(alphap.source.index), len(alphap.source.base)
    cells = {}
    for (yi, xi), a in alpha.cells.items():
        for (ypi, xpi), b in alphap.cells.items():
            cells[(yi * nyp + ypi, xi * nxp + xpi)] = np.kron(a, b)
    return MatrixNatTrans(src, tgt, cells, by_index=True)


def adjoint(alpha: MatrixNatTrans) -> MatrixNatTrans:
    return MatrixNatTrans(alpha.target, alpha.source, {k: m.conj().T for k, m in alpha.cells.items()}, by_index=True)


def norm(alpha: MatrixNatTrans) -> float:
    """Largest operator norm over the stored cells."""
    return float(max((np.linalg.norm(m, 2) if m.size else 0.0 for m in alpha.cells.values()), default=0.0))


def _permutation(n: int, new_of_old: Sequence[int]) -> np.ndarray:
    p = np.zeros((n, n))
    p[list(new_of_old), list(range(n))] = 1.0
    return p


def composition_associator(W: MatrixFunctor, V: MatrixFunctor, U: MatrixFunctor) -> MatrixNatTrans:
    """The block permutation (W∘V)∘U => W∘(V∘U).

    Both sides have the same measures; blocks are indexed by pairs (w, y),
    ordered y-major on the left and w-major on the right.
    """
    wv = _compose(W, V)
    left = _compose(wv.functor, U)
    vu = _compose(V, U)
    right = _compose(W, vu.functor)
    cells = {}
    for key, lblocks in left.blocks.items():
        zi, xi = key
        where = {}
        for wb in right.blocks[key]:
            for yb in vu.blocks[(wb.mid, xi)]:
                where[(wb.mid, yb.mid)] = (wb.offset, wb.right, yb.offset, yb.right)
        new_of_old = []
        for lb in lblocks:
            yi, d_u = lb.mid, lb.right
            for sb in wv.blocks[(zi, yi)]:
                wi, d_w, d_v = sb.mid, sb.left, sb.right
                off_w, d_vu, off_y, _ = where[(wi, yi)]
                for i in range(d_w):
                    for j in range(d_v):
                        for b in range(d_u):
                            new_of_old.append(off_w + i * d_vu + off_y + j * d_u + b)
        cells[key] = _permutation(len(new_of_old), new_of_old)
    return MatrixNatTrans(left.functor, right.functor, cells, by_index=True)


def commutation_matrix(m: int, n: int) -> np.ndarray:
    """K with K (a ⊗ b) = b ⊗ a for a in C^m, b in C^n."""
    return _permutation(m * n, [j * m + i for i in range(m) for j in range(n)])


def tensor_braiding(T: MatrixFunctor, Tp: MatrixFunctor) -> MatrixNatTrans:
    src, tgt = tensor_functors(T, Tp), tensor_functors(Tp, T)
    cells = {(yi, xi): commutation_matrix(int(T.dims[yi, xi]), int(Tp.dims[yi, xi]))
             for yi, xi in src.measures.support_pairs()}
    return MatrixNatTrans(src, tgt, cells, by_index=True)


def direct_sum_braiding(T: MatrixFunctor, Tp: MatrixFunctor) -> MatrixNatTrans:
    src, tgt = direct_sum_functors(T, Tp), direct_sum_functors(Tp, T)
    cells = {}
    for yi, xi in src.measures.support_pairs():
        a, b = int(T.dims[yi, xi]), int(Tp.dims[yi, xi])
        cells[(yi, xi)] = _permutation(a + b, [b + i for i in range(a)] + list(range(b)))
    return MatrixNatTrans(src, tgt, cells, by_index=True)


__all__ = [
    "HilbertField", "MatrixFunctor", "MatrixNatTrans", "Pullback", "Composite", "Block",
    "apply_to_object", "compose_functors", "vertical_compose", "horizontal_compose", "whisker",
    "pullback_functor", "pullback_whisker", "scalar_2auto", "is_invertible_2mor", "is_equivalence",
    "direct_sum_functors", "direct_sum_nattrans", "two_sum_functors", "two_sum_nattrans",
    "tensor_functors", "tensor_nattrans", "tensor_two_functors", "tensor_two_nattrans",
    "adjoint", "norm", "composition_associator", "commutation_matrix", "tensor_braiding",
    "direct_sum_braiding", "ConcentrationError", "ChainMismatch",
]
