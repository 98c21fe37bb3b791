"""Length-2 chain complexes with chain maps, 1-homotopies and 2-homotopies.

Matrices act on column vectors, so ``G∘F`` is the product ``G @ F``.
Targets of homotopies are always derived from the source and the
components.
"""

from dataclasses import dataclass

import numpy as np

from .exactla import QQ, rank_of


class CompositionError(ValueError):
    pass


class InvertibilityError(ValueError):
    pass


def _eq(a, b):
    return a.shape == b.shape and not np.any(a != b)


def _add(F, *terms):
    out = terms[0]
    for t in terms[1:]:
        out = out + t
    return F.reduce(out)


def _neg(F, a):
    return F.reduce(-a)


@dataclass(frozen=True, eq=False)
class ChainComplex2:
    """C₂ →δ₂ C₁ →δ₁ C₀"""
    d2: np.ndarray
    d1: np.ndarray
    field: object = QQ

    def __post_init__(self):
        if self.d1.shape[1] != self.d2.shape[0]:
            raise ValueError(f"boundary shapes {self.d2.shape} and {self.d1.shape} do not chain")

    @property
    def dims(self):
        return (self.d2.shape[1], self.d2.shape[0], self.d1.shape[0])

    def is_complex(self):
        return _eq(self.field.matmul(self.d1, self.d2), self.field.zeros(*self.d1.shape[:1], self.d2.shape[1]))

    def identity(self):
        F = self.field
        c2, c1, c0 = self.dims
        return ChainMap(self, self, F.eye(c2), F.eye(c1), F.eye(c0))


@dataclass(frozen=True, eq=False)
class ChainMap:
    source: ChainComplex2
    target: ChainComplex2
    f2: np.ndarray
    f1: np.ndarray
    f0: np.ndarray

    @property
    def field(self):
        return self.source.field

    def violation(self):
        """Name of the first failing chain-map square, or None."""
        F, C, D = self.field, self.source, self.target
        if not _eq(F.matmul(self.f1, C.d2), F.matmul(D.d2, self.f2)):
            return "f₁δ₂ = δ₂f₂"
        if not _eq(F.matmul(self.f0, C.d1), F.matmul(D.d1, self.f1)):
            return "f₀δ₁ = δ₁f₁"
        return None

    def is_invertible(self):
        F = self.field
        return all(f.shape[0] == f.shape[1] and rank_of(f, F) == f.shape[0]
                   for f in (self.f2, self.f1, self.f0))

    def components(self):
        return (self.f2, self.f1, self.f0)

    def __eq__(self, other):
        return isinstance(other, ChainMap) and all(_eq(a, b) for a, b in
                                                   zip(self.components(), other.components()))

    __hash__ = None


def compose_maps(G, F):
    """G∘F"""
    if G.source.dims != F.target.dims:
        raise CompositionError("chain maps are not composable")
    K = F.field
    return ChainMap(F.source, G.target, K.matmul(G.f2, F.f2), K.matmul(G.f1, F.f1), K.matmul(G.f0, F.f0))


@dataclass(frozen=True, eq=False)
class Homotopy1:
    """H : F ⇒ G with H′₁ : C₀ → D₁ and H′₂ : C₁ → D₂."""
    source: ChainMap
    h1: np.ndarray
    h2: np.ndarray

    @property
    def field(self):
        return self.source.field

    @property
    def target(self):
        F, C, D, f = self.field, self.source.source, self.source.target, self.source
        g0 = _add(F, f.f0, F.matmul(D.d1, self.h1))
        g1 = _add(F, f.f1, F.matmul(self.h1, C.d1), F.matmul(D.d2, self.h2))
        g2 = _add(F, f.f2, F.matmul(self.h2, C.d2))
        return ChainMap(C, D, g2, g1, g0)

    def __eq__(self, other):
        return isinstance(other, Homotopy1) and self.source == other.source and \
            _eq(self.h1, other.h1) and _eq(self.h2, other.h2)

    __hash__ = None


HOMOTOPY_CONDITIONS = ("δ₁H′₁ = g₀ − f₀", "H′₁δ₁ + δ₂H′₂ = g₁ − f₁", "H′₂δ₂ = g₂ − f₂")


def homotopy_conditions(Fm, Gm, h1, h2):
    """Truth values of the three homotopy conditions from F to G."""
    K, C, D = Fm.field, Fm.source, Fm.target
    return (_eq(K.matmul(D.d1, h1), _add(K, Gm.f0, _neg(K, Fm.f0))),
            _eq(_add(K, K.matmul(h1, C.d1), K.matmul(D.d2, h2)), _add(K, Gm.f1, _neg(K, Fm.f1))),
            _eq(K.matmul(h2, C.d2), _add(K, Gm.f2, _neg(K, Fm.f2))))


def homotopy_violation(Fm, Gm, h1, h2):
    """First of the three homotopy conditions that fails, or None."""
    for ok, name in zip(homotopy_conditions(Fm, Gm, h1, h2), HOMOTOPY_CONDITIONS):
        if not ok:
            return name
    return None


def target_of_homotopy1(H):
    T = H.target
    bad = T.violation()
    if bad:
        raise ValueError(f"derived target fails {bad}")
    return T


def identity_homotopy(Fm):
    K, C, D = Fm.field, Fm.source, Fm.target
    return Homotopy1(Fm, K.zeros(D.dims[1], C.dims[2]), K.zeros(D.dims[0], C.dims[1]))


def vcomp_h1(Kh, H):
    """K#₂H for H : F ⇒ G and K : G ⇒ G′."""
    if Kh.source != H.target:
        raise CompositionError("1-homotopies are not composable")
    F = H.field
    return Homotopy1(H.source, _add(F, H.h1, Kh.h1), _add(F, H.h2, Kh.h2))


def whisker_h1_left(Gm, H):
    """G♮₁H"""
    F = H.field
    return Homotopy1(compose_maps(Gm, H.source), F.matmul(Gm.f1, H.h1), F.matmul(Gm.f2, H.h2))


def whisker_h1_right(Kh, Fm):
    """K♮₁F"""
    F = Kh.field
    return Homotopy1(compose_maps(Kh.source, Fm), F.matmul(Kh.h1, Fm.f0), F.matmul(Kh.h2, Fm.f1))


def hcomp_h1_lower(Kh, H):
    """(G′♮₁H)#₂(K♮₁F) : G∘F ⇒ G′∘F′ for H : F ⇒ F′ (first) and K : G ⇒ G′ (second)."""
    return vcomp_h1(whisker_h1_left(Kh.target, H), whisker_h1_right(Kh, H.source))


def hcomp_h1_upper(Kh, H):
    """(K♮₁F′)#₂(G♮₁H) : G∘F ⇒ G′∘F′"""
    return vcomp_h1(whisker_h1_right(Kh, H.target), whisker_h1_left(Kh.source, H))


def hcomp_h1_defect(Kh, H):
    """lower − upper, which equals (δ₂K′₂H′₁, −K′₂H′₁δ₁)."""
    F = H.field
    a, b = hcomp_h1_lower(Kh, H), hcomp_h1_upper(Kh, H)
    return _add(F, a.h1, _neg(F, b.h1)), _add(F, a.h2, _neg(F, b.h2))


@dataclass(frozen=True, eq=False)
class Homotopy2:
    """α : H ⇛ K with α′ : C₀ → D₂."""
    source: Homotopy1
    a: np.ndarray

    @property
    def field(self):
        return self.source.field

    @property
    def target(self):
        F, H = self.field, self.source
        C, D = H.source.source, H.source.target
        return Homotopy1(H.source, _add(F, H.h1, F.matmul(D.d2, self.a)),
                         _add(F, H.h2, F.matmul(self.a, C.d1)))

    def __eq__(self, other):
        return isinstance(other, Homotopy2) and self.source == other.source and _eq(self.a, other.a)

    __hash__ = None


HOMOTOPY2_CONDITIONS = ("δ₂α′ = K′₁ − H′₁", "α′δ₁ = K′₂ − H′₂")


def homotopy2_conditions(H, Kh, a):
    """Truth values of the two 2-homotopy conditions from H to K."""
    F, C, D = H.field, H.source.source, H.source.target
    return (_eq(F.matmul(D.d2, a), _add(F, Kh.h1, _neg(F, H.h1))),
            _eq(F.matmul(a, C.d1), _add(F, Kh.h2, _neg(F, H.h2))))


def homotopy2_violation(H, Kh, a):
    """First failing 2-homotopy condition from H to K, or None."""
    if H.source != Kh.source:
        return "H and K share the source chain map"
    for ok, name in zip(homotopy2_conditions(H, Kh, a), HOMOTOPY2_CONDITIONS):
        if not ok:
            return name
    return None


def target_of_homotopy2(al):
    return al.target


def identity_homotopy2(H):
    F = H.field
    C, D = H.source.source, H.source.target
    return Homotopy2(H, F.zeros(D.dims[0], C.dims[2]))


def vcomp_h2(be, al):
    """β#₃α for α : H ⇛ K and β : K ⇛ K′."""
    if be.source != al.target:
        raise CompositionError("2-homotopies are not #₃-composable")
    F = al.field
    return Homotopy2(al.source, _add(F, al.a, be.a))


def vcomp1_h2(be, al):
    """β#₁α : K#₂H ⇛ K̃#₂H̃ for α : H ⇛ H̃ and β : K ⇛ K̃ with K starting where H ends."""
    if be.source.source != al.source.target:
        raise CompositionError("2-homotopies are not #₁-composable")
    F = al.field
    return Homotopy2(vcomp_h1(be.source, al.source), _add(F, al.a, be.a))


def hcomp_h2_lower(be, al):
    """Horizontal composite over hcomp_h1_lower: α′ ↦ G′₂α′ + β′F₀."""
    F = al.field
    H, Kh = al.source, be.source
    return Homotopy2(hcomp_h1_lower(Kh, H),
                     _add(F, F.matmul(Kh.target.f2, al.a), F.matmul(be.a, H.source.f0)))


def hcomp_h2_upper(be, al):
    """Horizontal composite over hcomp_h1_upper: α′ ↦ G₂α′ + β′F′₀."""
    F = al.field
    H, Kh = al.source, be.source
    return Homotopy2(hcomp_h1_upper(Kh, H),
                     _add(F, F.matmul(Kh.source.f2, al.a), F.matmul(be.a, H.target.f0)))


class AutDelta:
    """Membership predicates and products of the automorphism cat²-group of δ."""

    def __init__(self, delta):
        self.delta = delta

    def is_level1(self, Fm):
        return Fm.source is self.delta and Fm.target is self.delta and Fm.violation() is None \
            and Fm.is_invertible()

    def is_level2(self, H):
        return self.is_level1(H.source) and self.is_level1(H.target)

    def is_level3(self, al):
        return self.is_level2(al.source) and self.is_level2(al.target)

    def require_level1(self, Fm):
        if not Fm.is_invertible():
            raise InvertibilityError("chain map has a singular component")
        return Fm

    @staticmethod
    def product1(Gm, Fm):
        return compose_maps(Gm, Fm)

    @staticmethod
    def product2(Kh, H):
        return hcomp_h1_lower(Kh, H)

    @staticmethod
    def product3(be, al):
        return hcomp_h2_lower(be, al)


def aut_delta(delta):
    return AutDelta(delta)
