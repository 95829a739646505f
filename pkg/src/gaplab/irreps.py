"""Irreducible unitary representations of SU(2).

Level k (k = 2*spin, dimension d = k+1) is realized on homogeneous
polynomials of degree k in two complex variables: a group element with matrix
[[a, b], [c, d]] acts by the substitution (u, v) -> (a u + c v, b u + d v),
and the monomial basis scaled by sqrt(binom(k, m)) is orthonormal for the
invariant inner product, so the action is unitary and level 1 reproduces the
defining 2x2 matrix exactly.  One code path covers every k.

Because every group element is conjugate into the torus, characters and
eigenvalues have closed forms in the rotation angle alpha:

    trace pi_k(g)  = sin((k+1) alpha) / sin(alpha),
    spectrum of pi_k(g) = { e^{i (k - 2m) alpha} : m = 0..k }.

These closed forms are computed independently of the matrix construction and
serve as its cross-checks.  Note every even level has the exponent k - 2m = 0,
i.e. a vector fixed by the whole group image.  Even k is exactly the
sublattice that factors through the rotation group of the 2-sphere (the
kernel contains -1), so sweeps over even levels are spectra of the action on
sphere functions; odd k is the genuinely spinorial part.

Levels carry the Casimir label k(k+2)/4 (the Laplace eigenvalue up to the
metric normalization, which is never fixed here); ordering and truncation use
k alone.  In L^2 of the group each level occurs with multiplicity d, but gap
quantities are identical across copies, so a single copy per level is
computed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .group import GroupElement, angle

# Dense matrices only; the cutoff sweep is truncated far below this anyway.
MAX_LEVEL = 60


@dataclass(frozen=True)
class IrrepLevel:
    """A Peter-Weyl level, indexed by k = 2*spin.

    k = 0 is the trivial representation; it is excluded from all spectral
    sweeps (those concern the complement of the constants) but can be
    constructed for testing.
    """

    k: int
    casimir: float = field(init=False)

    def __post_init__(self):
        if not isinstance(self.k, int) or isinstance(self.k, bool):
            raise TypeError("level index k must be an integer")
        if self.k < 0 or self.k > MAX_LEVEL:
            raise ValueError(f"level index k={self.k} outside [0, {MAX_LEVEL}]")
        object.__setattr__(self, "casimir", self.k * (self.k + 2) / 4.0)

    @property
    def dim(self) -> int:
        return self.k + 1


def as_level(level) -> IrrepLevel:
    """Coerce an int or IrrepLevel to IrrepLevel."""
    if isinstance(level, IrrepLevel):
        return level
    return IrrepLevel(int(level))


@dataclass
class RepMatrix:
    """The (k+1)x(k+1) unitary image of a group element at one level."""

    level: IrrepLevel
    entries: np.ndarray

    def __post_init__(self):
        self.entries.setflags(write=False)


def irrep_matrix(level, g: GroupElement) -> RepMatrix:
    """The matrix of g on degree-k polynomials, in the orthonormal monomial
    basis.  Functorial: irrep_matrix(k, g h) = irrep_matrix(k, g) @
    irrep_matrix(k, h) up to roundoff, and level 1 equals g.matrix() exactly.
    """
    level = as_level(level)
    k = level.k
    if k == 0:
        return RepMatrix(level, np.ones((1, 1), dtype=np.complex128))
    m2 = g.matrix()
    a, b = complex(m2[0, 0]), complex(m2[0, 1])
    c, d = complex(m2[1, 0]), complex(m2[1, 1])
    sqb = np.sqrt(np.array([math.comb(k, m) for m in range(k + 1)], dtype=float))
    ent = np.empty((k + 1, k + 1), dtype=np.complex128)
    for m in range(k + 1):
        va = np.array(
            [math.comb(k - m, p) * a ** (k - m - p) * c ** p for p in range(k - m + 1)]
        )
        vb = np.array([math.comb(m, q) * b ** (m - q) * d ** q for q in range(m + 1)])
        ent[:, m] = np.convolve(va, vb) * (sqb[m] / sqb)
    return RepMatrix(level, ent)


def character(level, g: GroupElement) -> float:
    """trace(pi_k(g)) via the closed form sin((k+1) a)/sin(a).

    Kept independent of the matrix construction on purpose: it is the
    validation oracle for :func:`irrep_matrix`.  At a in {0, pi} the limit
    values (k+1) and (k+1)(-1)^k are used.
    """
    k = as_level(level).k
    a = angle(g)
    if min(a, math.pi - a) < 1e-8:
        return float(k + 1) if a < 0.5 * math.pi else float((k + 1) * (-1) ** k)
    return math.sin((k + 1) * a) / math.sin(a)


def eigen_angles(level, g: GroupElement) -> np.ndarray:
    """Arguments of the eigenvalues of pi_k(g): the weights (k - 2m) * alpha
    for m = 0..k.  Even k always contains the weight 0, i.e. eigenvalue 1."""
    level = as_level(level)
    a = angle(g)
    return a * np.arange(level.k, -level.k - 1, -2, dtype=float)
