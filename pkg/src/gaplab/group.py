"""Exact SU(2) arithmetic on unit quaternions.

SU(2) is stored as the unit quaternions q = w + x*i + y*j + z*k.  The matrix
view

    M(q) = [[ w + i*z,  x + i*y],
            [-x + i*y,  w - i*z]]

is a group isomorphism onto SU(2) for the Hamilton product, so group
arithmetic runs on four real coordinates and the 2x2 complex matrix is built
only on demand.  Products renormalize once a chain of 32 multiplications has
accumulated (and before every matrix view), which keeps elements on the unit
sphere to machine precision regardless of word length.

The module also provides Haar sampling (four Gaussians projected to the unit
3-sphere, which is rotation invariant by construction), trace/conjugacy-class
coordinates, a conjugation normal form for tuples, and evaluation of reduced
free-group words on tuples.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

import numpy as np

# Renormalize after this many multiplications have accumulated in a chain.
_RENORM_CHAIN = 32

# Below this vector-part norm an element is treated as central (+-identity)
# by the conjugation normal form; the cut only matters on a Haar-null set.
_DEGENERATE_TOL = 1e-9


class GroupElement:
    """A unit quaternion, i.e. one element of SU(2).

    Coordinates are normalized on construction.  ``_chain`` counts how many
    multiplications separate the stored coordinates from the last explicit
    normalization; it is bookkeeping only and never affects group semantics.
    """

    __slots__ = ("w", "x", "y", "z", "_chain")

    def __init__(self, w: float, x: float, y: float, z: float):
        w, x, y, z = float(w), float(x), float(y), float(z)
        n2 = w * w + x * x + y * y + z * z
        if not math.isfinite(n2) or n2 < 1e-24:
            raise ValueError("quaternion coordinates must be finite and nonzero")
        s = 1.0 / math.sqrt(n2)
        self.w = w * s
        self.x = x * s
        self.y = y * s
        self.z = z * s
        self._chain = 0

    @classmethod
    def _raw(cls, w, x, y, z, chain):
        g = object.__new__(cls)
        g.w = w
        g.x = x
        g.y = y
        g.z = z
        g._chain = chain
        return g

    def coords(self) -> tuple[float, float, float, float]:
        return (self.w, self.x, self.y, self.z)

    def matrix(self) -> np.ndarray:
        """The 2x2 unitary view M(q); renormalized before conversion."""
        n2 = self.w ** 2 + self.x ** 2 + self.y ** 2 + self.z ** 2
        s = 1.0 / math.sqrt(n2)
        w, x, y, z = self.w * s, self.x * s, self.y * s, self.z * s
        return np.array(
            [[complex(w, z), complex(x, y)], [complex(-x, y), complex(w, -z)]]
        )

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return mul(self, other)

    def __repr__(self):
        return f"GroupElement({self.w:.6g}, {self.x:.6g}, {self.y:.6g}, {self.z:.6g})"


IDENTITY = GroupElement(1.0, 0.0, 0.0, 0.0)


def identity() -> GroupElement:
    return GroupElement(1.0, 0.0, 0.0, 0.0)


def mul(g: GroupElement, h: GroupElement) -> GroupElement:
    """Hamilton product g*h, renormalized every ``_RENORM_CHAIN`` factors."""
    w = g.w * h.w - g.x * h.x - g.y * h.y - g.z * h.z
    x = g.w * h.x + g.x * h.w + g.y * h.z - g.z * h.y
    y = g.w * h.y - g.x * h.z + g.y * h.w + g.z * h.x
    z = g.w * h.z + g.x * h.y - g.y * h.x + g.z * h.w
    chain = g._chain + h._chain + 1
    if chain >= _RENORM_CHAIN:
        s = 1.0 / math.sqrt(w * w + x * x + y * y + z * z)
        return GroupElement._raw(w * s, x * s, y * s, z * s, 0)
    return GroupElement._raw(w, x, y, z, chain)


def inv(g: GroupElement) -> GroupElement:
    """Quaternion conjugate; for unit quaternions this is the group inverse."""
    return GroupElement._raw(g.w, -g.x, -g.y, -g.z, g._chain)


def conjugate(h: GroupElement, g: GroupElement) -> GroupElement:
    """h g h^-1."""
    return mul(mul(h, g), inv(h))


def trace(g: GroupElement) -> float:
    """Trace of the matrix view, equal to 2w; real for all of SU(2)."""
    return 2.0 * g.w


def axis_angle(g: GroupElement) -> tuple[tuple[float, float, float], float]:
    """Rotation data (axis, alpha) with w = cos(alpha), vec = sin(alpha)*axis.

    alpha lies in [0, pi].  For central elements (alpha in {0, pi}) the axis
    is the fixed default (0, 0, 1).
    """
    s = math.sqrt(g.x * g.x + g.y * g.y + g.z * g.z)
    alpha = math.atan2(s, g.w)
    if s < 1e-15:
        return (0.0, 0.0, 1.0), alpha
    return (g.x / s, g.y / s, g.z / s), alpha


def angle(g: GroupElement) -> float:
    """The rotation angle alpha in [0, pi] with 2*cos(alpha) = trace(g)."""
    s = math.sqrt(g.x * g.x + g.y * g.y + g.z * g.z)
    return math.atan2(s, g.w)


def distance(g: GroupElement, h: GroupElement) -> float:
    """Euclidean distance of the quaternion coordinates."""
    return math.sqrt(
        (g.w - h.w) ** 2 + (g.x - h.x) ** 2 + (g.y - h.y) ** 2 + (g.z - h.z) ** 2
    )


@dataclass(frozen=True)
class ConjClass:
    """A conjugacy class of SU(2), determined by its trace t in [-2, 2].

    Classes correspond to rotation angles alpha in [0, pi] via t = 2 cos(alpha);
    the torus coordinate modulo the Weyl flip alpha -> -alpha is captured
    completely by t.
    """

    t: float

    def __post_init__(self):
        if not math.isfinite(self.t) or abs(self.t) > 2.0 + 1e-9:
            raise ValueError(f"trace {self.t!r} is outside [-2, 2]")
        object.__setattr__(self, "t", min(2.0, max(-2.0, float(self.t))))

    @property
    def angle(self) -> float:
        return math.acos(self.t / 2.0)


def conj_class(g: GroupElement) -> ConjClass:
    """The conjugacy class of g; invariant under g -> h g h^-1."""
    return ConjClass(2.0 * g.w)


class GroupTuple:
    """An ordered n-tuple of SU(2) elements: one point of Hom(F_n, SU(2))."""

    __slots__ = ("elements",)

    def __init__(self, elements):
        elems = tuple(elements)
        if len(elems) < 2:
            raise ValueError("a tuple needs at least 2 elements")
        for g in elems:
            if not isinstance(g, GroupElement):
                raise TypeError("tuple entries must be GroupElement values")
        self.elements = elems

    @property
    def n(self) -> int:
        return len(self.elements)

    def __len__(self):
        return len(self.elements)

    def __getitem__(self, i):
        return self.elements[i]

    def __iter__(self):
        return iter(self.elements)

    def __repr__(self):
        return f"GroupTuple({list(self.elements)!r})"


def conjugate_tuple(h: GroupElement, t: GroupTuple) -> GroupTuple:
    """Simultaneous conjugation (h g1 h^-1, ..., h gn h^-1)."""
    return GroupTuple(conjugate(h, g) for g in t)


# ---------------------------------------------------------------------------
# Haar sampling


def haar_sample(rng: np.random.Generator) -> GroupElement:
    """One Haar-distributed element: four N(0,1) draws projected to S^3."""
    w, x, y, z = rng.normal(size=4)
    return GroupElement(w, x, y, z)


def haar_tuple(rng: np.random.Generator, n: int) -> GroupTuple:
    """An n-tuple of independent Haar samples."""
    return GroupTuple(haar_sample(rng) for _ in range(n))


def haar_traces(rng: np.random.Generator, count: int) -> np.ndarray:
    """Traces of ``count`` independent Haar samples, drawn in one batch.

    Consumes the stream differently from repeated ``haar_sample`` calls, but
    is itself deterministic per seed; intended for distribution tests.
    """
    q = rng.normal(size=(count, 4))
    return 2.0 * q[:, 0] / np.linalg.norm(q, axis=1)


def semicircle_cdf(t):
    """CDF of the Haar trace distribution, density (1/2pi) sqrt(4 - t^2).

    This is the Weyl-measure pushforward of Haar measure to the trace
    coordinate on [-2, 2].
    """
    t = np.clip(np.asarray(t, dtype=float), -2.0, 2.0)
    return (t / 2.0 * np.sqrt(4.0 - t * t) + 2.0 * np.arcsin(t / 2.0) + np.pi) / (
        2.0 * np.pi
    )


# ---------------------------------------------------------------------------
# Conjugation normal form


def _vec_norm(g: GroupElement) -> float:
    return math.sqrt(g.x * g.x + g.y * g.y + g.z * g.z)


def _align_axis_to_z(g: GroupElement) -> GroupElement:
    """A quaternion h such that h g h^-1 has rotation axis (0, 0, 1)."""
    s = _vec_norm(g)
    ux, uy, uz = g.x / s, g.y / s, g.z / s
    cn = math.hypot(ux, uy)  # |u x e3| = sin of the angle between u and e3
    if cn < 1e-12:
        if uz > 0.0:
            return identity()
        return GroupElement(0.0, 1.0, 0.0, 0.0)  # half-turn about the x-axis
    half = 0.5 * math.atan2(cn, uz)
    f = math.sin(half) / cn
    return GroupElement(math.cos(half), uy * f, -ux * f, 0.0)


def _snap_to_torus(g: GroupElement) -> GroupElement:
    """Replace an almost-diagonal element by its exact torus form (z >= 0)."""
    return GroupElement(g.w, 0.0, 0.0, _vec_norm(g))


def canonical_form(t: GroupTuple) -> GroupTuple:
    """A conjugation normal form for tuples: the same output for the whole
    orbit {h t h^-1} outside a Haar-null degenerate set.

    The first non-central entry is rotated into the torus (x = y = 0, z >= 0,
    so its matrix is diag(e^{i a}, e^{-i a}) with a in [0, pi]); the residual
    torus freedom is then spent rotating the first entry outside that torus
    so its x component vanishes and y >= 0.  Central entries and entries
    sharing the torus fall through to the next entry; a fully central tuple
    is returned unchanged.
    """
    elems = list(t)
    pivot = next(
        (i for i, g in enumerate(elems) if _vec_norm(g) > _DEGENERATE_TOL), None
    )
    if pivot is None:
        return GroupTuple(elems)
    h1 = _align_axis_to_z(elems[pivot])
    elems = [conjugate(h1, g) for g in elems]
    elems[pivot] = _snap_to_torus(elems[pivot])
    second = next(
        (i for i, g in enumerate(elems) if math.hypot(g.x, g.y) > _DEGENERATE_TOL),
        None,
    )
    if second is None:
        return GroupTuple(elems)
    # Rotation about e3 by beta sends (x, y) to (0, hypot(x, y)); conjugating
    # by a torus quaternion with half-angle beta/2 realizes it.
    beta = 0.5 * (0.5 * math.pi - math.atan2(elems[second].y, elems[second].x))
    h2 = GroupElement(math.cos(beta), 0.0, 0.0, math.sin(beta))
    elems = [conjugate(h2, g) for g in elems]
    elems[pivot] = _snap_to_torus(elems[pivot])
    g2 = elems[second]
    elems[second] = GroupElement(g2.w, 0.0, math.hypot(g2.x, g2.y), g2.z)
    return GroupTuple(elems)


def tuple_digest(t: GroupTuple) -> str:
    """A short hex digest of the conjugation orbit of t.

    Coordinates of the canonical form are quantized to 1e-6 before hashing,
    so conjugate tuples collide.
    """
    cf = canonical_form(t)
    parts = []
    for g in cf:
        parts.extend(str(round(c * 1e6)) for c in g.coords())
    return hashlib.sha256(",".join(parts).encode()).hexdigest()[:16]


# ---------------------------------------------------------------------------
# Free-group words


def free_reduce(letters) -> tuple[int, ...]:
    """Cancel adjacent inverse pairs until no (i, -i) remains."""
    stack: list[int] = []
    for l in letters:
        if stack and stack[-1] == -l:
            stack.pop()
        else:
            stack.append(l)
    return tuple(stack)


class Word:
    """A reduced word in F_n: letters are signed generator indices.

    Construction rejects non-reduced input; use :func:`free_reduce` first when
    composing substitutions.
    """

    __slots__ = ("letters",)

    def __init__(self, letters):
        letters = tuple(int(l) for l in letters)
        for l in letters:
            if l == 0:
                raise ValueError("letter indices must be nonzero")
        for a, b in zip(letters, letters[1:]):
            if a == -b:
                raise ValueError(f"word {letters} is not reduced")
        self.letters = letters

    def inverse(self) -> "Word":
        return Word(tuple(-l for l in reversed(self.letters)))

    def max_index(self) -> int:
        return max((abs(l) for l in self.letters), default=0)

    def __len__(self):
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __eq__(self, other):
        return isinstance(other, Word) and self.letters == other.letters

    def __hash__(self):
        return hash(self.letters)

    def __repr__(self):
        return f"Word({list(self.letters)!r})"


def word_eval(word: Word, t: GroupTuple) -> GroupElement:
    """Evaluate a reduced word on a tuple: the product of t_i or t_i^-1 per
    letter, left to right.  The empty word gives the identity."""
    n = len(t)
    for l in word:
        if abs(l) > n:
            raise ValueError(f"letter {l} out of range for an {n}-tuple")
    g = identity()
    for l in word:
        g = mul(g, t[l - 1] if l > 0 else inv(t[-l - 1]))
    return g
