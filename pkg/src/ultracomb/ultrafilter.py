"""Ultrafilters on finite ground sets.

Every ultrafilter on a finite set is principal, so a :class:`FiniteUltrafilter`
is just a ground (or product space) plus a generating point.  The point-level
operations (``image``, ``tensor``, ``project``, ``pseudo_sum``,
``star_extension``) are cheap; each of them also has a *definitional* twin in
the ``*_table`` functions below, which evaluates the defining membership
condition on every subset of the ground at once.  A table is a boolean numpy
array indexed by subset bitmask: ``table[X]`` is the membership of the subset
whose bit ``e`` is set iff element ``e`` belongs to it.

Product spaces are encoded row-major: the first factor is the most
significant coordinate, so the vertical fiber ``X_i`` of ``X`` over ``I x J``
is the bit-slice ``[i*|J|, (i+1)*|J|)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Callable, Sequence, Union

import numpy as np

from .errors import GroundMismatch, OverflowBeyondTruncation, ShapeMismatch

# above this many elements a full subset table no longer fits comfortably
TABLE_MAX_BITS = 20


@dataclass(frozen=True)
class GroundSet:
    """The finite set ``{0, ..., size-1}``."""

    size: int
    label: str = "I"

    def __post_init__(self):
        if not isinstance(self.size, (int, np.integer)) or self.size < 1:
            raise ValueError(f"ground size must be a positive integer, got {self.size!r}")

    @property
    def factors(self) -> tuple["GroundSet", ...]:
        return (self,)

    def encode(self, coords) -> int:
        (c,) = coords if isinstance(coords, tuple) else (coords,)
        return int(c)

    def decode(self, index: int) -> tuple[int, ...]:
        return (index,)


@dataclass(frozen=True)
class ProductSpace:
    """Cartesian product of ground sets, elements encoded row-major."""

    factors: tuple[GroundSet, ...]

    def __post_init__(self):
        if len(self.factors) < 2:
            raise ValueError("a product space needs at least two factors")

    @property
    def size(self) -> int:
        return reduce(lambda a, b: a * b, (f.size for f in self.factors), 1)

    @property
    def label(self) -> str:
        return "x".join(f.label for f in self.factors)

    def encode(self, coords: Sequence[int]) -> int:
        if len(coords) != len(self.factors):
            raise ShapeMismatch(f"expected {len(self.factors)} coordinates, got {len(coords)}")
        index = 0
        for c, f in zip(coords, self.factors):
            if not 0 <= c < f.size:
                raise IndexError(f"coordinate {c} outside factor {f.label} of size {f.size}")
            index = index * f.size + int(c)
        return index

    def decode(self, index: int) -> tuple[int, ...]:
        out = []
        for f in reversed(self.factors):
            index, c = divmod(index, f.size)
            out.append(c)
        return tuple(reversed(out))


Space = Union[GroundSet, ProductSpace]


def make_space(factors: Sequence[GroundSet]) -> Space:
    factors = tuple(factors)
    return factors[0] if len(factors) == 1 else ProductSpace(factors)


@dataclass(frozen=True)
class SubsetMask:
    """A subset of a finite space stored as an integer bitmask."""

    space: Space
    bits: int

    def __post_init__(self):
        if self.bits < 0 or self.bits >> self.space.size:
            raise ValueError("bitmask has bits outside the space")

    @classmethod
    def from_elements(cls, space: Space, elements) -> "SubsetMask":
        bits = 0
        for e in elements:
            index = space.encode(e) if isinstance(e, tuple) else int(e)
            if not 0 <= index < space.size:
                raise IndexError(f"element {e} outside the space")
            bits |= 1 << index
        return cls(space, bits)

    @classmethod
    def full(cls, space: Space) -> "SubsetMask":
        return cls(space, (1 << space.size) - 1)

    @classmethod
    def empty(cls, space: Space) -> "SubsetMask":
        return cls(space, 0)

    def __contains__(self, index: int) -> bool:
        return bool((self.bits >> index) & 1)

    def elements(self) -> list[int]:
        return [e for e in range(self.space.size) if (self.bits >> e) & 1]

    def complement(self) -> "SubsetMask":
        return SubsetMask(self.space, ((1 << self.space.size) - 1) & ~self.bits)

    def _same(self, other: "SubsetMask"):
        if other.space != self.space:
            raise GroundMismatch("subsets live on different spaces")

    def __and__(self, other: "SubsetMask") -> "SubsetMask":
        self._same(other)
        return SubsetMask(self.space, self.bits & other.bits)

    def __or__(self, other: "SubsetMask") -> "SubsetMask":
        self._same(other)
        return SubsetMask(self.space, self.bits | other.bits)

    def fiber(self, i: int) -> "SubsetMask":
        """Vertical fiber ``{rest : (i, rest) in X}`` over the first factor."""
        if not isinstance(self.space, ProductSpace):
            raise ShapeMismatch("fibers need a product space")
        rest = make_space(self.space.factors[1:])
        if not 0 <= i < self.space.factors[0].size:
            raise IndexError(f"fiber index {i} out of range")
        return SubsetMask(rest, (self.bits >> (i * rest.size)) & ((1 << rest.size) - 1))

    def hex(self) -> str:
        return hex(self.bits)


@dataclass(frozen=True)
class FiniteUltrafilter:
    """The principal ultrafilter ``{S : point in S}`` on ``space``."""

    space: Space
    point: int

    def __post_init__(self):
        if not 0 <= self.point < self.space.size:
            raise IndexError(f"point {self.point} outside space of size {self.space.size}")

    @property
    def coords(self) -> tuple[int, ...]:
        return self.space.decode(self.point)

    def measure(self, subset: SubsetMask) -> int:
        """Two-valued finitely additive measure: 1 on members, 0 otherwise."""
        return int(member(self, subset))

    def table(self) -> np.ndarray:
        return principal_table(self.space.size, self.point)


def principal(ground: Space, i) -> FiniteUltrafilter:
    index = ground.encode(i) if isinstance(i, tuple) else i
    return FiniteUltrafilter(ground, index)


def member(U: FiniteUltrafilter, S: SubsetMask) -> bool:
    if S.space != U.space:
        raise GroundMismatch("subset and ultrafilter live on different spaces")
    return bool((S.bits >> U.point) & 1)


def _as_map(f, domain: Space) -> list[int]:
    if callable(f):
        values = [f(e) for e in range(domain.size)]
    else:
        values = list(f)
        if len(values) != domain.size:
            raise ValueError(f"map covers {len(values)} of {domain.size} elements")
    if any(v is None for v in values):
        raise ValueError("map is partial")
    return [int(v) for v in values]


def image(f, U: FiniteUltrafilter, codomain: Space) -> FiniteUltrafilter:
    """Image ultrafilter ``f(U)``; ``f`` is a callable or a value list."""
    values = _as_map(f, U.space)
    target = values[U.point]
    if not 0 <= target < codomain.size:
        raise ValueError(f"map sends the generator outside the codomain: {target}")
    return FiniteUltrafilter(codomain, target)


def tensor(U: FiniteUltrafilter, V: FiniteUltrafilter) -> FiniteUltrafilter:
    space = ProductSpace(U.space.factors + V.space.factors)
    return FiniteUltrafilter(space, U.point * V.space.size + V.point)


def projection_map(space: Space, axes: Sequence[int]) -> tuple[list[int], Space]:
    """Index map of the projection onto 1-based ``axes`` and its target space."""
    factors = space.factors
    axes = tuple(axes)
    if not axes or len(set(axes)) != len(axes) or any(not 1 <= a <= len(factors) for a in axes):
        raise ValueError(f"invalid axis selector {axes} for a {len(factors)}-factor space")
    target = make_space([factors[a - 1] for a in axes])
    values = []
    for index in range(space.size):
        coords = space.decode(index)
        values.append(target.encode(tuple(coords[a - 1] for a in axes)))
    return values, target


def project(W: FiniteUltrafilter, axes) -> FiniteUltrafilter:
    if isinstance(axes, int):
        axes = (axes,)
    values, target = projection_map(W.space, axes)
    return FiniteUltrafilter(target, values[W.point])


def pseudo_sum(U: FiniteUltrafilter, V: FiniteUltrafilter) -> FiniteUltrafilter:
    """``U (+) V`` on the truncated segment ``[0, N)``; never wraps."""
    if not isinstance(U.space, GroundSet) or U.space != V.space:
        raise GroundMismatch("pseudo-sum needs two ultrafilters on the same segment")
    s = U.point + V.point
    if s >= U.space.size:
        raise OverflowBeyondTruncation(
            f"{U.point} + {V.point} = {s} leaves the segment [0, {U.space.size})"
        )
    return FiniteUltrafilter(U.space, s)


def star_extension(V: FiniteUltrafilter, W: FiniteUltrafilter) -> FiniteUltrafilter:
    """Extension of ``(a, b) * (c, d) = (a, d)`` to ultrafilters on ``I x J``."""
    if V.space != W.space or not isinstance(V.space, ProductSpace) or len(V.space.factors) != 2:
        raise GroundMismatch("star extension needs two ultrafilters on the same I x J")
    a, _ = V.coords
    _, d = W.coords
    return FiniteUltrafilter(V.space, V.space.encode((a, d)))


# ---------------------------------------------------------------------------
# definitional evaluation over all subsets at once


def all_subsets(n_bits: int) -> np.ndarray:
    if n_bits > TABLE_MAX_BITS:
        raise ValueError(f"{n_bits}-element space is too large for a subset table")
    return np.arange(1 << n_bits, dtype=np.int64)


def principal_table(n_bits: int, point: int) -> np.ndarray:
    return ((all_subsets(n_bits) >> point) & 1).astype(bool)


def preimage_bits(subsets: np.ndarray, f: Sequence[int]) -> np.ndarray:
    """Bitmask of ``f^{-1}(Y)`` for every ``Y`` in ``subsets``."""
    out = np.zeros_like(subsets)
    for x, fx in enumerate(f):
        out |= ((subsets >> fx) & 1) << x
    return out


def image_table(table: np.ndarray, f: Sequence[int], codomain_bits: int) -> np.ndarray:
    """``Y in f(U)  <=>  f^{-1}(Y) in U``."""
    return table[preimage_bits(all_subsets(codomain_bits), f)]


def fiber_bits(subsets: np.ndarray, i: int, rest_bits: int) -> np.ndarray:
    return (subsets >> (i * rest_bits)) & ((1 << rest_bits) - 1)


def tensor_table(table_u: np.ndarray, n_i: int, table_v: np.ndarray, n_j: int) -> np.ndarray:
    """``X in U (x) V  <=>  {i : X_i in V} in U``."""
    xs = all_subsets(n_i * n_j)
    large = np.zeros_like(xs)
    for i in range(n_i):
        large |= table_v[fiber_bits(xs, i, n_j)].astype(np.int64) << i
    return table_u[large]


def star_table(table_v: np.ndarray, table_w: np.ndarray, n_i: int, n_j: int) -> np.ndarray:
    """``X in V * W  <=>  {(a,b) : {(c,d) : (a,d) in X} in W} in V``."""
    xs = all_subsets(n_i * n_j)
    outer = np.zeros_like(xs)
    for a in range(n_i):
        row = fiber_bits(xs, a, n_j)
        # {(c, d) : (a, d) in X} = I x X_a
        spread = np.zeros_like(xs)
        for c in range(n_i):
            spread |= row << (c * n_j)
        in_w = table_w[spread].astype(np.int64)
        for b in range(n_j):
            outer |= in_w << (a * n_j + b)
    return table_v[outer]


def pseudo_sum_table(table_u: np.ndarray, table_v: np.ndarray, n: int) -> np.ndarray:
    """``A in U (+) V  <=>  {m : A - m in V} in U`` on the segment ``[0, n)``."""
    xs = all_subsets(n)
    shifted = np.zeros_like(xs)
    for m in range(n):
        # A - m = {t : t + m in A}, truncated to the segment
        shifted |= table_v[xs >> m].astype(np.int64) << m
    return table_u[shifted]


def principal_point(table: np.ndarray, n_bits: int):
    """The generator if ``table`` is a principal ultrafilter, else ``None``."""
    for p in range(n_bits):
        if table[1 << p]:
            return p if np.array_equal(table, principal_table(n_bits, p)) else None
    return None


def first_mismatch(a: np.ndarray, b: np.ndarray):
    diff = np.flatnonzero(a != b)
    return int(diff[0]) if diff.size else None


def axiom_violation(table: np.ndarray, n_bits: int):
    """First ``(axiom, subset)`` breaking the ultrafilter axioms, or ``None``.

    Checks: empty set excluded and full set included; upward closure; closure
    under intersection; exactly one of each complementary pair; and finite
    additivity of the induced two-valued measure on disjoint pairs.
    """
    full = (1 << n_bits) - 1
    if table[0]:
        return ("empty set is a member", 0)
    if not table[full]:
        return ("full set is not a member", full)
    xs = all_subsets(n_bits)
    for e in range(n_bits):
        bad = np.flatnonzero(table & ~table[xs | (1 << e)])
        if bad.size:
            return ("not upward closed", int(bad[0]))
    members = np.flatnonzero(table)
    if members.size * members.size <= 1 << 22:
        meets = members[:, None] & members[None, :]
        bad = np.argwhere(~table[meets])
        if bad.size:
            return ("not closed under intersection", int(members[bad[0][0]]))
    bad = np.flatnonzero(table == table[full ^ xs])
    if bad.size:
        return ("complement rule fails", int(bad[0]))
    if n_bits <= 9:
        mu = table.astype(np.int64)
        for a in range(1 << n_bits):
            b = xs[(xs & a) == 0]
            if np.any(mu[a | b] != mu[a] + mu[b]):
                return ("measure not additive", a)
    return None


# ---------------------------------------------------------------------------
# convenience wrappers tying the point-level and table-level routes together


def definitional_member(kind: str, operands: Sequence[FiniteUltrafilter], subset: SubsetMask) -> bool:
    """Evaluate membership through the defining condition rather than the point."""
    if kind == "tensor":
        U, V = operands
        n_j = V.space.size
        good = 0
        for i in range(U.space.size):
            fib = (subset.bits >> (i * n_j)) & ((1 << n_j) - 1)
            if (fib >> V.point) & 1:
                good |= 1 << i
        return bool((good >> U.point) & 1)
    if kind == "pseudo_sum":
        U, V = operands
        good = 0
        for m in range(U.space.size):
            if ((subset.bits >> m) >> V.point) & 1:
                good |= 1 << m
        return bool((good >> U.point) & 1)
    raise ValueError(f"unknown operation {kind!r}")


def compose(f: Sequence[int], g: Sequence[int]) -> list[int]:
    """``f o g`` for maps given as value lists."""
    return [f[x] for x in g]


MapLike = Union[Sequence[int], Callable[[int], int]]
