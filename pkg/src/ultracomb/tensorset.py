"""k-dimensional subsets of finite boxes.

A :class:`TensorSet` is either a materialized boolean array or a lazy
vectorized predicate.  Predicates receive one integer array per axis (already
broadcast against each other) and return a boolean array of the broadcast
shape.
"""

from __future__ import annotations

import hashlib
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import ShapeMismatch

MATERIALIZE_MAX_DIM = 3
MATERIALIZE_MAX_SIDE = 64
# lazy sets brute-force a viability query only below this many combinations
LAZY_VIABILITY_BUDGET = 4096

Predicate = Callable[..., np.ndarray]


class TensorSet:
    """A subset of ``[0, dims[0]) x ... x [0, dims[k-1])``."""

    def __init__(
        self,
        dims: Sequence[int],
        predicate: Optional[Predicate] = None,
        array: Optional[np.ndarray] = None,
        name: str = "",
        symmetric: bool = False,
        materialize: Optional[bool] = None,
    ):
        self.dims = tuple(int(d) for d in dims)
        if not self.dims or any(d < 1 for d in self.dims):
            raise ShapeMismatch(f"invalid box {self.dims}")
        self.name = name
        # membership invariant under permuting coordinates
        self.symmetric = symmetric
        self.predicate = predicate
        if array is not None:
            array = np.asarray(array, dtype=bool)
            if array.shape != self.dims:
                raise ShapeMismatch(f"array shape {array.shape} does not match box {self.dims}")
            self.array = array
        else:
            if predicate is None:
                raise ValueError("need either a predicate or an array")
            if materialize is None:
                materialize = len(self.dims) <= MATERIALIZE_MAX_DIM and max(self.dims) <= MATERIALIZE_MAX_SIDE
            self.array = self._evaluate_box() if materialize else None

    # -- construction helpers ------------------------------------------------

    @classmethod
    def from_tuples(cls, dims, tuples, name: str = "") -> "TensorSet":
        arr = np.zeros(tuple(dims), dtype=bool)
        for t in tuples:
            arr[tuple(t)] = True
        return cls(dims, array=arr, name=name)

    @classmethod
    def empty(cls, dims, name: str = "empty") -> "TensorSet":
        return cls(dims, predicate=lambda *xs: np.zeros(np.broadcast(*xs).shape, dtype=bool), name=name, symmetric=True)

    @classmethod
    def full(cls, dims, name: str = "full") -> "TensorSet":
        return cls(dims, predicate=lambda *xs: np.ones(np.broadcast(*xs).shape, dtype=bool), name=name, symmetric=True)

    def _evaluate_box(self) -> np.ndarray:
        grids = np.ix_(*(np.arange(d) for d in self.dims))
        return np.broadcast_to(self._call(*grids), self.dims).copy()

    def _call(self, *xs) -> np.ndarray:
        return np.asarray(self.predicate(*xs), dtype=bool)

    # -- queries -------------------------------------------------------------

    @property
    def k(self) -> int:
        return len(self.dims)

    @property
    def materialized(self) -> bool:
        return self.array is not None

    def contains(self, t: Sequence[int]) -> bool:
        if len(t) != self.k:
            raise ShapeMismatch(f"expected a {self.k}-tuple, got {len(t)} entries")
        if any(not 0 <= x < d for x, d in zip(t, self.dims)):
            return False
        if self.array is not None:
            return bool(self.array[tuple(t)])
        return bool(self._call(*(np.int64(x) for x in t)))

    __contains__ = contains

    def fiber(self, fixed: dict, free_pos: int) -> np.ndarray:
        """Boolean array over axis ``free_pos`` with the other axes fixed."""
        if self.array is not None:
            index = tuple(slice(None) if p == free_pos else fixed[p] for p in range(self.k))
            return self.array[index]
        args = [np.arange(self.dims[p]) if p == free_pos else np.int64(fixed[p]) for p in range(self.k)]
        return np.broadcast_to(self._call(*args), (self.dims[free_pos],))

    def any_in(self, fixed: dict, free: dict, cache: Optional[dict] = None) -> bool:
        """Is some point with the ``fixed`` coordinates and the ``free`` ones drawn
        from the given domains in the set?

        ``free`` maps a position to ``(key, domain)`` with ``domain`` a boolean
        array over that axis.  The answer may err towards ``True`` for large
        lazy sets, never towards ``False``.
        """
        positions = sorted(free)
        idx = [np.flatnonzero(free[p][1][: self.dims[p]]) for p in positions]
        if any(i.size == 0 for i in idx):
            return False
        if self.array is not None:
            grids = dict(zip(positions, np.ix_(*idx)))
            index = tuple(grids[p] if p in grids else fixed[p] for p in range(self.k))
            return bool(self.array[index].any())
        total = 1
        for i in idx:
            total *= i.size
        if total > LAZY_VIABILITY_BUDGET:
            return True
        grids = dict(zip(positions, np.ix_(*idx)))
        args = [grids[p] if p in grids else np.int64(fixed[p]) for p in range(self.k)]
        return bool(self._call(*args).any())

    def any_in_group(self, fixeds: list, free: dict, cache: Optional[dict] = None) -> bool:
        """Like :meth:`any_in` for several fixed parts that must share one
        completion; only valid for symmetric sets, where the free slots can
        be matched up by variable.  The default checks each part alone."""
        return all(self.any_in(f, free, cache) for f in fixeds)

    def narrow_group(self, fixeds: list, free: dict, cache: Optional[dict] = None) -> Optional[dict]:
        """Viability plus domain narrowing.

        Returns ``None`` when no completion exists, else a dict mapping free
        variable keys to boolean masks of values that still have support.
        Keys missing from the dict are left unchanged.  Only a single
        materialized part with two free slots is narrowed here.
        """
        if self.array is None or len(free) != 2 or len(fixeds) != 1:
            return {} if self.any_in_group(fixeds, free, cache) else None
        (pu, (ku, du)), (pw, (kw, dw)) = sorted(free.items())
        fixed = fixeds[0]
        index = tuple(slice(None) if p in free else fixed[p] for p in range(self.k))
        plane = self.array[index]
        du, dw = du[: self.dims[pu]], dw[: self.dims[pw]]
        plane = plane & du[:, None] & dw[None, :]
        if not plane.any():
            return None
        return {ku: plane.any(axis=1), kw: plane.any(axis=0)}

    def to_array(self) -> np.ndarray:
        return self.array if self.array is not None else self._evaluate_box()

    def tuples(self):
        """Members in lexicographic order (materializes the box)."""
        return [tuple(int(x) for x in t) for t in np.argwhere(self.to_array())]

    def fingerprint(self) -> str:
        """Content hash for small sets, name-based for lazy ones."""
        h = hashlib.sha256(repr(self.dims).encode())
        if self.array is not None:
            h.update(np.packbits(self.array).tobytes())
        else:
            h.update(("lazy:" + self.name).encode())
        return h.hexdigest()

    def __repr__(self):
        kind = "materialized" if self.materialized else "lazy"
        return f"TensorSet(dims={self.dims}, {kind}, name={self.name!r})"


def superdiagonal(k: int, n: int) -> TensorSet:
    """Strictly increasing k-tuples over ``[0, n)``."""
    if k < 1 or n < 1:
        raise ValueError("superdiagonal needs k >= 1 and N >= 1")

    def pred(*xs):
        out = np.ones(np.broadcast(*xs).shape, dtype=bool)
        for a, b in zip(xs, xs[1:]):
            out &= a < b
        return out

    return TensorSet((n,) * k, predicate=pred, name=f"superdiagonal[{k},{n}]")
