"""Finite integer sets ``A`` contained in ``[0, N)``, stored as boolean masks."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np


@dataclass(frozen=True, eq=False)
class IntSet:
    bound: int
    bits: np.ndarray

    def __post_init__(self):
        if int(self.bound) < 1:
            raise ValueError("bound must be at least 1")
        bits = np.asarray(self.bits, dtype=bool)
        if bits.shape != (self.bound,):
            raise ValueError(f"mask of shape {bits.shape} for bound {self.bound}")
        bits = bits.copy()
        bits.flags.writeable = False
        object.__setattr__(self, "bits", bits)

    @classmethod
    def from_elements(cls, bound: int, elements: Iterable[int]) -> "IntSet":
        bits = np.zeros(bound, dtype=bool)
        for x in elements:
            x = int(x)
            if not 0 <= x < bound:
                raise ValueError(f"element {x} outside [0, {bound})")
            bits[x] = True
        return cls(bound, bits)

    @classmethod
    def empty(cls, bound: int) -> "IntSet":
        return cls(bound, np.zeros(bound, dtype=bool))

    @classmethod
    def full(cls, bound: int) -> "IntSet":
        return cls(bound, np.ones(bound, dtype=bool))

    @classmethod
    def residues(cls, bound: int, modulus: int, residues: Iterable[int]) -> "IntSet":
        if modulus < 1:
            raise ValueError("modulus must be positive")
        r = np.zeros(modulus, dtype=bool)
        for x in residues:
            if not 0 <= x < modulus:
                raise ValueError(f"residue {x} outside [0, {modulus})")
            r[x] = True
        return cls(bound, r[np.arange(bound) % modulus])

    def elements(self) -> list[int]:
        return np.flatnonzero(self.bits).tolist()

    def __contains__(self, x) -> bool:
        return 0 <= x < self.bound and bool(self.bits[x])

    def __len__(self) -> int:
        return int(self.bits.sum())

    def __iter__(self):
        return iter(self.elements())

    def __eq__(self, other) -> bool:
        return isinstance(other, IntSet) and self.bound == other.bound and np.array_equal(self.bits, other.bits)

    def __hash__(self):
        return hash((self.bound, self.bits.tobytes()))

    def _check(self, other: "IntSet"):
        if other.bound != self.bound:
            raise ValueError(f"bounds differ: {self.bound} vs {other.bound}")

    def __or__(self, other: "IntSet") -> "IntSet":
        self._check(other)
        return IntSet(self.bound, self.bits | other.bits)

    def __and__(self, other: "IntSet") -> "IntSet":
        self._check(other)
        return IntSet(self.bound, self.bits & other.bits)

    def __sub__(self, other: "IntSet") -> "IntSet":
        self._check(other)
        return IntSet(self.bound, self.bits & ~other.bits)

    def complement(self) -> "IntSet":
        return IntSet(self.bound, ~self.bits)

    def issubset(self, other: "IntSet") -> bool:
        self._check(other)
        return not np.any(self.bits & ~other.bits)

    def __repr__(self):
        els = self.elements()
        shown = ",".join(map(str, els[:12])) + (",..." if len(els) > 12 else "")
        return f"IntSet(bound={self.bound}, {{{shown}}})"
