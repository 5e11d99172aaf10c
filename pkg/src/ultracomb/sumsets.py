"""Sumset detectors: find sequences whose prescribed combination sums land in ``A``.

A :class:`SumsetSpec` with multiplicities ``(n_1, ..., n_k)`` asks for disjoint
increasing ``B_1, ..., B_k`` such that every sum of ``n_1`` distinct elements
of ``B_1`` plus ``n_2`` distinct elements of ``B_2`` plus ... lies in ``A``.
It compiles to a pattern whose surjections are all maps ``[n] -> [k]`` with
fiber sizes ``n_s`` and whose targets are all ``Sum_n^{-1}(A)``.
"""

from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass, field
from math import factorial
from typing import Optional

import numpy as np

from .errors import CapExceeded, SearchBudgetExceeded, ShapeMismatch
from .intset import IntSet
from .patterns import DEFAULT_MAX_NODES, PatternSpec, Surjection, search_witness
from .tensorset import TensorSet
from .verdict import Verdict

ARITY_CAP = 6


class SumPreimage(TensorSet):
    """``{(x_1..x_k) : x_1 + ... + x_k in A}``; sums past the bound are non-members."""

    def __init__(self, A: IntSet, k: int):
        self.A = A
        bits = A.bits

        def pred(*xs):
            total = sum(np.asarray(x, dtype=np.int64) for x in xs)
            inside = total < A.bound
            return inside & bits[np.where(inside, total, 0)]

        super().__init__((A.bound,) * k, predicate=pred, name=f"sum{k}^-1[{_set_tag(A)}]", symmetric=True, materialize=False)

    def contains(self, t) -> bool:
        if len(t) != self.k:
            raise ShapeMismatch(f"expected a {self.k}-tuple")
        if any(x < 0 or x >= self.A.bound for x in t):
            return False
        s = sum(int(x) for x in t)
        return s < self.A.bound and bool(self.A.bits[s])

    __contains__ = contains

    def fiber(self, fixed: dict, free_pos: int) -> np.ndarray:
        s = sum(int(v) for v in fixed.values())
        out = np.zeros(self.A.bound, dtype=bool)
        if s < self.A.bound:
            out[: self.A.bound - s] = self.A.bits[s:]
        return out

    def _reach(self, free: dict, cache: Optional[dict]) -> np.ndarray:
        n = self.A.bound
        keys = tuple(sorted(free[p][0] for p in free))
        reach = None if cache is None else cache.get(("sum", keys))
        if reach is None:
            doms = {key: dom for key, dom in free.values()}
            reach = doms[keys[0]][:n]
            for key in keys[1:]:
                reach = sumset_mask(reach, doms[key][:n], n)
            if cache is not None:
                cache[("sum", keys)] = reach
        return reach

    def any_in(self, fixed: dict, free: dict, cache: Optional[dict] = None) -> bool:
        return self.any_in_group([fixed], free, cache)

    def _shared_sums(self, fixeds: list, free: dict, cache: Optional[dict]) -> np.ndarray:
        # the free slots contribute one common sum r; each fixed part needs s + r in A
        n = self.A.bound
        ok = self._reach(free, cache).copy()
        for fixed in fixeds:
            s = sum(int(v) for v in fixed.values())
            if s >= n:
                ok[:] = False
                break
            ok[n - s :] = False
            ok[: n - s] &= self.A.bits[s:]
            if not ok.any():
                break
        return ok

    def any_in_group(self, fixeds: list, free: dict, cache: Optional[dict] = None) -> bool:
        return bool(self._shared_sums(fixeds, free, cache).any())

    def narrow_group(self, fixeds: list, free: dict, cache: Optional[dict] = None) -> Optional[dict]:
        ok = self._shared_sums(fixeds, free, cache)
        if not ok.any():
            return None
        if len(free) != 2:
            return {}
        n = self.A.bound
        (ku, du), (kw, dw) = free.values()
        # y keeps support when y + z lands in ok for some z in the other domain
        return {ku: difference_mask(ok, dw[:n], n) & du[:n], kw: difference_mask(ok, du[:n], n) & dw[:n]}


# below this many elements a direct shift loop beats the FFT
_SHIFT_LOOP_MAX = 48


def sumset_mask(a: np.ndarray, b: np.ndarray, n: int) -> np.ndarray:
    """Mask of ``{x + y : x in a, y in b}`` truncated to ``[0, n)``."""
    xa, xb = np.flatnonzero(a), np.flatnonzero(b)
    out = np.zeros(n, dtype=bool)
    if xa.size == 0 or xb.size == 0:
        return out
    if min(xa.size, xb.size) <= _SHIFT_LOOP_MAX:
        # loop over the smaller side, shift the other
        xs, other = (xa, b) if xa.size <= xb.size else (xb, a)
        for x in xs:
            top = min(n - x, other.size)
            if top > 0:
                out[x : x + top] |= other[:top]
        return out
    size = 1 << int(2 * n - 1).bit_length()
    conv = np.fft.irfft(np.fft.rfft(a[:n].astype(float), size) * np.fft.rfft(b[:n].astype(float), size), size)
    return conv[:n] > 0.5


def difference_mask(r: np.ndarray, b: np.ndarray, n: int) -> np.ndarray:
    """Mask of ``{y in [0, n) : y + z in r for some z in b}``."""
    xr, xb = np.flatnonzero(r), np.flatnonzero(b)
    out = np.zeros(n, dtype=bool)
    if xr.size == 0 or xb.size == 0:
        return out
    if xb.size <= _SHIFT_LOOP_MAX:
        for z in xb:
            top = min(n, r.size - z)
            if top > 0:
                out[:top] |= r[z : z + top]
        return out
    if xr.size <= _SHIFT_LOOP_MAX:
        for x in xr:
            y = x - xb[xb <= x]
            out[y[y < n]] = True
        return out
    size = 1 << int(max(r.size, n) + b.size).bit_length()
    corr = np.fft.irfft(np.fft.rfft(r.astype(float), size) * np.conj(np.fft.rfft(b.astype(float), size)), size)
    return corr[:n] > 0.5


class ProductPreimage(TensorSet):
    """``{(x_1..x_k) : x_1 * ... * x_k in A}``; products past the bound are non-members."""

    def __init__(self, A: IntSet, k: int):
        self.A = A
        bits = A.bits

        def pred(*xs):
            total = np.ones(np.broadcast(*xs).shape, dtype=np.int64)
            for x in xs:
                total = total * np.asarray(x, dtype=np.int64)
            inside = total < A.bound
            return inside & bits[np.where(inside, total, 0)]

        super().__init__((A.bound,) * k, predicate=pred, name=f"prod{k}^-1[{_set_tag(A)}]", symmetric=True, materialize=False)

    def contains(self, t) -> bool:
        if any(x < 0 or x >= self.A.bound for x in t):
            return False
        p = 1
        for x in t:
            p *= int(x)
        return p < self.A.bound and bool(self.A.bits[p])

    __contains__ = contains


def _set_tag(A: IntSet) -> str:
    return hashlib.sha256(np.packbits(A.bits).tobytes() + str(A.bound).encode()).hexdigest()[:16]


def sum_preimage(A: IntSet, k: int) -> TensorSet:
    return SumPreimage(A, k)


def product_preimage(A: IntSet, k: int) -> TensorSet:
    return ProductPreimage(A, k)


@dataclass(frozen=True)
class SumsetSpec:
    multiplicities: tuple
    mode: str = "additive"
    # only meaningful with all multiplicities 1: indices across sets strictly increase
    staggered: bool = False
    allow_zero: Optional[bool] = None

    def __post_init__(self):
        mult = tuple(int(x) for x in self.multiplicities)
        object.__setattr__(self, "multiplicities", mult)
        if not mult or any(x < 1 for x in mult):
            raise ValueError("multiplicities must be positive")
        if self.mode not in ("additive", "multiplicative"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.staggered and any(x != 1 for x in mult):
            raise ValueError("staggered specs need all multiplicities equal to 1")
        if self.allow_zero is None:
            object.__setattr__(self, "allow_zero", self.mode == "additive")

    @property
    def n(self) -> int:
        return sum(self.multiplicities)

    @property
    def k(self) -> int:
        return len(self.multiplicities)

    def to_dict(self) -> dict:
        return {
            "multiplicities": list(self.multiplicities),
            "mode": self.mode,
            "staggered": self.staggered,
            "allow_zero": self.allow_zero,
        }


@dataclass
class CompiledSumset:
    spec: SumsetSpec
    phis: tuple

    def pattern(self, A: IntSet) -> PatternSpec:
        n, k = self.spec.n, self.spec.k
        target = sum_preimage(A, n) if self.spec.mode == "additive" else product_preimage(A, n)
        candidates = None
        if not self.spec.allow_zero:
            mask = np.ones(A.bound, dtype=bool)
            mask[0] = False
            candidates = (mask,) * k
        return PatternSpec(
            self.phis,
            (target,) * len(self.phis),
            (A.bound,) * k,
            candidates=candidates,
            strict=self.spec.staggered,
        )


def compile_spec(spec: SumsetSpec, cap: int = ARITY_CAP) -> CompiledSumset:
    """All surjections ``[n] -> [k]`` whose fiber over ``s`` has ``n_s`` points."""
    if spec.n > cap:
        raise CapExceeded(f"arity {spec.n} exceeds the cap {cap}")
    if spec.staggered:
        return CompiledSumset(spec, (Surjection.identity(spec.k),))
    word = [s + 1 for s, c in enumerate(spec.multiplicities) for _ in range(c)]
    phis = tuple(Surjection(p, spec.k) for p in sorted(set(itertools.permutations(word))))
    expected = factorial(spec.n)
    for c in spec.multiplicities:
        expected //= factorial(c)
    assert len(phis) == expected
    return CompiledSumset(spec, phis)


@dataclass
class SumsetCertificate:
    sets: list
    spec: SumsetSpec
    verified_count: int = 0

    def to_dict(self) -> dict:
        return {
            "spec": self.spec.to_dict(),
            "sets": [list(map(int, s)) for s in self.sets],
            "verified_count": self.verified_count,
        }


def _combine(values, mode):
    if mode == "additive":
        return sum(values)
    out = 1
    for v in values:
        out *= v
    return out


def verify_certificate(A: IntSet, cert: SumsetCertificate) -> Verdict:
    """Independent re-check by direct enumeration of every required combination."""
    spec = cert.spec
    sets = [list(map(int, s)) for s in cert.sets]
    if len(sets) != spec.k:
        raise ShapeMismatch(f"{len(sets)} sets for a spec with {spec.k} parts")
    seen = {}
    for s, seq in enumerate(sets, start=1):
        for x in seq:
            if not 0 <= x < A.bound:
                return Verdict.fail("element outside bound", {"set": s, "value": x})
            if x in seen:
                return Verdict.fail("sets not disjoint", {"value": x, "sets": [seen[x], s]})
            seen[x] = s
        if any(a >= b for a, b in zip(seq, seq[1:])):
            return Verdict.fail("set not increasing", {"set": s})
    count = 0
    if spec.staggered:
        L = min(len(seq) for seq in sets) if sets else 0
        combos = (tuple((sets[s][j],) for s, j in enumerate(js)) for js in itertools.combinations(range(L), spec.k))
    else:
        combos = itertools.product(*(itertools.combinations(seq, c) for seq, c in zip(sets, spec.multiplicities)))
    for combo in combos:
        values = [x for part in combo for x in part]
        total = _combine(values, spec.mode)
        count += 1
        if not (0 <= total < A.bound and A.bits[total]):
            return Verdict.fail(
                "combination outside A",
                {"parts": [list(p) for p in combo], "value": int(total)},
                {"verified": count - 1},
            )
    return Verdict.ok({"verified": count})


def _certify(A, spec, sets) -> SumsetCertificate:
    cert = SumsetCertificate([list(map(int, s)) for s in sets], spec)
    verdict = verify_certificate(A, cert)
    if not verdict.passed:
        raise AssertionError(f"detector produced an invalid certificate: {verdict.violation}")
    cert.verified_count = verdict.counts["verified"]
    return cert


def find_general(
    A: IntSet,
    spec: SumsetSpec,
    length: int,
    strategy: str = "exhaustive",
    seed: int = 0,
    max_nodes: int = DEFAULT_MAX_NODES,
) -> Optional[SumsetCertificate]:
    if length < 0:
        raise ValueError("length must be non-negative")
    if length == 0:
        return _certify(A, spec, [[] for _ in range(spec.k)])
    compiled = compile_spec(spec)
    w = search_witness(compiled.pattern(A), length, strategy, seed, max_nodes)
    return None if w is None else _certify(A, spec, w.sequences)


def find_ksum_same(A: IntSet, k: int, length: int, mode: str = "additive", **kw) -> Optional[list]:
    """Increasing ``B`` with every sum of ``k`` distinct members in ``A``."""
    if length < k:
        raise ValueError(f"length {length} must be at least k={k}")
    cert = find_general(A, SumsetSpec((k,), mode), length, **kw)
    return None if cert is None else cert.sets[0]


def find_ksum_distinct(A: IntSet, k: int, length: int, mode: str = "additive", **kw) -> Optional[list]:
    """Disjoint ``B_1..B_k`` with ``b_{1,j_1} + ... + b_{k,j_k}`` in ``A`` for ``j_1 < ... < j_k``."""
    cert = find_general(A, SumsetSpec((1,) * k, mode, staggered=True), length, **kw)
    return None if cert is None else cert.sets


def find_full_sumset(A: IntSet, length: int, mode: str = "additive", **kw) -> Optional[tuple]:
    """Disjoint ``B, C`` with every ``b + c`` in ``A``.

    Falls back to one sequence of twice the length with all pairwise sums of
    distinct members in ``A``, split by index parity.
    """
    spec = SumsetSpec((1, 1), mode)
    try:
        cert = find_general(A, spec, length, **kw)
    except SearchBudgetExceeded:
        cert = None
    if cert is not None:
        return tuple(cert.sets)
    try:
        B = find_ksum_same(A, 2, 2 * length, mode, **kw)
    except SearchBudgetExceeded:
        return None
    if B is None:
        return None
    cert = _certify(A, spec, [B[0::2], B[1::2]])
    return tuple(cert.sets)


def plant_instance(
    spec: SumsetSpec,
    bound: int,
    length: int,
    rng: np.random.Generator,
    noise: float = 0.01,
    spread: Optional[int] = None,
) -> tuple[IntSet, list]:
    """Random disjoint planted sets and the set ``A`` closing them under ``spec``.

    Planted elements are drawn from ``[0, spread)`` (``[1, spread)`` when zero
    is excluded).  The default is the widest range whose combinations are
    guaranteed to stay below ``bound``.
    """
    lo = 0 if spec.allow_zero else 1
    if spread is not None:
        top = int(spread)
    elif spec.mode == "additive":
        top = max(spec.n * length, bound // spec.n)
    else:
        top = max(2 * spec.k * length + 2, int(round(bound ** (1.0 / spec.n))))
    pool = rng.permutation(np.arange(lo, top))[: spec.k * length]
    if pool.size < spec.k * length:
        raise ValueError("bound too small for the requested planted instance")
    sets = [sorted(int(x) for x in pool[s * length : (s + 1) * length]) for s in range(spec.k)]
    bits = rng.random(bound) < noise
    cert = SumsetCertificate(sets, spec)
    if spec.staggered:
        combos = (
            tuple((sets[s][j],) for s, j in enumerate(js)) for js in itertools.combinations(range(length), spec.k)
        )
    else:
        combos = itertools.product(*(itertools.combinations(seq, c) for seq, c in zip(sets, spec.multiplicities)))
    for combo in combos:
        total = _combine([x for part in combo for x in part], spec.mode)
        if total >= bound:
            raise ValueError("planted combination escapes the bound")
        bits[total] = True
    A = IntSet(bound, bits)
    assert verify_certificate(A, cert).passed
    return A, sets
