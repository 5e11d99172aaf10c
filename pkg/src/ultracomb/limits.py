"""Finite-prefix analyzers for extremal limits, densities and double limits.

Limits along ultrafilters cannot be evaluated, so everything here works on
the classical side of each characterization: running extrema, suffix
extrema, sliding-window counts and iterated limits detected by a Cauchy-tail
test.  Sequences are 1-based as in ``a_1, a_2, ...``; integer sets are
``IntSet`` masks over ``[0, N)`` whose element 0 is ignored by the density
functions, which count from 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import CapTooSmall, NoInnerLimit
from .intset import IntSet


def _as_prefix(seq) -> np.ndarray:
    a = np.asarray(seq, dtype=float)
    if a.ndim != 1 or a.size == 0:
        raise ValueError("need a nonempty one-dimensional sequence")
    if not np.all(np.isfinite(a)):
        raise ValueError("sequence values must be finite")
    return a


# -- extremal limits ---------------------------------------------------------


def running_extrema_limit(seq: Sequence[float], mode: str = "min") -> float:
    """Running min (or max) of the prefix at its last index."""
    a = _as_prefix(seq)
    if mode == "min":
        return float(np.minimum.accumulate(a)[-1])
    if mode == "max":
        return float(np.maximum.accumulate(a)[-1])
    raise ValueError(f"mode must be 'min' or 'max', not {mode!r}")


@dataclass
class NestedExtrema:
    liminf: float
    limsup: float
    # rows (n, min_{n<=k<=N} a_k, max_{n<=k<=N} a_k) for n = 1..N//2
    trace: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"liminf": self.liminf, "limsup": self.limsup, "trace": [list(r) for r in self.trace]}


def liminf_limsup_nested(seq: Sequence[float]) -> NestedExtrema:
    """Suffix extrema ``min/max_{n <= k <= N} a_k`` traced over ``n``.

    The estimates are read at ``n = max(1, N // 2)`` so that every estimate
    still aggregates half of the prefix.
    """
    a = _as_prefix(seq)
    suffix_min = np.minimum.accumulate(a[::-1])[::-1]
    suffix_max = np.maximum.accumulate(a[::-1])[::-1]
    last = max(1, a.size // 2)
    trace = [(n, float(suffix_min[n - 1]), float(suffix_max[n - 1])) for n in range(1, last + 1)]
    return NestedExtrema(trace[-1][1], trace[-1][2], trace)


def limit_point_check(seq: Sequence[float], ell: float, eps: float, count: int) -> tuple[bool, list]:
    """Do at least ``count`` terms lie within ``eps`` of ``ell``?  Returns the
    verdict and every such 1-based index."""
    if count < 1:
        raise ValueError("count must be at least 1")
    a = _as_prefix(seq)
    hits = (np.flatnonzero(np.abs(a - ell) < eps) + 1).tolist()
    return len(hits) >= count, hits


# -- densities ---------------------------------------------------------------


@dataclass
class DensityReport:
    method: str
    lower: float
    upper: float
    value: Optional[float] = None
    trace: list = field(default_factory=list)
    # additive allowance for comparing against other prefix estimates
    slack: float = 0.0
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        if not -1e-12 <= self.lower <= self.upper + 1e-12 <= 1 + 2e-12:
            raise ValueError(f"inconsistent density bounds {self.lower}, {self.upper}")

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "value": self.value,
            "lower": self.lower,
            "upper": self.upper,
            "slack": self.slack,
            "extras": self.extras,
            "trace": [list(r) for r in self.trace],
        }


def _counts_from_one(A: IntSet) -> np.ndarray:
    """``c[x] = |A ∩ [1, x]|`` for ``x = 0..N-1``."""
    bits = A.bits.astype(np.int64)
    bits[0] = 0
    return np.cumsum(bits)


def schnirelmann(A: IntSet) -> DensityReport:
    """``min_{1 <= n < N} |A ∩ [1, n]| / n``."""
    if A.bound < 2:
        raise ValueError("need a bound of at least 2 to have any n in [1, N)")
    c = _counts_from_one(A)
    n = np.arange(1, A.bound)
    ratios = c[1:] / n
    i = int(np.argmin(ratios))
    value = float(ratios[i])
    return DensityReport("schnirelmann", value, value, value=value, extras={"argmin_n": i + 1})


def asymptotic_density_bounds(A: IntSet) -> DensityReport:
    """Lower/upper asymptotic density estimates from the counting ratios."""
    if A.bound < 2:
        raise ValueError("need a bound of at least 2")
    c = _counts_from_one(A)
    ratios = c[1:] / np.arange(1, A.bound)
    nested = liminf_limsup_nested(ratios)
    return DensityReport(
        "asymptotic",
        nested.liminf,
        nested.limsup,
        trace=nested.trace,
        extras={"from_n": nested.trace[-1][0]},
    )


def _default_window_cap(bound: int) -> int:
    return max(1, (bound - 1) // 8)


def banach_density(A: IntSet, n_max: Optional[int] = None) -> DensityReport:
    """Window extrema ``ā_n, a̲_n`` over windows ``[x+1, x+n]`` inside ``[1, N)``.

    The upper estimate is ``min_n ā_n / n`` and the lower ``max_n a̲_n / n``
    over ``n <= n_max``.  The slack ``n* / (N // 2)`` (largest optimizing
    window over half the prefix) bounds how far a counting ratio from the
    second half of the prefix can sit outside these estimates.
    """
    if A.bound < 2:
        raise ValueError("need a bound of at least 2")
    n_max = _default_window_cap(A.bound) if n_max is None else int(n_max)
    if not 1 <= n_max <= A.bound - 1:
        raise ValueError(f"window cap must lie in [1, {A.bound - 1}]")
    c = _counts_from_one(A)
    top = A.bound - 1
    trace = []
    hi = np.empty(n_max)
    lo = np.empty(n_max)
    for n in range(1, n_max + 1):
        # window [x+1, x+n] for x = 0..top-n
        w = c[n : top + 1] - c[: top + 1 - n]
        hi[n - 1], lo[n - 1] = w.max(), w.min()
        trace.append((n, int(hi[n - 1]), int(lo[n - 1]), hi[n - 1] / n, lo[n - 1] / n))
    n_range = np.arange(1, n_max + 1)
    up_i = int(np.argmin(hi / n_range))
    low_i = int(np.argmax(lo / n_range))
    upper, lower = float(hi[up_i] / (up_i + 1)), float(lo[low_i] / (low_i + 1))
    slack = max(up_i + 1, low_i + 1) / max(1, A.bound // 2)
    extras = {
        "n_max": n_max,
        "argmin_upper_n": up_i + 1,
        "argmax_lower_n": low_i + 1,
        # distance between the extremum and the last traced ratio
        "lim_gap_upper": float(hi[-1] / n_max - upper),
        "lim_gap_lower": float(lower - lo[-1] / n_max),
    }
    return DensityReport("banach", lower, upper, trace=trace, slack=slack, extras=extras)


def banach_nested_tensor_formula(A: IntSet, n_max: Optional[int] = None) -> DensityReport:
    """Iterated-limit evaluation of the min-over-k / max-over-x window formula.

    ``M_k(m) = max_{1 <= x <= m} |A ∩ [x+1, x+k]| / k`` is nondecreasing in
    ``m`` and is read at the largest ``m`` keeping the window inside the
    prefix; the outer ``min_{k <= n} M_k`` is nonincreasing in ``n`` and is
    read at ``n = n_max``.  The lower estimate swaps min and max.  Window
    counts come from a direct convolution, independent of the prefix sums in
    :func:`banach_density`.
    """
    if A.bound < 3:
        raise ValueError("need a bound of at least 3")
    n_max = _default_window_cap(A.bound) if n_max is None else int(n_max)
    if not 1 <= n_max <= A.bound - 2:
        raise ValueError(f"window cap must lie in [1, {A.bound - 2}]")
    bits = A.bits.astype(float)
    bits[0] = 0.0
    # position i of the valid convolution counts A over [i, i+k-1]
    outer_up = outer_low = None
    trace = []
    for k in range(1, n_max + 1):
        counts = np.rint(np.convolve(bits[1:], np.ones(k), mode="valid")).astype(np.int64)
        # counts[i] covers [i+1, i+k]; x >= 1 drops i = 0
        per_x = counts[1:] / k
        m_hi = np.maximum.accumulate(per_x)
        m_lo = np.minimum.accumulate(per_x)
        inner_up, inner_low = float(m_hi[-1]), float(m_lo[-1])
        outer_up = inner_up if outer_up is None else min(outer_up, inner_up)
        outer_low = inner_low if outer_low is None else max(outer_low, inner_low)
        # first m at which the inner extremum is reached
        sat_up = int(np.argmax(m_hi == inner_up)) + 1
        sat_low = int(np.argmax(m_lo == inner_low)) + 1
        trace.append((k, inner_up, inner_low, outer_up, outer_low, sat_up, sat_low))
    return DensityReport(
        "banach-nested",
        outer_low,
        outer_up,
        trace=trace,
        extras={"n_max": n_max},
    )


# -- double limits -----------------------------------------------------------


@dataclass
class DoubleSequence:
    """``a(n, m)`` for ``n, m >= 1``."""

    eval: Callable[[int, int], float]
    name: str = ""

    def __call__(self, n: int, m: int) -> float:
        return float(self.eval(n, m))


@dataclass
class IteratedLimit:
    value: float
    inner: dict
    # rows (N, estimate, spread) for each outer range tried
    trace: list = field(default_factory=list)
    tol: float = 0.0

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "tol": self.tol,
            "inner": {str(n): v for n, v in sorted(self.inner.items())},
            "trace": [list(r) for r in self.trace],
        }


# points sampled from each tail; consecutive pairs catch period-2 oscillation
TAIL_SAMPLES = 8


def _tail_points(lo: int, hi: int) -> list[int]:
    if hi - lo + 1 <= 2 * TAIL_SAMPLES:
        return list(range(lo, hi + 1))
    base = np.linspace(lo, hi - 1, TAIL_SAMPLES).round().astype(int)
    return sorted(set(base.tolist()) | set((base + 1).tolist()) | {hi})


def _richardson(g: Callable[[int], float]) -> Callable[[int], float]:
    # removes a leading c/m error term
    return lambda p: 2.0 * g(2 * p) - g(p)


def _tail_limit(g, tol, start, cap, extrapolate):
    """Cauchy-tail detection over the last quarter of ``[1, M]``, doubling
    ``M`` from ``start``.  Returns ``(estimate, M, spread, trace)`` or raises
    ``LookupError`` carrying the last spread."""
    h = _richardson(g) if extrapolate else g
    reach = 2 if extrapolate else 1
    M = start
    trace = []
    spread = float("inf")
    while M * reach <= cap:
        pts = _tail_points(max(1, (3 * M) // 4), M)
        vals = np.array([h(p) for p in pts])
        if not np.all(np.isfinite(vals)):
            raise LookupError(float("inf"), trace)
        spread = float(vals.max() - vals.min())
        trace.append((M, float(vals[-1]), spread))
        if spread <= tol / 2:
            return float(vals[-1]), M, spread, trace
        M *= 2
    raise LookupError(spread, trace)


def iterated_double_limit(
    ds: Callable[[int, int], float],
    tol: float = 1e-3,
    n_cap: int = 1024,
    m_cap: int = 1 << 20,
    extrapolate: bool = False,
    n_start: int = 4,
    m_start: int = 16,
) -> IteratedLimit:
    """Estimate ``lim_n lim_m a(n, m)``.

    Each inner limit is accepted once the values over the last quarter of
    the ``m``-range agree within ``tol / 2``, doubling the range up to
    ``m_cap``; the outer limit applies the same test to the inner limits.
    With ``extrapolate`` both levels use ``2 a(2p) - a(p)`` in place of
    ``a(p)``.  Raises :class:`NoInnerLimit` when some inner tail never
    settles and :class:`CapTooSmall` when the outer one does not.
    """
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    if n_cap < 1 or m_cap < 1:
        raise ValueError("caps must be positive")
    inner: dict = {}

    def ell(n: int) -> float:
        if n not in inner:
            try:
                inner[n] = _tail_limit(lambda m: float(ds(n, m)), tol, m_start, m_cap, extrapolate)[0]
            except LookupError as e:
                spread = e.args[0]
                raise NoInnerLimit(
                    f"inner limit for n={n} did not settle within tol/2={tol / 2:g} up to m={m_cap} "
                    f"(tail spread {spread:.3g})",
                    n=n,
                    spread=spread,
                ) from None
        return inner[n]

    try:
        value, _, _, trace = _tail_limit(ell, tol, min(n_start, n_cap), n_cap, extrapolate)
    except LookupError as e:
        raise CapTooSmall(
            f"outer limit did not settle within tol/2={tol / 2:g} up to n={n_cap} (tail spread {e.args[0]:.3g})"
        ) from None
    return IteratedLimit(value, dict(inner), trace, tol)


def riemann_sum(f: Callable, n: int, m: int) -> float:
    """``(1/m) * sum_{k=-nm}^{nm} f(k/m)``."""
    k = np.arange(-n * m, n * m + 1)
    y = np.asarray(f(k / m), dtype=float)
    if y.shape != k.shape:
        y = np.broadcast_to(y, k.shape)
    return float(y.sum() / m)


def riemann_double(
    f: Callable,
    tol: float = 1e-3,
    n_cap: int = 1024,
    m_cap: int = 1 << 14,
) -> IteratedLimit:
    """Improper integral of ``f`` over the line as the iterated limit of
    :func:`riemann_sum`, with Richardson extrapolation on both levels.

    ``f`` must accept a numpy array of sample points.
    """
    return iterated_double_limit(
        lambda n, m: riemann_sum(f, n, m), tol=tol, n_cap=n_cap, m_cap=m_cap, extrapolate=True, n_start=4, m_start=16
    )
