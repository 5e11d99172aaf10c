"""Pattern witnesses: admissible tuples, good orderings, verification and search.

A pattern is a family of surjections ``phi: [k] -> [m]`` with a target set
``X^phi`` for each.  A witness of depth ``L`` is one finite sequence per role
``l = 1..m`` such that for every ``phi`` and every admissible index tuple
``j`` the tuple ``(a[phi(1)][j_1], ..., a[phi(k)][j_k])`` lies in ``X^phi``.

Indices ``j`` and roles are 1-based throughout, matching the usual notation;
the elements of the grounds are 0-based integers.
"""

from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

import numpy as np

from .errors import NotFoundWithinPrefix, SearchBudgetExceeded, ShapeMismatch
from .tensorset import TensorSet, superdiagonal
from .verdict import Verdict

DEFAULT_MAX_NODES = 2_000_000


@dataclass(frozen=True)
class Surjection:
    """A map ``[k] -> [m]`` given by its 1-based values; must be onto."""

    values: tuple
    m: Optional[int] = None

    def __post_init__(self):
        values = tuple(int(v) for v in self.values)
        object.__setattr__(self, "values", values)
        if not values:
            raise ValueError("a surjection needs k >= 1")
        m = max(values) if self.m is None else int(self.m)
        object.__setattr__(self, "m", m)
        if min(values) < 1 or max(values) > m or set(values) != set(range(1, m + 1)):
            raise ValueError(f"{values} is not a map onto 1..{m}")

    @property
    def k(self) -> int:
        return len(self.values)

    def __call__(self, s: int) -> int:
        return self.values[s - 1]

    @classmethod
    def constant(cls, k: int) -> "Surjection":
        return cls((1,) * k)

    @classmethod
    def identity(cls, k: int) -> "Surjection":
        return cls(tuple(range(1, k + 1)))


def is_admissible(phi: Surjection, j: Sequence[int], strict: bool = False) -> bool:
    """Nondecreasing ``j``, strict wherever ``phi`` does not increase."""
    if len(j) != phi.k:
        raise ShapeMismatch(f"index tuple of length {len(j)} for a map of arity {phi.k}")
    v = phi.values
    for s in range(phi.k - 1):
        if j[s] > j[s + 1]:
            return False
        if j[s] == j[s + 1] and (strict or v[s] >= v[s + 1]):
            return False
    return True


def enumerate_admissible(phi: Surjection, L: int, strict: bool = False) -> Iterator[tuple]:
    """Admissible tuples in ``[1..L]^k``, lexicographically."""
    k = phi.k
    v = phi.values

    def rec(prefix):
        s = len(prefix)
        if s == k:
            yield tuple(prefix)
            return
        if s == 0:
            lo = 1
        else:
            tight = strict or v[s - 1] >= v[s]
            lo = prefix[-1] + 1 if tight else prefix[-1]
        for x in range(lo, L + 1):
            prefix.append(x)
            yield from rec(prefix)
            prefix.pop()

    if L >= 1:
        yield from rec([])


def count_admissible(phi: Surjection, L: int, strict: bool = False) -> int:
    return sum(1 for _ in enumerate_admissible(phi, L, strict))


@dataclass(frozen=True)
class GoodOrdering:
    sigma: tuple


def good_ordering(j: Sequence[int]) -> GoodOrdering:
    """Repeatedly take the least position among those holding the least value."""
    if not len(j):
        raise ValueError("good ordering of an empty tuple")
    remaining = list(range(1, len(j) + 1))
    sigma = []
    while remaining:
        low = min(j[t - 1] for t in remaining)
        pick = min(t for t in remaining if j[t - 1] == low)
        sigma.append(pick)
        remaining.remove(pick)
    return GoodOrdering(tuple(sigma))


def is_good_ordering(sigma, j: Sequence[int]) -> bool:
    sigma = tuple(sigma.sigma if isinstance(sigma, GoodOrdering) else sigma)
    if len(sigma) != len(j):
        raise ShapeMismatch("permutation and tuple differ in length")
    if sorted(sigma) != list(range(1, len(j) + 1)):
        raise ValueError(f"{sigma} is not a permutation of 1..{len(j)}")
    for s in range(len(sigma) - 1):
        a, b = j[sigma[s] - 1], j[sigma[s + 1] - 1]
        if a > b:
            return False
        if sigma[s] > sigma[s + 1] and not a < b:
            return False
    return True


@dataclass
class PatternSpec:
    """Surjections, one target per surjection, and the role grounds.

    ``ordered[l]`` asks role ``l`` to be strictly increasing.  ``strict`` makes
    every admissible tuple strictly increasing (staggered indices).
    ``candidates[l]`` optionally restricts role ``l`` to a boolean mask.
    """

    phis: tuple
    targets: tuple
    grounds: tuple
    ordered: Optional[tuple] = None
    candidates: Optional[tuple] = None
    strict: bool = False
    distinct: bool = True

    def __post_init__(self):
        self.phis = tuple(self.phis)
        self.targets = tuple(self.targets)
        self.grounds = tuple(int(g) for g in self.grounds)
        if not self.phis:
            raise ValueError("a pattern needs at least one surjection")
        if len(self.targets) != len(self.phis):
            raise ShapeMismatch("one target set per surjection is required")
        k, m = self.phis[0].k, self.phis[0].m
        for phi, X in zip(self.phis, self.targets):
            if (phi.k, phi.m) != (k, m):
                raise ShapeMismatch("all surjections must share arity and codomain")
            if X.k != k:
                raise ShapeMismatch(f"target of dimension {X.k} for arity {k}")
            want = tuple(self.grounds[phi(s) - 1] for s in range(1, k + 1))
            if X.dims != want:
                raise ShapeMismatch(f"target box {X.dims} does not match role grounds {want}")
        if len(self.grounds) != m:
            raise ShapeMismatch(f"{len(self.grounds)} grounds for {m} roles")
        self.ordered = tuple(self.ordered) if self.ordered is not None else (True,) * m
        if len(self.ordered) != m:
            raise ShapeMismatch("one ordered flag per role is required")
        if self.candidates is not None:
            self.candidates = tuple(np.asarray(c, dtype=bool) for c in self.candidates)
            if [c.shape for c in self.candidates] != [(g,) for g in self.grounds]:
                raise ShapeMismatch("candidate masks must match the role grounds")

    @property
    def k(self) -> int:
        return self.phis[0].k

    @property
    def m(self) -> int:
        return self.phis[0].m

    def digest(self) -> str:
        h = hashlib.sha256()
        h.update(repr([p.values for p in self.phis]).encode())
        h.update(repr((self.grounds, self.ordered, self.strict, self.distinct)).encode())
        for X in self.targets:
            h.update(X.fingerprint().encode())
        if self.candidates is not None:
            for c in self.candidates:
                h.update(np.packbits(c).tobytes())
        return h.hexdigest()


@dataclass
class Witness:
    sequences: list

    @property
    def depth(self) -> int:
        return len(self.sequences[0]) if self.sequences else 0

    def role(self, l: int) -> list:
        return self.sequences[l - 1]


def _pattern_tuple(phi, j, w):
    return tuple(w.sequences[phi(s) - 1][j[s - 1] - 1] for s in range(1, phi.k + 1))


def verify_witness(spec: PatternSpec, w: Witness) -> Verdict:
    """Distinctness, monotonicity and every admissible-tuple membership."""
    if len(w.sequences) != spec.m:
        raise ShapeMismatch(f"witness has {len(w.sequences)} roles, pattern has {spec.m}")
    L = w.depth
    if any(len(seq) != L for seq in w.sequences):
        raise ShapeMismatch("all witness sequences must have the same depth")
    counts = {}
    for l, seq in enumerate(w.sequences, start=1):
        for n, x in enumerate(seq, start=1):
            if not 0 <= x < spec.grounds[l - 1]:
                return Verdict.fail("element outside ground", {"role": l, "index": n, "value": x})
            if spec.candidates is not None and not spec.candidates[l - 1][x]:
                return Verdict.fail("element outside candidates", {"role": l, "index": n, "value": x})
    if spec.distinct:
        seen = {}
        for l, seq in enumerate(w.sequences, start=1):
            for n, x in enumerate(seq, start=1):
                if x in seen:
                    return Verdict.fail(
                        "repeated element", {"value": x, "first": list(seen[x]), "second": [l, n]}
                    )
                seen[x] = (l, n)
    for l, seq in enumerate(w.sequences, start=1):
        if spec.ordered[l - 1]:
            for n in range(1, L):
                if not seq[n - 1] < seq[n]:
                    return Verdict.fail("role not increasing", {"role": l, "index": n + 1})
    for idx, (phi, X) in enumerate(zip(spec.phis, spec.targets)):
        checked = 0
        for j in enumerate_admissible(phi, L, spec.strict):
            t = _pattern_tuple(phi, j, w)
            checked += 1
            if not X.contains(t):
                counts[str(idx)] = checked
                return Verdict.fail(
                    "tuple outside target",
                    {"phi": list(phi.values), "j": list(j), "tuple": list(t)},
                    counts,
                )
        counts[str(idx)] = checked
    return Verdict.ok(counts)


def certificate(spec: PatternSpec, w: Optional[Witness], verdict: Optional[Verdict] = None) -> dict:
    if w is not None and verdict is None:
        verdict = verify_witness(spec, w)
    return {
        "spec_hash": spec.digest(),
        "sequences": None if w is None else [list(map(int, s)) for s in w.sequences],
        "verdict": None if verdict is None else verdict.to_dict(),
    }


# ---------------------------------------------------------------------------
# search


@dataclass
class _Constraint:
    target: TensorSet
    vars: tuple  # variable id per tuple position
    last: int


def _pad(mask: np.ndarray, width: int) -> np.ndarray:
    if mask.shape[0] >= width:
        return mask[:width]
    out = np.zeros(width, dtype=bool)
    out[: mask.shape[0]] = mask
    return out


class _Search:
    """Depth-first assignment of ``a[l][n]`` in the order n-major, role-minor."""

    def __init__(self, spec: PatternSpec, L: int, max_nodes: int, rng=None, greedy=False, max_free=2):
        self.spec, self.L, self.m = spec, L, spec.m
        self.max_nodes = max_nodes
        self.nodes = 0
        self.rng = rng
        self.greedy = greedy
        self.n_vars = L * self.m
        self.role_of = [v % self.m for v in range(self.n_vars)]
        self.width = max(spec.grounds)
        seen = set()
        self.constraints: list[_Constraint] = []
        for phi, X in zip(spec.phis, spec.targets):
            for j in enumerate_admissible(phi, L, spec.strict):
                vs = tuple((j[s] - 1) * self.m + phi.values[s] - 1 for s in range(phi.k))
                key = (id(X), tuple(sorted(vs)) if X.symmetric else vs)
                if key in seen:
                    continue
                seen.add(key)
                self.constraints.append(_Constraint(X, vs, max(vs)))
        self.by_var = [[] for _ in range(self.n_vars)]
        for ci, c in enumerate(self.constraints):
            for v in set(c.vars):
                self.by_var[v].append(ci)
        self.base = []
        for l, g in enumerate(spec.grounds):
            mask = np.zeros(self.width, dtype=bool)
            mask[:g] = True if spec.candidates is None else spec.candidates[l]
            self.base.append(mask)
        self.domains = [self.base[self.role_of[v]].copy() for v in range(self.n_vars)]
        self.values = [-1] * self.n_vars
        self.used = np.zeros(self.width, dtype=bool)
        self.last = [-1] * self.m
        # variables of each role are assigned in index order
        self.next_index = [0] * self.m
        self.max_free = max_free

    # -- helpers -------------------------------------------------------------

    def _live(self, v):
        """Current domain of ``v`` after distinctness and role monotonicity."""
        dom = self.domains[v] & ~self.used if self.spec.distinct else self.domains[v].copy()
        lo = self.last[self.role_of[v]] + 1
        if lo and self.spec.ordered[self.role_of[v]]:
            dom[:lo] = False
        return dom

    def _role_future(self, l):
        """Values still open to the unassigned variables of role ``l``."""
        dom = self.base[l] & ~self.used if self.spec.distinct else self.base[l].copy()
        if self.spec.ordered[l]:
            dom[: self.last[l] + 1] = False
        return dom

    # -- propagation ---------------------------------------------------------

    def _assign(self, v, x):
        """Assign and propagate; returns (ok, undo record)."""
        l = self.role_of[v]
        record = ({}, self.last[l])
        self.values[v] = x
        self.used[x] = True
        self.last[l] = x
        saved = record[0]
        # pass 1: completed constraints and forward checking of single free slots
        for ci in self.by_var[v]:
            c = self.constraints[ci]
            free = [p for p, u in enumerate(c.vars) if self.values[u] < 0]
            if not free:
                if not c.target.contains(tuple(self.values[u] for u in c.vars)):
                    return False, record
            elif len(free) == 1:
                p = free[0]
                u = c.vars[p]
                fixed = {q: self.values[w] for q, w in enumerate(c.vars) if q != p}
                f = c.target.fiber(fixed, p)
                if u not in saved:
                    saved[u] = self.domains[u]
                    self.domains[u] = self.domains[u].copy()
                self.domains[u][: f.shape[0]] &= f
                self.domains[u][f.shape[0]:] = False
        self.next_index[l] += 1
        live = {}
        for u in self._unassigned():
            live[u] = self._live(u)
            if not live[u].any():
                return False, record
        # pass 2: multi-slot viability against the narrowed domains, with
        # two-slot groups also pruning the domains of their free variables
        touched = set(self.by_var[v])
        for u in saved:
            touched.update(self.by_var[u])
        groups: dict = {}
        for ci in sorted(touched):
            c = self.constraints[ci]
            free = [p for p, u in enumerate(c.vars) if self.values[u] < 0]
            # wider constraints rarely prune and cost the most
            if not 2 <= len(free) <= self.max_free:
                continue
            fixed = {p: self.values[u] for p, u in enumerate(c.vars) if self.values[u] >= 0}
            if c.target.symmetric:
                # constraints on one symmetric target with the same free
                # variables must be satisfied by a single shared completion
                key = (id(c.target), tuple(sorted(c.vars[p] for p in free)))
            else:
                key = ci
            if key not in groups:
                groups[key] = (c.target, free, c.vars, [])
            groups[key][3].append(fixed)
        # one pass; repeating to a fixpoint costs more than it prunes
        cache: dict = {}
        for target, free, cvars, fixeds in groups.values():
            free_dom = {p: (cvars[p], live[cvars[p]]) for p in free}
            masks = target.narrow_group(fixeds, free_dom, cache)
            if masks is None:
                return False, record
            for u, mask in masks.items():
                narrowed = live[u] & _pad(mask, live[u].shape[0])
                if not narrowed.any():
                    return False, record
                if u not in saved:
                    saved[u] = self.domains[u]
                    self.domains[u] = self.domains[u].copy()
                self.domains[u] &= narrowed
                live[u] = narrowed
        return self._counts_ok(), record

    def _unassigned(self):
        return [n * self.m + l for l in range(self.m) for n in range(self.next_index[l], self.L)]

    def _counts_ok(self):
        # each role needs room for its remaining variables
        for l in range(self.m):
            need = self.L - self.next_index[l]
            if need and int(self._role_future(l).sum()) < need:
                return False
        return True

    def _next_var(self):
        """Next variable in n-major order, or ``-1`` when all are assigned."""
        open_roles = [l for l in range(self.m) if self.next_index[l] < self.L]
        if not open_roles:
            return -1
        return min(self.next_index[l] * self.m + l for l in open_roles)

    def _undo(self, v, x, record):
        saved, last = record
        for u, dom in saved.items():
            self.domains[u] = dom
        self.values[v] = -1
        self.used[x] = False
        self.last[self.role_of[v]] = last
        self.next_index[self.role_of[v]] = v // self.m

    def _candidates(self, v):
        cands = np.flatnonzero(self._live(v))
        if not self.greedy:
            return cands
        scored = []
        for x in cands:
            ok, saved = self._assign(v, int(x))
            if ok:
                score = min((self._live(u).sum() for u in self._unassigned()), default=self.width)
                scored.append((-int(score), float(self.rng.random()), int(x)))
            self._undo(v, int(x), saved)
        scored.sort()
        return [x for _, _, x in scored]

    def run(self):
        v = self._next_var()
        if v < 0:
            return True
        for x in self._candidates(v):
            x = int(x)
            self.nodes += 1
            if self.nodes > self.max_nodes:
                raise SearchBudgetExceeded(f"search exceeded {self.max_nodes} nodes")
            ok, saved = self._assign(v, x)
            if ok and self.run():
                return True
            self._undo(v, x, saved)
        return False

    def witness(self) -> Witness:
        return Witness([[self.values[n * self.m + l] for n in range(self.L)] for l in range(self.m)])


def search_witness(
    spec: PatternSpec,
    L: int,
    strategy: str = "exhaustive",
    seed: int = 0,
    max_nodes: int = DEFAULT_MAX_NODES,
    restarts: int = 8,
) -> Optional[Witness]:
    """Backtracking search for a depth-``L`` witness, or ``None``.

    ``exhaustive`` is complete: ``None`` means no witness exists inside the
    grounds.  ``greedy`` orders candidates by how much room they leave and
    retries with seeded tie-breaking; its ``None`` is only a failure to find.
    """
    if L < 1:
        raise ValueError("depth must be at least 1")
    if strategy == "exhaustive":
        s = _Search(spec, L, max_nodes)
        found = s.run()
    elif strategy == "greedy":
        rng = np.random.default_rng(seed)
        found = False
        per_restart = max(1, max_nodes // max(1, restarts))
        for _ in range(restarts):
            s = _Search(spec, L, per_restart, rng=rng, greedy=True)
            try:
                found = s.run()
            except SearchBudgetExceeded:
                found = False
            if found:
                break
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    if not found:
        return None
    w = s.witness()
    verdict = verify_witness(spec, w)
    if not verdict.passed:
        raise AssertionError(f"search produced an invalid witness: {verdict.violation}")
    return w


def brute_force_witness(spec: PatternSpec, L: int) -> Optional[Witness]:
    """Try every candidate witness in lexicographic order (small grounds only)."""
    pools = []
    for l, g in enumerate(spec.grounds):
        xs = range(g) if spec.candidates is None else np.flatnonzero(spec.candidates[l]).tolist()
        pools.append(list(itertools.product(xs, repeat=L)))
    for combo in itertools.product(*pools):
        w = Witness([list(seq) for seq in combo])
        if verify_witness(spec, w).passed:
            return w
    return None


# ---------------------------------------------------------------------------
# Ramsey-type wrappers


def _auto_strategy(n: int, strategy: str) -> str:
    if strategy != "auto":
        return strategy
    return "exhaustive" if n <= 64 else "greedy"


def ramsey_large(
    X: TensorSet,
    h: int,
    strategy: str = "auto",
    seed: int = 0,
    max_nodes: int = DEFAULT_MAX_NODES,
    candidates: Optional[np.ndarray] = None,
) -> Optional[list]:
    """An ``h``-element ``H`` with every increasing k-tuple of ``H`` in ``X``."""
    n = X.dims[0]
    if any(d != n for d in X.dims):
        raise ShapeMismatch("a Ramsey-large search needs a cubical box")
    if h < X.k:
        raise ValueError(f"h={h} must be at least the dimension {X.k}")
    if h > n:
        raise ValueError(f"h={h} exceeds the ground size {n}")
    spec = PatternSpec(
        (Surjection.constant(X.k),),
        (X,),
        (n,),
        candidates=None if candidates is None else (candidates,),
    )
    w = search_witness(spec, h, _auto_strategy(n, strategy), seed, max_nodes)
    return None if w is None else list(w.sequences[0])


def multi_large(
    X: TensorSet, h: int, strategy: str = "auto", seed: int = 0, max_nodes: int = DEFAULT_MAX_NODES
) -> Optional[list]:
    """Disjoint increasing ``H_1..H_k`` whose staggered tuples all lie in ``X``."""
    if h < 1:
        raise ValueError("h must be positive")
    spec = PatternSpec((Surjection.identity(X.k),), (X,), X.dims, strict=True)
    w = search_witness(spec, h, _auto_strategy(max(X.dims), strategy), seed, max_nodes)
    return None if w is None else [list(s) for s in w.sequences]


def find_homogeneous(
    coloring,
    k: int,
    n: int,
    h: int,
    colors: Optional[Sequence] = None,
    strategy: str = "auto",
    seed: int = 0,
    max_nodes: int = DEFAULT_MAX_NODES,
):
    """``(H, color)`` with every increasing k-tuple of ``H`` of that color.

    ``coloring`` takes an increasing k-tuple of elements of ``[0, n)``.  Colors
    are tried in ascending order.  Returns ``None`` when ``n`` is too small.
    """
    if h < k:
        raise ValueError(f"h={h} must be at least k={k}")
    if h > n:
        return None
    table = {}
    for t in itertools.combinations(range(n), k):
        c = coloring(t)
        if colors is not None and c not in colors:
            raise ValueError(f"color {c!r} of {t} outside the allowed colors {list(colors)}")
        table[t] = c
    palette = sorted(set(table.values())) if colors is None else sorted(set(colors))
    for color in palette:
        members = [t for t, c in table.items() if c == color]
        X = _tuples_set(n, k, members, f"color[{color}]")
        H = ramsey_large(X, h, strategy, seed, max_nodes)
        if H is not None:
            return H, color
    return None


def _tuples_set(n, k, members, name):
    if k <= 3 and n <= 64:
        return TensorSet.from_tuples((n,) * k, members, name=name)
    keys = {tuple(t) for t in members}

    def pred(*xs):
        shape = np.broadcast(*xs).shape
        cols = [np.broadcast_to(x, shape).ravel() for x in xs]
        out = np.fromiter((tuple(map(int, t)) in keys for t in zip(*cols)), dtype=bool, count=cols[0].size)
        return out.reshape(shape)

    return TensorSet((n,) * k, predicate=pred, name=name)


@dataclass
class CauchyResult:
    indices: list  # 1-based positions n_1 < ... < n_t
    epsilon: float  # 1 / n_1
    max_gap: float  # largest |a_{n_u} - a_{n_v}| among the chosen terms past the first


def cauchy_subsequence(seq: Sequence[float], t: int, start: int = 1, max_nodes: int = DEFAULT_MAX_NODES) -> CauchyResult:
    """Positions ``n_1 < ... < n_t`` with ``|a_{n_u} - a_{n_v}| <= 1/n_s`` for all
    ``s < u < v``: a set homogeneous for the first class of the triple
    partition, so the tail after ``n_s`` oscillates by at most ``1/n_s``.
    """
    a = np.asarray(seq, dtype=float)
    n = a.size
    if t < 3:
        raise ValueError("t must be at least 3")
    if not np.all(np.isfinite(a)):
        raise ValueError("sequence must be finite")

    def pred(x, y, z):
        # positions are stored 0-based; n_s = x + 1
        gap = np.abs(a[np.asarray(y)] - a[np.asarray(z)])
        return (x < y) & (y < z) & (gap <= 1.0 / (np.asarray(x) + 1))

    X = TensorSet((n,) * 3, predicate=pred, name="cauchy-c1", materialize=False)
    cands = np.zeros(n, dtype=bool)
    cands[max(0, start - 1):] = True
    if t > int(cands.sum()):
        raise NotFoundWithinPrefix(f"prefix of length {n} is too short for {t} terms")
    try:
        H = ramsey_large(X, t, strategy="exhaustive", max_nodes=max_nodes, candidates=cands)
    except SearchBudgetExceeded as exc:
        raise NotFoundWithinPrefix(str(exc)) from exc
    if H is None:
        raise NotFoundWithinPrefix(f"no {t}-term subsequence of the required kind in the first {n} terms")
    idx = [x + 1 for x in H]
    tail = a[H[1:]]
    return CauchyResult(idx, 1.0 / idx[0], float(tail.max() - tail.min()))


def verify_homogeneous(coloring, k: int, H: Sequence[int], color) -> Verdict:
    """Every increasing k-tuple of ``H`` has ``color``."""
    if any(a >= b for a, b in zip(H, H[1:])):
        return Verdict.fail("H not increasing", {"H": list(H)})
    checked = 0
    for t in itertools.combinations(H, k):
        checked += 1
        if coloring(t) != color:
            return Verdict.fail("tuple of another color", {"tuple": list(t), "color": coloring(t)}, {"checked": checked})
    return Verdict.ok({"checked": checked})


def verify_ramsey_large(X: TensorSet, H: Sequence[int]) -> Verdict:
    """Every increasing k-tuple of ``H`` lies in ``X``."""
    if any(a >= b for a, b in zip(H, H[1:])):
        return Verdict.fail("H not increasing", {"H": list(H)})
    checked = 0
    for t in itertools.combinations(H, X.k):
        checked += 1
        if not X.contains(t):
            return Verdict.fail("tuple outside set", {"tuple": list(t)}, {"checked": checked})
    return Verdict.ok({"checked": checked})


def verify_cauchy(seq: Sequence[float], indices: Sequence[int]) -> Verdict:
    """``|a_{n_u} - a_{n_v}| <= 1/n_s`` for all ``s < u < v`` (1-based indices)."""
    a = list(map(float, seq))
    if any(x >= y for x, y in zip(indices, indices[1:])) or indices[0] < 1 or indices[-1] > len(a):
        return Verdict.fail("indices not increasing inside the prefix", {"indices": list(indices)})
    checked = 0
    for s, u, v in itertools.combinations(indices, 3):
        checked += 1
        if abs(a[u - 1] - a[v - 1]) > 1.0 / s:
            return Verdict.fail("gap too large", {"triple": [s, u, v]}, {"checked": checked})
    return Verdict.ok({"checked": checked})


def verify_interleaved(X: TensorSet, a: Sequence[int]) -> Verdict:
    """``(a_i, a_2j, a_2j+1, a_k) in X`` for all ``i < 2j`` and ``2j+1 < k <= 2L+1``."""
    if X.k != 4:
        raise ShapeMismatch("interleaved check needs a 4-dimensional set")
    if len(a) % 2 != 1:
        raise ShapeMismatch("sequence length must be odd (2L+1)")
    top = len(a)
    checked = 0
    for j in range(1, (top - 1) // 2 + 1):
        for i in range(1, 2 * j):
            for k in range(2 * j + 2, top + 1):
                t = (a[i - 1], a[2 * j - 1], a[2 * j], a[k - 1])
                checked += 1
                if not X.contains(t):
                    return Verdict.fail("tuple outside set", {"i": i, "j": j, "k": k, "tuple": list(t)}, {"checked": checked})
    return Verdict.ok({"checked": checked})


__all__ = [
    "Surjection",
    "PatternSpec",
    "Witness",
    "GoodOrdering",
    "is_admissible",
    "enumerate_admissible",
    "count_admissible",
    "good_ordering",
    "is_good_ordering",
    "verify_witness",
    "verify_homogeneous",
    "verify_ramsey_large",
    "verify_cauchy",
    "search_witness",
    "brute_force_witness",
    "superdiagonal",
    "ramsey_large",
    "multi_large",
    "find_homogeneous",
    "cauchy_subsequence",
    "verify_interleaved",
    "certificate",
]
