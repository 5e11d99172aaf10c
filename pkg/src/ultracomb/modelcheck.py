"""Exhaustive model checks of the tensor-product identities on finite grounds.

Each clause walks every principal ultrafilter on the relevant product space and
compares two tables over *every* subset: one obtained from the defining
membership condition, one from the identity being checked.  Nothing here uses
the shortcut that all finite ultrafilters are principal at a known point,
except to enumerate them.
"""

from __future__ import annotations

import itertools
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .errors import CapExceeded
from .ultrafilter import (
    TABLE_MAX_BITS,
    all_subsets,
    axiom_violation,
    first_mismatch,
    fiber_bits,
    image_table,
    preimage_bits,
    principal_point,
    principal_table,
    star_table,
    tensor_table,
)

# maps into codomains of size <= this are enumerated exhaustively
MAP_CODOMAIN_MAX = 3


@dataclass
class ClauseResult:
    name: str
    ultrafilters: int
    subsets: int
    pairs_checked: int
    passed: bool
    counterexample: Optional[dict] = None


@dataclass
class ModelReport:
    sizes: tuple
    clauses: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.clauses)

    def clause(self, name: str) -> ClauseResult:
        for c in self.clauses:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "sizes": list(self.sizes),
            "passed": self.passed,
            "clauses": [asdict(c) for c in self.clauses],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def _proj_values(sizes, axes):
    """Index map of the projection of a row-major product onto 0-based ``axes``."""
    values = []
    for coords in itertools.product(*(range(s) for s in sizes)):
        index = 0
        for a in axes:
            index = index * sizes[a] + coords[a]
        values.append(index)
    return values


def _cex(point, subset):
    return {"point": int(point), "subset": hex(int(subset))}


def _result(name, n_uf, n_bits, pairs, cex):
    return ClauseResult(name, n_uf, 1 << n_bits, pairs, cex is None, cex)


# -- clauses on I x J ---------------------------------------------------------


def _clause_axioms(ni, nj):
    n = ni * nj
    for w in range(n):
        bad = axiom_violation(principal_table(n, w), n)
        if bad:
            return _result("ultrafilter_axioms", n, n, n << n, _cex(w, bad[1]))
    return _result("ultrafilter_axioms", n, n, n << n, None)


def _clause_projections_of_tensor(ni, nj):
    n = ni * nj
    p1 = _proj_values((ni, nj), (0,))
    p2 = _proj_values((ni, nj), (1,))
    for u in range(ni):
        for v in range(nj):
            t = tensor_table(principal_table(ni, u), ni, principal_table(nj, v), nj)
            for proj, nb, expect in ((p1, ni, principal_table(ni, u)), (p2, nj, principal_table(nj, v))):
                bad = first_mismatch(image_table(t, proj, nb), expect)
                if bad is not None:
                    return _result("projections_of_tensor", n, n, n << n, _cex(u * nj + v, bad))
    return _result("projections_of_tensor", n, n, n << n, None)


def _projections(w_table, ni, nj):
    t1 = image_table(w_table, _proj_values((ni, nj), (0,)), ni)
    t2 = image_table(w_table, _proj_values((ni, nj), (1,)), nj)
    return t1, t2


def _clause_tensor_of_projections(ni, nj, name="tensor_of_projections"):
    n = ni * nj
    for w in range(n):
        tw = principal_table(n, w)
        t1, t2 = _projections(tw, ni, nj)
        bad = first_mismatch(tensor_table(t1, ni, t2, nj), tw)
        if bad is not None:
            return _result(name, n, n, n << n, _cex(w, bad))
    return _result(name, n, n, n << n, None)


def _fiber_membership(tw, t2, ni, nj):
    """Per subset: how many vertical fibers lie in the second projection."""
    xs = all_subsets(ni * nj)
    count = np.zeros(xs.shape, dtype=np.int64)
    for i in range(ni):
        count += t2[fiber_bits(xs, i, nj)]
    return count


def _clause_fiberwise(ni, nj):
    n = ni * nj
    for w in range(n):
        tw = principal_table(n, w)
        _, t2 = _projections(tw, ni, nj)
        count = _fiber_membership(tw, t2, ni, nj)
        bad = np.flatnonzero((count == ni) & ~tw)
        if bad.size:
            return _result("fiberwise_membership_implies_member", n, n, n << n, _cex(w, bad[0]))
    return _result("fiberwise_membership_implies_member", n, n, n << n, None)


def _clause_large_fiber(ni, nj):
    n = ni * nj
    for w in range(n):
        tw = principal_table(n, w)
        _, t2 = _projections(tw, ni, nj)
        count = _fiber_membership(tw, t2, ni, nj)
        bad = np.flatnonzero(tw & (count == 0))
        if bad.size:
            return _result("member_has_large_fiber", n, n, n << n, _cex(w, bad[0]))
    return _result("member_has_large_fiber", n, n, n << n, None)


def _clause_principal_projection(ni, nj):
    # every projection of a finite ultrafilter is principal, so the
    # hypothesis always holds and the conclusion must hold everywhere
    n = ni * nj
    for w in range(n):
        tw = principal_table(n, w)
        t1, t2 = _projections(tw, ni, nj)
        if _principal_or_none(t1, ni) is None and _principal_or_none(t2, nj) is None:
            continue
        bad = first_mismatch(tensor_table(t1, ni, t2, nj), tw)
        if bad is not None:
            return _result("principal_projection_gives_tensor", n, n, n << n, _cex(w, bad))
    return _result("principal_projection_gives_tensor", n, n, n << n, None)


def _principal_or_none(table, nb):
    return principal_point(table, nb)


def _maps(domain, rng, samples):
    """All maps ``[domain] -> [c]`` for ``c <= 3``, or a seeded sample if too many."""
    out = []
    for c in range(1, MAP_CODOMAIN_MAX + 1):
        if c**domain <= samples:
            out.extend((c, f) for f in itertools.product(range(c), repeat=domain))
        else:
            for _ in range(samples):
                out.append((c, tuple(int(x) for x in rng.integers(0, c, size=domain))))
    return out


def _clause_image_commutes(ni, nj, samples, seed):
    """``f(U) (x) g(V) = (f x g)(U (x) V)`` for maps into small codomains."""
    n = ni * nj
    rng = np.random.default_rng(seed)
    fs = _maps(ni, rng, samples)
    gs = _maps(nj, rng, samples)
    pairs = 0
    tables_i = [principal_table(ni, u) for u in range(ni)]
    tables_j = [principal_table(nj, v) for v in range(nj)]
    tensors = {
        (u, v): tensor_table(tables_i[u], ni, tables_j[v], nj) for u in range(ni) for v in range(nj)
    }
    # the left side depends only on the codomains and the images of the points
    lhs_cache: dict = {}
    for (ci, f), (cj, g) in itertools.product(fs, gs):
        fg = [f[i] * cj + g[j] for i in range(ni) for j in range(nj)]
        nb = ci * cj
        pre = preimage_bits(all_subsets(nb), fg)
        for u in range(ni):
            for v in range(nj):
                key = (ci, cj, f[u], g[v])
                if key not in lhs_cache:
                    fu = image_table(tables_i[u], f, ci)
                    gv = image_table(tables_j[v], g, cj)
                    lhs_cache[key] = tensor_table(fu, ci, gv, cj)
                rhs = tensors[(u, v)][pre]
                pairs += 1 << nb
                bad = first_mismatch(lhs_cache[key], rhs)
                if bad is not None:
                    cex = _cex(u * nj + v, bad)
                    cex["maps"] = [list(f), list(g)]
                    return ClauseResult("image_commutes_with_tensor", n, 1 << n, pairs, False, cex)
    return ClauseResult("image_commutes_with_tensor", n, 1 << n, pairs, True, None)


def _clause_star_identity(ni, nj):
    n = ni * nj
    tables = [principal_table(n, w) for w in range(n)]
    projs = [_projections(t, ni, nj) for t in tables]
    for v, w in itertools.product(range(n), repeat=2):
        lhs = star_table(tables[v], tables[w], ni, nj)
        rhs = tensor_table(projs[v][0], ni, projs[w][1], nj)
        bad = first_mismatch(lhs, rhs)
        if bad is not None:
            cex = _cex(v, bad)
            cex["second_point"] = w
            return _result("star_equals_tensor_of_projections", n * n, n, (n * n) << n, cex)
    return _result("star_equals_tensor_of_projections", n * n, n, (n * n) << n, None)


def _clause_star_idempotent(ni, nj):
    n = ni * nj
    for w in range(n):
        tw = principal_table(n, w)
        bad = first_mismatch(star_table(tw, tw, ni, nj), tw)
        if bad is not None:
            return _result("star_idempotent", n, n, n << n, _cex(w, bad))
    return _result("star_idempotent", n, n, n << n, None)


# -- clauses on I x J x K -----------------------------------------------------


def _clause_triple(ni, nj, nk):
    """``Z = pi1(Z) (x) pi2(Z) (x) pi3(Z)`` with both pair projections tensors."""
    n = ni * nj * nk
    sizes = (ni, nj, nk)
    for z in range(n):
        tz = principal_table(n, z)
        t = [image_table(tz, _proj_values(sizes, (a,)), sizes[a]) for a in range(3)]
        t12 = image_table(tz, _proj_values(sizes, (0, 1)), ni * nj)
        t23 = image_table(tz, _proj_values(sizes, (1, 2)), nj * nk)
        for lhs, rhs in (
            (t12, tensor_table(t[0], ni, t[1], nj)),
            (t23, tensor_table(t[1], nj, t[2], nk)),
            (tz, tensor_table(tensor_table(t[0], ni, t[1], nj), ni * nj, t[2], nk)),
        ):
            bad = first_mismatch(lhs, rhs)
            if bad is not None:
                return _result("triple_tensor_from_pair_projections", n, n, n << n, _cex(z, bad))
    return _result("triple_tensor_from_pair_projections", n, n, n << n, None)


def _clause_associative(ni, nj, nk):
    n = ni * nj * nk
    for u, v, w in itertools.product(range(ni), range(nj), range(nk)):
        tu, tv, tw = principal_table(ni, u), principal_table(nj, v), principal_table(nk, w)
        left = tensor_table(tensor_table(tu, ni, tv, nj), ni * nj, tw, nk)
        right = tensor_table(tu, ni, tensor_table(tv, nj, tw, nk), nj * nk)
        bad = first_mismatch(left, right)
        if bad is not None:
            return _result("tensor_associative", n, n, n << n, _cex((u * nj + v) * nk + w, bad))
    return _result("tensor_associative", n, n, n << n, None)


def _run(job):
    fn, args = job
    return fn(*args)


def check_model(
    i_size: int,
    j_size: int,
    k_size: Optional[int] = None,
    cap: int = 6,
    map_samples: int = 64,
    seed: int = 0,
    workers: int = 1,
) -> ModelReport:
    """Run every clause on ``I x J`` (and ``I x J x K`` when ``k_size`` is given)."""
    sizes = (i_size, j_size) if k_size is None else (i_size, j_size, k_size)
    for s in sizes:
        if not isinstance(s, int) or s < 1:
            raise ValueError(f"ground sizes must be positive integers, got {s!r}")
        if s > cap:
            raise CapExceeded(f"ground size {s} exceeds the exhaustive cap {cap}")
    bits = 1
    for s in sizes:
        bits *= s
    if i_size * j_size > TABLE_MAX_BITS or bits > TABLE_MAX_BITS:
        raise CapExceeded(f"product of size {bits} is too large for exhaustive subset scans")

    ni, nj = i_size, j_size
    jobs = [
        (_clause_axioms, (ni, nj)),
        (_clause_projections_of_tensor, (ni, nj)),
        (_clause_tensor_of_projections, (ni, nj)),
        (_clause_fiberwise, (ni, nj)),
        (_clause_large_fiber, (ni, nj)),
        (_clause_principal_projection, (ni, nj)),
        (_clause_image_commutes, (ni, nj, map_samples, seed)),
        (_clause_star_identity, (ni, nj)),
        (_clause_star_idempotent, (ni, nj)),
    ]
    if k_size is not None:
        jobs.append((_clause_triple, (ni, nj, k_size)))
        jobs.append((_clause_associative, (ni, nj, k_size)))

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run, jobs))
    else:
        results = [_run(j) for j in jobs]
    return ModelReport(sizes=sizes, clauses=results)
