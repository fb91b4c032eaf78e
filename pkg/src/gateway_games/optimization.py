"""Exact social-optimum search, equilibrium enumeration, and price ratios.

Two search methods share one tie-break order (cost, gateway count, sorted
ids).  Full enumeration sweeps every non-empty profile; the bounded method
exploits ``c(S) >= alpha * |S|`` to cap the gateway count at ``floor(U /
alpha)`` for a feasible upper bound U, prunes whole cardinality levels with
distance lower bounds, and collapses interchangeable nodes into canonical
representatives.  Both certify an exact optimum.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _engine
from .dynamics import resolve_exhaustive_limit
from .errors import StateSpaceTooLarge
from .game import (
    GameConfig,
    StrategyProfile,
    Variant,
    floor_div,
    frac_str,
    social_cost,
)
from .graphs import DistanceOracle, Graph, all_pairs_distances

# Canonical-profile count above which the bounded method refuses to start.
BOUNDED_ENUMERATION_CAP = 1 << 25


@dataclass(frozen=True)
class FullEnumeration:
    """Every non-empty gateway set was costed."""


@dataclass(frozen=True)
class BoundedCardinality:
    """Canonical gateway sets of size at most ``bound`` were costed."""

    bound: int


SearchMethod = FullEnumeration | BoundedCardinality


@dataclass(frozen=True)
class OptimumResult:
    best_profile: StrategyProfile
    best_cost: Fraction
    method: SearchMethod
    certified_exact: bool


@dataclass(frozen=True)
class EquilibriumCatalog:
    """All pure Nash equilibria with exact costs, plus both price ratios.

    ``poa`` and ``pos`` are None when the instance has no equilibrium at all.
    """

    equilibria: tuple[tuple[StrategyProfile, Fraction], ...]
    poa: Fraction | None
    pos: Fraction | None
    optimum: OptimumResult


@dataclass(frozen=True)
class RegimeReport:
    variant: Variant
    alpha: Fraction
    n: int
    regime: str
    envelope: str
    poa: Fraction | None
    pos: Fraction | None


def _mask_ids(mask: int) -> tuple[int, ...]:
    return tuple(i for i in range(mask.bit_length()) if mask >> i & 1)


def _scaled_costs(sums: np.ndarray, counts: np.ndarray, alpha: Fraction) -> np.ndarray:
    """Costs as comparable integers: denominator * distance part + numerator * |S|."""
    p, q = alpha.numerator, alpha.denominator
    if p < _engine.SCALE_LIMIT and q < _engine.SCALE_LIMIT:
        return sums * np.int64(q) + counts.astype(np.int64) * np.int64(p)
    return sums.astype(object) * q + counts.astype(object) * p


def _pick_best_mask(masks: np.ndarray, scaled: np.ndarray, counts: np.ndarray) -> int:
    lo = scaled.min()
    idx = np.flatnonzero(scaled == lo)
    sizes = counts[idx]
    idx = idx[sizes == sizes.min()]
    return min((int(masks[i]) for i in idx), key=_mask_ids)


def _full_enumeration(g: Graph, d: DistanceOracle, cfg: GameConfig) -> OptimumResult:
    total = 1 << g.n
    masks = np.arange(1, total, dtype=np.int64)
    maximum = cfg.variant is Variant.MAX
    sums = _engine.term_sums_for_masks(d.dist, masks, maximum=maximum)
    counts = _engine.popcounts(total)[1:]
    best = _pick_best_mask(masks, _scaled_costs(sums, counts, cfg.alpha), counts)
    i = best - 1
    cost = cfg.alpha * int(counts[i]) + Fraction(int(sums[i]))
    return OptimumResult(StrategyProfile.from_mask(best), cost, FullEnumeration(), True)


def twin_classes(g: Graph) -> tuple[tuple[int, ...], ...]:
    """Partition nodes into interchangeable groups.

    Two nodes land in one group when their neighbourhoods agree outside the
    pair itself; swapping them is then a graph automorphism, so any
    permutation within a group preserves every profile cost.
    """
    neigh = [frozenset(g.adj[v]) for v in range(g.n)]
    parent = list(range(g.n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u in range(g.n):
        for v in range(u + 1, g.n):
            if neigh[u] - {v} == neigh[v] - {u}:
                ru, rv = find(u), find(v)
                if ru != rv:
                    parent[max(ru, rv)] = min(ru, rv)
    groups: dict[int, list[int]] = {}
    for v in range(g.n):
        groups.setdefault(find(v), []).append(v)
    return tuple(tuple(sorted(members)) for _, members in sorted(groups.items()))


def _level_counts(sizes: list[int], kmax: int) -> list[int]:
    """Number of canonical profiles per cardinality, via polynomial product."""
    coeffs = [1]
    for size in sizes:
        nxt = [0] * min(len(coeffs) + size, kmax + 1)
        for i, c in enumerate(coeffs):
            for t in range(size + 1):
                if i + t <= kmax:
                    nxt[i + t] += c
        coeffs = nxt
    return coeffs + [0] * (kmax + 1 - len(coeffs))


def _canonical_masks(prefixes: list[list[int]], k: int) -> list[int]:
    """All canonical masks with exactly ``k`` gateways.

    Each group contributes a prefix of its smallest ids; prefixes per group
    are precomputed masks indexed by how many members are taken.
    """
    out: list[int] = []
    caps = [len(p) - 1 for p in prefixes]
    suffix = [0] * (len(prefixes) + 1)
    for i in range(len(prefixes) - 1, -1, -1):
        suffix[i] = suffix[i + 1] + caps[i]

    def walk(i: int, remaining: int, acc: int) -> None:
        if remaining == 0:
            out.append(acc)
            return
        if i == len(prefixes) or remaining > suffix[i]:
            return
        group = prefixes[i]
        for t in range(min(caps[i], remaining) + 1):
            walk(i + 1, remaining - t, acc | group[t])

    walk(0, k, 0)
    return out


def _sum_level_floor(n: int, k: int, d2: int) -> int:
    return max(0, n * (n - 1) - k * (k - 1), d2 - 2 * k * (n - 1))


def _bounded_search(
    g: Graph,
    d: DistanceOracle,
    cfg: GameConfig,
    upper_bound_profile: StrategyProfile | None,
) -> OptimumResult:
    n = g.n
    maximum = cfg.variant is Variant.MAX
    alpha = cfg.alpha

    seeds = [StrategyProfile.of(range(n)), StrategyProfile.of([0])]
    seeds.append(greedy_gateways(g, cfg, d))
    if upper_bound_profile is not None:
        seeds.append(upper_bound_profile)
    best_profile = min(
        seeds, key=lambda s: (social_cost(g, d, cfg, s), len(s), s.ids)
    )
    best_cost = social_cost(g, d, cfg, best_profile)
    best_key = (best_cost, len(best_profile), best_profile.ids)

    kmax = min(floor_div(best_cost / alpha), n)
    classes = twin_classes(g)
    sizes = [len(c) for c in classes]
    counts = _level_counts(sizes, kmax)
    space = sum(counts[1 : kmax + 1])
    if space > BOUNDED_ENUMERATION_CAP:
        raise StateSpaceTooLarge(
            f"bounded search would visit {space} canonical profiles "
            f"(cap {BOUNDED_ENUMERATION_CAP}); supply a tighter upper bound"
        )

    prefixes = []
    for members in classes:
        row = [0]
        acc = 0
        for v in members:
            acc |= 1 << v
            row.append(acc)
        prefixes.append(row)

    d2 = int(np.minimum(d.dist, 2).sum()) if not maximum else 0
    for k in range(1, kmax + 1):
        floor_part = max(0, n - k) if maximum else _sum_level_floor(n, k, d2)
        if alpha * k + floor_part > best_key[0]:
            continue
        level = _canonical_masks(prefixes, k)
        if not level:
            continue
        masks = np.array(level, dtype=np.int64)
        sums = _engine.term_sums_for_masks(d.dist, masks, maximum=maximum)
        lo = int(sums.min())
        cand = masks[sums == lo]
        mask = min((int(m) for m in cand), key=_mask_ids)
        key = (alpha * k + lo, k, _mask_ids(mask))
        if key < best_key:
            best_key = key
            best_profile = StrategyProfile.from_mask(mask)
    return OptimumResult(best_profile, best_key[0], BoundedCardinality(kmax), True)


def brute_force_optimum(
    g: Graph,
    cfg: GameConfig,
    *,
    mode: str = "auto",
    upper_bound_profile: StrategyProfile | None = None,
    exhaustive_limit: int | None = None,
) -> OptimumResult:
    """Exact minimum social cost with a canonical witness profile.

    ``mode`` is "auto" (full sweep when the node count permits, bounded
    otherwise), "full", or "bounded".  Ties go to fewer gateways, then to
    the lexicographically smallest id tuple.
    """
    if mode not in ("auto", "full", "bounded"):
        raise ValueError(f"unknown search mode: {mode!r}")
    limit = resolve_exhaustive_limit(exhaustive_limit)
    d = all_pairs_distances(g)
    if mode == "full" or (mode == "auto" and g.n <= limit):
        if g.n > limit:
            raise StateSpaceTooLarge(
                f"full enumeration over 2^{g.n} profiles exceeds the limit of "
                f"2^{limit}; use the bounded method"
            )
        return _full_enumeration(g, d, cfg)
    return _bounded_search(g, d, cfg, upper_bound_profile)


def greedy_gateways(
    g: Graph, cfg: GameConfig, d: DistanceOracle | None = None
) -> StrategyProfile:
    """Open the node with the largest social-cost drop until none helps.

    Starts from a single gateway; with one gateway every choice costs the
    same (one gateway creates no shortcuts), so node 0 is taken.  Ties on
    the drop go to the smallest node id.
    """
    if d is None:
        d = all_pairs_distances(g)
    current = StrategyProfile.of([0])
    cost = social_cost(g, d, cfg, current)
    while len(current) < g.n:
        best_v = -1
        best_cost = cost
        for v in range(g.n):
            if v in current:
                continue
            trial = social_cost(g, d, cfg, current.toggled(v))
            if trial < best_cost:
                best_v, best_cost = v, trial
        if best_v < 0:
            break
        current = current.toggled(best_v)
        cost = best_cost
    return current


def enumerate_equilibria(
    g: Graph, cfg: GameConfig, *, exhaustive_limit: int | None = None
) -> EquilibriumCatalog:
    """Every pure Nash equilibrium, with price of anarchy and of stability."""
    limit = resolve_exhaustive_limit(exhaustive_limit)
    if g.n > limit:
        raise StateSpaceTooLarge(
            f"equilibrium enumeration needs 2^{g.n} states, above the 2^{limit} cap"
        )
    d = all_pairs_distances(g)
    maximum = cfg.variant is Variant.MAX
    table = _engine.term_table(d.dist, maximum=maximum)
    open_ok, close_ok = _engine.improving_tables(table, cfg.alpha)
    ne = _engine.ne_vector(open_ok, close_ok)
    total = 1 << g.n
    rowsums = table.sum(axis=1, dtype=np.int64)
    counts = _engine.popcounts(total)

    masks = np.arange(1, total, dtype=np.int64)
    scaled = _scaled_costs(rowsums[1:], counts[1:], cfg.alpha)
    best = _pick_best_mask(masks, scaled, counts[1:])
    best_cost = cfg.alpha * int(counts[best]) + Fraction(int(rowsums[best]))
    optimum = OptimumResult(
        StrategyProfile.from_mask(best), best_cost, FullEnumeration(), True
    )

    found: list[tuple[StrategyProfile, Fraction]] = []
    for m in np.flatnonzero(ne):
        mask = int(m)
        cost = cfg.alpha * int(counts[mask]) + Fraction(int(rowsums[mask]))
        found.append((StrategyProfile.from_mask(mask), cost))
    found.sort(key=lambda pair: (pair[1], len(pair[0]), pair[0].ids))
    poa = found[-1][1] / best_cost if found else None
    pos = found[0][1] / best_cost if found else None
    return EquilibriumCatalog(tuple(found), poa, pos, optimum)


def poa_regime_report(g: Graph, cfg: GameConfig, catalog: EquilibriumCatalog) -> RegimeReport:
    """Tag the instance's price regime; the envelope is context, not a claim."""
    n = g.n
    alpha = cfg.alpha
    if cfg.variant is Variant.SUM:
        if alpha < 1:
            regime, envelope = "alpha < 1", "poa = 1"
        elif alpha <= n - 1:
            regime, envelope = "1 <= alpha <= n-1", "Theta(n / sqrt(alpha))"
        elif alpha < n * (n - 1):
            regime, envelope = "n-1 < alpha < n(n-1)", "Theta(n^2 / alpha)"
        else:
            regime, envelope = "alpha >= n(n-1)", "constant"
    else:
        if alpha < 1:
            regime, envelope = "alpha < 1", "poa = 1"
        else:
            regime, envelope = "alpha >= 1", "Theta(1 + n / sqrt(alpha))"
    return RegimeReport(cfg.variant, alpha, n, regime, envelope, catalog.poa, catalog.pos)


def catalog_to_csv(catalog: EquilibriumCatalog) -> str:
    """CSV rows ``profile,cost,is_optimal``; gateway ids space-separated."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["profile", "cost", "is_optimal"])
    for profile, cost in catalog.equilibria:
        flag = "true" if cost == catalog.optimum.best_cost else "false"
        writer.writerow([" ".join(str(v) for v in profile.ids), frac_str(cost), flag])
    return buf.getvalue()
