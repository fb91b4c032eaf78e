"""Gateway game model: costs, single-node moves, and equilibrium checks.

A strategy profile is the non-empty set of nodes currently paying to run a
gateway.  Gateways are mutually at communication distance zero, so the
distance perceived by ``u`` towards ``v`` is

    delta(u, v) = min(d(u, v), d(u, S) + d(S, v))

with plain hop distances ``d``.  Every quantity here is exact: distances are
integers and prices are ``fractions.Fraction``.  No float is ever produced,
which makes strict-improvement comparisons reliable at the knife-edge ties
the dynamics depend on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum, unique
from fractions import Fraction
from functools import lru_cache
from typing import Iterable

from .errors import NodeIdOutOfRange
from .graphs import DistanceOracle, Graph, multi_source_levels


@unique
class Variant(Enum):
    """Aggregation rule for a node's distance term."""

    SUM = "sum"
    MAX = "max"


@dataclass(frozen=True)
class GameConfig:
    """Variant plus the gateway price ``alpha`` (a positive exact rational)."""

    variant: Variant
    alpha: Fraction

    def __post_init__(self) -> None:
        alpha = self.alpha
        if not isinstance(alpha, Fraction):
            alpha = Fraction(alpha)
            object.__setattr__(self, "alpha", alpha)
        if alpha <= 0:
            raise ValueError(f"alpha must be positive, got {alpha}")


@dataclass(frozen=True)
class StrategyProfile:
    """Non-empty set of gateway nodes.

    The all-closed profile is unrepresentable by construction; sole-gateway
    closes are handled as forbidden moves rather than as a reachable state.
    """

    gateways: frozenset[int]

    def __post_init__(self) -> None:
        if not isinstance(self.gateways, frozenset):
            object.__setattr__(self, "gateways", frozenset(self.gateways))
        if not self.gateways:
            raise ValueError("a strategy profile must contain at least one gateway")

    @classmethod
    def of(cls, nodes: Iterable[int]) -> "StrategyProfile":
        return cls(frozenset(int(v) for v in nodes))

    @property
    def ids(self) -> tuple[int, ...]:
        return tuple(sorted(self.gateways))

    def mask(self) -> int:
        m = 0
        for v in self.gateways:
            m |= 1 << v
        return m

    @classmethod
    def from_mask(cls, mask: int) -> "StrategyProfile":
        if mask <= 0:
            raise ValueError("profile mask must be non-zero")
        return cls(frozenset(i for i in range(mask.bit_length()) if mask >> i & 1))

    def toggled(self, v: int) -> "StrategyProfile":
        if v in self.gateways:
            return StrategyProfile(self.gateways - {v})
        return StrategyProfile(self.gateways | {v})

    def __contains__(self, v: int) -> bool:
        return v in self.gateways

    def __len__(self) -> int:
        return len(self.gateways)

    def __iter__(self):
        return iter(sorted(self.gateways))


@unique
class MoveKind(Enum):
    OPEN = "open"
    CLOSE = "close"


@dataclass(frozen=True)
class Move:
    """One node's toggle, evaluated against the current profile.

    ``cost_delta`` is the mover's private cost after minus before, so a
    strictly negative delta means the move is improving.  A close by the
    sole gateway keeps ``kind == CLOSE`` and a meaningful delta (computed
    against the gateway-free world of plain distances) but carries
    ``forbidden=True`` and is never offered by the dynamics.
    """

    node: int
    kind: MoveKind
    cost_delta: Fraction
    forbidden: bool = False

    @property
    def is_improving(self) -> bool:
        return self.cost_delta < 0 and not self.forbidden


@dataclass(frozen=True)
class CostReport:
    private: dict[int, Fraction] = field(compare=False)
    social: Fraction = Fraction(0)


@lru_cache(maxsize=4096)
def _levels_to_set(g: Graph, sources: frozenset[int]) -> tuple[int, ...]:
    return multi_source_levels(g, sorted(sources))


def _check_node(g: Graph, v: int) -> None:
    if not (0 <= v < g.n):
        raise NodeIdOutOfRange(f"node {v} outside [0, {g.n})")


def _check_profile(g: Graph, s: StrategyProfile) -> None:
    for v in s.gateways:
        _check_node(g, v)


def comm_distance(g: Graph, d: DistanceOracle, s: StrategyProfile, u: int, v: int) -> int:
    """delta(u, v) under profile ``s``: plain distance or a hop through the gateway set."""
    _check_profile(g, s)
    _check_node(g, u)
    _check_node(g, v)
    to_set = _levels_to_set(g, s.gateways)
    return min(d.dist_between(u, v), to_set[u] + to_set[v])


def _distance_term(
    g: Graph, d: DistanceOracle, s: StrategyProfile, v: int, *, maximum: bool
) -> int:
    to_set = _levels_to_set(g, s.gateways)
    row = d.row(v)
    base = to_set[v]
    best = 0
    total = 0
    for u in range(g.n):
        delta = min(int(row[u]), base + to_set[u])
        if maximum:
            if delta > best:
                best = delta
        else:
            total += delta
    return best if maximum else total


def _plain_term(g: Graph, d: DistanceOracle, v: int, *, maximum: bool) -> int:
    row = d.row(v)
    return int(row.max()) if maximum else int(row.sum())


def private_cost(
    g: Graph, d: DistanceOracle, cfg: GameConfig, s: StrategyProfile, v: int
) -> Fraction:
    """Gateway fee (if ``v`` pays one) plus ``v``'s aggregated distances."""
    _check_profile(g, s)
    _check_node(g, v)
    maximum = cfg.variant is Variant.MAX
    term = _distance_term(g, d, s, v, maximum=maximum)
    fee = cfg.alpha if v in s else Fraction(0)
    return fee + term


def social_cost(g: Graph, d: DistanceOracle, cfg: GameConfig, s: StrategyProfile) -> Fraction:
    _check_profile(g, s)
    maximum = cfg.variant is Variant.MAX
    total = sum(_distance_term(g, d, s, v, maximum=maximum) for v in range(g.n))
    return cfg.alpha * len(s) + total


def cost_report(g: Graph, d: DistanceOracle, cfg: GameConfig, s: StrategyProfile) -> CostReport:
    private = {v: private_cost(g, d, cfg, s, v) for v in range(g.n)}
    return CostReport(private=private, social=sum(private.values(), Fraction(0)))


def evaluate_move(
    g: Graph, d: DistanceOracle, cfg: GameConfig, s: StrategyProfile, v: int
) -> Move:
    """Cost delta of toggling ``v``, from ``v``'s own point of view."""
    _check_profile(g, s)
    _check_node(g, v)
    maximum = cfg.variant is Variant.MAX
    before = private_cost(g, d, cfg, s, v)
    if v in s:
        if len(s) == 1:
            # The hypothetical world with no gateways at all: plain distances.
            after = Fraction(_plain_term(g, d, v, maximum=maximum))
            return Move(v, MoveKind.CLOSE, after - before, forbidden=True)
        after = private_cost(g, d, cfg, s.toggled(v), v)
        return Move(v, MoveKind.CLOSE, after - before)
    after = private_cost(g, d, cfg, s.toggled(v), v)
    return Move(v, MoveKind.OPEN, after - before)


def improving_moves(
    g: Graph, d: DistanceOracle, cfg: GameConfig, s: StrategyProfile
) -> list[Move]:
    """All strictly improving, permitted toggles, sorted by node id."""
    return [
        m
        for m in (evaluate_move(g, d, cfg, s, v) for v in range(g.n))
        if m.is_improving
    ]


def is_nash_equilibrium(g: Graph, d: DistanceOracle, cfg: GameConfig, s: StrategyProfile) -> bool:
    return not improving_moves(g, d, cfg, s)


def frac_str(x: Fraction | int) -> str:
    """Render an exact rational as ``p/q``, denominator always present."""
    f = Fraction(x)
    return f"{f.numerator}/{f.denominator}"


def parse_fraction(text: str) -> Fraction:
    """Accepts ``p/q``, integers, and exact decimal strings like ``3.5``."""
    return Fraction(text.strip())


def floor_div(x: Fraction | int) -> int:
    f = Fraction(x)
    return f.numerator // f.denominator


def ceil_div(x: Fraction | int) -> int:
    f = Fraction(x)
    return -((-f.numerator) // f.denominator)


def floor_sqrt(x: Fraction | int) -> int:
    """Largest integer ``k`` with ``k*k <= x``, exact for rationals."""
    f = Fraction(x)
    if f < 0:
        raise ValueError("square root of a negative value")
    return math.isqrt(f.numerator // f.denominator)


def ceil_sqrt(x: Fraction | int) -> int:
    """Smallest integer ``k`` with ``k*k >= x``."""
    f = Fraction(x)
    k = floor_sqrt(f)
    return k if Fraction(k * k) == f else k + 1
