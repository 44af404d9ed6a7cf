"""Shared domain model: agents, zones, timing constants, and the scenario.

A :class:`Scenario` is a complete, immutable description of one simulation
run. :func:`validate` reports every invariant violation as data (a list of
path-qualified strings) instead of raising, so callers can surface all
problems at once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .topsis import CriterionSense

__all__ = [
    "CRITERION_LABELS",
    "CRITERIA_SENSES",
    "DEFAULT_WEIGHTS",
    "TOPOLOGIES",
    "Zone",
    "PrimaryUser",
    "SecondaryUser",
    "Coordinator",
    "Offer",
    "TimingConstants",
    "MembershipOverride",
    "Scenario",
    "validate",
]

# Offer criteria, in matrix column order: maximize channels and allocation
# time, minimize price.
CRITERION_LABELS = ("channels", "price", "alloc_time")
CRITERIA_SENSES = (CriterionSense.BENEFIT, CriterionSense.COST, CriterionSense.BENEFIT)
DEFAULT_WEIGHTS = (0.2, 0.5, 0.3)

TOPOLOGIES = ("no_coalition", "cpu_only", "cpu_csu")


@dataclass(frozen=True)
class Zone:
    """A 2-D point in abstract distance units."""

    x: float
    y: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))

    def distance_to(self, other: "Zone") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


@dataclass(frozen=True)
class PrimaryUser:
    """A licensed spectrum holder offering channels at a price."""

    id: str
    zone: Zone
    channels: int
    price: float
    alloc_time: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "channels", int(self.channels))
        object.__setattr__(self, "price", float(self.price))
        object.__setattr__(self, "alloc_time", float(self.alloc_time))


@dataclass(frozen=True)
class SecondaryUser:
    """An unlicensed user requesting channels at a given simulation time."""

    id: str
    zone: Zone
    channels_requested: int
    arrival_time: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "channels_requested", int(self.channels_requested))
        object.__setattr__(self, "arrival_time", float(self.arrival_time))


@dataclass(frozen=True)
class Coordinator:
    """A coalition coordinator (either side), placed at a zone."""

    id: str
    zone: Zone


@dataclass(frozen=True)
class Offer:
    """A proposed allocation, copied from the selected PU's parameters."""

    pu_id: str
    cpu_id: str
    channels: int
    price: float
    alloc_time: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "channels", int(self.channels))
        object.__setattr__(self, "price", float(self.price))
        object.__setattr__(self, "alloc_time", float(self.alloc_time))


@dataclass(frozen=True)
class TimingConstants:
    """Processing and transport delays, in simulation time units.

    latency          -- link delay applied to every message
    agg_per_demand   -- coalition-side cost to aggregate one demand
    cpu_select       -- coordinator cost to answer one call for proposals
    rank_per_offer   -- cost to rank one received offer
    pu_reply         -- direct PU reply cost (no-coalition topology)
    """

    latency: float = 10.0
    agg_per_demand: float = 5.0
    cpu_select: float = 2.0
    rank_per_offer: float = 1.0
    pu_reply: float = 2.0

    def __post_init__(self) -> None:
        for name in ("latency", "agg_per_demand", "cpu_select", "rank_per_offer", "pu_reply"):
            object.__setattr__(self, name, float(getattr(self, name)))


@dataclass(frozen=True)
class MembershipOverride:
    """Explicit coordinator -> member-ids maps, replacing geographic assignment."""

    cpu: dict[str, tuple[str, ...]] | None = None
    csu: dict[str, tuple[str, ...]] | None = None

    def __post_init__(self) -> None:
        for name in ("cpu", "csu"):
            value = getattr(self, name)
            if value is not None:
                object.__setattr__(
                    self, name, {str(k): tuple(v) for k, v in value.items()}
                )


@dataclass(frozen=True)
class Scenario:
    """Everything one run needs: agents, wiring mode, weights, and timing."""

    topology: str
    pus: tuple[PrimaryUser, ...]
    sus: tuple[SecondaryUser, ...]
    cpu_coordinators: tuple[Coordinator, ...] = ()
    csu_coordinators: tuple[Coordinator, ...] = ()
    aggregation: bool = True
    seed: int = 0
    weights: tuple[float, float, float] = DEFAULT_WEIGHTS
    timing: TimingConstants = field(default_factory=TimingConstants)
    memberships: MembershipOverride | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "pus", tuple(self.pus))
        object.__setattr__(self, "sus", tuple(self.sus))
        object.__setattr__(self, "cpu_coordinators", tuple(self.cpu_coordinators))
        object.__setattr__(self, "csu_coordinators", tuple(self.csu_coordinators))
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))


def _check_zone(path: str, zone: Zone, out: list[str]) -> None:
    if not (math.isfinite(zone.x) and math.isfinite(zone.y)):
        out.append(f"{path}.zone: coordinates must be finite")


def validate(scenario: Scenario) -> list[str]:
    """Return every invariant violation as a path-qualified message.

    An empty list means the scenario is runnable. Never raises on
    structurally well-formed input.
    """
    out: list[str] = []

    if scenario.topology not in TOPOLOGIES:
        out.append(f"topology: unknown topology {scenario.topology!r}")
    if not isinstance(scenario.seed, int) or isinstance(scenario.seed, bool) or scenario.seed < 0:
        out.append(f"seed: must be a non-negative integer, got {scenario.seed!r}")

    seen: set[str] = set()
    for kind, agents in (
        ("pus", scenario.pus),
        ("sus", scenario.sus),
        ("cpu_coordinators", scenario.cpu_coordinators),
        ("csu_coordinators", scenario.csu_coordinators),
    ):
        for i, agent in enumerate(agents):
            if agent.id in seen:
                out.append(f"{kind}[{i}].id: duplicate id {agent.id!r}")
            seen.add(agent.id)
            _check_zone(f"{kind}[{i}]", agent.zone, out)

    for i, pu in enumerate(scenario.pus):
        if pu.channels < 0:
            out.append(f"pus[{i}].channels: must be >= 0, got {pu.channels}")
        if not (math.isfinite(pu.price) and pu.price > 0):
            out.append(f"pus[{i}].price: must be > 0 and finite, got {pu.price}")
        if not (math.isfinite(pu.alloc_time) and pu.alloc_time > 0):
            out.append(f"pus[{i}].alloc_time: must be > 0 and finite, got {pu.alloc_time}")

    for i, su in enumerate(scenario.sus):
        if su.channels_requested < 1:
            out.append(f"sus[{i}].channels_requested: must be >= 1, got {su.channels_requested}")
        if not (math.isfinite(su.arrival_time) and su.arrival_time >= 0):
            out.append(f"sus[{i}].arrival_time: must be >= 0 and finite, got {su.arrival_time}")

    if scenario.topology in ("cpu_only", "cpu_csu") and not scenario.cpu_coordinators:
        out.append(f"cpu_coordinators: topology {scenario.topology!r} requires at least one")
    if scenario.topology == "cpu_csu" and not scenario.csu_coordinators:
        out.append("csu_coordinators: topology 'cpu_csu' requires at least one")
    if scenario.topology == "no_coalition" and scenario.cpu_coordinators:
        out.append("cpu_coordinators: topology 'no_coalition' admits none")
    if scenario.topology in ("no_coalition", "cpu_only") and scenario.csu_coordinators:
        out.append(f"csu_coordinators: topology {scenario.topology!r} admits none")

    if len(scenario.weights) != 3:
        out.append(f"weights: expected 3 values, got {len(scenario.weights)}")
    for j, w in enumerate(scenario.weights):
        if not (math.isfinite(w) and w > 0):
            out.append(f"weights[{j}]: must be > 0 and finite, got {w}")

    for name in ("latency", "agg_per_demand", "cpu_select", "rank_per_offer", "pu_reply"):
        value = getattr(scenario.timing, name)
        if not (math.isfinite(value) and value >= 0):
            out.append(f"timing.{name}: must be >= 0 and finite, got {value}")

    if scenario.memberships is not None:
        _check_override(
            "memberships.cpu",
            scenario.memberships.cpu,
            {c.id for c in scenario.cpu_coordinators},
            [p.id for p in scenario.pus],
            out,
        )
        _check_override(
            "memberships.csu",
            scenario.memberships.csu,
            {c.id for c in scenario.csu_coordinators},
            [s.id for s in scenario.sus],
            out,
        )

    return out


def _check_override(
    path: str,
    override: dict[str, tuple[str, ...]] | None,
    coordinator_ids: set[str],
    member_ids: list[str],
    out: list[str],
) -> None:
    if override is None:
        return
    assigned: list[str] = []
    for cid, members in override.items():
        if cid not in coordinator_ids:
            out.append(f"{path}: unknown coordinator {cid!r}")
        for mid in members:
            if mid not in member_ids:
                out.append(f"{path}[{cid!r}]: unknown member {mid!r}")
            assigned.append(mid)
    counts = {mid: assigned.count(mid) for mid in set(assigned)}
    for mid in sorted(m for m, c in counts.items() if c > 1):
        out.append(f"{path}: member {mid!r} assigned to more than one coordinator")
    missing = sorted(set(member_ids) - set(assigned))
    for mid in missing:
        out.append(f"{path}: member {mid!r} not assigned to any coordinator")
