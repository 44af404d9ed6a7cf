"""Geographic coalition formation and the coordinator-side parameter registry.

Coalitions are formed once per run: each agent joins the coordinator at
minimal Euclidean distance (ties to the lexicographically smaller
coordinator id), unless an explicit override map is supplied. Each
PU-coalition coordinator then maintains a live registry of its members'
advertised parameters and answers calls for proposals with its TOPSIS-best
member offer.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

from .model import CRITERIA_SENSES, CRITERION_LABELS, Offer, Zone
from .topsis import DecisionMatrix, topsis

__all__ = [
    "Membership",
    "RegistryEntry",
    "ParamRegistry",
    "form_coalitions",
    "register_params",
    "best_offer",
]

# coordinator id -> member ids, sorted ascending
Membership = dict[str, list[str]]


def form_coalitions(
    agents: Sequence[tuple[str, Zone]],
    coordinators: Sequence[tuple[str, Zone]],
    override: Mapping[str, Sequence[str]] | None = None,
) -> Membership:
    """Assign every agent to exactly one coordinator.

    Without an override, the nearest coordinator wins (Euclidean distance,
    ties by ascending coordinator id). An override map wins verbatim but
    must reference known ids and cover every agent exactly once.
    """
    agent_ids = [aid for aid, _ in agents]

    if override is not None:
        coordinator_ids = {cid for cid, _ in coordinators}
        membership: Membership = {cid: [] for cid, _ in coordinators}
        assigned: set[str] = set()
        for cid, members in override.items():
            if coordinator_ids and cid not in coordinator_ids:
                raise ValueError(f"override references unknown coordinator {cid!r}")
            membership.setdefault(cid, [])
            for mid in members:
                if mid not in agent_ids:
                    raise ValueError(f"override references unknown agent {mid!r}")
                if mid in assigned:
                    raise ValueError(f"override assigns agent {mid!r} twice")
                assigned.add(mid)
                membership[cid].append(mid)
        missing = sorted(set(agent_ids) - assigned)
        if missing:
            raise ValueError(f"override leaves agents unassigned: {missing}")
        return {cid: sorted(members) for cid, members in membership.items()}

    if not coordinators:
        raise ValueError("cannot form coalitions without coordinators")
    membership = {cid: [] for cid, _ in coordinators}
    for aid, zone in agents:
        best_cid = min(coordinators, key=lambda c: (zone.distance_to(c[1]), c[0]))[0]
        membership[best_cid].append(aid)
    return {cid: sorted(members) for cid, members in membership.items()}


@dataclass(frozen=True)
class RegistryEntry:
    """One member PU's advertised parameters and when they were last set."""

    channels: int
    price: float
    alloc_time: float
    last_update_time: float


@dataclass(frozen=True)
class ParamRegistry:
    """A PU-coalition coordinator's live table of member parameters.

    Only declared members may register; entries hold the latest snapshot
    (no history).
    """

    coordinator_id: str
    members: tuple[str, ...]
    entries: dict[str, RegistryEntry] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "members", tuple(sorted(self.members)))


def register_params(
    registry: ParamRegistry,
    pu_id: str,
    channels: int,
    price: float,
    alloc_time: float,
    t: float,
) -> ParamRegistry:
    """Replace (or create) a member's entry; returns the updated registry."""
    if pu_id not in registry.members:
        raise ValueError(
            f"{pu_id!r} is not a member of coalition {registry.coordinator_id!r}"
        )
    entries = dict(registry.entries)
    entries[pu_id] = RegistryEntry(int(channels), float(price), float(alloc_time), float(t))
    return replace(registry, entries=entries)


def best_offer(
    registry: ParamRegistry, weights: Sequence[float]
) -> Offer | None:
    """TOPSIS-select the best registered member and return its offer.

    Members advertising zero channels are excluded before ranking (an
    unusable offer must not win on price or allocation time). Returns None
    when no member has channels available.
    """
    candidates = [
        (pu_id, entry)
        for pu_id in registry.members
        if (entry := registry.entries.get(pu_id)) is not None and entry.channels > 0
    ]
    if not candidates:
        return None
    matrix = DecisionMatrix(
        alternatives=tuple(pu_id for pu_id, _ in candidates),
        criteria=CRITERION_LABELS,
        scores=tuple(
            (entry.channels, entry.price, entry.alloc_time) for _, entry in candidates
        ),
        weights=tuple(weights),
        senses=CRITERIA_SENSES,
    )
    winner_id, winner = candidates[topsis(matrix).ranking[0]]
    return Offer(
        pu_id=winner_id,
        cpu_id=registry.coordinator_id,
        channels=winner.channels,
        price=winner.price,
        alloc_time=winner.alloc_time,
    )
