"""Agent state machines and typed messages for the negotiation rounds.

Four agent kinds exchange seven message kinds across three wiring modes:

* ``no_coalition`` -- every SU queries every PU directly and ranks the
  replies itself.
* ``cpu_only``     -- PUs register with PU-coalition coordinators; every SU
  queries every coordinator and ranks the returned best offers.
* ``cpu_csu``      -- the full intermediated flow: SU-coalition coordinators
  collect member demands (optionally aggregating them into one call for
  proposals per PU-coalition), rank the returned offers, assign them to
  demands, and reply to their members.

Handlers are pure: given the same (state, message, time, context) they
return the same new state and outgoing messages. All world mutation (live
PU capacities, metric counters) is applied by the kernel from the returned
:class:`HandlerResult`.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Mapping, Sequence, Union

from .coalitions import Membership, ParamRegistry, best_offer, form_coalitions, register_params
from .model import CRITERIA_SENSES, CRITERION_LABELS, Offer, Scenario, TimingConstants
from .topsis import DecisionMatrix, topsis

__all__ = [
    "MessageKind",
    "Demand",
    "PuParams",
    "CoordinatorReply",
    "Message",
    "Allocation",
    "SuPhase",
    "CsuPhase",
    "PrimaryUserState",
    "SecondaryUserState",
    "PuCoalitionState",
    "SuCoalitionState",
    "AgentState",
    "TopologyPlan",
    "topology_plan",
    "HandlerContext",
    "HandlerResult",
    "handle",
    "handle_wake",
    "rank_offers",
    "assign_offers",
]


class MessageKind(str, Enum):
    """Protocol message kinds; the string values are the wire/export names."""

    PARAM_UPDATE = "ParamUpdate"
    SU_REQUEST = "SuRequest"
    CFP = "Cfp"
    CFP_SINGLE = "CfpSingle"
    CPU_OFFER = "CpuOffer"
    CPU_NO_OFFER = "CpuNoOffer"
    SU_REPLY = "SuReply"


@dataclass(frozen=True)
class Demand:
    """One SU's channel request."""

    su_id: str
    channels_requested: int


@dataclass(frozen=True)
class PuParams:
    """A PU's advertised parameters, as carried by ParamUpdate."""

    channels: int
    price: float
    alloc_time: float


@dataclass(frozen=True)
class CoordinatorReply:
    """Payload of CpuOffer/CpuNoOffer.

    ``demand_ref`` names the SU whose single demand is being answered, or
    None when the reply answers an aggregated batch.
    """

    offer: Offer | None
    demand_ref: str | None = None


def _payload_ok(kind: MessageKind, payload: object) -> bool:
    if kind is MessageKind.PARAM_UPDATE:
        return isinstance(payload, PuParams)
    if kind in (MessageKind.SU_REQUEST, MessageKind.CFP_SINGLE):
        return isinstance(payload, Demand)
    if kind is MessageKind.CFP:
        return isinstance(payload, tuple) and all(isinstance(d, Demand) for d in payload)
    if kind is MessageKind.CPU_OFFER:
        return isinstance(payload, CoordinatorReply) and payload.offer is not None
    if kind is MessageKind.CPU_NO_OFFER:
        return isinstance(payload, CoordinatorReply) and payload.offer is None
    if kind is MessageKind.SU_REPLY:
        return payload is None or isinstance(payload, Offer)
    return False


@dataclass(frozen=True)
class Message:
    """A typed, addressed protocol message."""

    kind: MessageKind
    sender: str
    recipient: str
    payload: object

    def __post_init__(self) -> None:
        if self.sender == self.recipient:
            raise ValueError(f"message from {self.sender!r} to itself")
        if not _payload_ok(self.kind, self.payload):
            raise ValueError(f"payload {self.payload!r} does not match kind {self.kind.value}")


@dataclass(frozen=True)
class Allocation:
    """A granted demand: the SU, the consumed offer, and the channels taken."""

    su_id: str
    offer: Offer
    granted_channels: int


class SuPhase(Enum):
    IDLE = "Idle"
    WAITING = "Waiting"
    SERVED = "Served"
    UNSERVED = "Unserved"


class CsuPhase(Enum):
    COLLECTING = "Collecting"
    AWAITING_OFFERS = "AwaitingOffers"
    DONE = "Done"


@dataclass(frozen=True)
class PrimaryUserState:
    agent_id: str
    price: float
    alloc_time: float


@dataclass(frozen=True)
class SecondaryUserState:
    agent_id: str
    channels_requested: int
    arrival_time: float
    phase: SuPhase = SuPhase.IDLE
    expected_replies: int = 0
    replies_seen: int = 0
    offers: tuple[Offer, ...] = ()
    completed_at: float | None = None


@dataclass(frozen=True)
class PuCoalitionState:
    agent_id: str
    registry: ParamRegistry


@dataclass(frozen=True)
class SuCoalitionState:
    agent_id: str
    member_ids: tuple[str, ...]
    phase: CsuPhase = CsuPhase.COLLECTING
    demands: tuple[tuple[float, Demand], ...] = ()
    offers: tuple[CoordinatorReply, ...] = ()
    replies_by_demand: dict[str, tuple[CoordinatorReply, ...]] = field(default_factory=dict)
    replied: tuple[str, ...] = ()


AgentState = Union[PrimaryUserState, SecondaryUserState, PuCoalitionState, SuCoalitionState]


@dataclass(frozen=True)
class TopologyPlan:
    """Static wiring for one run: memberships and broadcast targets."""

    topology: str
    aggregation: bool
    pu_ids: tuple[str, ...]
    cpu_ids: tuple[str, ...]
    csu_ids: tuple[str, ...]
    cpu_membership: Membership
    csu_membership: Membership
    cpu_of_pu: dict[str, str]
    csu_of_su: dict[str, str]


def topology_plan(scenario: Scenario) -> TopologyPlan:
    """Resolve coalition memberships and per-agent message targets."""
    cpu_membership: Membership = {}
    csu_membership: Membership = {}
    if scenario.topology in ("cpu_only", "cpu_csu"):
        cpu_membership = form_coalitions(
            [(pu.id, pu.zone) for pu in scenario.pus],
            [(c.id, c.zone) for c in scenario.cpu_coordinators],
            scenario.memberships.cpu if scenario.memberships else None,
        )
    if scenario.topology == "cpu_csu":
        csu_membership = form_coalitions(
            [(su.id, su.zone) for su in scenario.sus],
            [(c.id, c.zone) for c in scenario.csu_coordinators],
            scenario.memberships.csu if scenario.memberships else None,
        )
    return TopologyPlan(
        topology=scenario.topology,
        aggregation=scenario.aggregation,
        pu_ids=tuple(sorted(pu.id for pu in scenario.pus)),
        cpu_ids=tuple(sorted(cpu_membership)),
        csu_ids=tuple(sorted(csu_membership)),
        cpu_membership=cpu_membership,
        csu_membership=csu_membership,
        cpu_of_pu={m: cid for cid, members in cpu_membership.items() for m in members},
        csu_of_su={m: cid for cid, members in csu_membership.items() for m in members},
    )


@dataclass(frozen=True)
class HandlerContext:
    """Read-only per-run context handed to every handler invocation."""

    timing: TimingConstants
    weights: tuple[float, float, float]
    plan: TopologyPlan
    capacities: Mapping[str, int]


@dataclass
class HandlerResult:
    """A handler's complete outcome: new state, sends, awards, violation."""

    state: AgentState
    sends: list[tuple[Message, float]] = field(default_factory=list)
    allocations: list[Allocation] = field(default_factory=list)
    violation: str | None = None


def rank_offers(offers: Sequence[Offer], weights: Sequence[float]) -> list[Offer]:
    """Order offers best-first by TOPSIS closeness over (channels, price, alloc_time)."""
    if not offers:
        return []
    matrix = DecisionMatrix(
        alternatives=tuple(o.pu_id for o in offers),
        criteria=CRITERION_LABELS,
        scores=tuple((o.channels, o.price, o.alloc_time) for o in offers),
        weights=tuple(weights),
        senses=CRITERIA_SENSES,
    )
    return [offers[i] for i in topsis(matrix).ranking]


def assign_offers(
    offers: Sequence[Offer],
    demands: Sequence[tuple[str, int]],
    capacities: Mapping[str, int],
) -> tuple[list[Allocation], list[str]]:
    """Greedily map ranked offers onto demands in arrival order.

    Each demand takes the highest-ranked unconsumed offer whose backing PU
    still has enough capacity; the offer is consumed and the capacity
    decremented. Demands that find no feasible offer are returned unserved.
    """
    caps = dict(capacities)
    available = list(offers)
    allocations: list[Allocation] = []
    unserved: list[str] = []
    for su_id, requested in demands:
        index = next(
            (k for k, off in enumerate(available) if caps.get(off.pu_id, 0) >= requested),
            None,
        )
        if index is None:
            unserved.append(su_id)
            continue
        offer = available.pop(index)
        caps[offer.pu_id] -= requested
        allocations.append(Allocation(su_id=su_id, offer=offer, granted_channels=requested))
    return allocations, unserved


def _violation(state: AgentState, agent_id: str, detail: str, now: float) -> HandlerResult:
    return HandlerResult(state=state, violation=f"t={now:g}: {detail} at {agent_id!r}")


def handle_wake(state: AgentState, now: float, ctx: HandlerContext) -> HandlerResult:
    """An SU wakes at its arrival time and issues its request(s)."""
    if not isinstance(state, SecondaryUserState):
        raise ValueError(f"wake delivered to non-SU agent {state!r}")
    if state.phase is not SuPhase.IDLE:
        return _violation(state, state.agent_id, f"wake in phase {state.phase.value}", now)

    me = state.agent_id
    demand = Demand(su_id=me, channels_requested=state.channels_requested)
    if ctx.plan.topology == "cpu_csu":
        target = ctx.plan.csu_of_su[me]
        sends = [(Message(MessageKind.SU_REQUEST, me, target, demand), 0.0)]
        expected = 1
    elif ctx.plan.topology == "cpu_only":
        sends = [
            (Message(MessageKind.CFP_SINGLE, me, cpu, demand), 0.0) for cpu in ctx.plan.cpu_ids
        ]
        expected = len(ctx.plan.cpu_ids)
    else:  # no_coalition
        sends = [
            (Message(MessageKind.CFP_SINGLE, me, pu, demand), 0.0) for pu in ctx.plan.pu_ids
        ]
        expected = len(ctx.plan.pu_ids)
    if not sends:
        # nobody to query (e.g. no PUs exist): the request dies immediately
        new_state = replace(state, phase=SuPhase.UNSERVED, completed_at=now)
        return HandlerResult(state=new_state)
    new_state = replace(state, phase=SuPhase.WAITING, expected_replies=expected)
    return HandlerResult(state=new_state, sends=sends)


def handle(state: AgentState, msg: Message, now: float, ctx: HandlerContext) -> HandlerResult:
    """Dispatch one delivered message to the addressed agent's state machine."""
    if isinstance(state, PrimaryUserState):
        return _handle_pu(state, msg, now, ctx)
    if isinstance(state, PuCoalitionState):
        return _handle_cpu(state, msg, now, ctx)
    if isinstance(state, SuCoalitionState):
        return _handle_csu(state, msg, now, ctx)
    if isinstance(state, SecondaryUserState):
        return _handle_su(state, msg, now, ctx)
    raise ValueError(f"unknown agent state {state!r}")


def _handle_pu(
    state: PrimaryUserState, msg: Message, now: float, ctx: HandlerContext
) -> HandlerResult:
    if msg.kind is not MessageKind.CFP_SINGLE:
        return _violation(state, state.agent_id, f"unexpected {msg.kind.value}", now)
    me = state.agent_id
    capacity = ctx.capacities.get(me, 0)
    if capacity > 0:
        offer = Offer(
            pu_id=me, cpu_id=me, channels=capacity, price=state.price, alloc_time=state.alloc_time
        )
        reply = Message(
            MessageKind.CPU_OFFER, me, msg.sender, CoordinatorReply(offer, msg.payload.su_id)
        )
    else:
        reply = Message(
            MessageKind.CPU_NO_OFFER, me, msg.sender, CoordinatorReply(None, msg.payload.su_id)
        )
    return HandlerResult(state=state, sends=[(reply, ctx.timing.pu_reply)])


def _handle_cpu(
    state: PuCoalitionState, msg: Message, now: float, ctx: HandlerContext
) -> HandlerResult:
    me = state.agent_id
    if msg.kind is MessageKind.PARAM_UPDATE:
        params: PuParams = msg.payload
        registry = register_params(
            state.registry, msg.sender, params.channels, params.price, params.alloc_time, now
        )
        return HandlerResult(state=replace(state, registry=registry))
    if msg.kind in (MessageKind.CFP, MessageKind.CFP_SINGLE):
        ref = msg.payload.su_id if msg.kind is MessageKind.CFP_SINGLE else None
        offer = best_offer(state.registry, ctx.weights)
        if offer is not None:
            reply = Message(MessageKind.CPU_OFFER, me, msg.sender, CoordinatorReply(offer, ref))
        else:
            reply = Message(MessageKind.CPU_NO_OFFER, me, msg.sender, CoordinatorReply(None, ref))
        return HandlerResult(state=state, sends=[(reply, ctx.timing.cpu_select)])
    return _violation(state, me, f"unexpected {msg.kind.value}", now)


def _sorted_demands(demands: Sequence[tuple[float, Demand]]) -> list[Demand]:
    return [d for _, d in sorted(demands, key=lambda td: (td[0], td[1].su_id))]


def _handle_csu(
    state: SuCoalitionState, msg: Message, now: float, ctx: HandlerContext
) -> HandlerResult:
    me = state.agent_id
    if state.phase is CsuPhase.DONE:
        return _violation(state, me, f"{msg.kind.value} in terminal phase Done", now)

    if msg.kind is MessageKind.SU_REQUEST:
        if state.phase is not CsuPhase.COLLECTING:
            return _violation(state, me, f"SuRequest in phase {state.phase.value}", now)
        demands = state.demands + ((now, msg.payload),)
        if ctx.plan.aggregation:
            if len(demands) < len(state.member_ids):
                return HandlerResult(state=replace(state, demands=demands))
            # Last expected demand: aggregate the batch into one CFP per
            # PU-coalition, paying the per-demand aggregation cost.
            batch = tuple(_sorted_demands(demands))
            delay = ctx.timing.agg_per_demand * len(state.member_ids)
            sends = [
                (Message(MessageKind.CFP, me, cpu, batch), delay) for cpu in ctx.plan.cpu_ids
            ]
            new_state = replace(state, demands=demands, phase=CsuPhase.AWAITING_OFFERS)
            return HandlerResult(state=new_state, sends=sends)
        # Aggregation off: forward the single demand to every PU-coalition.
        sends = [
            (Message(MessageKind.CFP_SINGLE, me, cpu, msg.payload), ctx.timing.agg_per_demand)
            for cpu in ctx.plan.cpu_ids
        ]
        phase = (
            CsuPhase.AWAITING_OFFERS
            if len(demands) == len(state.member_ids)
            else CsuPhase.COLLECTING
        )
        return HandlerResult(state=replace(state, demands=demands, phase=phase), sends=sends)

    if msg.kind in (MessageKind.CPU_OFFER, MessageKind.CPU_NO_OFFER):
        reply: CoordinatorReply = msg.payload
        if ctx.plan.aggregation:
            return _csu_collect_batch_reply(state, reply, now, ctx)
        return _csu_collect_single_reply(state, reply, now, ctx)

    return _violation(state, me, f"unexpected {msg.kind.value}", now)


def _csu_collect_batch_reply(
    state: SuCoalitionState, reply: CoordinatorReply, now: float, ctx: HandlerContext
) -> HandlerResult:
    me = state.agent_id
    if state.phase is not CsuPhase.AWAITING_OFFERS:
        return _violation(state, me, f"coordinator reply in phase {state.phase.value}", now)
    offers = state.offers + (reply,)
    if len(offers) < len(ctx.plan.cpu_ids):
        return HandlerResult(state=replace(state, offers=offers))
    # All coordinator replies are in: rank the real offers, settle every
    # member demand against live capacities, and answer each member.
    real = [r.offer for r in offers if r.offer is not None]
    ranked = rank_offers(real, ctx.weights)
    demands = _sorted_demands(state.demands)
    allocations, _unserved = assign_offers(
        ranked, [(d.su_id, d.channels_requested) for d in demands], ctx.capacities
    )
    granted = {a.su_id: a.offer for a in allocations}
    delay = ctx.timing.rank_per_offer * len(real)
    sends = [
        (Message(MessageKind.SU_REPLY, me, d.su_id, granted.get(d.su_id)), delay)
        for d in demands
    ]
    new_state = replace(state, offers=offers, phase=CsuPhase.DONE)
    return HandlerResult(state=new_state, sends=sends, allocations=allocations)


def _csu_collect_single_reply(
    state: SuCoalitionState, reply: CoordinatorReply, now: float, ctx: HandlerContext
) -> HandlerResult:
    me = state.agent_id
    su_id = reply.demand_ref
    if su_id is None:
        return _violation(state, me, "batch reply in non-aggregated mode", now)
    replies = state.replies_by_demand.get(su_id, ()) + (reply,)
    by_demand = dict(state.replies_by_demand)
    by_demand[su_id] = replies
    if len(replies) < len(ctx.plan.cpu_ids):
        return HandlerResult(state=replace(state, replies_by_demand=by_demand))
    real = [r.offer for r in replies if r.offer is not None]
    ranked = rank_offers(real, ctx.weights)
    requested = next(d.channels_requested for _, d in state.demands if d.su_id == su_id)
    allocations, _unserved = assign_offers(ranked, [(su_id, requested)], ctx.capacities)
    granted = allocations[0].offer if allocations else None
    delay = ctx.timing.rank_per_offer * len(real)
    sends = [(Message(MessageKind.SU_REPLY, me, su_id, granted), delay)]
    replied = state.replied + (su_id,)
    phase = CsuPhase.DONE if len(replied) == len(state.member_ids) else state.phase
    new_state = replace(state, replies_by_demand=by_demand, replied=replied, phase=phase)
    return HandlerResult(state=new_state, sends=sends, allocations=allocations)


def _handle_su(
    state: SecondaryUserState, msg: Message, now: float, ctx: HandlerContext
) -> HandlerResult:
    me = state.agent_id
    if state.phase in (SuPhase.SERVED, SuPhase.UNSERVED):
        return _violation(
            state, me, f"{msg.kind.value} in terminal phase {state.phase.value}", now
        )
    if state.phase is not SuPhase.WAITING:
        return _violation(state, me, f"{msg.kind.value} in phase {state.phase.value}", now)

    if msg.kind is MessageKind.SU_REPLY:
        served = msg.payload is not None
        new_state = replace(
            state,
            phase=SuPhase.SERVED if served else SuPhase.UNSERVED,
            completed_at=now,
        )
        return HandlerResult(state=new_state)

    if msg.kind in (MessageKind.CPU_OFFER, MessageKind.CPU_NO_OFFER):
        reply: CoordinatorReply = msg.payload
        offers = state.offers + ((reply.offer,) if reply.offer is not None else ())
        seen = state.replies_seen + 1
        if seen < state.expected_replies:
            return HandlerResult(state=replace(state, offers=offers, replies_seen=seen))
        # Final reply: rank locally and take the best feasible offer.
        ranked = rank_offers(offers, ctx.weights)
        allocations, _unserved = assign_offers(
            ranked, [(me, state.channels_requested)], ctx.capacities
        )
        completed = now + ctx.timing.rank_per_offer * len(offers)
        new_state = replace(
            state,
            offers=offers,
            replies_seen=seen,
            phase=SuPhase.SERVED if allocations else SuPhase.UNSERVED,
            completed_at=completed,
        )
        return HandlerResult(state=new_state, allocations=allocations)

    return _violation(state, me, f"unexpected {msg.kind.value}", now)
