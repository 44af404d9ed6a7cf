"""Closed-form message accounting, scenario generators, and the built-in studies.

Four studies are provided:

* ``exp_i``   -- response time vs. SU count in a single SU-coalition
                 (1, 2, 3, 4, 5, 10 SUs; 15 PUs over 5 PU-coalitions).
* ``exp_ii``  -- response time vs. SU-coalition count for 10 SUs split as
                 5x2, 2x5, 1x10.
* ``exp_iii`` -- message totals vs. SU-coalition count for 1000 SUs split
                 as 500x2, 100x10, 40x25, 1x1000.
* ``exp_iv``  -- message totals across the three topologies over an SU
                 sweep (default 5, 10, 15, 20, 25; coalitions of 5 SUs).

Scenario generation is fully deterministic from the experiment seed.
Measured response times are simulation-time spans; only orderings and
monotone trends are meaningful, not wall-clock values.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .kernel import RunReport, run
from .model import (
    DEFAULT_WEIGHTS,
    Coordinator,
    PrimaryUser,
    Scenario,
    SecondaryUser,
    TimingConstants,
    Zone,
)
from .protocol import MessageKind

__all__ = [
    "EXPERIMENT_IDS",
    "KIND_COLUMNS",
    "MetricsTable",
    "ExperimentSpec",
    "experiment_spec",
    "expected_messages",
    "generate_scenario",
    "run_experiment",
]

EXPERIMENT_IDS = ("exp_i", "exp_ii", "exp_iii", "exp_iv")
KIND_COLUMNS = tuple(kind.value for kind in MessageKind)

# Generated PU/SU parameter ranges (the studies only compare counts and
# orderings, so the exact ranges are free; they are echoed in every table).
CHANNELS_RANGE = (1, 8)
PRICE_RANGE = (5.0, 20.0)
ALLOC_TIME_RANGE = (10.0, 120.0)
REQUEST_RANGE = (1, 3)
ARRIVAL_SPACING = 100.0


def expected_messages(
    topology: str,
    aggregation: bool | None,
    su_count: int,
    pu_count: int,
    cpu_count: int | None = None,
    csu_count: int | None = None,
) -> int:
    """Closed-form directed-message total for one run.

    Counts every protocol message including the initial PU registrations
    (one per PU in the coalition topologies) and negative coordinator
    replies (a CpuNoOffer is still the coordinator's one reply).
    """
    for name, value in (("su_count", su_count), ("pu_count", pu_count),
                        ("cpu_count", cpu_count), ("csu_count", csu_count)):
        if value is not None and value < 0:
            raise ValueError(f"{name} must be >= 0, got {value}")

    if topology == "no_coalition":
        if cpu_count or csu_count:
            raise ValueError("no_coalition admits no coalition coordinators")
        return 2 * su_count * pu_count
    if topology == "cpu_only":
        if not cpu_count:
            raise ValueError("cpu_only requires at least one PU-coalition")
        if csu_count:
            raise ValueError("cpu_only admits no SU-coalitions")
        return pu_count + 2 * su_count * cpu_count
    if topology == "cpu_csu":
        if not cpu_count or not csu_count:
            raise ValueError("cpu_csu requires PU- and SU-coalitions")
        if aggregation is None:
            raise ValueError("cpu_csu requires the aggregation flag")
        if aggregation:
            return pu_count + 2 * su_count + 2 * csu_count * cpu_count
        return pu_count + 2 * su_count + 2 * su_count * cpu_count
    raise ValueError(f"unknown topology {topology!r}")


def generate_scenario(
    topology: str,
    pu_count: int,
    cpu_count: int = 0,
    su_groups: tuple[int, ...] = (),
    aggregation: bool = True,
    seed: int = 1,
    weights: tuple[float, float, float] = DEFAULT_WEIGHTS,
    timing: TimingConstants | None = None,
) -> Scenario:
    """Deterministically generate one experiment scenario.

    ``su_groups`` lists SU-coalition sizes for ``cpu_csu``; for the other
    topologies pass a single group (no SU coordinators are created, the
    grouping only staggers arrivals). Within each group the i-th SU arrives
    at (i-1) * 100 time units. Agents are laid out in well-separated zone
    clusters so nearest-coordinator assignment reproduces the intended
    memberships.
    """
    rng = random.Random(seed)
    timing = timing or TimingConstants()

    pus = []
    for j in range(pu_count):
        channels = rng.randint(*CHANNELS_RANGE)
        price = rng.uniform(*PRICE_RANGE)
        alloc_time = rng.uniform(*ALLOC_TIME_RANGE)
        if topology == "no_coalition":
            zone = Zone(10.0 * j, 0.0)
        else:
            block = j * cpu_count // pu_count
            zone = Zone(100.0 * block + 1.0 + 0.01 * j, 0.0)
        pus.append(PrimaryUser(f"pu{j:03d}", zone, channels, price, alloc_time))

    sus = []
    index = 0
    for group, size in enumerate(su_groups):
        for position in range(size):
            requested = rng.randint(*REQUEST_RANGE)
            if topology == "cpu_csu":
                zone = Zone(100.0 * group + 1.0 + 0.01 * position, 1000.0)
            else:
                zone = Zone(10.0 * index, 1000.0)
            sus.append(
                SecondaryUser(
                    f"su{index:04d}", zone, requested, ARRIVAL_SPACING * position
                )
            )
            index += 1

    cpu_coordinators = ()
    csu_coordinators = ()
    if topology in ("cpu_only", "cpu_csu"):
        cpu_coordinators = tuple(
            Coordinator(f"cpu{k:02d}", Zone(100.0 * k, 0.0)) for k in range(cpu_count)
        )
    if topology == "cpu_csu":
        csu_coordinators = tuple(
            Coordinator(f"csu{c:03d}", Zone(100.0 * c, 1000.0))
            for c in range(len(su_groups))
        )

    return Scenario(
        topology=topology,
        pus=tuple(pus),
        sus=tuple(sus),
        cpu_coordinators=cpu_coordinators,
        csu_coordinators=csu_coordinators,
        aggregation=aggregation,
        seed=seed,
        weights=weights,
        timing=timing,
    )


@dataclass(frozen=True)
class MetricsTable:
    """One experiment's results: a header note block plus labeled rows."""

    experiment_id: str
    notes: tuple[str, ...]
    columns: tuple[str, ...]
    rows: tuple[tuple, ...]


@dataclass(frozen=True)
class ExperimentSpec:
    """A fully pinned configuration for one built-in study."""

    experiment_id: str
    seed: int = 1
    pu_count: int = 15
    cpu_count: int = 5
    su_sweep: tuple[int, ...] = ()
    csu_splits: tuple[tuple[int, int], ...] = ()  # (csu_count, sus_per_csu)
    csu_size: int = 5
    weights: tuple[float, float, float] = DEFAULT_WEIGHTS
    timing: TimingConstants = field(default_factory=TimingConstants)


def experiment_spec(
    experiment_id: str, seed: int = 1, su_sweep: tuple[int, ...] | None = None
) -> ExperimentSpec:
    """Build the standard spec for a study id; ``su_sweep`` overrides exp_iv's."""
    if experiment_id == "exp_i":
        return ExperimentSpec("exp_i", seed=seed, su_sweep=(1, 2, 3, 4, 5, 10))
    if experiment_id == "exp_ii":
        return ExperimentSpec("exp_ii", seed=seed, csu_splits=((5, 2), (2, 5), (1, 10)))
    if experiment_id == "exp_iii":
        return ExperimentSpec(
            "exp_iii", seed=seed, csu_splits=((500, 2), (100, 10), (40, 25), (1, 1000))
        )
    if experiment_id == "exp_iv":
        return ExperimentSpec("exp_iv", seed=seed, su_sweep=su_sweep or (5, 10, 15, 20, 25))
    raise ValueError(f"unknown experiment {experiment_id!r}")


def _common_notes(spec: ExperimentSpec) -> list[str]:
    return [
        f"seed={spec.seed}; fixed topology: {spec.pu_count} PU over {spec.cpu_count} PU-coalitions",
        f"weights={spec.weights}; timing: latency={spec.timing.latency:g}, "
        f"agg_per_demand={spec.timing.agg_per_demand:g}, cpu_select={spec.timing.cpu_select:g}, "
        f"rank_per_offer={spec.timing.rank_per_offer:g}, pu_reply={spec.timing.pu_reply:g}",
        f"generated PU params: channels in {list(CHANNELS_RANGE)}, price in {list(PRICE_RANGE)}, "
        f"alloc_time in {list(ALLOC_TIME_RANGE)}; SU requests in {list(REQUEST_RANGE)}",
        "message totals include the initial PU registration messages (one per PU) "
        "and negative coordinator replies",
        "response times are simulation-time spans (first SU arrival to last SU reply)",
    ]


def _row_counts(report: RunReport) -> tuple[int, ...]:
    return tuple(report.msg_counts[kind] for kind in KIND_COLUMNS)


def _run_checked(
    scenario: Scenario,
    expected: int,
    event_cap: int | None,
) -> RunReport:
    report = run(scenario, event_cap=event_cap)
    if report.total_messages != expected:
        raise RuntimeError(
            f"simulated total {report.total_messages} != closed form {expected}"
        )
    return report


def run_experiment(spec: ExperimentSpec, event_cap: int | None = None) -> MetricsTable:
    """Run every configuration of a study and tabulate the metrics.

    Every row's simulated message total is checked against
    :func:`expected_messages`; a mismatch aborts the study.
    """
    if spec.experiment_id == "exp_i":
        rows = []
        for su_count in spec.su_sweep:
            scenario = generate_scenario(
                "cpu_csu", spec.pu_count, spec.cpu_count, (su_count,),
                seed=spec.seed, weights=spec.weights, timing=spec.timing,
            )
            expected = expected_messages(
                "cpu_csu", True, su_count, spec.pu_count, spec.cpu_count, 1
            )
            report = _run_checked(scenario, expected, event_cap)
            rows.append(
                (f"{su_count} SU", su_count, report.total_messages, report.run_response)
                + _row_counts(report)
            )
        notes = ["response time vs. SU count in a single SU-coalition"] + _common_notes(spec)
        columns = ("label", "su_count", "total_messages", "run_response") + KIND_COLUMNS
        return MetricsTable("exp_i", tuple(notes), columns, tuple(rows))

    if spec.experiment_id in ("exp_ii", "exp_iii"):
        rows = []
        for csu_count, per_csu in spec.csu_splits:
            scenario = generate_scenario(
                "cpu_csu", spec.pu_count, spec.cpu_count, (per_csu,) * csu_count,
                seed=spec.seed, weights=spec.weights, timing=spec.timing,
            )
            expected = expected_messages(
                "cpu_csu", True, csu_count * per_csu, spec.pu_count,
                spec.cpu_count, csu_count,
            )
            report = _run_checked(scenario, expected, event_cap)
            rows.append(
                (f"{csu_count} CSU x {per_csu} SU", csu_count,
                 report.total_messages, report.run_response) + _row_counts(report)
            )
        title = (
            "response time vs. SU-coalition count (10 SUs total)"
            if spec.experiment_id == "exp_ii"
            else "message total vs. SU-coalition count (1000 SUs total)"
        )
        notes = [title] + _common_notes(spec)
        columns = ("label", "csu_count", "total_messages", "run_response") + KIND_COLUMNS
        return MetricsTable(spec.experiment_id, tuple(notes), columns, tuple(rows))

    if spec.experiment_id == "exp_iv":
        rows = []
        for topology in ("no_coalition", "cpu_only", "cpu_csu"):
            for su_count in spec.su_sweep:
                if topology == "cpu_csu":
                    full, rest = divmod(su_count, spec.csu_size)
                    groups = (spec.csu_size,) * full + ((rest,) if rest else ())
                    scenario = generate_scenario(
                        topology, spec.pu_count, spec.cpu_count, groups,
                        seed=spec.seed, weights=spec.weights, timing=spec.timing,
                    )
                    expected = expected_messages(
                        topology, True, su_count, spec.pu_count,
                        spec.cpu_count, len(groups),
                    )
                else:
                    cpu_count = spec.cpu_count if topology == "cpu_only" else 0
                    scenario = generate_scenario(
                        topology, spec.pu_count, cpu_count, (su_count,),
                        seed=spec.seed, weights=spec.weights, timing=spec.timing,
                    )
                    expected = expected_messages(
                        topology, None, su_count, spec.pu_count, cpu_count or None
                    )
                report = _run_checked(scenario, expected, event_cap)
                rows.append(
                    (f"{topology} S={su_count}", topology, su_count,
                     report.total_messages, report.run_response) + _row_counts(report)
                )
        notes = [
            "message totals across the three topologies",
            f"cpu_csu rows aggregate member demands; SU-coalitions sized {spec.csu_size}",
        ] + _common_notes(spec)
        columns = (
            "label", "topology", "su_count", "total_messages", "run_response"
        ) + KIND_COLUMNS
        return MetricsTable("exp_iv", tuple(notes), columns, tuple(rows))

    raise ValueError(f"unknown experiment {spec.experiment_id!r}")
