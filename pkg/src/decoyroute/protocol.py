"""The clocked five-step protocol: schedule, slot runners, disturbance checks.

A run works through K global clock cycles per node pair.  A pre-shared
schedule (derived deterministically from a shared secret seed) reserves
some cycles as message-integrity decoys (Type 2: a BB84 qubit in a
scheduled basis, measured at the far end in the same basis) and some as
path-integrity decoys (Type 3: a path packet sent out and interfered on
return).  Every transaction, payload or decoy, occupies two cycles: the
forward packet at cycle n and a return packet at cycle n + 1, so an
outside observer sees the same two-cycle rhythm whatever the slot type.
Unreserved cycles are available for payload traffic (Type 1).

After the run, each pair turns its decoy tallies into disturbance
estimates and compares them against thresholds; exceeding either one
flags an eavesdropper.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import seeding
from .adversary import (
    AttackConfig,
    Eavesdropper,
    decide_intercept,
    intercept_message,
    intercept_path,
    learned_traffic_fraction,
)
from .analysis import baseline_disturbance, inferred_eta, leaked_fraction, message_error
from .channel import ChannelModel, transmit
from .quantum import (
    Basis,
    QubitPreparation,
    SpatioTemporalMode,
    interfere_path_packet,
    measure_qubit,
    prepare_bb84,
    prepare_path_packet,
)


class SlotType(enum.Enum):
    TYPE1 = "type1"
    TYPE2 = "type2"
    TYPE3 = "type3"


@dataclass(frozen=True)
class SlotAssignment:
    """One scheduled decoy transmission; ``basis`` is set for Type 2 only."""

    slot_type: SlotType
    cycle: int
    sender: int
    receiver: int
    basis: Basis | None = None

    def __post_init__(self) -> None:
        if self.sender == self.receiver:
            raise ValueError("sender and receiver must differ")
        if (self.basis is not None) != (self.slot_type is SlotType.TYPE2):
            raise ValueError("basis is required for Type 2 slots and only for them")


@dataclass(frozen=True)
class Schedule:
    """The pre-shared assignment of clock cycles to decoy slots."""

    K: int
    assignments: tuple[SlotAssignment, ...]
    shared_seed: int

    def for_pair(self, sender: int, receiver: int) -> dict[int, SlotAssignment]:
        return {
            a.cycle: a
            for a in self.assignments
            if a.sender == sender and a.receiver == receiver
        }

    def count(self, slot_type: SlotType) -> int:
        return sum(1 for a in self.assignments if a.slot_type is slot_type)


@dataclass
class DisturbanceStats:
    """Trial and error counters for one node pair's decoy slots."""

    type2_trials: int = 0
    type2_errors: int = 0
    type3_trials: int = 0
    type3_errors: int = 0

    @property
    def d2_hat(self) -> float | None:
        if self.type2_trials == 0:
            return None
        return self.type2_errors / self.type2_trials

    @property
    def d3_hat(self) -> float | None:
        if self.type3_trials == 0:
            return None
        return self.type3_errors / self.type3_trials


@dataclass
class Streams:
    """Per-subsystem random generators for one simulated pair."""

    channel: np.random.Generator
    measurement: np.random.Generator
    eve: np.random.Generator

    @classmethod
    def from_seed(cls, root_seed: int, pair_index: int = 0) -> "Streams":
        return cls(
            channel=seeding.stream_rng(root_seed, "channel", pair_index),
            measurement=seeding.stream_rng(root_seed, "measurement", pair_index),
            eve=seeding.stream_rng(root_seed, "eve", pair_index),
        )


@dataclass(frozen=True)
class Type1Record:
    delivered: bool
    eve_learned_endpoints: bool


def _max_slots_per_pair(K: int) -> int:
    # Each decoy occupies its cycle plus the next (return packet), so a
    # pair's reserved cycles must be pairwise non-adjacent.
    return (K + 1) // 2


def _draw_spaced_cycles(rng: np.random.Generator, K: int, count: int) -> np.ndarray:
    """Uniform draw of ``count`` pairwise non-adjacent cycles in [0, K)."""
    if count == 0:
        return np.empty(0, dtype=np.int64)
    # Bijection between k-subsets of [0, K-k] and non-adjacent k-subsets of
    # [0, K): spread a sorted plain draw by its rank.
    base = np.sort(rng.choice(K - count + 1, size=count, replace=False))
    return base + np.arange(count)


def generate_schedule(
    K: int,
    node_pairs: list[tuple[int, int]],
    h2_per_pair: int,
    h3_per_pair: int,
    shared_seed: int,
) -> Schedule:
    """Draw the pre-shared schedule; a pure function of ``shared_seed``.

    Per pair, the decoy cycles are drawn uniformly over the conflict-free
    subsets of [0, K) (no decoy may sit on the return cycle of another),
    then split between Type 2 (with a uniform basis each) and Type 3.
    """
    if K < 1:
        raise ValueError(f"K must be at least 1, got {K}")
    if h2_per_pair < 0 or h3_per_pair < 0:
        raise ValueError("slot counts must be non-negative")
    total = h2_per_pair + h3_per_pair
    if total > K:
        raise ValueError(f"over-subscribed schedule: {total} decoy slots > K = {K}")
    if total > _max_slots_per_pair(K):
        raise ValueError(
            f"over-subscribed schedule: {total} decoy slots need return cycles, "
            f"at most {_max_slots_per_pair(K)} fit in K = {K}"
        )

    assignments: list[SlotAssignment] = []
    for pair_index, (sender, receiver) in enumerate(node_pairs):
        if sender == receiver:
            raise ValueError(f"pair {pair_index} has sender == receiver == {sender}")
        rng = np.random.default_rng(np.random.SeedSequence((shared_seed, pair_index)))
        cycles = _draw_spaced_cycles(rng, K, total)
        cycles = rng.permutation(cycles)
        for cycle in cycles[:h2_per_pair]:
            basis = Basis.Z if rng.random() < 0.5 else Basis.X
            assignments.append(
                SlotAssignment(SlotType.TYPE2, int(cycle), sender, receiver, basis)
            )
        for cycle in cycles[h2_per_pair:]:
            assignments.append(SlotAssignment(SlotType.TYPE3, int(cycle), sender, receiver))
    assignments.sort(key=lambda a: (a.cycle, a.sender, a.receiver))
    return Schedule(K=K, assignments=tuple(assignments), shared_seed=shared_seed)


def _eve_decisions(
    cycle: int, eve: Eavesdropper, rng: np.random.Generator
) -> tuple[bool, bool]:
    # Both decisions are drawn every transaction so the eavesdropper
    # stream stays aligned across attack modes.
    path_hit = decide_intercept(cycle, eve.config.path_rate, rng)
    msg_hit = decide_intercept(cycle, eve.config.message_rate, rng)
    return path_hit, msg_hit


def _send_dummy_return(channel: ChannelModel, streams: Streams) -> None:
    # Content is discarded; generating and transmitting it keeps the wire
    # pattern and the stream consumption identical across slot types.
    QubitPreparation(
        Basis.Z if streams.measurement.random() < 0.5 else Basis.X,
        int(streams.measurement.random() < 0.5),
    )
    transmit(channel.T, streams.channel)


def run_type1_slot(
    assignment: SlotAssignment,
    payload_bit: int,
    channel: ChannelModel,
    eve: Eavesdropper,
    streams: Streams,
) -> Type1Record:
    """One payload round trip: qubit out, dummy back."""
    if assignment.slot_type is not SlotType.TYPE1:
        raise ValueError(f"expected a Type 1 assignment, got {assignment.slot_type}")
    path_hit, msg_hit = _eve_decisions(assignment.cycle, eve, streams.eve)

    prep = prepare_bb84(Basis.Z, payload_bit)
    mode = SpatioTemporalMode(assignment.sender, assignment.receiver, assignment.cycle)
    if path_hit:
        _, (s, r, n) = intercept_path(mode)
        eve.ledger.record_endpoints(n, s, r)
    if msg_hit:
        _, eve_bit, eve_basis = intercept_message(prep, streams.eve)
        eve.ledger.record_bit(assignment.cycle, eve_bit, eve_basis)

    delivered = transmit(channel.T, streams.channel)
    _send_dummy_return(channel, streams)
    return Type1Record(delivered=delivered, eve_learned_endpoints=path_hit)


def run_type2_slot(
    assignment: SlotAssignment,
    channel: ChannelModel,
    eve: Eavesdropper,
    streams: Streams,
    stats: DisturbanceStats,
) -> bool:
    """One message-integrity decoy; returns whether it counted an error."""
    if assignment.slot_type is not SlotType.TYPE2 or assignment.basis is None:
        raise ValueError("expected a Type 2 assignment with a basis")
    path_hit, msg_hit = _eve_decisions(assignment.cycle, eve, streams.eve)

    sent_bit = int(streams.measurement.random() < 0.5)
    prep = prepare_bb84(assignment.basis, sent_bit)
    if path_hit:
        # Single-mode label: read out classically, no disturbance.
        _, (s, r, n) = intercept_path(
            SpatioTemporalMode(assignment.sender, assignment.receiver, assignment.cycle)
        )
        eve.ledger.record_endpoints(n, s, r)
    if msg_hit:
        prep, eve_bit, eve_basis = intercept_message(prep, streams.eve)
        eve.ledger.record_bit(assignment.cycle, eve_bit, eve_basis)

    survived = transmit(channel.T, streams.channel)
    if survived:
        measured = measure_qubit(prep, assignment.basis, channel.mu, streams.measurement)
    else:
        measured = int(streams.measurement.random() < 0.5)
    error = measured != sent_bit

    _send_dummy_return(channel, streams)
    stats.type2_trials += 1
    stats.type2_errors += int(error)
    return error


def run_type3_slot(
    assignment: SlotAssignment,
    channel: ChannelModel,
    eve: Eavesdropper,
    streams: Streams,
    stats: DisturbanceStats,
) -> bool:
    """One path-integrity decoy; returns whether it counted an error."""
    if assignment.slot_type is not SlotType.TYPE3:
        raise ValueError(f"expected a Type 3 assignment, got {assignment.slot_type}")
    path_hit, msg_hit = _eve_decisions(assignment.cycle, eve, streams.eve)

    packet = prepare_path_packet(
        assignment.sender, assignment.receiver, assignment.cycle, streams.measurement
    )
    if path_hit:
        packet, (s, r, n) = intercept_path(packet)
        eve.ledger.record_endpoints(n, s, r)
    if msg_hit:
        # Content tap touches only the dummy payload, not the mode.
        _, eve_bit, eve_basis = intercept_message(packet.dummy, streams.eve)
        eve.ledger.record_bit(assignment.cycle, eve_bit, eve_basis)

    # Ideal resend hardware: interception leaves survival untouched.
    out_leg = transmit(channel.T, streams.channel)
    back_leg = transmit(channel.T, streams.channel)
    outcome = interfere_path_packet(
        packet, out_leg and back_leg, channel.gamma, streams.measurement
    )
    error = outcome != packet.sign
    stats.type3_trials += 1
    stats.type3_errors += int(error)
    return error


def estimate_disturbance(stats: DisturbanceStats) -> tuple[float | None, float | None]:
    """Empirical disturbance ratios; ``None`` marks a zero-trial (undefined) estimate."""
    return stats.d2_hat, stats.d3_hat


def detect_eavesdropper(
    d2_hat: float | None,
    d3_hat: float | None,
    threshold2: float,
    threshold3: float,
) -> bool:
    """Flag an eavesdropper when either defined disturbance exceeds its threshold."""
    for name, threshold in (("threshold2", threshold2), ("threshold3", threshold3)):
        if not 0.0 <= threshold <= 0.5:
            raise ValueError(f"{name} must be in [0, 0.5], got {threshold}")
    exceeded2 = d2_hat is not None and d2_hat > threshold2
    exceeded3 = d3_hat is not None and d3_hat > threshold3
    return bool(exceeded2 or exceeded3)


def default_thresholds(
    channel: ChannelModel, type2_trials: int, type3_trials: int, n_sigma: float = 5.0
) -> tuple[float, float]:
    """Baseline expectation plus ``n_sigma`` binomial standard errors, capped at 0.5."""
    e = message_error(channel.mu, channel.T)
    d = baseline_disturbance(channel.gamma, channel.T)
    th2 = e
    if type2_trials > 0:
        th2 += n_sigma * math.sqrt(e * (1.0 - e) / type2_trials)
    th3 = d
    if type3_trials > 0:
        th3 += n_sigma * math.sqrt(d * (1.0 - d) / type3_trials)
    return min(0.5, th2), min(0.5, th3)


@dataclass
class PairResult:
    """Per-pair outcome of a run."""

    sender: int
    receiver: int
    stats: DisturbanceStats
    type1_slots: int
    type1_delivered: int
    eve_learned_type1: int
    detected: bool

    @property
    def d2_hat(self) -> float | None:
        return self.stats.d2_hat

    @property
    def d3_hat(self) -> float | None:
        return self.stats.d3_hat

    @property
    def eve_learned_fraction(self) -> float | None:
        if self.type1_slots == 0:
            return None
        return self.eve_learned_type1 / self.type1_slots


@dataclass
class SimulationResult:
    """All pairs plus the run-level summary."""

    schedule: Schedule
    pairs: list[PairResult]
    eavesdropper: Eavesdropper
    detected: bool
    inferred_eta: float | None
    leaked_fraction_bound: float | None
    actual_learned_fraction: float | None


def run_simulation(
    *,
    K: int,
    node_pairs: list[tuple[int, int]] | None = None,
    h2_per_pair: int,
    h3_per_pair: int,
    channel: ChannelModel,
    attack: AttackConfig | None = None,
    seed: int,
    traffic: str = "full",
    threshold2: float | None = None,
    threshold3: float | None = None,
) -> SimulationResult:
    """Drive the full protocol once and aggregate the detection summary.

    ``traffic`` selects the payload workload: ``"full"`` starts a payload
    round trip in every cycle not blocked by a decoy or a pending return,
    ``"silent"`` sends no payload at all.  The summary attributes all
    pooled path disturbance to interception (inferred eta, leak bound) and
    reports the fraction of payload endpoints actually present in the
    eavesdropper's ledger for comparison.
    """
    if traffic not in ("full", "silent"):
        raise ValueError(f"traffic must be 'full' or 'silent', got {traffic}")
    if node_pairs is None:
        node_pairs = [(0, 1)]
    attack = attack or AttackConfig()

    shared_seed = seeding.child_seed(seed, "schedule")
    schedule = generate_schedule(K, node_pairs, h2_per_pair, h3_per_pair, shared_seed)
    eve = Eavesdropper(config=attack)

    if threshold2 is None or threshold3 is None:
        auto2, auto3 = default_thresholds(channel, h2_per_pair, h3_per_pair)
        threshold2 = auto2 if threshold2 is None else threshold2
        threshold3 = auto3 if threshold3 is None else threshold3

    pair_results: list[PairResult] = []
    type1_keys: set[tuple[int, int, int]] = set()
    total_type1 = 0
    for pair_index, (sender, receiver) in enumerate(node_pairs):
        streams = Streams.from_seed(seed, pair_index)
        scheduled = schedule.for_pair(sender, receiver)
        stats = DisturbanceStats()
        type1_slots = 0
        type1_delivered = 0
        learned_type1 = 0

        busy_until = -1
        for cycle in range(K):
            assignment = scheduled.get(cycle)
            if assignment is not None:
                if assignment.slot_type is SlotType.TYPE2:
                    run_type2_slot(assignment, channel, eve, streams, stats)
                else:
                    run_type3_slot(assignment, channel, eve, streams, stats)
                busy_until = cycle + 1
                continue
            if cycle <= busy_until:
                continue
            if traffic == "full" and (cycle + 1) not in scheduled:
                payload = SlotAssignment(SlotType.TYPE1, cycle, sender, receiver)
                bit = int(streams.measurement.random() < 0.5)
                record = run_type1_slot(payload, bit, channel, eve, streams)
                type1_slots += 1
                type1_delivered += int(record.delivered)
                learned_type1 += int(record.eve_learned_endpoints)
                type1_keys.add((cycle, sender, receiver))
                busy_until = cycle + 1

        d2_hat, d3_hat = estimate_disturbance(stats)
        detected = detect_eavesdropper(d2_hat, d3_hat, threshold2, threshold3)
        pair_results.append(
            PairResult(
                sender=sender,
                receiver=receiver,
                stats=stats,
                type1_slots=type1_slots,
                type1_delivered=type1_delivered,
                eve_learned_type1=learned_type1,
                detected=detected,
            )
        )
        total_type1 += type1_slots

    pooled2_trials = sum(p.stats.type2_trials for p in pair_results)
    pooled2_errors = sum(p.stats.type2_errors for p in pair_results)
    pooled3_trials = sum(p.stats.type3_trials for p in pair_results)
    pooled3_errors = sum(p.stats.type3_errors for p in pair_results)

    inferred: float | None = None
    leak_bound: float | None = None
    if pooled3_trials > 0:
        d3_pooled = min(0.5, pooled3_errors / pooled3_trials)
        inferred = inferred_eta(d3_pooled)
        if pooled2_trials > 0:
            e_meas = min(0.5, pooled2_errors / pooled2_trials)
        else:
            e_meas = message_error(channel.mu, channel.T)
        leak_bound = leaked_fraction(d3_pooled, e_meas)

    actual: float | None = None
    if total_type1 > 0:
        actual = learned_traffic_fraction(eve.ledger, total_type1, type1_keys)

    return SimulationResult(
        schedule=schedule,
        pairs=pair_results,
        eavesdropper=eve,
        detected=any(p.detected for p in pair_results),
        inferred_eta=inferred,
        leaked_fraction_bound=leak_bound,
        actual_learned_fraction=actual,
    )
