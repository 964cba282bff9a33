"""Word-by-word grid filling under a topic quota.

Depth-first backtracking over slots: most-constrained slot first, topic
candidates before filler, seeded tie shuffling per restart episode. A fill
succeeds only when every slot is assigned and at least ``target_rate`` percent
of the placed answers are topic words. Episodes restart on a fixed cadence
(wall-clock interval, or a node budget in deterministic mode) with fresh
random states.

``brute_force_solve`` is an independent exhaustive oracle for small instances;
it shares no search code with the main engine.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace
from enum import Enum
from random import Random

from .grid import Slot, SlotSet
from .lexicon import LexiconEntry, Source, WordIndex
from .util import derive_seed


class Status(Enum):
    SUCCESS = "success"
    TIMEOUT = "timeout"
    EXHAUSTED = "exhausted"


class InstanceTooLargeError(RuntimeError):
    """Exhaustive enumeration exceeded its attempt cap."""


@dataclass(frozen=True)
class SolverConfig:
    """Search hyperparameters.

    ``target_rate`` is the required minimum percentage of topic answers among
    the placed words. When ``node_budget`` is set the solver runs in
    deterministic mode: episodes end after that many node expansions instead
    of after ``restart_interval`` seconds, the episode count is capped at
    ``time_limit // restart_interval`` for parity with wall-clock runs, and
    reported elapsed time is a virtual clock (one full episode == one restart
    interval), so identical configs reproduce byte-identical results.
    """

    target_rate: int = 50
    time_limit: float = 300.0
    restart_interval: float = 10.0
    node_budget: int | None = None
    seed: int = 0
    forbid_duplicate_answers: bool = True
    randomize_ties: bool = True
    quota_pruning: bool = True

    def __post_init__(self) -> None:
        if not 0 <= self.target_rate <= 100:
            raise ValueError(f"target_rate must be in [0, 100], got {self.target_rate}")
        if self.time_limit <= 0 or self.restart_interval <= 0:
            raise ValueError("time_limit and restart_interval must be positive")
        if self.restart_interval > self.time_limit:
            raise ValueError("restart_interval must not exceed time_limit")
        if self.node_budget is not None and self.node_budget < 1:
            raise ValueError("node_budget must be >= 1 when set")

    @property
    def max_episodes(self) -> int | None:
        if math.isinf(self.time_limit):
            return None
        return max(1, int(self.time_limit // self.restart_interval))


@dataclass
class FillState:
    """Mutable search state for one episode."""

    assignment: dict[int, LexiconEntry] = field(default_factory=dict)
    cell_letters: dict[tuple[int, int], str] = field(default_factory=dict)
    topic_count: int = 0
    used_answers: set[str] = field(default_factory=set)
    nodes_expanded: int = 0


@dataclass(frozen=True)
class FillResult:
    status: Status
    assignment: dict[int, str]
    achieved_topic_ratio: float
    elapsed_ms: int
    restarts: int
    nodes_expanded: int
    config: SolverConfig | None = None

    @property
    def success(self) -> bool:
        return self.status is Status.SUCCESS

    def to_json_dict(self) -> dict:
        return {
            "status": self.status.value,
            "achieved_topic_ratio": self.achieved_topic_ratio,
            "elapsed_ms": self.elapsed_ms,
            "restarts": self.restarts,
            "nodes_expanded": self.nodes_expanded,
            "assignment": {str(k): v for k, v in sorted(self.assignment.items())},
        }


def quota_needed(total_slots: int, target_rate: int) -> int:
    """Minimum topic answers: 'at least T%' rounds up on fractional slots."""
    return -(-total_slots * target_rate // 100)


def quota_feasible(state: FillState, total_slots: int, target_rate: int) -> bool:
    """True while the quota is still reachable.

    Best case assigns topic words to every remaining slot, so pruning on this
    bound never cuts a state extendable to a quota-satisfying fill.
    """
    unassigned = total_slots - len(state.assignment)
    return state.topic_count + unassigned >= quota_needed(total_slots, target_rate)


def _slot_constraints(state: FillState, slot: Slot) -> list[tuple[int, str]]:
    letters = state.cell_letters
    return [(i, letters[cell]) for i, cell in enumerate(slot.cells) if cell in letters]


def choose_next_slot(state: FillState, slotset: SlotSet, index: WordIndex) -> int:
    """Most-constrained unassigned slot.

    Ties go to the slot crossing more unassigned slots, then to the lowest
    slot_id.
    """
    assigned = state.assignment
    best_count = None
    tied: list[int] = []
    for slot in slotset.slots:
        if slot.slot_id in assigned:
            continue
        count = index.count_matches(
            slot.length, _slot_constraints(state, slot), state.used_answers
        )
        if best_count is None or count < best_count:
            best_count = count
            tied = [slot.slot_id]
        elif count == best_count:
            tied.append(slot.slot_id)
    if best_count is None:
        raise ValueError("no unassigned slots")
    if len(tied) == 1:
        return tied[0]
    degree = dict.fromkeys(tied, 0)
    for crossing in slotset.crossings:
        if crossing.slot_a in degree and crossing.slot_b not in assigned:
            degree[crossing.slot_a] += 1
        if crossing.slot_b in degree and crossing.slot_a not in assigned:
            degree[crossing.slot_b] += 1
    return min(tied, key=lambda sid: (-degree[sid], sid))


def _ordered_candidates(
    index: WordIndex, slot: Slot, state: FillState, rng: Random | None
) -> list[LexiconEntry]:
    cands = index.candidates(slot.length, _slot_constraints(state, slot), state.used_answers)
    if rng is not None and len(cands) > 1:
        # Reshuffle within the topic and filler groups; topic-first ordering
        # stays intact, only the lexicographic tie-break is randomized.
        split = 0
        while split < len(cands) and cands[split].source is Source.TOPIC:
            split += 1
        topic, filler = cands[:split], cands[split:]
        rng.shuffle(topic)
        rng.shuffle(filler)
        cands = topic + filler
    return cands


class _EpisodeCut(Exception):
    """Episode hit its node budget or deadline."""


_EXHAUSTED = "exhausted"
_CUT = "cut"
_FOUND = "found"


def _run_episode(
    slotset: SlotSet,
    index: WordIndex,
    config: SolverConfig,
    state: FillState,
    rng: Random | None,
    deadline: float | None,
) -> str:
    total = len(slotset.slots)
    need = quota_needed(total, config.target_rate)
    budget = config.node_budget
    forbid = config.forbid_duplicate_answers
    slots = slotset.slots

    def dfs() -> bool:
        if len(state.assignment) == total:
            return state.topic_count >= need
        if config.quota_pruning and not quota_feasible(state, total, config.target_rate):
            return False
        slot = slots[choose_next_slot(state, slotset, index)]
        for entry in _ordered_candidates(index, slot, state, rng):
            if budget is not None and state.nodes_expanded >= budget:
                raise _EpisodeCut
            if deadline is not None and time.monotonic() > deadline:
                raise _EpisodeCut
            state.nodes_expanded += 1

            state.assignment[slot.slot_id] = entry
            if entry.source is Source.TOPIC:
                state.topic_count += 1
            if forbid:
                state.used_answers.add(entry.answer)
            new_cells = []
            letters = state.cell_letters
            for i, cell in enumerate(slot.cells):
                if cell not in letters:
                    letters[cell] = entry.answer[i]
                    new_cells.append(cell)

            if dfs():
                return True

            for cell in new_cells:
                del letters[cell]
            if forbid:
                state.used_answers.discard(entry.answer)
            if entry.source is Source.TOPIC:
                state.topic_count -= 1
            del state.assignment[slot.slot_id]
        return False

    try:
        return _FOUND if dfs() else _EXHAUSTED
    except _EpisodeCut:
        return _CUT


def run_with_restarts(slotset: SlotSet, index: WordIndex, config: SolverConfig) -> FillResult:
    """Run restart episodes until success, exhaustion, or the global limit.

    Episode i gets its own random state derived from (seed, i). A non-random
    episode that exhausts its search space proves unsatisfiability
    (``EXHAUSTED``); with tie randomization the engine keeps restarting and
    ends in ``TIMEOUT`` instead.
    """
    total = len(slotset.slots)
    deterministic = config.node_budget is not None
    max_episodes = config.max_episodes
    started = time.monotonic()
    virtual_ms = 0.0
    nodes_total = 0
    episodes = 0
    final_state: FillState | None = None
    status = Status.TIMEOUT

    if total == 0:
        return FillResult(
            status=Status.SUCCESS,
            assignment={},
            achieved_topic_ratio=1.0,
            elapsed_ms=0,
            restarts=0,
            nodes_expanded=0,
            config=config,
        )

    while True:
        rng = (
            Random(derive_seed(config.seed, "episode", episodes))
            if config.randomize_ties
            else None
        )
        state = FillState()
        if deterministic:
            deadline = None
        else:
            episode_start = time.monotonic()
            deadline = min(started + config.time_limit, episode_start + config.restart_interval)
        outcome = _run_episode(slotset, index, config, state, rng, deadline)
        episodes += 1
        nodes_total += state.nodes_expanded
        if deterministic:
            virtual_ms += (
                config.restart_interval
                * 1000.0
                * min(state.nodes_expanded, config.node_budget)
                / config.node_budget
            )
        if outcome == _FOUND:
            status = Status.SUCCESS
            final_state = state
            break
        if outcome == _EXHAUSTED and not config.randomize_ties:
            status = Status.EXHAUSTED
            break
        if outcome == _EXHAUSTED and max_episodes is None:
            # No episode cap means an unlimited time budget; restarting an
            # already fully explored space would spin forever.
            status = Status.EXHAUSTED
            break
        if max_episodes is not None and episodes >= max_episodes:
            status = Status.TIMEOUT
            break
        if not deterministic and time.monotonic() - started >= config.time_limit:
            status = Status.TIMEOUT
            break

    if deterministic:
        elapsed_ms = int(round(virtual_ms))
    else:
        elapsed_ms = int(round((time.monotonic() - started) * 1000))

    if final_state is not None:
        assignment = {sid: e.answer for sid, e in final_state.assignment.items()}
        ratio = final_state.topic_count / total
    else:
        assignment = {}
        ratio = 0.0
    return FillResult(
        status=status,
        assignment=assignment,
        achieved_topic_ratio=ratio,
        elapsed_ms=elapsed_ms,
        restarts=episodes - 1,
        nodes_expanded=nodes_total,
        config=config,
    )


def solve(slotset: SlotSet, index: WordIndex, config: SolverConfig) -> FillResult:
    """Fill every slot subject to the topic quota. See :func:`run_with_restarts`."""
    return run_with_restarts(slotset, index, config)


def maximize_topic_rate(
    slotset: SlotSet, index: WordIndex, config: SolverConfig, step: int = 10
) -> FillResult:
    """Anytime topic-rate maximization.

    Solves at the configured rate, then keeps re-solving with the target
    raised just above the achieved ratio until a solve fails or the target
    passes 100. Returns the best success (or the first failure when nothing
    succeeds). Total wall time stays within ``config.time_limit``.
    """
    total = len(slotset.slots)
    started = time.monotonic()
    deterministic = config.node_budget is not None
    best: FillResult | None = None
    first_failure: FillResult | None = None
    rate = config.target_rate
    while rate <= 100:
        if deterministic:
            sub = replace(config, target_rate=rate)
        else:
            remaining = config.time_limit - (time.monotonic() - started)
            if remaining <= 0:
                break
            sub = replace(
                config,
                target_rate=rate,
                time_limit=remaining,
                restart_interval=min(config.restart_interval, remaining),
            )
        result = solve(slotset, index, sub)
        if not result.success:
            first_failure = first_failure or result
            break
        best = result
        if total == 0:
            break
        achieved_percent = round(result.achieved_topic_ratio * 100)
        rate = max(rate + step, achieved_percent + step)
    if best is not None:
        return best
    if first_failure is not None:
        return first_failure
    return solve(slotset, index, config)


@dataclass(frozen=True)
class BruteForceResult:
    satisfiable: bool
    assignment: dict[int, str] | None = None


def brute_force_solve(
    slotset: SlotSet,
    index: WordIndex,
    target_rate: int,
    forbid_duplicate_answers: bool = True,
    attempt_cap: int = 10_000_000,
) -> BruteForceResult:
    """Exhaustive oracle: enumerate per-slot candidates in canonical order.

    No heuristics and no quota pruning; only letter consistency and the
    duplicate rule cut branches, and the quota is checked on complete
    assignments. Intended for small instances; raises
    :class:`InstanceTooLargeError` past ``attempt_cap`` attempted placements.
    """
    slots = slotset.slots
    total = len(slots)
    need = quota_needed(total, target_rate)
    if total == 0:
        return BruteForceResult(satisfiable=True, assignment={})
    pools = [index.by_length.get(slot.length, ()) for slot in slots]
    if any(not pool for pool in pools):
        return BruteForceResult(satisfiable=False)

    letters: dict[tuple[int, int], str] = {}
    used: set[str] = set()
    chosen: list[LexiconEntry] = []
    attempts = 0

    def enumerate_from(depth: int, topic_count: int) -> bool:
        nonlocal attempts
        if depth == total:
            return topic_count >= need
        slot = slots[depth]
        for entry in pools[depth]:
            attempts += 1
            if attempts > attempt_cap:
                raise InstanceTooLargeError(f"exceeded {attempt_cap} placement attempts")
            if forbid_duplicate_answers and entry.answer in used:
                continue
            answer = entry.answer
            new_cells = []
            ok = True
            for i, cell in enumerate(slot.cells):
                have = letters.get(cell)
                if have is None:
                    letters[cell] = answer[i]
                    new_cells.append(cell)
                elif have != answer[i]:
                    ok = False
                    break
            if ok:
                chosen.append(entry)
                if forbid_duplicate_answers:
                    used.add(answer)
                if enumerate_from(
                    depth + 1, topic_count + (entry.source is Source.TOPIC)
                ):
                    return True
                if forbid_duplicate_answers:
                    used.discard(answer)
                chosen.pop()
            for cell in new_cells:
                del letters[cell]
        return False

    if enumerate_from(0, 0):
        return BruteForceResult(
            satisfiable=True,
            assignment={slot.slot_id: e.answer for slot, e in zip(slots, chosen)},
        )
    return BruteForceResult(satisfiable=False)
